//! The explicit maps on S² × S²: the circle action about `x + y`, its moment
//! map, the cut-off profile, the Dehn twist and its inverse, the homotopy
//! from `τ²` to the identity, the factor swap, and the loop `λ_t`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{rotate, ProductPoint, SpherePoint};

/// Smooth monotone step with exact plateaus.
///
/// `inner_value` on `(-∞, inner_edge]`, `outer_value` on `[outer_edge, ∞)`,
/// and in between the C^∞ interpolant `B(u) = g(u) / (g(u) + g(1 - u))` with
/// `g(u) = exp(-1/u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub inner_value: f64,
    pub outer_value: f64,
    pub inner_edge: f64,
    pub outer_edge: f64,
}

fn bump_g(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// `B(u)`, exactly 0 for `u ≤ 0` and exactly 1 for `u ≥ 1`. Symmetric:
/// `B(u) + B(1 - u) = 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = bump_g(u);
        a / (a + bump_g(1.0 - u))
    }
}

impl RadialProfile {
    pub fn new(inner_value: f64, outer_value: f64, inner_edge: f64, outer_edge: f64) -> Result<Self> {
        if !(inner_edge < outer_edge) {
            return Err(Error::Precondition(format!(
                "profile edges must satisfy inner < outer, got {inner_edge} and {outer_edge}"
            )));
        }
        Ok(RadialProfile {
            inner_value,
            outer_value,
            inner_edge,
            outer_edge,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.inner_edge {
            return self.inner_value;
        }
        if t >= self.outer_edge {
            return self.outer_value;
        }
        let u = (t - self.inner_edge) / (self.outer_edge - self.inner_edge);
        self.inner_value + (self.outer_value - self.inner_value) * smooth_step(u)
    }
}

/// The twist profile: `-π` up to `1/2`, `0` from `1` on.
pub const TWIST_PROFILE: RadialProfile = RadialProfile {
    inner_value: -PI,
    outer_value: 0.0,
    inner_edge: 0.5,
    outer_edge: 1.0,
};

/// Radius below which the twist is the swap.
pub const SWAP_RADIUS: f64 = 0.5;

pub fn profile_r(t: f64) -> f64 {
    TWIST_PROFILE.eval(t)
}

/// Circle action: rotate both factors about `x + y` by `t`.
///
/// `rho(0, p)` returns `p` unchanged, bit for bit.
pub fn rho(t: f64, p: &ProductPoint) -> Result<ProductPoint> {
    let axis = p.axis();
    if !(axis.norm() > 0.0) {
        return Err(Error::Antidiagonal);
    }
    if t == 0.0 {
        return Ok(*p);
    }
    Ok(ProductPoint::new(
        SpherePoint::new(rotate(&axis, t, p.x.coords())?)?,
        SpherePoint::new(rotate(&axis, t, p.y.coords())?)?,
    ))
}

/// Moment map `μ(x, y) = -|x + y|`.
pub fn mu(p: &ProductPoint) -> f64 {
    -p.axis_norm()
}

pub fn swap_iota(p: &ProductPoint) -> ProductPoint {
    ProductPoint::new(p.y, p.x)
}

/// The generalized Dehn twist.
pub fn tau(p: &ProductPoint) -> ProductPoint {
    let s = p.axis_norm();
    if s <= SWAP_RADIUS {
        return swap_iota(p);
    }
    // s > 1/2 keeps the axis well away from zero.
    rho(profile_r(s), p).expect("axis is nonzero off the swap region")
}

pub fn tau_inv(p: &ProductPoint) -> ProductPoint {
    let s = p.axis_norm();
    if s <= SWAP_RADIUS {
        return swap_iota(p);
    }
    rho(-profile_r(s), p).expect("axis is nonzero off the swap region")
}

/// Path from the identity (`s = 0`) to `τ²` (`s = 1`).
pub fn homotopy_h(s: f64, p: &ProductPoint) -> Result<ProductPoint> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "[0, 1]",
        });
    }
    let n = p.axis_norm();
    if n <= SWAP_RADIUS {
        return Ok(*p);
    }
    rho(2.0 * s * (PI + profile_r(n)), p)
}

/// `λ_t(x, y) = (R_y^{2πt}(x), y)`.
pub fn loop_lambda(t: f64, p: &ProductPoint) -> Result<ProductPoint> {
    let x = rotate(p.y.coords(), 2.0 * PI * t, p.x.coords())?;
    Ok(ProductPoint::new(SpherePoint::new(x)?, p.y))
}
