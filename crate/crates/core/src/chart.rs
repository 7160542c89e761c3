//! Local 4-dimensional charts centred at a point, with the symplectic form
//! expressed in chart coordinates at the centre.
//!
//! On S² × S² the chart at `(x, y)` is
//! `ξ ↦ (retract(x, ξ₁e₁ + ξ₂e₂), retract(y, ξ₃f₁ + ξ₄f₂))` built from
//! [`tangent_frame`]; its differential at 0 is the frame itself, so chart
//! coordinates are orthonormal frame coordinates.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::geom::{omega, retract, tangent_frame, ProductPoint, ProductTangent, SpherePoint, TangentVector};

pub trait LocalChart: Sized {
    /// Chart centred at `self`; `chart(0) == self`.
    fn chart(&self, xi: &Vector4<f64>) -> Self;

    /// Chart coordinates of `q` in the chart centred at `self`.
    fn chart_inv(&self, q: &Self) -> Result<Vector4<f64>>;

    /// Matrix `W` with `form(a, b) = aᵀ W b` for chart-coordinate tangents at the centre.
    fn form_matrix(&self) -> Result<Matrix4<f64>>;
}

/// Tangent at `p` with frame coordinates `c`.
pub fn product_tangent(p: &ProductPoint, c: &Vector4<f64>) -> ProductTangent {
    let fx = tangent_frame(&p.x);
    let fy = tangent_frame(&p.y);
    ProductTangent::new(
        TangentVector {
            base: p.x,
            vec: fx.combine(c[0], c[1]),
        },
        TangentVector {
            base: p.y,
            vec: fy.combine(c[2], c[3]),
        },
    )
}

/// Frame coordinates of a tangent at `p`.
pub fn product_coords(p: &ProductPoint, t: &ProductTangent) -> Vector4<f64> {
    let (a, b) = tangent_frame(&p.x).coords_of(&t.u.vec);
    let (c, d) = tangent_frame(&p.y).coords_of(&t.v.vec);
    Vector4::new(a, b, c, d)
}

/// Frame coordinates of `retract⁻¹(x, z)`, read off as `⟨z, eᵢ⟩ / ⟨z, x⟩` to
/// avoid cancelling against `x`.
pub(crate) fn retract_coords(x: &SpherePoint, z: &SpherePoint) -> Result<(f64, f64)> {
    let d = z.coords().dot(x.coords());
    if !(d > 0.0) {
        return Err(Error::Precondition(
            "point lies outside the chart hemisphere".into(),
        ));
    }
    let f = tangent_frame(x);
    let (a, b) = f.coords_of(z.coords());
    Ok((a / d, b / d))
}

impl LocalChart for ProductPoint {
    fn chart(&self, xi: &Vector4<f64>) -> Self {
        let fx = tangent_frame(&self.x);
        let fy = tangent_frame(&self.y);
        ProductPoint::new(
            retract(&self.x, &fx.combine(xi[0], xi[1])),
            retract(&self.y, &fy.combine(xi[2], xi[3])),
        )
    }

    fn chart_inv(&self, q: &Self) -> Result<Vector4<f64>> {
        let (a, b) = retract_coords(&self.x, &q.x)?;
        let (c, d) = retract_coords(&self.y, &q.y)?;
        Ok(Vector4::new(a, b, c, d))
    }

    fn form_matrix(&self) -> Result<Matrix4<f64>> {
        let basis: Vec<ProductTangent> = (0..4)
            .map(|i| product_tangent(self, &Vector4::ith(i, 1.0)))
            .collect();
        let mut w = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                w[(i, j)] = omega(self, &basis[i], &basis[j])?;
            }
        }
        Ok(w)
    }
}
