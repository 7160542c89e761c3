//! Geometry of the unit sphere and of the product S² × S².
//!
//! Orientation convention: S² carries the outward normal, so the area form
//! is `σ_x(u, v) = ⟨x, u × v⟩` (total area 4π) and an oriented frame
//! `(e1, e2)` at `x` satisfies `e1 × e2 = x`. The product form is
//! `ω = σ ⊕ σ`, giving both factors equal area. Every sign downstream
//! (mapping degrees, winding numbers, the moment map identity) is measured
//! against this choice.

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance for the tangency constraint `⟨v, x⟩ = 0`.
pub const TANGENT_TOL: f64 = 1e-10;

/// A point of the unit sphere. Construction renormalizes the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Precondition(format!(
                "cannot normalize vector of length {n} onto the sphere"
            )));
        }
        Ok(SpherePoint(v / n))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vec3::new(x, y, z))
    }

    /// North pole `(0, 0, 1)`.
    pub fn north() -> Self {
        SpherePoint(Vec3::z())
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    pub fn antipode(&self) -> Self {
        SpherePoint(-self.0)
    }

    pub fn distance(&self, other: &SpherePoint) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// A vector tangent to S² at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: SpherePoint,
    pub vec: Vec3,
}

impl TangentVector {
    pub fn new(base: SpherePoint, vec: Vec3) -> Result<Self> {
        let residual = vec.dot(base.coords()).abs();
        if residual > TANGENT_TOL * (1.0 + vec.norm()) {
            return Err(Error::NotTangent { residual });
        }
        Ok(TangentVector { base, vec })
    }

    pub fn zero(base: SpherePoint) -> Self {
        TangentVector {
            base,
            vec: Vec3::zeros(),
        }
    }

    /// Orthogonal projection of an ambient vector onto `T_base S²`.
    pub fn project(base: SpherePoint, v: Vec3) -> Self {
        let x = base.coords();
        TangentVector {
            base,
            vec: v - x * x.dot(&v),
        }
    }
}

/// A point `(x, y)` of S² × S².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint {
    pub x: SpherePoint,
    pub y: SpherePoint,
}

impl ProductPoint {
    pub fn new(x: SpherePoint, y: SpherePoint) -> Self {
        ProductPoint { x, y }
    }

    /// `x + y`, the axis of the circle action.
    pub fn axis(&self) -> Vec3 {
        self.x.coords() + self.y.coords()
    }

    /// `|x + y|`, which ranges over `[0, 2]`.
    pub fn axis_norm(&self) -> f64 {
        self.axis().norm()
    }

    pub fn distance(&self, other: &ProductPoint) -> f64 {
        self.x.distance(&other.x).max(self.y.distance(&other.y))
    }
}

/// A tangent vector `(u, v)` to S² × S².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductTangent {
    pub u: TangentVector,
    pub v: TangentVector,
}

impl ProductTangent {
    pub fn new(u: TangentVector, v: TangentVector) -> Self {
        ProductTangent { u, v }
    }

    fn based_at(&self, p: &ProductPoint) -> bool {
        self.u.base == p.x && self.v.base == p.y
    }
}

/// Oriented orthonormal frame of `T_x S²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedFrame {
    pub e1: TangentVector,
    pub e2: TangentVector,
}

impl OrientedFrame {
    pub fn base(&self) -> SpherePoint {
        self.e1.base
    }

    /// Ambient vector `a·e1 + b·e2`.
    pub fn combine(&self, a: f64, b: f64) -> Vec3 {
        self.e1.vec * a + self.e2.vec * b
    }

    /// Frame coordinates of an ambient vector (its tangential part).
    pub fn coords_of(&self, v: &Vec3) -> (f64, f64) {
        (self.e1.vec.dot(v), self.e2.vec.dot(v))
    }
}

/// Rodrigues rotation of `v` about `axis / |axis|` by `angle` (right-hand rule).
pub fn rotate(axis: &Vec3, angle: f64, v: &Vec3) -> Result<Vec3> {
    let n = axis.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroAxis);
    }
    let k = axis / n;
    let (s, c) = angle.sin_cos();
    Ok(v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c)))
}

/// Area form `σ_x(u, v) = ⟨x, u × v⟩`.
pub fn area_form(x: &SpherePoint, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    if u.base != *x || v.base != *x {
        return Err(Error::BaseMismatch);
    }
    Ok(x.coords().dot(&u.vec.cross(&v.vec)))
}

/// The product form `ω = σ ⊕ σ` on S² × S².
pub fn omega(p: &ProductPoint, a: &ProductTangent, b: &ProductTangent) -> Result<f64> {
    if !a.based_at(p) || !b.based_at(p) {
        return Err(Error::BaseMismatch);
    }
    Ok(area_form(&p.x, &a.u, &b.u)? + area_form(&p.y, &a.v, &b.v)?)
}

/// Chart-style retraction `normalize(x + w)`.
///
/// Agrees with the exponential map to first order; the gap is `O(|w|³)`.
pub fn retract(x: &SpherePoint, w: &Vec3) -> SpherePoint {
    let v = x.coords() + w;
    SpherePoint(v / v.norm())
}

/// Inverse of [`retract`] restricted to the open hemisphere around `x`.
pub fn retract_inv(x: &SpherePoint, z: &SpherePoint) -> Result<Vec3> {
    let d = z.coords().dot(x.coords());
    if !(d > 0.0) {
        return Err(Error::Precondition(
            "point lies outside the retraction hemisphere".into(),
        ));
    }
    Ok(z.coords() / d - x.coords())
}

/// Deterministic oriented frame at `x`.
///
/// `e1` is the projection of the coordinate axis along which `|x_i|` is
/// smallest (lowest index on ties) onto `T_x S²`, and `e2 = x × e1`. The rule
/// is discontinuous exactly on the branch locus where two coordinates tie for
/// the smallest magnitude; frames are only used as charts, never transported.
pub fn tangent_frame(x: &SpherePoint) -> OrientedFrame {
    let c = x.coords();
    let mut idx = 0;
    for i in 1..3 {
        if c[i].abs() < c[idx].abs() {
            idx = i;
        }
    }
    let mut a = Vec3::zeros();
    a[idx] = 1.0;
    let e1 = (a - c * c[idx]).normalize();
    let e2 = c.cross(&e1);
    OrientedFrame {
        e1: TangentVector { base: *x, vec: e1 },
        e2: TangentVector { base: *x, vec: e2 },
    }
}
