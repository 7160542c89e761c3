//! Finite-difference differential geometry: Jacobians in charts, pullback
//! residuals of symplectic forms, the moment map identity, and the action of
//! a map on the normal bundle of the diagonal.

use nalgebra::{Matrix2, Matrix4, Vector4};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{product_tangent, LocalChart};
use crate::error::{Error, Result};
use crate::geom::{omega, tangent_frame, OrientedFrame, ProductPoint, ProductTangent, SpherePoint, TangentVector};
use crate::maps::{mu, rho};
use crate::sampling::{product_point, sample_rng, unit_vector4};

/// Default finite-difference step on unit-scale charts.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Fixed-point tolerance for [`normal_action`].
pub const FIXED_POINT_TOL: f64 = 1e-8;

/// A 2×2 matrix between two frames of `T_x S²`, as produced by the normal action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap2x2 {
    pub matrix: Matrix2<f64>,
    pub source: OrientedFrame,
    pub target: OrientedFrame,
    pub det: f64,
}

impl LinearMap2x2 {
    pub fn new(matrix: Matrix2<f64>, source: OrientedFrame, target: OrientedFrame) -> Result<Self> {
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("non-finite matrix entry".into()));
        }
        Ok(LinearMap2x2 {
            det: matrix.determinant(),
            matrix,
            source,
            target,
        })
    }

    /// Angle of the orthogonal polar factor `Q` in `M = Q S`.
    ///
    /// For `det M > 0`, `M + det(M) M⁻ᵀ` is a positive multiple of `Q`, which
    /// gives `θ = atan2(m₂₁ - m₁₂, m₁₁ + m₂₂)` in closed form.
    pub fn polar_angle(&self) -> Result<f64> {
        polar_angle(&self.matrix)
    }

    /// Max-entry distance to the rotation by `angle`.
    pub fn rotation_error(&self, angle: f64) -> f64 {
        (self.matrix - rotation2(angle)).amax()
    }
}

pub fn rotation2(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

pub fn polar_angle(m: &Matrix2<f64>) -> Result<f64> {
    let det = m.determinant();
    if !(det > 0.0) {
        return Err(Error::Precondition(format!(
            "polar angle needs a positive determinant, got {det}"
        )));
    }
    Ok((m[(1, 0)] - m[(0, 1)]).atan2(m[(0, 0)] + m[(1, 1)]))
}

/// One named check outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub samples: u64,
    pub seed: u64,
    pub step: Option<f64>,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl VerificationReport {
    /// Aggregates residuals; a NaN residual poisons the maximum and fails the check.
    pub fn from_residuals<I>(name: impl Into<String>, residuals: I, seed: u64, step: Option<f64>, tol: f64) -> Self
    where
        I: IntoIterator<Item = f64>,
    {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut n = 0u64;
        for r in residuals {
            if r.is_nan() || r > max {
                max = if max.is_nan() { max } else { r };
            }
            sum += r;
            n += 1;
        }
        let mean = if n > 0 { sum / n as f64 } else { 0.0 };
        VerificationReport {
            name: name.into(),
            samples: n,
            seed,
            step,
            max_residual: max,
            mean_residual: mean,
            tol,
            pass: max <= tol,
        }
    }
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::OutOfRange {
            name: "step",
            value: step,
            range: "(0, ∞)",
        });
    }
    Ok(())
}

/// Central-difference Jacobian of `map` at `p`, from the chart at `p` to the
/// chart centred at `target`. `target` must lie close to `map(p)`.
pub fn differential_into<P, Q, F>(map: &F, p: &P, target: &Q, step: f64) -> Result<Matrix4<f64>>
where
    P: LocalChart,
    Q: LocalChart,
    F: Fn(&P) -> Result<Q>,
{
    check_step(step)?;
    let mut jac = Matrix4::zeros();
    for k in 0..4 {
        let e = Vector4::ith(k, step);
        let plus = target.chart_inv(&map(&p.chart(&e))?)?;
        let minus = target.chart_inv(&map(&p.chart(&(-e)))?)?;
        jac.set_column(k, &((plus - minus) / (2.0 * step)));
    }
    Ok(jac)
}

/// Jacobian of `map` at `p` in the frames at `p` and `map(p)`.
pub fn differential<P, Q, F>(map: &F, p: &P, step: f64) -> Result<Matrix4<f64>>
where
    P: LocalChart,
    Q: LocalChart,
    F: Fn(&P) -> Result<Q>,
{
    let q = map(p)?;
    differential_into(map, p, &q, step)
}

/// `|scale·form_src(a, b) - form_tgt(J a, J b)|` for frame-coordinate tangents.
pub fn pullback_residual_from(jac: &Matrix4<f64>, w_src: &Matrix4<f64>, w_tgt: &Matrix4<f64>, a: &Vector4<f64>, b: &Vector4<f64>, scale: f64) -> f64 {
    let pushed = (jac * a).dot(&(w_tgt * (jac * b)));
    let original = a.dot(&(w_src * b));
    (pushed - scale * original).abs()
}

/// Pullback residual of the symplectic form under `map` on a tangent pair at `p`.
pub fn pullback_residual<P, F>(map: &F, p: &P, a: &Vector4<f64>, b: &Vector4<f64>, step: f64) -> Result<f64>
where
    P: LocalChart,
    F: Fn(&P) -> Result<P>,
{
    let q = map(p)?;
    let jac = differential_into(map, p, &q, step)?;
    Ok(pullback_residual_from(&jac, &p.form_matrix()?, &q.form_matrix()?, a, b, 1.0))
}

/// Same as [`pullback_residual`] but with product tangents on S² × S².
pub fn product_pullback_residual<F>(map: &F, p: &ProductPoint, a: &ProductTangent, b: &ProductTangent, step: f64) -> Result<f64>
where
    F: Fn(&ProductPoint) -> Result<ProductPoint>,
{
    let ca = crate::chart::product_coords(p, a);
    let cb = crate::chart::product_coords(p, b);
    pullback_residual(map, p, &ca, &cb, step)
}

/// Symplecticity report with a caller-supplied point sampler.
pub fn symplectic_report_with<P, F, S>(name: &str, map: &F, sampler: S, n_samples: u64, seed: u64, step: f64, tol: f64) -> Result<VerificationReport>
where
    P: LocalChart,
    F: Fn(&P) -> Result<P>,
    S: Fn(&mut ChaCha8Rng) -> P,
{
    if n_samples == 0 {
        return Err(Error::OutOfRange {
            name: "n_samples",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let mut residuals = Vec::with_capacity(n_samples as usize);
    for i in 0..n_samples {
        let mut rng = sample_rng(seed, i);
        let p = sampler(&mut rng);
        let a = unit_vector4(&mut rng);
        let b = unit_vector4(&mut rng);
        residuals.push(pullback_residual(map, &p, &a, &b, step)?);
    }
    Ok(VerificationReport::from_residuals(name, residuals, seed, Some(step), tol))
}

/// Symplecticity of a self-map of S² × S² over uniform random points and unit tangent pairs.
pub fn symplectic_report<F>(name: &str, map: &F, n_samples: u64, seed: u64, step: f64, tol: f64) -> Result<VerificationReport>
where
    F: Fn(&ProductPoint) -> Result<ProductPoint>,
{
    symplectic_report_with(name, map, product_point, n_samples, seed, step, tol)
}

/// How the Hamiltonian vector field is contracted into the form.
///
/// With `σ_x(u, v) = ⟨x, u × v⟩` and `ρ` turning by the right-hand rule,
/// `ω(·, X) = d(-|x + y|)`, so [`MomentConvention::SlotTwo`] is the one under
/// which `μ = -|x + y|` is the moment map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentConvention {
    /// `dμ = ω(·, X)`.
    SlotTwo,
    /// `dμ = ω(X, ·)`.
    SlotOne,
}

/// Generator of the circle action at `p`, by central differences in `t`.
pub fn circle_generator(p: &ProductPoint, step: f64) -> Result<ProductTangent> {
    check_step(step)?;
    let plus = rho(step, p)?;
    let minus = rho(-step, p)?;
    let dx = (plus.x.coords() - minus.x.coords()) / (2.0 * step);
    let dy = (plus.y.coords() - minus.y.coords()) / (2.0 * step);
    Ok(ProductTangent::new(TangentVector::project(p.x, dx), TangentVector::project(p.y, dy)))
}

/// `max_v |ω-contraction of X with v - dμ(v)|` over the frame vectors at `p`.
pub fn hamiltonian_residual_with(p: &ProductPoint, step: f64, convention: MomentConvention) -> Result<f64> {
    let x_field = circle_generator(p, step)?;
    let mut worst = 0.0f64;
    for k in 0..4 {
        let e = Vector4::ith(k, 1.0);
        let v = product_tangent(p, &e);
        let contraction = match convention {
            MomentConvention::SlotTwo => omega(p, &v, &x_field)?,
            MomentConvention::SlotOne => omega(p, &x_field, &v)?,
        };
        let dmu = (mu(&p.chart(&(e * step))) - mu(&p.chart(&(-e * step)))) / (2.0 * step);
        worst = worst.max((contraction - dmu).abs());
    }
    Ok(worst)
}

pub fn hamiltonian_residual(p: &ProductPoint, step: f64) -> Result<f64> {
    hamiltonian_residual_with(p, step, MomentConvention::SlotTwo)
}

/// Action of the differential of `map` on the normal space of the diagonal at
/// `(x, x)`, in the basis `(e₁, -e₁)/√2, (e₂, -e₂)/√2` of the Euclidean
/// complement of `TΔ`.
pub fn normal_action<F>(map: &F, x: &SpherePoint, step: f64) -> Result<LinearMap2x2>
where
    F: Fn(&ProductPoint) -> Result<ProductPoint>,
{
    let p = ProductPoint::new(*x, *x);
    let image = map(&p)?;
    let drift = image.distance(&p);
    if !(drift <= FIXED_POINT_TOL) {
        return Err(Error::Precondition(format!(
            "map moves the diagonal point by {drift:e}"
        )));
    }
    let jac = differential_into(map, &p, &p, step)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let n1 = Vector4::new(s, 0.0, -s, 0.0);
    let n2 = Vector4::new(0.0, s, 0.0, -s);
    let normals = [n1, n2];
    let mut m = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = normals[i].dot(&(jac * normals[j]));
        }
    }
    let frame = tangent_frame(x);
    LinearMap2x2::new(m, frame, frame)
}
