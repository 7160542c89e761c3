//! Identification of the open unit-disc bundle of T*S² with S² × S² minus
//! the diagonal.
//!
//! T*S² is modelled as `{(u, p) : |u| = 1, ⟨u, p⟩ = 0}` with tangents
//! `(δu, δp)` satisfying `⟨u, δu⟩ = 0` and `⟨u, δp⟩ + ⟨δu, p⟩ = 0`. The
//! canonical form is `η = dλ` for `λ = ⟨p, δu⟩`, i.e.
//! `η(a, b) = ⟨a.δp, b.δu⟩ - ⟨b.δp, a.δu⟩`.
//!
//! The identification is the SO(3)-equivariant map
//!
//! ```text
//! phi(x, y) = (b, f(s) · b × (x + y)),   b = (x - y)/|x - y|,  s = |x + y|
//! ```
//!
//! so `|p| = s f(s)`, the antidiagonal lands on the zero section, and the
//! diagonal is pushed to the boundary `|p| = 1`. On the symmetry slice
//! `x = (a, 0, s/2)`, `y = (-a, 0, s/2)` the condition `phi*η = c ω` reduces to
//!
//! ```text
//! d(s f)/ds = c · ω(X₃, ∂_s)        (rotation about e₃ against the slice velocity)
//!     s f   = c · ω(X₁, X₂)         (rotations about e₁ and e₂)
//! ```
//!
//! The first is integrated numerically with `s f(s) → 1` as `s → 2`; the
//! second is the consistency residual reported by [`solve_profile_f`].

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix4, Vector4};

use crate::chart::{retract_coords, LocalChart};
use crate::error::{Error, Result};
use crate::geom::{omega, retract, tangent_frame, ProductPoint, ProductTangent, SpherePoint, TangentVector, Vec3};
use crate::interp::MonotoneCubic;
use crate::maps::tau;
use crate::quadrature::gauss_legendre_on;
use crate::sampling::{product_point, sample_rng, unit_vector4};
use crate::verify::{differential_into, pullback_residual_from};

/// Grid size of the profile table.
pub const GRID_POINTS: usize = 4096;

/// Upper end of the profile variable `s = |x + y|`.
pub const S_MAX: f64 = 2.0;

/// Bound on the slice consistency residual accepted by [`solve_profile_f`].
pub const PROFILE_RESIDUAL_TOL: f64 = 1e-10;

const TANGENCY_TOL: f64 = 1e-10;

/// A point of the open unit-disc bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentPoint {
    pub base: SpherePoint,
    pub covector: Vec3,
}

impl CotangentPoint {
    pub fn new(base: SpherePoint, covector: Vec3) -> Result<Self> {
        let residual = covector.dot(base.coords()).abs();
        if residual > TANGENCY_TOL {
            return Err(Error::NotTangent { residual });
        }
        let norm = covector.norm();
        if !(norm < 1.0) {
            return Err(Error::OutsideDisc { norm });
        }
        Ok(CotangentPoint { base, covector })
    }

    pub fn zero_section(base: SpherePoint) -> Self {
        CotangentPoint {
            base,
            covector: Vec3::zeros(),
        }
    }

    pub fn distance(&self, other: &CotangentPoint) -> f64 {
        self.base
            .distance(&other.base)
            .max((self.covector - other.covector).norm())
    }
}

/// Tangent vector `(δu, δp)` to T*S².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentTangent {
    pub du: Vec3,
    pub dp: Vec3,
}

impl CotangentTangent {
    pub fn new(du: Vec3, dp: Vec3) -> Self {
        CotangentTangent { du, dp }
    }

    fn tangency_residual(&self, q: &CotangentPoint) -> f64 {
        let u = q.base.coords();
        let r1 = u.dot(&self.du).abs();
        let r2 = (u.dot(&self.dp) + self.du.dot(&q.covector)).abs();
        r1.max(r2)
    }
}

fn eta_raw(a: &CotangentTangent, b: &CotangentTangent) -> f64 {
    a.dp.dot(&b.du) - b.dp.dot(&a.du)
}

/// Canonical symplectic form `η = dλ` at `q`.
pub fn eta(q: &CotangentPoint, a: &CotangentTangent, b: &CotangentTangent) -> Result<f64> {
    let scale = 1.0 + a.du.norm() + a.dp.norm() + b.du.norm() + b.dp.norm();
    let residual = a.tangency_residual(q).max(b.tangency_residual(q));
    if residual > TANGENCY_TOL * scale {
        return Err(Error::NotTangent { residual });
    }
    Ok(eta_raw(a, b))
}

/// Chart basis `∂ᵢ` at `q`: base directions `(e, -⟨p, e⟩u)` then fibre directions `(0, e)`.
pub fn cotangent_basis(q: &CotangentPoint) -> [CotangentTangent; 4] {
    let f = tangent_frame(&q.base);
    let u = q.base.coords();
    let (e1, e2) = (f.e1.vec, f.e2.vec);
    [
        CotangentTangent::new(e1, -u * q.covector.dot(&e1)),
        CotangentTangent::new(e2, -u * q.covector.dot(&e2)),
        CotangentTangent::new(Vec3::zeros(), e1),
        CotangentTangent::new(Vec3::zeros(), e2),
    ]
}

// The chart does not enforce |p| < 1; probes may step slightly outside and
// the maps evaluated on them report it.
impl LocalChart for CotangentPoint {
    fn chart(&self, xi: &Vector4<f64>) -> Self {
        let f = tangent_frame(&self.base);
        let base = retract(&self.base, &f.combine(xi[0], xi[1]));
        let v = self.covector + f.combine(xi[2], xi[3]);
        let u = base.coords();
        CotangentPoint {
            base,
            covector: v - u * u.dot(&v),
        }
    }

    fn chart_inv(&self, q: &Self) -> Result<Vector4<f64>> {
        let f = tangent_frame(&self.base);
        let (a, b) = retract_coords(&self.base, &q.base)?;
        let u0 = self.base.coords();
        let u1 = q.base.coords();
        let d = u1.dot(u0);
        // Lift the covector back into u0^⊥ along u1.
        let v = q.covector - u1 * (q.covector.dot(u0) / d);
        let (c, e) = f.coords_of(&(v - self.covector));
        Ok(Vector4::new(a, b, c, e))
    }

    fn form_matrix(&self) -> Result<Matrix4<f64>> {
        let basis = cotangent_basis(self);
        let mut w = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                w[(i, j)] = eta(self, &basis[i], &basis[j])?;
            }
        }
        Ok(w)
    }
}

/// Exterior-derivative residual of `η` in the chart at `q`.
///
/// The components `η_ij(ξ) = η(∂ᵢP, ∂ⱼP)` are built from central differences
/// of the chart map `P` (step `inner`), and `dη_ijk = ∂ᵢη_jk - ∂ⱼη_ik + ∂ₖη_ij`
/// from central differences of those (step `outer`). Returns the largest
/// `|dη_ijk|` over the four index triples.
pub fn eta_closedness_residual(q: &CotangentPoint, inner: f64, outer: f64) -> f64 {
    let partials = |xi: &Vector4<f64>| -> [CotangentTangent; 4] {
        std::array::from_fn(|i| {
            let e = Vector4::ith(i, inner);
            let plus = q.chart(&(xi + e));
            let minus = q.chart(&(xi - e));
            CotangentTangent::new(
                (plus.base.coords() - minus.base.coords()) / (2.0 * inner),
                (plus.covector - minus.covector) / (2.0 * inner),
            )
        })
    };
    let component = |xi: &Vector4<f64>, i: usize, j: usize| {
        let d = partials(xi);
        eta_raw(&d[i], &d[j])
    };
    let derivative = |k: usize, i: usize, j: usize| {
        let e = Vector4::ith(k, outer);
        (component(&e, i, j) - component(&(-e), i, j)) / (2.0 * outer)
    };
    let mut worst = 0.0f64;
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        let d = derivative(i, j, k) - derivative(j, i, k) + derivative(k, i, j);
        worst = worst.max(d.abs());
    }
    worst
}

/// Tabulated profile `f(s)` on `[0, 2)` with the scale constant `c` of
/// `phi*η = c ω` produced by the integration.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactifyProfile {
    table: MonotoneCubic,
    scale: f64,
}

fn slice_point(s: f64) -> ProductPoint {
    let a = (1.0 - 0.25 * s * s).sqrt();
    ProductPoint::new(
        SpherePoint::new(Vec3::new(a, 0.0, 0.5 * s)).expect("unit vector"),
        SpherePoint::new(Vec3::new(-a, 0.0, 0.5 * s)).expect("unit vector"),
    )
}

fn rotation_generator(p: &ProductPoint, axis: &Vec3) -> ProductTangent {
    ProductTangent::new(
        TangentVector::project(p.x, axis.cross(p.x.coords())),
        TangentVector::project(p.y, axis.cross(p.y.coords())),
    )
}

/// `ω(X₃, ∂_s)` on the slice: right-hand side of the profile ODE.
fn radial_pairing(s: f64) -> Result<f64> {
    let p = slice_point(s);
    let a = (1.0 - 0.25 * s * s).sqrt();
    let dx = Vec3::new(-0.25 * s / a, 0.0, 0.5);
    let dy = Vec3::new(0.25 * s / a, 0.0, 0.5);
    let velocity = ProductTangent::new(TangentVector::project(p.x, dx), TangentVector::project(p.y, dy));
    omega(&p, &rotation_generator(&p, &Vec3::z()), &velocity)
}

/// `ω(X₁, X₂)` on the slice: the algebraic constraint `s f = c ω(X₁, X₂)`.
fn orbit_pairing(s: f64) -> Result<f64> {
    let p = slice_point(s);
    omega(
        &p,
        &rotation_generator(&p, &Vec3::x()),
        &rotation_generator(&p, &Vec3::y()),
    )
}

/// Integrates the reduced profile equation on the [`GRID_POINTS`] grid
/// `s_k = 2k / GRID_POINTS`, normalising so that `s f(s) → 1` at `s = 2`.
pub fn solve_profile_f() -> Result<CompactifyProfile> {
    solve_profile_on(GRID_POINTS)
}

pub fn solve_profile_on(grid_points: usize) -> Result<CompactifyProfile> {
    if grid_points < 4 {
        return Err(Error::Profile(format!("grid of {grid_points} points is too coarse")));
    }
    let h = S_MAX / grid_points as f64;
    let grid: Vec<f64> = (0..grid_points).map(|k| k as f64 * h).collect();

    let cell = |a: f64, b: f64| -> Result<f64> {
        let (nodes, weights) = gauss_legendre_on(4, a, b);
        let mut acc = 0.0;
        for (s, w) in nodes.iter().zip(&weights) {
            acc += w * radial_pairing(*s)?;
        }
        Ok(acc)
    };

    // Unnormalised antiderivative G(s_k) = ∫₀^{s_k} ω(X₃, ∂_s) ds.
    let mut g = vec![0.0; grid_points];
    for k in 1..grid_points {
        g[k] = g[k - 1] + cell(grid[k - 1], grid[k])?;
    }
    let total = g[grid_points - 1] + cell(grid[grid_points - 1], S_MAX)?;
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Profile(format!("radial integral {total} is not positive")));
    }
    let c = 1.0 / total;

    let mut f = Vec::with_capacity(grid_points);
    f.push(c * radial_pairing(0.0)?);
    for k in 1..grid_points {
        f.push(c * g[k] / grid[k]);
    }

    let mut worst = 0.0f64;
    for k in 0..grid_points {
        let lhs = grid[k] * f[k];
        let rhs = c * orbit_pairing(grid[k])?;
        worst = worst.max((lhs - rhs).abs());
    }
    if !(worst <= PROFILE_RESIDUAL_TOL) {
        return Err(Error::Profile(format!(
            "slice consistency residual {worst:e} exceeds {PROFILE_RESIDUAL_TOL:e}"
        )));
    }
    if let Some(k) = (0..grid_points).find(|&k| !(f[k] > 0.0)) {
        return Err(Error::Profile(format!("profile not positive at s = {}", grid[k])));
    }
    if let Some(k) = (1..grid_points).find(|&k| !(grid[k] * f[k] > grid[k - 1] * f[k - 1])) {
        return Err(Error::Profile(format!("s f(s) not increasing at s = {}", grid[k])));
    }

    Ok(CompactifyProfile {
        table: MonotoneCubic::new(grid, f)?,
        scale: c,
    })
}

impl CompactifyProfile {
    /// The constant `c` in `phi*η = c ω` implied by the integration.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn grid(&self) -> &[f64] {
        self.table.nodes()
    }

    pub fn values(&self) -> &[f64] {
        self.table.values()
    }

    pub fn f(&self, s: f64) -> f64 {
        self.table.eval(s)
    }

    pub fn f_prime(&self, s: f64) -> f64 {
        self.table.derivative(s)
    }

    /// `|p|` as a function of `s = |x + y|`.
    pub fn covector_norm(&self, s: f64) -> f64 {
        s * self.f(s)
    }

    /// Inverse of [`Self::covector_norm`] on `[0, 2]` by bisection.
    pub fn s_for_norm(&self, norm: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&norm) {
            return Err(Error::OutsideDisc { norm });
        }
        let (mut lo, mut hi) = (0.0f64, S_MAX);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.covector_norm(mid) < norm {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (nlo, nhi) = (self.covector_norm(lo), self.covector_norm(hi));
        Ok(if (norm - nlo).abs() <= (nhi - norm).abs() { lo } else { hi })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# dehnlab compactification profile f(s), |p| = s f(s)");
        let _ = writeln!(out, "# grid_points={}", self.grid().len());
        let _ = writeln!(out, "# s_max={S_MAX:?}");
        let _ = writeln!(out, "# interpolation=monotone-cubic");
        let _ = writeln!(out, "# scale_c={:?}", self.scale);
        let _ = writeln!(out, "s,f");
        for (s, f) in self.grid().iter().zip(self.values()) {
            let _ = writeln!(out, "{s:?},{f:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut scale = None;
        let mut grid = Vec::new();
        let mut values = Vec::new();
        let mut seen_header = false;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("scale_c=") {
                    scale = Some(v.parse::<f64>().map_err(|e| Error::Parse {
                        line: line_no,
                        message: e.to_string(),
                    })?);
                }
                continue;
            }
            if !seen_header {
                if line != "s,f" {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected header `s,f`, found `{line}`"),
                    });
                }
                seen_header = true;
                continue;
            }
            let mut cols = line.split(',');
            let mut next = |what: &str| -> Result<f64> {
                cols.next()
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: format!("missing {what} column"),
                    })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse {
                        line: line_no,
                        message: e.to_string(),
                    })
            };
            grid.push(next("s")?);
            values.push(next("f")?);
        }
        let scale = scale.ok_or(Error::Parse {
            line: 0,
            message: "missing `# scale_c=` header".into(),
        })?;
        Ok(CompactifyProfile {
            table: MonotoneCubic::new(grid, values)?,
            scale,
        })
    }

    pub fn export(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn import(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// The identification `S² × S² ∖ Δ → int(T)`.
pub fn phi(profile: &CompactifyProfile, p: &ProductPoint) -> Result<CotangentPoint> {
    let d = p.x.coords() - p.y.coords();
    let dn = d.norm();
    if !(dn > 0.0) {
        return Err(Error::OnDiagonal);
    }
    let b = d / dn;
    let m = p.axis();
    let s = m.norm();
    let covector = b.cross(&m) * profile.f(s);
    let norm = covector.norm();
    if !(norm < 1.0) {
        // Only reachable when x and y agree to ~1e-8.
        return Err(Error::OnDiagonal);
    }
    Ok(CotangentPoint {
        base: SpherePoint::new(b)?,
        covector,
    })
}

pub fn phi_inv(profile: &CompactifyProfile, q: &CotangentPoint) -> Result<ProductPoint> {
    let r = q.covector.norm();
    let s = profile.s_for_norm(r)?;
    let b = q.base.coords();
    let m = q.covector.cross(b) / profile.f(s);
    let w = ((S_MAX - s) * (S_MAX + s)).max(0.0).sqrt();
    Ok(ProductPoint::new(
        SpherePoint::new((m + b * w) * 0.5)?,
        SpherePoint::new((m - b * w) * 0.5)?,
    ))
}

/// The Dehn twist transported to the disc bundle: `phi ∘ τ ∘ phi⁻¹`.
pub fn conjugated_twist(profile: &CompactifyProfile, q: &CotangentPoint) -> Result<CotangentPoint> {
    phi(profile, &tau(&phi_inv(profile, q)?))
}

/// Result of fitting `phi*η ≈ c ω` over random samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackFit {
    pub scale: f64,
    pub max_relative: f64,
    pub mean_relative: f64,
    pub samples: u64,
}

/// Least-squares fit of `c` in `η(Dphi a, Dphi b) = c ω(a, b)` over uniform
/// random points and unit frame tangents, then the relative residual
/// `|η(Dphi a, Dphi b) - c ω(a, b)| / (1 + |ω(a, b)|)` at the fitted `c`.
///
/// The finite-difference step is scaled by `min(1, |x - y|)`, the size of the
/// neighbourhood on which `phi` is well resolved near the deleted diagonal.
pub fn fit_pullback_scale(profile: &CompactifyProfile, n_samples: u64, seed: u64, step: f64) -> Result<PullbackFit> {
    if n_samples == 0 {
        return Err(Error::OutOfRange {
            name: "n_samples",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let map = |p: &ProductPoint| phi(profile, p);
    let mut pairs = Vec::with_capacity(n_samples as usize);
    for i in 0..n_samples {
        let mut rng = sample_rng(seed, i);
        let p = product_point(&mut rng);
        let a = unit_vector4(&mut rng);
        let b = unit_vector4(&mut rng);
        let local = step * p.x.distance(&p.y).min(1.0);
        let q = map(&p)?;
        let jac = differential_into(&map, &p, &q, local)?;
        let pushed = (jac * a).dot(&(q.form_matrix()? * (jac * b)));
        let original = a.dot(&(p.form_matrix()? * b));
        pairs.push((pushed, original));
    }
    let num: f64 = pairs.iter().map(|(e, w)| e * w).sum();
    let den: f64 = pairs.iter().map(|(_, w)| w * w).sum();
    let scale = num / den;
    let rel: Vec<f64> = pairs
        .iter()
        .map(|(e, w)| (e - scale * w).abs() / (1.0 + w.abs()))
        .collect();
    Ok(PullbackFit {
        scale,
        max_relative: rel.iter().cloned().fold(0.0, f64::max),
        mean_relative: rel.iter().sum::<f64>() / rel.len() as f64,
        samples: n_samples,
    })
}

/// `|η(DΨ a, DΨ b) - η(a, b)|` for a self-map `Ψ` of the disc bundle.
pub fn eta_pullback_residual<F>(map: &F, q: &CotangentPoint, a: &Vector4<f64>, b: &Vector4<f64>, step: f64) -> Result<f64>
where
    F: Fn(&CotangentPoint) -> Result<CotangentPoint>,
{
    let image = map(q)?;
    let jac = differential_into(map, q, &image, step)?;
    Ok(pullback_residual_from(&jac, &q.form_matrix()?, &image.form_matrix()?, a, b, 1.0))
}
