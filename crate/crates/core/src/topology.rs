//! Integer invariants behind the π₀ and π₁ statements: mapping degrees of
//! sphere maps, the induced action on H₂(S² × S²) in the basis
//! `A₁ = [S² × pt]`, `A₂ = [pt × S²]`, and winding numbers of loops of 2×2
//! matrices with positive determinant.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Matrix2, Vector3};

use crate::error::{Error, Result};
use crate::geom::{retract, rotate, ProductPoint, SpherePoint, Vec3};
use crate::quadrature::gauss_legendre_on;
use crate::verify::{normal_action, polar_angle};

/// Default quadrature resolution per direction.
pub const DEFAULT_NODES: usize = 256;

/// Pre-rounding distance to an integer above which a degree is rejected.
pub const DEGREE_ROUNDING_TOL: f64 = 0.05;

/// Largest endpoint mismatch accepted by [`MatrixLoop`].
pub const LOOP_CLOSURE_TOL: f64 = 1e-6;

const DEGREE_STEP: f64 = 1e-5;

/// One `(index, value)` row of a debugging trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub index: usize,
    pub value: f64,
}

/// Renders trace rows as CSV with the given value column name.
pub fn trace_csv(column: &str, rows: &[TraceRow]) -> String {
    let mut out = format!("index,{column}\n");
    for r in rows {
        let _ = writeln!(out, "{},{:?}", r.index, r.value);
    }
    out
}

/// A rounded degree with its quadrature value.
#[derive(Debug, Clone, PartialEq)]
pub struct Degree {
    pub degree: i64,
    pub value: f64,
    /// Cumulative integral after each polar-angle row, normalised by 4π.
    pub trace: Vec<TraceRow>,
}

impl Degree {
    pub fn rounding_error(&self) -> f64 {
        (self.value - self.degree as f64).abs()
    }
}

fn sphere_param(theta: f64, phi: f64) -> (Vec3, Vec3, Vec3) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let w = Vec3::new(st * cp, st * sp, ct);
    let e_theta = Vec3::new(ct * cp, ct * sp, -st);
    let e_phi = Vec3::new(-sp, cp, 0.0);
    (w, e_theta, e_phi)
}

fn directional<G>(g: &G, w: &SpherePoint, v: &Vec3, h: f64) -> Result<Vec3>
where
    G: Fn(&SpherePoint) -> Result<SpherePoint>,
{
    let plus = g(&retract(w, &(v * h)))?;
    let minus = g(&retract(w, &(v * -h)))?;
    Ok((plus.coords() - minus.coords()) / (2.0 * h))
}

/// Quadrature value of `(1/4π) ∫ g*σ` before rounding.
///
/// Gauss–Legendre in the polar angle and the trapezoid rule in the azimuth,
/// `nodes` points each; the pullback density comes from central differences
/// along the orthonormal polar frame.
pub fn degree_integral<G>(g: &G, nodes: usize) -> Result<(f64, Vec<TraceRow>)>
where
    G: Fn(&SpherePoint) -> Result<SpherePoint>,
{
    if nodes < 2 {
        return Err(Error::OutOfRange {
            name: "nodes",
            value: nodes as f64,
            range: "[2, ∞)",
        });
    }
    let (thetas, weights) = gauss_legendre_on(nodes, 0.0, PI);
    let dphi = 2.0 * PI / nodes as f64;
    let mut total = 0.0;
    let mut trace = Vec::with_capacity(nodes);
    for (i, (&theta, &wt)) in thetas.iter().zip(&weights).enumerate() {
        let mut row = 0.0;
        for k in 0..nodes {
            let (w, e_theta, e_phi) = sphere_param(theta, k as f64 * dphi);
            let w = SpherePoint::new(w)?;
            let gw = g(&w)?;
            let a = directional(g, &w, &e_theta, DEGREE_STEP)?;
            let b = directional(g, &w, &e_phi, DEGREE_STEP)?;
            row += gw.coords().dot(&a.cross(&b));
        }
        total += wt * theta.sin() * row * dphi;
        trace.push(TraceRow {
            index: i,
            value: total / (4.0 * PI),
        });
    }
    Ok((total / (4.0 * PI), trace))
}

/// Degree of `g: S² → S²`.
pub fn mapping_degree<G>(g: &G, nodes: usize) -> Result<Degree>
where
    G: Fn(&SpherePoint) -> Result<SpherePoint>,
{
    let (value, trace) = degree_integral(g, nodes)?;
    let rounded = value.round();
    if !((value - rounded).abs() < DEGREE_ROUNDING_TOL) {
        return Err(Error::Resolution {
            value,
            tol: DEGREE_ROUNDING_TOL,
        });
    }
    Ok(Degree {
        degree: rounded as i64,
        value,
        trace,
    })
}

/// Basepoints of the slice inclusions `w ↦ (w, y₀)` and `w ↦ (x₀, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basepoints {
    pub x0: SpherePoint,
    pub y0: SpherePoint,
}

impl Basepoints {
    pub fn standard() -> Self {
        Basepoints {
            x0: SpherePoint::from_xyz(1.0, 0.0, 0.0).expect("unit vector"),
            y0: SpherePoint::north(),
        }
    }

    /// The standard pair moved by the rotation of angle 0.7 about `(1, 2, 3)`.
    pub fn rotated() -> Self {
        let axis = Vector3::new(1.0, 2.0, 3.0);
        let turn = |p: SpherePoint| {
            let v = rotate(&axis, 0.7, p.coords()).expect("nonzero axis");
            SpherePoint::new(v).expect("unit vector")
        };
        let s = Basepoints::standard();
        Basepoints {
            x0: turn(s.x0),
            y0: turn(s.y0),
        }
    }

    pub fn defaults() -> [Basepoints; 2] {
        [Basepoints::standard(), Basepoints::rotated()]
    }
}

/// Action on H₂(S² × S²); column `j` is the image of `A_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomologyMatrix {
    pub entries: [[i64; 2]; 2],
    /// Quadrature values behind `entries`.
    pub values: [[f64; 2]; 2],
    pub max_rounding_error: f64,
}

impl HomologyMatrix {
    pub fn identity() -> [[i64; 2]; 2] {
        [[1, 0], [0, 1]]
    }

    pub fn product(a: &[[i64; 2]; 2], b: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
        let mut m = [[0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        m
    }

    /// Largest rounding error across all basepoint sets and entries.
    fn merge(&mut self, other: &HomologyMatrix) {
        self.max_rounding_error = self.max_rounding_error.max(other.max_rounding_error);
    }
}

/// Degrees of `π_i ∘ f ∘ slice_j`, indexed `[i][j]`.
pub fn slice_degrees<F>(f: &F, bp: &Basepoints, nodes: usize) -> Result<[[Degree; 2]; 2]>
where
    F: Fn(&ProductPoint) -> Result<ProductPoint>,
{
    let degree = |i: usize, j: usize| {
        let g = |w: &SpherePoint| -> Result<SpherePoint> {
            let p = if j == 0 {
                ProductPoint::new(*w, bp.y0)
            } else {
                ProductPoint::new(bp.x0, *w)
            };
            let q = f(&p)?;
            Ok(if i == 0 { q.x } else { q.y })
        };
        mapping_degree(&g, nodes)
    };
    Ok([[degree(0, 0)?, degree(0, 1)?], [degree(1, 0)?, degree(1, 1)?]])
}

fn homology_at<F>(f: &F, bp: &Basepoints, nodes: usize) -> Result<HomologyMatrix>
where
    F: Fn(&ProductPoint) -> Result<ProductPoint>,
{
    let d = slice_degrees(f, bp, nodes)?;
    let mut entries = [[0i64; 2]; 2];
    let mut values = [[0.0; 2]; 2];
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            entries[i][j] = d[i][j].degree;
            values[i][j] = d[i][j].value;
            worst = worst.max(d[i][j].rounding_error());
        }
    }
    Ok(HomologyMatrix {
        entries,
        values,
        max_rounding_error: worst,
    })
}

/// Homology action of `f`, computed at every basepoint set; all sets must agree.
/// The returned values are those of the first set.
pub fn homology_matrix<F>(f: &F, basepoints: &[Basepoints], nodes: usize) -> Result<HomologyMatrix>
where
    F: Fn(&ProductPoint) -> Result<ProductPoint>,
{
    let (first, rest) = basepoints
        .split_first()
        .ok_or_else(|| Error::Precondition("at least one basepoint set is required".into()))?;
    let mut result = homology_at(f, first, nodes)?;
    for bp in rest {
        let other = homology_at(f, bp, nodes)?;
        if other.entries != result.entries {
            return Err(Error::BasepointDisagreement {
                first: result.entries,
                second: other.entries,
            });
        }
        result.merge(&other);
    }
    Ok(result)
}

/// Sampled closed loop `t_k = k/N ↦ M_k`, `k = 0..=N`, of matrices with
/// positive determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixLoop {
    samples: Vec<Matrix2<f64>>,
}

impl MatrixLoop {
    pub fn new(samples: Vec<Matrix2<f64>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidLoop("a loop needs at least two samples".into()));
        }
        for (k, m) in samples.iter().enumerate() {
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidLoop(format!("non-finite entry at sample {k}")));
            }
            let det = m.determinant();
            if !(det > 0.0) {
                return Err(Error::InvalidLoop(format!("determinant {det:e} at sample {k}")));
            }
        }
        let gap = (samples[0] - samples[samples.len() - 1]).amax();
        if !(gap <= LOOP_CLOSURE_TOL) {
            return Err(Error::InvalidLoop(format!("endpoints differ by {gap:e}")));
        }
        Ok(MatrixLoop { samples })
    }

    /// Samples `family` at `t = k/n` for `k = 0..=n`.
    pub fn from_fn<M>(n: usize, family: M) -> Result<Self>
    where
        M: Fn(f64) -> Result<Matrix2<f64>>,
    {
        if n == 0 {
            return Err(Error::InvalidLoop("a loop needs at least one interval".into()));
        }
        let samples = (0..=n)
            .map(|k| family(k as f64 / n as f64))
            .collect::<Result<Vec<_>>>()?;
        MatrixLoop::new(samples)
    }

    pub fn samples(&self) -> &[Matrix2<f64>] {
        &self.samples
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        MatrixLoop { samples }
    }
}

/// A winding number with the unwrapped polar angles it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Winding {
    pub winding: i64,
    pub total_angle: f64,
    pub trace: Vec<TraceRow>,
}

/// Net turns of the rotation factor of the polar decomposition along the loop.
pub fn winding_number(lp: &MatrixLoop) -> Result<Winding> {
    let mut prev = polar_angle(&lp.samples[0])?;
    let mut unwrapped = prev;
    let mut trace = vec![TraceRow {
        index: 0,
        value: unwrapped,
    }];
    for (k, m) in lp.samples.iter().enumerate().skip(1) {
        let a = polar_angle(m)?;
        let mut d = a - prev;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        if !(d.abs() < PI / 2.0) {
            return Err(Error::Undersampled { index: k, jump: d.abs() });
        }
        unwrapped += d;
        prev = a;
        trace.push(TraceRow {
            index: k,
            value: unwrapped,
        });
    }
    let total_angle = unwrapped - trace[0].value;
    Ok(Winding {
        winding: (total_angle / (2.0 * PI)).round() as i64,
        total_angle,
        trace,
    })
}

/// Winding of `s ↦ normal_action(family(s, ·), x)` over `n` intervals.
pub fn normal_loop_winding<F>(family: &F, x: &SpherePoint, n: usize, step: f64) -> Result<Winding>
where
    F: Fn(f64, &ProductPoint) -> Result<ProductPoint>,
{
    let lp = MatrixLoop::from_fn(n, |s| {
        let map = |p: &ProductPoint| family(s, p);
        Ok(normal_action(&map, x, step)?.matrix)
    })?;
    winding_number(&lp)
}
