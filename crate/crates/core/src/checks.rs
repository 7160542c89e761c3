//! The verification suite: configuration, the static check registry, and
//! the combined report.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::Matrix2;
use rand::Rng;
use serde::Serialize;

use crate::compactify::{
    conjugated_twist, eta_pullback_residual, fit_pullback_scale, phi, phi_inv, solve_profile_f, CompactifyProfile,
    CotangentPoint,
};
use crate::error::{Error, Result};
use crate::geom::{ProductPoint, SpherePoint};
use crate::maps::{homotopy_h, loop_lambda, profile_r, rho, swap_iota, tau, tau_inv, SWAP_RADIUS};
use crate::sampling::{point_at_axis_norm, product_point, sample_rng, sphere_point, tangent_in_disc, unit_tangent, unit_vector4};
use crate::topology::{homology_matrix, normal_loop_winding, Basepoints, HomologyMatrix};
use crate::verify::{hamiltonian_residual, normal_action, symplectic_report, VerificationReport};

pub const DEFAULT_SAMPLES: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1729;
pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_QUAD_NODES: usize = 256;

/// Report schema version written at the top level of JSON output.
pub const SCHEMA_VERSION: u32 = 1;

/// Points sampled along the diagonal for normal-bundle checks.
const DIAGONAL_POINTS: u64 = 20;
/// Diagonal points for the `τ ∈ SS₂` check.
const FIXED_DIAGONAL_POINTS: u64 = 100;
/// Intervals per normal-action loop.
const LOOP_INTERVALS: usize = 64;
/// Points closer to the antidiagonal than this are excluded from the moment-map check.
const MOMENT_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Precondition(format!("unknown format `{other}`, expected json or csv"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub samples: u64,
    pub seed: u64,
    pub fd_step: f64,
    pub tol: f64,
    pub quad_nodes: usize,
    pub output: Option<std::path::PathBuf>,
    pub format: OutputFormat,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            fd_step: DEFAULT_FD_STEP,
            tol: DEFAULT_TOL,
            quad_nodes: DEFAULT_QUAD_NODES,
            output: None,
            format: OutputFormat::Json,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::OutOfRange {
                name: "samples",
                value: self.samples as f64,
                range: "[1, ∞)",
            });
        }
        if !(self.fd_step > 0.0 && self.fd_step <= 1e-2) {
            return Err(Error::OutOfRange {
                name: "fd_step",
                value: self.fd_step,
                range: "(0, 1e-2]",
            });
        }
        if !(self.tol > 0.0) {
            return Err(Error::OutOfRange {
                name: "tol",
                value: self.tol,
                range: "(0, ∞)",
            });
        }
        if self.quad_nodes < 32 {
            return Err(Error::OutOfRange {
                name: "quad_nodes",
                value: self.quad_nodes as f64,
                range: "[32, ∞)",
            });
        }
        Ok(())
    }
}

/// State shared between checks of one run.
#[derive(Default)]
pub struct Context {
    profile: OnceLock<CompactifyProfile>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn profile(&self) -> Result<&CompactifyProfile> {
        if let Some(p) = self.profile.get() {
            return Ok(p);
        }
        let built = solve_profile_f()?;
        Ok(self.profile.get_or_init(|| built))
    }
}

type Runner = fn(&SuiteConfig, &Context) -> Result<Vec<VerificationReport>>;

/// A registry entry. `claim` is the statement the check certifies.
pub struct Check {
    pub name: &'static str,
    pub description: &'static str,
    pub claim: &'static str,
    run: Runner,
}

impl Check {
    pub fn run(&self, config: &SuiteConfig, ctx: &Context) -> Result<Vec<VerificationReport>> {
        (self.run)(config, ctx)
    }
}

static REGISTRY: [Check; 14] = [
    Check {
        name: "tau-symplectic",
        description: "max pullback residual of ω under τ over random points and tangent pairs",
        claim: "τ is a symplectomorphism of S² × S²",
        run: run_tau_symplectic,
    },
    Check {
        name: "tau-supports",
        description: "τ is the swap on |x+y| ≤ 1/2 and the identity on |x+y| ≥ 1, bit for bit; branches agree at the seam",
        claim: "the twist profile is -π up to 1/2 and 0 from 1 on",
        run: run_tau_supports,
    },
    Check {
        name: "tau-fixes-diagonal",
        description: "τ fixes (x, x) and acts as the identity on the normal plane of the diagonal",
        claim: "τ fixes the diagonal and acts trivially on its normal bundle",
        run: run_tau_fixes_diagonal,
    },
    Check {
        name: "moment-map",
        description: "contraction of ω with the circle generator against dμ, away from the antidiagonal",
        claim: "μ(x, y) = -|x + y| is a moment map for the circle action about x + y",
        run: run_moment_map,
    },
    Check {
        name: "homotopy-endpoints",
        description: "h₀ = id and h₁ = τ² on random points",
        claim: "τ² is connected to the identity by the path h_s",
        run: run_homotopy_endpoints,
    },
    Check {
        name: "homotopy-symplectic",
        description: "symplectic residual of h_s for s = 0, 0.1, ..., 1",
        claim: "the path h_s stays among symplectomorphisms",
        run: run_homotopy_symplectic,
    },
    Check {
        name: "h-normal-rotation",
        description: "normal action of h_s is the rotation by 2πs; the loop s ↦ h_s winds once",
        claim: "the derivative of h_s along the diagonal rotates the normal bundle by 2πs",
        run: run_h_normal_rotation,
    },
    Check {
        name: "homology-action",
        description: "mapping-degree matrices of id, the swap and τ on H₂",
        claim: "τ acts on H₂(S² × S²) by exchanging A₁ and A₂",
        run: run_homology_action,
    },
    Check {
        name: "lambda-loop",
        description: "λ₀ = λ₁ = id, λ_t fixes the diagonal, its normal loop winds once, λ_{1/4} is not symplectic",
        claim: "λ_t is a loop fixing the diagonal whose normal action generates π₁",
        run: run_lambda_loop,
    },
    Check {
        name: "compactification",
        description: "phi*η = c ω fit, antidiagonal to zero section, round trips of phi",
        claim: "S² × S² minus the diagonal is the open unit-disc bundle of T*S² up to scale",
        run: run_compactification,
    },
    Check {
        name: "conjugated-twist",
        description: "phi τ phi⁻¹ is the identity near the boundary, antipodal on the zero section, and η-symplectic",
        claim: "τ is the model Dehn twist along the zero section",
        run: run_conjugated_twist,
    },
    Check {
        name: "fd-convergence",
        description: "ratio of τ symplectic residuals at fd_step and fd_step/2, target 4",
        claim: "the central-difference stencil is second order",
        run: run_fd_convergence,
    },
    Check {
        name: "homology-composition",
        description: "matrix(f∘g) = matrix(f)·matrix(g) for f, g in {id, swap, τ}",
        claim: "the homology action is multiplicative",
        run: run_homology_composition,
    },
    Check {
        name: "determinism",
        description: "two runs of the sampled checks serialize to identical bytes",
        claim: "reports depend only on the configuration",
        run: run_determinism,
    },
];

pub fn registry() -> &'static [Check] {
    &REGISTRY
}

pub fn find_check(name: &str) -> Option<&'static Check> {
    REGISTRY.iter().find(|c| c.name == name)
}

pub fn check_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|c| c.name).collect()
}

/// Self-maps of S² × S² addressable by name.
pub type NamedMap = fn(&ProductPoint) -> Result<ProductPoint>;

/// One-parameter families addressable by name.
pub type NamedFamily = fn(f64, &ProductPoint) -> Result<ProductPoint>;

fn map_id(p: &ProductPoint) -> Result<ProductPoint> {
    Ok(*p)
}

fn map_swap(p: &ProductPoint) -> Result<ProductPoint> {
    Ok(swap_iota(p))
}

fn map_tau(p: &ProductPoint) -> Result<ProductPoint> {
    Ok(tau(p))
}

fn map_tau_inv(p: &ProductPoint) -> Result<ProductPoint> {
    Ok(tau_inv(p))
}

fn map_tau_squared(p: &ProductPoint) -> Result<ProductPoint> {
    Ok(tau(&tau(p)))
}

fn family_const(_: f64, p: &ProductPoint) -> Result<ProductPoint> {
    Ok(*p)
}

pub const MAP_NAMES: [&str; 5] = ["id", "swap", "tau", "tau-inv", "tau2"];
pub const FAMILY_NAMES: [&str; 3] = ["h", "lambda", "id"];

pub fn named_map(name: &str) -> Option<NamedMap> {
    match name {
        "id" => Some(map_id),
        "swap" => Some(map_swap),
        "tau" => Some(map_tau),
        "tau-inv" => Some(map_tau_inv),
        "tau2" => Some(map_tau_squared),
        _ => None,
    }
}

pub fn named_family(name: &str) -> Option<NamedFamily> {
    match name {
        "h" => Some(homotopy_h),
        "lambda" => Some(loop_lambda),
        "id" => Some(family_const),
        _ => None,
    }
}

/// A single-number check that passes when `observed ≥ threshold`: the
/// recorded residual is the shortfall `max(0, threshold - observed)`.
fn negative_control(name: String, observed: f64, threshold: f64, samples: u64, seed: u64, step: Option<f64>) -> VerificationReport {
    let shortfall = if observed.is_nan() { f64::NAN } else { (threshold - observed).max(0.0) };
    VerificationReport {
        name,
        samples,
        seed,
        step,
        max_residual: shortfall,
        mean_residual: shortfall,
        tol: 0.0,
        pass: shortfall <= 0.0,
    }
}

/// 0 for bit-identical points, otherwise the distance (at least the smallest positive double).
fn exact_gap(a: &ProductPoint, b: &ProductPoint) -> f64 {
    if a == b {
        0.0
    } else {
        a.distance(b).max(f64::MIN_POSITIVE)
    }
}

fn sampled<T>(n: u64, f: impl Fn(u64) -> Result<T>) -> Result<Vec<T>> {
    (0..n).map(f).collect()
}

fn run_tau_symplectic(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    Ok(vec![symplectic_report("tau-symplectic", &map_tau, c.samples, c.seed, c.fd_step, c.tol)?])
}

fn run_tau_supports(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let swap = sampled(c.samples, |i| {
        let mut rng = sample_rng(c.seed, i);
        let s = SWAP_RADIUS * rng.random::<f64>();
        let p = point_at_axis_norm(&mut rng, s);
        Ok((p.axis_norm() <= SWAP_RADIUS).then(|| exact_gap(&tau(&p), &swap_iota(&p))))
    })?;
    let ident = sampled(c.samples, |i| {
        let mut rng = sample_rng(c.seed, i);
        let s = 1.0 + rng.random::<f64>();
        let p = point_at_axis_norm(&mut rng, s);
        Ok((p.axis_norm() >= 1.0).then(|| exact_gap(&tau(&p), &p)))
    })?;
    let seam = sampled(c.samples, |i| {
        let p = point_at_axis_norm(&mut sample_rng(c.seed, i), SWAP_RADIUS);
        let rotated = rho(profile_r(p.axis_norm()), &p)?;
        Ok(rotated.distance(&swap_iota(&p)))
    })?;
    Ok(vec![
        VerificationReport::from_residuals("tau-supports.swap-region", swap.into_iter().flatten(), c.seed, None, 0.0),
        VerificationReport::from_residuals("tau-supports.identity-region", ident.into_iter().flatten(), c.seed, None, 0.0),
        VerificationReport::from_residuals("tau-supports.seam", seam, c.seed, None, 1e-12),
    ])
}

fn diagonal_points(seed: u64, n: u64) -> Vec<SpherePoint> {
    (0..n).map(|i| sphere_point(&mut sample_rng(seed, i))).collect()
}

fn run_tau_fixes_diagonal(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let xs = diagonal_points(c.seed, FIXED_DIAGONAL_POINTS);
    let fixed: Vec<f64> = xs
        .iter()
        .map(|x| {
            let d = ProductPoint::new(*x, *x);
            tau(&d).distance(&d)
        })
        .collect();
    let normal = xs
        .iter()
        .map(|x| Ok((normal_action(&map_tau, x, c.fd_step)?.matrix - Matrix2::identity()).amax()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        VerificationReport::from_residuals("tau-fixes-diagonal.fixed-point", fixed, c.seed, None, 1e-12),
        VerificationReport::from_residuals("tau-fixes-diagonal.normal-action", normal, c.seed, Some(c.fd_step), 1e-6),
    ])
}

fn run_moment_map(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let residuals = sampled(c.samples, |i| {
        let mut rng = sample_rng(c.seed, i);
        let p = loop {
            let p = product_point(&mut rng);
            if p.axis_norm() > MOMENT_FLOOR {
                break p;
            }
        };
        hamiltonian_residual(&p, c.fd_step)
    })?;
    Ok(vec![VerificationReport::from_residuals(
        "moment-map",
        residuals,
        c.seed,
        Some(c.fd_step),
        1e-6,
    )])
}

fn run_homotopy_endpoints(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let pairs = sampled(c.samples, |i| {
        let p = product_point(&mut sample_rng(c.seed, i));
        let start = homotopy_h(0.0, &p)?.distance(&p);
        let end = homotopy_h(1.0, &p)?.distance(&tau(&tau(&p)));
        Ok((start, end))
    })?;
    Ok(vec![
        VerificationReport::from_residuals("homotopy-endpoints.start", pairs.iter().map(|r| r.0), c.seed, None, 1e-12),
        VerificationReport::from_residuals("homotopy-endpoints.end", pairs.iter().map(|r| r.1), c.seed, None, 1e-9),
    ])
}

fn run_homotopy_symplectic(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    (0..=10)
        .map(|k| {
            let s = k as f64 / 10.0;
            let map = |p: &ProductPoint| homotopy_h(s, p);
            symplectic_report(&format!("homotopy-symplectic.s={s:.1}"), &map, c.samples, c.seed, c.fd_step, c.tol)
        })
        .collect()
}

fn run_h_normal_rotation(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let xs = diagonal_points(c.seed, DIAGONAL_POINTS);
    let mut rotation = Vec::new();
    for x in &xs {
        for s in [0.25, 0.5, 0.75] {
            let map = |p: &ProductPoint| homotopy_h(s, p);
            rotation.push(normal_action(&map, x, c.fd_step)?.rotation_error(2.0 * PI * s));
        }
    }
    let winding = xs
        .iter()
        .map(|x| {
            let w = normal_loop_winding(&homotopy_h, x, LOOP_INTERVALS, c.fd_step)?;
            Ok((w.winding - 1).abs() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        VerificationReport::from_residuals("h-normal-rotation.angle", rotation, c.seed, Some(c.fd_step), 1e-5),
        VerificationReport::from_residuals("h-normal-rotation.winding", winding, c.seed, Some(c.fd_step), 0.0),
    ])
}

fn entry_gap(a: &[[i64; 2]; 2], b: &[[i64; 2]; 2]) -> f64 {
    let mut gap = 0;
    for i in 0..2 {
        for j in 0..2 {
            gap = gap.max((a[i][j] - b[i][j]).abs());
        }
    }
    gap as f64
}

fn homology_of(map: NamedMap, c: &SuiteConfig) -> Result<HomologyMatrix> {
    homology_matrix(&map, &Basepoints::defaults(), c.quad_nodes)
}

fn run_homology_action(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let swapped = [[0, 1], [1, 0]];
    let cases: [(&str, NamedMap, [[i64; 2]; 2]); 3] = [
        ("id", map_id, HomologyMatrix::identity()),
        ("swap", map_swap, swapped),
        ("tau", map_tau, swapped),
    ];
    let nodes = (c.quad_nodes * c.quad_nodes) as u64;
    let mut reports = Vec::new();
    let mut rounding = Vec::new();
    for (name, map, expected) in cases {
        let m = homology_of(map, c)?;
        rounding.push(m.max_rounding_error);
        let mut r = VerificationReport::from_residuals(
            format!("homology-action.{name}"),
            [entry_gap(&m.entries, &expected)],
            c.seed,
            None,
            0.0,
        );
        r.samples = nodes;
        reports.push(r);
    }
    let mut r = VerificationReport::from_residuals("homology-action.rounding", rounding, c.seed, None, 0.01);
    r.samples = nodes;
    reports.push(r);
    Ok(reports)
}

fn run_lambda_loop(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let ends = sampled(c.samples, |i| {
        let p = product_point(&mut sample_rng(c.seed, i));
        Ok(loop_lambda(0.0, &p)?.distance(&p).max(loop_lambda(1.0, &p)?.distance(&p)))
    })?;
    let diag = sampled(c.samples, |i| {
        let mut rng = sample_rng(c.seed, i);
        let x = sphere_point(&mut rng);
        let t = rng.random::<f64>();
        let d = ProductPoint::new(x, x);
        Ok(loop_lambda(t, &d)?.distance(&d))
    })?;
    let winding = diagonal_points(c.seed, DIAGONAL_POINTS)
        .iter()
        .map(|x| {
            let w = normal_loop_winding(&loop_lambda, x, LOOP_INTERVALS, c.fd_step)?;
            Ok((w.winding.abs() - 1).abs() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let quarter = |p: &ProductPoint| loop_lambda(0.25, p);
    let control = symplectic_report("lambda", &quarter, c.samples, c.seed, c.fd_step, 1e-6)?;
    Ok(vec![
        VerificationReport::from_residuals("lambda-loop.endpoints", ends, c.seed, None, 1e-12),
        VerificationReport::from_residuals("lambda-loop.fixes-diagonal", diag, c.seed, None, 1e-12),
        VerificationReport::from_residuals("lambda-loop.winding", winding, c.seed, Some(c.fd_step), 0.0),
        negative_control(
            "lambda-loop.not-symplectic".into(),
            control.max_residual,
            1e-6,
            control.samples,
            c.seed,
            Some(c.fd_step),
        ),
    ])
}

fn disc_point(seed: u64, i: u64, max_norm: f64) -> CotangentPoint {
    let mut rng = sample_rng(seed, i);
    let base = sphere_point(&mut rng);
    let cov = tangent_in_disc(&mut rng, &base, max_norm);
    CotangentPoint { base, covector: cov }
}

fn run_compactification(c: &SuiteConfig, ctx: &Context) -> Result<Vec<VerificationReport>> {
    let prof = ctx.profile()?;
    let fit = fit_pullback_scale(prof, c.samples, c.seed, c.fd_step)?;
    let scale = VerificationReport {
        name: "compactification.pullback-fit".into(),
        samples: fit.samples,
        seed: c.seed,
        step: Some(c.fd_step),
        max_residual: fit.max_relative,
        mean_residual: fit.mean_relative,
        tol: 1e-4,
        pass: fit.max_relative <= 1e-4,
    };
    let zero = sampled(c.samples, |i| {
        let x = sphere_point(&mut sample_rng(c.seed, i));
        let q = phi(prof, &ProductPoint::new(x, x.antipode()))?;
        Ok(q.distance(&CotangentPoint::zero_section(x)))
    })?;
    let forward = sampled(c.samples, |i| {
        let p = product_point(&mut sample_rng(c.seed, i));
        Ok(phi_inv(prof, &phi(prof, &p)?)?.distance(&p))
    })?;
    let inverse = sampled(c.samples, |i| {
        let q = disc_point(c.seed, i, 0.999);
        Ok(phi(prof, &phi_inv(prof, &q)?)?.distance(&q))
    })?;
    Ok(vec![
        scale,
        VerificationReport::from_residuals("compactification.zero-section", zero, c.seed, None, 1e-12),
        VerificationReport::from_residuals("compactification.round-trip-point", forward, c.seed, None, 1e-9),
        VerificationReport::from_residuals("compactification.round-trip-covector", inverse, c.seed, None, 1e-9),
    ])
}

fn run_conjugated_twist(c: &SuiteConfig, ctx: &Context) -> Result<Vec<VerificationReport>> {
    let prof = ctx.profile()?;
    let threshold = prof.covector_norm(1.0);
    let boundary = sampled(c.samples, |i| {
        let mut rng = sample_rng(c.seed, i);
        let base = sphere_point(&mut rng);
        let dir = unit_tangent(&mut rng, &base);
        let r = threshold + (0.999 - threshold) * rng.random::<f64>();
        let q = CotangentPoint::new(base, dir * r)?;
        Ok(conjugated_twist(prof, &q)?.distance(&q))
    })?;
    let zero = sampled(c.samples, |i| {
        let u = sphere_point(&mut sample_rng(c.seed, i));
        let q = conjugated_twist(prof, &CotangentPoint::zero_section(u))?;
        Ok(q.distance(&CotangentPoint::zero_section(u.antipode())))
    })?;
    let map = |q: &CotangentPoint| conjugated_twist(prof, q);
    let eta = sampled(c.samples, |i| {
        let q = disc_point(c.seed, i, 0.999);
        let mut rng = sample_rng(c.seed.wrapping_add(1), i);
        let a = unit_vector4(&mut rng);
        let b = unit_vector4(&mut rng);
        eta_pullback_residual(&map, &q, &a, &b, c.fd_step)
    })?;
    Ok(vec![
        VerificationReport::from_residuals("conjugated-twist.boundary-identity", boundary, c.seed, None, 1e-9),
        VerificationReport::from_residuals("conjugated-twist.zero-section-antipodal", zero, c.seed, None, 1e-9),
        VerificationReport::from_residuals("conjugated-twist.eta-symplectic", eta, c.seed, Some(c.fd_step), 1e-5),
    ])
}

fn run_fd_convergence(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let coarse = symplectic_report("coarse", &map_tau, c.samples, c.seed, c.fd_step, c.tol)?;
    let fine = symplectic_report("fine", &map_tau, c.samples, c.seed, 0.5 * c.fd_step, c.tol)?;
    let ratio = coarse.max_residual / fine.max_residual;
    // Passing band [3, 5] around the second-order ratio 4.
    let mut r = VerificationReport::from_residuals("fd-convergence", [(ratio - 4.0).abs()], c.seed, Some(c.fd_step), 1.0);
    r.samples = c.samples;
    Ok(vec![r])
}

fn run_homology_composition(c: &SuiteConfig, _: &Context) -> Result<Vec<VerificationReport>> {
    let maps: [NamedMap; 3] = [map_id, map_swap, map_tau];
    let singles = maps
        .iter()
        .map(|m| Ok(homology_of(*m, c)?.entries))
        .collect::<Result<Vec<_>>>()?;
    let mut gaps = Vec::new();
    for (i, f) in maps.iter().enumerate() {
        for (j, g) in maps.iter().enumerate() {
            let composed = |p: &ProductPoint| f(&g(p)?);
            let m = homology_matrix(&composed, &Basepoints::defaults(), c.quad_nodes)?;
            gaps.push(entry_gap(&m.entries, &HomologyMatrix::product(&singles[i], &singles[j])));
        }
    }
    Ok(vec![VerificationReport::from_residuals(
        "homology-composition",
        gaps,
        c.seed,
        None,
        0.0,
    )])
}

fn run_determinism(c: &SuiteConfig, ctx: &Context) -> Result<Vec<VerificationReport>> {
    let once = || -> Result<String> {
        let mut all = run_tau_symplectic(c, ctx)?;
        all.extend(run_moment_map(c, ctx)?);
        serde_json::to_string(&all).map_err(|e| Error::Precondition(e.to_string()))
    };
    let first = once()?;
    let second = once()?;
    let mut r = VerificationReport::from_residuals(
        "determinism",
        [if first == second { 0.0 } else { 1.0 }],
        c.seed,
        Some(c.fd_step),
        0.0,
    );
    r.samples = c.samples;
    Ok(vec![r])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub wall_time_ms: Option<u64>,
}

/// Combined output of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub reports: Vec<VerificationReport>,
    pub summary: Summary,
}

/// A check that raised instead of producing residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub check: &'static str,
    pub error: Error,
}

impl SuiteReport {
    fn assemble(reports: Vec<VerificationReport>, wall_time_ms: Option<u64>) -> Self {
        let passed = reports.iter().filter(|r| r.pass).count();
        SuiteReport {
            schema: SCHEMA_VERSION,
            summary: Summary {
                total: reports.len(),
                passed,
                failed: reports.len() - passed,
                wall_time_ms,
            },
            reports,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failing(&self) -> impl Iterator<Item = &VerificationReport> {
        self.reports.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        reports_csv(&self.reports)
    }
}

pub fn reports_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("name,samples,seed,step,max_residual,mean_residual,tol,pass\n");
    for r in reports {
        let step = r.step.map(|s| format!("{s:?}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{:?},{:?},{:?},{}",
            r.name, r.samples, r.seed, step, r.max_residual, r.mean_residual, r.tol, r.pass
        );
    }
    out
}

/// Placeholder report for a check that raised; it never passes.
fn errored(check: &Check, c: &SuiteConfig) -> VerificationReport {
    VerificationReport {
        name: check.name.into(),
        samples: 0,
        seed: c.seed,
        step: None,
        max_residual: f64::NAN,
        mean_residual: f64::NAN,
        tol: 0.0,
        pass: false,
    }
}

/// Runs the given checks in order. Checks that raise are recorded as failing
/// reports and returned alongside.
pub fn run_checks(checks: &[&Check], config: &SuiteConfig, timing: bool) -> Result<(SuiteReport, Vec<CheckFailure>)> {
    config.validate()?;
    let start = Instant::now();
    let ctx = Context::new();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for check in checks {
        match check.run(config, &ctx) {
            Ok(rs) => reports.extend(rs),
            Err(error) => {
                reports.push(errored(check, config));
                failures.push(CheckFailure { check: check.name, error });
            }
        }
    }
    let wall = timing.then(|| start.elapsed().as_millis() as u64);
    Ok((SuiteReport::assemble(reports, wall), failures))
}

pub fn run_suite(config: &SuiteConfig, timing: bool) -> Result<(SuiteReport, Vec<CheckFailure>)> {
    let all: Vec<&Check> = REGISTRY.iter().collect();
    run_checks(&all, config, timing)
}
