//! C ABI over the dehnlab core.
//!
//! Every function returns a [`DlStatus`]. On anything other than `DL_STATUS_OK`
//! the message is available from [`dl_last_error`] on the same thread until
//! the next failing call. Strings handed out by the library are released with
//! [`dl_string_free`], profiles with [`dl_profile_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use dehnlab::checks::{find_check, named_map, run_checks, run_suite, Check, SuiteConfig};
use dehnlab::compactify::{conjugated_twist, phi, phi_inv, solve_profile_f, CompactifyProfile, CotangentPoint};
use dehnlab::geom::{ProductPoint, SpherePoint, Vec3};
use dehnlab::maps::{homotopy_h, loop_lambda, mu, swap_iota, tau, tau_inv};
use dehnlab::topology::{homology_matrix, Basepoints};
use dehnlab::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed argument, such as a zero vector or a parameter out of range.
    InvalidArgument = 2,
    /// The point sits on the antidiagonal or the diagonal, where the map is undefined.
    Singular = 3,
    /// A quadrature or loop computation could not resolve its answer.
    Numerical = 4,
    Io = 5,
    Parse = 6,
    UnknownName = 7,
    /// At least one check in a suite run did not pass. The JSON is still returned.
    ChecksFailed = 8,
    Panic = 9,
}

/// A vector in R³.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A point (x, y) of S² × S². Components are renormalized on input; zero or
/// non-finite vectors are rejected.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlProductPoint {
    pub x: DlVec3,
    pub y: DlVec3,
}

/// A covector at a point of S², stored as a tangent vector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlCotangentPoint {
    pub base: DlVec3,
    pub covector: DlVec3,
}

/// Numerical settings for check runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlConfig {
    pub samples: u64,
    pub seed: u64,
    pub fd_step: f64,
    pub tol: f64,
    pub quad_nodes: usize,
}

/// Opaque handle to a solved compactification profile.
pub struct DlProfile(CompactifyProfile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DlStatus {
    match e {
        Error::Antidiagonal | Error::OnDiagonal | Error::OutsideDisc { .. } => DlStatus::Singular,
        Error::Resolution { .. }
        | Error::Undersampled { .. }
        | Error::InvalidLoop(_)
        | Error::BasepointDisagreement { .. }
        | Error::Profile(_) => DlStatus::Numerical,
        Error::Io(_) => DlStatus::Io,
        Error::Parse { .. } => DlStatus::Parse,
        _ => DlStatus::InvalidArgument,
    }
}

struct Fail(DlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            DlStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(DlStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write<T>(p: *mut T, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null());
    }
    p.write(v);
    Ok(())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(DlStatus::InvalidArgument, "string is not UTF-8".into()))
}

fn vec3(v: &DlVec3) -> Vec3 {
    Vec3::new(v.x, v.y, v.z)
}

fn dl_vec3(v: &Vec3) -> DlVec3 {
    DlVec3 { x: v.x, y: v.y, z: v.z }
}

fn sphere(v: &DlVec3) -> Result<SpherePoint, Fail> {
    Ok(SpherePoint::new(vec3(v))?)
}

fn product(p: &DlProductPoint) -> Result<ProductPoint, Fail> {
    Ok(ProductPoint::new(sphere(&p.x)?, sphere(&p.y)?))
}

fn dl_product(p: &ProductPoint) -> DlProductPoint {
    DlProductPoint {
        x: dl_vec3(p.x.coords()),
        y: dl_vec3(p.y.coords()),
    }
}

fn cotangent(q: &DlCotangentPoint) -> Result<CotangentPoint, Fail> {
    Ok(CotangentPoint::new(sphere(&q.base)?, vec3(&q.covector))?)
}

fn dl_cotangent(q: &CotangentPoint) -> DlCotangentPoint {
    DlCotangentPoint {
        base: dl_vec3(q.base.coords()),
        covector: dl_vec3(&q.covector),
    }
}

fn suite_config(c: &DlConfig) -> Result<SuiteConfig, Fail> {
    let cfg = SuiteConfig {
        samples: c.samples,
        seed: c.seed,
        fd_step: c.fd_step,
        tol: c.tol,
        quad_nodes: c.quad_nodes,
        ..SuiteConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn hand_out(s: String, out: *mut *mut c_char) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(DlStatus::Panic, "interior NUL in output".into()))?;
    unsafe { write(out, c.into_raw()) }
}

/// Message of the most recent failure on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn dl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Fills `out` with the command-line defaults.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dl_config_default(out: *mut DlConfig) -> DlStatus {
    guard(|| {
        let d = SuiteConfig::default();
        write(
            out,
            DlConfig {
                samples: d.samples,
                seed: d.seed,
                fd_step: d.fd_step,
                tol: d.tol,
                quad_nodes: d.quad_nodes,
            },
        )
    })
}

/// The twist τ.
///
/// # Safety
/// `p` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_tau(p: *const DlProductPoint, out: *mut DlProductPoint) -> DlStatus {
    guard(|| write(out, dl_product(&tau(&product(read(p)?)?))))
}

/// The inverse twist.
///
/// # Safety
/// `p` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_tau_inv(p: *const DlProductPoint, out: *mut DlProductPoint) -> DlStatus {
    guard(|| write(out, dl_product(&tau_inv(&product(read(p)?)?))))
}

/// The factor swap (x, y) ↦ (y, x).
///
/// # Safety
/// `p` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_swap(p: *const DlProductPoint, out: *mut DlProductPoint) -> DlStatus {
    guard(|| write(out, dl_product(&swap_iota(&product(read(p)?)?))))
}

/// Homotopy h_s from the identity (s = 0) to τ² (s = 1).
///
/// # Safety
/// `p` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_homotopy(s: f64, p: *const DlProductPoint, out: *mut DlProductPoint) -> DlStatus {
    guard(|| write(out, dl_product(&homotopy_h(s, &product(read(p)?)?)?)))
}

/// Loop λ_t rotating the first factor about the second.
///
/// # Safety
/// `p` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_loop_lambda(t: f64, p: *const DlProductPoint, out: *mut DlProductPoint) -> DlStatus {
    guard(|| write(out, dl_product(&loop_lambda(t, &product(read(p)?)?)?)))
}

/// Moment map |x + y|.
///
/// # Safety
/// `p` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_mu(p: *const DlProductPoint, out: *mut f64) -> DlStatus {
    guard(|| write(out, mu(&product(read(p)?)?)))
}

/// Solves the compactification profile. Release with [`dl_profile_free`].
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dl_profile_build(out: *mut *mut DlProfile) -> DlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let p = solve_profile_f()?;
        write(out, Box::into_raw(Box::new(DlProfile(p))))
    })
}

/// Loads a profile table written by [`dl_profile_export`].
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_profile_import(path: *const c_char, out: *mut *mut DlProfile) -> DlStatus {
    guard(|| {
        let path = read_str(path)?;
        if out.is_null() {
            return Err(null());
        }
        let p = CompactifyProfile::import(Path::new(path))?;
        write(out, Box::into_raw(Box::new(DlProfile(p))))
    })
}

/// Releases a profile. NULL is ignored.
///
/// # Safety
/// `profile` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dl_profile_free(profile: *mut DlProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Writes the profile table as CSV.
///
/// # Safety
/// `profile` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dl_profile_export(profile: *const DlProfile, path: *const c_char) -> DlStatus {
    guard(|| Ok(read(profile)?.0.export(Path::new(read_str(path)?))?))
}

/// Evaluates the profile f at s.
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_profile_f(profile: *const DlProfile, s: f64, out: *mut f64) -> DlStatus {
    guard(|| write(out, read(profile)?.0.f(s)))
}

/// The compactification map from the complement of the diagonal into the unit disc bundle.
///
/// # Safety
/// Pointers must be valid; `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dl_phi(
    profile: *const DlProfile,
    p: *const DlProductPoint,
    out: *mut DlCotangentPoint,
) -> DlStatus {
    guard(|| {
        let q = phi(&read(profile)?.0, &product(read(p)?)?)?;
        write(out, dl_cotangent(&q))
    })
}

/// Inverse of [`dl_phi`].
///
/// # Safety
/// Pointers must be valid; `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dl_phi_inv(
    profile: *const DlProfile,
    q: *const DlCotangentPoint,
    out: *mut DlProductPoint,
) -> DlStatus {
    guard(|| {
        let p = phi_inv(&read(profile)?.0, &cotangent(read(q)?)?)?;
        write(out, dl_product(&p))
    })
}

/// τ transported to the disc bundle.
///
/// # Safety
/// Pointers must be valid; `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dl_conjugated_twist(
    profile: *const DlProfile,
    q: *const DlCotangentPoint,
    out: *mut DlCotangentPoint,
) -> DlStatus {
    guard(|| {
        let r = conjugated_twist(&read(profile)?.0, &cotangent(read(q)?)?)?;
        write(out, dl_cotangent(&r))
    })
}

/// Homology action of a named map (`id`, `swap`, `tau`, `tau-inv`, `tau2`),
/// written row-major into `out[4]`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable for four values.
#[no_mangle]
pub unsafe extern "C" fn dl_homology_matrix(name: *const c_char, nodes: usize, out: *mut i64) -> DlStatus {
    guard(|| {
        let name = read_str(name)?;
        let map = named_map(name).ok_or_else(|| Fail(DlStatus::UnknownName, format!("unknown map `{name}`")))?;
        if out.is_null() {
            return Err(null());
        }
        let m = homology_matrix(&map, &Basepoints::defaults(), nodes)?;
        let flat = [m.entries[0][0], m.entries[0][1], m.entries[1][0], m.entries[1][1]];
        ptr::copy_nonoverlapping(flat.as_ptr(), out, 4);
        Ok(())
    })
}

fn run_to_json(checks: Option<&[&Check]>, config: &DlConfig, out: *mut *mut c_char) -> Result<(), Fail> {
    let cfg = suite_config(config)?;
    let (report, failures) = match checks {
        Some(c) => run_checks(c, &cfg, false)?,
        None => run_suite(&cfg, false)?,
    };
    hand_out(report.to_json(), out)?;
    if report.all_pass() {
        return Ok(());
    }
    let mut names: Vec<String> = report.failing().map(|r| r.name.clone()).collect();
    names.extend(failures.iter().map(|f| format!("{} ({})", f.check, f.error)));
    Err(Fail(DlStatus::ChecksFailed, format!("failing: {}", names.join(", "))))
}

/// Runs one registered check and hands back the JSON report in `out_json`.
/// The report is written for `DL_STATUS_OK` and `DL_STATUS_CHECKS_FAILED`.
///
/// # Safety
/// `name` must be a NUL-terminated string, `config` readable, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_run_check(
    name: *const c_char,
    config: *const DlConfig,
    out_json: *mut *mut c_char,
) -> DlStatus {
    guard(|| {
        let name = read_str(name)?;
        let check = find_check(name).ok_or_else(|| Fail(DlStatus::UnknownName, format!("unknown check `{name}`")))?;
        run_to_json(Some(&[check]), read(config)?, out_json)
    })
}

/// Runs every registered check. Same conventions as [`dl_run_check`].
///
/// # Safety
/// `config` must be readable and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_verify_all(config: *const DlConfig, out_json: *mut *mut c_char) -> DlStatus {
    guard(|| run_to_json(None, read(config)?, out_json))
}
