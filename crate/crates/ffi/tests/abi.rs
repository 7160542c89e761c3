use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use dehnlab_ffi::*;

fn v(x: f64, y: f64, z: f64) -> DlVec3 {
    DlVec3 { x, y, z }
}

fn point() -> DlProductPoint {
    DlProductPoint {
        x: v(0.0, 0.6, 0.8),
        y: v(1.0, 0.0, 0.0),
    }
}

fn last_error() -> String {
    let p = dl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn config(samples: u64) -> DlConfig {
    let mut c = DlConfig {
        samples: 0,
        seed: 0,
        fd_step: 0.0,
        tol: 0.0,
        quad_nodes: 0,
    };
    assert_eq!(unsafe { dl_config_default(&mut c) }, DlStatus::Ok);
    c.samples = samples;
    c
}

#[test]
fn twist_round_trip() {
    let p = point();
    let mut q = p;
    let mut back = p;
    unsafe {
        assert_eq!(dl_tau(&p, &mut q), DlStatus::Ok);
        assert_eq!(dl_tau_inv(&q, &mut back), DlStatus::Ok);
    }
    assert!((back.x.y - p.x.y).abs() < 1e-12);
    assert!((back.y.x - p.y.x).abs() < 1e-12);

    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(dl_mu(&p, &mut a), DlStatus::Ok);
        assert_eq!(dl_mu(&q, &mut b), DlStatus::Ok);
    }
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn swap_and_families() {
    let p = point();
    let mut q = p;
    unsafe {
        assert_eq!(dl_swap(&p, &mut q), DlStatus::Ok);
        assert_eq!(q.x, p.y);
        assert_eq!(dl_homotopy(0.0, &p, &mut q), DlStatus::Ok);
        assert!((q.x.z - p.x.z).abs() < 1e-15);
        assert_eq!(dl_loop_lambda(1.0, &p, &mut q), DlStatus::Ok);
        assert!((q.x.z - p.x.z).abs() < 1e-12);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let bad = DlProductPoint {
        x: v(0.0, 0.0, 0.0),
        y: v(1.0, 0.0, 0.0),
    };
    let mut out = point();
    assert_eq!(unsafe { dl_tau(&bad, &mut out) }, DlStatus::InvalidArgument);
    assert!(last_error().contains("normalize"));

    let p = point();
    assert_eq!(unsafe { dl_homotopy(1.5, &p, &mut out) }, DlStatus::InvalidArgument);
    assert!(last_error().contains("[0, 1]"));

    // Non-unit input is renormalized rather than rejected.
    let long = DlProductPoint {
        x: v(0.0, 1.2, 1.6),
        y: v(3.0, 0.0, 0.0),
    };
    let (mut a, mut b) = (point(), point());
    unsafe {
        assert_eq!(dl_tau(&long, &mut a), DlStatus::Ok);
        assert_eq!(dl_tau(&p, &mut b), DlStatus::Ok);
    }
    assert!((a.x.y - b.x.y).abs() < 1e-15);

    assert_eq!(unsafe { dl_tau(ptr::null(), &mut out) }, DlStatus::NullPointer);
    assert_eq!(unsafe { dl_tau(&p, ptr::null_mut()) }, DlStatus::NullPointer);
}

#[test]
fn profile_handle_lifecycle() {
    let mut prof: *mut DlProfile = ptr::null_mut();
    unsafe {
        assert_eq!(dl_profile_build(&mut prof), DlStatus::Ok);
        assert!(!prof.is_null());

        let mut f = 0.0;
        assert_eq!(dl_profile_f(prof, 1.0, &mut f), DlStatus::Ok);
        assert!((f - 0.5).abs() < 1e-9);

        let p = point();
        let mut q = DlCotangentPoint {
            base: v(0.0, 0.0, 0.0),
            covector: v(0.0, 0.0, 0.0),
        };
        assert_eq!(dl_phi(prof, &p, &mut q), DlStatus::Ok);
        let norm = (q.covector.x.powi(2) + q.covector.y.powi(2) + q.covector.z.powi(2)).sqrt();
        assert!(norm < 1.0);
        let mut back = p;
        assert_eq!(dl_phi_inv(prof, &q, &mut back), DlStatus::Ok);
        assert!((back.x.z - p.x.z).abs() < 1e-9);

        let zero = DlCotangentPoint {
            base: v(0.0, 0.0, 1.0),
            covector: v(0.0, 0.0, 0.0),
        };
        let mut image = zero;
        assert_eq!(dl_conjugated_twist(prof, &zero, &mut image), DlStatus::Ok);
        assert!((image.base.z + 1.0).abs() < 1e-9);

        let diag = DlProductPoint { x: p.x, y: p.x };
        assert_eq!(dl_phi(prof, &diag, &mut q), DlStatus::Singular);

        let dir = std::env::temp_dir().join(format!("dehnlab-ffi-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = CString::new(dir.join("profile.csv").to_str().unwrap()).unwrap();
        assert_eq!(dl_profile_export(prof, path.as_ptr()), DlStatus::Ok);
        let mut loaded: *mut DlProfile = ptr::null_mut();
        assert_eq!(dl_profile_import(path.as_ptr(), &mut loaded), DlStatus::Ok);
        let mut g = 0.0;
        assert_eq!(dl_profile_f(loaded, 1.0, &mut g), DlStatus::Ok);
        assert_eq!(f, g);
        dl_profile_free(loaded);
        std::fs::remove_dir_all(&dir).unwrap();

        let missing = CString::new("/nonexistent/dir/profile.csv").unwrap();
        assert_eq!(dl_profile_import(missing.as_ptr(), &mut loaded), DlStatus::Io);

        dl_profile_free(prof);
        dl_profile_free(ptr::null_mut());
    }
}

#[test]
fn homology_matrix_by_name() {
    let mut m = [0i64; 4];
    let tau = CString::new("tau").unwrap();
    let nope = CString::new("nope").unwrap();
    unsafe {
        assert_eq!(dl_homology_matrix(tau.as_ptr(), 64, m.as_mut_ptr()), DlStatus::Ok);
        assert_eq!(m, [0, 1, 1, 0]);
        assert_eq!(dl_homology_matrix(nope.as_ptr(), 64, m.as_mut_ptr()), DlStatus::UnknownName);
    }
}

#[test]
fn check_runs_return_json() {
    let name = CString::new("tau-symplectic").unwrap();
    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    unsafe {
        assert_eq!(dl_run_check(name.as_ptr(), &config(100), &mut json), DlStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        dl_string_free(json);
        assert!(text.contains("\"schema\": 1"));
        assert!(text.contains("\"tau-symplectic\""));

        let mut strict = config(50);
        strict.tol = 1e-15;
        json = ptr::null_mut();
        assert_eq!(dl_run_check(name.as_ptr(), &strict, &mut json), DlStatus::ChecksFailed);
        assert!(!json.is_null());
        dl_string_free(json);
        assert!(last_error().contains("tau-symplectic"));

        let mut bad = config(10);
        bad.fd_step = 1.0;
        assert_eq!(dl_run_check(name.as_ptr(), &bad, &mut json), DlStatus::InvalidArgument);

        let unknown = CString::new("bogus").unwrap();
        assert_eq!(dl_run_check(unknown.as_ptr(), &config(10), &mut json), DlStatus::UnknownName);
    }
}

#[test]
fn verify_all_passes_at_small_sample_count() {
    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    unsafe {
        assert_eq!(dl_verify_all(&config(500), &mut json), DlStatus::Ok);
        dl_string_free(json);
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<this test> sits two levels below the library.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = lib_dir.join("libdehnlab_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());

    let out = std::env::temp_dir().join(format!("dehnlab-smoke-{}", std::process::id()));
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler runs");
    assert!(status.success());

    let run = Command::new(&out).output().unwrap();
    std::fs::remove_file(&out).ok();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
