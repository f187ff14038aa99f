use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use kinsy_ffi::*;

const SCENARIO: &str = "dim 2\ndegree 1\nhorizon 2\npoint 0 | 0 1 | 0\npoint 1 | 1 | 1\npoint 2 | 3 -1 | 0\n";

fn new_sim(text: &str, mode: KinsyMode, eps: f64) -> Result<*mut KinsySimulation, KinsyStatus> {
    let c = CString::new(text).unwrap();
    let mut sim = ptr::null_mut();
    match unsafe { kinsy_simulation_new(c.as_ptr(), mode, 0.0, eps, &mut sim) } {
        KinsyStatus::Ok => Ok(sim),
        s => {
            assert!(sim.is_null());
            Err(s)
        }
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(kinsy_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn nearest(sim: *const KinsySimulation, p: u64) -> Option<u64> {
    let (mut found, mut q) = (false, 0u64);
    assert_eq!(
        unsafe { kinsy_simulation_nearest(sim, p, &mut found, &mut q) },
        KinsyStatus::Ok
    );
    found.then_some(q)
}

#[test]
fn nearest_neighbour_follows_motion() {
    let sim = new_sim(SCENARIO, KinsyMode::Ann, 0.0).unwrap();
    assert_eq!(nearest(sim, 2), Some(1));
    unsafe {
        assert_eq!(kinsy_simulation_advance(sim, 5, 4), KinsyStatus::Ok);
        let mut t = 0.0;
        assert_eq!(kinsy_simulation_time(sim, &mut t), KinsyStatus::Ok);
        assert_eq!(t, 1.25);
        let mut events = 0;
        assert_eq!(kinsy_simulation_event_count(sim, &mut events), KinsyStatus::Ok);
        assert!(events > 0);
        assert_eq!(kinsy_simulation_verify(sim), KinsyStatus::Ok);
    }
    assert_eq!(nearest(sim, 2), Some(0));
    unsafe { kinsy_simulation_free(sim) };
}

#[test]
fn targets_and_counts() {
    let sim = new_sim(SCENARIO, KinsyMode::SemiYao, 0.0).unwrap();
    let (mut n, mut c) = (0usize, 0usize);
    unsafe {
        assert_eq!(kinsy_simulation_point_count(sim, &mut n), KinsyStatus::Ok);
        assert_eq!(kinsy_simulation_cone_count(sim, &mut c), KinsyStatus::Ok);
    }
    assert_eq!((n, c), (3, 6));
    let mut hits = 0;
    for cone in 0..c {
        let (mut found, mut q) = (false, 0u64);
        assert_eq!(
            unsafe { kinsy_simulation_target(sim, 0, cone, &mut found, &mut q) },
            KinsyStatus::Ok
        );
        hits += usize::from(found);
    }
    assert!(hits >= 1);
    let (mut found, mut q) = (false, 0u64);
    unsafe {
        assert_eq!(
            kinsy_simulation_target(sim, 0, c, &mut found, &mut q),
            KinsyStatus::Unavailable
        );
        assert_eq!(
            kinsy_simulation_nearest(sim, 0, &mut found, &mut q),
            KinsyStatus::Unavailable
        );
        kinsy_simulation_free(sim);
    }
}

#[test]
fn eps_mode() {
    let sim = new_sim(SCENARIO, KinsyMode::EpsAnn, 0.5).unwrap();
    let (mut found, mut q) = (false, 0u64);
    unsafe {
        assert_eq!(
            kinsy_simulation_eps_nearest(sim, 2, &mut found, &mut q),
            KinsyStatus::Ok
        );
        assert!(found);
        assert_eq!(kinsy_simulation_advance(sim, 2, 1), KinsyStatus::Ok);
        assert_eq!(kinsy_simulation_verify(sim), KinsyStatus::Ok);
        kinsy_simulation_free(sim);
    }
}

#[test]
fn errors_are_reported() {
    assert_eq!(
        new_sim("dim 2\ndegree 1\npoint 0 | x | 0\n", KinsyMode::Ann, 0.0),
        Err(KinsyStatus::Parse)
    );
    assert!(last_error().contains("line 3"), "{}", last_error());
    assert_eq!(new_sim(SCENARIO, KinsyMode::EpsAnn, 0.0), Err(KinsyStatus::Config));
    assert_eq!(
        new_sim(
            "dim 2\ndegree 0\npoint 0 | 0 | 0\npoint 1 | 0 | 0\npoint 1 | 1 | 1\n",
            KinsyMode::Ann,
            0.0
        ),
        Err(KinsyStatus::Parse)
    );

    let sim = new_sim(SCENARIO, KinsyMode::Ann, 0.0).unwrap();
    let (mut found, mut q) = (false, 0u64);
    unsafe {
        assert_eq!(
            kinsy_simulation_nearest(sim, 7, &mut found, &mut q),
            KinsyStatus::UnknownPoint
        );
        assert_eq!(kinsy_simulation_advance(sim, 1, 0), KinsyStatus::InvalidArgument);
        assert_eq!(kinsy_simulation_advance(sim, 1, 1), KinsyStatus::Ok);
        assert_eq!(kinsy_simulation_advance(sim, 1, 2), KinsyStatus::InvalidArgument);
        assert_eq!(
            kinsy_simulation_nearest(sim, 0, ptr::null_mut(), &mut q),
            KinsyStatus::NullPointer
        );
        assert_eq!(kinsy_simulation_verify(ptr::null()), KinsyStatus::NullPointer);
        assert_eq!(
            kinsy_simulation_new(ptr::null(), KinsyMode::Ann, 0.0, 0.0, ptr::null_mut()),
            KinsyStatus::NullPointer
        );
        kinsy_simulation_free(sim);
        kinsy_simulation_free(ptr::null_mut());
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(kinsy_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// Builds the static library; test builds only produce the rlib.
fn static_library() -> PathBuf {
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "-p", "kinsy-ffi", "--manifest-path"])
        .arg(manifest_dir().join("Cargo.toml"))
        .status()
        .expect("run cargo");
    assert!(status.success());
    let exe = std::env::current_exe().unwrap();
    // target/<profile>/deps/<test> -> target
    let target = exe.ancestors().nth(3).unwrap();
    target.join("debug/libkinsy_ffi.a")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(manifest_dir().join("include/kinsy.h")).unwrap();
    for name in [
        "typedef struct KinsySimulation KinsySimulation",
        "KINSY_STATUS_DIVERGENCE",
        "KINSY_MODE_EPS_ANN",
        "kinsy_simulation_new(",
        "kinsy_simulation_free(",
        "kinsy_last_error(",
    ] {
        assert!(h.contains(name), "{}", name);
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = static_library();
    assert!(lib.exists(), "{} missing", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(manifest_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("run cc");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
