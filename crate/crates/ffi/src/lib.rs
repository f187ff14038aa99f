//! C interface to the kinsy simulator.
//!
//! A simulation is an opaque `KinsySimulation` created from scenario text and
//! released with `kinsy_simulation_free`. Every other function returns a
//! `KinsyStatus`; on failure, `kinsy_last_error` describes the most recent
//! error on the calling thread. Points are addressed by their scenario ids.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kinsy::motion::{rat, TimeInstant};
use kinsy::scenario::parse_scenario;
use kinsy::sim::{Mode, SimConfig, SimError, Simulation};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KinsyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    /// The configuration cannot be built (bad angle, epsilon or mode).
    Config = 4,
    /// A root solver or event handler failed.
    Motion = 5,
    /// The outputs disagree with the brute-force oracle.
    Divergence = 6,
    UnknownPoint = 7,
    /// The requested output is not maintained in this mode.
    Unavailable = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KinsyMode {
    SemiYao = 0,
    Ann = 1,
    EpsAnn = 2,
}

/// Opaque simulation handle.
pub struct KinsySimulation {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn fail(status: KinsyStatus, msg: impl Into<String>) -> KinsyStatus {
    set_error(msg);
    status
}

fn sim_error(e: SimError) -> KinsyStatus {
    let status = match e {
        SimError::Cone(_) | SimError::Config(_) => KinsyStatus::Config,
        SimError::Motion(_) => KinsyStatus::Motion,
        SimError::Divergence { .. } => KinsyStatus::Divergence,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> KinsyStatus) -> KinsyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(KinsyStatus::Panic, "internal panic"),
    }
}

fn index_of(sim: &Simulation, id: u64) -> Option<usize> {
    sim.points().binary_search_by_key(&id, |p| p.point_id).ok()
}

/// Message for the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kinsy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `scenario` (NUL-terminated text) and builds every structure at time
/// 0. `theta` and `eps` override the scenario header when positive.
///
/// # Safety
/// `scenario` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_new(
    scenario: *const c_char,
    mode: KinsyMode,
    theta: f64,
    eps: f64,
    out: *mut *mut KinsySimulation,
) -> KinsyStatus {
    if scenario.is_null() || out.is_null() {
        return fail(KinsyStatus::NullPointer, "null argument");
    }
    *out = ptr::null_mut();
    let text = match CStr::from_ptr(scenario).to_str() {
        Ok(s) => s,
        Err(_) => return fail(KinsyStatus::InvalidArgument, "scenario is not UTF-8"),
    };
    guard(|| {
        let sc = match parse_scenario(text) {
            Ok(sc) => sc,
            Err(e) => return fail(KinsyStatus::Parse, e.to_string()),
        };
        let mut config = SimConfig::new(match mode {
            KinsyMode::SemiYao => Mode::SemiYao,
            KinsyMode::Ann => Mode::Ann,
            KinsyMode::EpsAnn => Mode::EpsAnn,
        });
        config.theta = if theta > 0.0 { Some(theta) } else { sc.header.theta };
        config.eps = if eps > 0.0 { Some(eps) } else { sc.header.eps };
        match Simulation::new(sc.points, sc.header.dim, config, TimeInstant::zero()) {
            Ok(sim) => {
                *out = Box::into_raw(Box::new(KinsySimulation { sim }));
                KinsyStatus::Ok
            }
            Err(e) => sim_error(e),
        }
    })
}

/// Releases a simulation. Null is ignored.
///
/// # Safety
/// `sim` must come from `kinsy_simulation_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_free(sim: *mut KinsySimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Processes every event up to the exact time `num / den`.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_advance(sim: *mut KinsySimulation, num: i64, den: i64) -> KinsyStatus {
    let Some(s) = sim.as_mut() else {
        return fail(KinsyStatus::NullPointer, "null simulation");
    };
    if den <= 0 {
        return fail(KinsyStatus::InvalidArgument, "denominator must be positive");
    }
    let t = TimeInstant::Exact(rat(num, den));
    if &t < s.sim.now() {
        return fail(
            KinsyStatus::InvalidArgument,
            format!("time {}/{} is before the current time", num, den),
        );
    }
    guard(|| match s.sim.run_until(&t, &[], |_| Ok(())) {
        Ok(()) => KinsyStatus::Ok,
        Err(e) => sim_error(e),
    })
}

/// Current time, rounded to a double.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_time(sim: *const KinsySimulation, out: *mut f64) -> KinsyStatus {
    match (sim.as_ref(), out.is_null()) {
        (Some(s), false) => {
            *out = s.sim.now().to_f64();
            KinsyStatus::Ok
        }
        _ => fail(KinsyStatus::NullPointer, "null argument"),
    }
}

/// Number of points.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_point_count(sim: *const KinsySimulation, out: *mut usize) -> KinsyStatus {
    match (sim.as_ref(), out.is_null()) {
        (Some(s), false) => {
            *out = s.sim.points().len();
            KinsyStatus::Ok
        }
        _ => fail(KinsyStatus::NullPointer, "null argument"),
    }
}

/// Number of cones in the partition.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_cone_count(sim: *const KinsySimulation, out: *mut usize) -> KinsyStatus {
    match (sim.as_ref(), out.is_null()) {
        (Some(s), false) => {
            *out = s.sim.family().len();
            KinsyStatus::Ok
        }
        _ => fail(KinsyStatus::NullPointer, "null argument"),
    }
}

/// Total number of events processed so far.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_event_count(sim: *const KinsySimulation, out: *mut u64) -> KinsyStatus {
    match (sim.as_ref(), out.is_null()) {
        (Some(s), false) => {
            *out = s.sim.stats().total_events();
            KinsyStatus::Ok
        }
        _ => fail(KinsyStatus::NullPointer, "null argument"),
    }
}

unsafe fn neighbour(
    sim: *const KinsySimulation,
    point: u64,
    found: *mut bool,
    out: *mut u64,
    pick: impl FnOnce(&Simulation, usize) -> Result<Option<u32>, &'static str>,
) -> KinsyStatus {
    let Some(s) = sim.as_ref() else {
        return fail(KinsyStatus::NullPointer, "null simulation");
    };
    if found.is_null() || out.is_null() {
        return fail(KinsyStatus::NullPointer, "null argument");
    }
    let Some(p) = index_of(&s.sim, point) else {
        return fail(KinsyStatus::UnknownPoint, format!("no point with id {}", point));
    };
    match pick(&s.sim, p) {
        Ok(q) => {
            *found = q.is_some();
            *out = q.map_or(0, |q| s.sim.points()[q as usize].point_id);
            KinsyStatus::Ok
        }
        Err(msg) => fail(KinsyStatus::Unavailable, msg),
    }
}

/// Nearest neighbour of `point` (ann mode). `*found` is false when the point
/// has no other point to compare with.
///
/// # Safety
/// `sim` must be a live handle; `found` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_nearest(
    sim: *const KinsySimulation,
    point: u64,
    found: *mut bool,
    out: *mut u64,
) -> KinsyStatus {
    neighbour(sim, point, found, out, |s, p| {
        s.ann()
            .map(|a| a.nearest(p as u32))
            .ok_or("nearest neighbours need ann mode")
    })
}

/// A (1+eps)-approximate nearest neighbour of `point` (eps-ann mode).
///
/// # Safety
/// `sim` must be a live handle; `found` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_eps_nearest(
    sim: *const KinsySimulation,
    point: u64,
    found: *mut bool,
    out: *mut u64,
) -> KinsyStatus {
    neighbour(sim, point, found, out, |s, p| {
        s.eps()
            .map(|e| e.eps_nearest(p as u32))
            .ok_or("approximate neighbours need eps-ann mode")
    })
}

/// Semi-Yao target of `point` in `cone` (semi-yao and ann modes).
///
/// # Safety
/// `sim` must be a live handle; `found` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_target(
    sim: *const KinsySimulation,
    point: u64,
    cone: usize,
    found: *mut bool,
    out: *mut u64,
) -> KinsyStatus {
    neighbour(sim, point, found, out, |s, p| {
        if cone >= s.family().len() {
            return Err("cone index out of range");
        }
        s.semi_yao()
            .map(|g| g.targets[p][cone])
            .ok_or("targets need semi-yao or ann mode")
    })
}

/// Compares all outputs with brute force and audits every structure at the
/// current time. Returns `KINSY_STATUS_DIVERGENCE` on any disagreement.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kinsy_simulation_verify(sim: *const KinsySimulation) -> KinsyStatus {
    let Some(s) = sim.as_ref() else {
        return fail(KinsyStatus::NullPointer, "null simulation");
    };
    guard(|| {
        let rep = s.sim.verify_now();
        if rep.ok() {
            KinsyStatus::Ok
        } else {
            fail(KinsyStatus::Divergence, rep.first_failure.unwrap_or_default())
        }
    })
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn kinsy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
