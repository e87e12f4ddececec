//! C ABI over `phdae` scenarios. Systems are opaque handles; every call
//! returns a `PhdaeStatus` and leaves a message for `phdae_last_error` on
//! failure.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use phdae::bench_cli::{build_scenario, default_config, parse_config, Scenario, MODELS};
use phdae::numerics::integrate;
use phdae::phcore::{check_structure, power_balance};
use phdae::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhdaeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownModel = 3,
    DimensionMismatch = 4,
    Numerical = 5,
    Panic = 6,
}

/// Result of `phdae_system_integrate`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhdaeRunSummary {
    pub steps: usize,
    pub h_initial: f64,
    pub h_final: f64,
    /// Largest per-step `|ΔH - dt·(supplied - dissipated)|`.
    pub max_balance_residual: f64,
}

/// A built system with its default initial state and boundary forcing.
pub struct PhdaeSystem {
    scenario: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: PhdaeStatus, msg: impl Into<String>) -> PhdaeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn status_of(e: &Error) -> PhdaeStatus {
    match e {
        Error::DimensionMismatch(_) => PhdaeStatus::DimensionMismatch,
        Error::InvalidParameter(_) | Error::InvalidGrid(_) | Error::NonPositiveCoefficient(_) => PhdaeStatus::InvalidArgument,
        _ => PhdaeStatus::Numerical,
    }
}

fn guarded(f: impl FnOnce() -> PhdaeStatus) -> PhdaeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(PhdaeStatus::Panic, msg)
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, PhdaeStatus> {
    if p.is_null() {
        return Err(fail(PhdaeStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(PhdaeStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn finish_new(built: phdae::Result<Scenario>, out: *mut *mut PhdaeSystem) -> PhdaeStatus {
    match built {
        Ok(scenario) => {
            *out = Box::into_raw(Box::new(PhdaeSystem { scenario }));
            PhdaeStatus::Ok
        }
        Err(e) => fail(status_of(&e), e.to_string()),
    }
}

/// Builds `model` on a grid with `n` cells per direction and default
/// parameters, closed boundary.
///
/// # Safety
/// `model` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdae_scenario_new(model: *const c_char, n: usize, out: *mut *mut PhdaeSystem) -> PhdaeStatus {
    guarded(|| {
        if out.is_null() {
            return fail(PhdaeStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let model = match c_str(model) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if !MODELS.contains(&model) {
            return fail(PhdaeStatus::UnknownModel, format!("unknown model {model:?}; valid models: {}", MODELS.join(", ")));
        }
        finish_new(build_scenario(&default_config(model, n)), out)
    })
}

/// Builds the scenario described by INI text, as accepted by `phdae run`.
///
/// # Safety
/// `ini` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdae_scenario_from_config(ini: *const c_char, out: *mut *mut PhdaeSystem) -> PhdaeStatus {
    guarded(|| {
        if out.is_null() {
            return fail(PhdaeStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let text = match c_str(ini) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_config(text) {
            Ok(cfg) => finish_new(build_scenario(&cfg), out),
            Err(e) => {
                let unknown = e.0.iter().any(|i| matches!(i, phdae::bench_cli::ConfigIssue::UnknownModel { .. }));
                fail(if unknown { PhdaeStatus::UnknownModel } else { PhdaeStatus::InvalidArgument }, e.to_string())
            }
        }
    })
}

/// # Safety
/// `sys` must come from a constructor above and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn phdae_system_free(sys: *mut PhdaeSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdae_system_state_dim(sys: *const PhdaeSystem, out: *mut usize) -> PhdaeStatus {
    guarded(|| match (sys.as_ref(), out.is_null()) {
        (Some(s), false) => {
            *out = s.scenario.system.dim();
            PhdaeStatus::Ok
        }
        _ => fail(PhdaeStatus::NullPointer, "null handle or output"),
    })
}

unsafe fn state_slice<'a>(p: *const f64, len: usize, dim: usize) -> Result<&'a [f64], PhdaeStatus> {
    if p.is_null() {
        return Err(fail(PhdaeStatus::NullPointer, "null state buffer"));
    }
    if len != dim {
        return Err(fail(PhdaeStatus::DimensionMismatch, format!("buffer has {len} entries, state has {dim}")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn state_slice_mut<'a>(p: *mut f64, len: usize, dim: usize) -> Result<&'a mut [f64], PhdaeStatus> {
    state_slice(p, len, dim)?;
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Copies the default initial state into `buf[0..len]`; `len` must equal the
/// state dimension.
///
/// # Safety
/// `sys` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn phdae_system_initial_state(sys: *const PhdaeSystem, buf: *mut f64, len: usize) -> PhdaeStatus {
    guarded(|| {
        let Some(s) = sys.as_ref() else { return fail(PhdaeStatus::NullPointer, "null handle") };
        match state_slice_mut(buf, len, s.scenario.system.dim()) {
            Ok(out) => {
                out.copy_from_slice(&s.scenario.initial);
                PhdaeStatus::Ok
            }
            Err(st) => st,
        }
    })
}

/// # Safety
/// `sys` must be a live handle; `z` must hold `len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn phdae_system_hamiltonian(sys: *const PhdaeSystem, z: *const f64, len: usize, out: *mut f64) -> PhdaeStatus {
    guarded(|| {
        let Some(s) = sys.as_ref() else { return fail(PhdaeStatus::NullPointer, "null handle") };
        if out.is_null() {
            return fail(PhdaeStatus::NullPointer, "null output");
        }
        match state_slice(z, len, s.scenario.system.dim()) {
            Ok(z) => {
                *out = s.scenario.system.hamiltonian(z);
                PhdaeStatus::Ok
            }
            Err(st) => st,
        }
    })
}

/// Writes 1 to `pass` if `J` is skew, `Q`, `R`, `M` symmetric and `R`, `M`
/// pass the definiteness probes, else 0.
///
/// # Safety
/// `sys` must be a live handle; `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdae_system_check_structure(sys: *const PhdaeSystem, pass: *mut c_int) -> PhdaeStatus {
    guarded(|| match (sys.as_ref(), pass.is_null()) {
        (Some(s), false) => {
            *pass = check_structure(&s.scenario.system).pass as c_int;
            PhdaeStatus::Ok
        }
        _ => fail(PhdaeStatus::NullPointer, "null handle or output"),
    })
}

/// Integrates from `z0` (or the default initial state when `z0` is null)
/// with the scenario's forcing, writes the final state into `z_final` when
/// it is non-null, and fills `summary`.
///
/// # Safety
/// `sys` must be a live handle; non-null `z0` and `z_final` must hold `len`
/// doubles; `summary` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdae_system_integrate(
    sys: *const PhdaeSystem,
    z0: *const f64,
    z_final: *mut f64,
    len: usize,
    t_final: f64,
    dt: f64,
    summary: *mut PhdaeRunSummary,
) -> PhdaeStatus {
    guarded(|| {
        let Some(s) = sys.as_ref() else { return fail(PhdaeStatus::NullPointer, "null handle") };
        if summary.is_null() {
            return fail(PhdaeStatus::NullPointer, "null summary");
        }
        if !(dt > 0.0 && dt.is_finite() && t_final >= 0.0 && t_final.is_finite()) {
            return fail(PhdaeStatus::InvalidArgument, format!("need dt > 0 and t_final ≥ 0, got dt = {dt}, t_final = {t_final}"));
        }
        let sc = &s.scenario;
        let dim = sc.system.dim();
        let start = if z0.is_null() {
            sc.initial.as_slice()
        } else {
            match state_slice(z0, len, dim) {
                Ok(z) => z,
                Err(st) => return st,
            }
        };
        let out = if z_final.is_null() {
            None
        } else {
            match state_slice_mut(z_final, len, dim) {
                Ok(z) => Some(z),
                Err(st) => return st,
            }
        };
        let input = sc.input.as_ref().map(|f| f.as_ref() as &dyn Fn(f64) -> Vec<f64>);
        let run = integrate(&sc.system, start, input, t_final, dt, 1).and_then(|traj| {
            let bal = power_balance(&traj, &sc.system)?;
            Ok((traj, bal))
        });
        match run {
            Ok((traj, bal)) => {
                let last = traj.states.last().expect("trajectory holds the initial state");
                if let Some(out) = out {
                    out.copy_from_slice(last);
                }
                *summary = PhdaeRunSummary {
                    steps: traj.steps.len(),
                    h_initial: traj.hamiltonian[0],
                    h_final: *traj.hamiltonian.last().expect("nonempty"),
                    max_balance_residual: bal.max_abs_residual,
                };
                PhdaeStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must hold `len` bytes or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn phdae_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
