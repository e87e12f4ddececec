use std::ffi::{c_char, c_int, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use phdae_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { phdae_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn build(model: &str, n: usize) -> (PhdaeStatus, *mut PhdaeSystem) {
    let name = CString::new(model).unwrap();
    let mut sys = ptr::null_mut();
    let st = unsafe { phdae_scenario_new(name.as_ptr(), n, &mut sys) };
    (st, sys)
}

#[test]
fn closed_string_round_trip() {
    let (st, sys) = build("wave1d_sl", 32);
    assert_eq!(st, PhdaeStatus::Ok);
    unsafe {
        let mut dim = 0;
        assert_eq!(phdae_system_state_dim(sys, &mut dim), PhdaeStatus::Ok);
        assert_eq!(dim, 66);
        let mut z = vec![0.0; dim];
        assert_eq!(phdae_system_initial_state(sys, z.as_mut_ptr(), dim), PhdaeStatus::Ok);
        let mut h0 = 0.0;
        assert_eq!(phdae_system_hamiltonian(sys, z.as_ptr(), dim, &mut h0), PhdaeStatus::Ok);
        assert!(h0 > 0.0);
        let mut pass: c_int = 0;
        assert_eq!(phdae_system_check_structure(sys, &mut pass), PhdaeStatus::Ok);
        assert_eq!(pass, 1);

        let mut zf = vec![0.0; dim];
        let mut summary = PhdaeRunSummary::default();
        assert_eq!(phdae_system_integrate(sys, z.as_ptr(), zf.as_mut_ptr(), dim, 0.5, 1e-2, &mut summary), PhdaeStatus::Ok);
        assert_eq!(summary.steps, 50);
        assert_eq!(summary.h_initial, h0);
        assert!((summary.h_final - h0).abs() <= 1e-12 * h0);
        let mut hf = 0.0;
        phdae_system_hamiltonian(sys, zf.as_ptr(), dim, &mut hf);
        assert_eq!(hf, summary.h_final);
        assert_ne!(zf, z);
        phdae_system_free(sys);
    }
}

#[test]
fn forced_config_reports_balance() {
    let ini = CString::new("[scenario]\nmodel = wave1d_sd\nn = 16\nt_final = 0.2\ndt = 0.01\n[bc]\nkind = forced\n").unwrap();
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(phdae_scenario_from_config(ini.as_ptr(), &mut sys), PhdaeStatus::Ok, "{}", last_error());
        let mut summary = PhdaeRunSummary::default();
        assert_eq!(phdae_system_integrate(sys, ptr::null(), ptr::null_mut(), 0, 0.2, 0.01, &mut summary), PhdaeStatus::Ok);
        assert_eq!(summary.steps, 20);
        assert_ne!(summary.h_final, summary.h_initial);
        assert!(summary.max_balance_residual < 1e-12);
        phdae_system_free(sys);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let (st, sys) = build("wave9d", 8);
    assert_eq!(st, PhdaeStatus::UnknownModel);
    assert!(sys.is_null());
    assert!(last_error().contains("wave9d"));

    let (st, _) = build("wave1d_sl", 0);
    assert_eq!(st, PhdaeStatus::InvalidArgument);

    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(phdae_scenario_new(ptr::null(), 8, &mut sys), PhdaeStatus::NullPointer);
        let mut dim = 0;
        assert_eq!(phdae_system_state_dim(ptr::null(), &mut dim), PhdaeStatus::NullPointer);

        let (_, piezo) = build("piezo", 8);
        let mut z = vec![0.0; 3];
        assert_eq!(phdae_system_initial_state(piezo, z.as_mut_ptr(), 3), PhdaeStatus::DimensionMismatch);
        let mut summary = PhdaeRunSummary::default();
        assert_eq!(phdae_system_integrate(piezo, ptr::null(), ptr::null_mut(), 0, 1.0, -1.0, &mut summary), PhdaeStatus::InvalidArgument);
        phdae_system_free(piezo);
        phdae_system_free(ptr::null_mut());

        let bad = CString::new("[scenario]\nmodel = wave1d_sl\nn = 8\nt_final = 1\ndt = -1\n").unwrap();
        assert_eq!(phdae_scenario_from_config(bad.as_ptr(), &mut sys), PhdaeStatus::InvalidArgument);
        assert!(last_error().contains("dt must be > 0"));
    }
}

#[test]
fn last_error_truncates() {
    build("nope", 4);
    let full = unsafe { phdae_last_error(ptr::null_mut(), 0) };
    let mut buf = [1 as c_char; 5];
    let n = unsafe { phdae_last_error(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, full);
    assert_eq!(buf[4], 0);
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/phdae.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["phdae_scenario_new", "phdae_system_integrate", "phdae_last_error", "PHDAE_STATUS_UNKNOWN_MODEL", "typedef struct PhdaeSystem PhdaeSystem"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).output() else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
