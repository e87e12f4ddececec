use std::path::PathBuf;
use std::process::Command;

fn phdae() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phdae"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_sbp_exits_zero() {
    let out = phdae().args(["verify", "--suite", "sbp"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 4, "{text}");
}

#[test]
fn run_writes_trajectory_with_fixed_header() {
    let (cfg, csv) = (scratch("string.ini"), scratch("string.csv"));
    std::fs::write(
        &cfg,
        format!(
            "# closed string\n[scenario]\nmodel = wave1d\nrepresentation = sd\nn = 32\nt_final = 0.2\ndt = 0.01\nrecord_every = 5\n\n[output]\npath = {}\n",
            csv.display()
        ),
    )
    .unwrap();
    let out = phdae().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,t,H,supplied_power,dissipated_power,balance_residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1][0], 5.0);
    let h0 = rows[0][2];
    assert!(rows.iter().all(|r| (r[2] - h0).abs() <= 1e-12 * h0));
}

#[test]
fn bad_config_exits_two() {
    let cfg = scratch("bad.ini");
    std::fs::write(&cfg, "[scenario]\nmodel = wave1d_sl\nn = 8\nt_final = 1\ndt = -1\n").unwrap();
    let out = phdae().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt must be > 0"));
}

#[test]
fn bench_writes_fixed_header_to_stdout() {
    let out = phdae().args(["bench", "kernel", "--sizes", "17,33,65", "--repeats", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,assembly_dense_s,solve_dense_s,assembly_sparse_s,solve_sparse_s,nnz_dense,nnz_sparse,max_rel_diff_sigma");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("65,"));
}
