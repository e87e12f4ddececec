use proptest::prelude::*;

use phdae::bench_cli::{fit_loglog_slope, BenchRow};
use phdae::discrete_ops::{assemble_kernel_matrix, sbp_gradient_1d, sbp_operators_2d, Grid1D, Profile, StaggeredGrid2D};
use phdae::numerics::integrate;
use phdae::phcore::{check_structure, gradient_check, power_balance, transposition_check};
use phdae::plates::{build_rm_sd, build_rm_sl, PlateBoundary, PlateDiscretization, PlateMaterial};
use phdae::wave1d::{build_wave_sd, build_wave_sl, build_wave_transposition, wave_1d_initial_sl, MassMode, WaveMaterial};

fn vec_of(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sbp_1d_identity(n in 2usize..60, a in -3.0..3.0f64, len in 0.1..5.0f64, seed in any::<u64>()) {
        let pair = sbp_gradient_1d(&Grid1D::new(a, a + len, n).unwrap()).unwrap();
        let (nv, nu) = pair.forward.shape();
        let probes = phdae::phcore::random_probes(nu.max(nv), 2, seed);
        prop_assert!(pair.identity_residual(&probes[0][..nu], &probes[1][..nv]) <= 1e-13);
    }

    #[test]
    fn sbp_2d_identities(nx in 2usize..12, ny in 2usize..12, lx in 0.2..3.0f64, ly in 0.2..3.0f64, seed in any::<u64>()) {
        let ops = sbp_operators_2d(&StaggeredGrid2D::new(nx, ny, lx, ly).unwrap()).unwrap();
        for pair in [&ops.grad, &ops.gradperp, &ops.symgrad] {
            let (nv, nu) = pair.forward.shape();
            let probes = phdae::phcore::random_probes(nu.max(nv), 2, seed);
            prop_assert!(pair.identity_residual(&probes[0][..nu], &probes[1][..nv]) <= 1e-13);
        }
        prop_assert_eq!(ops.flux_div.matmul(&ops.gradperp.forward).max_abs(), 0.0);
    }

    #[test]
    fn closed_wave_conserves_energy(n in 4usize..40, rho in 0.2..5.0f64, e in 0.2..5.0f64, dt in 1e-3..5e-2f64) {
        let grid = Grid1D::unit(n).unwrap();
        let mat = WaveMaterial { rho: rho.into(), e: Profile::varying(move |x, _| e * (1.0 + 0.5 * x)), mu: 0.0 };
        let sl = build_wave_sl(&grid, &mat, MassMode::Consistent).unwrap();
        let traj = integrate(&sl, &wave_1d_initial_sl(&grid), None, 40.0 * dt, dt, 1).unwrap();
        prop_assert!(traj.max_relative_energy_drift() <= 1e-10);
    }

    #[test]
    fn wave_representations_are_equivalent(n in 3usize..40, rho in 0.2..5.0f64, e in 0.2..5.0f64) {
        let grid = Grid1D::unit(n).unwrap();
        let mat = WaveMaterial::uniform(rho, e);
        let (g, gdag) = build_wave_transposition(&grid).unwrap();
        let sd = build_wave_sd(&grid, &mat, MassMode::Lumped).unwrap();
        let sl = build_wave_sl(&grid, &mat, MassMode::Lumped).unwrap();
        let rep = transposition_check(&g, &gdag, &sd, &sl, &phdae::phcore::random_probes(sl.dim(), 3, n as u64)).unwrap();
        prop_assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn plate_structure_and_gradient(n in 3usize..8, thickness in 0.02..0.5f64, clamped in any::<bool>()) {
        let grid = StaggeredGrid2D::unit_square(n).unwrap();
        let mat = PlateMaterial { thickness, ..PlateMaterial::default() };
        let bc = if clamped { PlateBoundary::Clamped } else { PlateBoundary::Free };
        let sd = build_rm_sd(&grid, &mat, bc).unwrap();
        let sl = build_rm_sl(&grid, &mat, bc).unwrap();
        prop_assert!(check_structure(&sd).pass && check_structure(&sl).pass);
        prop_assert!(gradient_check(&sl, 3, 1e-5, n as u64).unwrap() <= 1e-7);
        let (g, gdag) = PlateDiscretization::new(&grid, bc).unwrap().transposition().unwrap();
        prop_assert!(transposition_check(&g, &gdag, &sd, &sl, &phdae::phcore::random_probes(sl.dim(), 2, 3)).unwrap().pass);
    }

    #[test]
    fn forced_wave_power_balance(n in 4usize..30, amp in 0.01..2.0f64, w in 0.5..20.0f64) {
        let grid = Grid1D::unit(n).unwrap();
        let sd = build_wave_sd(&grid, &WaveMaterial::uniform(1.0, 1.0), MassMode::Lumped).unwrap();
        let (g, _) = build_wave_transposition(&grid).unwrap();
        let u = move |t: f64| vec![amp * (w * t).sin(), amp * (w * t).cos()];
        let traj = integrate(&sd, &g.matvec(&wave_1d_initial_sl(&grid)), Some(&u), 0.2, 1e-2, 1).unwrap();
        prop_assert!(power_balance(&traj, &sd).unwrap().max_scaled_residual <= 1e-12);
    }

    #[test]
    fn kernel_matrix_is_symmetric(n in 2usize..24, mu in 1e-4..0.1f64) {
        let k = assemble_kernel_matrix(&Grid1D::unit(n).unwrap(), mu, 1.0).unwrap();
        prop_assert!(k.symmetry_defect() <= 1e-12 * k.max_abs());
    }

    #[test]
    fn loglog_slope_recovers_exponent(p in 0.5..3.0f64, c in 1e-6..1e3f64) {
        let rows: Vec<BenchRow> = [50usize, 100, 400, 900]
            .into_iter()
            .map(|n| BenchRow {
                n,
                assembly_dense_s: c * (n as f64).powf(p),
                solve_dense_s: 0.0,
                assembly_sparse_s: 0.0,
                solve_sparse_s: 0.0,
                nnz_dense: n * n,
                nnz_sparse: n,
                max_rel_diff_sigma: 0.0,
            })
            .collect();
        prop_assert!((fit_loglog_slope(&rows, "assembly_dense_s").unwrap() - p).abs() < 1e-10);
    }

    #[test]
    fn hamiltonian_is_half_quadratic_form(z in vec_of(18)) {
        let grid = Grid1D::unit(8).unwrap();
        let sl = build_wave_sl(&grid, &WaveMaterial::uniform(2.0, 3.0), MassMode::Lumped).unwrap();
        let qz = sl.q.matvec(&z);
        let direct: f64 = 0.5 * z.iter().zip(&qz).map(|(a, b)| a * b).sum::<f64>();
        prop_assert!((sl.hamiltonian(&z) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }
}
