//! Kernel matrix entries against a semi-analytic reference: the inner
//! integral over x' is done in closed form per element, the outer one with
//! a 64-panel composite 8-point Gauss rule.

use phdae::discrete_ops::{assemble_kernel_matrix, Grid1D};
use phdae::numerics::quadrature::gauss_legendre;

/// `∫_{t1}^{t2} e^{-t/s} (a + c t) dt`
fn exp_linear(t1: f64, t2: f64, a: f64, c: f64, s: f64) -> f64 {
    let (e1, e2) = ((-t1 / s).exp(), (-t2 / s).exp());
    let i0 = s * (e1 - e2);
    let i1 = s * (t1 * e1 - t2 * e2) + s * s * (e1 - e2);
    a * i0 + c * i1
}

/// `∫_l^r e^{-|x-y|/s}/(2s) (c0 + c1 y) dy`
fn inner(x: f64, l: f64, r: f64, c0: f64, c1: f64, s: f64) -> f64 {
    let f = |y: f64| c0 + c1 * y;
    let mut v = 0.0;
    if l < x {
        let q = r.min(x);
        // y = x - t
        v += exp_linear(x - q, x - l, f(x), -c1, s);
    }
    if r > x {
        let p = l.max(x);
        // y = x + t
        v += exp_linear(p - x, r - x, f(x), c1, s);
    }
    v / (2.0 * s)
}

fn hat(grid: &Grid1D, i: usize, x: f64) -> f64 {
    let h = grid.h();
    (1.0 - ((x - grid.node(i)) / h).abs()).max(0.0)
}

/// Pieces `(l, r, c0, c1)` of hat `j` on its support.
fn hat_pieces(grid: &Grid1D, j: usize) -> Vec<(f64, f64, f64, f64)> {
    let h = grid.h();
    let xj = grid.node(j);
    let mut out = Vec::new();
    if j > 0 {
        out.push((xj - h, xj, 1.0 - xj / h, 1.0 / h));
    }
    if j < grid.n_cells {
        out.push((xj, xj + h, 1.0 + xj / h, -1.0 / h));
    }
    out
}

fn reference_entry(grid: &Grid1D, mu: f64, e: f64, i: usize, j: usize) -> f64 {
    let s = mu.sqrt();
    let (t, w) = gauss_legendre(8);
    let pieces = hat_pieces(grid, j);
    let h = grid.h();
    let mut total = 0.0;
    for (lo, hi) in [(i as f64 - 1.0, i as f64), (i as f64, i as f64 + 1.0)] {
        if lo < 0.0 || hi > grid.n_cells as f64 {
            continue;
        }
        let (a, b) = (grid.a + lo * h, grid.a + hi * h);
        let panels = 64;
        let ph = (b - a) / panels as f64;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * ph;
            for q in 0..8 {
                let x = mid + 0.5 * ph * t[q];
                let inner_sum: f64 = pieces.iter().map(|&(l, r, c0, c1)| inner(x, l, r, c0, c1, s)).sum();
                total += 0.5 * ph * w[q] * hat(grid, i, x) * inner_sum;
            }
        }
    }
    e * total
}

#[test]
fn entries_match_semi_analytic_reference() {
    let grid = Grid1D::unit(4).unwrap();
    let k = assemble_kernel_matrix(&grid, 0.01, 1.0).unwrap();
    for (i, j) in [(0, 0), (1, 2), (2, 2), (0, 4), (3, 1)] {
        let r = reference_entry(&grid, 0.01, 1.0, i, j);
        assert!((k[(i, j)] - r).abs() <= 1e-8 * r.abs().max(1e-300), "entry ({i},{j}): {} vs {r}", k[(i, j)]);
    }
}

#[test]
fn frozen_reference_values() {
    let grid = Grid1D::unit(4).unwrap();
    let k = assemble_kernel_matrix(&grid, 0.01, 1.0).unwrap();
    for (i, j, frozen) in [(2, 2, 1.295210339067225e-1), (1, 2, 5.405223696059543e-2), (0, 4, 2.738004438112858e-5)] {
        assert!((reference_entry(&grid, 0.01, 1.0, i, j) - frozen).abs() <= 1e-14 * frozen);
        assert!((k[(i, j)] - frozen).abs() <= 1e-8 * frozen);
    }
}

#[test]
fn symmetric_nonnegative_and_decaying() {
    let grid = Grid1D::unit(64).unwrap();
    let mu = 1e-4;
    let k = assemble_kernel_matrix(&grid, mu, 2.0).unwrap();
    assert!(k.symmetry_defect() <= 1e-12 * k.max_abs());
    let n = grid.n_nodes();
    let max = k.max_abs();
    for i in 0..n {
        for j in 0..n {
            assert!(k[(i, j)] >= 0.0);
            if (grid.node(i) - grid.node(j)).abs() >= 20.0 * mu.sqrt() + 2.0 * grid.h() {
                assert!(k[(i, j)] <= 1e-8 * max);
            }
        }
    }
}
