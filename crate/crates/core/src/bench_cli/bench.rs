//! Dense kernel versus sparse implicit assembly and solve for the nonlocal rod.

use std::io::Write;
use std::time::Instant;

use crate::discrete_ops::Grid1D;
use crate::error::{Error, Result};
use crate::wave1d::{ExplicitNanorod, ImplicitNanorod, WaveMaterial};

pub const DEFAULT_SIZES: [usize; 7] = [64, 128, 256, 512, 1024, 2048, 4096];
pub const DEFAULT_REPEATS: usize = 5;

pub const BENCH_HEADER: [&str; 8] = [
    "N",
    "assembly_dense_s",
    "solve_dense_s",
    "assembly_sparse_s",
    "solve_sparse_s",
    "nnz_dense",
    "nnz_sparse",
    "max_rel_diff_sigma",
];

/// `μ = 1e-3 (b - a)²`
pub fn default_mu(grid_len: f64) -> f64 {
    1e-3 * grid_len * grid_len
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    /// Number of nodes.
    pub n: usize,
    pub assembly_dense_s: f64,
    pub solve_dense_s: f64,
    pub assembly_sparse_s: f64,
    pub solve_sparse_s: f64,
    pub nnz_dense: usize,
    pub nnz_sparse: usize,
    /// Largest interior `|σ_dense - σ_sparse|` over the largest `|σ_sparse|`.
    pub max_rel_diff_sigma: f64,
}

impl BenchRow {
    pub fn dense_total(&self) -> f64 {
        self.assembly_dense_s + self.solve_dense_s
    }

    pub fn sparse_total(&self) -> f64 {
        self.assembly_sparse_s + self.solve_sparse_s
    }

    pub fn column(&self, name: &str) -> Option<f64> {
        Some(match name {
            "N" => self.n as f64,
            "assembly_dense_s" => self.assembly_dense_s,
            "solve_dense_s" => self.solve_dense_s,
            "assembly_sparse_s" => self.assembly_sparse_s,
            "solve_sparse_s" => self.solve_sparse_s,
            "nnz_dense" => self.nnz_dense as f64,
            "nnz_sparse" => self.nnz_sparse as f64,
            "max_rel_diff_sigma" => self.max_rel_diff_sigma,
            "total_dense_s" => self.dense_total(),
            "total_sparse_s" => self.sparse_total(),
            _ => return None,
        })
    }
}

/// Smooth strain supported in the middle half of `[a, b]`, so the stress is
/// negligible at the ends and both formulations use `σ = 0` there.
pub fn benchmark_strain(grid: &Grid1D) -> Vec<f64> {
    let len = grid.b - grid.a;
    grid.nodes()
        .iter()
        .map(|x| {
            let s = (x - grid.a) / len;
            if (0.25..=0.75).contains(&s) {
                (2.0 * std::f64::consts::PI * (s - 0.25)).sin().powi(2)
            } else {
                0.0
            }
        })
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t0 = Instant::now();
    let out = f()?;
    Ok((out, t0.elapsed().as_secs_f64()))
}

/// Interior relative difference, skipping `margin` nodes at each end.
pub fn interior_relative_difference(a: &[f64], b: &[f64], margin: usize) -> f64 {
    let n = a.len();
    if n <= 2 * margin {
        return 0.0;
    }
    let range = margin..n - margin;
    let diff = range.clone().map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
    let scale = range.map(|i| b[i].abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Times both paths on `[0, 1]` for each node count in `sizes`.
pub fn run_kernel_benchmark(sizes: &[usize], mu: f64, e_modulus: f64, repeats: usize) -> Result<Vec<BenchRow>> {
    if repeats < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 repeats, got {repeats}")));
    }
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] < 3 {
        return Err(Error::InvalidParameter(format!("sizes must be ascending node counts ≥ 3, got {sizes:?}")));
    }
    let mat = WaveMaterial::nonlocal(e_modulus, mu);
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let grid = Grid1D::unit(n - 1)?;
        let eps = benchmark_strain(&grid);
        let mut t = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        let mut last = None;
        for _ in 0..repeats {
            let (dense, ta) = timed(|| ExplicitNanorod::assemble(&grid, &mat))?;
            let ((sd, _), ts) = timed(|| dense.solve(&eps))?;
            let (sparse, tb) = timed(|| ImplicitNanorod::assemble(&grid, &mat))?;
            let ((ss, _), tss) = timed(|| sparse.solve(&eps, [0.0, 0.0]))?;
            for (v, x) in t.iter_mut().zip([ta, ts, tb, tss]) {
                v.push(x);
            }
            last = Some((dense.nnz(), sparse.nnz(), sd, ss));
        }
        let (nnz_dense, nnz_sparse, sd, ss) = last.expect("repeats ≥ 3");
        let [ta, ts, tb, tss] = t;
        rows.push(BenchRow {
            n,
            assembly_dense_s: median(ta),
            solve_dense_s: median(ts),
            assembly_sparse_s: median(tb),
            solve_sparse_s: median(tss),
            nnz_dense,
            nnz_sparse,
            max_rel_diff_sigma: interior_relative_difference(&sd, &ss, n / 8),
        });
    }
    Ok(rows)
}

/// Least-squares slope of `log(column)` against `log(N)`.
pub fn fit_loglog_slope(rows: &[BenchRow], column: &str) -> Result<f64> {
    if rows.len() < 3 {
        return Err(Error::InsufficientData(rows.len()));
    }
    let mut pts = Vec::with_capacity(rows.len());
    for r in rows {
        let y = r.column(column).ok_or_else(|| Error::InvalidParameter(format!("unknown column {column:?}")))?;
        if !(y > 0.0) {
            return Err(Error::InvalidParameter(format!("{column} = {y} at N = {} is not positive", r.n)));
        }
        pts.push(((r.n as f64).ln(), y.ln()));
    }
    Ok(loglog_slope(&pts))
}

fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
    w.write_record(BENCH_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(&[
            r.n.to_string(),
            format!("{:.6e}", r.assembly_dense_s),
            format!("{:.6e}", r.solve_dense_s),
            format!("{:.6e}", r.assembly_sparse_s),
            format!("{:.6e}", r.solve_sparse_s),
            r.nnz_dense.to_string(),
            r.nnz_sparse.to_string(),
            format!("{:.6e}", r.max_rel_diff_sigma),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(())
}
