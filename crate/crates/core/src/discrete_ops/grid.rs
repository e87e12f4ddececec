use crate::error::{Error, Result};

/// Uniform partition of `[a, b]` into `n_cells` elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    pub n_cells: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 cells, got {n_cells}")));
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidGrid(format!("interval [{a}, {b}] is empty")));
        }
        Ok(Self { a, b, n_cells })
    }

    pub fn unit(n_cells: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n_cells)
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n_cells as f64
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.n_cells).map(|e| self.a + (e as f64 + 0.5) * self.h()).collect()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (1..self.n_cells).collect()
    }
}

/// Staggered rectangle grid with `nx × ny` cells.
///
/// Unknowns live on nodes, on x-edges (between `(i,j)` and `(i+1,j)`), on
/// y-edges (between `(i,j)` and `(i,j+1)`) and on cells. Edge vectors are
/// stored as `[x-edge block; y-edge block]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StaggeredGrid2D {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl StaggeredGrid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2x2 cells, got {nx}x{ny}")));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::InvalidGrid(format!("side lengths must be positive, got {lx}x{ly}")));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0, 1.0)
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn n_xedges(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    pub fn n_yedges(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn n_edges(&self) -> usize {
        self.n_xedges() + self.n_yedges()
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn xedge(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn yedge(&self, i: usize, j: usize) -> usize {
        self.n_xedges() + j * (self.nx + 1) + i
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn node_xy(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k % (self.nx + 1), k / (self.nx + 1));
        (i as f64 * self.hx(), j as f64 * self.hy())
    }

    pub fn node_on_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&k| self.is_boundary_node(k)).collect()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&k| !self.is_boundary_node(k)).collect()
    }

    pub fn is_boundary_node(&self, k: usize) -> bool {
        self.node_on_boundary(k % (self.nx + 1), k / (self.nx + 1))
    }

    /// Endpoints of edge `e` as node indices.
    pub fn edge_nodes(&self, e: usize) -> (usize, usize) {
        if e < self.n_xedges() {
            let (i, j) = (e % self.nx, e / self.nx);
            (self.node(i, j), self.node(i + 1, j))
        } else {
            let k = e - self.n_xedges();
            let (i, j) = (k % (self.nx + 1), k / (self.nx + 1));
            (self.node(i, j), self.node(i, j + 1))
        }
    }

    /// Edges with at least one endpoint on the boundary.
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        let (a, b) = self.edge_nodes(e);
        self.is_boundary_node(a) || self.is_boundary_node(b)
    }

    /// Edges lying on the boundary (both endpoints on the same side).
    pub fn is_tangential_boundary_edge(&self, e: usize) -> bool {
        if e < self.n_xedges() {
            let j = e / self.nx;
            j == 0 || j == self.ny
        } else {
            let i = (e - self.n_xedges()) % (self.nx + 1);
            i == 0 || i == self.nx
        }
    }

    pub fn interior_edges(&self) -> Vec<usize> {
        (0..self.n_edges()).filter(|&e| !self.is_tangential_boundary_edge(e)).collect()
    }

    /// Midpoint of edge `e`.
    pub fn edge_xy(&self, e: usize) -> (f64, f64) {
        let (a, b) = self.edge_nodes(e);
        let (pa, pb) = (self.node_xy(a), self.node_xy(b));
        (0.5 * (pa.0 + pb.0), 0.5 * (pa.1 + pb.1))
    }
}
