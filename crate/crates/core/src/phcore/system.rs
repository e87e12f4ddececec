use std::ops::Range;

use crate::error::{Error, Result};
use crate::numerics::{SparseLu, SparseMatrix};

/// How an input column exchanges power with the environment.
#[derive(Clone, Debug, PartialEq)]
pub enum PortKind {
    /// Power port: supplied power is `eᵀ b u`.
    Power,
    /// Energy port: the input is an imposed effort `ε` paired with the rate of
    /// the trace `χ = trace_gamma[trace_row] z`; power is `ε · dχ/dt`.
    Energy { trace_row: usize },
}

/// Which of the two dual forms a system is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Energy in strain-like variables; differential operators in `J`.
    StokesDirac,
    /// Energy in displacement-like variables; differential operators in `Q`.
    StokesLagrange,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateBlock {
    pub label: String,
    pub range: Range<usize>,
}

fn consecutive(blocks: &[(&str, usize)]) -> (Vec<StateBlock>, usize) {
    let mut start = 0;
    let out = blocks
        .iter()
        .map(|&(l, len)| {
            let b = StateBlock { label: l.to_string(), range: start..start + len };
            start += len;
            b
        })
        .collect();
    (out, start)
}

/// Linear descriptor pH system
///
/// ```text
/// M ż = (J - R) e + B u,    M e = Q z + Cᵀ λ,    C z = 0
/// ```
///
/// with `H(z) = ½ zᵀ Q z`. Without a constraint the multiplier is absent and
/// `e = M⁻¹ Q z`. With one, the efforts carry the constraint forces `Cᵀλ`.
#[derive(Clone, Debug)]
pub struct DescriptorPHSystem {
    pub name: String,
    pub mass: SparseMatrix,
    pub j: SparseMatrix,
    pub r: SparseMatrix,
    pub q: SparseMatrix,
    pub b: SparseMatrix,
    pub ports: Vec<PortKind>,
    /// Dirichlet-type boundary traces `χ = Γ z`, one row per boundary dof.
    pub trace_gamma: SparseMatrix,
    /// Neumann-type traces `Β z` paired with `trace_gamma` row by row.
    pub trace_beta: SparseMatrix,
    pub constraint: Option<SparseMatrix>,
    pub blocks: Vec<StateBlock>,
    /// Labelled groups of input columns.
    pub input_blocks: Vec<StateBlock>,
}

impl DescriptorPHSystem {
    /// Closed system without inputs, traces or constraints.
    pub fn new(name: impl Into<String>, mass: SparseMatrix, j: SparseMatrix, r: SparseMatrix, q: SparseMatrix) -> Result<Self> {
        let n = mass.nrows();
        let sys = Self {
            name: name.into(),
            mass,
            j,
            r,
            q,
            b: SparseMatrix::zeros(n, 0),
            ports: Vec::new(),
            trace_gamma: SparseMatrix::zeros(0, n),
            trace_beta: SparseMatrix::zeros(0, n),
            constraint: None,
            blocks: vec![StateBlock { label: "z".into(), range: 0..n }],
            input_blocks: Vec::new(),
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_inputs(mut self, b: SparseMatrix, ports: Vec<PortKind>) -> Result<Self> {
        self.input_blocks = vec![StateBlock { label: "u".into(), range: 0..b.ncols() }];
        self.b = b;
        self.ports = ports;
        self.validate()?;
        Ok(self)
    }

    pub fn with_traces(mut self, gamma: SparseMatrix, beta: SparseMatrix) -> Result<Self> {
        self.trace_gamma = gamma;
        self.trace_beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_constraint(mut self, c: SparseMatrix) -> Result<Self> {
        self.constraint = Some(c);
        self.validate()?;
        Ok(self)
    }

    pub fn with_blocks(mut self, blocks: &[(&str, usize)]) -> Result<Self> {
        let (blocks, end) = consecutive(blocks);
        if end != self.dim() {
            return Err(Error::DimensionMismatch(format!("blocks cover {end} of {} states", self.dim())));
        }
        self.blocks = blocks;
        Ok(self)
    }

    pub fn with_input_blocks(mut self, blocks: &[(&str, usize)]) -> Result<Self> {
        let (blocks, end) = consecutive(blocks);
        if end != self.n_inputs() {
            return Err(Error::DimensionMismatch(format!("input blocks cover {end} of {} columns", self.n_inputs())));
        }
        self.input_blocks = blocks;
        Ok(self)
    }

    pub fn input_block(&self, label: &str) -> Option<Range<usize>> {
        self.input_blocks.iter().find(|b| b.label == label).map(|b| b.range.clone())
    }

    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    pub fn n_inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn block(&self, label: &str) -> Option<Range<usize>> {
        self.blocks.iter().find(|b| b.label == label).map(|b| b.range.clone())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let sq = |m: &SparseMatrix, what: &str| {
            if m.shape() != (n, n) {
                Err(Error::DimensionMismatch(format!("{what} is {:?}, expected {n}x{n}", m.shape())))
            } else {
                Ok(())
            }
        };
        sq(&self.mass, "M")?;
        sq(&self.j, "J")?;
        sq(&self.r, "R")?;
        sq(&self.q, "Q")?;
        if self.b.nrows() != n || self.ports.len() != self.b.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "B is {:?} with {} port kinds",
                self.b.shape(),
                self.ports.len()
            )));
        }
        if self.trace_gamma.ncols() != n
            || self.trace_beta.ncols() != n
            || self.trace_gamma.nrows() != self.trace_beta.nrows()
        {
            return Err(Error::DimensionMismatch("trace operators".into()));
        }
        for p in &self.ports {
            if let PortKind::Energy { trace_row } = p {
                if *trace_row >= self.trace_gamma.nrows() {
                    return Err(Error::TraceUnavailable(format!("energy port needs trace row {trace_row}")));
                }
            }
        }
        if let Some(c) = &self.constraint {
            if c.ncols() != n {
                return Err(Error::DimensionMismatch(format!("C has {} columns, expected {n}", c.ncols())));
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self, z: &[f64]) -> f64 {
        0.5 * self.q.quad_form(z)
    }

    /// `M⁻¹ Q z`. For constrained systems this omits the multiplier term.
    pub fn effort(&self, z: &[f64]) -> Result<Vec<f64>> {
        let qz = self.q.matvec(z);
        if self.mass.is_diagonal() {
            Ok(qz.iter().zip(self.mass.diagonal()).map(|(a, m)| a / m).collect())
        } else {
            let (x, _, _) = SparseLu::factor(&self.mass)?.solve(&qz);
            Ok(x)
        }
    }

    pub fn has_traces(&self) -> bool {
        self.trace_gamma.nrows() > 0
    }
}
