//! Code-to-code reductions: project the global parities through a map `psi`
//! whose kernel is spanned by the sums of a few cycles in a corner of the
//! grid, then keep the subgrid those cycles avoid.

use serde::Serialize;
use thiserror::Error;

use crate::code::{CodeError, GridCode};
use crate::field::{FieldElement, FieldSpec};
use crate::gridgraph::{Cell, CycleRep, GraphError};
use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("input is not MR: the designated cycle sums are dependent")]
    NotMr,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A linear map `F^h_in -> F^h_out` given by an `h_out x h_in` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionMap {
    pub h_in: usize,
    pub h_out: usize,
    pub matrix: Matrix,
}

impl ProjectionMap {
    /// The map whose rows span the annihilator of `vectors`, so that its kernel
    /// is exactly their span. Fails if the vectors are dependent.
    pub fn annihilating(field: &FieldSpec, h: usize, vectors: &[Vec<FieldElement>]) -> Result<Self, ReductionError> {
        let s = Matrix::from_rows_with_cols(field, vectors, h)?;
        if s.rank() < vectors.len() {
            return Err(ReductionError::NotMr);
        }
        let rows = s.kernel_basis();
        let matrix = Matrix::from_rows_with_cols(field, &rows, h)?;
        let map = ProjectionMap {
            h_in: h,
            h_out: rows.len(),
            matrix,
        };
        map.check(vectors)?;
        Ok(map)
    }

    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.matrix.mul_vec(v).expect("vector has length h_in")
    }

    fn check(&self, kernel: &[Vec<FieldElement>]) -> Result<(), ReductionError> {
        if self.matrix.rank() != self.h_out || self.h_out + kernel.len() != self.h_in {
            return Err(ReductionError::Params("projection has the wrong rank".into()));
        }
        if kernel.iter().any(|v| self.apply(v).iter().any(|x| !x.is_zero())) {
            return Err(ReductionError::Params("projection does not kill the cycle sums".into()));
        }
        Ok(())
    }
}

/// A reduced code with the map and cycles that produced it.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub code: GridCode,
    pub projection: ProjectionMap,
    pub cycles: Vec<CycleRep>,
}

#[derive(Serialize)]
struct Summary<'a> {
    m: usize,
    n: usize,
    h: usize,
    cycles: &'a [CycleRep],
    psi: Vec<Vec<FieldElement>>,
}

impl Reduction {
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(Summary {
            m: self.code.m(),
            n: self.code.n(),
            h: self.code.h(),
            cycles: &self.cycles,
            psi: self.projection.matrix.to_rows(),
        })
        .expect("summary serializes")
    }
}

fn project(code: &GridCode, cycles: Vec<CycleRep>, m_out: usize, n_out: usize) -> Result<Reduction, ReductionError> {
    let sums: Vec<_> = cycles.iter().map(|c| code.cycle_sum(c)).collect();
    let psi = ProjectionMap::annihilating(code.field(), code.h(), &sums)?;
    let out = GridCode::from_fn(m_out, n_out, psi.h_out, code.field().clone(), |c| psi.apply(code.gp(c)))?;
    Ok(Reduction {
        code: out,
        projection: psi,
        cycles,
    })
}

/// MR `(m, n, h)` to MR `(m - 2, n - h + h' - 1, h')`: the four-cycles on the
/// last two rows through column `c0 = n - h + h'` and each column after it
/// are projected away (1-based indices).
pub fn reduce_monotone(code: &GridCode, h_prime: usize) -> Result<Reduction, ReductionError> {
    let (m, n, h) = (code.m(), code.n(), code.h());
    if h_prime == 0 || h_prime > h {
        return Err(ReductionError::Params(format!("need 1 <= h' <= h = {h}, got {h_prime}")));
    }
    if m < 3 || n < h - h_prime + 2 {
        return Err(ReductionError::Params(format!(
            "need m >= 3 and n >= h - h' + 2, got m = {m}, n = {n}"
        )));
    }
    // 0-based column of c0
    let c0 = n - h + h_prime - 1;
    let cycles = (1..=h - h_prime)
        .map(|l| CycleRep::new(vec![m - 2, m - 1], vec![c0 + l, c0]))
        .collect::<Result<Vec<_>, _>>()?;
    project(code, cycles, m - 2, c0)
}

/// MR `(m, n, h)` to MR `(m - h1, n - h2, h')`: the cycles are closed inside
/// the bottom-right `h1 x h2` box by a double-star tree (the box's first row
/// and first column) and the first `h - h'` remaining box cells.
pub fn reduce_box(code: &GridCode, h_prime: usize, h1: usize, h2: usize) -> Result<Reduction, ReductionError> {
    let (m, n, h) = (code.m(), code.n(), code.h());
    if h_prime == 0 || h_prime > h {
        return Err(ReductionError::Params(format!("need 1 <= h' <= h = {h}, got {h_prime}")));
    }
    if h1 == 0 || h2 == 0 || m <= h1 || n <= h2 {
        return Err(ReductionError::Params(format!(
            "need 1 <= h1 < m and 1 <= h2 < n, got h1 = {h1}, h2 = {h2}"
        )));
    }
    if (h1 - 1) * (h2 - 1) < h - h_prime {
        return Err(ReductionError::Params(format!(
            "box {h1}x{h2} has {} non-tree cells, need h - h' = {}",
            (h1 - 1) * (h2 - 1),
            h - h_prime
        )));
    }
    let (i0, j0) = (m - h1, n - h2);
    let extras: Vec<Cell> = (i0 + 1..m)
        .flat_map(|i| (j0 + 1..n).map(move |j| Cell::new(i, j)))
        .take(h - h_prime)
        .collect();
    let cycles = extras
        .iter()
        .map(|e| CycleRep::new(vec![e.row, i0], vec![e.col, j0]))
        .collect::<Result<Vec<_>, _>>()?;
    project(code, cycles, i0, j0)
}
