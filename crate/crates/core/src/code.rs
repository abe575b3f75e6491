//! Grid codes: global parity vectors, the parity-check matrix and cycle sums.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, FieldError, FieldSpec};
use crate::gridgraph::{Cell, CycleRep, GraphError, Pattern};
use crate::matrix::Matrix;

/// Version tag written into every JSON artifact.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("grid dimensions must be positive, got {m}x{n}")]
    EmptyGrid { m: usize, n: usize },
    #[error("expected {expected} parity entries, got {got}")]
    ParityLength { expected: usize, got: usize },
    #[error("unsupported format version {0}")]
    Format(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("malformed code file: {0}")]
    Json(#[from] serde_json::Error),
}

/// An `(m, n, a=1, b=1, h)` grid code: one parity check per row and column
/// plus `h` global checks whose coefficients at cell `(i, j)` form the vector
/// `gp(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCode {
    m: usize,
    n: usize,
    h: usize,
    field: FieldSpec,
    // row-major over cells, h entries per cell
    gp: Vec<FieldElement>,
}

impl GridCode {
    pub fn new(
        m: usize,
        n: usize,
        h: usize,
        field: FieldSpec,
        gp: Vec<FieldElement>,
    ) -> Result<GridCode, CodeError> {
        if m == 0 || n == 0 {
            return Err(CodeError::EmptyGrid { m, n });
        }
        if gp.len() != m * n * h {
            return Err(CodeError::ParityLength {
                expected: m * n * h,
                got: gp.len(),
            });
        }
        for &v in &gp {
            field.element(v.0)?;
        }
        Ok(GridCode { m, n, h, field, gp })
    }

    /// Builds a code from a function of the cell.
    pub fn from_fn(
        m: usize,
        n: usize,
        h: usize,
        field: FieldSpec,
        mut f: impl FnMut(Cell) -> Vec<FieldElement>,
    ) -> Result<GridCode, CodeError> {
        let mut gp = Vec::with_capacity(m * n * h);
        for cell in crate::gridgraph::all_cells(m, n) {
            let v = f(cell);
            if v.len() != h {
                return Err(CodeError::ParityLength {
                    expected: h,
                    got: v.len(),
                });
            }
            gp.extend(v);
        }
        GridCode::new(m, n, h, field, gp)
    }

    pub fn zero(m: usize, n: usize, h: usize, field: FieldSpec) -> Result<GridCode, CodeError> {
        GridCode::new(m, n, h, field, vec![FieldElement::ZERO; m * n * h])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Parity vector of a cell.
    pub fn gp(&self, cell: Cell) -> &[FieldElement] {
        let base = (cell.row * self.n + cell.col) * self.h;
        &self.gp[base..base + self.h]
    }

    pub fn set_gp(&mut self, cell: Cell, v: &[FieldElement]) -> Result<(), CodeError> {
        if v.len() != self.h {
            return Err(CodeError::ParityLength {
                expected: self.h,
                got: v.len(),
            });
        }
        for &x in v {
            self.field.element(x.0)?;
        }
        let base = (cell.row * self.n + cell.col) * self.h;
        self.gp[base..base + self.h].copy_from_slice(v);
        Ok(())
    }

    /// Column of `H` holding cell `(i, j)`: `n*i + j` (0-based).
    pub fn column_of(&self, cell: Cell) -> usize {
        cell.row * self.n + cell.col
    }

    pub fn cell_of_column(&self, column: usize) -> Cell {
        Cell::new(column / self.n, column % self.n)
    }

    /// Number of rows of the parity-check matrix, `m + n + h - 1`.
    pub fn check_count(&self) -> usize {
        self.m + self.n + self.h - 1
    }

    /// The `(m + n + h - 1) x mn` parity-check matrix: `m` row checks, column
    /// checks for the first `n - 1` columns (the last one is implied), then the
    /// `h` global checks.
    pub fn parity_matrix(&self) -> Matrix {
        let (m, n) = (self.m, self.n);
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.check_count(), m * n);
        for i in 0..m {
            for j in 0..n {
                let col = i * n + j;
                out.set(i, col, f.one());
                if j + 1 < n {
                    out.set(m + j, col, f.one());
                }
                for (k, &v) in self.gp(Cell::new(i, j)).iter().enumerate() {
                    out.set(m + n - 1 + k, col, v);
                }
            }
        }
        out
    }

    /// `sum_t (+/-) gp(cells[t])` with `+` at even offsets.
    pub fn signed_sum(&self, cells: &[Cell]) -> Vec<FieldElement> {
        let f = &self.field;
        let mut acc = vec![f.zero(); self.h];
        for (t, &c) in cells.iter().enumerate() {
            for (slot, &v) in acc.iter_mut().zip(self.gp(c)) {
                *slot = if t % 2 == 0 { f.add(*slot, v) } else { f.sub(*slot, v) };
            }
        }
        acc
    }

    /// The alternating sum of parity vectors around the cycle.
    pub fn cycle_sum(&self, cycle: &CycleRep) -> Vec<FieldElement> {
        self.signed_sum(&cycle.cells())
    }

    /// Cycle sums as the columns of an `h x len` matrix.
    pub fn cycle_sum_matrix(&self, cycles: &[CycleRep]) -> Matrix {
        let sums: Vec<_> = cycles.iter().map(|c| self.cycle_sum(c)).collect();
        Matrix::from_columns(&self.field, &sums, self.h).expect("cycle sums have length h")
    }

    pub fn to_file(&self) -> CodeFile {
        let gp = (0..self.m)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.gp(Cell::new(i, j)).iter().map(|e| e.0).collect())
                    .collect()
            })
            .collect();
        CodeFile {
            format: FORMAT_VERSION,
            p: self.field.p(),
            d: self.field.d(),
            modulus: self.field.modulus().to_vec(),
            m: self.m,
            n: self.n,
            h: self.h,
            gp,
        }
    }

    pub fn from_file(file: &CodeFile) -> Result<GridCode, CodeError> {
        if file.format != FORMAT_VERSION {
            return Err(CodeError::Format(file.format));
        }
        let field = FieldSpec::with_modulus(file.p, &file.modulus)?;
        if field.d() != file.d {
            return Err(FieldError::BadModulus { p: file.p, d: file.d }.into());
        }
        let (m, n, h) = (file.m, file.n, file.h);
        if file.gp.len() != m || file.gp.iter().any(|row| row.len() != n) {
            return Err(CodeError::ParityLength {
                expected: m * n * h,
                got: file.gp.iter().map(|r| r.iter().map(Vec::len).sum::<usize>()).sum(),
            });
        }
        let mut gp = Vec::with_capacity(m * n * h);
        for row in &file.gp {
            for v in row {
                if v.len() != h {
                    return Err(CodeError::ParityLength { expected: h, got: v.len() });
                }
                gp.extend(v.iter().map(|&x| FieldElement(x)));
            }
        }
        GridCode::new(m, n, h, field, gp)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("code file serializes")
    }

    pub fn from_json(s: &str) -> Result<GridCode, CodeError> {
        let file: CodeFile = serde_json::from_str(s)?;
        GridCode::from_file(&file)
    }
}

fn default_format() -> u32 {
    FORMAT_VERSION
}

/// On-disk form of a [`GridCode`]. `gp[i][j][k]` is the encoding of the
/// `k`-th global coefficient at 0-based cell `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub p: u64,
    pub d: u32,
    pub modulus: Vec<u64>,
    pub m: usize,
    pub n: usize,
    pub h: usize,
    pub gp: Vec<Vec<Vec<u64>>>,
}

/// `H|_E`: the columns of `h_mat` indexed by the cells of `pattern`, in sorted
/// cell order.
pub fn restrict(h_mat: &Matrix, pattern: &Pattern) -> Matrix {
    let n = pattern.n();
    let cols: Vec<usize> = pattern.cells().iter().map(|c| c.row * n + c.col).collect();
    h_mat.select_columns(&cols)
}
