//! Codewords, erasures and erasure recovery by a dense solve on `H|_E`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{GridCode, FORMAT_VERSION};
use crate::field::{FieldElement, FieldError};
use crate::gridgraph::Pattern;
use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("word has {got} symbols, code has {expected} cells")]
    Length { expected: usize, got: usize },
    #[error("erasure pattern is not correctable: rank {rank} < {erased} erased symbols")]
    NotCorrectable { rank: usize, erased: usize },
    #[error("known symbols are not the restriction of any codeword")]
    Inconsistent,
    #[error("unsupported format version {0}")]
    Format(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("malformed word file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Symbols in cell order: position `n*i + j` holds cell `(i, j)` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub symbols: Vec<FieldElement>,
}

/// A word with some symbols erased (`None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialWord {
    pub symbols: Vec<Option<FieldElement>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub symbols: Vec<Option<u64>>,
}

fn default_format() -> u32 {
    FORMAT_VERSION
}

impl PartialWord {
    /// Positions of the erased symbols, as a pattern on the code's grid.
    pub fn erased(&self, m: usize, n: usize) -> Pattern {
        Pattern::new(
            m,
            n,
            self.symbols
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_none())
                .map(|(k, _)| crate::gridgraph::Cell::new(k / n, k % n)),
        )
        .expect("word length is m * n")
    }

    pub fn to_file(&self) -> WordFile {
        WordFile {
            format: FORMAT_VERSION,
            symbols: self.symbols.iter().map(|s| s.map(|x| x.0)).collect(),
        }
    }

    pub fn from_file(file: &WordFile) -> Result<PartialWord, DecodeError> {
        if file.format != FORMAT_VERSION {
            return Err(DecodeError::Format(file.format));
        }
        Ok(PartialWord {
            symbols: file.symbols.iter().map(|s| s.map(FieldElement)).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("word serializes")
    }

    pub fn from_json(s: &str) -> Result<PartialWord, DecodeError> {
        PartialWord::from_file(&serde_json::from_str(s)?)
    }
}

impl Codeword {
    pub fn to_partial(&self) -> PartialWord {
        PartialWord {
            symbols: self.symbols.iter().map(|&s| Some(s)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        self.to_partial().to_json()
    }
}

/// A codeword drawn uniformly from the code, deterministic in `seed`.
pub fn random_codeword(code: &GridCode, seed: u64) -> Codeword {
    let f = code.field();
    let basis = code.parity_matrix().kernel_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symbols = vec![f.zero(); code.m() * code.n()];
    for b in &basis {
        let c = FieldElement(rng.random_range(0..f.q()));
        for (s, &v) in symbols.iter_mut().zip(b) {
            *s = f.add(*s, f.mul(c, v));
        }
    }
    Codeword { symbols }
}

/// Dimension of the code, `mn - rank H`.
pub fn dimension(code: &GridCode) -> usize {
    code.m() * code.n() - code.parity_matrix().rank()
}

/// Replaces the symbols on `pattern` by erasures.
pub fn erase(word: &Codeword, pattern: &Pattern) -> PartialWord {
    let n = pattern.n();
    let mut symbols: Vec<Option<FieldElement>> = word.symbols.iter().map(|&s| Some(s)).collect();
    for c in pattern.cells() {
        symbols[c.row * n + c.col] = None;
    }
    PartialWord { symbols }
}

/// Fills the erasures by solving `H|_E x = -H|_known * known`.
pub fn recover(code: &GridCode, word: &PartialWord) -> Result<Codeword, DecodeError> {
    let f = code.field();
    let cells = code.m() * code.n();
    if word.symbols.len() != cells {
        return Err(DecodeError::Length {
            expected: cells,
            got: word.symbols.len(),
        });
    }
    let h_mat = code.parity_matrix();
    let mut erased = Vec::new();
    let mut rhs = vec![f.zero(); h_mat.rows()];
    for (k, s) in word.symbols.iter().enumerate() {
        match s {
            None => erased.push(k),
            Some(v) => {
                f.element(v.0)?;
                for (r, slot) in rhs.iter_mut().enumerate() {
                    *slot = f.sub(*slot, f.mul(h_mat.get(r, k), *v));
                }
            }
        }
    }
    let sub: Matrix = h_mat.select_columns(&erased);
    let rank = sub.rank();
    if rank < erased.len() {
        return Err(DecodeError::NotCorrectable {
            rank,
            erased: erased.len(),
        });
    }
    let x = match sub.solve(&rhs) {
        Ok(s) => s.x,
        Err(MatrixError::Inconsistent) => return Err(DecodeError::Inconsistent),
        Err(e) => unreachable!("dimensions match: {e}"),
    };
    let mut symbols: Vec<FieldElement> = word.symbols.iter().map(|s| s.unwrap_or(FieldElement::ZERO)).collect();
    for (&k, v) in erased.iter().zip(x) {
        symbols[k] = v;
    }
    Ok(Codeword { symbols })
}
