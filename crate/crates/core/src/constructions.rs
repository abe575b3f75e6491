//! Explicit grid code constructions: the Gabidulin lift, the binary-encoding
//! code for `h = 1`, the two BCH-based codes, the 3-AP-free code for `m = 3`
//! and the `h = 1` bootstrap from a square seed.

use thiserror::Error;

use crate::code::{CodeError, GridCode};
use crate::field::{is_prime, make_field, FieldElement, FieldError, FieldSpec};
use crate::gridgraph::{all_cells, Cell};
use crate::verifier::{is_mr_cycle_criterion, VerifyError, DEFAULT_PAIR_CAP};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("{what} must be a power of two, got {value}")]
    NotPowerOfTwo { what: &'static str, value: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("GF({p}^{d}) has degree below the lift height {h}")]
    LiftDegree { p: u64, d: u32, h: usize },
    #[error("BCH needs {n} distinct nonzero points but GF(2^{s}) has only {}", (1u64 << s) - 1)]
    BchPoints { n: usize, s: u32 },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("greedy 3-AP-free set in GF({q}) stalls at {found} < {n} elements")]
    Ap3Stalled { q: u64, n: usize, found: usize },
    #[error("seed code is not MR")]
    SeedNotMr,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// A scalar label `gamma(i, j)` for every cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaLabeling {
    m: usize,
    n: usize,
    field: FieldSpec,
    gamma: Vec<FieldElement>,
}

impl GammaLabeling {
    pub fn new(m: usize, n: usize, field: FieldSpec, gamma: Vec<FieldElement>) -> Result<Self, ConstructionError> {
        if m == 0 || n == 0 {
            return Err(CodeError::EmptyGrid { m, n }.into());
        }
        if gamma.len() != m * n {
            return Err(CodeError::ParityLength {
                expected: m * n,
                got: gamma.len(),
            }
            .into());
        }
        for &g in &gamma {
            field.element(g.0)?;
        }
        Ok(GammaLabeling { m, n, field, gamma })
    }

    pub fn from_fn(
        m: usize,
        n: usize,
        field: FieldSpec,
        mut f: impl FnMut(Cell) -> FieldElement,
    ) -> Result<Self, ConstructionError> {
        let gamma = all_cells(m, n).map(&mut f).collect();
        GammaLabeling::new(m, n, field, gamma)
    }

    /// Reads the labels of an `h = 1` code.
    pub fn from_code(code: &GridCode) -> Result<Self, ConstructionError> {
        if code.h() != 1 {
            return Err(ConstructionError::Params(format!("expected h = 1, got {}", code.h())));
        }
        GammaLabeling::from_fn(code.m(), code.n(), code.field().clone(), |c| code.gp(c)[0])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn get(&self, cell: Cell) -> FieldElement {
        self.gamma[cell.row * self.n + cell.col]
    }
}

/// `c(i, j) = (g, g^p, ..., g^(p^(h-1)))` with `g = gamma(i, j)`.
pub fn gabidulin_lift(labeling: &GammaLabeling, h: usize) -> Result<GridCode, ConstructionError> {
    let f = labeling.field.clone();
    if (f.d() as usize) < h {
        return Err(ConstructionError::LiftDegree { p: f.p(), d: f.d(), h });
    }
    let code = GridCode::from_fn(labeling.m, labeling.n, h, f.clone(), |c| {
        let g = labeling.get(c);
        (0..h as u64).map(|k| f.frobenius(g, k)).collect()
    })?;
    Ok(code)
}

fn log2_exact(what: &'static str, v: usize) -> Result<u32, ConstructionError> {
    if v == 0 || !v.is_power_of_two() {
        return Err(ConstructionError::NotPowerOfTwo { what, value: v });
    }
    Ok(v.trailing_zeros())
}

/// `log2 q = (m - 1) log2 n` for the binary-encoding code.
pub fn binary_field_bits(m: usize, n: usize) -> Result<u32, ConstructionError> {
    Ok((m as u32 - 1) * log2_exact("n", n)?)
}

/// Binary-encoding code, `h = 1`: row `i < m - 1` carries the bits of the
/// column index in its own block, the last row is zero. Field `GF(n^(m-1))`.
pub fn construct_binary(m: usize, n: usize) -> Result<GridCode, ConstructionError> {
    if m < 2 || n < 2 {
        return Err(ConstructionError::Params(format!("binary code needs m, n >= 2, got {m}x{n}")));
    }
    let b = log2_exact("n", n)?;
    let f = make_field(2, binary_field_bits(m, n)?)?;
    let lab = GammaLabeling::from_fn(m, n, f, |c| {
        if c.row + 1 < m {
            FieldElement((c.col as u64) << (c.row as u32 * b))
        } else {
            FieldElement::ZERO
        }
    })?;
    gabidulin_lift(&lab, 1)
}

/// Parameters of the binary BCH parity-check columns with design distance `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BchSpec {
    pub design_distance: usize,
    pub columns: usize,
    pub s: u32,
    pub t: usize,
    pub d_bits: u32,
}

impl BchSpec {
    pub fn new(design_distance: usize, columns: usize) -> Result<BchSpec, ConstructionError> {
        if design_distance == 0 || columns == 0 {
            return Err(ConstructionError::Params("BCH needs D, N >= 1".into()));
        }
        let s = (columns as u64 + 1).next_power_of_two().trailing_zeros();
        let t = (design_distance - 1).div_ceil(2);
        let d_bits = 1 + t as u32 * s;
        Ok(BchSpec {
            design_distance,
            columns,
            s,
            t,
            d_bits,
        })
    }
}

/// The `N` columns `[1, b^i, b^(3i), ..., b^((2t-1)i)]` for `i = 1..=N`, packed
/// into `1 + t*s` bits (parity bit lowest, then one `s`-bit block per power),
/// where `b` generates `GF(2^s)^*`. Any `D - 1` of them are independent over
/// `GF(2)`.
pub fn bch_columns(spec: &BchSpec) -> Result<Vec<u64>, ConstructionError> {
    if spec.d_bits > 64 {
        return Err(ConstructionError::Params(format!("BCH columns need {} bits", spec.d_bits)));
    }
    let gf = make_field(2, spec.s)?;
    if spec.columns as u64 > gf.q() - 1 {
        return Err(ConstructionError::BchPoints { n: spec.columns, s: spec.s });
    }
    let beta = gf.primitive_element();
    let out = (1..=spec.columns as u64)
        .map(|i| {
            let x = gf.pow(beta, i);
            let mut v = 1u64;
            for r in 0..spec.t as u64 {
                let e = gf.pow(x, 2 * r + 1).0;
                v |= e << (1 + r as u32 * spec.s);
            }
            v
        })
        .collect();
    Ok(out)
}

fn least_power_of_two_above(x: usize) -> u32 {
    (x + 1).next_power_of_two().trailing_zeros()
}

/// `log2 q = 1 + (m + h - 1) log2(2^k n)`, `2^k` the least power of two above `m`.
pub fn bch_simple_field_bits(m: usize, n: usize, h: usize) -> Result<u32, ConstructionError> {
    let k = least_power_of_two_above(m);
    Ok(1 + (m + h - 1) as u32 * (k + log2_exact("n", n)?))
}

/// `log2 q = 1 + (m + h - 2) log2(2^k n)`, `2^k` the least power of two above `m - 1`.
pub fn bch_zero_field_bits(m: usize, n: usize, h: usize) -> Result<u32, ConstructionError> {
    let k = least_power_of_two_above(m - 1);
    Ok(1 + (m + h - 2) as u32 * (k + log2_exact("n", n)?))
}

fn bch_params(m: usize, n: usize, h: usize, min_m: usize) -> Result<(), ConstructionError> {
    log2_exact("n", n)?;
    if m < min_m || h == 0 {
        return Err(ConstructionError::Params(format!(
            "BCH code needs m >= {min_m} and h >= 1, got m = {m}, h = {h}"
        )));
    }
    Ok(())
}

/// Gabidulin lift of BCH columns with `D = 2(m + h - 1) + 1`, one column per cell.
pub fn construct_bch_simple(m: usize, n: usize, h: usize) -> Result<GridCode, ConstructionError> {
    bch_params(m, n, h, 1)?;
    let spec = BchSpec::new(2 * (m + h - 1) + 1, m * n)?;
    let cols = bch_columns(&spec)?;
    let f = make_field(2, spec.d_bits)?;
    let lab = GammaLabeling::from_fn(m, n, f, |c| FieldElement(cols[c.row * n + c.col]))?;
    gabidulin_lift(&lab, h)
}

/// As [`construct_bch_simple`] on the first `m - 1` rows with
/// `D = 2(m + h - 2) + 1`, and the last row labeled zero.
pub fn construct_bch_zero(m: usize, n: usize, h: usize) -> Result<GridCode, ConstructionError> {
    bch_params(m, n, h, 2)?;
    let spec = BchSpec::new(2 * (m + h - 2) + 1, (m - 1) * n)?;
    let cols = bch_columns(&spec)?;
    let f = make_field(2, spec.d_bits)?;
    let lab = GammaLabeling::from_fn(m, n, f, |c| {
        if c.row + 1 < m {
            FieldElement(cols[c.row * n + c.col])
        } else {
            FieldElement::ZERO
        }
    })?;
    gabidulin_lift(&lab, h)
}

fn check_odd_prime(q: u64) -> Result<(), ConstructionError> {
    if q.is_multiple_of(2) || !is_prime(q) {
        return Err(ConstructionError::NotOddPrime(q));
    }
    Ok(())
}

/// Greedy 3-AP-free subset of `Z/q`: residues are taken in ascending order
/// whenever they close no progression `x + y = 2z` with the residues kept so far.
pub fn ap3_free_set(q: u64, n: usize) -> Result<Vec<u64>, ConstructionError> {
    check_odd_prime(q)?;
    let mut set: Vec<u64> = Vec::with_capacity(n);
    for x in 0..q {
        if set.len() == n {
            break;
        }
        let closes = set.iter().enumerate().any(|(a, &y)| {
            set[a + 1..].iter().any(|&z| {
                (x + y) % q == (2 * z) % q || (x + z) % q == (2 * y) % q || (y + z) % q == (2 * x) % q
            })
        });
        if !closes {
            set.push(x);
        }
    }
    if set.len() < n {
        return Err(ConstructionError::Ap3Stalled { q, n, found: set.len() });
    }
    Ok(set)
}

/// The smallest odd prime for which [`ap3_free_set`] reaches `n` elements.
pub fn smallest_ap3_prime(n: usize) -> u64 {
    let mut q = 3;
    loop {
        if is_prime(q) && ap3_free_set(q, n).is_ok() {
            return q;
        }
        q += 2;
    }
}

/// `m = 3`, `h = 1` code over `GF(q)` with `gamma(i, j) = i * a_j` for rows
/// `i = 0, 1, 2` and a 3-AP-free set `a`.
pub fn construct_ap3(n: usize, q: u64) -> Result<GridCode, ConstructionError> {
    let a = ap3_free_set(q, n)?;
    let f = make_field(q, 1)?;
    let lab = GammaLabeling::from_fn(3, n, f, |c| FieldElement((c.row as u64 * a[c.col]) % q))?;
    gabidulin_lift(&lab, 1)
}

/// `log2 q = k + (m0 - 1) log2(n / m0)` for the bootstrap from a seed over `GF(2^k)`.
pub fn bootstrap_field_bits(k: u32, m0: usize, n_target: usize) -> Result<u32, ConstructionError> {
    if n_target < m0 || !n_target.is_multiple_of(m0) {
        return Err(ConstructionError::Params(format!("n = {n_target} is not a multiple of m = {m0}")));
    }
    Ok(k + (m0 as u32 - 1) * log2_exact("n / m", n_target / m0)?)
}

/// Extends an MR `(m0, m0, h = 1)` seed over `GF(2^k)` to `m0 x n_target`.
/// Writing the 0-based column as `j = j' * m0 + j''`, the low `k` bits repeat
/// the seed label at `j''` and block `i` of the remaining bits holds `j'` for
/// every row but the last.
pub fn bootstrap_h1(seed: &GridCode, n_target: usize) -> Result<GridCode, ConstructionError> {
    let m0 = seed.m();
    if seed.n() != m0 || seed.h() != 1 || seed.field().p() != 2 {
        return Err(ConstructionError::Params(
            "seed must be a square h = 1 code over a binary field".into(),
        ));
    }
    log2_exact("m", m0)?;
    log2_exact("n", n_target)?;
    let k = seed.field().d();
    let bits = bootstrap_field_bits(k, m0, n_target)?;
    if !is_mr_cycle_criterion(seed, DEFAULT_PAIR_CAP)?.is_mr {
        return Err(ConstructionError::SeedNotMr);
    }
    let b = bits - k;
    let b_per = if m0 > 1 { b / (m0 as u32 - 1) } else { 0 };
    let f = make_field(2, bits)?;
    let lab = GammaLabeling::from_fn(m0, n_target, f, |c| {
        let (jp, jpp) = (c.col / m0, c.col % m0);
        let low = seed.gp(Cell::new(c.row, jpp))[0].0;
        let high = if c.row + 1 < m0 {
            (jp as u64) << (k + c.row as u32 * b_per)
        } else {
            0
        };
        FieldElement(low | high)
    })?;
    gabidulin_lift(&lab, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::{is_mr_rank_oracle, OracleMode, DEFAULT_PATTERN_CAP};

    fn gf2_independent(vs: &[u64]) -> bool {
        // Gaussian elimination on bit vectors
        let mut basis: Vec<u64> = Vec::new();
        for &v in vs {
            let mut x = v;
            for &b in &basis {
                x = x.min(x ^ b);
            }
            if x == 0 {
                return false;
            }
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
        true
    }

    #[test]
    fn gf2_independence_helper() {
        assert!(gf2_independent(&[1, 2, 4]));
        assert!(!gf2_independent(&[3, 5, 6]));
        assert!(gf2_independent(&[3, 5]));
    }

    #[test]
    fn lift_examples() {
        let f = make_field(2, 2).unwrap();
        let lab = GammaLabeling::from_fn(1, 1, f.clone(), |_| FieldElement(2)).unwrap();
        let code = gabidulin_lift(&lab, 2).unwrap();
        assert_eq!(code.gp(Cell::new(0, 0)), &[FieldElement(2), FieldElement(3)]);
        let zero = GammaLabeling::from_fn(2, 2, f.clone(), |_| FieldElement::ZERO).unwrap();
        assert_eq!(gabidulin_lift(&zero, 2).unwrap(), GridCode::zero(2, 2, 2, f.clone()).unwrap());
        assert!(matches!(gabidulin_lift(&zero, 3), Err(ConstructionError::LiftDegree { .. })));
    }

    #[test]
    fn binary_small() {
        let code = construct_binary(2, 2).unwrap();
        assert_eq!(code.field().q(), 2);
        let vals: Vec<u64> = all_cells(2, 2).map(|c| code.gp(c)[0].0).collect();
        assert_eq!(vals, vec![0, 1, 0, 0]);
        assert_eq!(construct_binary(3, 4).unwrap().field().q(), 16);
        assert_eq!(construct_binary(2, 8).unwrap().field().q(), 8);
        assert!(construct_binary(2, 6).is_err());
    }

    #[test]
    fn bch_spec_bits() {
        assert_eq!(BchSpec::new(3, 3).unwrap().d_bits, 3);
        assert_eq!(BchSpec::new(5, 7).unwrap().d_bits, 7);
        assert_eq!(BchSpec::new(5, 8).unwrap().d_bits, 9);
        for (m, n, h) in [(2, 4, 1), (2, 4, 2), (3, 4, 1), (3, 4, 2), (2, 2, 1), (4, 8, 2)] {
            let simple = BchSpec::new(2 * (m + h - 1) + 1, m * n).unwrap();
            assert_eq!(simple.d_bits, bch_simple_field_bits(m, n, h).unwrap());
            let zero = BchSpec::new(2 * (m + h - 2) + 1, (m - 1) * n).unwrap();
            assert_eq!(zero.d_bits, bch_zero_field_bits(m, n, h).unwrap());
        }
        assert_eq!(bch_simple_field_bits(2, 2, 1).unwrap(), 7);
        assert_eq!(bch_zero_field_bits(2, 4, 1).unwrap(), 4);
        assert_eq!(bch_zero_field_bits(3, 4, 2).unwrap(), 13);
        assert_eq!(bch_simple_field_bits(3, 4, 2).unwrap(), 17);
    }

    #[test]
    fn bch_distance_brute_force() {
        for (dd, nn) in [(3, 3), (5, 7), (3, 7), (5, 15), (7, 15), (7, 10)] {
            let spec = BchSpec::new(dd, nn).unwrap();
            let cols = bch_columns(&spec).unwrap();
            assert_eq!(cols.len(), nn);
            for mask in 1u32..(1 << nn) {
                if mask.count_ones() as usize > dd - 1 {
                    continue;
                }
                let xor = (0..nn).filter(|k| mask >> k & 1 == 1).fold(0u64, |a, k| a ^ cols[k]);
                assert_ne!(xor, 0, "D={dd} N={nn} mask={mask:b}");
            }
            for sub in itertools::Itertools::combinations(cols.iter().copied(), dd - 1) {
                assert!(gf2_independent(&sub));
            }
        }
        assert!(matches!(
            bch_columns(&BchSpec { design_distance: 3, columns: 4, s: 2, t: 1, d_bits: 3 }),
            Err(ConstructionError::BchPoints { .. })
        ));
    }

    fn brute_ap3_free(set: &[u64], q: u64) -> bool {
        for &x in set {
            for &y in set {
                for &z in set {
                    if x != y && y != z && x != z && (x + y) % q == (2 * z) % q {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn ap3_sets() {
        assert_eq!(ap3_free_set(11, 4).unwrap(), vec![0, 1, 3, 4]);
        assert_eq!(ap3_free_set(7, 2).unwrap(), vec![0, 1]);
        assert!(matches!(ap3_free_set(5, 3), Err(ConstructionError::Ap3Stalled { found: 2, .. })));
        assert!(matches!(ap3_free_set(9, 2), Err(ConstructionError::NotOddPrime(9))));
        for q in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            for n in 1..8 {
                if let Ok(s) = ap3_free_set(q, n) {
                    assert_eq!(s.len(), n);
                    assert!(brute_ap3_free(&s, q));
                }
            }
        }
        let q5 = smallest_ap3_prime(5);
        assert!(ap3_free_set(q5, 5).is_ok());
        for q in (3..q5).filter(|&q| is_prime(q)) {
            assert!(ap3_free_set(q, 5).is_err());
        }
    }

    #[test]
    fn ap3_cycle_sums() {
        let code = construct_ap3(4, 11).unwrap();
        let f = code.field().clone();
        let a = [0u64, 1, 3, 4];
        // 4-cycle (i1 - i2)(a_j1 - a_j2)
        let c = crate::gridgraph::CycleRep::new(vec![0, 2], vec![1, 3]).unwrap();
        let s = code.cycle_sum(&c)[0];
        let expect = f.mul(f.from_int(0 - 2), f.from_int(a[1] as i64 - a[3] as i64));
        assert!(s == expect || s == f.neg(expect));
        assert!(!s.is_zero());
        assert!(is_mr_cycle_criterion(&code, DEFAULT_PAIR_CAP).unwrap().is_mr);
    }

    #[test]
    fn small_constructions_are_mr() {
        let codes = [
            construct_binary(2, 4).unwrap(),
            construct_bch_simple(2, 2, 1).unwrap(),
            construct_bch_zero(2, 4, 1).unwrap(),
            construct_bch_zero(2, 2, 2).unwrap(),
        ];
        for code in &codes {
            assert!(is_mr_cycle_criterion(code, DEFAULT_PAIR_CAP).unwrap().is_mr);
            assert!(is_mr_rank_oracle(code, OracleMode::Full, DEFAULT_PATTERN_CAP).unwrap().is_mr);
        }
    }

    #[test]
    fn bootstrap_sizes() {
        let seed = construct_binary(2, 2).unwrap();
        let same = bootstrap_h1(&seed, 2).unwrap();
        assert_eq!(same, seed);
        let four = bootstrap_h1(&seed, 4).unwrap();
        assert_eq!(four.field().q(), 4);
        assert!(is_mr_cycle_criterion(&four, DEFAULT_PAIR_CAP).unwrap().is_mr);
        assert_eq!(bootstrap_h1(&seed, 8).unwrap().field().q(), 8);
        let bad = GridCode::zero(2, 2, 1, make_field(2, 1).unwrap()).unwrap();
        assert!(matches!(bootstrap_h1(&bad, 4), Err(ConstructionError::SeedNotMr)));
        assert!(bootstrap_h1(&seed, 6).is_err());
    }
}
