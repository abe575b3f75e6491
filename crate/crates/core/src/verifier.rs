//! MR verification: the cycle-sum criterion, the rank oracle over correctable
//! patterns, Proposition-style family checks and minimum field size search.

use std::collections::HashSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::code::{restrict, CodeError, GridCode};
use crate::field::{is_prime, make_field, prime_power, FieldElement, FieldError, FieldSpec};
use crate::gridgraph::{
    all_cells, enumerate_spanning_trees, fundamental_cycle, spanning_tree_count, Cell, CycleRep,
    GraphError, Pattern, MAX_ENUM_CELLS,
};

/// Default limit on (tree, extras) pairs.
pub const DEFAULT_PAIR_CAP: u128 = 10_000_000;
/// Default limit on patterns checked by the rank oracle and on search candidates.
pub const DEFAULT_PATTERN_CAP: u128 = 1 << 20;

const BATCH: usize = 4096;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("cap exceeded: {what} needs {needed} checks, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: String,
        cap: u128,
    },
    #[error("cap exceeded: field size search needs {needed} candidates at q = {q}, cap is {cap} (ruled out {ruled_out:?})")]
    SearchCapped {
        q: u64,
        needed: String,
        cap: u128,
        ruled_out: Vec<u64>,
    },
    #[error("cycle family hypotheses violated: {0}")]
    Hypothesis(String),
    #[error("rank oracle disagrees with the cycle criterion on a search witness")]
    OracleDisagreement,
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A spanning tree plus extra cells whose fundamental-cycle sums are dependent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub tree: Pattern,
    pub extras: Vec<Cell>,
    pub cycles: Vec<CycleRep>,
    pub sums: Vec<Vec<FieldElement>>,
    pub pattern: Pattern,
}

impl Witness {
    fn build(code: &GridCode, tree: Pattern, extras: Vec<Cell>) -> Result<Witness, VerifyError> {
        let cycles = extras
            .iter()
            .map(|&e| fundamental_cycle(&tree, e))
            .collect::<Result<Vec<_>, _>>()?;
        let sums = cycles.iter().map(|c| code.cycle_sum(c)).collect();
        let pattern = tree.with_cells(extras.iter().copied())?;
        Ok(Witness {
            tree,
            extras,
            cycles,
            sums,
            pattern,
        })
    }

    /// Recomputes the family on `code` and reports whether it is still dependent
    /// and the pattern still rank deficient.
    pub fn refails(&self, code: &GridCode) -> bool {
        let cycles: Result<Vec<_>, _> = self
            .extras
            .iter()
            .map(|&e| fundamental_cycle(&self.tree, e))
            .collect();
        let Ok(cycles) = cycles else { return false };
        let dependent = code.cycle_sum_matrix(&cycles).rank() < cycles.len();
        let deficient = restrict(&code.parity_matrix(), &self.pattern).rank() < self.pattern.len();
        dependent && deficient
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MrReport {
    pub is_mr: bool,
    pub witness: Option<Witness>,
    pub patterns_checked: u64,
    pub dedup_hits: u64,
}

/// Number of extra cells per family: `h`, or every non-tree cell when the grid
/// has fewer than `h` of them.
pub fn family_size(m: usize, n: usize, h: usize) -> usize {
    h.min((m - 1) * (n - 1))
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn pair_count(m: usize, n: usize, r: usize) -> Option<u128> {
    let trees = spanning_tree_count(m, n)?;
    let subsets = binomial(((m - 1) * (n - 1)) as u128, r as u128)?;
    trees.checked_mul(subsets)
}

fn check_grid(m: usize, n: usize) -> Result<(), VerifyError> {
    if m * n > MAX_ENUM_CELLS {
        return Err(GraphError::GridTooLarge.into());
    }
    Ok(())
}

fn cap_check(m: usize, n: usize, r: usize, cap: u128) -> Result<(), VerifyError> {
    match pair_count(m, n, r) {
        Some(c) if c <= cap => Ok(()),
        other => Err(VerifyError::CapExceeded {
            what: "cycle criterion",
            needed: other.map_or_else(|| "overflowing".into(), |c| c.to_string()),
            cap,
        }),
    }
}

fn cell_mask(n: usize, c: Cell) -> u128 {
    1u128 << (c.row * n + c.col)
}

/// A spanning tree, its non-tree cells and their fundamental cycle sums.
type TreeEntry = (Pattern, Vec<Cell>, Vec<Vec<FieldElement>>);

struct Job {
    tree: usize,
    extras: Vec<usize>,
}

/// Decides MR via fundamental-cycle families: for every spanning tree and
/// every choice of extra cells, the cycle sums must be independent. Each
/// union pattern is checked once. Single-threaded.
pub fn is_mr_cycle_criterion(code: &GridCode, cap: u128) -> Result<MrReport, VerifyError> {
    is_mr_cycle_criterion_with(code, cap, 1)
}

/// As [`is_mr_cycle_criterion`], checking batches of families on `workers`
/// threads. The report does not depend on `workers`.
pub fn is_mr_cycle_criterion_with(
    code: &GridCode,
    cap: u128,
    workers: usize,
) -> Result<MrReport, VerifyError> {
    let (m, n) = (code.m(), code.n());
    check_grid(m, n)?;
    let r = family_size(m, n, code.h());
    cap_check(m, n, r, cap)?;
    let mut report = MrReport {
        is_mr: true,
        witness: None,
        patterns_checked: 0,
        dedup_hits: 0,
    };
    if r == 0 {
        return Ok(report);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| VerifyError::Pool(e.to_string()))?;

    let mut seen: HashSet<u128> = HashSet::new();
    // per-tree data kept until the batch holding its jobs is checked
    let mut trees: Vec<TreeEntry> = Vec::new();
    let mut jobs: Vec<Job> = Vec::new();

    let check = |trees: &[TreeEntry], jobs: &[Job]| {
        pool.install(|| {
            jobs.par_iter().position_first(|job| {
                let sums = &trees[job.tree].2;
                let cols: Vec<Vec<FieldElement>> =
                    job.extras.iter().map(|&k| sums[k].clone()).collect();
                let mat = crate::matrix::Matrix::from_columns(code.field(), &cols, code.h())
                    .expect("cycle sums have length h");
                mat.rank() < cols.len()
            })
        })
    };

    for tree in enumerate_spanning_trees(m, n, u128::MAX)? {
        let tmask = tree.mask().expect("grid fits a mask");
        let others: Vec<Cell> = all_cells(m, n).filter(|c| !tree.contains(*c)).collect();
        let sums = others
            .iter()
            .map(|&e| fundamental_cycle(&tree, e).map(|c| code.cycle_sum(&c)))
            .collect::<Result<Vec<_>, _>>()?;
        let tree_index = trees.len();
        let mut any = false;
        for combo in (0..others.len()).combinations(r) {
            let mask = combo.iter().fold(tmask, |acc, &k| acc | cell_mask(n, others[k]));
            if !seen.insert(mask) {
                report.dedup_hits += 1;
                continue;
            }
            report.patterns_checked += 1;
            any = true;
            jobs.push(Job {
                tree: tree_index,
                extras: combo,
            });
        }
        if any {
            trees.push((tree, others, sums));
        }
        if jobs.len() >= BATCH {
            if let Some(k) = check(&trees, &jobs) {
                return fail(code, report, &trees, &jobs[k]);
            }
            jobs.clear();
            trees.clear();
        }
    }
    if let Some(k) = check(&trees, &jobs) {
        return fail(code, report, &trees, &jobs[k]);
    }
    Ok(report)
}

fn fail(
    code: &GridCode,
    mut report: MrReport,
    trees: &[TreeEntry],
    job: &Job,
) -> Result<MrReport, VerifyError> {
    let (tree, others, _) = &trees[job.tree];
    let extras = job.extras.iter().map(|&k| others[k]).collect();
    report.is_mr = false;
    report.witness = Some(Witness::build(code, tree.clone(), extras)?);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    /// Every subset of cells with circuit rank at most `h`.
    Full,
    /// Only the maximal correctable patterns: connected, spanning, `m + n + h - 1` cells.
    Restricted,
}

/// Decides MR by checking `rank H|_E = |E|` directly on correctable patterns.
pub fn is_mr_rank_oracle(code: &GridCode, mode: OracleMode, cap: u128) -> Result<MrReport, VerifyError> {
    let (m, n) = (code.m(), code.n());
    check_grid(m, n)?;
    let h_mat = code.parity_matrix();
    let mut report = MrReport {
        is_mr: true,
        witness: None,
        patterns_checked: 0,
        dedup_hits: 0,
    };
    let mut deficient = None;
    match mode {
        OracleMode::Full => {
            let cells = m * n;
            if cells >= 127 || (1u128 << cells) > cap {
                return Err(VerifyError::CapExceeded {
                    what: "full rank oracle",
                    needed: format!("2^{cells}"),
                    cap,
                });
            }
            for mask in 0..(1u128 << cells) {
                let p = Pattern::from_mask(m, n, mask);
                if p.circuit_rank() > code.h() {
                    continue;
                }
                report.patterns_checked += 1;
                if restrict(&h_mat, &p).rank() < p.len() {
                    deficient = Some(p);
                    break;
                }
            }
        }
        OracleMode::Restricted => {
            let r = family_size(m, n, code.h());
            let size = m + n - 1 + r;
            let needed = binomial((m * n) as u128, size as u128);
            match needed {
                Some(c) if c <= cap => {}
                other => {
                    return Err(VerifyError::CapExceeded {
                        what: "restricted rank oracle",
                        needed: other.map_or_else(|| "overflowing".into(), |c| c.to_string()),
                        cap,
                    })
                }
            }
            let cells: Vec<Cell> = all_cells(m, n).collect();
            for combo in cells.into_iter().combinations(size) {
                let p = Pattern::new(m, n, combo)?;
                if p.component_count() != 1 || p.vertex_count() != m + n {
                    continue;
                }
                report.patterns_checked += 1;
                if restrict(&h_mat, &p).rank() < p.len() {
                    deficient = Some(p);
                    break;
                }
            }
        }
    }
    if let Some(p) = deficient {
        let (tree, extras) = extend_to_family(&p, family_size(m, n, code.h()))?;
        report.is_mr = false;
        report.witness = Some(Witness::build(code, tree, extras)?);
    }
    Ok(report)
}

/// Extends a pattern of circuit rank at most `r` to a spanning tree `T` and
/// exactly `r` extra cells with `T + extras` containing the pattern.
pub fn extend_to_family(pattern: &Pattern, r: usize) -> Result<(Pattern, Vec<Cell>), VerifyError> {
    let (m, n) = (pattern.m(), pattern.n());
    let forest = pattern.spanning_forest();
    let mut tree_cells: Vec<Cell> = forest.cells().to_vec();
    let mut tree = forest.clone();
    for c in all_cells(m, n) {
        if tree.contains(c) {
            continue;
        }
        let candidate = tree.with_cells([c])?;
        if candidate.is_acyclic() {
            tree_cells.push(c);
            tree = candidate;
        }
    }
    let mut extras: Vec<Cell> = pattern.cells().iter().copied().filter(|c| !tree.contains(*c)).collect();
    if extras.len() > r {
        return Err(VerifyError::Hypothesis(format!(
            "pattern has circuit rank {} > {r}",
            extras.len()
        )));
    }
    for c in all_cells(m, n) {
        if extras.len() == r {
            break;
        }
        if !tree.contains(c) && !extras.contains(&c) {
            extras.push(c);
        }
    }
    extras.sort_unstable();
    Ok((tree, extras))
}

/// Checks a family of cycles against the hypotheses of the sufficient
/// independence condition (the union has circuit rank at most `h`, each cycle
/// has a cell in no other cycle) and returns whether their sums are independent.
pub fn check_cycle_family(code: &GridCode, cycles: &[CycleRep]) -> Result<bool, VerifyError> {
    let (m, n) = (code.m(), code.n());
    let mut union = Pattern::empty(m, n);
    for c in cycles {
        union = union.union(&c.to_pattern(m, n)?)?;
    }
    if union.circuit_rank() > code.h() {
        return Err(VerifyError::Hypothesis(format!(
            "union has circuit rank {} > h = {}",
            union.circuit_rank(),
            code.h()
        )));
    }
    for (k, c) in cycles.iter().enumerate() {
        let private = c.cells().into_iter().any(|cell| {
            cycles
                .iter()
                .enumerate()
                .all(|(l, other)| l == k || !other.contains(cell))
        });
        if !private {
            return Err(VerifyError::Hypothesis(format!("cycle {c} has no private cell")));
        }
    }
    Ok(code.cycle_sum_matrix(cycles).rank() == cycles.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchFamily {
    /// Arbitrary parity vectors, up to row and column gauge.
    Generic,
    /// Lifts `c = (g, g^p, ..., g^(p^(h-1)))` of scalar labels `g`.
    Gabidulin,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub m: usize,
    pub n: usize,
    pub h: usize,
    pub family: SearchFamily,
    /// Field sizes certified to admit no code of the family.
    pub ruled_out: Vec<u64>,
    /// The smallest admissible field size found, if any up to `max_q`.
    pub q: Option<u64>,
    #[serde(skip)]
    pub code: Option<GridCode>,
    pub candidates_checked: u64,
}

/// Every distinct family of fundamental cycles of size `family_size(m, n, h)`.
fn all_families(m: usize, n: usize, h: usize, cap: u128) -> Result<Vec<Vec<CycleRep>>, VerifyError> {
    check_grid(m, n)?;
    let r = family_size(m, n, h);
    cap_check(m, n, r, cap)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    if r == 0 {
        return Ok(out);
    }
    for tree in enumerate_spanning_trees(m, n, u128::MAX)? {
        let others: Vec<Cell> = all_cells(m, n).filter(|c| !tree.contains(*c)).collect();
        let cycles = others
            .iter()
            .map(|&e| fundamental_cycle(&tree, e))
            .collect::<Result<Vec<_>, _>>()?;
        for combo in (0..others.len()).combinations(r) {
            let mut fam: Vec<CycleRep> = combo.iter().map(|&k| cycles[k].clone()).collect();
            fam.sort();
            if seen.insert(fam.clone()) {
                out.push(fam);
            }
        }
    }
    Ok(out)
}

/// Searches prime powers `q = 2, 3, 4, ...` up to `max_q` for an MR code of
/// the given family and returns the first found. Each field size is searched
/// exhaustively, so every size in `ruled_out` is certified to admit none.
pub fn min_field_size_search(
    m: usize,
    n: usize,
    h: usize,
    max_q: u64,
    family: SearchFamily,
    cap: u128,
) -> Result<SearchOutcome, VerifyError> {
    if m == 0 || n == 0 {
        return Err(GraphError::EmptyGrid { m, n }.into());
    }
    let families = all_families(m, n, h, DEFAULT_PAIR_CAP.max(cap))?;
    let free: Vec<Cell> = all_cells(m, n).filter(|c| c.row > 0 && c.col > 0).collect();
    let mut outcome = SearchOutcome {
        m,
        n,
        h,
        family,
        ruled_out: Vec::new(),
        q: None,
        code: None,
        candidates_checked: 0,
    };
    for q in 2..=max_q {
        let Some((p, d)) = prime_power(q) else { continue };
        debug_assert!(is_prime(p));
        let field = make_field(p, d)?;
        let per_cell = match family {
            SearchFamily::Generic => h,
            SearchFamily::Gabidulin => {
                if (d as usize) < h && h > 0 {
                    // the lift needs h distinct Frobenius powers
                    outcome.ruled_out.push(q);
                    continue;
                }
                1
            }
        };
        let digits = per_cell * free.len();
        let total = (q as u128).checked_pow(digits as u32);
        match total {
            Some(t) if t <= cap => {}
            other => {
                return Err(VerifyError::SearchCapped {
                    q,
                    needed: other.map_or_else(|| format!("{q}^{digits}"), |t| t.to_string()),
                    cap,
                    ruled_out: outcome.ruled_out,
                })
            }
        }
        if let Some(code) = search_field(m, n, h, &field, family, &free, &families, &mut outcome)? {
            let oracle = if m * n <= 20 {
                is_mr_rank_oracle(&code, OracleMode::Full, DEFAULT_PATTERN_CAP)
            } else {
                is_mr_rank_oracle(&code, OracleMode::Restricted, DEFAULT_PATTERN_CAP)
            };
            match oracle {
                Ok(rep) if !rep.is_mr => return Err(VerifyError::OracleDisagreement),
                Ok(_) | Err(VerifyError::CapExceeded { .. }) => {}
                Err(e) => return Err(e),
            }
            outcome.q = Some(q);
            outcome.code = Some(code);
            return Ok(outcome);
        }
        outcome.ruled_out.push(q);
    }
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn search_field(
    m: usize,
    n: usize,
    h: usize,
    field: &FieldSpec,
    family: SearchFamily,
    free: &[Cell],
    families: &[Vec<CycleRep>],
    outcome: &mut SearchOutcome,
) -> Result<Option<GridCode>, VerifyError> {
    let q = field.q();
    let per_cell = if family == SearchFamily::Generic { h } else { 1 };
    let mut digits = vec![0u64; per_cell * free.len()];
    let mut code = GridCode::zero(m, n, h, field.clone())?;
    let mut last_fail = 0usize;
    loop {
        for (k, &cell) in free.iter().enumerate() {
            let v: Vec<FieldElement> = match family {
                SearchFamily::Generic => digits[k * h..(k + 1) * h].iter().map(|&x| FieldElement(x)).collect(),
                SearchFamily::Gabidulin => {
                    let g = FieldElement(digits[k]);
                    (0..h).map(|i| field.frobenius(g, i as u64)).collect()
                }
            };
            code.set_gp(cell, &v)?;
        }
        outcome.candidates_checked += 1;
        let dependent = |fam: &Vec<CycleRep>| code.cycle_sum_matrix(fam).rank() < fam.len();
        let ok = if families.is_empty() {
            true
        } else if dependent(&families[last_fail]) {
            false
        } else {
            match families.iter().position(dependent) {
                Some(k) => {
                    last_fail = k;
                    false
                }
                None => true,
            }
        };
        if ok {
            return Ok(Some(code));
        }
        // odometer step
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(None);
            }
            digits[k] += 1;
            if digits[k] < q {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_code(m: usize, n: usize, h: usize, field: &FieldSpec, seed: u64) -> GridCode {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let q = field.q();
        GridCode::from_fn(m, n, h, field.clone(), |_| {
            (0..h).map(|_| FieldElement(rng.random_range(0..q))).collect()
        })
        .unwrap()
    }

    #[test]
    fn zero_code_fails_on_a_four_cycle() {
        let f = make_field(2, 2).unwrap();
        let code = GridCode::zero(2, 3, 1, f).unwrap();
        let rep = is_mr_cycle_criterion(&code, DEFAULT_PAIR_CAP).unwrap();
        assert!(!rep.is_mr);
        let w = rep.witness.unwrap();
        assert_eq!(w.cycles.len(), 1);
        assert!(w.refails(&code));
        let rep = is_mr_rank_oracle(&code, OracleMode::Full, DEFAULT_PATTERN_CAP).unwrap();
        assert!(!rep.is_mr);
        assert!(rep.witness.unwrap().refails(&code));
    }

    #[test]
    fn two_by_two_binary_pattern_count() {
        // gamma(0, j) = j, gamma(1, j) = 0 over GF(2)
        let f = make_field(2, 1).unwrap();
        let code = GridCode::from_fn(2, 2, 1, f, |c| {
            vec![FieldElement(if c.row == 0 { c.col as u64 } else { 0 })]
        })
        .unwrap();
        let rep = is_mr_rank_oracle(&code, OracleMode::Full, DEFAULT_PATTERN_CAP).unwrap();
        assert!(rep.is_mr);
        // all 16 subsets have circuit rank at most 1, the empty one included
        assert_eq!(rep.patterns_checked, 16);
        assert!(is_mr_cycle_criterion(&code, DEFAULT_PAIR_CAP).unwrap().is_mr);
    }

    #[test]
    fn modes_agree_on_random_codes() {
        let f = make_field(2, 2).unwrap();
        for seed in 0..40 {
            let (m, n, h) = [(2, 3, 1), (2, 3, 2), (3, 3, 1), (2, 2, 2)][seed as usize % 4];
            let code = random_code(m, n, h, &f, seed);
            let a = is_mr_cycle_criterion(&code, DEFAULT_PAIR_CAP).unwrap();
            let b = is_mr_rank_oracle(&code, OracleMode::Full, DEFAULT_PATTERN_CAP).unwrap();
            let c = is_mr_rank_oracle(&code, OracleMode::Restricted, DEFAULT_PATTERN_CAP).unwrap();
            assert_eq!(a.is_mr, b.is_mr, "seed {seed}");
            assert_eq!(a.is_mr, c.is_mr, "seed {seed}");
            for w in [a.witness, b.witness, c.witness].into_iter().flatten() {
                assert!(w.refails(&code));
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let f = make_field(2, 3).unwrap();
        for seed in 0..6 {
            let code = random_code(3, 4, 1, &f, seed);
            let a = is_mr_cycle_criterion_with(&code, DEFAULT_PAIR_CAP, 1).unwrap();
            let b = is_mr_cycle_criterion_with(&code, DEFAULT_PAIR_CAP, 4).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cap_is_reported() {
        let f = make_field(2, 2).unwrap();
        let code = GridCode::zero(3, 3, 1, f).unwrap();
        assert!(matches!(
            is_mr_cycle_criterion(&code, 10),
            Err(VerifyError::CapExceeded { .. })
        ));
        assert!(matches!(
            is_mr_rank_oracle(&code, OracleMode::Full, 100),
            Err(VerifyError::CapExceeded { .. })
        ));
    }

    #[test]
    fn empty_pattern_and_h_zero() {
        let f = make_field(3, 1).unwrap();
        let code = GridCode::zero(2, 3, 0, f).unwrap();
        assert!(is_mr_cycle_criterion(&code, DEFAULT_PAIR_CAP).unwrap().is_mr);
        assert!(is_mr_rank_oracle(&code, OracleMode::Full, DEFAULT_PATTERN_CAP).unwrap().is_mr);
    }

    #[test]
    fn cycle_family_hypotheses() {
        let f = make_field(2, 2).unwrap();
        let code = GridCode::from_fn(2, 3, 1, f.clone(), |c| {
            vec![FieldElement(if c.row == 0 { c.col as u64 } else { 0 })]
        })
        .unwrap();
        let c4 = CycleRep::new(vec![0, 1], vec![0, 1]).unwrap();
        assert!(check_cycle_family(&code, std::slice::from_ref(&c4)).unwrap());
        // two cycles on a 2x3 union have circuit rank 2 > h
        let c4b = CycleRep::new(vec![0, 1], vec![1, 2]).unwrap();
        assert!(matches!(
            check_cycle_family(&code, &[c4.clone(), c4b.clone()]),
            Err(VerifyError::Hypothesis(_))
        ));
        // a repeated cycle has no private cell
        let code2 = random_code(2, 3, 2, &f, 3);
        assert!(matches!(
            check_cycle_family(&code2, &[c4.clone(), c4.clone()]),
            Err(VerifyError::Hypothesis(_))
        ));
        assert!(check_cycle_family(&code2, &[]).unwrap());
    }

    #[test]
    fn extension_contains_pattern() {
        let p = Pattern::new(3, 3, [Cell::new(0, 0), Cell::new(0, 1), Cell::new(1, 0), Cell::new(1, 1)]).unwrap();
        let (tree, extras) = extend_to_family(&p, 2).unwrap();
        assert!(tree.is_spanning_tree());
        assert_eq!(extras.len(), 2);
        let e = tree.with_cells(extras).unwrap();
        assert!(p.cells().iter().all(|c| e.contains(*c)));
    }

    #[test]
    fn small_generic_searches() {
        let out = min_field_size_search(2, 2, 1, 8, SearchFamily::Generic, DEFAULT_PATTERN_CAP).unwrap();
        assert_eq!(out.q, Some(2));
        let out = min_field_size_search(2, 3, 1, 8, SearchFamily::Generic, DEFAULT_PATTERN_CAP).unwrap();
        assert_eq!(out.ruled_out, vec![2]);
        assert_eq!(out.q, Some(3));
    }
}
