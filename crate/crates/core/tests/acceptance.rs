//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::Instant;

use common::{construction_corpus, gf, random_code, rng, Named};
use mrgrid::constructions::{
    bch_simple_field_bits, bch_zero_field_bits, construct_ap3, construct_bch_simple, construct_bch_zero,
    construct_binary, smallest_ap3_prime,
};
use mrgrid::decoder::{erase, random_codeword, recover, DecodeError};
use mrgrid::gridgraph::{all_cells, cycle_union_size, random_spanning_tree, tight_union_family};
use mrgrid::reductions::{reduce_box, reduce_monotone};
use mrgrid::verifier::{
    check_cycle_family, family_size, is_mr_cycle_criterion, is_mr_rank_oracle, min_field_size_search, OracleMode,
    SearchFamily, DEFAULT_PAIR_CAP, DEFAULT_PATTERN_CAP,
};
use mrgrid::{moore_matrix, Cell, FieldElement, GridCode, Pattern};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cycles_mr(code: &GridCode) -> Result<bool, String> {
    is_mr_cycle_criterion(code, DEFAULT_PAIR_CAP)
        .map(|r| r.is_mr)
        .map_err(|e| e.to_string())
}

fn rank_mr(code: &GridCode, mode: OracleMode) -> Result<bool, String> {
    is_mr_rank_oracle(code, mode, DEFAULT_PATTERN_CAP)
        .map(|r| r.is_mr)
        .map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let mut corpus: Vec<Named> = construction_corpus()
        .into_iter()
        .filter(|c| c.code.m() <= 3 && c.code.n() <= 4 && c.code.h() <= 2)
        .collect();
    let mut r = rng(1);
    for k in 0..100 {
        let f = if k % 2 == 0 { gf(2, 2) } else { gf(2, 3) };
        corpus.push(Named {
            name: format!("random(2,3,1) #{k} over {f}"),
            code: random_code(2, 3, 1, &f, &mut r),
        });
    }
    for m in 1..=3 {
        for n in 1..=4 {
            for h in 0..=2 {
                for k in 0..4 {
                    let f = if k % 2 == 0 { gf(2, 2) } else { gf(2, 3) };
                    corpus.push(Named {
                        name: format!("random({m},{n},{h}) #{k} over {f}"),
                        code: random_code(m, n, h, &f, &mut r),
                    });
                }
            }
        }
    }
    let (mut mr, mut not_mr) = (0, 0);
    for c in &corpus {
        let a = cycles_mr(&c.code)?;
        let b = rank_mr(&c.code, OracleMode::Full)?;
        let d = rank_mr(&c.code, OracleMode::Restricted)?;
        ensure(a == b && b == d, || {
            format!("{}: cycles {a}, full oracle {b}, restricted oracle {d}", c.name)
        })?;
        if a {
            mr += 1;
        } else {
            not_mr += 1;
        }
    }
    Ok(format!("{} codes agree ({mr} MR, {not_mr} not MR)", corpus.len()))
}

/// Least `k` with `2^k > x`.
fn exp_above(x: usize) -> u32 {
    let mut k = 0;
    while (1usize << k) <= x {
        k += 1;
    }
    k
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for (m, n) in [(2, 2), (2, 4), (2, 8), (3, 4), (4, 4)] {
        let code = construct_binary(m, n).map_err(|e| e.to_string())?;
        let q = (n as u64).pow(m as u32 - 1);
        ensure(code.field().q() == q, || format!("binary({m},{n}) has q = {}, want {q}", code.field().q()))?;
        ensure(cycles_mr(&code)?, || format!("binary({m},{n}) fails the cycle criterion"))?;
        let mode = if m * n <= 12 { OracleMode::Full } else { OracleMode::Restricted };
        ensure(rank_mr(&code, mode)?, || format!("binary({m},{n}) fails the rank oracle"))?;
        checked += 1;
    }
    for (m, n, h) in [(2, 4, 1), (2, 4, 2), (3, 4, 1), (3, 4, 2)] {
        let simple = construct_bch_simple(m, n, h).map_err(|e| e.to_string())?;
        let zero = construct_bch_zero(m, n, h).map_err(|e| e.to_string())?;
        // 2(2^k n)^e as a power of two: 1 + e * log2(2^k n)
        let k_simple = exp_above(m);
        let k_zero = exp_above(m - 1);
        let log_n = n.trailing_zeros();
        let want_simple = 1 + (m + h - 1) as u32 * (k_simple + log_n);
        let want_zero = 1 + (m + h - 2) as u32 * (k_zero + log_n);
        ensure(simple.field().d() == want_simple, || {
            format!("bch({m},{n},{h}) has 2^{}, want 2^{want_simple}", simple.field().d())
        })?;
        ensure(zero.field().d() == want_zero, || {
            format!("bch-zero({m},{n},{h}) has 2^{}, want 2^{want_zero}", zero.field().d())
        })?;
        ensure(
            bch_simple_field_bits(m, n, h).ok() == Some(want_simple) && bch_zero_field_bits(m, n, h).ok() == Some(want_zero),
            || format!("formula helpers disagree at ({m},{n},{h})"),
        )?;
        for (name, code) in [("bch", &simple), ("bch-zero", &zero)] {
            ensure(cycles_mr(code)?, || format!("{name}({m},{n},{h}) fails the cycle criterion"))?;
            ensure(rank_mr(code, OracleMode::Full)?, || format!("{name}({m},{n},{h}) fails the rank oracle"))?;
            checked += 1;
        }
    }
    let q5 = smallest_ap3_prime(5);
    for (n, q) in [(4, 11), (5, q5)] {
        let code = construct_ap3(n, q).map_err(|e| e.to_string())?;
        ensure(code.field().q() == q, || format!("ap3({n}) over GF({})", code.field().q()))?;
        ensure(cycles_mr(&code)?, || format!("ap3({n},{q}) fails the cycle criterion"))?;
        ensure(rank_mr(&code, OracleMode::Full)?, || format!("ap3({n},{q}) fails the rank oracle"))?;
        checked += 1;
    }
    Ok(format!("{checked} constructions MR with exact field sizes; ap3 n=5 uses q={q5}"))
}

fn criterion_3() -> Outcome {
    let a = min_field_size_search(2, 3, 1, 3, SearchFamily::Generic, DEFAULT_PATTERN_CAP).map_err(|e| e.to_string())?;
    ensure(a.ruled_out == vec![2] && a.q == Some(3), || {
        format!("(2,3,1): ruled out {:?}, found {:?}", a.ruled_out, a.q)
    })?;
    let b = min_field_size_search(2, 4, 1, 4, SearchFamily::Generic, DEFAULT_PATTERN_CAP).map_err(|e| e.to_string())?;
    ensure(b.ruled_out == vec![2, 3] && b.q == Some(4), || {
        format!("(2,4,1): ruled out {:?}, found {:?}", b.ruled_out, b.q)
    })?;
    for out in [&a, &b] {
        let code = out.code.as_ref().expect("found code");
        ensure(rank_mr(code, OracleMode::Full)?, || "search witness fails the rank oracle".into())?;
    }
    Ok(format!(
        "(2,3,1): none over {:?}, found q=3; (2,4,1): none over {:?}, found q=4",
        a.ruled_out, b.ruled_out
    ))
}

fn criterion_4() -> Outcome {
    let out = min_field_size_search(2, 3, 2, 16, SearchFamily::Gabidulin, DEFAULT_PATTERN_CAP).map_err(|e| e.to_string())?;
    let q = out.q.ok_or("no Gabidulin code up to q = 16")?;
    ensure(q >= 3, || format!("found q = {q} below the bound 3"))?;
    ensure(out.ruled_out.iter().all(|&r| r < q) && out.ruled_out.contains(&2), || {
        format!("ruled out {:?}", out.ruled_out)
    })?;
    let code = out.code.as_ref().expect("found code");
    ensure(rank_mr(code, OracleMode::Full)?, || "witness fails the rank oracle".into())?;
    Ok(format!("no Gabidulin MR(2,3,2) code over {:?}; minimum is q = {q}", out.ruled_out))
}

fn criterion_5() -> Outcome {
    let input = construct_bch_zero(4, 8, 2).map_err(|e| e.to_string())?;
    let mono = reduce_monotone(&input, 1).map_err(|e| e.to_string())?;
    let boxed = reduce_box(&input, 1, 2, 2).map_err(|e| e.to_string())?;
    for (name, red) in [("monotone", &mono), ("box", &boxed)] {
        let c = &red.code;
        ensure((c.m(), c.n(), c.h()) == (2, 6, 1), || {
            format!("{name} gives ({},{},{})", c.m(), c.n(), c.h())
        })?;
        ensure(c.field() == input.field(), || format!("{name} changed the field"))?;
        ensure(cycles_mr(c)?, || format!("{name} output fails the cycle criterion"))?;
        ensure(rank_mr(c, OracleMode::Full)?, || format!("{name} output fails the rank oracle"))?;
        let ok = check_cycle_family(&input, &red.cycles).map_err(|e| e.to_string())?;
        ensure(ok, || format!("{name}: designated cycle sums dependent"))?;
        for s in red.cycles.iter().map(|cy| input.cycle_sum(cy)) {
            ensure(red.projection.apply(&s).iter().all(|x| x.is_zero()), || format!("{name}: psi misses a cycle"))?;
        }
    }
    Ok(format!(
        "bch-zero(4,8,2) over {} -> verified MR(2,6,1) by both reductions",
        input.field()
    ))
}

fn criterion_6() -> Outcome {
    let n = 8;
    let mut r = rng(6);
    let mut worst = 0;
    for m in 2..=4 {
        for h in 1..=3 {
            let bound = 2 * (m + h - 1);
            for _ in 0..10_000 {
                let tree = random_spanning_tree(m, n, &mut r);
                let mut others: Vec<Cell> = all_cells(m, n).filter(|c| !tree.contains(*c)).collect();
                others.shuffle(&mut r);
                let size = cycle_union_size(&tree, &others[..h]).map_err(|e| e.to_string())?;
                ensure(size <= bound, || format!("(m={m}, h={h}) union {size} > {bound}"))?;
                worst = worst.max(size as i64 - bound as i64);
            }
            let (tree, extras) = tight_union_family(m, n, h).map_err(|e| e.to_string())?;
            let size = cycle_union_size(&tree, &extras).map_err(|e| e.to_string())?;
            ensure(size == bound, || format!("tight family (m={m}, h={h}) has {size} != {bound}"))?;
        }
    }
    Ok(format!("90000 samples within 2(m+h-1) (max excess {worst}); tight family attains it"))
}

fn gf2_rank(values: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &v in values {
        let mut x = v;
        for &b in &basis {
            if x ^ b < x {
                x ^= b;
            }
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn criterion_7() -> Outcome {
    let f = gf(2, 3);
    let mut counts = Vec::new();
    for h in [2usize, 3] {
        let mut independent = 0;
        let total = 8usize.pow(h as u32);
        for idx in 0..total {
            let alphas: Vec<FieldElement> = (0..h).map(|k| FieldElement(((idx >> (3 * k)) & 7) as u64)).collect();
            let det = moore_matrix(&f, &alphas).map_err(|e| e.to_string())?.determinant().map_err(|e| e.to_string())?;
            let ind = gf2_rank(&alphas.iter().map(|a| a.0).collect::<Vec<_>>()) == h;
            ensure(!det.is_zero() == ind, || format!("alphas {alphas:?}: det {det:?}, independent {ind}"))?;
            independent += usize::from(ind);
        }
        counts.push(format!("h={h}: {independent}/{total} independent"));
    }
    Ok(format!("Moore determinant matches GF(2) independence ({})", counts.join(", ")))
}

fn correctable_pattern(code: &GridCode, r: &mut impl Rng) -> Pattern {
    let (m, n) = (code.m(), code.n());
    let tree = random_spanning_tree(m, n, r);
    let mut others: Vec<Cell> = all_cells(m, n).filter(|c| !tree.contains(*c)).collect();
    others.shuffle(r);
    let full = tree.with_cells(others[..family_size(m, n, code.h())].iter().copied()).unwrap();
    if r.random_bool(0.25) {
        return full;
    }
    Pattern::new(m, n, full.cells().iter().copied().filter(|_| r.random_bool(0.6))).unwrap()
}

fn criterion_8() -> Outcome {
    let mut corpus = construction_corpus();
    let input = construct_bch_zero(4, 8, 2).map_err(|e| e.to_string())?;
    corpus.push(Named {
        name: "monotone(bch-zero(4,8,2))".into(),
        code: reduce_monotone(&input, 1).map_err(|e| e.to_string())?.code,
    });
    let mut r = rng(8);
    let (mut round_trips, mut rejected) = (0, 0);
    for c in &corpus {
        let code = &c.code;
        for t in 0..100u64 {
            let w = random_codeword(code, 1000 + t);
            let e = correctable_pattern(code, &mut r);
            let back = recover(code, &erase(&w, &e)).map_err(|err| format!("{}: {err} on {e}", c.name))?;
            ensure(back == w, || format!("{}: wrong recovery on {e}", c.name))?;
            round_trips += 1;
        }
        let (m, n) = (code.m(), code.n());
        let w = random_codeword(code, 7);
        if m * n <= 12 {
            for mask in 0u128..(1 << (m * n)) {
                let e = Pattern::from_mask(m, n, mask);
                let res = recover(code, &erase(&w, &e));
                if e.circuit_rank() > code.h() {
                    ensure(matches!(res, Err(DecodeError::NotCorrectable { .. })), || {
                        format!("{}: accepted {e}", c.name)
                    })?;
                    rejected += 1;
                } else {
                    ensure(res.as_ref().is_ok_and(|x| *x == w), || format!("{}: failed on {e}", c.name))?;
                }
            }
        } else if family_size(m, n, code.h()) == code.h() {
            for _ in 0..100 {
                let tree = random_spanning_tree(m, n, &mut r);
                let mut others: Vec<Cell> = all_cells(m, n).filter(|c| !tree.contains(*c)).collect();
                others.shuffle(&mut r);
                let e = tree.with_cells(others[..code.h() + 1].iter().copied()).unwrap();
                let res = recover(code, &erase(&w, &e));
                ensure(matches!(res, Err(DecodeError::NotCorrectable { .. })), || {
                    format!("{}: accepted {e}", c.name)
                })?;
                rejected += 1;
            }
        }
    }
    Ok(format!(
        "{} codes: {round_trips} round trips exact, {rejected} non-correctable patterns rejected",
        corpus.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 oracle equivalence", criterion_1),
        ("2 construction validity", criterion_2),
        ("3 lower-bound confirmation", criterion_3),
        ("4 Gabidulin lower bound", criterion_4),
        ("5 reduction preservation", criterion_5),
        ("6 cycle-union bound", criterion_6),
        ("7 Moore criterion", criterion_7),
        ("8 decoder round-trip", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
