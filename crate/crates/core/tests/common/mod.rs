#![allow(dead_code)]

use mrgrid::constructions::{
    bootstrap_h1, construct_ap3, construct_binary, construct_bch_simple, construct_bch_zero, smallest_ap3_prime,
};
use mrgrid::{make_field, FieldElement, FieldSpec, GridCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Named {
    pub name: String,
    pub code: GridCode,
}

fn named(name: String, code: GridCode) -> Named {
    Named { name, code }
}

/// Every construction at parameters small enough for exhaustive checks.
pub fn construction_corpus() -> Vec<Named> {
    let mut out = Vec::new();
    for (m, n) in [(2, 2), (2, 4), (3, 2), (3, 4), (2, 8), (4, 4)] {
        out.push(named(format!("binary({m},{n})"), construct_binary(m, n).unwrap()));
    }
    for (m, n, h) in [(1, 4, 1), (2, 2, 1), (2, 2, 2), (2, 4, 1), (2, 4, 2), (3, 2, 2), (3, 4, 1), (3, 4, 2)] {
        out.push(named(format!("bch({m},{n},{h})"), construct_bch_simple(m, n, h).unwrap()));
    }
    for (m, n, h) in [(2, 2, 1), (2, 2, 2), (2, 4, 1), (2, 4, 2), (3, 2, 2), (3, 4, 1), (3, 4, 2)] {
        out.push(named(format!("bch-zero({m},{n},{h})"), construct_bch_zero(m, n, h).unwrap()));
    }
    for n in [2, 3, 4, 5] {
        let q = smallest_ap3_prime(n);
        out.push(named(format!("ap3({n},{q})"), construct_ap3(n, q).unwrap()));
    }
    out.push(named("ap3(4,11)".into(), construct_ap3(4, 11).unwrap()));
    let seed = construct_binary(2, 2).unwrap();
    for n in [2, 4, 8] {
        out.push(named(format!("bootstrap(binary(2,2),{n})"), bootstrap_h1(&seed, n).unwrap()));
    }
    out
}

pub fn random_code(m: usize, n: usize, h: usize, field: &FieldSpec, rng: &mut ChaCha8Rng) -> GridCode {
    let q = field.q();
    GridCode::from_fn(m, n, h, field.clone(), |_| {
        (0..h).map(|_| FieldElement(rng.random_range(0..q))).collect()
    })
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gf(p: u64, d: u32) -> FieldSpec {
    make_field(p, d).unwrap()
}
