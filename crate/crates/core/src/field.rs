//! Arithmetic in GF(p^d) for small primes `p` and moderate extension degrees.
//!
//! Elements are packed base-`p` digit strings: digit `i` of the encoding is the
//! coefficient of `x^i` in the polynomial representative. For `p = 2` this is
//! the ordinary bit representation, so field addition is XOR.
//!
//! A [`FieldSpec`] is cheap to clone (it is reference counted) and immutable
//! after construction. Binary fields with `d <= 16` carry log/antilog tables;
//! every other field multiplies by polynomial reduction.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

/// Largest binary extension degree that gets log/antilog tables.
pub const TABLE_MAX_DEGREE: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{d} does not fit below 2^63")]
    Overflow { p: u64, d: u32 },
    #[error("modulus must be monic of degree {d} with coefficients below {p}")]
    BadModulus { p: u64, d: u32 },
    #[error("modulus is reducible over GF({0})")]
    Reducible(u64),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("{value} is not an element encoding of GF({q})")]
    NotAnElement { value: u64, q: u64 },
    #[error("field mismatch: {left} vs {right}")]
    Mismatch { left: String, right: String },
    #[error("Moore matrix of {h} elements needs extension degree at least {h}, field has {d}")]
    MooreDegree { d: u32, h: usize },
}

/// An element encoding. Only meaningful together with the [`FieldSpec`] that
/// produced it.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(pub u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct LogTables {
    log: Vec<u32>,
    // doubled so that exp[log a + log b] needs no reduction
    exp: Vec<u64>,
}

#[derive(Debug)]
struct Inner {
    p: u64,
    d: u32,
    q: u64,
    modulus: Vec<u64>,
    // modulus as a bit polynomial including x^d, only for p = 2
    modulus_bits: u128,
    generator: FieldElement,
    tables: Option<LogTables>,
}

/// A concrete finite field GF(p^d) given by a monic irreducible modulus.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.0.p)
            .field("d", &self.0.d)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.d == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.d)
        }
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.d == other.0.d && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

/// Builds GF(p^d) with the lexicographically smallest monic irreducible
/// modulus. Lower coefficients are compared as a base-`p` integer with the
/// constant term as the least significant digit.
pub fn make_field(p: u64, d: u32) -> Result<FieldSpec, FieldError> {
    check_params(p, d)?;
    let q = p.pow(d);
    for low in 0..q {
        let mut modulus = digits_of(low, p, d as usize);
        modulus.push(1);
        if poly::is_irreducible(&modulus, p) {
            return FieldSpec::with_modulus(p, &modulus);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

fn check_params(p: u64, d: u32) -> Result<(), FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if d == 0 {
        return Err(FieldError::ZeroDegree);
    }
    match p.checked_pow(d) {
        Some(q) if q < (1u64 << 63) => Ok(()),
        _ => Err(FieldError::Overflow { p, d }),
    }
}

impl FieldSpec {
    /// Builds a field from an explicit modulus (`d + 1` coefficients, constant
    /// term first, leading coefficient 1). The modulus is checked for
    /// irreducibility.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<FieldSpec, FieldError> {
        if modulus.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        let d = (modulus.len() - 1) as u32;
        check_params(p, d)?;
        if *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus { p, d });
        }
        if !poly::is_irreducible(modulus, p) {
            return Err(FieldError::Reducible(p));
        }
        let q = p.pow(d);
        let modulus_bits = if p == 2 {
            modulus
                .iter()
                .enumerate()
                .fold(0u128, |acc, (i, &c)| acc | ((c as u128) << i))
        } else {
            0
        };
        let mut inner = Inner {
            p,
            d,
            q,
            modulus: modulus.to_vec(),
            modulus_bits,
            generator: FieldElement(1),
            tables: None,
        };
        inner.generator = find_generator(&inner);
        if p == 2 && d <= TABLE_MAX_DEGREE {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldSpec(Arc::new(inner)))
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.0.p
    }

    #[inline]
    pub fn d(&self) -> u32 {
        self.0.d
    }

    /// Field order `p^d`.
    #[inline]
    pub fn q(&self) -> u64 {
        self.0.q
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.0.tables.is_some()
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.0.q
    }

    /// Validates an element encoding.
    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if value < self.0.q {
            Ok(FieldElement(value))
        } else {
            Err(FieldError::NotAnElement { value, q: self.0.q })
        }
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, k: i64) -> FieldElement {
        FieldElement(k.rem_euclid(self.0.p as i64) as u64)
    }

    /// Coefficients of the polynomial representative, constant term first.
    pub fn digits(&self, a: FieldElement) -> Vec<u64> {
        digits_of(a.0, self.0.p, self.0.d as usize)
    }

    pub fn from_digits(&self, digits: &[u64]) -> Result<FieldElement, FieldError> {
        if digits.len() > self.0.d as usize || digits.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::BadModulus {
                p: self.0.p,
                d: self.0.d,
            });
        }
        Ok(FieldElement(pack_digits(digits, self.0.p)))
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.q).map(FieldElement)
    }

    pub fn check_same(&self, other: &FieldSpec) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::Mismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.0.p;
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.0.d == 1 {
            return FieldElement((a.0 + b.0) % p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.0.d {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        if self.0.d == 1 {
            return FieldElement((p - a.0) % p);
        }
        let mut x = a.0;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.0.d {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.0.p == 2 {
            FieldElement(a.0 ^ b.0)
        } else {
            self.add(a, self.neg(b))
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        match &self.0.tables {
            Some(t) => {
                FieldElement(t.exp[t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize])
            }
            None => self.mul_reduction(a, b),
        }
    }

    /// Multiplication by polynomial product and modular reduction, never
    /// using tables.
    pub fn mul_reduction(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        mul_reduction(&self.0, a, b)
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(match &self.0.tables {
            Some(t) => {
                let order = (self.0.q - 1) as usize;
                let l = t.log[a.0 as usize] as usize;
                FieldElement(t.exp[(order - l) % order])
            }
            None => self.pow(a, self.0.q - 2),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^(p^k)`, the `k`-th iterate of the Frobenius automorphism.
    pub fn frobenius(&self, a: FieldElement, k: u64) -> FieldElement {
        let steps = k % self.0.d as u64;
        let mut out = a;
        for _ in 0..steps {
            out = self.pow(out, self.0.p);
        }
        out
    }

    /// A generator of the multiplicative group: the residue class of `x` when
    /// it is primitive, otherwise the primitive element with the smallest
    /// encoding.
    pub fn primitive_element(&self) -> FieldElement {
        self.0.generator
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElement) -> Result<u64, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let mut order = self.0.q - 1;
        for r in prime_factors(self.0.q - 1) {
            while order.is_multiple_of(r) && self.pow(a, order / r) == FieldElement(1) {
                order /= r;
            }
        }
        Ok(order)
    }
}

impl From<u64> for FieldElement {
    fn from(v: u64) -> Self {
        FieldElement(v)
    }
}

/// The `h x h` Moore matrix with entry `(r, c) = alphas[c]^(p^r)`.
pub fn moore_matrix(field: &FieldSpec, alphas: &[FieldElement]) -> Result<Matrix, FieldError> {
    let h = alphas.len();
    if (field.d() as usize) < h {
        return Err(FieldError::MooreDegree { d: field.d(), h });
    }
    if let Some(&bad) = alphas.iter().find(|a| !field.contains(**a)) {
        return Err(FieldError::NotAnElement {
            value: bad.0,
            q: field.q(),
        });
    }
    let mut m = Matrix::zeros(field, h, h);
    for (c, &alpha) in alphas.iter().enumerate() {
        let mut v = alpha;
        for r in 0..h {
            m.set(r, c, v);
            v = field.pow(v, field.p());
        }
    }
    Ok(m)
}

fn mul_reduction(f: &Inner, a: FieldElement, b: FieldElement) -> FieldElement {
    let d = f.d as usize;
    if f.p == 2 {
        let mut prod: u128 = 0;
        let (x, mut y) = (a.0 as u128, b.0);
        let mut shift = 0;
        while y != 0 {
            if y & 1 == 1 {
                prod ^= x << shift;
            }
            y >>= 1;
            shift += 1;
        }
        for bit in (d..2 * d.max(1)).rev() {
            if prod >> bit & 1 == 1 {
                prod ^= f.modulus_bits << (bit - d);
            }
        }
        return FieldElement(prod as u64);
    }
    let p = f.p as u128;
    if d == 1 {
        return FieldElement(((a.0 as u128 * b.0 as u128) % p) as u64);
    }
    let x = digits_of(a.0, f.p, d);
    let y = digits_of(b.0, f.p, d);
    let mut prod = vec![0u128; 2 * d - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + xi as u128 * yj as u128) % p;
        }
    }
    for k in (d..2 * d - 1).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (i, &mi) in f.modulus.iter().enumerate() {
            let slot = &mut prod[k - d + i];
            *slot = (*slot + p - (c * mi as u128) % p) % p;
        }
    }
    let packed: Vec<u64> = prod[..d].iter().map(|&c| c as u64).collect();
    FieldElement(pack_digits(&packed, f.p))
}

fn pow_reduction(f: &Inner, a: FieldElement, mut e: u64) -> FieldElement {
    let mut base = a;
    let mut acc = FieldElement(1);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_reduction(f, acc, base);
        }
        base = mul_reduction(f, base, base);
        e >>= 1;
    }
    acc
}

fn find_generator(f: &Inner) -> FieldElement {
    let order = f.q - 1;
    let factors = prime_factors(order);
    let is_primitive = |g: FieldElement| {
        g.0 != 0 && factors.iter().all(|&r| pow_reduction(f, g, order / r) != FieldElement(1))
    };
    let x = if f.d >= 2 {
        FieldElement(f.p)
    } else {
        FieldElement((f.p - f.modulus[0]) % f.p)
    };
    if is_primitive(x) {
        return x;
    }
    (1..f.q)
        .map(FieldElement)
        .find(|&g| is_primitive(g))
        .expect("the multiplicative group of a finite field is cyclic")
}

fn build_tables(f: &Inner) -> LogTables {
    let order = (f.q - 1) as usize;
    let mut log = vec![0u32; f.q as usize];
    let mut exp = vec![0u64; 2 * order.max(1)];
    let mut v = FieldElement(1);
    for i in 0..order {
        exp[i] = v.0;
        exp[i + order] = v.0;
        log[v.0 as usize] = i as u32;
        v = mul_reduction(f, v, f.generator);
    }
    LogTables { log, exp }
}

fn digits_of(mut v: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v % p);
        v /= p;
    }
    out
}

fn pack_digits(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Returns `(p, d)` when `q = p^d` for a prime `p` and `d >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = *prime_factors(q).first()?;
    let mut rest = q;
    let mut d = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        d += 1;
    }
    (rest == 1).then_some((p, d))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over GF(p), constant term first, used only for
/// irreducibility testing.
mod poly {
    fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        super::pow_mod(a, p - 2, p)
    }

    fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let k = r.len() - 1;
            let c = super::mul_mod(r[k], lead_inv, p);
            for (i, &mi) in m.iter().enumerate() {
                let slot = &mut r[k - dm + i];
                *slot = (*slot + p - super::mul_mod(c, mi, p)) % p;
            }
            trim(&mut r);
        }
        r
    }

    fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + super::mul_mod(x, y, p)) % p;
            }
        }
        rem(&prod, m, p)
    }

    fn pow_rem(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, m, p);
        let mut acc = rem(&[1], m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_rem(&acc, &base, m, p);
            }
            base = mul_rem(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Ben-Or: a degree-d polynomial is irreducible iff it shares no factor
    /// with `x^(p^i) - x` for `1 <= i <= d/2`.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let d = f.len() - 1;
        if d == 0 || f[d] == 0 {
            return false;
        }
        let x = [0, 1];
        let mut xp = rem(&x, f, p);
        for _ in 0..d / 2 {
            xp = pow_rem(&xp, p, f, p);
            let mut diff = xp.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            if diff.is_empty() {
                return false;
            }
            if gcd(f, &diff, p).len() > 1 {
                return false;
            }
        }
        true
    }
}
