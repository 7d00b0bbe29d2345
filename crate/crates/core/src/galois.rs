//! Table-driven arithmetic in GF(p^n).
//!
//! Elements are packed as integers in `[0, p^n)`: digit `i` in base `p` is the
//! coefficient of `x^i` in the polynomial representative. Multiplication goes
//! through log/antilog tables built from a primitive modulus, so the residue
//! class of `x` (index `p`, or the primitive root itself when `n = 1`) generates
//! the multiplicative group.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;
/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 8;

/// Fields up to this order keep a full addition table for odd characteristic.
const ADD_TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("GF({p}^{n}) is outside the supported range (n <= {MAX_DEGREE}, p^n <= 2^20)")]
    OutOfBounds { p: u32, n: u32 },
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("subfield degree {m} does not divide {n}")]
    NotADivisor { m: u32, n: u32 },
    #[error("element index {index} out of range for field of order {order}")]
    BadElement { index: u32, order: u32 },
    #[error("fields have different characteristic")]
    CharacteristicMismatch,
}

/// An element of some [`Field`], identified by its packed index.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u32 {
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

/// A finite field GF(p^n) with precomputed tables.
pub struct Field {
    p: u32,
    n: u32,
    order: u32,
    modulus: Vec<u32>,
    /// `exp[k] = g^k` for `k < 2(order-1)`.
    exp: Vec<u32>,
    /// `log[e]` for `e != 0`.
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Option<Vec<u16>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^e` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u32, e))
}

/// Integer square root of a perfect square.
pub fn exact_sqrt(q: u64) -> Option<u64> {
    let r = (q as f64).sqrt().round() as u64;
    (r.checked_mul(r) == Some(q)).then_some(r)
}

impl Field {
    /// Builds GF(p^n) over the lexicographically smallest monic primitive
    /// polynomial of degree `n`. Candidates `x^n + c_{n-1}x^{n-1} + ... + c_0`
    /// are ranked by the base-p integer `sum c_i p^i`.
    pub fn new(p: u32, n: u32) -> Result<Field, GaloisError> {
        if !is_prime(p) {
            return Err(GaloisError::NotPrime(p));
        }
        if n == 0 || n > MAX_DEGREE || (p as u64).pow(n) > MAX_ORDER {
            return Err(GaloisError::OutOfBounds { p, n });
        }
        let order = p.pow(n);
        let tail = (0..order)
            .map(|r| digits(r, p, n))
            .find(|tail| antilog_sequence(p, tail).is_some())
            .expect("a primitive polynomial exists for every degree");
        let exp1 = antilog_sequence(p, &tail).unwrap();
        let mut modulus = tail;
        modulus.push(1);

        let group = (order - 1) as usize;
        let mut exp = Vec::with_capacity(2 * group);
        exp.extend_from_slice(&exp1);
        exp.extend_from_slice(&exp1);
        let mut log = vec![0u32; order as usize];
        for (k, &e) in exp1.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        let neg = (0..order).map(|e| digit_neg(e, p, n)).collect();
        let add_table = (p != 2 && order <= ADD_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity((order * order) as usize);
            for a in 0..order {
                for b in 0..order {
                    t.push(digit_add(a, b, p, n) as u16);
                }
            }
            t
        });
        Ok(Field { p, n, order, modulus, exp, log, neg, add_table })
    }

    /// Shorthand for `Arc::new(Field::new(p, n)?)`.
    pub fn shared(p: u32, n: u32) -> Result<Arc<Field>, GaloisError> {
        Field::new(p, n).map(Arc::new)
    }

    /// Field of order `q`, for `q` a prime power.
    pub fn of_order(q: u64) -> Result<Arc<Field>, GaloisError> {
        let (p, n) = prime_power(q).ok_or(GaloisError::NotPrime(q as u32))?;
        Field::shared(p, n)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Monic modulus, low-degree coefficient first (`n + 1` entries).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The primitive element `g` with `log(g) = 1`.
    pub fn generator(&self) -> FieldElement {
        FieldElement(self.exp[1 % self.exp.len().max(1)])
    }

    pub fn element(&self, index: u32) -> Result<FieldElement, GaloisError> {
        if index < self.order {
            Ok(FieldElement(index))
        } else {
            Err(GaloisError::BadElement { index, order: self.order })
        }
    }

    /// Element from an index already known to be in range.
    #[inline]
    pub fn el(&self, index: u32) -> FieldElement {
        debug_assert!(index < self.order);
        FieldElement(index)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.order).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.order).map(FieldElement)
    }

    /// The image of the integer `k` under `Z -> GF(p)`.
    pub fn from_int(&self, k: i64) -> FieldElement {
        FieldElement(k.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        match &self.add_table {
            Some(t) => FieldElement(t[(a.0 * self.order + b.0) as usize] as u32),
            None => FieldElement(digit_add(a.0, b.0, self.p, self.n)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[k as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GaloisError> {
        if a.is_zero() {
            return Err(GaloisError::ZeroInverse);
        }
        let group = self.order - 1;
        let k = (group - self.log[a.0 as usize]) % group;
        Ok(FieldElement(self.exp[k as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GaloisError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k`; negative exponents invert. `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, k: i64) -> Result<FieldElement, GaloisError> {
        if a.is_zero() {
            return match k {
                0 => Ok(FieldElement::ONE),
                k if k > 0 => Ok(FieldElement::ZERO),
                _ => Err(GaloisError::ZeroInverse),
            };
        }
        let group = (self.order - 1) as i64;
        let e = (self.log[a.0 as usize] as i64 * k.rem_euclid(group)).rem_euclid(group);
        Ok(FieldElement(self.exp[e as usize]))
    }

    /// `a^k` for a non-negative exponent.
    #[inline]
    pub fn pow_u(&self, a: FieldElement, k: u64) -> FieldElement {
        if a.is_zero() {
            return if k == 0 { FieldElement::ONE } else { FieldElement::ZERO };
        }
        let group = (self.order - 1) as u64;
        let e = (self.log[a.0 as usize] as u64 * (k % group)) % group;
        FieldElement(self.exp[e as usize])
    }

    /// Discrete logarithm to base [`Field::generator`]; `None` for zero.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize])
    }

    /// `g^k` for the generator `g`.
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.exp[(k % (self.order as u64 - 1)) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: FieldElement) -> Option<u32> {
        let l = self.log(a)?;
        let group = self.order - 1;
        Some(group / num_integer::gcd(l, group))
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: FieldElement, k: u32) -> FieldElement {
        self.pow_u(a, (self.p as u64).pow(k % self.n))
    }

    /// Relative trace down to GF(p^m): `sum_j a^(p^(mj))`.
    pub fn rel_trace(&self, a: FieldElement, m: u32) -> Result<FieldElement, GaloisError> {
        self.check_divisor(m)?;
        let mut acc = FieldElement::ZERO;
        let mut term = a;
        for _ in 0..self.n / m {
            acc = self.add(acc, term);
            term = self.frobenius(term, m);
        }
        Ok(acc)
    }

    /// Relative norm down to GF(p^m): `a^((p^n - 1)/(p^m - 1))`.
    pub fn rel_norm(&self, a: FieldElement, m: u32) -> Result<FieldElement, GaloisError> {
        self.check_divisor(m)?;
        let e = (self.order as u64 - 1) / ((self.p as u64).pow(m) - 1);
        Ok(self.pow_u(a, e))
    }

    /// True iff `a = s^2` for some `s` (zero included).
    pub fn is_square(&self, a: FieldElement) -> bool {
        if a.is_zero() || self.p == 2 {
            return true;
        }
        self.pow_u(a, (self.order as u64 - 1) / 2) == FieldElement::ONE
    }

    /// The base-p digits of an element (coefficient of `x^i` at position `i`).
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0, self.p, self.n)
    }

    fn check_divisor(&self, m: u32) -> Result<(), GaloisError> {
        if m == 0 || self.n % m != 0 {
            Err(GaloisError::NotADivisor { m, n: self.n })
        } else {
            Ok(())
        }
    }
}

fn digits(mut v: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn digit_add(a: u32, b: u32, p: u32, n: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut place = 1;
    for _ in 0..n {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn digit_neg(a: u32, p: u32, n: u32) -> u32 {
    let mut a = a;
    let mut out = 0;
    let mut place = 1;
    for _ in 0..n {
        out += ((p - a % p) % p) * place;
        a /= p;
        place *= p;
    }
    out
}

/// Powers `1, x, x^2, ...` modulo `x^n + tail`, or `None` unless `x` has
/// multiplicative order exactly `p^n - 1` (which forces the quotient ring to
/// be a field, hence the polynomial primitive).
fn antilog_sequence(p: u32, tail: &[u32]) -> Option<Vec<u32>> {
    let n = tail.len();
    if tail[0] == 0 {
        return None;
    }
    let order = p.pow(n as u32);
    let group = (order - 1) as usize;
    let mut seq = Vec::with_capacity(group);
    let mut cur = vec![0u32; n];
    cur[0] = 1;
    for k in 0..group {
        let packed = cur.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        if k > 0 && packed == 1 {
            return None;
        }
        seq.push(packed);
        // multiply by x and reduce: x^n = -tail
        let top = cur[n - 1];
        for i in (1..n).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..n {
                cur[i] = (cur[i] + (p - top) * tail[i]) % p;
            }
        }
    }
    let packed = cur.iter().rev().fold(0u32, |acc, &d| acc * p + d);
    (packed == 1).then_some(seq)
}

/// Embedding GF(p^m) -> GF(p^n) for `m | n`.
///
/// The image of the subfield generator is the smallest-index root of the
/// subfield's modulus inside the larger field.
#[derive(Debug, Clone)]
pub struct TowerMap {
    sub: Arc<Field>,
    sub_degree: u32,
    table: Vec<FieldElement>,
    /// Inverse of `table` on its image, `u32::MAX` elsewhere.
    preimage: Vec<u32>,
}

impl TowerMap {
    pub fn new(ext: &Field, sub_degree: u32) -> Result<TowerMap, GaloisError> {
        ext.check_divisor(sub_degree)?;
        let sub = Field::shared(ext.p, sub_degree)?;
        TowerMap::between(sub, ext)
    }

    /// Tower over an existing subfield descriptor.
    pub fn between(sub: Arc<Field>, ext: &Field) -> Result<TowerMap, GaloisError> {
        if sub.p != ext.p {
            return Err(GaloisError::CharacteristicMismatch);
        }
        ext.check_divisor(sub.n)?;
        let root = ext
            .elements()
            .find(|&h| {
                // prime-field constants share indices across the tower
                let mut acc = FieldElement::ZERO;
                for &c in sub.modulus.iter().rev() {
                    acc = ext.add(ext.mul(acc, h), FieldElement(c));
                }
                acc.is_zero()
            })
            .expect("subfield modulus splits in the extension");
        let mut table = vec![FieldElement::ZERO; sub.order as usize];
        let mut preimage = vec![u32::MAX; ext.order as usize];
        preimage[0] = 0;
        for k in 0..(sub.order - 1) as u64 {
            let s = sub.exp(k);
            let e = ext.pow_u(root, k);
            table[s.0 as usize] = e;
            preimage[e.0 as usize] = s.0;
        }
        Ok(TowerMap { sub_degree: sub.n, sub, table, preimage })
    }

    pub fn subfield(&self) -> &Arc<Field> {
        &self.sub
    }

    pub fn sub_degree(&self) -> u32 {
        self.sub_degree
    }

    #[inline]
    pub fn embed(&self, a: FieldElement) -> FieldElement {
        self.table[a.0 as usize]
    }

    /// Preimage of `e` if it lies in the subfield image.
    pub fn project(&self, e: FieldElement) -> Option<FieldElement> {
        match self.preimage[e.0 as usize] {
            u32::MAX => None,
            s => Some(FieldElement(s)),
        }
    }

    /// The image, in subfield index order.
    pub fn image(&self) -> &[FieldElement] {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_moduli() {
        assert_eq!(Field::new(2, 1).unwrap().modulus(), &[1, 1]);
        assert_eq!(Field::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(3, 1).unwrap().generator(), FieldElement(2));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(4, 1).unwrap_err(), GaloisError::NotPrime(4));
        assert!(matches!(Field::new(2, 9), Err(GaloisError::OutOfBounds { .. })));
        assert!(matches!(Field::new(2, 0), Err(GaloisError::OutOfBounds { .. })));
        assert!(matches!(Field::new(11, 6), Err(GaloisError::OutOfBounds { .. })));
    }

    #[test]
    fn gf4_identities() {
        let f = Field::new(2, 2).unwrap();
        let w = f.generator();
        let w2 = f.mul(w, w);
        assert_eq!(f.mul(w, w2), f.one());
        assert_eq!(f.frobenius(w, 1), w2);
        assert_eq!(f.rel_trace(f.one(), 1).unwrap(), f.zero());
        assert_eq!(f.rel_trace(w, 1).unwrap(), f.one());
        assert_eq!(f.rel_norm(w, 1).unwrap(), f.one());
        // w^2 = w + 1
        assert_eq!(w2, f.add(w, f.one()));
    }

    #[test]
    fn generator_orders() {
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.pow(f9.generator(), 8).unwrap(), f9.one());
        assert_eq!(f9.multiplicative_order(f9.generator()), Some(8));
        let f81 = Field::new(3, 4).unwrap();
        assert_eq!(f81.multiplicative_order(f81.generator()), Some(80));
    }

    #[test]
    fn inverse_by_antilog() {
        let f = Field::new(2, 4).unwrap();
        let g = f.generator();
        let g5 = f.pow(g, 5).unwrap();
        assert_eq!(f.inv(g5).unwrap(), f.pow(g, 10).unwrap());
        assert_eq!(f.inv(f.zero()), Err(GaloisError::ZeroInverse));
        assert_eq!(f.pow(g5, -1).unwrap(), f.pow(g, 10).unwrap());
        assert_eq!(f.pow(f.zero(), -2), Err(GaloisError::ZeroInverse));
        assert_eq!(f.pow(f.zero(), 0).unwrap(), f.one());
    }

    #[test]
    fn frobenius_full_degree_is_identity() {
        let f = Field::new(3, 4).unwrap();
        for e in f.elements() {
            assert_eq!(f.frobenius(e, 4), e);
        }
        assert_eq!(f.frobenius(f.zero(), 3), f.zero());
    }

    #[test]
    fn squares() {
        let f9 = Field::new(3, 2).unwrap();
        assert!(f9.is_square(f9.zero()));
        assert!(!f9.is_square(f9.generator()));
        let f25 = Field::new(5, 2).unwrap();
        assert!(f25.is_square(f25.pow(f25.generator(), 2).unwrap()));
        let count = f25.nonzero_elements().filter(|&e| f25.is_square(e)).count();
        assert_eq!(count, 12);
    }

    #[test]
    fn trace_and_norm_divisor_errors() {
        let f = Field::new(2, 4).unwrap();
        assert!(matches!(f.rel_trace(f.one(), 3), Err(GaloisError::NotADivisor { .. })));
        assert!(matches!(f.rel_norm(f.one(), 0), Err(GaloisError::NotADivisor { .. })));
    }

    #[test]
    fn norm_fibres_gf9() {
        let f = Field::new(3, 2).unwrap();
        let mut fibre = std::collections::BTreeMap::new();
        for e in f.nonzero_elements() {
            *fibre.entry(f.rel_norm(e, 1).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(fibre.len(), 2);
        assert!(fibre.values().all(|&c| c == 4));
    }

    #[test]
    fn tower_is_fixed_field() {
        let big = Field::new(3, 4).unwrap();
        let tower = TowerMap::new(&big, 1).unwrap();
        let mut image: Vec<_> = tower.image().to_vec();
        image.sort();
        let fixed: Vec<_> = big.elements().filter(|&e| big.frobenius(e, 1) == e).collect();
        assert_eq!(image, fixed);
        assert_eq!(tower.embed(FieldElement::ZERO), FieldElement::ZERO);
        assert_eq!(tower.embed(FieldElement::ONE), FieldElement::ONE);
    }

    #[test]
    fn tower_is_homomorphism() {
        for (p, n, m) in [(2, 4, 2), (3, 4, 2), (2, 6, 3), (2, 6, 2), (5, 2, 1), (3, 2, 1)] {
            let big = Field::new(p, n).unwrap();
            let tower = TowerMap::new(&big, m).unwrap();
            let sub = tower.subfield().clone();
            for a in sub.elements() {
                assert_eq!(tower.project(tower.embed(a)), Some(a));
                for b in sub.elements() {
                    assert_eq!(tower.embed(sub.add(a, b)), big.add(tower.embed(a), tower.embed(b)));
                    assert_eq!(tower.embed(sub.mul(a, b)), big.mul(tower.embed(a), tower.embed(b)));
                }
            }
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(625), Some((5, 4)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(exact_sqrt(81), Some(9));
        assert_eq!(exact_sqrt(8), None);
    }
}
