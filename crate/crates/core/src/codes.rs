//! The projective code of a point set and its weight enumerator.
//!
//! For a spanning set `X` of PG(2,Q) each nonzero message `(u, v, w)` gives a
//! codeword whose zero coordinates are the points of `X` on the line
//! `[u:v:w]`, so the weight enumerator follows from the intersection
//! enumerator: `A_{|X| - i} = (Q - 1) e_i`. Small cases are also enumerated
//! message by message as an independent check.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classify::IntersectionEnumerator;
use crate::galois::{Field, FieldElement};
use crate::pointset::PointSet;

/// Largest message space enumerated by [`weights_exhaustive`].
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 24;
/// Largest length for which the dual distance is found by subset search.
pub const DUAL_SEARCH_LIMIT: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("point set does not span the plane (rank {rank})")]
    NotSpanning { rank: usize },
    #[error("message space Q^3 = {0} exceeds the exhaustive limit")]
    TooLarge(u64),
    #[error("unknown code family {0:?}")]
    UnknownFamily(String),
    #[error("modulus must be at least 2")]
    BadModulus,
}

#[derive(Clone)]
pub struct GeneratorMatrix {
    field: Arc<Field>,
    columns: Vec<[FieldElement; 3]>,
}

impl fmt::Debug for GeneratorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeneratorMatrix(3 x {} over GF({}))", self.columns.len(), self.field.order())
    }
}

impl GeneratorMatrix {
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[[FieldElement; 3]] {
        &self.columns
    }

    pub fn rank(&self) -> usize {
        rank(&self.field, &self.columns)
    }

    /// Header `p n modulus... Q 3 cols`, then one row of element indices per line.
    pub fn to_text(&self) -> String {
        let f = &self.field;
        let mut out = String::new();
        write!(out, "{} {}", f.characteristic(), f.degree()).unwrap();
        for c in f.modulus() {
            write!(out, " {c}").unwrap();
        }
        writeln!(out, " {} 3 {}", f.order(), self.columns.len()).unwrap();
        for r in 0..3 {
            let row: Vec<String> = self.columns.iter().map(|c| c[r].to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }
}

/// Rank of a set of vectors in GF(Q)^3.
fn rank(f: &Field, vectors: &[[FieldElement; 3]]) -> usize {
    let mut basis: Vec<[FieldElement; 3]> = Vec::with_capacity(3);
    let mut pivots: Vec<usize> = Vec::with_capacity(3);
    for v in vectors {
        let mut v = *v;
        for (b, &pc) in basis.iter().zip(&pivots) {
            if !v[pc].is_zero() {
                let factor = f.div(v[pc], b[pc]).unwrap();
                for k in 0..3 {
                    v[k] = f.sub(v[k], f.mul(factor, b[k]));
                }
            }
        }
        if let Some(pc) = (0..3).find(|&k| !v[k].is_zero()) {
            basis.push(v);
            pivots.push(pc);
            if basis.len() == 3 {
                break;
            }
        }
    }
    basis.len()
}

/// Columns are the normalized coordinates of the members in index order.
pub fn code_from_set(x: &PointSet) -> Result<GeneratorMatrix, CodeError> {
    let field = x.field().clone();
    let columns: Vec<[FieldElement; 3]> = x.points().map(|p| p.coords).collect();
    let r = rank(&field, &columns);
    if r < 3 {
        return Err(CodeError::NotSpanning { rank: r });
    }
    Ok(GeneratorMatrix { field, columns })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightEnumerator {
    pub length: usize,
    pub order: u32,
    /// `w -> A_w`, zero coefficients omitted.
    pub coeffs: BTreeMap<usize, u64>,
}

impl WeightEnumerator {
    pub fn total(&self) -> u64 {
        self.coeffs.values().sum()
    }

    /// Nonzero weights that occur, ascending.
    pub fn weights(&self) -> Vec<usize> {
        self.coeffs.keys().copied().filter(|&w| w > 0).collect()
    }

    pub fn min_weight(&self) -> Option<usize> {
        self.weights().first().copied()
    }
}

/// `A_0 = 1` and `A_{|X| - i} += (Q - 1) e_i`.
pub fn weights_from_enumerator(x: &PointSet, e: &IntersectionEnumerator) -> Result<WeightEnumerator, CodeError> {
    let n = x.len();
    // spanning iff no line holds all of X
    if n < 3 || e.e(n) > 0 {
        let rank = if n == 0 { 0 } else if n == 1 { 1 } else { 2 };
        return Err(CodeError::NotSpanning { rank });
    }
    let q1 = e.order() as u64 - 1;
    let mut coeffs = BTreeMap::from([(0usize, 1u64)]);
    for (&i, &count) in e.global() {
        *coeffs.entry(n - i).or_insert(0) += q1 * count;
    }
    Ok(WeightEnumerator { length: n, order: e.order(), coeffs })
}

/// Weight of every codeword `(u, v, w) G`, all `Q^3` messages.
pub fn weights_exhaustive(g: &GeneratorMatrix) -> Result<WeightEnumerator, CodeError> {
    let f = g.field.clone();
    let q = f.order() as u64;
    if q * q * q > EXHAUSTIVE_LIMIT {
        return Err(CodeError::TooLarge(q * q * q));
    }
    let coeffs = f
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|u| {
            let mut local: BTreeMap<usize, u64> = BTreeMap::new();
            for v in f.elements() {
                for w in f.elements() {
                    let weight = g
                        .columns
                        .iter()
                        .filter(|c| {
                            let s = f.add(f.add(f.mul(u, c[0]), f.mul(v, c[1])), f.mul(w, c[2]));
                            !s.is_zero()
                        })
                        .count();
                    *local.entry(weight).or_insert(0) += 1;
                }
            }
            local
        })
        .reduce(BTreeMap::new, crate::constructions::merge_histograms);
    Ok(WeightEnumerator { length: g.len(), order: f.order(), coeffs })
}

/// gcd of the nonzero weights that occur (0 if there are none).
pub fn divisibility(w: &WeightEnumerator) -> u64 {
    w.weights().into_iter().fold(0u64, |g, wt| g.gcd(&(wt as u64)))
}

/// Weight enumerator with coefficients reduced modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedEnumerator {
    pub modulus: u64,
    /// `w -> A_w mod M`, zero residues omitted.
    pub terms: BTreeMap<usize, u64>,
}

impl ReducedEnumerator {
    /// Residues in `(-M/2, M/2]`.
    pub fn signed_terms(&self) -> BTreeMap<usize, i64> {
        let m = self.modulus as i64;
        self.terms
            .iter()
            .map(|(&w, &c)| {
                let c = c as i64;
                (w, if 2 * c > m { c - m } else { c })
            })
            .collect()
    }

    pub fn render(&self) -> String {
        render_poly(self.terms.iter().map(|(&w, &c)| (w, c as i64)))
    }

    pub fn render_signed(&self) -> String {
        render_poly(self.signed_terms().into_iter())
    }
}

fn render_poly(terms: impl Iterator<Item = (usize, i64)>) -> String {
    let mut out = String::new();
    for (w, c) in terms {
        let sign = if c < 0 { "-" } else { "+" };
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            write!(out, " {sign} ").unwrap();
        }
        let a = c.unsigned_abs();
        match (w, a) {
            (0, _) => write!(out, "{a}").unwrap(),
            (_, 1) => write!(out, "x^{w}").unwrap(),
            _ => write!(out, "{a}x^{w}").unwrap(),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn reduce_mod(w: &WeightEnumerator, modulus: u64) -> Result<ReducedEnumerator, CodeError> {
    if modulus < 2 {
        return Err(CodeError::BadModulus);
    }
    let terms = w.coeffs.iter().map(|(&k, &a)| (k, a % modulus)).filter(|&(_, r)| r != 0).collect();
    Ok(ReducedEnumerator { modulus, terms })
}

/// Construction families with known congruences for `e_i` and reductions of
/// the weight enumerator. The plane is PG(2, q^h).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CodeFamily {
    RegularPointed { q: u64, h: u32 },
    /// `Tr(y + f(x)) = N(x)` in PG(2, q^2).
    TraceNorm { q: u64 },
    /// `S' ∪ {(∞)}` lifted from a regular set of pointed type `[t; ...]`
    /// of PG(2, q) with an `s`-dimensional subspace.
    Lift { q: u64, h: u32, s: u32, t: u64 },
}

impl FromStr for CodeFamily {
    type Err = CodeError;

    /// `regular-pointed:q,h`, `trace-norm:q` or `lift:q,h,s,t`.
    fn from_str(s: &str) -> Result<Self, CodeError> {
        let bad = || CodeError::UnknownFamily(s.to_string());
        let (tag, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<u64> = args.split(',').map(|a| a.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        match (tag, nums.as_slice()) {
            ("regular-pointed", [q, h]) => Ok(CodeFamily::RegularPointed { q: *q, h: *h as u32 }),
            ("trace-norm", [q]) => Ok(CodeFamily::TraceNorm { q: *q }),
            ("lift", [q, h, s, t]) => Ok(CodeFamily::Lift { q: *q, h: *h as u32, s: *s as u32, t: *t }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Congruence {
    /// Which coefficient, or `None` for "every other nonzero `e_i`".
    pub coefficient: usize,
    pub value: u64,
    pub modulus: u64,
    pub expected: u64,
    /// `true` when the expected value is exact rather than a residue.
    pub exact: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisibilityReport {
    pub family: CodeFamily,
    pub checks: Vec<Congruence>,
    pub pass: bool,
}

/// Checks the family's congruences on every realized coefficient `e_i`.
pub fn enumerator_divisibility_check(
    e: &IntersectionEnumerator,
    family: CodeFamily,
) -> DivisibilityReport {
    let mut checks = Vec::new();
    let residue = |checks: &mut Vec<Congruence>, i: usize, modulus: u64, expected: u64| {
        let value = e.e(i);
        checks.push(Congruence {
            coefficient: i,
            value,
            modulus,
            expected: expected % modulus,
            exact: false,
            pass: value % modulus == expected % modulus,
        });
    };
    match family {
        CodeFamily::RegularPointed { q, h } => {
            let m = q.pow(h);
            for &i in e.global().keys() {
                residue(&mut checks, i, m, if i == 1 { 1 } else { 0 });
            }
        }
        CodeFamily::TraceNorm { q } => {
            let m = q.pow(3);
            for &i in e.global().keys() {
                let expected = match i as u64 {
                    1 => 1,
                    k if k == q + 1 => q * q,
                    _ => 0,
                };
                residue(&mut checks, i, m, expected);
            }
        }
        CodeFamily::Lift { q, h, s, t } => {
            let m = q.pow(2 * s + 1);
            let special = (q.pow(s) * t + 1) as usize;
            for &i in e.global().keys() {
                if i == special {
                    let value = e.e(i);
                    checks.push(Congruence { coefficient: i, value, modulus: 0, expected: q, exact: true, pass: value == q });
                } else if i == 1 {
                    residue(&mut checks, i, m, q.pow(h) - q + 1);
                } else {
                    residue(&mut checks, i, m, 0);
                }
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    DivisibilityReport { family, checks, pass }
}

/// The closed-form reduction of the weight enumerator for a family, as
/// nonnegative residues. `set_size` is `|X|`.
pub fn expected_reduction(family: CodeFamily, set_size: usize) -> ReducedEnumerator {
    let mut terms = BTreeMap::from([(0usize, 1u64)]);
    let modulus = match family {
        CodeFamily::RegularPointed { q, h } => {
            let m = q.pow(h);
            terms.insert(set_size - 1, m - 1);
            m
        }
        CodeFamily::TraceNorm { q } => {
            let m = q.pow(3);
            terms.insert((q * q * q - q) as usize, m - q * q);
            terms.insert((q * q * q) as usize, q * q - 1);
            m
        }
        CodeFamily::Lift { q, h, s, t } => {
            let m = q.pow(2 * s + 1) as i128;
            let a = ((q.pow(h + 1) - q) as i128).rem_euclid(m) as u64;
            let b = (-(q.pow(h + 1) as i128) + q as i128 - 1).rem_euclid(m) as u64;
            let w1 = (t * q.pow(s) * (q - 1)) as usize;
            let w2 = (t * q.pow(s + 1)) as usize;
            *terms.entry(w1).or_insert(0) += a;
            *terms.entry(w2).or_insert(0) += b;
            m as u64
        }
    };
    terms.retain(|_, c| {
        *c %= modulus;
        *c != 0
    });
    ReducedEnumerator { modulus, terms }
}

/// Smallest number of linearly dependent columns, by subset search.
pub fn dual_distance_exhaustive(g: &GeneratorMatrix, max: usize) -> Option<usize> {
    let cols = &g.columns;
    let f = &g.field;
    for size in 1..=max.min(cols.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let subset: Vec<[FieldElement; 3]> = idx.iter().map(|&i| cols[i]).collect();
            if rank(f, &subset) < size {
                return Some(size);
            }
            // next combination
            let mut k = size;
            while k > 0 && idx[k - 1] == cols.len() - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}

/// Dual distance of the projective code of `X` from its line sizes: 3 when
/// some line carries three points, otherwise 4 (an arc with at least four
/// points).
pub fn dual_distance_geometric(e: &IntersectionEnumerator) -> Option<usize> {
    if e.max_intersection() >= 3 {
        Some(3)
    } else if e.set_size() >= 4 {
        Some(4)
    } else {
        None
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DualParams {
    pub n: usize,
    pub k: usize,
    pub distance: Option<usize>,
    pub method: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CodeReport {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub d_min: usize,
    pub weight_list: Vec<usize>,
    pub weights: BTreeMap<usize, u64>,
    pub divisor: u64,
    pub dual: DualParams,
}

impl CodeReport {
    pub fn parameters(&self) -> String {
        format!("[{},{},{}]_{}", self.n, self.k, self.d_min, self.q)
    }
}

pub fn code_report(x: &PointSet, e: &IntersectionEnumerator) -> Result<CodeReport, CodeError> {
    let g = code_from_set(x)?;
    let w = weights_from_enumerator(x, e)?;
    let n = x.len();
    let (distance, method) = if n <= DUAL_SEARCH_LIMIT {
        (dual_distance_exhaustive(&g, 4), "subset-search")
    } else {
        (dual_distance_geometric(e), "line-sizes")
    };
    Ok(CodeReport {
        n,
        k: 3,
        q: e.order(),
        d_min: n - e.max_intersection(),
        weight_list: w.weights(),
        divisor: divisibility(&w),
        weights: w.coeffs,
        dual: DualParams { n, k: n - 3, distance, method },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::enumerate;
    use crate::plane::Plane;

    fn plane(p: u32, n: u32) -> Arc<Plane> {
        Plane::shared(Field::shared(p, n).unwrap())
    }

    #[test]
    fn frame_plus_unit_point() {
        let pg = plane(3, 1);
        let f = pg.field().clone();
        let pts = [
            pg.point(f.one(), f.zero(), f.zero()).unwrap().index,
            pg.point(f.zero(), f.one(), f.zero()).unwrap().index,
            pg.point(f.zero(), f.zero(), f.one()).unwrap().index,
            pg.point(f.one(), f.one(), f.one()).unwrap().index,
        ];
        let x = PointSet::from_indices(pg, pts, "frame");
        let g = code_from_set(&x).unwrap();
        assert_eq!(g.rank(), 3);
        assert_eq!(g.len(), 4);
        let e = enumerate(&x);
        let a = weights_from_enumerator(&x, &e).unwrap();
        assert_eq!(a, weights_exhaustive(&g).unwrap());
        assert_eq!(a.total(), 27);
        // an arc: dual distance 4
        assert_eq!(dual_distance_exhaustive(&g, 4), Some(4));
        assert_eq!(dual_distance_geometric(&e), Some(4));
    }

    #[test]
    fn collinear_set_rejected() {
        let pg = plane(2, 2);
        let l = pg.line_at(7).unwrap();
        let x = PointSet::from_indices(pg.clone(), pg.points_on_line(&l).iter().map(|p| p.index), "line");
        assert_eq!(code_from_set(&x).unwrap_err(), CodeError::NotSpanning { rank: 2 });
        let e = enumerate(&x);
        assert!(matches!(weights_from_enumerator(&x, &e), Err(CodeError::NotSpanning { .. })));
    }

    #[test]
    fn exhaustive_limit() {
        let pg = plane(3, 6);
        let f = pg.field().clone();
        let x = PointSet::from_indices(
            pg.clone(),
            [pg.affine(f.zero(), f.zero()).index, pg.affine(f.one(), f.zero()).index, pg.infinity().index],
            "tri",
        );
        let g = code_from_set(&x).unwrap();
        assert_eq!(weights_exhaustive(&g).unwrap_err(), CodeError::TooLarge(729 * 729 * 729));
    }

    #[test]
    fn gcd_of_weights() {
        let w = WeightEnumerator { length: 9, order: 4, coeffs: BTreeMap::from([(0, 1), (6, 3)]) };
        assert_eq!(divisibility(&w), 6);
        let w = WeightEnumerator { length: 9, order: 4, coeffs: BTreeMap::from([(0, 1), (6, 3), (9, 2)]) };
        assert_eq!(divisibility(&w), 3);
    }

    #[test]
    fn reduction_and_rendering() {
        let w = WeightEnumerator { length: 730, order: 81, coeffs: BTreeMap::from([(0, 1), (720, 181440), (729, 80), (717, 116640)]) };
        let r = reduce_mod(&w, 729).unwrap();
        assert_eq!(r.terms, BTreeMap::from([(0, 1), (720, 648), (729, 80)]));
        assert_eq!(r.render(), "1 + 648x^720 + 80x^729");
        assert_eq!(r.render_signed(), "1 - 81x^720 + 80x^729");
        assert_eq!(reduce_mod(&w, 1).unwrap_err(), CodeError::BadModulus);
    }

    #[test]
    fn family_tags() {
        assert_eq!("trace-norm:9".parse::<CodeFamily>().unwrap(), CodeFamily::TraceNorm { q: 9 });
        assert_eq!("lift:3,2,1,1".parse::<CodeFamily>().unwrap(), CodeFamily::Lift { q: 3, h: 2, s: 1, t: 1 });
        assert!(matches!("hermitian:3".parse::<CodeFamily>(), Err(CodeError::UnknownFamily(_))));
        assert!(matches!("lift:3,2".parse::<CodeFamily>(), Err(CodeError::UnknownFamily(_))));
    }

    #[test]
    fn expected_trace_norm_reduction() {
        let r = expected_reduction(CodeFamily::TraceNorm { q: 9 }, 730);
        assert_eq!(r.terms, BTreeMap::from([(0, 1), (720, 648), (729, 80)]));
        let r = expected_reduction(CodeFamily::RegularPointed { q: 3, h: 2 }, 28);
        assert_eq!(r.render_signed(), "1 - x^27");
    }
}
