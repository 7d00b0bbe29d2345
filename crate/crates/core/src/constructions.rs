//! Builders for the point-set families: trace-norm curves, touching conic
//! unions, oval-derived sets, subspace lifts and complements, together with
//! the intersection counts of the Hermitian curve with `y = a x^{p^j} + m x + d`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::galois::{Field, FieldElement, GaloisError, TowerMap};
use crate::plane::{Plane, PlaneError};
use crate::pointset::PointSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("GF({0}) is not a quadratic extension (odd degree)")]
    OddDegree(u32),
    #[error("q = {0} is not a perfect square")]
    NotSquare(u64),
    #[error("parameter a must be nonzero")]
    ZeroA,
    #[error("construction needs odd q, got {0}")]
    EvenOrder(u32),
    #[error("empty parameter set B")]
    EmptyB,
    #[error("oval variant {0} is not in 1..=4")]
    BadVariant(u8),
    #[error("base set has ideal point {0} other than (∞)")]
    IdealPoint(u32),
    #[error("subspace basis is linearly dependent over GF(q)")]
    DependentBasis,
    #[error("subspace span meets GF(q) nontrivially")]
    MeetsBaseField,
    #[error("subspace dimension {s} exceeds h - 1 = {}", .h - 1)]
    DimensionTooLarge { s: u32, h: u32 },
    #[error("lift degree h must be at least 2")]
    BadLiftDegree,
    #[error("(∞) is not in the set")]
    MissingInfinity,
    #[error("ℓ∞ is not tangent at (∞): extra ideal point {0}")]
    NotTangentAtInfinity(u32),
    #[error("map has {found} coefficients, expected {expected}")]
    MapShape { expected: usize, found: usize },
    #[error("polynomial degree {degree} is not below the field order {order}")]
    DegreeTooLarge { degree: usize, order: u32 },
    #[error(transparent)]
    Field(#[from] GaloisError),
    #[error(transparent)]
    Plane(#[from] PlaneError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

/// `f(x) = Σ_j c_j x^{p^j}` on GF(p^n); additive by shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdditiveMap {
    pub coeffs: Vec<FieldElement>,
}

impl AdditiveMap {
    pub fn zero(field: &Field) -> AdditiveMap {
        AdditiveMap { coeffs: vec![FieldElement::ZERO; field.degree() as usize] }
    }

    /// `a x^{p^j}`.
    pub fn monomial(field: &Field, j: u32, a: FieldElement) -> AdditiveMap {
        let mut m = AdditiveMap::zero(field);
        m.coeffs[j as usize] = a;
        m
    }

    pub fn eval(&self, field: &Field, x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut power = x;
        for &c in &self.coeffs {
            acc = field.add(acc, field.mul(c, power));
            power = field.frobenius(power, 1);
        }
        acc
    }
}

/// An arbitrary polynomial map, coefficients low degree first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralMap {
    pub poly: Vec<FieldElement>,
}

impl GeneralMap {
    pub fn eval(&self, field: &Field, x: FieldElement) -> FieldElement {
        self.poly.iter().rev().fold(FieldElement::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TraceNormMap {
    Additive(AdditiveMap),
    General(GeneralMap),
}

impl TraceNormMap {
    pub fn eval(&self, field: &Field, x: FieldElement) -> FieldElement {
        match self {
            TraceNormMap::Additive(m) => m.eval(field, x),
            TraceNormMap::General(m) => m.eval(field, x),
        }
    }

    fn validate(&self, field: &Field) -> Result<()> {
        match self {
            TraceNormMap::Additive(m) if m.coeffs.len() != field.degree() as usize => {
                Err(ConstructionError::MapShape { expected: field.degree() as usize, found: m.coeffs.len() })
            }
            TraceNormMap::General(m) if m.poly.len() > field.order() as usize => Err(ConstructionError::DegreeTooLarge {
                degree: m.poly.len() - 1,
                order: field.order(),
            }),
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        let render = |v: &[FieldElement]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        match self {
            TraceNormMap::Additive(m) => format!("additive[{}]", render(&m.coeffs)),
            TraceNormMap::General(m) => format!("poly[{}]", render(&m.poly)),
        }
    }
}

/// Precomputed `Tr` and `N` from GF(q^2) to GF(q) plus the fibres of `Tr`.
pub struct TraceNorm {
    field: Arc<Field>,
    half: u32,
    trace: Vec<FieldElement>,
    norm: Vec<FieldElement>,
    /// `Tr^{-1}(c)` for each `c` of the subfield, keyed by `c`'s index.
    fibres: BTreeMap<u32, Vec<FieldElement>>,
}

impl TraceNorm {
    pub fn new(field: Arc<Field>) -> Result<TraceNorm> {
        let n = field.degree();
        if n % 2 != 0 {
            return Err(ConstructionError::OddDegree(n));
        }
        let half = n / 2;
        let trace: Vec<_> = field.elements().map(|e| field.rel_trace(e, half).unwrap()).collect();
        let norm: Vec<_> = field.elements().map(|e| field.rel_norm(e, half).unwrap()).collect();
        let mut fibres: BTreeMap<u32, Vec<FieldElement>> = BTreeMap::new();
        for y in field.elements() {
            fibres.entry(trace[y.index() as usize].index()).or_default().push(y);
        }
        Ok(TraceNorm { field, half, trace, norm, fibres })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// `q` with the field being GF(q^2).
    pub fn q(&self) -> u64 {
        (self.field.characteristic() as u64).pow(self.half)
    }

    /// Degree of GF(q) over GF(p).
    pub fn half_degree(&self) -> u32 {
        self.half
    }

    #[inline]
    pub fn tr(&self, x: FieldElement) -> FieldElement {
        self.trace[x.index() as usize]
    }

    #[inline]
    pub fn norm(&self, x: FieldElement) -> FieldElement {
        self.norm[x.index() as usize]
    }

    /// Number of `x` with `Tr(a x^{p^j} + m x + d) = N(x)`.
    pub fn curve_count(&self, j: u32, a: FieldElement, m: FieldElement, d: FieldElement) -> usize {
        let f = &self.field;
        f.elements()
            .filter(|&x| {
                let v = f.add(f.add(f.mul(a, f.frobenius(x, j)), f.mul(m, x)), d);
                self.tr(v) == self.norm(x)
            })
            .count()
    }

    /// For `g(x) = N(x) - Tr(a x^{p^j} + m x)`, the number of `x` with
    /// `g(x) = c`, keyed by the index of `c`.
    fn level_counts(&self, map: impl Fn(FieldElement) -> FieldElement, m: FieldElement) -> Vec<u32> {
        let f = &self.field;
        let mut hist = vec![0u32; f.order() as usize];
        for x in f.elements() {
            let g = f.sub(self.norm(x), self.tr(f.add(map(x), f.mul(m, x))));
            hist[g.index() as usize] += 1;
        }
        hist
    }

    /// `size -> number of lines y = m x + d` by affine intersection with
    /// `Tr(y + f(x)) = N(x)`. Each size count is a multiple of `q`, since `Tr`
    /// is `q`-to-1.
    pub fn slope_profile(&self, map: &TraceNormMap, m: FieldElement) -> BTreeMap<usize, usize> {
        let f = self.field.clone();
        let hist = self.level_counts(|x| map.eval(&f, x), m);
        let q = self.q() as usize;
        let mut profile = BTreeMap::new();
        for c in self.fibres.keys() {
            *profile.entry(hist[*c as usize] as usize).or_insert(0) += q;
        }
        profile
    }
}

/// `{(x, y) : Tr(y + f(x)) = N(x)} ∪ {(∞)}` in PG(2,q^2).
pub fn trace_norm_set(plane: &Arc<Plane>, map: &TraceNormMap) -> Result<PointSet> {
    let tn = TraceNorm::new(plane.field().clone())?;
    map.validate(plane.field())?;
    let f = plane.field();
    let mut set = PointSet::empty(plane.clone(), format!("trace-norm f={}", map.describe()));
    for x in f.elements() {
        let c = f.sub(tn.norm(x), tn.tr(map.eval(f, x)));
        for &y in &tn.fibres[&c.index()] {
            set.insert(plane.affine(x, y).index);
        }
    }
    set.insert(plane.infinity().index);
    Ok(set)
}

/// `(p, e)` with `√q = p^e`, for the plane PG(2,q^2) over `field`.
fn sqrt_q_exponent(field: &Field) -> Result<u32> {
    let n = field.degree();
    if n % 2 != 0 {
        return Err(ConstructionError::OddDegree(n));
    }
    if n % 4 != 0 {
        return Err(ConstructionError::NotSquare((field.characteristic() as u64).pow(n / 2)));
    }
    Ok(n / 4)
}

/// The map `x -> a x^{√q}`.
pub fn gamma_map(field: &Field, a: FieldElement) -> Result<TraceNormMap> {
    let j = sqrt_q_exponent(field)?;
    if a.is_zero() {
        return Err(ConstructionError::ZeroA);
    }
    Ok(TraceNormMap::Additive(AdditiveMap::monomial(field, j, a)))
}

/// `Γ_a : Tr(y + a x^{√q}) = N(x)`, `q` a square.
pub fn gamma_a(plane: &Arc<Plane>, a: FieldElement) -> Result<PointSet> {
    let map = gamma_map(plane.field(), a)?;
    let mut set = trace_norm_set(plane, &map)?;
    set.set_label(format!("gamma_a a={a}"));
    Ok(set)
}

/// `y^q + y = x^{q+1}` plus `(∞)`.
pub fn hermitian_unital(plane: &Arc<Plane>) -> Result<PointSet> {
    let zero = TraceNormMap::Additive(AdditiveMap::zero(plane.field()));
    let mut set = trace_norm_set(plane, &zero)?;
    set.set_label("hermitian unital");
    Ok(set)
}

/// `a, m, d` of the curve `y = a x^{√q} + m x + d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveParams {
    pub a: FieldElement,
    pub m: FieldElement,
    pub d: FieldElement,
}

/// Affine points shared by the Hermitian curve `y^q + y = x^{q+1}` and
/// `y = a x^{√q} + m x + d`.
pub fn hermitian_intersection_count(tn: &TraceNorm, params: CurveParams) -> Result<usize> {
    let j = sqrt_q_exponent(tn.field())?;
    if params.a.is_zero() {
        return Err(ConstructionError::ZeroA);
    }
    Ok(tn.curve_count(j, params.a, params.m, params.d))
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveScan {
    /// Frobenius exponent `j` of the curve term `a x^{p^j}`.
    pub frobenius_power: u32,
    pub exhaustive: bool,
    pub triples: u64,
    /// `count -> number of (a, m, d)`.
    pub histogram: BTreeMap<usize, u64>,
}

/// Histogram of `#{x : Tr(a x^{p^j} + m x + d) = N(x)}` over all `a ≠ 0, m, d`.
pub fn curve_scan_exhaustive(tn: &TraceNorm, j: u32) -> CurveScan {
    let f = tn.field().clone();
    let histogram = f
        .nonzero_elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| {
            let mut local = BTreeMap::new();
            for m in f.elements() {
                let hist = tn.level_counts(|x| f.mul(a, f.frobenius(x, j)), m);
                // count for d is hist[Tr(d)]; every c has |Tr^{-1}(c)| = q choices of d
                for (c, fibre) in &tn.fibres {
                    *local.entry(hist[*c as usize] as usize).or_insert(0u64) += fibre.len() as u64;
                }
            }
            local
        })
        .reduce(BTreeMap::new, merge_histograms);
    let q2 = f.order() as u64;
    CurveScan { frobenius_power: j, exhaustive: true, triples: (q2 - 1) * q2 * q2, histogram }
}

/// Same histogram over `samples` triples drawn from a seeded ChaCha8 stream.
/// Returns the sampled triples alongside their counts.
pub fn curve_scan_sampled(tn: &TraceNorm, j: u32, samples: usize, seed: u64) -> (CurveScan, Vec<(CurveParams, usize)>) {
    let f = tn.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<CurveParams> = (0..samples)
        .map(|_| CurveParams {
            a: f.el(rng.gen_range(1..f.order())),
            m: f.el(rng.gen_range(0..f.order())),
            d: f.el(rng.gen_range(0..f.order())),
        })
        .collect();
    let results: Vec<(CurveParams, usize)> =
        params.into_par_iter().map(|p| (p, tn.curve_count(j, p.a, p.m, p.d))).collect();
    let mut histogram = BTreeMap::new();
    for (_, c) in &results {
        *histogram.entry(*c).or_insert(0) += 1;
    }
    (CurveScan { frobenius_power: j, exhaustive: false, triples: samples as u64, histogram }, results)
}

pub(crate) fn merge_histograms(mut a: BTreeMap<usize, u64>, b: BTreeMap<usize, u64>) -> BTreeMap<usize, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// `X(B) = ∪_{b ∈ B} {yz = x^2 + b z^2}` in PG(2,q), `q` odd.
pub fn touching_union(plane: &Arc<Plane>, b: &[FieldElement]) -> Result<PointSet> {
    let f = plane.field();
    if f.characteristic() == 2 {
        return Err(ConstructionError::EvenOrder(f.order()));
    }
    if b.is_empty() {
        return Err(ConstructionError::EmptyB);
    }
    let mut bs = b.to_vec();
    bs.sort();
    bs.dedup();
    let label = format!("touching B={}", bs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","));
    let mut set = PointSet::empty(plane.clone(), label);
    for &c in &bs {
        for x in f.elements() {
            set.insert(plane.affine(x, f.add(f.mul(x, x), c)).index);
        }
    }
    set.insert(plane.infinity().index);
    Ok(set)
}

/// `{v u^s : u ∈ GF(q)}`.
pub fn power_class(field: &Field, v: FieldElement, s: u32) -> Vec<FieldElement> {
    let mut out: Vec<_> = field.elements().map(|u| field.mul(v, field.pow_u(u, s as u64))).collect();
    out.sort();
    out.dedup();
    out
}

/// Which oval-derived set to build from the conic `yz = x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OvalVariant {
    /// interior points plus one oval point
    InteriorPoint = 1,
    /// exterior points plus one oval point
    ExteriorPoint = 2,
    /// interior points plus the oval
    InteriorOval = 3,
    /// exterior points plus the oval
    ExteriorOval = 4,
}

impl TryFrom<u8> for OvalVariant {
    type Error = ConstructionError;
    fn try_from(v: u8) -> Result<Self> {
        Ok(match v {
            1 => OvalVariant::InteriorPoint,
            2 => OvalVariant::ExteriorPoint,
            3 => OvalVariant::InteriorOval,
            4 => OvalVariant::ExteriorOval,
            _ => return Err(ConstructionError::BadVariant(v)),
        })
    }
}

/// Interior / exterior point sets of the conic `yz = x^2`, `q` odd.
///
/// The adjoined oval point is `(0,0)` (smallest index on the conic) and its
/// tangent `y = 0` bounds the affine plane: exterior points on that tangent
/// are left out. The result is mapped by `(x:y:z) -> (x:z:y)`, which fixes the
/// conic and sends `(0,0)` to `(∞)` and `y = 0` to `ℓ∞`.
pub fn oval_set(plane: &Arc<Plane>, variant: OvalVariant) -> Result<PointSet> {
    let f = plane.field();
    if f.characteristic() == 2 {
        return Err(ConstructionError::EvenOrder(f.order()));
    }
    let conic = PointSet::from_indices(
        plane.clone(),
        f.elements()
            .map(|x| plane.affine(x, f.mul(x, x)).index)
            .chain([plane.infinity().index]),
        "conic",
    );
    let mut tangents_through = vec![0u8; plane.size() as usize];
    for l in plane.lines() {
        let pts = plane.points_on_line(&l);
        if pts.iter().filter(|p| conic.contains(p.index)).count() == 1 {
            for p in pts {
                tangents_through[p.index as usize] += 1;
            }
        }
    }
    let p0 = conic.indices().next().unwrap();
    let t0 = plane.nonvertical(f.zero(), f.zero());
    debug_assert!(plane.points_on_line(&t0).iter().filter(|p| conic.contains(p.index)).count() == 1);
    let on_t0: Vec<u32> = plane.points_on_line(&t0).iter().map(|p| p.index).collect();

    let interior = (0..plane.size()).filter(|&i| !conic.contains(i) && tangents_through[i as usize] == 0);
    let exterior =
        (0..plane.size()).filter(|&i| !conic.contains(i) && tangents_through[i as usize] == 2 && !on_t0.contains(&i));
    let members: Vec<u32> = match variant {
        OvalVariant::InteriorPoint => interior.chain([p0]).collect(),
        OvalVariant::ExteriorPoint => exterior.chain([p0]).collect(),
        OvalVariant::InteriorOval => interior.chain(conic.indices()).collect(),
        OvalVariant::ExteriorOval => exterior.chain(conic.indices()).collect(),
    };
    let swap = |i: u32| {
        let [x, y, z] = plane.point_at(i).unwrap().coords;
        plane.point(x, z, y).unwrap().index
    };
    Ok(PointSet::from_indices(
        plane.clone(),
        members.into_iter().map(swap),
        format!("oval variant {}", variant as u8),
    ))
}

/// A lifted set `S' ∪ {(∞)}` together with the data it was built from.
#[derive(Debug, Clone)]
pub struct Lift {
    pub set: PointSet,
    pub base: PointSet,
    pub tower: TowerMap,
    pub h: u32,
    pub s: u32,
    pub basis: Vec<FieldElement>,
    /// All `q^s` elements of the span `I`.
    pub span: Vec<FieldElement>,
}

/// All GF(q)-combinations of `vectors`, in lexicographic coefficient order.
pub fn span(big: &Field, tower: &TowerMap, vectors: &[FieldElement]) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::ZERO];
    for &v in vectors {
        let mut next = Vec::with_capacity(out.len() * tower.image().len());
        for &acc in &out {
            for &c in tower.image() {
                next.push(big.add(acc, big.mul(c, v)));
            }
        }
        out = next;
    }
    out
}

fn independent(big: &Field, tower: &TowerMap, vectors: &[FieldElement]) -> bool {
    let mut sp = span(big, tower, vectors);
    let n = sp.len();
    sp.sort();
    sp.dedup();
    sp.len() == n
}

fn check_subspace(big: &Field, tower: &TowerMap, basis: &[FieldElement], h: u32) -> Result<()> {
    let s = basis.len() as u32;
    if s == 0 || !independent(big, tower, basis) {
        return Err(ConstructionError::DependentBasis);
    }
    if s > h - 1 {
        return Err(ConstructionError::DimensionTooLarge { s, h });
    }
    let mut with_one = vec![FieldElement::ONE];
    with_one.extend_from_slice(basis);
    if !independent(big, tower, &with_one) {
        return Err(ConstructionError::MeetsBaseField);
    }
    Ok(())
}

/// Greedy basis of an `s`-dimensional GF(q)-subspace of GF(q^h) meeting
/// GF(q) only in 0, taking smallest-index elements first.
pub fn default_subspace(big: &Field, tower: &TowerMap, s: u32) -> Result<Vec<FieldElement>> {
    let h = big.degree() / tower.sub_degree();
    if s == 0 || s > h - 1 {
        return Err(ConstructionError::DimensionTooLarge { s, h });
    }
    let mut chosen = vec![FieldElement::ONE];
    for e in big.nonzero_elements() {
        if chosen.len() as u32 == s + 1 {
            break;
        }
        chosen.push(e);
        if !independent(big, tower, &chosen) {
            chosen.pop();
        }
    }
    Ok(chosen[1..].to_vec())
}

/// `S' = {(x_k, y_k + i) : i ∈ I}` in AG(2,q^h), plus `(∞)`.
///
/// `(∞)` is dropped from the input and re-added to the output.
pub fn lift(base: &PointSet, h: u32, basis: Option<&[FieldElement]>, s: u32) -> Result<Lift> {
    if h < 2 {
        return Err(ConstructionError::BadLiftDegree);
    }
    let small = base.field().clone();
    let base_plane = base.plane();
    if let Some(i) = base.ideal_points().find(|&i| i != base_plane.infinity().index) {
        return Err(ConstructionError::IdealPoint(i));
    }
    let big = Field::shared(small.characteristic(), small.degree() * h)?;
    let tower = TowerMap::between(small.clone(), &big)?;
    let basis = match basis {
        Some(b) => b.to_vec(),
        None => default_subspace(&big, &tower, s)?,
    };
    check_subspace(&big, &tower, &basis, h)?;
    let sp = span(&big, &tower, &basis);

    let plane = Plane::shared(big.clone());
    let label = format!(
        "lift h={h} s={} I=[{}] of ({}); (∞) dropped and re-added",
        basis.len(),
        basis.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","),
        base.label()
    );
    let mut set = PointSet::empty(plane.clone(), label);
    for i in base.indices() {
        if let Some((x, y)) = base_plane.affine_coords(i) {
            let (bx, by) = (tower.embed(x), tower.embed(y));
            for &e in &sp {
                set.insert(plane.affine(bx, big.add(by, e)).index);
            }
        }
    }
    set.insert(plane.infinity().index);
    Ok(Lift { set, base: base.clone(), tower, h, s: basis.len() as u32, basis, span: sp })
}

/// `(AG(2,Q) \ X) ∪ {(∞)}` for `X` containing `(∞)` with `ℓ∞` tangent there.
pub fn complement(x: &PointSet) -> Result<PointSet> {
    let plane = x.plane();
    let inf = plane.infinity().index;
    if !x.contains(inf) {
        return Err(ConstructionError::MissingInfinity);
    }
    if let Some(i) = x.ideal_points().find(|&i| i != inf) {
        return Err(ConstructionError::NotTangentAtInfinity(i));
    }
    let q = plane.order();
    let members = (0..q * q).filter(|&i| !x.contains(i)).chain([inf]);
    Ok(PointSet::from_indices(plane.clone(), members, format!("complement of ({})", x.label())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::enumerate;

    fn plane(p: u32, n: u32) -> Arc<Plane> {
        Plane::shared(Field::shared(p, n).unwrap())
    }

    #[test]
    fn trace_norm_sizes() {
        for (p, n) in [(2, 2), (3, 2), (2, 4), (5, 2)] {
            let pg = plane(p, n);
            let q = (p as usize).pow(n / 2);
            let f = pg.field().clone();
            let map = TraceNormMap::Additive(AdditiveMap::monomial(&f, n - 1, f.generator()));
            assert_eq!(trace_norm_set(&pg, &map).unwrap().len(), q * q * q + 1);
            assert_eq!(hermitian_unital(&pg).unwrap().len(), q * q * q + 1);
        }
    }

    #[test]
    fn odd_degree_rejected() {
        let pg = plane(2, 3);
        assert_eq!(hermitian_unital(&pg).unwrap_err(), ConstructionError::OddDegree(3));
        let pg = plane(3, 2);
        assert_eq!(gamma_a(&pg, FieldElement::ONE).unwrap_err(), ConstructionError::NotSquare(3));
        let pg = plane(2, 4);
        assert_eq!(gamma_a(&pg, FieldElement::ZERO).unwrap_err(), ConstructionError::ZeroA);
    }

    #[test]
    fn additive_maps_are_additive() {
        let f = Field::new(3, 4).unwrap();
        let m = AdditiveMap { coeffs: vec![f.el(5), f.el(0), f.el(77), f.el(12)] };
        for x in f.elements().step_by(7) {
            for y in f.elements().step_by(5) {
                assert_eq!(m.eval(&f, f.add(x, y)), f.add(m.eval(&f, x), m.eval(&f, y)));
            }
        }
    }

    #[test]
    fn map_shape_checked() {
        let pg = plane(3, 2);
        let bad = TraceNormMap::Additive(AdditiveMap { coeffs: vec![FieldElement::ONE] });
        assert!(matches!(trace_norm_set(&pg, &bad), Err(ConstructionError::MapShape { .. })));
        let big = TraceNormMap::General(GeneralMap { poly: vec![FieldElement::ONE; 10] });
        assert!(matches!(trace_norm_set(&pg, &big), Err(ConstructionError::DegreeTooLarge { .. })));
    }

    #[test]
    fn intersection_count_matches_line_count() {
        let pg = plane(2, 4);
        let f = pg.field().clone();
        let tn = TraceNorm::new(f.clone()).unwrap();
        for a in [1u32, 2, 7, 13] {
            let a = f.el(a);
            let set = gamma_a(&pg, a).unwrap();
            let e = enumerate(&set);
            for m in f.elements() {
                for d in f.elements() {
                    let c = hermitian_intersection_count(&tn, CurveParams { a, m, d }).unwrap();
                    assert_eq!(c, e.nonvertical_count(m.index(), d.index()));
                }
            }
        }
    }

    #[test]
    fn slope_profile_matches_enumerator() {
        let pg = plane(3, 4);
        let f = pg.field().clone();
        let tn = TraceNorm::new(f.clone()).unwrap();
        let a = f.el(17);
        let map = gamma_map(&f, a).unwrap();
        let e = enumerate(&gamma_a(&pg, a).unwrap());
        for m in [0, 1, 40, 80] {
            assert_eq!(tn.slope_profile(&map, f.el(m)), e.slope_profile(m));
        }
    }

    #[test]
    fn scan_routes_agree() {
        let f = Field::shared(2, 4).unwrap();
        let tn = TraceNorm::new(f.clone()).unwrap();
        let scan = curve_scan_exhaustive(&tn, 1);
        let mut direct = BTreeMap::new();
        for a in f.nonzero_elements() {
            for m in f.elements() {
                for d in f.elements() {
                    *direct.entry(tn.curve_count(1, a, m, d)).or_insert(0u64) += 1;
                }
            }
        }
        assert_eq!(scan.histogram, direct);
        assert_eq!(scan.triples, 15 * 256);
    }

    #[test]
    fn sampled_scan_is_reproducible() {
        let f = Field::shared(3, 4).unwrap();
        let tn = TraceNorm::new(f).unwrap();
        let (a, ra) = curve_scan_sampled(&tn, 1, 200, 7);
        let (b, rb) = curve_scan_sampled(&tn, 1, 200, 7);
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(ra, rb);
        assert!(ra.iter().all(|(p, _)| !p.a.is_zero()));
    }

    #[test]
    fn single_conic() {
        let pg = plane(5, 1);
        let x = touching_union(&pg, &[FieldElement::ONE]).unwrap();
        assert_eq!(x.len(), 6);
        assert_eq!(touching_union(&pg, &[]).unwrap_err(), ConstructionError::EmptyB);
        assert_eq!(touching_union(&plane(2, 2), &[FieldElement::ONE]).unwrap_err(), ConstructionError::EvenOrder(4));
    }

    #[test]
    fn oval_part_sizes() {
        for q in [3u32, 5, 7, 9, 11] {
            let pg = Plane::shared(Field::of_order(q as u64).unwrap());
            let q = q as usize;
            let sizes: Vec<usize> = (1..=4u8)
                .map(|v| oval_set(&pg, OvalVariant::try_from(v).unwrap()).unwrap().len())
                .collect();
            // interior q(q-1)/2; exterior q(q+1)/2 minus the q on the tangent
            assert_eq!(sizes, vec![q * (q - 1) / 2 + 1, q * (q - 1) / 2 + 1, q * (q - 1) / 2 + q + 1, q * (q - 1) / 2 + q + 1]);
        }
        assert_eq!(OvalVariant::try_from(5).unwrap_err(), ConstructionError::BadVariant(5));
    }

    #[test]
    fn trivial_lift() {
        let pg = plane(3, 1);
        let origin = PointSet::from_indices(pg.clone(), [0], "origin");
        let lifted = lift(&origin, 2, None, 1).unwrap();
        assert_eq!(lifted.set.len(), 3 + 1);
        let big_plane = lifted.set.plane().clone();
        for i in lifted.set.indices().filter(|&i| big_plane.is_affine_index(i)) {
            assert_eq!(big_plane.affine_coords(i).unwrap().0, FieldElement::ZERO);
        }
    }

    #[test]
    fn lift_basis_errors() {
        let pg = plane(3, 1);
        let origin = PointSet::from_indices(pg.clone(), [0], "origin");
        let one = [FieldElement::ONE];
        assert_eq!(lift(&origin, 2, Some(&one), 1).unwrap_err(), ConstructionError::MeetsBaseField);
        let big = Field::new(3, 3).unwrap();
        let tower = TowerMap::new(&big, 1).unwrap();
        let b = default_subspace(&big, &tower, 1).unwrap()[0];
        let dep = [b, big.add(b, b)];
        assert_eq!(lift(&origin, 3, Some(&dep), 2).unwrap_err(), ConstructionError::DependentBasis);
        assert!(matches!(lift(&origin, 2, None, 2), Err(ConstructionError::DimensionTooLarge { .. })));
        let with_dir = PointSet::from_indices(pg.clone(), [0, 9], "dir");
        assert_eq!(lift(&with_dir, 2, None, 1).unwrap_err(), ConstructionError::IdealPoint(9));
    }

    #[test]
    fn complement_counts_and_errors() {
        let pg = plane(3, 2);
        let u = hermitian_unital(&pg).unwrap();
        let c = complement(&u).unwrap();
        assert_eq!(c.len(), 81 - u.len() + 2);
        assert_eq!(complement(&c).unwrap(), u);
        let no_inf = PointSet::from_indices(pg.clone(), [0], "x");
        assert_eq!(complement(&no_inf).unwrap_err(), ConstructionError::MissingInfinity);
        let extra = PointSet::from_indices(pg.clone(), [81, 90], "x");
        assert_eq!(complement(&extra).unwrap_err(), ConstructionError::NotTangentAtInfinity(81));
    }
}
