//! Line-intersection statistics of a point set and the regular / affine /
//! pointed type verdicts built on them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constructions::Lift;
use crate::galois::exact_sqrt;
use crate::plane::{PlaneLine, PlanePoint};
use crate::pointset::PointSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("distinguished point {0} is not in the set")]
    NotMember(u32),
    #[error("line {line} does not pass through point {point}")]
    NotInPencil { point: u32, line: u32 },
    #[error("line {line} meets the set in {size} points, not a tangent")]
    NotTangent { line: u32, size: usize },
}

/// Multiset of line-intersection sizes of a set, with the per-line counts
/// kept for frame-dependent queries.
#[derive(Debug, Clone)]
pub struct IntersectionEnumerator {
    order: u32,
    set_size: usize,
    /// `|X ∩ ℓ|` by line index.
    line_counts: Vec<u32>,
    /// `|X ∩ ℓ|` by affine line key (see `plane::LineKey`).
    key_counts: Vec<u32>,
    global: BTreeMap<usize, u64>,
}

impl IntersectionEnumerator {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn set_size(&self) -> usize {
        self.set_size
    }

    /// `i -> e_i` for every realized size `i`.
    pub fn global(&self) -> &BTreeMap<usize, u64> {
        &self.global
    }

    pub fn e(&self, i: usize) -> u64 {
        self.global.get(&i).copied().unwrap_or(0)
    }

    pub fn line_count(&self, line: u32) -> usize {
        self.line_counts[line as usize] as usize
    }

    pub fn line_counts(&self) -> &[u32] {
        &self.line_counts
    }

    pub fn infinity_size(&self) -> usize {
        self.line_counts[0] as usize
    }

    /// `|X ∩ {y = m x + d}|` by element indices.
    pub fn nonvertical_count(&self, m: u32, d: u32) -> usize {
        self.key_counts[(m * self.order + d) as usize] as usize
    }

    /// `|X ∩ {x = α}|`.
    pub fn vertical_count(&self, alpha: u32) -> usize {
        let q = self.order;
        self.key_counts[(q * q + alpha) as usize] as usize
    }

    /// Sorted sizes over the parallel class of the ideal point with index
    /// `direction` (`Q^2 + m` for slope `m`, `Q^2 + Q` for `(∞)`).
    pub fn by_direction(&self, direction: u32) -> Vec<u32> {
        let q = self.order;
        assert!(direction >= q * q && direction <= q * q + q, "not an ideal point");
        let base = if direction == q * q + q { q * q } else { (direction - q * q) * q };
        let mut sizes = self.key_counts[base as usize..(base + q) as usize].to_vec();
        sizes.sort_unstable();
        sizes
    }

    /// `size -> number of lines` with slope `m` (element index).
    pub fn slope_profile(&self, m: u32) -> BTreeMap<usize, usize> {
        histogram(self.by_direction(self.order * self.order + m).into_iter())
    }

    pub fn vertical_profile(&self) -> BTreeMap<usize, usize> {
        histogram(self.by_direction(self.order * self.order + self.order).into_iter())
    }

    /// Largest `|X ∩ ℓ|`.
    pub fn max_intersection(&self) -> usize {
        self.global.keys().next_back().copied().unwrap_or(0)
    }

    /// The three double-counting identities:
    /// `Σ e_i = Q²+Q+1`, `Σ i e_i = |X|(Q+1)`, `Σ i(i-1) e_i = |X|(|X|-1)`.
    pub fn check_identities(&self) -> Result<(), String> {
        let q = self.order as u64;
        let x = self.set_size as u64;
        let lines: u64 = self.global.values().sum();
        let first: u64 = self.global.iter().map(|(&i, &e)| i as u64 * e).sum();
        let second: u64 = self.global.iter().map(|(&i, &e)| (i as u64) * (i as u64).saturating_sub(1) * e).sum();
        if lines != q * q + q + 1 {
            return Err(format!("Σ e_i = {lines}, expected {}", q * q + q + 1));
        }
        if first != x * (q + 1) {
            return Err(format!("Σ i e_i = {first}, expected {}", x * (q + 1)));
        }
        if second != x * x.saturating_sub(1) {
            return Err(format!("Σ i(i-1) e_i = {second}, expected {}", x * x.saturating_sub(1)));
        }
        Ok(())
    }

    pub fn report(&self, with_directions: bool) -> EnumeratorReport {
        let q = self.order;
        EnumeratorReport {
            order: q,
            set_size: self.set_size,
            infinity_size: self.infinity_size(),
            enumerator: self.global.clone(),
            by_direction: with_directions.then(|| {
                (q * q..=q * q + q)
                    .map(|d| DirectionProfile {
                        direction: d,
                        sizes: histogram(self.by_direction(d).into_iter()),
                    })
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumeratorReport {
    pub order: u32,
    pub set_size: usize,
    pub infinity_size: usize,
    pub enumerator: BTreeMap<usize, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub by_direction: Option<Vec<DirectionProfile>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionProfile {
    pub direction: u32,
    pub sizes: BTreeMap<usize, usize>,
}

pub(crate) fn histogram<T: Into<u64>>(it: impl Iterator<Item = T>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in it {
        *h.entry(v.into() as usize).or_insert(0) += 1;
    }
    h
}

/// Counts `|X ∩ ℓ|` for every line by running through the pencil of each
/// member point. Work is split over members; partial counts merge by addition.
pub fn enumerate(x: &PointSet) -> IntersectionEnumerator {
    let plane = x.plane();
    let size = plane.size() as usize;
    let members: Vec<u32> = x.indices().collect();
    let key_counts = members
        .par_chunks(256)
        .fold(
            || vec![0u32; size],
            |mut acc, chunk| {
                for &i in chunk {
                    for k in plane.pencil_keys(i) {
                        acc[k as usize] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u32; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(u, v)| *u += v);
                a
            },
        );
    let mut line_counts = vec![0u32; size];
    for (k, &c) in key_counts.iter().enumerate() {
        line_counts[plane.key_to_line(k as u32) as usize] = c;
    }
    let global = histogram(line_counts.iter().copied())
        .into_iter()
        .map(|(i, e)| (i, e as u64))
        .collect();
    IntersectionEnumerator { order: plane.order(), set_size: members.len(), line_counts, key_counts, global }
}

/// Per-line counts by scanning every line's point list. Slow reference route.
pub fn enumerate_by_lines(x: &PointSet) -> Vec<u32> {
    let plane = x.plane();
    (0..plane.size())
        .into_par_iter()
        .map(|i| x.line_intersection(&plane.line_at(i).unwrap()) as u32)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub point: u32,
    pub line: u32,
    pub point_coords: String,
    pub line_coeffs: String,
}

/// Verdicts for the distinguished-point conditions:
/// (i) sizes of lines missing `P0`, (ii) equal size multisets at every
/// point of `ℓ0 \ {P0}`, (iii) constant size `t + 1` on the other lines
/// through `P0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeReport {
    pub frame: Frame,
    /// Realized sizes over lines not through `P0`, ascending.
    pub affine_types: Vec<usize>,
    pub is_affine_type: bool,
    pub is_regular_affine: bool,
    pub t: Option<usize>,
    pub is_pointed: bool,
    pub is_regular_pointed: bool,
    /// The common `size -> count` multiset seen from each point of
    /// `ℓ0 \ {P0}`, when (ii) holds.
    pub class_profile: Option<BTreeMap<usize, usize>>,
}

impl TypeReport {
    /// `[t; m_1, ..., m_h]` or `(m_1, ..., m_h)`.
    pub fn bracket(&self) -> String {
        let types = self.affine_types.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ");
        match self.t {
            Some(t) => format!("[{t}; {types}]"),
            None => format!("({types})"),
        }
    }
}

/// Verdict for `X` at the frame `(P0, ℓ0)`.
pub fn classify(
    x: &PointSet,
    e: &IntersectionEnumerator,
    p0: &PlanePoint,
    l0: &PlaneLine,
) -> Result<TypeReport, ClassifyError> {
    let plane = x.plane();
    if !x.contains(p0.index) {
        return Err(ClassifyError::NotMember(p0.index));
    }
    if !plane.incident(p0, l0) {
        return Err(ClassifyError::NotInPencil { point: p0.index, line: l0.index });
    }
    let l0_size = e.line_count(l0.index);
    if l0_size != 1 {
        return Err(ClassifyError::NotTangent { line: l0.index, size: l0_size });
    }

    // (i): every line not through P0
    let pencil = plane.pencil_indices(p0);
    let mut residual = e.global.clone();
    for &l in &pencil {
        *residual.get_mut(&e.line_count(l)).unwrap() -= 1;
    }
    let affine_types: Vec<usize> = residual.into_iter().filter(|&(_, c)| c > 0).map(|(i, _)| i).collect();

    // (iii)
    let mut through: Vec<usize> = pencil.iter().filter(|&&l| l != l0.index).map(|&l| e.line_count(l)).collect();
    through.sort_unstable();
    through.dedup();
    let t = match through.as_slice() {
        [k] if *k >= 2 => Some(k - 1),
        _ => None,
    };

    // (ii)
    let mut profiles = plane
        .points_on_line(l0)
        .into_iter()
        .filter(|p| p.index != p0.index)
        .map(|p| {
            let mut sizes: Vec<u32> = plane
                .pencil_indices(&p)
                .into_iter()
                .filter(|&l| l != l0.index)
                .map(|l| e.line_counts[l as usize])
                .collect();
            sizes.sort_unstable();
            sizes
        });
    let first = profiles.next().expect("a line has at least two points");
    let regular = profiles.all(|s| s == first);

    Ok(TypeReport {
        frame: Frame {
            point: p0.index,
            line: l0.index,
            point_coords: p0.to_string(),
            line_coeffs: l0.to_string(),
        },
        affine_types,
        is_affine_type: true,
        is_regular_affine: regular,
        t,
        is_pointed: t.is_some(),
        is_regular_pointed: regular && t.is_some(),
        class_profile: regular.then(|| histogram(first.into_iter())),
    })
}

/// [`classify`] at the standard frame `((∞), ℓ∞)`.
pub fn classify_standard(x: &PointSet, e: &IntersectionEnumerator) -> Result<TypeReport, ClassifyError> {
    let plane = x.plane();
    classify(x, e, &plane.infinity(), &plane.line_at_infinity())
}

/// Every frame `(P0, ℓ0)` with `P0 ∈ X` and `ℓ0` tangent at `P0`, in point
/// then line index order, with its verdict.
pub fn auto_classify(x: &PointSet, e: &IntersectionEnumerator) -> Vec<TypeReport> {
    let plane = x.plane();
    let members: Vec<PlanePoint> = x.points().collect();
    members
        .par_iter()
        .map(|p0| {
            plane
                .pencil(p0)
                .into_iter()
                .filter(|l| e.line_count(l.index) == 1)
                .map(|l0| classify(x, e, p0, &l0).expect("frame satisfies the preconditions"))
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}

/// `|X| = q^3 + 1` in PG(2,q^2) and every line meets `X` in 1 or `q + 1` points.
pub fn is_unital(x: &PointSet, e: &IntersectionEnumerator) -> bool {
    let Some(q) = exact_sqrt(x.plane().order() as u64) else {
        return false;
    };
    let q = q as usize;
    x.len() == q * q * q + 1 && e.global.keys().all(|&i| i == 1 || i == q + 1)
}

/// Per-direction comparison of a lifted set against the closed-form line
/// counts for the lift construction.
#[derive(Debug, Clone, Serialize)]
pub struct DirectionCensus {
    pub q: u64,
    pub h: u32,
    pub s: u32,
    /// Directions `d ∈ GF(q) ⊕ I`.
    pub covered: usize,
    pub expected_covered: u64,
    pub uncovered: usize,
    pub expected_uncovered: u64,
    /// Directions whose size multiset differs from the prediction.
    pub mismatched_directions: Vec<u32>,
    /// `Σ_i A_{i,d} = q` for every covered direction.
    pub class_sums_ok: bool,
    /// Non-vertical affine `k`-secant totals, when `s = h - 1`.
    pub nonvertical_totals: Option<BTreeMap<usize, u64>>,
    /// Whether every such total is divisible by `q^{2h-1}`.
    pub totals_divisible: Option<bool>,
    pub pass: bool,
}

pub fn direction_census(lift: &Lift, e: &IntersectionEnumerator) -> DirectionCensus {
    let big = lift.set.field().clone();
    let small = lift.tower.subfield().clone();
    let q = small.order() as u64;
    let qh = big.order() as u64;
    let qs = q.pow(lift.s);
    let base_affine: Vec<(u32, u32)> = lift
        .base
        .indices()
        .filter_map(|i| lift.base.plane().affine_coords(i))
        .map(|(x, y)| (x.index(), y.index()))
        .collect();
    let base_plane = lift.base.plane().clone();
    let base_e = enumerate(&lift.base);

    // d -> (d0, d1) for d ∈ GF(q) ⊕ I
    let mut split: Vec<Option<u32>> = vec![None; qh as usize];
    for d0 in small.elements() {
        for &d1 in &lift.span {
            split[big.add(lift.tower.embed(d0), d1).index() as usize] = Some(d0.index());
        }
    }

    let mut covered = 0;
    let mut uncovered = 0;
    let mut mismatched = Vec::new();
    let mut class_sums_ok = true;
    for d in big.elements() {
        let actual = e.by_direction(qh as u32 * qh as u32 + d.index());
        let mut expected: Vec<u32> = match split[d.index() as usize] {
            Some(d0) => {
                covered += 1;
                let sizes = base_e.by_direction(base_plane.order() * base_plane.order() + d0);
                class_sums_ok &= sizes.len() as u64 == q;
                let mut v = vec![0u32; (qh - q * qs) as usize];
                for s in sizes {
                    v.extend(std::iter::repeat(s).take(qs as usize));
                }
                v
            }
            None => {
                uncovered += 1;
                let tangents = qs as usize * base_affine.len();
                let mut v = vec![0u32; qh as usize - tangents];
                v.extend(std::iter::repeat(1).take(tangents));
                v
            }
        };
        expected.sort_unstable();
        if expected != actual {
            mismatched.push(d.index());
        }
    }

    let (totals, divisible) = if lift.s + 1 == lift.h {
        let mut totals = BTreeMap::new();
        for m in 0..qh as u32 {
            for (k, c) in e.slope_profile(m) {
                *totals.entry(k).or_insert(0u64) += c as u64;
            }
        }
        let modulus = q.pow(2 * lift.h - 1);
        let ok = totals.values().all(|&c| c % modulus == 0);
        (Some(totals), Some(ok))
    } else {
        (None, None)
    };

    let expected_covered = q.pow(lift.s + 1);
    let expected_uncovered = qh - expected_covered;
    let pass = covered as u64 == expected_covered
        && uncovered as u64 == expected_uncovered
        && mismatched.is_empty()
        && class_sums_ok
        && divisible.unwrap_or(true);
    DirectionCensus {
        q,
        h: lift.h,
        s: lift.s,
        covered,
        expected_covered,
        uncovered,
        expected_uncovered,
        mismatched_directions: mismatched,
        class_sums_ok,
        nonvertical_totals: totals,
        totals_divisible: divisible,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Field;
    use crate::plane::Plane;
    use std::sync::Arc;

    fn plane(p: u32, n: u32) -> Arc<Plane> {
        Plane::shared(Field::shared(p, n).unwrap())
    }

    #[test]
    fn empty_set() {
        let pg = plane(2, 2);
        let x = PointSet::empty(pg, "empty");
        let e = enumerate(&x);
        assert_eq!(e.global(), &BTreeMap::from([(0, 21)]));
        e.check_identities().unwrap();
    }

    #[test]
    fn full_line() {
        let pg = plane(2, 2);
        let f = pg.field().clone();
        let l = pg.nonvertical(f.el(2), f.el(1));
        let x = PointSet::from_indices(pg.clone(), pg.points_on_line(&l).iter().map(|p| p.index), "line");
        let e = enumerate(&x);
        assert_eq!(e.global(), &BTreeMap::from([(1, 20), (5, 1)]));
        e.check_identities().unwrap();
    }

    #[test]
    fn pencil_route_matches_line_scan() {
        let pg = plane(3, 2);
        let x = PointSet::from_indices(pg.clone(), (0..pg.size()).filter(|i| i % 7 == 3 || i % 11 == 0), "mix");
        let e = enumerate(&x);
        assert_eq!(e.line_counts(), enumerate_by_lines(&x).as_slice());
        e.check_identities().unwrap();
    }

    #[test]
    fn full_plane_has_no_frames() {
        let pg = plane(3, 1);
        let x = PointSet::from_indices(pg.clone(), 0..pg.size(), "all");
        let e = enumerate(&x);
        assert!(auto_classify(&x, &e).is_empty());
    }

    #[test]
    fn frame_errors() {
        let pg = plane(3, 1);
        let f = pg.field().clone();
        let x = PointSet::from_indices(pg.clone(), [pg.infinity().index, 0, 1], "three");
        let e = enumerate(&x);
        let o = pg.affine(f.zero(), f.zero());
        let far = pg.affine(f.el(2), f.el(2));
        assert_eq!(
            classify(&x, &e, &far, &pg.line_at_infinity()),
            Err(ClassifyError::NotMember(far.index))
        );
        assert!(matches!(
            classify(&x, &e, &o, &pg.line_at_infinity()),
            Err(ClassifyError::NotInPencil { .. })
        ));
        // x = 0 holds (0,0), (0,1) and (∞)
        assert_eq!(
            classify(&x, &e, &pg.infinity(), &pg.vertical(f.zero())),
            Err(ClassifyError::NotTangent { line: pg.vertical(f.zero()).index, size: 3 })
        );
    }
}
