use std::sync::Arc;

use proptest::prelude::*;

use regsets::classify::{enumerate, enumerate_by_lines};
use regsets::codes::{code_from_set, weights_exhaustive, weights_from_enumerator};
use regsets::constructions::{complement, trace_norm_set, AdditiveMap, TraceNormMap};
use regsets::galois::{Field, TowerMap};
use regsets::plane::Plane;
use regsets::pointset::PointSet;

fn gf81() -> Arc<Field> {
    Field::shared(3, 4).unwrap()
}

fn plane(q: u64) -> Arc<Plane> {
    Plane::shared(Field::of_order(q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trace_is_additive_into_the_subfield(a in 0u32..81, b in 0u32..81) {
        let f = gf81();
        let (a, b) = (f.el(a), f.el(b));
        let t = |x| f.rel_trace(x, 2).unwrap();
        prop_assert_eq!(t(f.add(a, b)), f.add(t(a), t(b)));
        prop_assert_eq!(f.pow_u(t(a), 9), t(a));
    }

    #[test]
    fn norm_is_multiplicative(a in 0u32..81, b in 0u32..81) {
        let f = gf81();
        let (a, b) = (f.el(a), f.el(b));
        let n = |x| f.rel_norm(x, 2).unwrap();
        prop_assert_eq!(n(f.mul(a, b)), f.mul(n(a), n(b)));
    }

    #[test]
    fn embedding_is_a_ring_map(a in 0u32..9, b in 0u32..9) {
        let big = gf81();
        let tower = TowerMap::new(&big, 2).unwrap();
        let small = tower.subfield().clone();
        let (a, b) = (small.el(a), small.el(b));
        prop_assert_eq!(tower.embed(small.add(a, b)), big.add(tower.embed(a), tower.embed(b)));
        prop_assert_eq!(tower.embed(small.mul(a, b)), big.mul(tower.embed(a), tower.embed(b)));
        prop_assert_eq!(tower.project(tower.embed(a)), Some(a));
    }

    #[test]
    fn point_index_round_trip(i in 0u32..(81 * 81 + 82)) {
        let pg = plane(81);
        let p = pg.point_at(i).unwrap();
        let again = pg.point(p.coords[0], p.coords[1], p.coords[2]).unwrap();
        prop_assert_eq!(again.index, i);
        let f = pg.field();
        // scaling does not change the point
        let s = f.el(1 + i % 80);
        let scaled = pg.point(f.mul(s, p.coords[0]), f.mul(s, p.coords[1]), f.mul(s, p.coords[2])).unwrap();
        prop_assert_eq!(scaled.index, i);
    }
}

fn random_set(pg: &Arc<Plane>, bits: &[bool]) -> PointSet {
    PointSet::from_indices(pg.clone(), (0..pg.size()).filter(|&i| bits[i as usize]), "random")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumerator_identities_and_line_scan(bits in prop::collection::vec(any::<bool>(), 57)) {
        let pg = plane(7);
        let x = random_set(&pg, &bits);
        let e = enumerate(&x);
        prop_assert!(e.check_identities().is_ok(), "{:?}", e.check_identities());
        prop_assert_eq!(enumerate_by_lines(&x), e.line_counts().to_vec());
    }

    #[test]
    fn complement_is_an_involution(bits in prop::collection::vec(any::<bool>(), 81)) {
        let pg = plane(9);
        let mut x = PointSet::from_indices(pg.clone(), (0..81).filter(|&i| bits[i as usize]), "affine");
        x.insert(pg.infinity().index);
        let c = complement(&x).unwrap();
        prop_assert_eq!(c.len(), 81 - x.len() + 2);
        prop_assert_eq!(complement(&c).unwrap(), x);
    }

    #[test]
    fn weight_routes_agree(bits in prop::collection::vec(any::<bool>(), 21)) {
        let pg = plane(4);
        let x = random_set(&pg, &bits);
        let e = enumerate(&x);
        if let (Ok(g), Ok(w)) = (code_from_set(&x), weights_from_enumerator(&x, &e)) {
            prop_assert_eq!(weights_exhaustive(&g).unwrap(), w);
        } else {
            prop_assert!(code_from_set(&x).is_err());
            prop_assert!(weights_from_enumerator(&x, &e).is_err());
        }
    }
}

/// Per parallel class, the number of `k`-secants is a multiple of `q`.
fn check_class_divisibility(q: u64, coeffs: Vec<u32>) -> Result<(), TestCaseError> {
    let pg = plane(q * q);
    let f = pg.field().clone();
    let map = AdditiveMap { coeffs: coeffs.into_iter().map(|c| f.el(c)).collect() };
    let x = trace_norm_set(&pg, &TraceNormMap::Additive(map)).unwrap();
    let e = enumerate(&x);
    prop_assert!(e.check_identities().is_ok());
    for m in 0..f.order() {
        for (&k, &count) in &e.slope_profile(m) {
            prop_assert_eq!(count as u64 % q, 0, "slope {} size {}", m, k);
        }
    }
    for (&k, &count) in &e.vertical_profile() {
        prop_assert_eq!(count as u64 % q, 0, "vertical size {}", k);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn trace_norm_classes_divisible_q2(c0 in 0u32..4, c1 in 0u32..4) {
        check_class_divisibility(2, vec![c0, c1])?;
    }

    #[test]
    fn trace_norm_classes_divisible_q3(c0 in 0u32..9, c1 in 0u32..9) {
        check_class_divisibility(3, vec![c0, c1])?;
    }

    #[test]
    fn trace_norm_classes_divisible_q4(c in prop::collection::vec(0u32..16, 4)) {
        check_class_divisibility(4, c)?;
    }
}
