//! Parameter scans: classification of trace-norm sets over small families of
//! additive maps, and the curve-count congruence harness for
//! `y = a x^p + m x + d`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify_standard, enumerate, is_unital};
use crate::constructions::{
    curve_scan_exhaustive, curve_scan_sampled, trace_norm_set, AdditiveMap, ConstructionError, CurveParams, TraceNorm,
    TraceNormMap,
};
use crate::galois::{prime_power, Field, GaloisError};
use crate::plane::Plane;

/// Largest number of `(a, m, d)` triples scanned exhaustively.
pub const CONJECTURE_EXHAUSTIVE_LIMIT: u64 = 1 << 25;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {q} is too large for a {breadth} scan")]
    TooLarge { q: u64, breadth: &'static str },
    #[error("exhaustive conjecture scan over {0} triples exceeds the limit; pass a sample size")]
    TooManyTriples(u64),
    #[error(transparent)]
    Field(#[from] GaloisError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// Which additive maps `f(x) = Σ c_j x^{p^j}` to visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanBreadth {
    /// every coefficient vector
    Full,
    /// at most two nonzero coefficients
    Binomial,
}

impl ScanBreadth {
    /// Full below `q = 4`, binomial at `q = 4`.
    pub fn default_for(q: u64) -> ScanBreadth {
        if q <= 3 {
            ScanBreadth::Full
        } else {
            ScanBreadth::Binomial
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanEntry {
    pub map: String,
    pub size: usize,
    pub unital: bool,
    pub affine_types: Vec<usize>,
    pub bracket: String,
    pub regular_pointed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub maps: usize,
    pub unitals: usize,
    pub non_unitals: usize,
    pub all_regular_pointed: bool,
    /// Fewest affine types over the non-unital sets.
    pub min_affine_types: Option<usize>,
    /// `number of affine types -> number of non-unital sets`.
    pub type_counts: BTreeMap<usize, usize>,
    /// Every affine type seen, with how many sets realize it.
    pub types_seen: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub q: u64,
    pub breadth: ScanBreadth,
    pub summary: ScanSummary,
    pub entries: Vec<ScanEntry>,
}

fn additive_maps(field: &Field, breadth: ScanBreadth) -> Vec<AdditiveMap> {
    let n = field.degree() as usize;
    let order = field.order() as u64;
    let total = order.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let coeffs: Vec<_> = (0..n)
                .map(|_| {
                    let c = field.el((code % order) as u32);
                    code /= order;
                    c
                })
                .collect();
            let nonzero = coeffs.iter().filter(|c| !c.is_zero()).count();
            (breadth == ScanBreadth::Full || nonzero <= 2).then_some(AdditiveMap { coeffs })
        })
        .collect()
}

/// Classifies `Tr(y + f(x)) = N(x)` in PG(2, q^2) at `((∞), ℓ∞)` for each
/// additive `f` of the requested breadth.
pub fn scan_f(q: u64, breadth: ScanBreadth) -> Result<ScanReport, ScanError> {
    let (p, e) = prime_power(q).ok_or(ScanError::NotPrimePower(q))?;
    let limit = match breadth {
        ScanBreadth::Full => 4,
        ScanBreadth::Binomial => 5,
    };
    if q > limit {
        let name = match breadth {
            ScanBreadth::Full => "full",
            ScanBreadth::Binomial => "binomial",
        };
        return Err(ScanError::TooLarge { q, breadth: name });
    }
    let field = Field::shared(p, 2 * e)?;
    let plane = Plane::shared(field.clone());
    let maps = additive_maps(&field, breadth);
    let entries = maps
        .into_par_iter()
        .map(|m| classify_map(&plane, TraceNormMap::Additive(m)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut summary = ScanSummary {
        maps: entries.len(),
        unitals: 0,
        non_unitals: 0,
        all_regular_pointed: true,
        min_affine_types: None,
        type_counts: BTreeMap::new(),
        types_seen: BTreeMap::new(),
    };
    for entry in &entries {
        summary.all_regular_pointed &= entry.regular_pointed;
        for &t in &entry.affine_types {
            *summary.types_seen.entry(t).or_insert(0) += 1;
        }
        if entry.unital {
            summary.unitals += 1;
        } else {
            summary.non_unitals += 1;
            let k = entry.affine_types.len();
            *summary.type_counts.entry(k).or_insert(0) += 1;
            summary.min_affine_types = Some(summary.min_affine_types.map_or(k, |m: usize| m.min(k)));
        }
    }
    Ok(ScanReport { q, breadth, summary, entries })
}

fn classify_map(plane: &Arc<Plane>, map: TraceNormMap) -> Result<ScanEntry, ScanError> {
    let x = trace_norm_set(plane, &map)?;
    let e = enumerate(&x);
    let r = classify_standard(&x, &e).expect("(∞) is the only ideal point");
    Ok(ScanEntry {
        map: map.describe(),
        size: x.len(),
        unital: is_unital(&x, &e),
        bracket: r.bracket(),
        affine_types: r.affine_types,
        regular_pointed: r.is_regular_pointed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub p: u64,
    pub h: u32,
    /// `q = p^{2h}`; the curves live in AG(2, q^2).
    pub q: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub triples: u64,
    /// `count -> number of (a, m, d)`.
    pub histogram: BTreeMap<usize, u64>,
    pub all_congruent: bool,
    /// Up to ten triples whose count is not `1 mod p`.
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub a: u32,
    pub m: u32,
    pub d: u32,
    pub count: usize,
}

impl Counterexample {
    fn new(params: CurveParams, count: usize) -> Counterexample {
        Counterexample { a: params.a.index(), m: params.m.index(), d: params.d.index(), count }
    }
}

/// Counts `x ∈ GF(q^2)` with `Tr(a x^p + m x + d) = N(x)`, `q = p^{2h}`, for
/// every `a ≠ 0, m, d` (or `sample` seeded triples) and checks each count
/// is `1 mod p`.
pub fn conjecture(p: u64, h: u32, sample: Option<usize>, seed: u64) -> Result<ConjectureReport, ScanError> {
    if prime_power(p) != Some((p as u32, 1)) {
        return Err(ScanError::Field(GaloisError::NotPrime(p as u32)));
    }
    let field = Field::shared(p as u32, 4 * h)?;
    let tn = TraceNorm::new(field.clone())?;
    let q = p.pow(2 * h);
    let mut report = match sample {
        None => {
            let q2 = field.order() as u64;
            let triples = (q2 - 1) * q2 * q2;
            if triples > CONJECTURE_EXHAUSTIVE_LIMIT {
                return Err(ScanError::TooManyTriples(triples));
            }
            let scan = curve_scan_exhaustive(&tn, 1);
            ConjectureReport {
                p,
                h,
                q,
                exhaustive: true,
                seed: None,
                triples: scan.triples,
                histogram: scan.histogram,
                all_congruent: true,
                counterexamples: Vec::new(),
            }
        }
        Some(n) => {
            let (scan, results) = curve_scan_sampled(&tn, 1, n, seed);
            let counterexamples = results
                .into_iter()
                .filter(|&(_, c)| c as u64 % p != 1 % p)
                .take(10)
                .map(|(params, c)| Counterexample::new(params, c))
                .collect();
            ConjectureReport {
                p,
                h,
                q,
                exhaustive: false,
                seed: Some(seed),
                triples: scan.triples,
                histogram: scan.histogram,
                all_congruent: true,
                counterexamples,
            }
        }
    };
    report.all_congruent = report.histogram.keys().all(|&c| c as u64 % p == 1 % p);
    if report.exhaustive && !report.all_congruent {
        report.counterexamples = find_witnesses(&tn, p);
    }
    Ok(report)
}

fn find_witnesses(tn: &TraceNorm, p: u64) -> Vec<Counterexample> {
    let f = tn.field();
    let mut out = Vec::new();
    for a in f.nonzero_elements() {
        for m in f.elements() {
            for d in f.elements() {
                let c = tn.curve_count(1, a, m, d);
                if c as u64 % p != 1 % p {
                    out.push(Counterexample::new(CurveParams { a, m, d }, c));
                    if out.len() == 10 {
                        return out;
                    }
                }
            }
        }
    }
    out
}
