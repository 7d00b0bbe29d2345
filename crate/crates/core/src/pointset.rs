//! Point sets of PG(2,Q) as membership bitmaps, plus their file formats.
//!
//! The text format is line oriented:
//!
//! ```text
//! regsets-pointset 1
//! <p> <n> <modulus c_0 .. c_n> <Q> <label ...>
//! <member index>
//! ...
//! ```
//!
//! Member indices are ascending. The JSON form carries the same fields.

use std::fmt::Write as _;
use std::sync::Arc;

use bitvec::vec::BitVec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{Field, GaloisError};
use crate::plane::{Plane, PlaneLine, PlanePoint};

pub const TEXT_MAGIC: &str = "regsets-pointset";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("missing or unsupported header: {0}")]
    Header(String),
    #[error("malformed number {0:?}")]
    Number(String),
    #[error("modulus {found:?} differs from the canonical modulus {expected:?}")]
    Modulus { expected: Vec<u32>, found: Vec<u32> },
    #[error("field order {found} does not match p^n = {expected}")]
    Order { expected: u32, found: u32 },
    #[error("point index {0} out of range")]
    Index(u32),
    #[error("member list is not strictly ascending at {0}")]
    Unsorted(u32),
    #[error(transparent)]
    Field(#[from] GaloisError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone)]
pub struct PointSet {
    plane: Arc<Plane>,
    members: BitVec,
    label: String,
}

impl std::fmt::Debug for PointSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PointSet({:?}, {} points, {:?})", self.plane, self.len(), self.label)
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.plane.field() == other.plane.field() && self.members == other.members
    }
}

impl PointSet {
    pub fn empty(plane: Arc<Plane>, label: impl Into<String>) -> PointSet {
        let size = plane.size() as usize;
        PointSet { plane, members: BitVec::repeat(false, size), label: label.into() }
    }

    pub fn from_indices(
        plane: Arc<Plane>,
        indices: impl IntoIterator<Item = u32>,
        label: impl Into<String>,
    ) -> PointSet {
        let mut set = PointSet::empty(plane, label);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn plane(&self) -> &Arc<Plane> {
        &self.plane
    }

    pub fn field(&self) -> &Arc<Field> {
        self.plane.field()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn insert(&mut self, index: u32) {
        self.members.set(index as usize, true);
    }

    pub fn remove(&mut self, index: u32) {
        self.members.set(index as usize, false);
    }

    #[inline]
    pub fn contains(&self, index: u32) -> bool {
        self.members[index as usize]
    }

    pub fn contains_point(&self, p: &PlanePoint) -> bool {
        self.contains(p.index)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    /// Member indices, ascending.
    pub fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter_ones().map(|i| i as u32)
    }

    pub fn points(&self) -> impl Iterator<Item = PlanePoint> + '_ {
        self.indices().map(|i| self.plane.point_at(i).unwrap())
    }

    /// `|X ∩ ℓ|`.
    pub fn line_intersection(&self, l: &PlaneLine) -> usize {
        self.plane.points_on_line(l).iter().filter(|p| self.contains(p.index)).count()
    }

    /// Members with `z = 0`.
    pub fn ideal_points(&self) -> impl Iterator<Item = u32> + '_ {
        let q = self.plane.order();
        self.indices().filter(move |&i| i >= q * q)
    }

    pub fn to_text(&self) -> String {
        let f = self.field();
        let mut out = String::new();
        writeln!(out, "{TEXT_MAGIC} {FORMAT_VERSION}").unwrap();
        write!(out, "{} {}", f.characteristic(), f.degree()).unwrap();
        for c in f.modulus() {
            write!(out, " {c}").unwrap();
        }
        writeln!(out, " {} {}", f.order(), self.label).unwrap();
        for i in self.indices() {
            writeln!(out, "{i}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PointSet, FormatError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let magic = lines.next().unwrap_or_default();
        if magic.trim() != format!("{TEXT_MAGIC} {FORMAT_VERSION}") {
            return Err(FormatError::Header(magic.to_string()));
        }
        let header = lines.next().ok_or_else(|| FormatError::Header(String::new()))?;
        let mut tokens = header.split_whitespace();
        let mut next_num = || -> Result<u32, FormatError> {
            let t = tokens.next().ok_or_else(|| FormatError::Header(header.to_string()))?;
            t.parse().map_err(|_| FormatError::Number(t.to_string()))
        };
        let p = next_num()?;
        let n = next_num()?;
        let modulus = (0..=n).map(|_| next_num()).collect::<Result<Vec<_>, _>>()?;
        let order = next_num()?;
        let label = header.split_whitespace().skip(n as usize + 4).collect::<Vec<_>>().join(" ");
        let members = lines
            .map(|l| l.trim().parse::<u32>().map_err(|_| FormatError::Number(l.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        build(PointSetRecord { version: FORMAT_VERSION, p, n, modulus, order, label, members })
    }

    pub fn to_record(&self) -> PointSetRecord {
        let f = self.field();
        PointSetRecord {
            version: FORMAT_VERSION,
            p: f.characteristic(),
            n: f.degree(),
            modulus: f.modulus().to_vec(),
            order: f.order(),
            label: self.label.clone(),
            members: self.indices().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).unwrap()
    }

    pub fn from_json(text: &str) -> Result<PointSet, FormatError> {
        build(serde_json::from_str(text)?)
    }

    /// Reads either format, deciding by the first non-blank character.
    pub fn parse(text: &str) -> Result<PointSet, FormatError> {
        if text.trim_start().starts_with('{') {
            PointSet::from_json(text)
        } else {
            PointSet::from_text(text)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetRecord {
    pub version: u32,
    pub p: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
    pub order: u32,
    pub label: String,
    pub members: Vec<u32>,
}

fn build(rec: PointSetRecord) -> Result<PointSet, FormatError> {
    if rec.version != FORMAT_VERSION {
        return Err(FormatError::Header(format!("version {}", rec.version)));
    }
    let field = Field::shared(rec.p, rec.n)?;
    if field.modulus() != rec.modulus.as_slice() {
        return Err(FormatError::Modulus { expected: field.modulus().to_vec(), found: rec.modulus });
    }
    if field.order() != rec.order {
        return Err(FormatError::Order { expected: field.order(), found: rec.order });
    }
    let plane = Plane::shared(field);
    let mut set = PointSet::empty(plane.clone(), rec.label);
    let mut prev = None;
    for i in rec.members {
        if i >= plane.size() {
            return Err(FormatError::Index(i));
        }
        if prev.is_some_and(|p| p >= i) {
            return Err(FormatError::Unsorted(i));
        }
        prev = Some(i);
        set.insert(i);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PointSet {
        let plane = Plane::shared(Field::shared(3, 2).unwrap());
        PointSet::from_indices(plane, [0, 5, 17, 90], "sample set")
    }

    #[test]
    fn cardinality_and_order() {
        let s = sample();
        assert_eq!(s.len(), 4);
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![0, 5, 17, 90]);
        assert_eq!(s.ideal_points().collect::<Vec<_>>(), vec![90]);
    }

    #[test]
    fn text_format_layout() {
        let text = sample().to_text();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("regsets-pointset 1"));
        assert_eq!(lines.next(), Some("3 2 2 1 1 9 sample set"));
        assert_eq!(lines.collect::<Vec<_>>(), vec!["0", "5", "17", "90"]);
    }

    #[test]
    fn both_formats_read_back() {
        let s = sample();
        let t = PointSet::parse(&s.to_text()).unwrap();
        assert_eq!(t, s);
        assert_eq!(t.label(), "sample set");
        let j = PointSet::parse(&s.to_json()).unwrap();
        assert_eq!(j, s);
        assert_eq!(j.to_record(), s.to_record());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(PointSet::from_text("nope"), Err(FormatError::Header(_))));
        let bad_mod = "regsets-pointset 1\n3 2 1 1 1 9 x\n0\n";
        assert!(matches!(PointSet::from_text(bad_mod), Err(FormatError::Modulus { .. })));
        let bad_idx = "regsets-pointset 1\n3 2 2 1 1 9 x\n91\n";
        assert!(matches!(PointSet::from_text(bad_idx), Err(FormatError::Index(91))));
        let unsorted = "regsets-pointset 1\n3 2 2 1 1 9 x\n4\n2\n";
        assert!(matches!(PointSet::from_text(unsorted), Err(FormatError::Unsorted(2))));
    }
}
