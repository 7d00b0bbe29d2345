//! The Desarguesian plane PG(2,Q) with a fixed point and line numbering.
//!
//! Points are normalized homogeneous triples and numbered as
//!
//! * affine `(x, y) = (x:y:1)` at `x*Q + y`,
//! * directions `(d) = (1:d:0)` at `Q^2 + d`,
//! * `(∞) = (0:1:0)` at `Q^2 + Q`.
//!
//! Lines `[a:b:c]` (incident with `(x:y:z)` iff `ax + by + cz = 0`) are
//! normalized and numbered by the same rule, so `ℓ∞ = [0:0:1]` has index 0.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::galois::{Field, FieldElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error("all coordinates are zero")]
    ZeroVector,
    #[error("points coincide")]
    SamePoint,
    #[error("point {0} is not on the line at infinity")]
    NotAtInfinity(u32),
    #[error("index {0} out of range")]
    BadIndex(u32),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePoint {
    pub coords: [FieldElement; 3],
    pub index: u32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaneLine {
    pub coeffs: [FieldElement; 3],
    pub index: u32,
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.coords;
        write!(f, "({x}:{y}:{z})")
    }
}

impl fmt::Display for PlaneLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.coeffs;
        write!(f, "[{a}:{b}:{c}]")
    }
}

/// Internal numbering of lines by affine equation, used by incidence counting.
///
/// `y = m x + d` has key `m*Q + d`, `x = α` has key `Q^2 + α`, `ℓ∞` has key
/// `Q^2 + Q`.
pub(crate) type LineKey = u32;

pub struct Plane {
    field: Arc<Field>,
    q: u32,
    key_to_line: Vec<u32>,
    line_to_key: Vec<u32>,
}

impl fmt::Debug for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PG(2,{})", self.q)
    }
}

impl Plane {
    pub fn new(field: Arc<Field>) -> Plane {
        let q = field.order();
        let size = (q * q + q + 1) as usize;
        let mut plane = Plane { field, q, key_to_line: Vec::new(), line_to_key: Vec::new() };
        let mut key_to_line = vec![0u32; size];
        let mut line_to_key = vec![0u32; size];
        for key in 0..size as u32 {
            let coeffs = plane.key_coeffs(key);
            let line = plane.normalize(coeffs).expect("line equations are nonzero");
            let idx = plane.encode(line);
            key_to_line[key as usize] = idx;
            line_to_key[idx as usize] = key;
        }
        plane.key_to_line = key_to_line;
        plane.line_to_key = line_to_key;
        plane
    }

    pub fn shared(field: Arc<Field>) -> Arc<Plane> {
        Arc::new(Plane::new(field))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Order `Q` of the coordinate field.
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Number of points (and of lines): `Q^2 + Q + 1`.
    pub fn size(&self) -> u32 {
        self.q * self.q + self.q + 1
    }

    // ---- points ----

    pub fn point(&self, x: FieldElement, y: FieldElement, z: FieldElement) -> Result<PlanePoint, PlaneError> {
        let coords = self.normalize([x, y, z])?;
        Ok(PlanePoint { coords, index: self.encode(coords) })
    }

    pub fn affine(&self, x: FieldElement, y: FieldElement) -> PlanePoint {
        PlanePoint { coords: [x, y, FieldElement::ONE], index: x.index() * self.q + y.index() }
    }

    /// The ideal point `(d) = (1:d:0)` of lines with slope `d`.
    pub fn direction(&self, d: FieldElement) -> PlanePoint {
        PlanePoint {
            coords: [FieldElement::ONE, d, FieldElement::ZERO],
            index: self.q * self.q + d.index(),
        }
    }

    /// `(∞) = (0:1:0)`.
    pub fn infinity(&self) -> PlanePoint {
        PlanePoint {
            coords: [FieldElement::ZERO, FieldElement::ONE, FieldElement::ZERO],
            index: self.q * self.q + self.q,
        }
    }

    pub fn point_at(&self, index: u32) -> Result<PlanePoint, PlaneError> {
        let coords = self.decode(index)?;
        Ok(PlanePoint { coords, index })
    }

    pub fn points(&self) -> impl Iterator<Item = PlanePoint> + '_ {
        (0..self.size()).map(move |i| self.point_at(i).unwrap())
    }

    pub fn is_affine_index(&self, index: u32) -> bool {
        index < self.q * self.q
    }

    /// `(x, y)` of an affine point index.
    #[inline]
    pub fn affine_coords(&self, index: u32) -> Option<(FieldElement, FieldElement)> {
        self.is_affine_index(index)
            .then(|| (self.field.el(index / self.q), self.field.el(index % self.q)))
    }

    // ---- lines ----

    pub fn line(&self, a: FieldElement, b: FieldElement, c: FieldElement) -> Result<PlaneLine, PlaneError> {
        let coeffs = self.normalize([a, b, c])?;
        Ok(PlaneLine { coeffs, index: self.encode(coeffs) })
    }

    pub fn line_at(&self, index: u32) -> Result<PlaneLine, PlaneError> {
        let coeffs = self.decode(index)?;
        Ok(PlaneLine { coeffs, index })
    }

    pub fn lines(&self) -> impl Iterator<Item = PlaneLine> + '_ {
        (0..self.size()).map(move |i| self.line_at(i).unwrap())
    }

    /// `ℓ∞ : z = 0`.
    pub fn line_at_infinity(&self) -> PlaneLine {
        PlaneLine { coeffs: [FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE], index: 0 }
    }

    /// `x = α`.
    pub fn vertical(&self, alpha: FieldElement) -> PlaneLine {
        self.line_at(self.key_to_line[(self.q * self.q + alpha.index()) as usize]).unwrap()
    }

    /// `y = m x + d`.
    pub fn nonvertical(&self, m: FieldElement, d: FieldElement) -> PlaneLine {
        self.line_at(self.key_to_line[(m.index() * self.q + d.index()) as usize]).unwrap()
    }

    pub fn incident(&self, p: &PlanePoint, l: &PlaneLine) -> bool {
        let f = &self.field;
        let s = f.add(
            f.add(f.mul(p.coords[0], l.coeffs[0]), f.mul(p.coords[1], l.coeffs[1])),
            f.mul(p.coords[2], l.coeffs[2]),
        );
        s.is_zero()
    }

    /// The line joining two distinct points.
    pub fn line_through(&self, p: &PlanePoint, r: &PlanePoint) -> Result<PlaneLine, PlaneError> {
        if p.index == r.index {
            return Err(PlaneError::SamePoint);
        }
        let c = self.cross(p.coords, r.coords);
        self.line(c[0], c[1], c[2])
    }

    /// The common point of two distinct lines.
    pub fn meet(&self, l: &PlaneLine, m: &PlaneLine) -> Result<PlanePoint, PlaneError> {
        if l.index == m.index {
            return Err(PlaneError::SamePoint);
        }
        let c = self.cross(l.coeffs, m.coeffs);
        self.point(c[0], c[1], c[2])
    }

    /// The `Q + 1` points of a line, ascending by index.
    pub fn points_on_line(&self, l: &PlaneLine) -> Vec<PlanePoint> {
        let f = &self.field;
        let [a, b, c] = l.coeffs;
        let mut pts = Vec::with_capacity(self.q as usize + 1);
        if !c.is_zero() {
            // c = 1: a x + b y + 1 = 0
            if !b.is_zero() {
                let binv = f.inv(b).unwrap();
                for x in f.elements() {
                    let y = f.neg(f.mul(f.add(FieldElement::ONE, f.mul(a, x)), binv));
                    pts.push(self.affine(x, y));
                }
                pts.push(self.direction(f.neg(f.mul(a, binv))));
            } else if !a.is_zero() {
                let x = f.neg(f.inv(a).unwrap());
                pts.extend(f.elements().map(|y| self.affine(x, y)));
                pts.push(self.infinity());
            } else {
                pts.extend(f.elements().map(|d| self.direction(d)));
                pts.push(self.infinity());
            }
        } else if !a.is_zero() {
            // a = 1: x + b y = 0
            let nb = f.neg(b);
            pts.extend(f.elements().map(|t| self.affine(f.mul(nb, t), t)));
            if b.is_zero() {
                pts.push(self.infinity());
            } else {
                pts.push(self.direction(f.neg(f.inv(b).unwrap())));
            }
        } else {
            // y = 0
            pts.extend(f.elements().map(|x| self.affine(x, FieldElement::ZERO)));
            pts.push(self.direction(FieldElement::ZERO));
        }
        pts.sort_by_key(|p| p.index);
        pts
    }

    /// The `Q + 1` lines through a point, ascending by index.
    pub fn pencil(&self, p: &PlanePoint) -> Vec<PlaneLine> {
        let mut lines: Vec<PlaneLine> = self
            .pencil_indices(p)
            .into_iter()
            .map(|i| self.line_at(i).unwrap())
            .collect();
        lines.sort_by_key(|l| l.index);
        lines
    }

    /// Line indices through a point (unsorted).
    pub fn pencil_indices(&self, p: &PlanePoint) -> Vec<u32> {
        self.pencil_keys(p.index).into_iter().map(|k| self.key_to_line[k as usize]).collect()
    }

    /// The `Q` affine lines through an ideal point.
    pub fn parallel_class(&self, d: &PlanePoint) -> Result<Vec<PlaneLine>, PlaneError> {
        if self.is_affine_index(d.index) {
            return Err(PlaneError::NotAtInfinity(d.index));
        }
        Ok(self.pencil(d).into_iter().filter(|l| l.index != 0).collect())
    }

    // ---- key space ----

    pub(crate) fn key_to_line(&self, key: LineKey) -> u32 {
        self.key_to_line[key as usize]
    }

    #[cfg(test)]
    pub(crate) fn line_to_key(&self, line: u32) -> LineKey {
        self.line_to_key[line as usize]
    }

    /// Keys of the lines through the point with the given index.
    pub(crate) fn pencil_keys(&self, index: u32) -> Vec<LineKey> {
        let q = self.q;
        let f = &self.field;
        let mut keys = Vec::with_capacity(q as usize + 1);
        if let Some((x, y)) = self.affine_coords(index) {
            for m in f.elements() {
                keys.push(m.index() * q + f.sub(y, f.mul(m, x)).index());
            }
            keys.push(q * q + x.index());
        } else if index < q * q + q {
            let m = index - q * q;
            keys.extend((0..q).map(|d| m * q + d));
            keys.push(q * q + q);
        } else {
            keys.extend((0..q).map(|a| q * q + a));
            keys.push(q * q + q);
        }
        keys
    }

    fn key_coeffs(&self, key: LineKey) -> [FieldElement; 3] {
        let q = self.q;
        let f = &self.field;
        if key < q * q {
            // m x - y + d = 0
            [f.el(key / q), f.neg(FieldElement::ONE), f.el(key % q)]
        } else if key < q * q + q {
            // x - α = 0
            [FieldElement::ONE, FieldElement::ZERO, f.neg(f.el(key - q * q))]
        } else {
            [FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE]
        }
    }

    // ---- coordinates ----

    fn cross(&self, u: [FieldElement; 3], v: [FieldElement; 3]) -> [FieldElement; 3] {
        let f = &self.field;
        let det = |a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement| f.sub(f.mul(a, d), f.mul(b, c));
        [det(u[1], u[2], v[1], v[2]), det(u[2], u[0], v[2], v[0]), det(u[0], u[1], v[0], v[1])]
    }

    fn normalize(&self, v: [FieldElement; 3]) -> Result<[FieldElement; 3], PlaneError> {
        let f = &self.field;
        let pivot = if !v[2].is_zero() {
            v[2]
        } else if !v[0].is_zero() {
            v[0]
        } else if !v[1].is_zero() {
            v[1]
        } else {
            return Err(PlaneError::ZeroVector);
        };
        let s = f.inv(pivot).unwrap();
        Ok([f.mul(v[0], s), f.mul(v[1], s), f.mul(v[2], s)])
    }

    fn encode(&self, v: [FieldElement; 3]) -> u32 {
        let q = self.q;
        if !v[2].is_zero() {
            v[0].index() * q + v[1].index()
        } else if !v[0].is_zero() {
            q * q + v[1].index()
        } else {
            q * q + q
        }
    }

    fn decode(&self, index: u32) -> Result<[FieldElement; 3], PlaneError> {
        let q = self.q;
        let f = &self.field;
        if index < q * q {
            Ok([f.el(index / q), f.el(index % q), FieldElement::ONE])
        } else if index < q * q + q {
            Ok([FieldElement::ONE, f.el(index - q * q), FieldElement::ZERO])
        } else if index == q * q + q {
            Ok([FieldElement::ZERO, FieldElement::ONE, FieldElement::ZERO])
        } else {
            Err(PlaneError::BadIndex(index))
        }
    }
}
