//! Regular point sets of affine and pointed type in finite Desarguesian
//! planes, the trace-norm sets `Tr(y + f(x)) = N(x)` of PG(2, q²), and the
//! projective codes they generate.
//!
//! Everything is computed exactly: field arithmetic is table driven and the
//! classification enumerates every line of the plane.

pub mod classify;
pub mod codes;
pub mod constructions;
pub mod galois;
pub mod plane;
pub mod pointset;
pub mod scan;
pub mod verify;

pub use classify::{classify, enumerate, IntersectionEnumerator, TypeReport};
pub use codes::{code_from_set, weights_exhaustive, weights_from_enumerator, CodeFamily, WeightEnumerator};
pub use galois::{Field, FieldElement, GaloisError};
pub use plane::{Plane, PlaneLine, PlanePoint};
pub use pointset::PointSet;
