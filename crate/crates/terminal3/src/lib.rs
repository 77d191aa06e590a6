//! Symbolic calculus of three-dimensional terminal singularities.
//!
//! The crate models germs of 3-fold singularities (hypersurfaces and
//! complete intersections, possibly under a cyclic quotient action),
//! performs weighted blow-ups with exact discrepancy tracking, classifies
//! the resulting singularities, computes the depth-style resolution
//! invariants, and emits the associated flop factorization diagrams.

pub mod blowup;
pub mod classify;
pub mod germ;
pub mod invariants;
pub mod linalg;
pub mod poly;

/// Default total-degree truncation for power-series manipulations. Large
/// enough that every germ in the test corpus is determined well below it.
pub const DEFAULT_TRUNCATION: u32 = 24;
