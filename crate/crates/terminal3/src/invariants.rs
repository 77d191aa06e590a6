//! Resolution invariants of terminal threefold germs.
//!
//! A divisorial contraction to the distinguished point of a germ of Cartier
//! index `r` is called a *w-morphism* when its exceptional divisor has the
//! minimal possible discrepancy `1/r`. Every terminal singular point admits
//! one, and repeatedly extracting such divisors terminates: first all points
//! of the partial resolution become Gorenstein, then smooth. This module
//! enumerates the w-morphisms over a classified germ from a fixed catalog of
//! weighted blow-ups ([`catalog`]), collects the singular points they create
//! ([`sites`]), and computes three invariants by recursion over those points:
//!
//! * [`depth`](search::depth): the least number of w-morphisms needed before
//!   every point is Gorenstein;
//! * [`gdepth`](search::gdepth): the least number needed before every point
//!   is smooth, together with a witness chain;
//! * [`gore_height`](gore::gore_height): the largest pair (Du Val type,
//!   level) realized by general elephants of Gorenstein singular points on
//!   iterated exceptional divisors.
//!
//! All three are exact computations over the rationals; no floating point is
//! involved anywhere.

pub mod catalog;
pub mod gore;
pub mod search;
pub mod sites;
pub mod tables;

use crate::blowup::{BlowupError, BlowupWeight};
use crate::classify::{ClassifyError, DuValType};
use crate::germ::{Germ, GermError};
use num_rational::BigRational;

pub use catalog::{enumerate_w_morphisms, gorenstein_contractions};

/// Recursion depth cap for the depth and gdepth searches.
pub const SEARCH_BUDGET: u32 = 16;

/// Recursion depth cap for the Gorenstein-elephant height.
pub const GORE_BUDGET: u32 = 24;

/// Failure modes of the invariant computations.
#[derive(Debug)]
pub enum InvariantError {
    /// A germ encountered during the recursion could not be classified.
    Classify(ClassifyError),
    /// A weighted blow-up failed structurally (bad weight, broken chart).
    Blowup(BlowupError),
    Germ(GermError),
    /// The germ classified fine but the catalog has no blow-up family for
    /// its class. Distinct from an empty enumeration: a singular point
    /// always admits a w-morphism, so an empty candidate list after
    /// filtering means the catalog is missing a family, not that none
    /// exists.
    CatalogGap { class: String },
    /// The recursion exceeded its depth budget without terminating.
    BudgetExceeded { invariant: &'static str, budget: u32 },
    /// A singular point appeared somewhere the machinery cannot model
    /// (for example on an exceptional axis with a nontrivial stabilizer,
    /// or with an irrational locus of degree three or more).
    UnsupportedLocus { detail: String },
}

impl std::fmt::Display for InvariantError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvariantError::Classify(e) => write!(f, "classification failed: {e}"),
            InvariantError::Blowup(e) => write!(f, "blow-up failed: {e}"),
            InvariantError::Germ(e) => write!(f, "{e}"),
            InvariantError::CatalogGap { class } => {
                write!(f, "no blow-up family in the catalog covers class {class}")
            }
            InvariantError::BudgetExceeded { invariant, budget } => {
                write!(f, "{invariant} recursion exceeded its budget of {budget}")
            }
            InvariantError::UnsupportedLocus { detail } => {
                write!(f, "unsupported singular locus: {detail}")
            }
        }
    }
}

impl std::error::Error for InvariantError {}

impl From<ClassifyError> for InvariantError {
    fn from(e: ClassifyError) -> Self {
        InvariantError::Classify(e)
    }
}

impl From<BlowupError> for InvariantError {
    fn from(e: BlowupError) -> Self {
        InvariantError::Blowup(e)
    }
}

impl From<GermError> for InvariantError {
    fn from(e: GermError) -> Self {
        InvariantError::Germ(e)
    }
}

/// Value of the Gorenstein-elephant height: either "no Gorenstein singular
/// point ever appears" (minus infinity) or a Du Val type with a positive
/// level. Ordered with minus infinity least, then lexicographically by
/// (type, level); the Du Val order is by family `A < D < E`, then subscript.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GorEValue {
    MinusInfinity,
    Finite(DuValType, u32),
}

impl GorEValue {
    /// Successor in the level direction; minus infinity is absorbing.
    pub fn bump(&self) -> GorEValue {
        match self {
            GorEValue::MinusInfinity => GorEValue::MinusInfinity,
            GorEValue::Finite(t, n) => GorEValue::Finite(t.clone(), n + 1),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GorEValue::Finite(..))
    }
}

impl std::fmt::Display for GorEValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GorEValue::MinusInfinity => write!(f, "-infinity"),
            GorEValue::Finite(t, n) => write!(f, "({t}, {n})"),
        }
    }
}

/// A weighted blow-up drawn from the catalog, expressed in the coordinates
/// of `centre` (the classifier's presentation of the germ it was enumerated
/// over, which is isomorphic to the input germ).
#[derive(Debug, Clone)]
pub struct WMorphism {
    pub weight: BlowupWeight,
    pub centre: Germ,
    /// Catalog family the weight came from, with its parameters, e.g.
    /// `"ca:b=2"` or `"ce:(3,2,2,1)"`.
    pub provenance: String,
    /// Discrepancy of the exceptional divisor over the centre: `1/r` for
    /// w-morphisms, an integer `>= 2` for the auxiliary Gorenstein
    /// contractions used by the elephant height.
    pub discrepancy: BigRational,
}

/// Stable key identifying a germ up to the coordinates it is written in.
/// Germs presented differently hash differently and are recomputed; that
/// costs time, never correctness.
pub(crate) fn germ_key(g: &Germ) -> String {
    g.to_file_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::DuValType;

    #[test]
    fn gore_value_order_is_minus_infinity_then_type_then_level() {
        let bottom = GorEValue::MinusInfinity;
        let a1_1 = GorEValue::Finite(DuValType::a(1), 1);
        let a1_2 = GorEValue::Finite(DuValType::a(1), 2);
        let a3_1 = GorEValue::Finite(DuValType::a(3), 1);
        let d4_1 = GorEValue::Finite(DuValType::d(4), 1);
        let e8_1 = GorEValue::Finite(DuValType::e(8), 1);
        assert!(bottom < a1_1);
        assert!(a1_1 < a1_2);
        assert!(a1_2 < a3_1);
        assert!(a3_1 < d4_1);
        assert!(d4_1 < e8_1);
    }

    #[test]
    fn bump_raises_level_and_absorbs_minus_infinity() {
        assert_eq!(GorEValue::MinusInfinity.bump(), GorEValue::MinusInfinity);
        assert_eq!(
            GorEValue::Finite(DuValType::a(2), 1).bump(),
            GorEValue::Finite(DuValType::a(2), 2)
        );
    }

    #[test]
    fn gore_value_displays_readably() {
        assert_eq!(GorEValue::MinusInfinity.to_string(), "-infinity");
        assert_eq!(
            GorEValue::Finite(DuValType::a(1), 2).to_string(),
            "(A1, 2)"
        );
    }
}
