//! Singularity classification: the Milnor-dimension oracle, Du Val (ADE)
//! classification of surface germs, general-elephant sections, and the
//! terminal 3-fold classes.

pub mod duval;
pub mod elephant;
pub mod forms;
pub mod milnor;
pub mod terminal;

use std::cmp::Ordering;
use std::fmt;

pub use duval::{duval_classify, DuValError};
pub use elephant::{general_elephant, ElephantError, ElephantOutcome};
pub use milnor::{milnor_number, MilnorOutcome};
pub use terminal::{terminal_classify, ClassifyError, SingularityClass, SingularityKind};

/// One of the Du Val (ADE) surface singularity symbols.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum DuValFamily {
    A,
    D,
    E,
}

/// A Du Val type: family plus subscript (A: n >= 1, D: n >= 4,
/// E: n in {6, 7, 8}).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct DuValType {
    pub family: DuValFamily,
    pub subscript: u32,
}

impl DuValType {
    pub fn a(n: u32) -> Self {
        assert!(n >= 1);
        DuValType { family: DuValFamily::A, subscript: n }
    }

    pub fn d(n: u32) -> Self {
        assert!(n >= 4);
        DuValType { family: DuValFamily::D, subscript: n }
    }

    pub fn e(n: u32) -> Self {
        assert!((6..=8).contains(&n));
        DuValType { family: DuValFamily::E, subscript: n }
    }

    /// The Milnor number of the type equals its subscript.
    pub fn milnor(&self) -> u32 {
        self.subscript
    }
}

impl fmt::Display for DuValType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            DuValFamily::A => "A",
            DuValFamily::D => "D",
            DuValFamily::E => "E",
        };
        write!(f, "{}{}", fam, self.subscript)
    }
}

/// Total order on Du Val symbols: every A before every D before every E,
/// and within a family by subscript.
impl Ord for DuValType {
    fn cmp(&self, other: &Self) -> Ordering {
        let fam = |f: DuValFamily| match f {
            DuValFamily::A => 0u8,
            DuValFamily::D => 1,
            DuValFamily::E => 2,
        };
        fam(self.family)
            .cmp(&fam(other.family))
            .then(self.subscript.cmp(&other.subscript))
    }
}

impl PartialOrd for DuValType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duval_order_is_family_first() {
        assert!(DuValType::a(9) < DuValType::d(4));
        assert!(DuValType::d(8) < DuValType::e(6));
        assert!(DuValType::a(1) < DuValType::a(2));
        assert!(DuValType::e(7) > DuValType::e(6));
    }

    #[test]
    fn duval_display() {
        assert_eq!(DuValType::a(1).to_string(), "A1");
        assert_eq!(DuValType::e(8).to_string(), "E8");
    }
}
