//! General hyperplane sections (anticanonical elephants) of 3-fold germs.
//!
//! The section is cut by a pseudo-random linear combination of the
//! variables carrying the anticanonical character (the sum of all variable
//! characters minus the equation characters). One variable is eliminated
//! along the section, and the resulting surface germ is classified on its
//! cover. Genericity is enforced by redrawing: two independent draws must
//! produce the same verdict.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::duval::{duval_classify, DuValError};
use crate::classify::DuValType;
use crate::germ::{Germ, GermError};
use crate::poly::{Polynomial, Rational};
use crate::DEFAULT_TRUNCATION;

/// Verdict of a general hyperplane section, classified on the cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElephantOutcome {
    /// The section's cover is smooth at the origin.
    Smooth { section: Germ },
    /// The section's cover is a rational double point.
    DuVal { section: Germ, duval: DuValType },
}

impl ElephantOutcome {
    pub fn section(&self) -> &Germ {
        match self {
            ElephantOutcome::Smooth { section } => section,
            ElephantOutcome::DuVal { section, .. } => section,
        }
    }

    pub fn duval_type(&self) -> Option<&DuValType> {
        match self {
            ElephantOutcome::Smooth { .. } => None,
            ElephantOutcome::DuVal { duval, .. } => Some(duval),
        }
    }
}

/// Failure modes of section extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElephantError {
    /// No variable carries the anticanonical character, so no linear
    /// section exists.
    NoLinearSection { character: u32 },
    /// The section could not be reduced to a three-variable hypersurface
    /// (e.g. a stubborn two-equation germ).
    NotReducible(String),
    /// Independent draws never produced two matching verdicts; carries a
    /// human-readable summary of every draw.
    Disagreement(Vec<String>),
    Germ(GermError),
}

impl std::fmt::Display for ElephantError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElephantError::NoLinearSection { character } => {
                write!(f, "no variable has the section character {}", character)
            }
            ElephantError::NotReducible(why) => {
                write!(f, "section is not a 3-variable hypersurface: {}", why)
            }
            ElephantError::Disagreement(draws) => {
                write!(f, "section draws never agreed: [{}]", draws.join("; "))
            }
            ElephantError::Germ(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for ElephantError {}

impl From<GermError> for ElephantError {
    fn from(e: GermError) -> Self {
        ElephantError::Germ(e)
    }
}

const DRAW_BUDGET: usize = 4;
const COEFF_RANGE: std::ops::RangeInclusive<i64> = -3..=3;

/// Character of a linear section cutting an anticanonical member: the sum
/// of the variable characters minus the equation characters.
pub fn section_character(g: &Germ) -> u32 {
    let r = g.action().index();
    let mut acc: i64 = 0;
    for v in 0..g.vars().len() {
        acc += g.action().character(v) as i64;
    }
    for c in g.equation_characters() {
        acc -= c as i64;
    }
    acc.rem_euclid(r as i64) as u32
}

/// Cut a general linear section through the origin and classify it on the
/// cover. Draws are seeded; two of at most four must agree.
pub fn general_elephant(g: &Germ, seed: u64) -> Result<ElephantOutcome, ElephantError> {
    let chi = section_character(g);
    let candidates: Vec<usize> = (0..g.vars().len())
        .filter(|&v| g.action().character(v) == chi)
        .collect();
    if candidates.is_empty() {
        return Err(ElephantError::NoLinearSection { character: chi });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes: Vec<Result<ElephantOutcome, String>> = Vec::new();
    let mut summaries: Vec<String> = Vec::new();
    for _ in 0..DRAW_BUDGET {
        let coeffs = draw_coefficients(&mut rng, candidates.len());
        let result = classify_section(g, &candidates, &coeffs);
        let summary = match &result {
            Ok(ElephantOutcome::Smooth { .. }) => "smooth".to_string(),
            Ok(ElephantOutcome::DuVal { duval, .. }) => duval.to_string(),
            Err(why) => format!("error: {}", why),
        };
        // Agreement check against earlier successful draws.
        for earlier in &outcomes {
            if let (Ok(a), Ok(b)) = (earlier, &result) {
                if a.duval_type() == b.duval_type() {
                    return Ok(b.clone());
                }
            }
        }
        summaries.push(summary);
        outcomes.push(result);
    }
    Err(ElephantError::Disagreement(summaries))
}

fn draw_coefficients(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    loop {
        let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(COEFF_RANGE)).collect();
        if coeffs.iter().any(|&c| c != 0) {
            return coeffs;
        }
    }
}

/// Substitute the section `sum coeffs[i] * x_{candidates[i]} = 0` into the
/// germ, eliminating the pivot variable, and classify the cover.
fn classify_section(
    g: &Germ,
    candidates: &[usize],
    coeffs: &[i64],
) -> Result<ElephantOutcome, String> {
    let pivot_pos = coeffs
        .iter()
        .position(|&c| c != 0)
        .expect("at least one nonzero coefficient");
    let pivot = candidates[pivot_pos];
    let pivot_coeff = Rational::from_integer(coeffs[pivot_pos].into());

    let refs: Vec<&str> = g.vars().iter().map(|s| s.as_str()).collect();
    let n = refs.len();
    // pivot = -(sum of the other section terms) / pivot coefficient.
    let mut image = Polynomial::zero(&refs);
    for (pos, &v) in candidates.iter().enumerate() {
        if pos == pivot_pos || coeffs[pos] == 0 {
            continue;
        }
        let c = Rational::from_integer(coeffs[pos].into()) / &pivot_coeff;
        image = image.sub(&Polynomial::variable(&refs, refs[v]).scale(&c));
    }
    let mut images: Vec<Polynomial> = refs
        .iter()
        .map(|v| Polynomial::variable(&refs, v))
        .collect();
    images[pivot] = image;

    let keep: Vec<usize> = (0..n).filter(|&v| v != pivot).collect();
    let kept_refs: Vec<&str> = keep.iter().map(|&v| refs[v]).collect();
    let mut sections = Vec::new();
    for eq in g.equations() {
        let cut = eq
            .substitute_truncated(&images, DEFAULT_TRUNCATION)
            .map_err(|e| e.to_string())?;
        let restricted = cut
            .restrict_vars(&keep)
            .expect("pivot was eliminated")
            .rename_vars(&kept_refs);
        if restricted.is_zero() {
            return Err("an equation vanishes along the section".to_string());
        }
        sections.push(restricted);
    }
    let action = g.action().drop_var(pivot);
    let section_germ =
        Germ::new(&kept_refs, action, sections.clone()).map_err(|e| e.to_string())?;

    // Reduce to a single equation in three variables if necessary.
    let reduced = if sections.len() == 2 {
        let (simplified, _) =
            crate::germ::simplify(&section_germ, DEFAULT_TRUNCATION).map_err(|e| e.to_string())?;
        if simplified.equations().len() != 1 {
            return Err("two-equation section did not reduce".to_string());
        }
        simplified
    } else {
        section_germ
    };

    match reduced.equations() {
        [] => Ok(ElephantOutcome::Smooth {
            section: reduced.clone(),
        }),
        [eq] => match duval_classify(eq) {
            Ok(t) => Ok(ElephantOutcome::DuVal {
                section: reduced.clone(),
                duval: t,
            }),
            Err(DuValError::Smooth) => Ok(ElephantOutcome::Smooth {
                section: reduced.clone(),
            }),
            Err(e) => Err(e.to_string()),
        },
        _ => Err("section retains two equations".to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::DuValFamily;
    use crate::germ::CyclicAction;

    const XYZU: [&str; 4] = ["x", "y", "z", "u"];

    fn hyper(eq: &str) -> Germ {
        let f = Polynomial::parse(eq, &XYZU).unwrap();
        Germ::hypersurface(&XYZU, CyclicAction::trivial(4), f).unwrap()
    }

    #[test]
    fn ordinary_double_point_has_a1_elephant() {
        for k in 2..=8 {
            let g = hyper(&format!("xy + z^2 + u^{}", k));
            let out = general_elephant(&g, 0).unwrap();
            assert_eq!(out.duval_type(), Some(&DuValType::a(1)), "k = {}", k);
        }
    }

    #[test]
    fn e8_representative_has_e8_elephant() {
        let g = hyper("x^2 + y^3 + z^5 + u^7");
        let out = general_elephant(&g, 0).unwrap();
        assert_eq!(out.duval_type(), Some(&DuValType::e(8)));
    }

    #[test]
    fn cd_representative_has_d_elephant() {
        let g = hyper("x^2 + y^2*z + z^3 + u^4");
        let out = general_elephant(&g, 0).unwrap();
        assert_eq!(out.duval_type().unwrap().family, DuValFamily::D);
    }

    #[test]
    fn smooth_germ_has_smooth_section() {
        let g = hyper("x + y^2 + z^2 + u^5");
        let out = general_elephant(&g, 0).unwrap();
        assert!(matches!(out, ElephantOutcome::Smooth { .. }));
    }

    #[test]
    fn quotient_point_section_cover_is_smooth() {
        let g = Germ::quotient_point(3, &[1, 2, 1]).unwrap();
        let out = general_elephant(&g, 0).unwrap();
        // The section eliminates the character-1 variable; the cover is a
        // smooth plane (the quotient itself is the A_2 point).
        assert!(matches!(out, ElephantOutcome::Smooth { .. }));
        assert_eq!(out.section().vars().len(), 2);
    }

    #[test]
    fn quotient_hypersurface_elephant_on_cover() {
        // cA/2: (xy + z^2 + u^2)/(1/2)(1,1,1,0): section character is 1,
        // cut by a combination of x, y, z.
        let f = Polynomial::parse("xy + z^4 + u^2", &XYZU).unwrap();
        let g = Germ::new(&XYZU, CyclicAction::new(2, &[1, 1, 1, 0]), vec![f]).unwrap();
        assert_eq!(section_character(&g), 1);
        let out = general_elephant(&g, 0).unwrap();
        assert_eq!(out.duval_type().unwrap().family, DuValFamily::A);
    }

    #[test]
    fn deterministic_in_the_seed() {
        let g = hyper("x^2 + y^3 + z^5 + u^7");
        let a = general_elephant(&g, 42).unwrap();
        let b = general_elephant(&g, 42).unwrap();
        assert_eq!(a, b);
    }
}
