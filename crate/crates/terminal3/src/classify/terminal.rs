//! Recognition of three-dimensional terminal singularity germs.
//!
//! [`terminal_classify`] reduces a germ to (near) normal coordinates and
//! names its family in the standard terminal list: smooth points, isolated
//! cyclic quotient points `1/r(a, r-a, 1)`, and the compound Du Val families
//! `cA_n`, `cA/r`, `cAx/2`, `cAx/4`, `cD_n`, `cD/2`, `cD/3`, `cE_n`, `cE/2`.
//!
//! The route mirrors how the families are presented. Variables carrying a
//! linear equation are eliminated first. The quadratic part of the surviving
//! equation is then reduced equivariantly: removable squares are split off,
//! and a cross term between variables of opposite characters is normalized
//! into a hyperbolic plane. The quadratic rank decides the rest. Rank two or
//! more lands on the `cA` side, where the family is read from the characters
//! of the surviving variables; rank one lands on the `cD`/`cE` side, where
//! the repeated-factor pattern of the residual cubic distinguishes the
//! families and, for `cE`, the orders of the depressed-cube coefficients
//! pick the subscript. Germs outside the terminal range are reported with
//! the obstruction rather than forced into a family.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::classify::elephant::{general_elephant, ElephantError};
use crate::classify::forms::{self, FormsError, SquareSplit, TernaryCubicPattern};
use crate::classify::milnor::{milnor_number, MilnorOutcome};
use crate::classify::{DuValFamily, DuValType};
use crate::germ::{simplify, CyclicAction, Germ, GermError};
use crate::linalg::mod_inverse;
use crate::poly::{ExponentVector, Polynomial, Rational};
use crate::DEFAULT_TRUNCATION;

/// Seed for the general-section draws used to read off `cD` subscripts and
/// section types. Classification is deterministic for a fixed seed.
const ELEPHANT_SEED: u64 = 0;

// ---------------------------------------------------------------------------
// Result and error types.

/// The terminal families, tagged with the data that names a member.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SingularityKind {
    Smooth,
    /// Isolated cyclic quotient point `1/r(a, r-a, 1)` with `gcd(a, r) = 1`.
    CyclicQuotient { r: u32, chars: [u32; 3] },
    /// Hypersurface `xy + g(z, u)` with `n = mult(g) - 1 >= 1`.
    CA { n: u32 },
    /// Quotient `(xy + g(z, u)) / (1/r)(a, -a, 1, 0)` with `g` invariant.
    CAQuotient { r: u32 },
    /// Quotient `(x^2 + y^2 + g(z, u)) / r` with `r` equal to 2 or 4 and a
    /// quadratic part that stays diagonal under the action.
    CAxQuotient { r: u32 },
    /// Hypersurface with corank-three quadratic part and a residual cubic
    /// that is not a perfect cube: `x^2 + y^2 z + ...`; `n` is the Du Val
    /// subscript of the general hyperplane section.
    CD { n: u32 },
    /// `cD`-shaped quotient of index 2 or 3.
    CDQuotient { r: u32 },
    /// Hypersurface `x^2 + y^3 + y g(z, u) + h(z, u)`; `n` in `6..=8`.
    CE { n: u32 },
    /// `cE`-shaped quotient of index 2.
    CEQuotient,
}

impl SingularityKind {
    /// The Gorenstein index (order of the quotient group).
    pub fn index(&self) -> u32 {
        match self {
            SingularityKind::Smooth
            | SingularityKind::CA { .. }
            | SingularityKind::CD { .. }
            | SingularityKind::CE { .. } => 1,
            SingularityKind::CyclicQuotient { r, .. }
            | SingularityKind::CAQuotient { r }
            | SingularityKind::CAxQuotient { r }
            | SingularityKind::CDQuotient { r } => *r,
            SingularityKind::CEQuotient => 2,
        }
    }

    pub fn is_gorenstein(&self) -> bool {
        self.index() == 1
    }

    /// Conventional name, e.g. `cA_2`, `cAx/4`, `1/5(2,3,1)`.
    pub fn label(&self) -> String {
        match self {
            SingularityKind::Smooth => "smooth".into(),
            SingularityKind::CyclicQuotient { r, chars } => {
                format!("1/{}({},{},{})", r, chars[0], chars[1], chars[2])
            }
            SingularityKind::CA { n } => format!("cA_{n}"),
            SingularityKind::CAQuotient { r } => format!("cA/{r}"),
            SingularityKind::CAxQuotient { r } => format!("cAx/{r}"),
            SingularityKind::CD { n } => format!("cD_{n}"),
            SingularityKind::CDQuotient { r } => format!("cD/{r}"),
            SingularityKind::CE { n } => format!("cE_{n}"),
            SingularityKind::CEQuotient => "cE/2".into(),
        }
    }
}

impl std::fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A classified germ together with the evidence gathered on the way.
#[derive(Clone, Debug)]
pub struct SingularityClass {
    pub kind: SingularityKind,
    /// Du Val type of a general hyperplane section through the point, when
    /// one was computed. `None` for smooth and quotient points (the section
    /// is smooth) and when a quotient-family draw failed to stabilize.
    pub elephant: Option<DuValType>,
    /// The germ rewritten in (near) normal coordinates: squares split off,
    /// hyperbolic planes assembled, doubled or tripled cubic lines moved
    /// onto coordinate axes.
    pub presentation: Germ,
    /// Milnor dimension of the equation on the canonical cover, when it was
    /// computed along the way (it equals that of the reduced residual).
    pub milnor: Option<u32>,
}

#[derive(Debug)]
pub enum ClassifyError {
    /// The germ is not three-dimensional.
    WrongDimension(usize),
    /// The singular locus has positive dimension.
    NotIsolated,
    /// A structural obstruction rules out terminality; the string names it.
    NotTerminal(String),
    /// The germ does not match any family recognized here.
    Unrecognized(String),
    /// Two independent readings of the same datum disagreed.
    Inconsistent(String),
    /// A general-section draw that the classification depends on failed.
    Elephant(ElephantError),
    Germ(GermError),
}

impl std::fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassifyError::WrongDimension(d) => {
                write!(f, "expected a 3-fold germ, got dimension {d}")
            }
            ClassifyError::NotIsolated => {
                write!(f, "the singular locus has positive dimension")
            }
            ClassifyError::NotTerminal(why) => write!(f, "not terminal: {why}"),
            ClassifyError::Unrecognized(why) => write!(f, "unrecognized germ: {why}"),
            ClassifyError::Inconsistent(why) => write!(f, "inconsistent readings: {why}"),
            ClassifyError::Elephant(e) => write!(f, "general section failed: {e}"),
            ClassifyError::Germ(e) => write!(f, "germ error: {e}"),
        }
    }
}

impl From<GermError> for ClassifyError {
    fn from(e: GermError) -> Self {
        ClassifyError::Germ(e)
    }
}

impl std::error::Error for ClassifyError {}

// ---------------------------------------------------------------------------
// Entry point.

/// Classify a 3-fold germ into the terminal families, or explain why it
/// falls outside them.
pub fn terminal_classify(g: &Germ) -> Result<SingularityClass, ClassifyError> {
    if g.dim() != 3 {
        return Err(ClassifyError::WrongDimension(g.dim()));
    }
    let (reduced, _) = simplify(g, DEFAULT_TRUNCATION)?;
    match reduced.equations().len() {
        0 => classify_point(&reduced),
        1 => classify_hypersurface(&reduced),
        n => Err(ClassifyError::Unrecognized(format!(
            "{n} equations remain after linear elimination; terminal 3-fold \
             germs embed in codimension one"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Quotients of smooth points.

fn classify_point(g: &Germ) -> Result<SingularityClass, ClassifyError> {
    let act = g.action().normalized();
    let r = act.index();
    if r == 1 {
        return Ok(SingularityClass {
            kind: SingularityKind::Smooth,
            elephant: None,
            presentation: g.clone(),
            milnor: None,
        });
    }
    let chars: Vec<u32> = (0..g.vars().len()).map(|v| act.character(v)).collect();
    debug_assert_eq!(chars.len(), 3);
    // Terminal quotient points are exactly 1/r(a, -a, b) with a and b
    // invertible; renormalize the transverse weight b to 1.
    for i in 0..3 {
        for j in (i + 1)..3 {
            let k = 3 - i - j;
            if (chars[i] as u64 + chars[j] as u64) % r as u64 != 0 {
                continue;
            }
            if chars[i].gcd(&r) != 1 || chars[k].gcd(&r) != 1 {
                continue;
            }
            let t = mod_inverse(chars[k] as u64, r as u64);
            let a = ((chars[i] as u64 * t) % r as u64) as u32;
            let a = a.min(r - a);
            let presentation = Germ::quotient_point(r, &[a as i64, (r - a) as i64, 1])?;
            return Ok(SingularityClass {
                kind: SingularityKind::CyclicQuotient {
                    r,
                    chars: [a, r - a, 1],
                },
                elephant: None,
                presentation,
                milnor: None,
            });
        }
    }
    Err(ClassifyError::NotTerminal(format!(
        "the quotient point {act} has no weight pair summing to zero with \
         both it and the transverse weight invertible"
    )))
}

// ---------------------------------------------------------------------------
// Hypersurface quotients: quadratic reduction and dispatch.

fn classify_hypersurface(g: &Germ) -> Result<SingularityClass, ClassifyError> {
    let act = g.action().normalized();
    let f = g.equations()[0].truncate(DEFAULT_TRUNCATION);
    if f.is_zero() {
        return Err(ClassifyError::Unrecognized(
            "the equation vanishes identically to the working precision".into(),
        ));
    }
    debug_assert!(
        !f.has_linear_or_constant_part(),
        "linear parts are eliminated before dispatch"
    );
    match forms::split_quadratic(&f, &act, DEFAULT_TRUNCATION) {
        Ok(split) => dispatch_split(g, &act, split),
        Err(FormsError::MixedCharacters) => classify_hyperbolic(g, &act, &f),
        Err(e) => Err(ClassifyError::Unrecognized(format!(
            "quadratic reduction failed: {e}"
        ))),
    }
}

fn dispatch_split(
    g: &Germ,
    act: &CyclicAction,
    split: SquareSplit,
) -> Result<SingularityClass, ClassifyError> {
    match split.split.len() {
        0 => Err(ClassifyError::NotTerminal(
            "the equation has multiplicity at least three".into(),
        )),
        1 => classify_corank_three(g, act, split),
        _ if act.index() == 1 => classify_ca(g, act, &split),
        _ => classify_quotient_split(g, act, &split),
    }
}

// ---------------------------------------------------------------------------
// The cA side: quadratic rank at least two.

fn classify_ca(
    g: &Germ,
    act: &CyclicAction,
    split: &SquareSplit,
) -> Result<SingularityClass, ClassifyError> {
    // Any pair is equivalent here; prefer one that assembles into a rational
    // hyperbolic plane for an xy-shaped presentation.
    let k = split.split.len();
    let pair = hyperbolizable_pair(split).unwrap_or((0, 1));
    debug_assert!(k >= 2);
    let refs = g.var_refs();
    let g_part = reassemble(&refs, split, &[pair.0, pair.1]);
    let keep = complement_vars(refs.len(), split.split[pair.0].0, split.split[pair.1].0);
    let mu = isolated_milnor(&g_part, &keep)?;
    let m = g_part
        .multiplicity()
        .expect("isolated residual is nonzero");
    let n = m - 1;
    let pres_eq = presentation_quadric(&refs, split, pair, &g_part);
    let presentation = Germ::new(&refs, act.clone(), vec![pres_eq])?;
    Ok(SingularityClass {
        kind: SingularityKind::CA { n },
        elephant: Some(DuValType::a(n)),
        presentation,
        milnor: Some(mu),
    })
}

/// A pair of split squares whose sum is a hyperbolic plane over the
/// rationals (`-c_b / c_a` a perfect square). Among the candidates the one
/// on the lexicographically earliest variable pair wins, so the presentation
/// does not depend on the pivot order of the diagonalization.
fn hyperbolizable_pair(split: &SquareSplit) -> Option<(usize, usize)> {
    let k = split.split.len();
    let mut best: Option<((usize, usize), (usize, usize))> = None;
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let ca = &split.split[a].1;
            let cb = &split.split[b].1;
            if rational_sqrt(&-(cb / ca)).is_none() {
                continue;
            }
            let (va, vb) = (split.split[a].0, split.split[b].0);
            let key = (va.min(vb), va.max(vb));
            if best.as_ref().is_none_or(|(seen, _)| key < *seen) {
                best = Some((key, (a, b)));
            }
        }
    }
    best.map(|(_, pair)| pair)
}

/// The equation in split coordinates with the squares at the two given
/// positions either assembled into a cross term (when rationally possible)
/// or kept diagonal.
fn presentation_quadric(
    refs: &[&str],
    split: &SquareSplit,
    pair: (usize, usize),
    g_part: &Polynomial,
) -> Polynomial {
    let nv = refs.len();
    let (va, ca) = &split.split[pair.0];
    let (vb, cb) = &split.split[pair.1];
    if rational_sqrt(&-(cb / ca)).is_some() {
        Polynomial::from_terms(refs, vec![(cross_ev(nv, *va, *vb), Rational::one())]).add(g_part)
    } else {
        reassemble(refs, split, &[])
    }
}

// ---------------------------------------------------------------------------
// Quotient germs whose quadratic part stays diagonal.

fn classify_quotient_split(
    g: &Germ,
    act: &CyclicAction,
    split: &SquareSplit,
) -> Result<SingularityClass, ClassifyError> {
    let r = act.index();
    let nv = g.vars().len();
    let splits = &split.split;
    let split_chars: Vec<u32> = splits.iter().map(|&(v, _)| act.character(v)).collect();

    // Two split squares on character-one variables of an index-two action
    // assemble into a hyperbolic plane, so the germ is a cA/2 member when
    // the surviving variables carry the right characters.
    if r == 2 {
        let ones: Vec<usize> = (0..splits.len())
            .filter(|&p| split_chars[p] == 1)
            .collect();
        if ones.len() >= 2 {
            let (pa, pb) = (ones[0], ones[1]);
            let (va, vb) = (splits[pa].0, splits[pb].0);
            let rest: Vec<u32> = (0..nv)
                .filter(|&v| v != va && v != vb)
                .map(|v| act.character(v))
                .collect();
            if rest.contains(&0) && rest.contains(&1) {
                return finish_ca_quotient(g, act, split, (pa, pb));
            }
        }
    }

    // cAx/2: diagonal rank two with characters {0, 1} and both surviving
    // variables of character one.
    if r == 2 && splits.len() == 2 {
        let mut sc = split_chars.clone();
        sc.sort_unstable();
        let rest: Vec<u32> = (0..nv)
            .filter(|&v| v != splits[0].0 && v != splits[1].0)
            .map(|v| act.character(v))
            .collect();
        if sc == [0, 1] && rest == [1, 1] {
            return finish_cax(g, act, split, (0, 1));
        }
    }

    // cAx/4: two odd-character squares; the invariant-multiplied equation
    // has character two, and a character-two variable survives.
    if r == 4 {
        let odd: Vec<usize> = (0..splits.len())
            .filter(|&p| split_chars[p] % 2 == 1)
            .collect();
        if odd.len() >= 2 {
            let (pa, pb) = (odd[0], odd[1]);
            let (va, vb) = (splits[pa].0, splits[pb].0);
            let rest: Vec<u32> = (0..nv)
                .filter(|&v| v != va && v != vb)
                .map(|v| act.character(v))
                .collect();
            let has_two = rest.contains(&2);
            let has_odd = rest.iter().any(|&c| c % 2 == 1);
            if has_two && has_odd {
                return finish_cax(g, act, split, (pa, pb));
            }
        }
    }

    Err(ClassifyError::Unrecognized(format!(
        "diagonal quadratic rank {} of index {r} matches no terminal family \
         by its characters",
        splits.len()
    )))
}

fn finish_ca_quotient(
    g: &Germ,
    act: &CyclicAction,
    split: &SquareSplit,
    pair: (usize, usize),
) -> Result<SingularityClass, ClassifyError> {
    let refs = g.var_refs();
    let g_part = reassemble(&refs, split, &[pair.0, pair.1]);
    let keep = complement_vars(refs.len(), split.split[pair.0].0, split.split[pair.1].0);
    let mu = isolated_milnor(&g_part, &keep)?;
    let pres_eq = presentation_quadric(&refs, split, pair, &g_part);
    let presentation = Germ::new(&refs, act.clone(), vec![pres_eq])?;
    Ok(SingularityClass {
        kind: SingularityKind::CAQuotient { r: act.index() },
        elephant: elephant_or_none(g),
        presentation,
        milnor: Some(mu),
    })
}

fn finish_cax(
    g: &Germ,
    act: &CyclicAction,
    split: &SquareSplit,
    pair: (usize, usize),
) -> Result<SingularityClass, ClassifyError> {
    let refs = g.var_refs();
    let g_part = reassemble(&refs, split, &[pair.0, pair.1]);
    let keep = complement_vars(refs.len(), split.split[pair.0].0, split.split[pair.1].0);
    let mu = isolated_milnor(&g_part, &keep)?;
    let pres_eq = reassemble(&refs, split, &[]);
    let presentation = Germ::new(&refs, act.clone(), vec![pres_eq])?;
    Ok(SingularityClass {
        kind: SingularityKind::CAxQuotient { r: act.index() },
        elephant: elephant_or_none(g),
        presentation,
        milnor: Some(mu),
    })
}

// ---------------------------------------------------------------------------
// Hyperbolic quadratic parts (cross terms between opposite characters).

fn classify_hyperbolic(
    g: &Germ,
    act: &CyclicAction,
    f: &Polynomial,
) -> Result<SingularityClass, ClassifyError> {
    let r = act.index();
    let nv = f.vars().len();
    let quad = f.homogeneous_part(2);
    for i in 0..nv {
        for j in (i + 1)..nv {
            let c = quad.coeff(&cross_ev(nv, i, j));
            if c.is_zero() {
                continue;
            }
            let (ci, cj) = (act.character(i), act.character(j));
            if (ci as u64 + cj as u64) % r as u64 != 0 || ci.gcd(&r) != 1 {
                continue;
            }
            let rest: Vec<usize> = (0..nv).filter(|&v| v != i && v != j).collect();
            let (ck, cl) = (act.character(rest[0]), act.character(rest[1]));
            let pattern_fits =
                (ck == 0 && cl.gcd(&r) == 1) || (cl == 0 && ck.gcd(&r) == 1);
            if pattern_fits {
                return finish_hyperbolic(g, act, f, i, j, &c);
            }
        }
    }
    Err(ClassifyError::Unrecognized(
        "the quadratic part mixes characters without a hyperbolic pair of \
         the cA/r shape"
            .into(),
    ))
}

fn finish_hyperbolic(
    g: &Germ,
    act: &CyclicAction,
    f: &Polynomial,
    i: usize,
    j: usize,
    cross: &Rational,
) -> Result<SingularityClass, ClassifyError> {
    let refs = g.var_refs();
    let nv = refs.len();
    let mut w = f.scale(&cross.clone().recip());
    // The pair squares are forbidden by their characters, so every term
    // meeting the pair other than the cross term itself can be absorbed
    // into it. Work degree by degree: collect the lowest offenders, divide
    // out one pair variable, and shift the other accordingly. Each round
    // strictly raises the lowest offending degree.
    debug_assert!(w.homogeneous_part(2).coeff(&square_ev(nv, i)).is_zero());
    debug_assert!(w.homogeneous_part(2).coeff(&square_ev(nv, j)).is_zero());
    let mut guard = 0u32;
    loop {
        let mut shift_i = Polynomial::zero(&refs);
        let mut shift_j = Polynomial::zero(&refs);
        let mut min_deg: Option<u32> = None;
        for (ev, c) in w.terms() {
            let (ei, ej) = (ev.exponent(i), ev.exponent(j));
            if ei + ej == 0 || (ei == 1 && ej == 1 && ev.degree() == 2) {
                continue;
            }
            match min_deg {
                None => min_deg = Some(ev.degree()),
                Some(d) if ev.degree() > d => break,
                Some(_) => {}
            }
            let mut e = ev.exponents().to_vec();
            if ei >= 1 {
                e[i] -= 1;
                shift_j = shift_j.add(&Polynomial::from_terms(
                    &refs,
                    vec![(ExponentVector::new(e), c.clone())],
                ));
            } else {
                e[j] -= 1;
                shift_i = shift_i.add(&Polynomial::from_terms(
                    &refs,
                    vec![(ExponentVector::new(e), c.clone())],
                ));
            }
        }
        if min_deg.is_none() {
            break;
        }
        let mut images = identity_images(&refs);
        images[i] = images[i].sub(&shift_i);
        images[j] = images[j].sub(&shift_j);
        w = w
            .substitute_truncated(&images, DEFAULT_TRUNCATION)
            .expect("same ring");
        guard += 1;
        if guard > 2 * DEFAULT_TRUNCATION + 8 {
            return Err(ClassifyError::Unrecognized(
                "hyperbolic reduction failed to make progress".into(),
            ));
        }
    }
    let cross_term = Polynomial::from_terms(&refs, vec![(cross_ev(nv, i, j), Rational::one())]);
    let g_rest = w.sub(&cross_term);
    debug_assert!(
        g_rest
            .terms()
            .all(|(ev, _)| ev.exponent(i) == 0 && ev.exponent(j) == 0),
        "the residual lives on the surviving variables"
    );
    let keep = complement_vars(nv, i, j);
    let mu = isolated_milnor(&g_rest, &keep)?;
    let presentation = Germ::new(&refs, act.clone(), vec![w])?;
    Ok(SingularityClass {
        kind: SingularityKind::CAQuotient { r: act.index() },
        elephant: elephant_or_none(g),
        presentation,
        milnor: Some(mu),
    })
}

// ---------------------------------------------------------------------------
// The cD / cE side: quadratic rank one.

fn classify_corank_three(
    g: &Germ,
    act: &CyclicAction,
    split: SquareSplit,
) -> Result<SingularityClass, ClassifyError> {
    let nv = g.vars().len();
    let (vx, cx) = split.split[0].clone();
    // Make the split square monic by scaling the whole equation.
    let h = split.residual.scale(&cx.recip());
    let rest: Vec<usize> = (0..nv).filter(|&v| v != vx).collect();
    let mu = isolated_milnor(&h, &rest)?;
    let cubic = h.homogeneous_part(3);
    if cubic.is_zero() {
        return Err(ClassifyError::NotTerminal(
            "the general hyperplane section has multiplicity at least four".into(),
        ));
    }
    let rest3 = [rest[0], rest[1], rest[2]];
    match forms::ternary_cubic_pattern(&cubic, &rest3) {
        TernaryCubicPattern::Zero => unreachable!("the cubic part is nonzero"),
        TernaryCubicPattern::Squarefree => finish_cd(g, act, vx, &h, mu, None, &rest3),
        TernaryCubicPattern::DoubleLine { line } => {
            finish_cd(g, act, vx, &h, mu, Some(line), &rest3)
        }
        TernaryCubicPattern::TripleLine { line } => finish_ce(g, act, vx, &h, mu, &line, &rest3),
    }
}

fn finish_cd(
    g: &Germ,
    act: &CyclicAction,
    vx: usize,
    h: &Polynomial,
    mu: u32,
    line: Option<Vec<Rational>>,
    rest: &[usize; 3],
) -> Result<SingularityClass, ClassifyError> {
    let r = act.index();
    if r > 3 {
        return Err(ClassifyError::Unrecognized(format!(
            "corank-three quadratic part of index {r}; no terminal family \
             has one"
        )));
    }
    let refs = g.var_refs();
    let nv = refs.len();
    let h_normal = match &line {
        None => h.clone(),
        Some(l3) => normalize_double_line(h, l3, rest)?.0,
    };
    let pres_eq = Polynomial::from_terms(&refs, vec![(square_ev(nv, vx), Rational::one())])
        .add(&h_normal);
    let presentation = Germ::new(&refs, act.clone(), vec![pres_eq])?;

    let (kind, elephant) = if r == 1 {
        match &line {
            // A squarefree cubic cuts out three distinct tangent lines in
            // the generic section, so the section is D4.
            None => (SingularityKind::CD { n: 4 }, Some(DuValType::d(4))),
            Some(_) => {
                let outcome =
                    general_elephant(g, ELEPHANT_SEED).map_err(ClassifyError::Elephant)?;
                let t = match outcome.duval_type() {
                    Some(t) if t.family == DuValFamily::D && t.subscript >= 5 => *t,
                    Some(t) => {
                        return Err(ClassifyError::Inconsistent(format!(
                            "the cubic has a doubled line but the general \
                             section is {t}"
                        )))
                    }
                    None => {
                        return Err(ClassifyError::Inconsistent(
                            "the cubic has a doubled line but the general \
                             section is smooth"
                                .into(),
                        ))
                    }
                };
                (SingularityKind::CD { n: t.subscript }, Some(t))
            }
        }
    } else {
        (SingularityKind::CDQuotient { r }, elephant_or_none(g))
    };
    Ok(SingularityClass {
        kind,
        elephant,
        presentation,
        milnor: Some(mu),
    })
}

/// Move a cubic `l^2 m` into the exact shape `y^2 z`: send the doubled line
/// to a coordinate `y`, then the cofactor (including any `y`-component) to a
/// second coordinate `z`, carrying the full equation along. Returns the
/// transformed polynomial together with the variable indices playing the
/// roles of `y` and `z`.
pub(crate) fn normalize_double_line(
    h: &Polynomial,
    line3: &[Rational],
    rest: &[usize; 3],
) -> Result<(Polynomial, usize, usize), ClassifyError> {
    let vars = h.vars();
    let nv = vars.len();
    let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();

    let mut l_full = vec![Rational::zero(); nv];
    for (pos, &v) in rest.iter().enumerate() {
        l_full[v] = line3[pos].clone();
    }
    let y_role = rest
        .iter()
        .copied()
        .find(|&v| !l_full[v].is_zero())
        .expect("a repeated line is nonzero");
    let images = forms::images_mapping_form_to_variable(vars, &l_full, y_role)
        .expect("a repeated line is nonzero");
    let h1 = h
        .substitute_truncated(&images, DEFAULT_TRUNCATION)
        .expect("same ring");

    // The cubic is now y^2 (alpha y + m~) with m~ supported on the other
    // two variables and nonzero (a triple line would have matched the other
    // pattern).
    let cubic = h1.homogeneous_part(3);
    debug_assert!(cubic.coefficient_of(y_role, 1).is_zero());
    debug_assert!(cubic.coefficient_of(y_role, 0).is_zero());
    let m_reduced = cubic.coefficient_of(y_role, 2);
    let alpha = cubic.coeff(&cube_ev(nv, y_role));
    let mut m_full = vec![Rational::zero(); nv];
    m_full[y_role] = alpha;
    let mut z_role = None;
    for &v in rest.iter().filter(|&&v| v != y_role) {
        let c = m_reduced.coeff(&ExponentVector::unit(nv, v));
        if !c.is_zero() && z_role.is_none() {
            z_role = Some(v);
        }
        m_full[v] = c;
    }
    let z_role = z_role.ok_or_else(|| {
        ClassifyError::Inconsistent(
            "a doubled line whose cofactor is the line itself".into(),
        )
    })?;
    let images2 = forms::images_mapping_form_to_variable(vars, &m_full, z_role)
        .expect("the cofactor line is nonzero");
    let h2 = h1
        .substitute_truncated(&images2, DEFAULT_TRUNCATION)
        .expect("same ring");
    debug_assert_eq!(
        h2.homogeneous_part(3),
        Polynomial::from_terms(
            &refs,
            vec![(
                square_ev(nv, y_role).mul(&ExponentVector::unit(nv, z_role)),
                Rational::one()
            )]
        ),
        "the cubic reduces to exactly y^2 z"
    );
    Ok((h2, y_role, z_role))
}

fn finish_ce(
    g: &Germ,
    act: &CyclicAction,
    vx: usize,
    h: &Polynomial,
    mu: u32,
    line3: &[Rational],
    rest: &[usize; 3],
) -> Result<SingularityClass, ClassifyError> {
    let r = act.index();
    if r > 2 {
        return Err(ClassifyError::Unrecognized(format!(
            "tripled-line cubic of index {r}; the only quotient family of \
             this shape has index two"
        )));
    }
    let vars = h.vars();
    let nv = vars.len();
    let refs = g.var_refs();

    // Send the tripled line to a coordinate y.
    let mut l_full = vec![Rational::zero(); nv];
    for (pos, &v) in rest.iter().enumerate() {
        l_full[v] = line3[pos].clone();
    }
    let y_role = rest
        .iter()
        .copied()
        .find(|&v| !l_full[v].is_zero())
        .expect("a tripled line is nonzero");
    let images = forms::images_mapping_form_to_variable(vars, &l_full, y_role)
        .expect("a tripled line is nonzero");
    let mut w = h
        .substitute_truncated(&images, DEFAULT_TRUNCATION)
        .expect("same ring");

    // Depress the cube: remove every y^2 term by shifting y. The cubic
    // part is c y^3 alone, so each shift strictly raises the order of the
    // remaining y^2 coefficient.
    let c3 = w.homogeneous_part(3).coeff(&cube_ev(nv, y_role));
    debug_assert!(!c3.is_zero());
    let scale = (Rational::from_integer(3.into()) * &c3).recip();
    let mut guard = 0u32;
    loop {
        let block = w.coefficient_of(y_role, 2);
        if block.is_zero() {
            break;
        }
        let delta = block.scale(&scale);
        let mut images = identity_images(&refs);
        images[y_role] = images[y_role].sub(&delta.truncate(DEFAULT_TRUNCATION));
        w = w
            .substitute_truncated(&images, DEFAULT_TRUNCATION)
            .expect("same ring");
        guard += 1;
        if guard > 2 * DEFAULT_TRUNCATION + 8 {
            return Err(ClassifyError::Unrecognized(
                "cube depression failed to make progress".into(),
            ));
        }
    }

    // Read the subscript from the orders of the two coefficient series.
    let g_series = w.coefficient_of(y_role, 1);
    let h_series = w.coefficient_of(y_role, 0);
    let h4 = h_series.homogeneous_part(4);
    let g3 = g_series.homogeneous_part(3);
    let h5 = h_series.homogeneous_part(5);
    let n = if !h4.is_zero() {
        6
    } else if !g3.is_zero() {
        7
    } else if !h5.is_zero() {
        8
    } else {
        return Err(ClassifyError::NotTerminal(
            "the general hyperplane section is a non-rational triple point".into(),
        ));
    };

    let pres_eq =
        Polynomial::from_terms(&refs, vec![(square_ev(nv, vx), Rational::one())]).add(&w);
    let presentation = Germ::new(&refs, act.clone(), vec![pres_eq])?;
    let kind = if r == 1 {
        SingularityKind::CE { n }
    } else {
        SingularityKind::CEQuotient
    };
    Ok(SingularityClass {
        kind,
        elephant: Some(DuValType::e(n)),
        presentation,
        milnor: Some(mu),
    })
}

// ---------------------------------------------------------------------------
// Shared helpers.

/// Reassemble the split equation, skipping the squares at the given
/// positions: the remaining squares plus the residual.
fn reassemble(refs: &[&str], split: &SquareSplit, skip_positions: &[usize]) -> Polynomial {
    let nv = refs.len();
    let mut out = split.residual.clone();
    for (pos, (v, c)) in split.split.iter().enumerate() {
        if skip_positions.contains(&pos) {
            continue;
        }
        out = out.add(&Polynomial::from_terms(
            refs,
            vec![(square_ev(nv, *v), c.clone())],
        ));
    }
    out
}

/// Milnor dimension of `p` viewed on the subring of the `keep` variables;
/// `NotIsolated` when `p` vanishes, fails to stabilize, or misses one of
/// those directions entirely (a variable absent from a reduced equation
/// spans a singular line).
fn isolated_milnor(p: &Polynomial, keep: &[usize]) -> Result<u32, ClassifyError> {
    if p.is_zero() {
        return Err(ClassifyError::NotIsolated);
    }
    let q = p
        .restrict_vars(keep)
        .expect("the reduced residual is supported on the surviving variables");
    match milnor_number(&q, DEFAULT_TRUNCATION) {
        MilnorOutcome::Stable(mu) => Ok(mu),
        MilnorOutcome::Unstable => Err(ClassifyError::NotIsolated),
    }
}

/// All variable indices except the two given ones.
fn complement_vars(nv: usize, a: usize, b: usize) -> Vec<usize> {
    (0..nv).filter(|&v| v != a && v != b).collect()
}

fn elephant_or_none(g: &Germ) -> Option<DuValType> {
    general_elephant(g, ELEPHANT_SEED)
        .ok()
        .and_then(|o| o.duval_type().copied())
}

fn identity_images(refs: &[&str]) -> Vec<Polynomial> {
    refs.iter().map(|v| Polynomial::variable(refs, v)).collect()
}

fn square_ev(n: usize, v: usize) -> ExponentVector {
    let mut e = vec![0u32; n];
    e[v] = 2;
    ExponentVector::new(e)
}

fn cube_ev(n: usize, v: usize) -> ExponentVector {
    let mut e = vec![0u32; n];
    e[v] = 3;
    ExponentVector::new(e)
}

fn cross_ev(n: usize, i: usize, j: usize) -> ExponentVector {
    let mut e = vec![0u32; n];
    e[i] = 1;
    e[j] = 1;
    ExponentVector::new(e)
}

/// The square root of a nonnegative rational, when it is rational.
fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let sn = r.numer().sqrt();
    let sd = r.denom().sqrt();
    if &(&sn * &sn) == r.numer() && &(&sd * &sd) == r.denom() {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
