//! Normalization of Gorenstein cD hypersurface germs.
//!
//! [`normal_form_cd`] rewrites a four-variable hypersurface germ whose
//! quadratic part has rank one and whose residual cubic is not a perfect
//! cube into the shape
//!
//! ```text
//! x^2 + y^2 z + lambda y u^k + g(z, u)
//! ```
//!
//! working at a fixed truncation degree. The reduction is formal: it shapes
//! the equation without deciding whether the singularity is isolated (the
//! classifier owns that question). Roles are chosen for the variables, the
//! cubic is straightened so that it contains the exact monomial `y^2 z`, and
//! then two absorption moves run to a fixed point: a `y`-shift removes
//! `z`-dependence from the degree-one part in `y`, and a `z`-shift removes
//! everything beyond the bare `z` from the degree-two-and-higher part. Each
//! round records the pair of control orders `(n, delta)` whose difference
//! bounds the remaining work; `delta` never decreases on germs the procedure
//! is designed for, and a decrease aborts with a diagnostic rather than
//! silently looping.

use num_traits::{One, Zero};

use crate::classify::forms::{self, TernaryCubicPattern};
use crate::classify::terminal::normalize_double_line;
use crate::germ::{CyclicAction, Germ, GermError};
use crate::poly::{ExponentVector, Polynomial, Rational};

/// A normalized cD equation with the data read off along the way.
#[derive(Clone, Debug)]
pub struct NormalFormCD {
    /// The germ `x^2 + y^2 z + lambda y u^k + g(z, u)`, with variables
    /// reordered so that the roles appear in that order.
    pub germ: Germ,
    /// Coefficient of the unique `y u^k` monomial; zero when the normal
    /// form has no `y`-part.
    pub lambda: Rational,
    /// The exponent `k`; `None` exactly when `lambda` is zero.
    pub k: Option<u32>,
    /// Truncation degree the reduction ran at.
    pub truncation: u32,
    /// Control orders per round, recorded before each move.
    pub trace: Vec<NormalFormStep>,
}

/// One row of the reduction trace. `None` stands for an infinite order
/// (the corresponding bucket is empty to the working precision).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormalFormStep {
    /// `n`: the least order of a pure `u` monomial, over both the `y u^k`
    /// bucket and the `u`-only part of `g`.
    pub n: Option<u32>,
    /// `delta`: the least `u`-order among the mixed `y`-`u` terms still
    /// multiplying `y^2`, shifted by the factored-out `u`.
    pub delta: Option<u32>,
}

#[derive(Debug)]
pub enum NormalFormError {
    /// The germ does not have the cD shape (rank-one quadratic part and a
    /// residual cubic with a repeated or rational structure to straighten).
    NotCD(String),
    /// The residual cubic is squarefree but has no small rational smooth
    /// point to move into the `y` position.
    NoRationalPreparation,
    /// The absorption loop failed to reach a fixed point within the round
    /// budget derived from the truncation degree.
    Stalled { rounds: u32, truncation: u32 },
    /// The control order `delta` decreased between rounds, which the
    /// underlying reduction argument rules out for genuine cD germs.
    DeltaRegression { earlier: u32, later: u32 },
    Germ(GermError),
}

impl std::fmt::Display for NormalFormError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormalFormError::NotCD(why) => write!(f, "not a cD-shaped germ: {why}"),
            NormalFormError::NoRationalPreparation => write!(
                f,
                "the residual cubic has no small rational smooth point to \
                 anchor the y role"
            ),
            NormalFormError::Stalled { rounds, truncation } => write!(
                f,
                "no fixed point after {rounds} rounds at truncation degree \
                 {truncation}"
            ),
            NormalFormError::DeltaRegression { earlier, later } => write!(
                f,
                "control order delta regressed from {earlier} to {later}"
            ),
            NormalFormError::Germ(e) => write!(f, "germ error: {e}"),
        }
    }
}

impl From<GermError> for NormalFormError {
    fn from(e: GermError) -> Self {
        NormalFormError::Germ(e)
    }
}

impl std::error::Error for NormalFormError {}

/// Bring a Gorenstein cD hypersurface germ to the normal form
/// `x^2 + y^2 z + lambda y u^k + g(z, u)` at the given truncation degree.
pub fn normal_form_cd(g: &Germ, truncation: u32) -> Result<NormalFormCD, NormalFormError> {
    if !g.action().is_trivial() {
        return Err(NormalFormError::NotCD(
            "the action is nontrivial; only Gorenstein germs are normalized here".into(),
        ));
    }
    if g.equations().len() != 1 || g.vars().len() != 4 {
        return Err(NormalFormError::NotCD(format!(
            "expected one equation in four variables, got {} in {}",
            g.equations().len(),
            g.vars().len()
        )));
    }
    let f = g.equations()[0].truncate(truncation);
    let split = forms::split_quadratic(&f, g.action(), truncation)
        .map_err(|e| NormalFormError::NotCD(format!("quadratic reduction failed: {e}")))?;
    match split.split.len() {
        1 => {}
        0 => {
            return Err(NormalFormError::NotCD(
                "the quadratic part vanishes".into(),
            ))
        }
        k => {
            return Err(NormalFormError::NotCD(format!(
                "the quadratic part has rank {k}; the cD shape has rank one"
            )))
        }
    }
    let (vx, cx) = split.split[0].clone();
    let h = split.residual.scale(&cx.recip());
    let nv = 4usize;
    let rest_list: Vec<usize> = (0..nv).filter(|&v| v != vx).collect();
    let rest = [rest_list[0], rest_list[1], rest_list[2]];

    let cubic = h.homogeneous_part(3);
    let (mut w, y_role, z_role) = match forms::ternary_cubic_pattern(&cubic, &rest) {
        TernaryCubicPattern::Zero => {
            return Err(NormalFormError::NotCD(
                "the residual has multiplicity at least four".into(),
            ))
        }
        TernaryCubicPattern::TripleLine { .. } => {
            return Err(NormalFormError::NotCD(
                "the residual cubic is a perfect cube (cE shape)".into(),
            ))
        }
        TernaryCubicPattern::DoubleLine { line } => normalize_double_line(&h, &line, &rest)
            .map_err(|e| NormalFormError::NotCD(format!("doubled line did not straighten: {e}")))?,
        TernaryCubicPattern::Squarefree => prepare_squarefree(&h, &rest, truncation)?,
    };
    let u_role = rest
        .iter()
        .copied()
        .find(|&v| v != y_role && v != z_role)
        .expect("three distinct residual variables");

    // Absorption loop. Each round removes the lowest-order impurities:
    // terms of y-degree one that involve z are folded into y^2 z by a
    // y-shift, and everything multiplying y^2 other than the bare z is
    // folded into z by a z-shift. Corrections appear only at strictly
    // higher order, so the loop reaches a fixed point within the
    // truncation budget.
    let names: Vec<String> = w.vars().to_vec();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut trace: Vec<NormalFormStep> = Vec::new();
    let mut rounds = 0u32;
    loop {
        let g2 = y_multiplier(&w, y_role, 2);
        let z_mono = Polynomial::variable(&refs, &refs[z_role]);
        let d = g2.sub(&z_mono);
        let q = w.coefficient_of(y_role, 1);
        let (q_z, q1) = split_off_z(&q, z_role);

        let step = control_orders(&w, &d, &q, y_role, z_role, u_role);
        if let (Some(prev), Some(cur)) = (
            trace.last().and_then(|s: &NormalFormStep| s.delta),
            step.delta,
        ) {
            if cur < prev {
                return Err(NormalFormError::DeltaRegression {
                    earlier: prev,
                    later: cur,
                });
            }
        }
        trace.push(step);

        if d.is_zero() && q_z.is_zero() {
            break;
        }
        let mut images = identity_images(&refs);
        if !q_z.is_zero() {
            let half = Rational::new(1.into(), 2.into());
            images[y_role] = images[y_role].sub(&q1.scale(&half));
        }
        if !d.is_zero() {
            images[z_role] = images[z_role].sub(&d);
        }
        w = w
            .substitute_truncated(&images, truncation)
            .expect("same ring");
        rounds += 1;
        if rounds > 2 * truncation + 8 {
            return Err(NormalFormError::Stalled { rounds, truncation });
        }
    }

    // Compress the y-linear part y p(u) into the single monomial
    // lambda y u^k by the unit rescaling y -> y / v, z -> z v^2 with
    // p = lambda u^k v.
    let p = w.coefficient_of(y_role, 1);
    let (lambda, k) = match p.min_exponent(u_role) {
        None => (Rational::zero(), None),
        Some(k) => {
            let lead = p.coeff(&power_ev(nv, u_role, k));
            let unit = shift_down(&p, u_role, k).scale(&lead.clone().recip());
            let one = Polynomial::constant(&refs, Rational::one());
            if unit != one {
                let inv = forms::unit_inverse(&unit, truncation)
                    .expect("a series with constant term one is a unit");
                let mut images = identity_images(&refs);
                images[y_role] = images[y_role].mul_truncated(&inv, truncation);
                let unit_sq = unit.mul_truncated(&unit, truncation);
                images[z_role] = images[z_role].mul_truncated(&unit_sq, truncation);
                w = w
                    .substitute_truncated(&images, truncation)
                    .expect("same ring");
            }
            (lead, Some(k))
        }
    };

    // Reassemble x^2 + w with the variables listed in role order.
    let order = [vx, y_role, z_role, u_role];
    let new_names: Vec<&str> = order.iter().map(|&v| names[v].as_str()).collect();
    let mut position = [0usize; 4];
    for (new_pos, &old) in order.iter().enumerate() {
        position[old] = new_pos;
    }
    let full = Polynomial::from_terms(&refs, vec![(power_ev(nv, vx, 2), Rational::one())]).add(&w);
    let mut terms = Vec::new();
    for (ev, c) in full.terms() {
        let mut e = vec![0u32; 4];
        for (old, &exp) in ev.exponents().iter().enumerate() {
            e[position[old]] = exp;
        }
        terms.push((ExponentVector::new(e), c.clone()));
    }
    let equation = Polynomial::from_terms(&new_names, terms);
    let germ = Germ::new(&new_names, CyclicAction::trivial(4), vec![equation])?;
    Ok(NormalFormCD {
        germ,
        lambda,
        k,
        truncation,
        trace,
    })
}

/// The polynomial `G` with `p = y^m G + (lower y-degrees)`, i.e. the terms
/// of `y`-degree at least `m` divided by `y^m`.
fn y_multiplier(p: &Polynomial, y: usize, m: u32) -> Polynomial {
    let refs: Vec<&str> = p.vars().iter().map(|s| s.as_str()).collect();
    let mut terms = Vec::new();
    for (ev, c) in p.terms() {
        if ev.exponent(y) >= m {
            let mut e = ev.exponents().to_vec();
            e[y] -= m;
            terms.push((ExponentVector::new(e), c.clone()));
        }
    }
    Polynomial::from_terms(&refs, terms)
}

/// Split `q` into its `z`-dependent part and that part divided once by `z`.
fn split_off_z(q: &Polynomial, z: usize) -> (Polynomial, Polynomial) {
    let refs: Vec<&str> = q.vars().iter().map(|s| s.as_str()).collect();
    let mut z_part = Vec::new();
    let mut quotient = Vec::new();
    for (ev, c) in q.terms() {
        if ev.exponent(z) >= 1 {
            z_part.push((ev.clone(), c.clone()));
            let mut e = ev.exponents().to_vec();
            e[z] -= 1;
            quotient.push((ExponentVector::new(e), c.clone()));
        }
    }
    (
        Polynomial::from_terms(&refs, z_part),
        Polynomial::from_terms(&refs, quotient),
    )
}

/// The pair of control orders for one round, read off the current state:
/// `n` is the least pure-`u` order across the `y`-linear part and the
/// `y`-free part, and `delta` tracks the mixed `y`-`u` terms multiplying
/// `y^2` (falling back to `n - 1` when there are none, matching the
/// convention of the reduction argument).
fn control_orders(
    w: &Polynomial,
    d: &Polynomial,
    q: &Polynomial,
    y: usize,
    z: usize,
    u: usize,
) -> NormalFormStep {
    let k_ord = q
        .terms()
        .filter(|(ev, _)| ev.exponent(z) == 0)
        .map(|(ev, _)| ev.exponent(u))
        .min();
    let y0 = w.coefficient_of(y, 0);
    let mu_ord = y0
        .terms()
        .filter(|(ev, _)| ev.exponent(z) == 0 && ev.degree() > 0)
        .map(|(ev, _)| ev.exponent(u))
        .min();
    let n = match (k_ord, mu_ord) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let delta = d
        .terms()
        .filter(|(ev, _)| ev.exponent(z) == 0 && ev.exponent(y) >= 1 && ev.exponent(u) >= 1)
        .map(|(ev, _)| ev.exponent(u) - 1)
        .min()
        .or_else(|| n.map(|v| v.saturating_sub(1)));
    NormalFormStep { n, delta }
}

/// For a squarefree residual cubic, pick a small rational smooth point of
/// the cubic, move it onto the `y` axis, align the tangent with `z`, and
/// return the transformed equation with the chosen roles.
fn prepare_squarefree(
    h: &Polynomial,
    rest: &[usize; 3],
    truncation: u32,
) -> Result<(Polynomial, usize, usize), NormalFormError> {
    let cubic = h.homogeneous_part(3);
    let refs: Vec<&str> = h.vars().iter().map(|s| s.as_str()).collect();
    let nv = refs.len();
    let grads: Vec<Polynomial> = rest.iter().map(|&v| cubic.derivative(v)).collect();

    let point = small_points()
        .into_iter()
        .find(|p| {
            let full = embed_point(p, rest, nv);
            cubic.evaluate(&full).is_zero()
                && grads.iter().any(|g| !g.evaluate(&full).is_zero())
        })
        .ok_or(NormalFormError::NoRationalPreparation)?;

    // Send the point to the y axis: the position of its first nonzero
    // coordinate becomes y, the other two residual variables keep their
    // columns.
    let m = (0..3)
        .find(|&i| !point[i].is_zero())
        .expect("candidate points are nonzero");
    let y_role = rest[m];
    let mut images = identity_images(&refs);
    for t in 0..3 {
        let scaled = Polynomial::variable(&refs, &refs[y_role]).scale(&point[t]);
        if t == m {
            images[rest[t]] = scaled;
        } else {
            images[rest[t]] = images[rest[t]].add(&scaled);
        }
    }
    let h1 = h
        .substitute_truncated(&images, truncation)
        .expect("same ring");

    // The y^2 coefficient of the cubic is now a nonzero linear form in the
    // other two variables; align it with z.
    let ell = h1.homogeneous_part(3).coefficient_of(y_role, 2);
    let others: Vec<usize> = rest.iter().copied().filter(|&v| v != y_role).collect();
    let coeffs: Vec<Rational> = others
        .iter()
        .map(|&v| ell.coeff(&ExponentVector::unit(nv, v)))
        .collect();
    let (z_role, a, other, b) = if !coeffs[0].is_zero() {
        (others[0], coeffs[0].clone(), others[1], coeffs[1].clone())
    } else {
        (others[1], coeffs[1].clone(), others[0], coeffs[0].clone())
    };
    debug_assert!(!a.is_zero(), "a smooth point has a nonzero tangent form");
    let mut images2 = identity_images(&refs);
    images2[z_role] = Polynomial::variable(&refs, &refs[z_role])
        .sub(&Polynomial::variable(&refs, &refs[other]).scale(&b))
        .scale(&a.recip());
    let h2 = h1
        .substitute_truncated(&images2, truncation)
        .expect("same ring");
    Ok((h2, y_role, z_role))
}

/// Projective candidate points with small integer coordinates, coordinate
/// points first so that already-normalized germs keep their coordinates.
fn small_points() -> Vec<[Rational; 3]> {
    let mut out = Vec::new();
    for i in 0..3 {
        let mut p = [Rational::zero(), Rational::zero(), Rational::zero()];
        p[i] = Rational::one();
        out.push(p);
    }
    let range = -3i64..=3i64;
    for a in range.clone() {
        for b in range.clone() {
            for c in range.clone() {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                out.push([
                    Rational::from_integer(a.into()),
                    Rational::from_integer(b.into()),
                    Rational::from_integer(c.into()),
                ]);
            }
        }
    }
    out
}

fn embed_point(p: &[Rational; 3], rest: &[usize; 3], nv: usize) -> Vec<Rational> {
    let mut full = vec![Rational::zero(); nv];
    for (i, &v) in rest.iter().enumerate() {
        full[v] = p[i].clone();
    }
    full
}

fn shift_down(p: &Polynomial, var: usize, k: u32) -> Polynomial {
    let refs: Vec<&str> = p.vars().iter().map(|s| s.as_str()).collect();
    let mut terms = Vec::new();
    for (ev, c) in p.terms() {
        let mut e = ev.exponents().to_vec();
        assert!(e[var] >= k, "every term is divisible by the leading power");
        e[var] -= k;
        terms.push((ExponentVector::new(e), c.clone()));
    }
    Polynomial::from_terms(&refs, terms)
}

fn power_ev(n: usize, v: usize, k: u32) -> ExponentVector {
    let mut e = vec![0u32; n];
    e[v] = k;
    ExponentVector::new(e)
}

fn identity_images(refs: &[&str]) -> Vec<Polynomial> {
    refs.iter().map(|v| Polynomial::variable(refs, v)).collect()
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TRUNCATION;

    fn germ(f: &str) -> Germ {
        let vars = ["x", "y", "z", "u"];
        Germ::hypersurface(
            &vars,
            CyclicAction::trivial(4),
            Polynomial::parse(f, &vars).unwrap(),
        )
        .unwrap()
    }

    /// Check the shape x^2 + y^2 z + lambda y u^k + g(z, u) directly on
    /// the output equation.
    fn assert_normal_shape(nf: &NormalFormCD) {
        let eq = &nf.germ.equations()[0];
        let mut y_linear = 0usize;
        for (ev, c) in eq.terms() {
            let (ex, ey, ez, eu) = (
                ev.exponent(0),
                ev.exponent(1),
                ev.exponent(2),
                ev.exponent(3),
            );
            if ex > 0 {
                assert_eq!((ex, ey, ez, eu), (2, 0, 0, 0), "pure x^2 only");
                assert!(c.is_one(), "monic x^2");
            } else if ey >= 2 {
                assert_eq!((ey, ez, eu), (2, 1, 0), "y^2 z is the only y^2 term");
                assert!(c.is_one(), "monic y^2 z");
            } else if ey == 1 {
                assert_eq!(ez, 0, "the y-linear part avoids z");
                y_linear += 1;
            }
        }
        assert!(y_linear <= 1, "a single y u^k monomial");
        assert_eq!(nf.k.is_none(), nf.lambda == Rational::zero());
    }

    #[test]
    fn fixed_points_stay_fixed() {
        for f in ["x^2 + y^2*z + z^3 + u^4", "x^2 + y^2*z + y*u^3 + u^5"] {
            let g = germ(f);
            let nf = normal_form_cd(&g, DEFAULT_TRUNCATION).unwrap();
            assert_eq!(nf.germ.equations()[0], g.equations()[0], "{f}");
            assert_normal_shape(&nf);
            let again = normal_form_cd(&nf.germ, DEFAULT_TRUNCATION).unwrap();
            assert_eq!(again.germ.equations()[0], nf.germ.equations()[0]);
        }
        let with_y = normal_form_cd(&germ("x^2 + y^2*z + y*u^3 + u^5"), 24).unwrap();
        assert_eq!(with_y.lambda, Rational::one());
        assert_eq!(with_y.k, Some(3));
        let without = normal_form_cd(&germ("x^2 + y^2*z + z^3 + u^4"), 24).unwrap();
        assert_eq!(without.lambda, Rational::zero());
        assert_eq!(without.k, None);
    }

    #[test]
    fn z_shift_example_matches_hand_expansion() {
        let g = germ("x^2 + y^2*z + y^2*u^2 + z^3");
        let nf = normal_form_cd(&g, 12).unwrap();
        let vars = ["x", "y", "z", "u"];
        let expected = Polynomial::parse(
            "x^2 + y^2*z + z^3 - 3*z^2*u^2 + 3*z*u^4 - u^6",
            &vars,
        )
        .unwrap();
        assert_eq!(nf.germ.equations()[0], expected);
        assert_eq!(nf.truncation, 12);
        assert_normal_shape(&nf);
    }

    #[test]
    fn feedback_through_g_creates_the_y_monomial() {
        // z -> z - y u turns z u^2 into z u^2 - y u^3.
        let g = germ("x^2 + y^2*z + y^3*u + z*u^2 + u^5");
        let nf = normal_form_cd(&g, DEFAULT_TRUNCATION).unwrap();
        let vars = ["x", "y", "z", "u"];
        let expected =
            Polynomial::parse("x^2 + y^2*z - y*u^3 + z*u^2 + u^5", &vars).unwrap();
        assert_eq!(nf.germ.equations()[0], expected);
        assert_eq!(nf.lambda, Rational::from_integer((-1).into()));
        assert_eq!(nf.k, Some(3));
        // Control orders: (5, 0) before the move, then (3, 2) at the fixed
        // point; the gap n - delta drops from five to one.
        assert_eq!(
            nf.trace,
            vec![
                NormalFormStep {
                    n: Some(5),
                    delta: Some(0)
                },
                NormalFormStep {
                    n: Some(3),
                    delta: Some(2)
                },
            ]
        );
    }

    #[test]
    fn delta_increases_across_rounds() {
        let g = germ("x^2 + y^2*z + y^3*u^2 + z*u^3 + u^6");
        let nf = normal_form_cd(&g, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(
            nf.trace,
            vec![
                NormalFormStep {
                    n: Some(6),
                    delta: Some(1)
                },
                NormalFormStep {
                    n: Some(5),
                    delta: Some(4)
                },
            ]
        );
        assert_eq!(nf.k, Some(5));
        assert_normal_shape(&nf);
    }

    #[test]
    fn unit_rescaling_compresses_the_y_series() {
        let g = germ("x^2 + y^2*z + y*u^3 + y*u^4 + u^6");
        let nf = normal_form_cd(&g, DEFAULT_TRUNCATION).unwrap();
        let vars = ["x", "y", "z", "u"];
        let expected = Polynomial::parse("x^2 + y^2*z + y*u^3 + u^6", &vars).unwrap();
        assert_eq!(nf.germ.equations()[0], expected);
        assert_eq!(nf.lambda, Rational::one());
        assert_eq!(nf.k, Some(3));
    }

    #[test]
    fn squarefree_cubic_is_prepared_from_a_rational_point() {
        let g = germ("x^2 + y^3 + z^3 + u^3");
        let nf = normal_form_cd(&g, DEFAULT_TRUNCATION).unwrap();
        assert_normal_shape(&nf);
        let again = normal_form_cd(&nf.germ, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(again.germ.equations()[0], nf.germ.equations()[0]);
    }

    #[test]
    fn non_cd_shapes_are_rejected() {
        for f in [
            "x*y + z^2 + u^2",
            "x^2 + y^3 + z^4 + u^4",
            "x^2 + y^4 + z^4 + u^4",
        ] {
            assert!(
                matches!(
                    normal_form_cd(&germ(f), DEFAULT_TRUNCATION),
                    Err(NormalFormError::NotCD(_))
                ),
                "{f}"
            );
        }
        let vars = ["x", "y", "z", "u"];
        let quotient = Germ::hypersurface(
            &vars,
            CyclicAction::new(2, &[1, 1, 0, 1]),
            Polynomial::parse("x^2 + y^2*z + z^3 + u^4", &vars).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            normal_form_cd(&quotient, DEFAULT_TRUNCATION),
            Err(NormalFormError::NotCD(_))
        ));
    }
}
