//! Singular points created by a weighted blow-up.
//!
//! A blow-up chart can be singular at its origin, and the exceptional
//! divisor can carry further singular points away from every chart origin.
//! For the toric weights of the catalog those extra points lie on the
//! coordinate axes of the exceptional divisor, each axis visible in two
//! charts (the axis of one is the chart variable of the other), so the scan
//! walks unordered variable pairs once. On each axis the singular locus is
//! cut out by the restrictions of the transformed equation and its partial
//! derivatives; their univariate gcd either is a monomial (clean axis), has
//! rational roots (handled by an exact coordinate shift), or has an
//! irreducible quadratic factor (handled by a local model with unit
//! coefficients). Anything wilder is reported, never guessed at.

use crate::blowup::{blowup_chart, BlowupError, BlowupWeight, ChartResult};
use crate::classify::{terminal_classify, SingularityClass, SingularityKind};
use crate::germ::{simplify, CyclicAction, Germ};
use crate::invariants::InvariantError;
use crate::poly::{rat, ExponentVector, Polynomial, Rational};
use crate::DEFAULT_TRUNCATION;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// What to do with singular points found on exceptional axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisHandling {
    /// Skip them when their local ring is Gorenstein (trivial stabilizer);
    /// error otherwise. The depth count only cares about non-Gorenstein
    /// points, and axis points with trivial stabilizer are Gorenstein.
    IgnoreGorenstein,
    /// Any singular axis point is an error. The gdepth count would have to
    /// resolve them, which the search does not attempt.
    ForbidAll,
    /// Return them as germs: exact shifts at rational points, unit-
    /// coefficient models over irreducible quadratic factors.
    Model,
}

/// Where a site sits inside the blown-up space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    /// The origin of a chart.
    Origin,
    /// A point (or conjugate pair) on an exceptional axis, at a root of
    /// `factor`.
    Axis { axis: String, factor: String },
}

/// A singular point of the blow-up, as a germ ready for recursion.
#[derive(Debug, Clone)]
pub struct Site {
    pub germ: Germ,
    pub class: SingularityClass,
    pub chart: String,
    pub place: Place,
}

/// Collect the singular points of the weighted blow-up of `parent`, which
/// must be the germ the weight was enumerated over.
pub fn exceptional_sites(
    parent: &Germ,
    weight: &BlowupWeight,
    axis: AxisHandling,
) -> Result<Vec<Site>, InvariantError> {
    let n = parent.ambient_dim();
    let vars = parent.vars().to_vec();
    let mut charts: Vec<Option<ChartResult>> = Vec::with_capacity(n);
    for v in &vars {
        match blowup_chart(parent, weight, v) {
            Ok(res) => charts.push(Some(res)),
            Err(BlowupError::UnitTransform { .. }) => charts.push(None),
            Err(e) => return Err(InvariantError::Blowup(e)),
        }
    }

    let mut sites = Vec::new();
    for (c, res) in charts.iter().enumerate() {
        let Some(res) = res else { continue };
        let (sg, _) = simplify(&res.germ, DEFAULT_TRUNCATION)?;
        let class = terminal_classify(&sg)?;
        if matches!(class.kind, SingularityKind::Smooth) {
            continue;
        }
        sites.push(Site {
            germ: sg,
            class,
            chart: vars[c].clone(),
            place: Place::Origin,
        });
    }

    if parent.equations().len() == 1 {
        for c in 0..n {
            for v in c + 1..n {
                scan_axis_pair(parent, weight, &charts, c, v, axis, &mut sites)?;
            }
        }
    }
    Ok(sites)
}

/// Scan the exceptional axis shared by charts `c` and `v`: in chart `c` it
/// is the `v`-axis and vice versa, so one scan covers both (each chart only
/// misses the other's origin, and origins are handled separately).
fn scan_axis_pair(
    parent: &Germ,
    weight: &BlowupWeight,
    charts: &[Option<ChartResult>],
    c: usize,
    v: usize,
    axis: AxisHandling,
    sites: &mut Vec<Site>,
) -> Result<(), InvariantError> {
    let (chart, axis_var) = match (&charts[c], &charts[v]) {
        (Some(_), _) => (c, v),
        (None, Some(_)) => (v, c),
        (None, None) => {
            // Both charts are units: the strict transform has a unit
            // constant term in each, so the axis meets it only away from
            // the origins. Rebuild the transform by hand and require the
            // axis to be clean; there is no chart action available here to
            // model anything further.
            let transform = raw_transform(&parent.equations()[0], weight, c);
            let g0 = axis_gcd(&transform, parent.ambient_dim(), v);
            if nonmonomial_part(&g0).is_some() {
                return Err(InvariantError::UnsupportedLocus {
                    detail: format!(
                        "singular points on the exceptional axis `{}` inside a unit chart",
                        parent.vars()[v]
                    ),
                });
            }
            return Ok(());
        }
    };
    let res = charts[chart].as_ref().unwrap();
    let germ = &res.germ;
    let f = &germ.equations()[0];
    let n = germ.ambient_dim();
    let g0 = axis_gcd(f, n, axis_var);
    let Some(stripped) = nonmonomial_part(&g0) else {
        return Ok(());
    };

    let d = germ.action().index();
    let char_a = germ.action().character(axis_var);
    let stabilizer = gcd_u32(char_a % d.max(1), d);
    match axis {
        AxisHandling::ForbidAll => Err(InvariantError::UnsupportedLocus {
            detail: format!(
                "singular points on the exceptional axis `{}` of chart `{}`",
                germ.vars()[axis_var],
                germ.vars()[chart]
            ),
        }),
        AxisHandling::IgnoreGorenstein => {
            if stabilizer == 1 {
                Ok(())
            } else {
                Err(InvariantError::UnsupportedLocus {
                    detail: format!(
                        "axis point with a residual stabilizer of order {stabilizer} in chart `{}`",
                        germ.vars()[chart]
                    ),
                })
            }
        }
        AxisHandling::Model => {
            if stabilizer != 1 {
                return Err(InvariantError::UnsupportedLocus {
                    detail: format!(
                        "axis point with a residual stabilizer of order {stabilizer} in chart `{}`",
                        germ.vars()[chart]
                    ),
                });
            }
            model_axis_sites(germ, chart, axis_var, stripped, d, sites)
        }
    }
}

/// Build germs for the singular points at the roots of `stripped` on the
/// given axis of a hyperbolic chart.
fn model_axis_sites(
    germ: &Germ,
    chart: usize,
    axis_var: usize,
    stripped: Vec<Rational>,
    d: u32,
    sites: &mut Vec<Site>,
) -> Result<(), InvariantError> {
    let n = germ.ambient_dim();
    let f = &germ.equations()[0];
    let vars = germ.vars();

    // The chart must be hyperbolic: a cross term on the two variables away
    // from the axis pair, with the residual supported on the pair.
    let quad = f.homogeneous_part(2);
    let mut cross: Option<(usize, usize)> = None;
    for (ev, _) in quad.terms() {
        let support: Vec<usize> = (0..n).filter(|&i| ev.exponent(i) > 0).collect();
        if let [p, q] = support.as_slice() {
            if ev.exponent(*p) == 1
                && ev.exponent(*q) == 1
                && *p != axis_var
                && *q != axis_var
                && *p != chart
                && *q != chart
            {
                cross = Some((*p, *q));
            }
        }
    }
    let Some((p, q)) = cross else {
        return Err(InvariantError::UnsupportedLocus {
            detail: format!(
                "singular axis points in a non-hyperbolic chart `{}`",
                vars[chart]
            ),
        });
    };
    let cross_coeff = quad
        .coeff(&ExponentVector::new(unit_pair(n, p, q)))
        .clone();
    let cross_poly = Polynomial::from_terms(
        &germ.var_refs(),
        vec![(ExponentVector::new(unit_pair(n, p, q)), cross_coeff)],
    );
    let residual = f.sub(&cross_poly);
    let used = residual.used_vars();
    if (0..n).any(|i| used[i] && i != axis_var && i != chart) {
        return Err(InvariantError::UnsupportedLocus {
            detail: format!(
                "hyperbolic residual leaves the `{}`/`{}` plane",
                vars[axis_var], vars[chart]
            ),
        });
    }

    let (roots, remainder) = rational_roots(stripped)?;
    let mut kept: Vec<Rational> = Vec::new();
    for z in roots {
        if d % 2 == 0 && kept.contains(&(-z.clone())) {
            continue;
        }
        kept.push(z);
    }

    for z in kept {
        // Exact shift: the germ at a rational axis point, with trivial
        // action because the stabilizer is trivial.
        let refs = germ.var_refs();
        let mut images: Vec<Polynomial> = (0..n)
            .map(|i| Polynomial::variable(&refs, i).expect("ring variable"))
            .collect();
        images[axis_var] = images[axis_var].add(&Polynomial::constant(&refs, z.clone()));
        let shifted = f.substitute(&images).map_err(crate::germ::GermError::from)?;
        let child = Germ::hypersurface(&refs, CyclicAction::trivial(n), shifted)?;
        push_site(
            child,
            vars[chart].clone(),
            Place::Axis {
                axis: vars[axis_var].clone(),
                factor: format!("{} - {}", vars[axis_var], z),
            },
            sites,
        )?;
    }

    match remainder.len() {
        0 | 1 => Ok(()),
        3 => {
            let factor = remainder;
            // Multiplicity of the quadratic factor in each coefficient
            // series of the residual.
            let mut mults: Vec<(u32, u32)> = Vec::new(); // (j, m_j) for nonzero G_j
            let max_j = f.degree_in(chart).unwrap_or(0);
            for j in 0..=max_j {
                let gj = restrict_to_axis(&residual.coefficient_of(chart, j), n, axis_var);
                if poly_is_zero(&gj) {
                    continue;
                }
                mults.push((j, factor_multiplicity(&gj, &factor)));
            }
            let Some(&(j0, _)) = mults.iter().find(|(_, m)| *m == 0) else {
                return Err(InvariantError::UnsupportedLocus {
                    detail: "a quadratic factor divides every coefficient series".into(),
                });
            };
            let positive: Vec<&(u32, u32)> = mults.iter().filter(|(_, m)| *m > 0).collect();
            let [(jp, mp)] = positive.as_slice() else {
                return Err(InvariantError::UnsupportedLocus {
                    detail: format!(
                        "{} coefficient series share the quadratic axis factor",
                        positive.len()
                    ),
                });
            };
            let refs = germ.var_refs();
            let mut terms = vec![
                (ExponentVector::new(unit_pair(n, p, q)), rat(1)),
                (ExponentVector::new(single(n, chart, j0)), rat(1)),
            ];
            let mut mixed = vec![0u32; n];
            mixed[axis_var] = *mp;
            mixed[chart] = *jp;
            terms.push((ExponentVector::new(mixed), rat(1)));
            let model_eq = Polynomial::from_terms(&refs, terms);
            let child = Germ::hypersurface(&refs, CyclicAction::trivial(n), model_eq)?;
            push_site(
                child,
                vars[chart].clone(),
                Place::Axis {
                    axis: vars[axis_var].clone(),
                    factor: factor_string(&factor, &vars[axis_var]),
                },
                sites,
            )?;
            Ok(())
        }
        _ => Err(InvariantError::UnsupportedLocus {
            detail: format!(
                "irrational axis locus of degree {} on axis `{}`",
                remainder.len() - 1,
                vars[axis_var]
            ),
        }),
    }
}

fn push_site(
    germ: Germ,
    chart: String,
    place: Place,
    sites: &mut Vec<Site>,
) -> Result<(), InvariantError> {
    let (sg, _) = simplify(&germ, DEFAULT_TRUNCATION)?;
    let class = terminal_classify(&sg)?;
    if matches!(class.kind, SingularityKind::Smooth) {
        return Ok(());
    }
    sites.push(Site {
        germ: sg,
        class,
        chart,
        place,
    });
    Ok(())
}

fn unit_pair(n: usize, i: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = 1;
    e[j] = 1;
    e
}

fn single(n: usize, i: usize, k: u32) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = k;
    e
}

/// Transform of one equation into a chart, kept as a bare polynomial so
/// unit charts (constant term present) can still be inspected.
fn raw_transform(eq: &Polynomial, weight: &BlowupWeight, chart: usize) -> Polynomial {
    let nums = weight.numerators();
    let r = i64::from(weight.denominator());
    let m: i64 = eq
        .terms()
        .map(|(ev, _)| {
            (0..ev.len())
                .map(|i| i64::from(ev.exponent(i)) * i64::from(nums[i]))
                .sum()
        })
        .min()
        .unwrap_or(0);
    let refs: Vec<&str> = eq.vars().iter().map(|s| s.as_str()).collect();
    let terms: Vec<(ExponentVector, Rational)> = eq
        .terms()
        .map(|(ev, c)| {
            let w: i64 = (0..ev.len())
                .map(|i| i64::from(ev.exponent(i)) * i64::from(nums[i]))
                .sum();
            let rel = (w - m) / r;
            let mut exps = ev.exponents().to_vec();
            exps[chart] = rel as u32;
            (ExponentVector::new(exps), c.clone())
        })
        .collect();
    Polynomial::from_terms(&refs, terms)
}

// ---------------------------------------------------------------------------
// Univariate helpers over the rationals, for axis restrictions.

/// Coefficient vector of the restriction of `p` to the `axis` coordinate
/// line (all other variables set to zero).
fn restrict_to_axis(p: &Polynomial, n: usize, axis: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for (ev, c) in p.terms() {
        if (0..n).any(|i| i != axis && ev.exponent(i) > 0) {
            continue;
        }
        let k = ev.exponent(axis) as usize;
        if out.len() <= k {
            out.resize(k + 1, Rational::zero());
        }
        out[k] += c;
    }
    trim(&mut out);
    out
}

/// Gcd of the axis restrictions of `f` and all its partials. Zero when
/// every restriction vanishes.
fn axis_gcd(f: &Polynomial, n: usize, axis: usize) -> Vec<Rational> {
    let mut g: Vec<Rational> = Vec::new();
    let mut fold = |p: Vec<Rational>| {
        if !poly_is_zero(&p) {
            g = if poly_is_zero(&g) { p } else { poly_gcd(&g, &p) };
        }
    };
    fold(restrict_to_axis(f, n, axis));
    for v in 0..n {
        fold(restrict_to_axis(&f.derivative(v), n, axis));
    }
    g
}

/// Strip the monomial part; `Some(rest)` when a nonconstant factor away
/// from the origin remains.
fn nonmonomial_part(g: &Vec<Rational>) -> Option<Vec<Rational>> {
    if poly_is_zero(g) {
        // Every restriction vanished identically: the axis lies in the
        // singular locus, which the isolation checks upstream exclude;
        // treat as dirty so the caller reports it.
        return Some(vec![Rational::zero(), Rational::zero(), Rational::zero()]);
    }
    let shift = g.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let rest: Vec<Rational> = g[shift..].to_vec();
    if rest.len() <= 1 {
        None
    } else {
        Some(rest)
    }
}

fn trim(v: &mut Vec<Rational>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn poly_is_zero(v: &[Rational]) -> bool {
    v.iter().all(|c| c.is_zero())
}

fn monic(mut v: Vec<Rational>) -> Vec<Rational> {
    trim(&mut v);
    if let Some(lead) = v.last().cloned() {
        if !lead.is_zero() && !lead.is_one() {
            for c in &mut v {
                *c /= lead.clone();
            }
        }
    }
    v
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b.last().unwrap().clone();
    while r.len() > db {
        let k = r.len() - 1;
        let factor = r[k].clone() / lead.clone();
        for i in 0..=db {
            let idx = k - db + i;
            let sub = factor.clone() * b[i].clone();
            r[idx] -= sub;
        }
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut x = monic(a.to_vec());
    let mut y = monic(b.to_vec());
    while !y.is_empty() {
        let r = monic(poly_rem(&x, &y));
        x = y;
        y = r;
    }
    x
}

/// Exact division count: largest `k` with `factor^k` dividing `p`.
fn factor_multiplicity(p: &[Rational], factor: &[Rational]) -> u32 {
    let mut m = 0;
    let mut cur = p.to_vec();
    trim(&mut cur);
    loop {
        if cur.len() < factor.len() {
            return m;
        }
        let (quot, rem) = poly_divmod(&cur, factor);
        if !rem.is_empty() {
            return m;
        }
        m += 1;
        cur = quot;
    }
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b.last().unwrap().clone();
    let mut q = vec![Rational::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let k = r.len() - 1;
        let factor = r[k].clone() / lead.clone();
        q[k - db] = factor.clone();
        for i in 0..=db {
            let idx = k - db + i;
            let sub = factor.clone() * b[i].clone();
            r[idx] -= sub;
        }
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    (q, r)
}

/// All rational roots of a univariate polynomial, with multiplicity
/// collapsed (each root listed once), together with the monic rootless
/// remainder factor.
fn rational_roots(p: Vec<Rational>) -> Result<(Vec<Rational>, Vec<Rational>), InvariantError> {
    let mut cur = monic(p);
    let mut roots = Vec::new();
    // Clear denominators to integer coefficients for the candidate search.
    loop {
        trim(&mut cur);
        if cur.len() <= 1 {
            return Ok((roots, cur));
        }
        let mut lcm = BigInt::one();
        for c in &cur {
            lcm = num_integer::lcm(lcm, c.denom().clone());
        }
        let ints: Vec<BigInt> = cur.iter().map(|c| (c * Rational::from(lcm.clone())).to_integer()).collect();
        let a0 = ints
            .iter()
            .find(|c| !c.is_zero())
            .expect("nonzero polynomial")
            .clone();
        let an = ints.last().unwrap().clone();
        let (Some(ps), Some(qs)) = (divisors(&a0), divisors(&an)) else {
            return Err(InvariantError::UnsupportedLocus {
                detail: "axis factor coefficients too large to factor".into(),
            });
        };
        let mut found = None;
        'outer: for pd in &ps {
            for qd in &qs {
                for sign in [1i64, -1] {
                    let cand = Rational::new(pd.clone() * BigInt::from(sign), qd.clone());
                    if eval_poly(&cur, &cand).is_zero() {
                        found = Some(cand);
                        break 'outer;
                    }
                }
            }
        }
        match found {
            Some(root) => {
                while eval_poly(&cur, &root).is_zero() && cur.len() > 1 {
                    cur = deflate(&cur, &root);
                }
                roots.push(root);
            }
            None => return Ok((roots, cur)),
        }
    }
}

fn eval_poly(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// Synthetic division by `(t - root)`.
fn deflate(p: &[Rational], root: &Rational) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); p.len() - 1];
    let mut carry = Rational::zero();
    for k in (0..p.len()).rev() {
        let val = p[k].clone() + carry.clone();
        if k == 0 {
            break;
        }
        out[k - 1] = val.clone();
        carry = val * root.clone();
    }
    let mut out = out;
    trim(&mut out);
    out
}

/// Positive divisors of a (reasonably small) integer.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return Some(vec![BigInt::one()]);
    }
    if n.bits() > 44 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    Some(out)
}

fn factor_string(f: &[Rational], var: &str) -> String {
    let refs = [var];
    let terms: Vec<(ExponentVector, Rational)> = f
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (ExponentVector::new(vec![k as u32]), c.clone()))
        .collect();
    Polynomial::from_terms(&refs, terms).to_string()
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::CyclicAction;

    fn hyper(vars: &[&str], r: u32, chars: &[i64], f: &str) -> Germ {
        let poly = Polynomial::parse(f, vars).unwrap();
        Germ::hypersurface(vars, CyclicAction::new(r, chars), poly).unwrap()
    }

    fn weight(text: &str) -> BlowupWeight {
        BlowupWeight::parse(text).unwrap()
    }

    #[test]
    fn ordinary_double_point_blowup_is_clean() {
        let g = hyper(&["x", "y", "z", "u"], 1, &[0, 0, 0, 0], "x*y + z^2 + u^3");
        let sites = exceptional_sites(&g, &weight("1:1,1,1,1"), AxisHandling::ForbidAll).unwrap();
        // Chart u carries x*y + z^2 + u, which is smooth after elimination;
        // charts x and y are smooth, chart z is a unit. Nothing is left.
        assert!(sites.is_empty(), "{sites:?}");
    }

    #[test]
    fn residual_power_shows_up_at_a_chart_origin() {
        let g = hyper(&["x", "y", "z", "u"], 1, &[0, 0, 0, 0], "x*y + z^2 + u^6");
        let sites = exceptional_sites(&g, &weight("1:1,1,1,1"), AxisHandling::ForbidAll).unwrap();
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].chart, "u");
        assert_eq!(sites[0].place, Place::Origin);
        assert!(matches!(
            sites[0].class.kind,
            SingularityKind::CA { .. } | SingularityKind::CyclicQuotient { .. }
        ));
    }

    #[test]
    fn conjugate_axis_pair_is_modeled_once() {
        // After one blow-up of this index-two germ, the z-axis of the u
        // chart carries a conjugate singular pair at the roots of z^2 + 1,
        // locally a double point times a residual u^4.
        let g = hyper(
            &["x", "y", "z", "u"],
            2,
            &[1, 1, 1, 0],
            "x*y + z^8 + 2*z^6*u + z^4*u^2 + u^8",
        );
        let sites = exceptional_sites(&g, &weight("2:1,7,1,2"), AxisHandling::Model).unwrap();
        let axis: Vec<&Site> = sites
            .iter()
            .filter(|s| matches!(s.place, Place::Axis { .. }))
            .collect();
        assert_eq!(axis.len(), 1, "{sites:?}");
        let Place::Axis { axis: a, factor } = &axis[0].place else {
            unreachable!()
        };
        assert_eq!(a, "z");
        assert_eq!(factor, "z^2 + 1");
        let eq = &axis[0].germ.equations()[0];
        assert_eq!(eq.to_string(), "x*y + z^2 + u^4");
        // And the same scan refuses to ignore the pair in the strict modes.
        assert!(matches!(
            exceptional_sites(&g, &weight("2:1,7,1,2"), AxisHandling::ForbidAll),
            Err(InvariantError::UnsupportedLocus { .. })
        ));
    }

    #[test]
    fn rational_axis_points_shift_exactly() {
        // z^4*(z^2 - 1)^2: rational double roots at 1 and -1 on the z-axis
        // after blowing up; the point pair is identified by the index-two
        // orbit, leaving one shifted germ.
        let g = hyper(
            &["x", "y", "z", "u"],
            2,
            &[1, 1, 1, 0],
            "x*y + z^8 - 2*z^6*u + z^4*u^2 + u^8",
        );
        let sites = exceptional_sites(&g, &weight("2:1,7,1,2"), AxisHandling::Model).unwrap();
        let axis: Vec<&Site> = sites
            .iter()
            .filter(|s| matches!(s.place, Place::Axis { .. }))
            .collect();
        assert_eq!(axis.len(), 1, "{axis:?}");
        let Place::Axis { factor, .. } = &axis[0].place else {
            unreachable!()
        };
        assert!(factor == "z - 1" || factor == "z + 1", "{factor}");
    }

    #[test]
    fn univariate_helpers_agree_on_a_worked_example() {
        // gcd(t^3 - t, t^2 - 1) = t^2 - 1, roots 1 and -1, no remainder.
        let a = vec![rat(0), rat(-1), rat(0), rat(1)];
        let b = vec![rat(-1), rat(0), rat(1)];
        let g = poly_gcd(&a, &b);
        assert_eq!(g, vec![rat(-1), rat(0), rat(1)]);
        let (roots, rest) = rational_roots(g).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(rest.len() <= 1);
        let sq = vec![rat(1), rat(0), rat(1)];
        assert_eq!(factor_multiplicity(&[rat(1), rat(0), rat(2), rat(0), rat(1)], &sq), 2);
    }
}
