//! Weighted blow-ups of germs with exact discrepancy tracking.
//!
//! A blow-up weight for a germ of index `r` assigns the fraction `b_j / r`
//! to the `j`-th ambient variable. The numerator vector must be a primitive
//! point of the quotient lattice, i.e. congruent mod `r` to a multiple of
//! the character vector and not a proper multiple of another such point.
//! Each affine chart of the blow-up is again a germ: the chart variable
//! doubles as the exceptional parameter, every other variable picks up a
//! power of it, and the chart carries a cyclic quotient action of order
//! equal to the chart numerator.
//!
//! On a chart the group is generated by the class of the chart coordinate
//! vector exactly when the chart numerator is coprime to the remaining
//! numerators and the index jointly; in that case the chart variable
//! carries character `-r` (so `-1` over a Gorenstein point) and the other
//! variables keep their numerators as characters. When the coprimality
//! fails the chart group is computed as an abstract lattice quotient via
//! the Smith normal form; if it is still cyclic the characters are read
//! off a canonical generator (the one with the lexicographically smallest
//! character vector), and genuinely non-cyclic chart groups are refused.
//!
//! Chains of blow-ups are described in a small text format, one line per
//! step. Running a chain eliminates unit-linear variables between steps,
//! records every intermediate germ, and can produce the full table of
//! discrepancies `a(E_j, W_i)` of each exceptional divisor against each
//! intermediate model, by pushing exceptional equations forward through
//! the later charts and reading off weighted orders.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use crate::classify::{terminal_classify, SingularityKind};
use crate::germ::{
    apply_change, simplify, CoordinateChange, CyclicAction, EliminationRecord, Germ, GermError,
};
use crate::poly::{rational_string, ExponentVector, PolyError, Polynomial, Rational};

// ---------------------------------------------------------------------------
// Errors.

/// Errors from weight validation, chart computation, and chain running.
#[derive(Debug)]
pub enum BlowupError {
    /// Malformed weight text or invalid weight data.
    WeightSyntax { message: String },
    /// Weight arity differs from the ambient dimension.
    WrongArity { expected: usize, found: usize },
    /// Weight denominator differs from the germ index.
    WrongIndex { germ: u32, weight: u32 },
    /// The numerators are not congruent to any multiple of the characters.
    Incompatible { weight: String, action: String },
    /// The weight is a proper multiple of a smaller lattice point.
    NotPrimitive { divisor: u32 },
    /// A chart or recentring variable that is not in the ring.
    UnknownVariable { name: String },
    /// The chart group is not cyclic, so it has no single-action germ.
    NonCyclicChart { variable: String },
    /// An equation has monomials whose weights disagree mod 1, so the
    /// transform is not polynomial; the weight does not match the
    /// equation's character.
    NonIntegralTransform { equation: String },
    /// The transform of an equation is a unit: the variety misses the
    /// chart origin, so there is no germ to continue with.
    UnitTransform { equation: usize, chart: String },
    /// A base link that does not point at an earlier step.
    BadBaseLink { step: usize, message: String },
    /// Two steps blow up the same point.
    DuplicateCenter { step: usize },
    /// A pushed-forward equation collapsed to zero.
    DegenerateValuation { detail: String },
    Germ(GermError),
    Poly(PolyError),
}

impl fmt::Display for BlowupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlowupError::WeightSyntax { message } => write!(f, "bad weight: {}", message),
            BlowupError::WrongArity { expected, found } => write!(
                f,
                "weight has {} numerators but the germ has {} variables",
                found, expected
            ),
            BlowupError::WrongIndex { germ, weight } => write!(
                f,
                "weight denominator {} differs from the germ index {}",
                weight, germ
            ),
            BlowupError::Incompatible { weight, action } => write!(
                f,
                "weight {} is not a lattice point for the action {}",
                weight, action
            ),
            BlowupError::NotPrimitive { divisor } => {
                write!(f, "weight is {} times a smaller lattice point", divisor)
            }
            BlowupError::UnknownVariable { name } => {
                write!(f, "variable `{}` is not in the ring", name)
            }
            BlowupError::NonCyclicChart { variable } => write!(
                f,
                "chart `{}`: the chart group is not cyclic",
                variable
            ),
            BlowupError::NonIntegralTransform { equation } => write!(
                f,
                "weight is incompatible with the character of `{}`",
                equation
            ),
            BlowupError::UnitTransform { equation, chart } => write!(
                f,
                "equation {} transforms to a unit in chart `{}` (the germ misses this chart)",
                equation, chart
            ),
            BlowupError::BadBaseLink { step, message } => {
                write!(f, "step {}: {}", step, message)
            }
            BlowupError::DuplicateCenter { step } => {
                write!(f, "step {} blows up a point that was already blown up", step)
            }
            BlowupError::DegenerateValuation { detail } => {
                write!(f, "pushed-forward equation vanished: {}", detail)
            }
            BlowupError::Germ(e) => write!(f, "{}", e),
            BlowupError::Poly(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for BlowupError {}

impl From<GermError> for BlowupError {
    fn from(e: GermError) -> Self {
        BlowupError::Germ(e)
    }
}

impl From<PolyError> for BlowupError {
    fn from(e: PolyError) -> Self {
        BlowupError::Poly(e)
    }
}

// ---------------------------------------------------------------------------
// Weights.

/// A blow-up weight `(b_1/r, ..., b_n/r)` with positive numerators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupWeight {
    numerators: Vec<u32>,
    denominator: u32,
}

impl BlowupWeight {
    pub fn new(denominator: u32, numerators: Vec<u32>) -> Result<BlowupWeight, BlowupError> {
        if denominator == 0 {
            return Err(BlowupError::WeightSyntax {
                message: "denominator must be positive".into(),
            });
        }
        if numerators.is_empty() {
            return Err(BlowupError::WeightSyntax {
                message: "need at least one numerator".into(),
            });
        }
        if numerators.iter().any(|&b| b == 0) {
            return Err(BlowupError::WeightSyntax {
                message: "numerators must be positive".into(),
            });
        }
        Ok(BlowupWeight {
            numerators,
            denominator,
        })
    }

    /// Parse `r:n1,n2,...`, e.g. `4:3,2,5,1` for `(3/4, 2/4, 5/4, 1/4)`.
    pub fn parse(text: &str) -> Result<BlowupWeight, BlowupError> {
        let syntax = |message: &str| BlowupError::WeightSyntax {
            message: format!("`{}`: {}", text, message),
        };
        let (den, nums) = text
            .split_once(':')
            .ok_or_else(|| syntax("expected `r:n1,n2,...`"))?;
        let denominator: u32 = den
            .trim()
            .parse()
            .map_err(|_| syntax("bad denominator"))?;
        let numerators: Vec<u32> = nums
            .split(',')
            .map(|n| n.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| syntax("bad numerator"))?;
        BlowupWeight::new(denominator, numerators)
    }

    pub fn numerators(&self) -> &[u32] {
        &self.numerators
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    /// The weights as exact fractions, one per variable.
    pub fn fractions(&self) -> Vec<Rational> {
        self.numerators
            .iter()
            .map(|&b| Rational::new(b.into(), self.denominator.into()))
            .collect()
    }

    /// Weighted order of a polynomial; `None` for zero.
    pub fn order(&self, p: &Polynomial) -> Option<Rational> {
        p.weighted_order(&self.fractions())
    }

    /// The multiplier `k` with `numerators = k * characters` mod `r`, when
    /// one exists (it attests that the weight is a lattice point).
    pub fn multiplier(&self, action: &CyclicAction) -> Option<u32> {
        multiplier_of(&self.numerators, action)
    }

    /// Check the weight against a germ: arity, denominator, lattice
    /// membership, primitivity.
    pub fn validate(&self, germ: &Germ) -> Result<(), BlowupError> {
        if self.numerators.len() != germ.ambient_dim() {
            return Err(BlowupError::WrongArity {
                expected: germ.ambient_dim(),
                found: self.numerators.len(),
            });
        }
        if self.denominator != germ.index() {
            return Err(BlowupError::WrongIndex {
                germ: germ.index(),
                weight: self.denominator,
            });
        }
        if self.multiplier(germ.action()).is_none() {
            return Err(BlowupError::Incompatible {
                weight: self.to_string(),
                action: germ.action().to_string(),
            });
        }
        let g = self
            .numerators
            .iter()
            .fold(0u32, |acc, &b| crate::germ::gcd_u32(acc, b));
        for m in 2..=g {
            if g % m != 0 {
                continue;
            }
            let reduced: Vec<u32> = self.numerators.iter().map(|&b| b / m).collect();
            if multiplier_of(&reduced, germ.action()).is_some() {
                return Err(BlowupError::NotPrimitive { divisor: m });
            }
        }
        Ok(())
    }
}

impl fmt::Display for BlowupWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nums: Vec<String> = self.numerators.iter().map(|b| b.to_string()).collect();
        write!(f, "{}:{}", self.denominator, nums.join(","))
    }
}

fn multiplier_of(numerators: &[u32], action: &CyclicAction) -> Option<u32> {
    let r = action.index();
    debug_assert_eq!(numerators.len(), action.characters().len());
    (0..r).find(|&k| {
        numerators
            .iter()
            .zip(action.characters())
            .all(|(&b, &c)| (b as u64) % (r as u64) == (k as u64 * c as u64) % (r as u64))
    })
}

// ---------------------------------------------------------------------------
// One chart of one blow-up.

/// The monomial substitution of one chart: every variable other than the
/// chart variable is multiplied by a fractional power of it, and the chart
/// variable itself becomes a pure power. Applying the map to a polynomial
/// factors out the weighted order as a power of the chart variable.
#[derive(Clone, Debug)]
pub struct MonomialMap {
    vars: Vec<String>,
    weights: Vec<Rational>,
    chart: usize,
}

impl MonomialMap {
    fn new(germ: &Germ, weight: &BlowupWeight, chart: usize) -> MonomialMap {
        MonomialMap {
            vars: germ.vars().to_vec(),
            weights: weight.fractions(),
            chart,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// The fractional weight carried by each variable.
    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Index of the chart (exceptional) variable.
    pub fn chart(&self) -> usize {
        self.chart
    }

    /// Write `p` under the substitution as `t^order * transform` with `t`
    /// the chart variable and `transform` a polynomial in the chart ring.
    /// Requires `p` nonzero with all monomials of equal weight mod 1 (true
    /// for any semi-invariant polynomial and compatible weight).
    pub fn apply(&self, p: &Polynomial) -> Result<(Rational, Polynomial), BlowupError> {
        assert_eq!(p.vars(), &self.vars[..], "map applied outside its ring");
        let order = p
            .weighted_order(&self.weights)
            .ok_or(PolyError::ZeroPolynomial)?;
        let mut terms = Vec::with_capacity(p.num_terms());
        for (ev, c) in p.terms() {
            let rel = ev.weight(&self.weights) - &order;
            if !rel.is_integer() {
                return Err(BlowupError::NonIntegralTransform {
                    equation: p.to_string(),
                });
            }
            let extra = rel
                .to_integer()
                .to_u32()
                .ok_or_else(|| BlowupError::NonIntegralTransform {
                    equation: p.to_string(),
                })?;
            let mut exps = ev.exponents().to_vec();
            exps[self.chart] = extra;
            terms.push((ExponentVector::new(exps), c.clone()));
        }
        let refs: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        Ok((order, Polynomial::from_terms(&refs, terms)))
    }
}

impl fmt::Display for MonomialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.vars[self.chart];
        let mut parts = Vec::new();
        for (j, v) in self.vars.iter().enumerate() {
            let e = rational_string(&self.weights[j]);
            let power = if self.weights[j].is_one() {
                t.clone()
            } else if self.weights[j].is_integer() {
                format!("{}^{}", t, e)
            } else {
                format!("{}^({})", t, e)
            };
            if j == self.chart {
                parts.push(format!("{} -> {}", v, power));
            } else {
                parts.push(format!("{} -> {}*{}", v, v, power));
            }
        }
        write!(f, "{}", parts.join(", "))
    }
}

/// One affine chart of a weighted blow-up.
#[derive(Clone, Debug)]
pub struct ChartResult {
    /// Index of the chart variable in the ring.
    pub chart: usize,
    /// Name of the chart variable (it cuts out the exceptional divisor).
    pub chart_variable: String,
    /// The chart as a germ: transformed equations under the chart action.
    pub germ: Germ,
    /// Exceptional multiplicity (weighted order) of each equation.
    pub multiplicities: Vec<Rational>,
    /// The substitution that produced the chart.
    pub substitution: MonomialMap,
}

impl ChartResult {
    /// Local equation of the exceptional divisor in this chart.
    pub fn exceptional_equation(&self) -> Polynomial {
        let refs = self.germ.var_refs();
        Polynomial::variable(&refs, &self.chart_variable)
    }
}

/// Compute one chart of the weighted blow-up of a germ.
pub fn blowup_chart(
    germ: &Germ,
    weight: &BlowupWeight,
    chart: &str,
) -> Result<ChartResult, BlowupError> {
    weight.validate(germ)?;
    let chart_idx = germ
        .var_index(chart)
        .ok_or_else(|| BlowupError::UnknownVariable {
            name: chart.to_string(),
        })?;
    let action = chart_action(germ.action(), weight, chart_idx)
        .ok_or_else(|| BlowupError::NonCyclicChart {
            variable: chart.to_string(),
        })?;
    let map = MonomialMap::new(germ, weight, chart_idx);
    let mut equations = Vec::with_capacity(germ.equations().len());
    let mut multiplicities = Vec::with_capacity(germ.equations().len());
    for (i, eq) in germ.equations().iter().enumerate() {
        let (order, transform) = map.apply(eq)?;
        debug_assert!(multiply_back_holds(eq, weight, chart_idx, &order, &transform));
        if !transform.constant_term().is_zero() {
            return Err(BlowupError::UnitTransform {
                equation: i,
                chart: chart.to_string(),
            });
        }
        multiplicities.push(order);
        equations.push(transform);
    }
    let refs = germ.var_refs();
    let chart_germ = Germ::new(&refs, action, equations)?;
    Ok(ChartResult {
        chart: chart_idx,
        chart_variable: chart.to_string(),
        germ: chart_germ,
        multiplicities,
        substitution: map,
    })
}

/// The cyclic action on a chart. The group always has order equal to the
/// chart numerator `b_c`. When `b_c` is coprime to the index and the other
/// numerators jointly, the chart coordinate class generates: the chart
/// variable carries character `-r` (so `-1` over a Gorenstein point) and
/// every other variable keeps its numerator. Otherwise the group is the
/// quotient of the germ lattice by the chart cone lattice; Smith normal
/// form decides whether it is cyclic and, if so, produces a generator from
/// which the characters of the chart coordinates are read off. `None` only
/// for a genuinely non-cyclic group.
fn chart_action(action: &CyclicAction, weight: &BlowupWeight, chart: usize) -> Option<CyclicAction> {
    let b = weight.numerators();
    let order = b[chart];
    let mut g = crate::germ::gcd_u32(order, action.index());
    for (j, &bj) in b.iter().enumerate() {
        if j != chart {
            g = crate::germ::gcd_u32(g, bj);
        }
    }
    if g == 1 {
        let chars: Vec<i64> = b
            .iter()
            .enumerate()
            .map(|(j, &bj)| {
                if j == chart {
                    -(action.index() as i64)
                } else {
                    bj as i64
                }
            })
            .collect();
        return Some(CyclicAction::new(order, &chars));
    }
    chart_action_via_lattice(action, weight, chart)
}

/// General chart group computation. Work in the scale where every lattice
/// is integral: the germ lattice is `r Z^n + Z*chi`, the chart cone lattice
/// is `Z*b + sum_{j != chart} r Z e_j`. Their quotient is presented by the
/// coordinate matrix of the sublattice basis in the overlattice basis; the
/// Smith normal form of that matrix lists the cyclic factors. For a cyclic
/// quotient the characters of the chart coordinates `x_j x_c^{-b_j/b_c}`
/// (for `j != chart`) and `x_c^{r/b_c}` are the pairings with a generator,
/// scaled to integers mod the order. Among the generators of the same group
/// the one giving the lexicographically smallest character vector is chosen.
fn chart_action_via_lattice(
    action: &CyclicAction,
    weight: &BlowupWeight,
    chart: usize,
) -> Option<CyclicAction> {
    use num_bigint::BigInt;

    let n = weight.numerators().len();
    let r = BigInt::from(action.index());
    let b: Vec<BigInt> = weight.numerators().iter().map(|&x| BigInt::from(x)).collect();
    let basis_vec = |k: usize, scale: &BigInt| -> Vec<BigInt> {
        (0..n)
            .map(|j| if j == k { scale.clone() } else { BigInt::zero() })
            .collect()
    };

    // Overlattice: r Z^n + Z*chi.
    let mut rows_big: Vec<Vec<BigInt>> = (0..n).map(|k| basis_vec(k, &r)).collect();
    rows_big.push(
        action
            .characters()
            .iter()
            .map(|&c| BigInt::from(c))
            .collect(),
    );
    let basis_big = crate::linalg::row_echelon_lattice_basis(&rows_big);

    // Sublattice: Z*b + r Z e_j for j != chart.
    let mut rows_sub: Vec<Vec<BigInt>> = vec![b.clone()];
    for j in 0..n {
        if j != chart {
            rows_sub.push(basis_vec(j, &r));
        }
    }
    let basis_sub = crate::linalg::row_echelon_lattice_basis(&rows_sub);
    if basis_big.len() != n || basis_sub.len() != n {
        return None;
    }

    // Coordinates of the sublattice basis in the overlattice basis.
    let to_rat = |m: &[Vec<BigInt>]| -> Vec<Vec<Rational>> {
        m.iter()
            .map(|row| row.iter().map(|x| Rational::from(x.clone())).collect())
            .collect()
    };
    let inv_big = crate::linalg::inverse(&transpose(&to_rat(&basis_big)))?;
    let mut coords: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for lrow in &basis_sub {
        let rat: Vec<Rational> = lrow.iter().map(|x| Rational::from(x.clone())).collect();
        let c = crate::linalg::mat_vec(&inv_big, &rat);
        let mut int_row = Vec::with_capacity(n);
        for entry in c {
            if !entry.is_integer() {
                return None;
            }
            int_row.push(entry.to_integer());
        }
        coords.push(int_row);
    }

    // Cokernel of the relation matrix whose columns are the sublattice
    // vectors in overlattice coordinates.
    let relations = transpose_int(&coords);
    let (u, d, _v) = crate::linalg::smith_normal_form(&relations);
    let mut big_factors: Vec<usize> = Vec::new();
    for k in 0..n {
        let dk = d[k][k].clone();
        if dk.is_zero() {
            return None;
        }
        if dk != BigInt::one() {
            big_factors.push(k);
        }
    }
    if big_factors.is_empty() {
        return Some(CyclicAction::trivial(n));
    }
    if big_factors.len() > 1 {
        return None;
    }
    let k = big_factors[0];
    let order = d[k][k].to_u32()?;

    // Generator in overlattice coordinates: column k of u^{-1}.
    let u_inv = crate::linalg::inverse(&to_rat(&u))?;
    let gen_coords: Vec<Rational> = (0..n).map(|i| u_inv[i][k].clone()).collect();
    // Back to ambient coordinates (still in the r-scaled lattice), then to
    // the true rational lattice point by dividing by r.
    let mut gen = vec![Rational::zero(); n];
    for (i, c) in gen_coords.iter().enumerate() {
        for j in 0..n {
            gen[j] += c * Rational::from(basis_big[i][j].clone());
        }
    }
    let r_rat = Rational::from(BigInt::from(action.index()));
    for entry in &mut gen {
        *entry /= &r_rat;
    }

    // Characters: order * <m_j, gen> mod order, where m_j is the monomial of
    // the j-th chart coordinate.
    let order_rat = Rational::from(BigInt::from(order));
    let bc = Rational::from(b[chart].clone());
    let mut chars = vec![0i64; n];
    for j in 0..n {
        let pairing = if j == chart {
            &r_rat / &bc * &gen[chart]
        } else {
            &gen[j] - Rational::from(b[j].clone()) / &bc * &gen[chart]
        };
        let scaled = &order_rat * &pairing;
        if !scaled.is_integer() {
            return None;
        }
        let val = scaled.to_integer() % BigInt::from(order);
        chars[j] = val.to_i64()?;
    }

    // Canonical generator: smallest character vector over all unit rescalings.
    let mut best: Option<Vec<i64>> = None;
    for s in 1..order {
        if crate::germ::gcd_u32(s, order) != 1 {
            continue;
        }
        let candidate: Vec<i64> = chars
            .iter()
            .map(|&c| (c * s as i64).rem_euclid(order as i64))
            .collect();
        best = match best {
            None => Some(candidate),
            Some(cur) if candidate < cur => Some(candidate),
            keep => keep,
        };
    }
    Some(CyclicAction::new(order, &best?))
}

fn transpose(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

fn transpose_int(m: &[Vec<num_bigint::BigInt>]) -> Vec<Vec<num_bigint::BigInt>> {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

/// Check `f(x_j -> x_j s^{b_j}, x_c -> s^{b_c}) == s^{r*order} * transform`
/// with the chart variable of the transform replaced by `s^r`. This is the
/// defining identity of the chart transform, written with the integral
/// auxiliary variable `s` (a formal `r`-th root of the chart variable).
fn multiply_back_holds(
    eq: &Polynomial,
    weight: &BlowupWeight,
    chart: usize,
    order: &Rational,
    transform: &Polynomial,
) -> bool {
    let n = eq.vars().len();
    let mut names: Vec<String> = eq.vars().to_vec();
    let mut s = String::from("s");
    while names.contains(&s) {
        s.push('s');
    }
    names.push(s);
    let refs: Vec<&str> = names.iter().map(|v| v.as_str()).collect();
    let monomial = |exps: Vec<u32>| {
        Polynomial::from_terms(&refs, vec![(ExponentVector::new(exps), Rational::one())])
    };
    let up: Vec<Polynomial> = (0..n)
        .map(|j| {
            let mut exps = vec![0u32; n + 1];
            if j != chart {
                exps[j] = 1;
            }
            exps[n] = weight.numerators()[j];
            monomial(exps)
        })
        .collect();
    let lhs = match eq.substitute(&up) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let down: Vec<Polynomial> = (0..n)
        .map(|j| {
            let mut exps = vec![0u32; n + 1];
            if j == chart {
                exps[n] = weight.denominator();
            } else {
                exps[j] = 1;
            }
            monomial(exps)
        })
        .collect();
    let scaled = match transform.substitute(&down) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let shift = (order * Rational::from_integer(weight.denominator().into())).to_integer();
    let shift = match shift.to_u32() {
        Some(v) => v,
        None => return false,
    };
    let mut exps = vec![0u32; n + 1];
    exps[n] = shift;
    let rhs = scaled.mul_monomial(&ExponentVector::new(exps), &Rational::one());
    lhs == rhs
}

/// Discrepancy of the exceptional divisor of a weighted blow-up: the sum
/// of the weights minus each equation's weighted order, minus one.
pub fn discrepancy(germ: &Germ, weight: &BlowupWeight) -> Result<Rational, BlowupError> {
    weight.validate(germ)?;
    let fractions = weight.fractions();
    let mut d = fractions
        .iter()
        .fold(Rational::zero(), |acc, w| acc + w)
        - Rational::one();
    for eq in germ.equations() {
        d -= eq
            .weighted_order(&fractions)
            .ok_or(PolyError::ZeroPolynomial)?;
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// Chains of blow-ups.

/// One step of a chain, as parsed from the text format.
#[derive(Clone, Debug)]
pub struct ChainStep {
    /// `Some((step, variable))` to continue from another chart of an
    /// earlier step's blow-up; `None` to continue from the previous step's
    /// selected chart (or the input germ for the first step).
    pub base: Option<(usize, String)>,
    /// Origin-fixing coordinate changes `(variable, image)` applied in
    /// order before the blow-up; images are parsed against the base ring
    /// at run time.
    pub recenter: Vec<(String, String)>,
    pub weight: BlowupWeight,
    /// Chart to continue the chain through.
    pub chart: String,
}

/// A parsed chain description.
#[derive(Clone, Debug)]
pub struct BlowupChain {
    pub steps: Vec<ChainStep>,
}

/// Errors from the chain file reader.
#[derive(Debug)]
pub enum ChainFileError {
    Empty,
    BadLine { line: usize, message: String },
}

impl fmt::Display for ChainFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainFileError::Empty => write!(f, "chain file has no steps"),
            ChainFileError::BadLine { line, message } => {
                write!(f, "chain file line {}: {}", line, message)
            }
        }
    }
}

impl std::error::Error for ChainFileError {}

impl BlowupChain {
    /// Parse a chain description, one step per line:
    ///
    /// ```text
    /// # comments and blank lines are skipped
    /// blowup: chart=z weight=2:3,2,3,1
    /// blowup: chart=x weight=5:3,2,1 base=4.z
    /// blowup: chart=y weight=1:1,1,1 recenter: z -> z - x^2, u -> u + y
    /// ```
    ///
    /// `weight=r:n1,n2,...` is the blow-up weight; `chart=` names the
    /// variable whose chart the chain continues through; `base=k.v`
    /// restarts from chart `v` of step `k` (steps are 1-based); the
    /// `recenter:` clause, which must come last, lists origin-fixing
    /// coordinate changes applied before the blow-up.
    pub fn parse_file(text: &str) -> Result<BlowupChain, ChainFileError> {
        let mut steps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = lineno + 1;
            let bad = |message: String| ChainFileError::BadLine {
                line: lineno,
                message,
            };
            let rest = line
                .strip_prefix("blowup:")
                .ok_or_else(|| bad("expected `blowup: ...`".into()))?;
            let (head, recenter_text) = match rest.find("recenter:") {
                Some(pos) => (&rest[..pos], Some(&rest[pos + "recenter:".len()..])),
                None => (rest, None),
            };
            let mut chart: Option<String> = None;
            let mut weight: Option<BlowupWeight> = None;
            let mut base: Option<(usize, String)> = None;
            for token in head.split_whitespace() {
                let (key, value) = token
                    .split_once('=')
                    .ok_or_else(|| bad(format!("expected `key=value`, found `{}`", token)))?;
                match key {
                    "chart" => chart = Some(value.to_string()),
                    "weight" => {
                        weight =
                            Some(BlowupWeight::parse(value).map_err(|e| bad(e.to_string()))?)
                    }
                    "base" => {
                        let (step, var) = value
                            .split_once('.')
                            .ok_or_else(|| bad("base must be `<step>.<variable>`".into()))?;
                        let step: usize =
                            step.parse().map_err(|_| bad("bad base step number".into()))?;
                        if step == 0 || var.is_empty() {
                            return Err(bad("base must be `<step>.<variable>`".into()));
                        }
                        base = Some((step, var.to_string()));
                    }
                    other => return Err(bad(format!("unknown key `{}`", other))),
                }
            }
            let mut recenter = Vec::new();
            if let Some(tail) = recenter_text {
                for entry in tail.split(',') {
                    let entry = entry.trim();
                    if entry.is_empty() {
                        continue;
                    }
                    let (var, expr) = entry.split_once("->").ok_or_else(|| {
                        bad("recenter entries must be `<variable> -> <expression>`".into())
                    })?;
                    recenter.push((var.trim().to_string(), expr.trim().to_string()));
                }
                if recenter.is_empty() {
                    return Err(bad("empty recenter clause".into()));
                }
            }
            steps.push(ChainStep {
                base,
                recenter,
                weight: weight.ok_or_else(|| bad("missing `weight=`".into()))?,
                chart: chart.ok_or_else(|| bad("missing `chart=`".into()))?,
            });
        }
        if steps.is_empty() {
            return Err(ChainFileError::Empty);
        }
        Ok(BlowupChain { steps })
    }
}

/// Everything recorded about one executed step.
#[derive(Clone, Debug)]
pub struct StepRecord {
    /// Where the base germ came from: `(0, "")` for the input germ, else
    /// `(step, chart variable)` of an earlier blow-up.
    pub base: (usize, String),
    /// The germ that was blown up (after recentring and elimination).
    pub base_germ: Germ,
    /// Recentring images that were applied, in order.
    pub recenter: Vec<(String, Polynomial)>,
    /// Unit-linear variables eliminated before the blow-up, in order.
    pub eliminations: Vec<EliminationRecord>,
    pub weight: BlowupWeight,
    /// Discrepancy of this step's exceptional divisor over the base germ.
    pub discrepancy: Rational,
    /// What the base germ is, when the classifier recognizes it.
    pub classification: Option<SingularityKind>,
    /// The chart the chain continues through.
    pub result: ChartResult,
}

/// A fully executed chain.
#[derive(Clone, Debug)]
pub struct ChainRun {
    input: Germ,
    truncation: u32,
    steps: Vec<StepRecord>,
}

/// Execute a chain of weighted blow-ups starting from a germ.
///
/// Each step starts from its base germ (the previous step's chart, or an
/// explicit `base=` chart of an earlier blow-up), applies the recentring
/// changes, eliminates unit-linear variables, and blows up with the given
/// weight. Centers are chart origins; a step whose base link repeats an
/// earlier one would blow up a point that no longer exists and is refused.
pub fn run_chain(
    input: &Germ,
    chain: &BlowupChain,
    truncation: u32,
) -> Result<ChainRun, BlowupError> {
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut centers: BTreeSet<(usize, String)> = BTreeSet::new();
    for (i, step) in chain.steps.iter().enumerate() {
        let number = i + 1;
        let link: (usize, String) = match &step.base {
            None => {
                if number == 1 {
                    (0, String::new())
                } else {
                    (number - 1, steps[number - 2].result.chart_variable.clone())
                }
            }
            Some((k, v)) => {
                if *k >= number {
                    return Err(BlowupError::BadBaseLink {
                        step: number,
                        message: format!("base step {} is not an earlier step", k),
                    });
                }
                (*k, v.clone())
            }
        };
        if !centers.insert(link.clone()) {
            return Err(BlowupError::DuplicateCenter { step: number });
        }
        let start: Germ = if link.0 == 0 {
            input.clone()
        } else {
            let source = &steps[link.0 - 1];
            if source.result.chart_variable == link.1 {
                source.result.germ.clone()
            } else {
                blowup_chart(&source.base_germ, &source.weight, &link.1)?.germ
            }
        };
        let mut germ = start;
        let mut recenter = Vec::with_capacity(step.recenter.len());
        for (var, expr) in &step.recenter {
            let refs = germ.var_refs();
            if !refs.contains(&var.as_str()) {
                return Err(BlowupError::UnknownVariable { name: var.clone() });
            }
            let image = Polynomial::parse(expr, &refs)?;
            let change =
                CoordinateChange::single(germ.action(), &refs, var, image.clone(), truncation)?;
            germ = apply_change(&germ, &change)?;
            recenter.push((var.clone(), image));
        }
        let (germ, eliminations) = simplify(&germ, truncation)?;
        let classification = terminal_classify(&germ).ok().map(|c| c.kind);
        let step_discrepancy = discrepancy(&germ, &step.weight)?;
        let result = blowup_chart(&germ, &step.weight, &step.chart)?;
        steps.push(StepRecord {
            base: link,
            base_germ: germ,
            recenter,
            eliminations,
            weight: step.weight.clone(),
            discrepancy: step_discrepancy,
            classification,
            result,
        });
    }
    Ok(ChainRun {
        input: input.clone(),
        truncation,
        steps,
    })
}

impl ChainRun {
    pub fn input(&self) -> &Germ {
        &self.input
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// The germ of the chart the last step continued through.
    pub fn final_germ(&self) -> Option<&Germ> {
        self.steps.last().map(|s| &s.result.germ)
    }

    /// Any chart of any executed step (recomputed when it is not the chart
    /// the chain continued through).
    pub fn chart(&self, step: usize, variable: &str) -> Result<ChartResult, BlowupError> {
        if step == 0 || step > self.steps.len() {
            return Err(BlowupError::BadBaseLink {
                step,
                message: "no such step".into(),
            });
        }
        let record = &self.steps[step - 1];
        if record.result.chart_variable == variable {
            Ok(record.result.clone())
        } else {
            blowup_chart(&record.base_germ, &record.weight, variable)
        }
    }

    /// The table `a(E_j, W_i)` of discrepancies of each step's exceptional
    /// divisor `E_j` against each intermediate model: row `j` (1-based)
    /// lists the columns `i = 0..j`, where `W_0` is the input and `W_i`
    /// the model after `i` steps. Row `j` ends with the step's own
    /// discrepancy; earlier columns follow the recursion
    /// `a(E_j, W_i) = a(E_j, W_{i+1}) + a(E_{i+1}, W_i) * v_j(i+1)`
    /// with `v_j(i+1)` the order of `E_{i+1}` along `E_j`.
    pub fn discrepancy_table(&self) -> Result<Vec<Vec<Rational>>, BlowupError> {
        let mut rows = Vec::with_capacity(self.steps.len());
        for j in 1..=self.steps.len() {
            let mut row = vec![Rational::zero(); j];
            row[j - 1] = self.steps[j - 1].discrepancy.clone();
            for i in (0..j - 1).rev() {
                let v = self.exceptional_valuation(i + 1, j)?;
                row[i] = &row[i + 1] + &(&self.steps[i].discrepancy * &v);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Order along `E_j` of the pulled-back local equation of `E_target`.
    /// Zero when step `target` is not on step `j`'s base lineage (their
    /// centers separate at distinct chart origins).
    fn exceptional_valuation(&self, target: usize, j: usize) -> Result<Rational, BlowupError> {
        let mut path: Vec<(usize, String)> = Vec::new();
        let mut current = j;
        loop {
            let link = self.steps[current - 1].base.clone();
            if link.0 == 0 {
                return Ok(Rational::zero());
            }
            let next = link.0;
            path.push(link);
            if next == target {
                break;
            }
            current = next;
        }
        path.reverse();
        // path[0] = (target, chart v): the divisor is cut out by v there.
        let creation = self.chart(path[0].0, &path[0].1)?;
        let mut pulled = PulledFunction::variable(&creation.germ, &path[0].1);
        for (step, chart) in path.iter().skip(1) {
            let record = &self.steps[step - 1];
            self.preprocess(&mut pulled, record)?;
            let chart_idx = record.base_germ.var_index(chart).ok_or_else(|| {
                BlowupError::UnknownVariable {
                    name: chart.clone(),
                }
            })?;
            let map = MonomialMap::new(&record.base_germ, &record.weight, chart_idx);
            pulled.blowup(&map)?;
        }
        let last = &self.steps[j - 1];
        self.preprocess(&mut pulled, last)?;
        Ok(pulled.order(&last.weight.fractions()))
    }

    /// Apply one step's recentring and eliminations to a pulled function.
    fn preprocess(
        &self,
        pulled: &mut PulledFunction,
        record: &StepRecord,
    ) -> Result<(), BlowupError> {
        for (var, image) in &record.recenter {
            pulled.recenter(var, image, self.truncation)?;
        }
        for record in &record.eliminations {
            pulled.eliminate(record)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Pushing exceptional equations forward.

/// A formal product of rational powers of polynomials, tracked only for
/// its weighted orders: units (factors with a nonzero constant term) are
/// dropped because every later substitution fixes the origin, scalar
/// multiples do not matter, and orders add over factors.
struct PulledFunction {
    factors: Vec<(Polynomial, Rational)>,
}

impl PulledFunction {
    fn variable(germ: &Germ, name: &str) -> PulledFunction {
        let refs = germ.var_refs();
        PulledFunction {
            factors: vec![(Polynomial::variable(&refs, name), Rational::one())],
        }
    }

    /// Rewrite the factors under an origin-fixing coordinate change that
    /// replaces one variable.
    fn recenter(
        &mut self,
        var: &str,
        image: &Polynomial,
        truncation: u32,
    ) -> Result<(), BlowupError> {
        let refs: Vec<&str> = image.vars().iter().map(|v| v.as_str()).collect();
        let images: Vec<Polynomial> = refs
            .iter()
            .map(|v| {
                if *v == var {
                    image.clone()
                } else {
                    Polynomial::variable(&refs, v)
                }
            })
            .collect();
        for (p, _) in &mut self.factors {
            assert_eq!(p.vars(), image.vars(), "recentring outside the factor ring");
            let next = p.substitute_truncated(&images, truncation)?;
            if next.is_zero() {
                return Err(BlowupError::DegenerateValuation {
                    detail: p.to_string(),
                });
            }
            *p = next;
        }
        self.drop_units();
        Ok(())
    }

    /// Substitute an eliminated variable by its replacement; the factors
    /// move to the surviving-variable ring.
    fn eliminate(&mut self, record: &EliminationRecord) -> Result<(), BlowupError> {
        let target: Vec<&str> = record
            .replacement
            .vars()
            .iter()
            .map(|v| v.as_str())
            .collect();
        for (p, _) in &mut self.factors {
            let images: Vec<Polynomial> = p
                .vars()
                .iter()
                .map(|v| {
                    if *v == record.variable {
                        record.replacement.clone()
                    } else {
                        Polynomial::variable(&target, v)
                    }
                })
                .collect();
            let next = p.substitute(&images)?;
            if next.is_zero() {
                return Err(BlowupError::DegenerateValuation {
                    detail: p.to_string(),
                });
            }
            *p = next;
        }
        self.drop_units();
        Ok(())
    }

    /// Push the factors through one blow-up chart substitution. Each
    /// factor sheds a power of the chart variable, which accumulates into
    /// one extra factor.
    fn blowup(&mut self, map: &MonomialMap) -> Result<(), BlowupError> {
        let mut exceptional = Rational::zero();
        let mut kept = Vec::with_capacity(self.factors.len() + 1);
        for (p, q) in self.factors.drain(..) {
            let (order, transform) = map.apply(&p)?;
            exceptional += &order * &q;
            if transform.constant_term().is_zero() {
                kept.push((transform, q));
            }
        }
        if !exceptional.is_zero() {
            let refs: Vec<&str> = map.vars().iter().map(|v| v.as_str()).collect();
            kept.push((
                Polynomial::variable(&refs, &map.vars()[map.chart()]),
                exceptional,
            ));
        }
        self.factors = kept;
        Ok(())
    }

    fn drop_units(&mut self) {
        self.factors.retain(|(p, _)| p.constant_term().is_zero());
    }

    /// Weighted order of the product: the weighted sum of factor orders.
    fn order(&self, weights: &[Rational]) -> Rational {
        self.factors.iter().fold(Rational::zero(), |acc, (p, q)| {
            let w = p
                .weighted_order(weights)
                .expect("factors are kept nonzero");
            acc + &w * q
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{frac, rat};
    use crate::DEFAULT_TRUNCATION;
    use proptest::prelude::*;

    const QUARTET: [&str; 4] = ["x", "y", "z", "u"];

    fn quartet(eq: &str) -> Germ {
        Germ::new(
            &QUARTET,
            CyclicAction::trivial(4),
            vec![Polynomial::parse(eq, &QUARTET).unwrap()],
        )
        .unwrap()
    }

    fn quartet_quotient(eq: &str, r: u32, chars: [i64; 4]) -> Germ {
        Germ::new(
            &QUARTET,
            CyclicAction::new(r, &chars),
            vec![Polynomial::parse(eq, &QUARTET).unwrap()],
        )
        .unwrap()
    }

    fn w(text: &str) -> BlowupWeight {
        BlowupWeight::parse(text).unwrap()
    }

    fn ambient3() -> Germ {
        Germ::quotient_point(1, &[0, 0, 0]).unwrap()
    }

    #[test]
    fn weight_parsing_and_display() {
        let lifted = w("4:3,2,5,1");
        assert_eq!(lifted.numerators(), &[3, 2, 5, 1]);
        assert_eq!(lifted.denominator(), 4);
        assert_eq!(lifted.to_string(), "4:3,2,5,1");
        assert_eq!(lifted.fractions()[2], frac(5, 4));
        for bad in ["", "3,2,1", "0:1,1", "4:", "4:3,0,1", "4:3,-1,2", "x:1,1"] {
            assert!(
                matches!(
                    BlowupWeight::parse(bad),
                    Err(BlowupError::WeightSyntax { .. })
                ),
                "`{}` should not parse",
                bad
            );
        }
    }

    #[test]
    fn weight_validation_rejects_mismatches() {
        let node = quartet("x*y + z^2 + u^2");
        assert!(matches!(
            w("2:1,1,1,1").validate(&node),
            Err(BlowupError::WrongIndex { germ: 1, weight: 2 })
        ));
        assert!(matches!(
            w("1:1,1,1").validate(&node),
            Err(BlowupError::WrongArity {
                expected: 4,
                found: 3
            })
        ));
        assert!(matches!(
            w("1:2,4,6,8").validate(&node),
            Err(BlowupError::NotPrimitive { divisor: 2 })
        ));
        let half = quartet_quotient("x*y + z^2 + u^2", 2, [1, 1, 1, 0]);
        assert!(matches!(
            w("2:1,1,1,1").validate(&half),
            Err(BlowupError::Incompatible { .. })
        ));
        assert!(w("2:1,1,1,2").validate(&half).is_ok());
        // (1,1,1,2)/2 doubled is an integer point, hence not primitive.
        assert!(matches!(
            w("2:2,2,2,4").validate(&half),
            Err(BlowupError::NotPrimitive { divisor: 2 })
        ));
    }

    #[test]
    fn cyclic_point_blowup_has_fractional_discrepancy() {
        let point = Germ::quotient_point(5, &[3, 2, 1]).unwrap();
        let weight = w("5:3,2,1");
        assert_eq!(discrepancy(&point, &weight).unwrap(), frac(1, 5));
        let x_chart = blowup_chart(&point, &weight, "x").unwrap();
        assert_eq!(x_chart.germ.action().to_string(), "1/3(1,2,1)");
        assert!(x_chart.germ.is_ambient());
        let y_chart = blowup_chart(&point, &weight, "y").unwrap();
        assert_eq!(y_chart.germ.action().to_string(), "1/2(1,1,1)");
        let z_chart = blowup_chart(&point, &weight, "z").unwrap();
        assert!(z_chart.germ.action().is_trivial());
    }

    #[test]
    fn node_chart_is_smooth_and_cone_chart_is_missed() {
        let node = quartet("x*y + z^2 + u^2");
        let weight = w("1:1,1,1,1");
        assert_eq!(discrepancy(&node, &weight).unwrap(), rat(1));
        let chart = blowup_chart(&node, &weight, "x").unwrap();
        assert_eq!(
            chart.germ.equations()[0],
            Polynomial::parse("y + z^2 + u^2", &QUARTET).unwrap()
        );
        assert_eq!(chart.multiplicities, vec![rat(2)]);
        // In the z-chart the transform is xy + 1 + u^2: the strict
        // transform avoids that chart origin entirely.
        assert!(matches!(
            blowup_chart(&node, &weight, "z"),
            Err(BlowupError::UnitTransform {
                equation: 0,
                ..
            })
        ));
    }

    #[test]
    fn chart_records_substitution_and_multiplicity() {
        let germ = quartet("x^2 + y^3 + z^5 + y*u^4");
        let weight = w("1:3,2,2,1");
        let chart = blowup_chart(&germ, &weight, "z").unwrap();
        assert_eq!(
            chart.germ.equations()[0],
            Polynomial::parse("x^2 + y^3 + z^4 + y*u^4", &QUARTET).unwrap()
        );
        assert_eq!(chart.germ.action().to_string(), "1/2(1,0,1,1)");
        assert_eq!(chart.multiplicities, vec![rat(6)]);
        assert_eq!(chart.chart_variable, "z");
        assert_eq!(
            chart.exceptional_equation(),
            Polynomial::parse("z", &QUARTET).unwrap()
        );
        assert_eq!(
            chart.substitution.to_string(),
            "x -> x*z^3, y -> y*z^2, z -> z^2, u -> u*z"
        );
        assert_eq!(discrepancy(&germ, &weight).unwrap(), rat(1));
    }

    #[test]
    fn non_principal_chart_groups_come_from_the_lattice_quotient() {
        // Index-2 germ with an all-even weight vector: no chart numerator is
        // coprime to the index and the remaining numerators jointly, yet the
        // chart groups are still cyclic, with generators other than the
        // chart coordinate class.
        let germ = quartet_quotient("x^2 + y^2*u + z^4 + y^4", 2, [1, 1, 1, 0]);
        let weight = w("2:4,4,2,2");
        assert_eq!(discrepancy(&germ, &weight).unwrap(), rat(1));

        let chart_y = blowup_chart(&germ, &weight, "y").unwrap();
        assert_eq!(chart_y.germ.action().to_string(), "1/4(0,1,1,3)");
        assert_eq!(
            chart_y.germ.equations()[0],
            Polynomial::parse("x^2 + y*u + z^4 + y^4", &QUARTET).unwrap()
        );

        let chart_u = blowup_chart(&germ, &weight, "u").unwrap();
        assert_eq!(chart_u.germ.action().to_string(), "1/2(1,1,1,0)");
        assert_eq!(
            chart_u.germ.equations()[0],
            Polynomial::parse("x^2 + y^2*u + z^4 + y^4*u^4", &QUARTET).unwrap()
        );

        // The two remaining charts are missed by the strict transform.
        for var in ["x", "z"] {
            match blowup_chart(&germ, &weight, var) {
                Err(BlowupError::UnitTransform { .. }) => {}
                other => panic!("chart {} should be missed, got {:?}", var, other),
            }
        }
    }

    #[test]
    fn discrepancy_examples_across_families() {
        assert_eq!(
            discrepancy(&quartet("x^2 + y^3 + z^5 + u^7"), &w("1:3,2,2,1")).unwrap(),
            rat(1)
        );
        assert_eq!(
            discrepancy(&quartet("x^2 + y^2*z + z^3 + u^3"), &w("1:2,1,1,1")).unwrap(),
            rat(1)
        );
        let half = quartet_quotient("x*y + z^2 + u^2", 2, [1, 1, 1, 0]);
        assert_eq!(discrepancy(&half, &w("2:1,1,1,2")).unwrap(), frac(1, 2));
        // A surface cone: blowing up the vertex is crepant.
        let cone = Germ::new(
            &["x", "y", "z"],
            CyclicAction::trivial(3),
            vec![Polynomial::parse("x^2 + y^2 + z^2", &["x", "y", "z"]).unwrap()],
        )
        .unwrap();
        assert_eq!(discrepancy(&cone, &w("1:1,1,1")).unwrap(), rat(0));
    }

    #[test]
    fn double_point_blowup_of_affine_space() {
        let chain = BlowupChain::parse_file(
            "blowup: chart=x weight=1:1,1,1\nblowup: chart=x weight=1:1,1,1\n",
        )
        .unwrap();
        let run = run_chain(&ambient3(), &chain, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(run.steps()[0].discrepancy, rat(2));
        assert_eq!(run.steps()[1].discrepancy, rat(2));
        let table = run.discrepancy_table().unwrap();
        assert_eq!(table, vec![vec![rat(2)], vec![rat(4), rat(2)]]);
    }

    #[test]
    fn chain_file_parsing_and_errors() {
        let text = "\
# resolve the germ
blowup: chart=z weight=2:3,2,3,1

blowup: chart=x weight=5:3,2,1 base=1.z recenter: z -> z - x^2, u -> u + y
";
        let chain = BlowupChain::parse_file(text).unwrap();
        assert_eq!(chain.steps.len(), 2);
        assert_eq!(chain.steps[0].chart, "z");
        assert_eq!(chain.steps[0].base, None);
        assert!(chain.steps[0].recenter.is_empty());
        assert_eq!(chain.steps[1].base, Some((1, "z".to_string())));
        assert_eq!(chain.steps[1].weight.to_string(), "5:3,2,1");
        assert_eq!(
            chain.steps[1].recenter,
            vec![
                ("z".to_string(), "z - x^2".to_string()),
                ("u".to_string(), "u + y".to_string())
            ]
        );
        for bad in [
            "exceptional: chart=x weight=1:1,1,1",
            "blowup: chart=x",
            "blowup: weight=1:1,1,1",
            "blowup: chart=x weight=1:1,1,1 base=x.1",
            "blowup: chart=x weight=1:1,1,1 base=0.x",
            "blowup: chart=x weight=1:1,1,1 recenter: z",
        ] {
            assert!(
                matches!(
                    BlowupChain::parse_file(bad),
                    Err(ChainFileError::BadLine { .. })
                ),
                "`{}` should not parse",
                bad
            );
        }
        assert!(matches!(
            BlowupChain::parse_file("# nothing\n"),
            Err(ChainFileError::Empty)
        ));
    }

    #[test]
    fn chain_rejects_repeated_and_forward_centers() {
        let text = "\
blowup: chart=x weight=1:1,1,1
blowup: chart=x weight=1:1,1,1
blowup: chart=y weight=1:1,1,1 base=1.x
";
        let chain = BlowupChain::parse_file(text).unwrap();
        assert!(matches!(
            run_chain(&ambient3(), &chain, DEFAULT_TRUNCATION),
            Err(BlowupError::DuplicateCenter { step: 3 })
        ));
        let forward =
            BlowupChain::parse_file("blowup: chart=x weight=1:1,1,1 base=1.x").unwrap();
        assert!(matches!(
            run_chain(&ambient3(), &forward, DEFAULT_TRUNCATION),
            Err(BlowupError::BadBaseLink { step: 1, .. })
        ));
    }

    #[test]
    fn recentring_is_applied_and_recorded() {
        let node = quartet("x*y + z^2 + u^2");
        let chain = BlowupChain::parse_file(
            "blowup: chart=x weight=1:1,1,1,1 recenter: z -> z - u\n",
        )
        .unwrap();
        let run = run_chain(&node, &chain, DEFAULT_TRUNCATION).unwrap();
        let record = &run.steps()[0];
        assert_eq!(record.recenter.len(), 1);
        assert_eq!(record.recenter[0].0, "z");
        assert_eq!(
            record.base_germ.equations()[0],
            Polynomial::parse("x*y + z^2 - 2*z*u + 2*u^2", &QUARTET).unwrap()
        );
        assert_eq!(
            record.result.germ.equations()[0],
            Polynomial::parse("y + z^2 - 2*z*u + 2*u^2", &QUARTET).unwrap()
        );
    }

    fn e8_chain() -> BlowupChain {
        BlowupChain::parse_file(
            "\
blowup: chart=z weight=1:3,2,2,1
blowup: chart=z weight=2:3,2,3,1
blowup: chart=z weight=3:3,2,4,1
blowup: chart=z weight=4:3,2,5,1
blowup: chart=x weight=5:3,2,1
blowup: chart=y weight=3:1,2,1
blowup: chart=x weight=2:1,1,1
blowup: chart=x weight=2:1,1,1 base=5.y
",
        )
        .unwrap()
    }

    #[test]
    fn resolution_table_of_a_ce8_germ() {
        let germ = quartet("x^2 + y^3 + z^5 + y*u^4");
        let run = run_chain(&germ, &e8_chain(), DEFAULT_TRUNCATION).unwrap();

        // Base germs along the chain: indices climb to five and fall back.
        let indices: Vec<u32> = run.steps().iter().map(|s| s.base_germ.index()).collect();
        assert_eq!(indices, vec![1, 2, 3, 4, 5, 3, 2, 2]);
        let diagonal: Vec<Rational> = run.steps().iter().map(|s| s.discrepancy.clone()).collect();
        assert_eq!(
            diagonal,
            vec![
                rat(1),
                frac(1, 2),
                frac(1, 3),
                frac(1, 4),
                frac(1, 5),
                frac(1, 3),
                frac(1, 2),
                frac(1, 2)
            ]
        );

        // The intermediate classifications walk down the families.
        let kinds: Vec<Option<SingularityKind>> =
            run.steps().iter().map(|s| s.classification.clone()).collect();
        assert_eq!(kinds[0], Some(SingularityKind::CE { n: 8 }));
        assert_eq!(kinds[1], Some(SingularityKind::CEQuotient));
        assert_eq!(kinds[2], Some(SingularityKind::CDQuotient { r: 3 }));
        assert_eq!(kinds[3], Some(SingularityKind::CAxQuotient { r: 4 }));
        for (k, r) in kinds.iter().skip(4).zip([5u32, 3, 2, 2]) {
            match k {
                Some(SingularityKind::CyclicQuotient { r: got, .. }) => assert_eq!(*got, r),
                other => panic!("expected a quotient point, got {:?}", other),
            }
        }

        // The fourth chart becomes unit-linear in z and drops to a point.
        assert_eq!(
            run.steps()[3].result.germ.equations()[0],
            Polynomial::parse("x^2 + y^3 + z + y*u^4", &QUARTET).unwrap()
        );
        let fifth = &run.steps()[4];
        assert_eq!(fifth.eliminations.len(), 1);
        assert_eq!(fifth.eliminations[0].variable, "z");
        assert!(fifth.base_germ.is_ambient());
        assert_eq!(fifth.base_germ.action().to_string(), "1/5(3,2,1)");

        // The sibling chart the eighth step branches from.
        let sibling = run.chart(5, "y").unwrap();
        assert_eq!(sibling.germ.action().to_string(), "1/2(1,1,1)");
        let tame = run.chart(5, "u").unwrap();
        assert!(tame.germ.action().is_trivial());

        // Every discrepancy of every divisor against every model.
        let expected: Vec<Vec<Rational>> = vec![
            vec![rat(1)],
            vec![rat(2), frac(1, 2)],
            vec![rat(3), rat(1), frac(1, 3)],
            vec![rat(4), frac(3, 2), frac(2, 3), frac(1, 4)],
            vec![rat(5), rat(2), rat(1), frac(1, 2), frac(1, 5)],
            vec![rat(2), rat(1), frac(2, 3), frac(1, 2), frac(2, 5), frac(1, 3)],
            vec![
                rat(4),
                rat(2),
                frac(4, 3),
                rat(1),
                frac(4, 5),
                frac(2, 3),
                frac(1, 2),
            ],
            vec![
                rat(3),
                frac(3, 2),
                rat(1),
                frac(3, 4),
                frac(3, 5),
                frac(1, 2),
                frac(1, 2),
                frac(1, 2),
            ],
        ];
        assert_eq!(run.discrepancy_table().unwrap(), expected);
    }

    #[test]
    fn reordering_the_ring_does_not_change_the_table() {
        let reversed = ["u", "z", "y", "x"];
        let germ = Germ::new(
            &reversed,
            CyclicAction::trivial(4),
            vec![Polynomial::parse("x^2 + y^3 + z^5 + y*u^4", &reversed).unwrap()],
        )
        .unwrap();
        let chain = BlowupChain::parse_file(
            "\
blowup: chart=z weight=1:1,2,2,3
blowup: chart=z weight=2:1,3,2,3
blowup: chart=z weight=3:1,4,2,3
blowup: chart=z weight=4:1,5,2,3
blowup: chart=x weight=5:1,2,3
blowup: chart=y weight=3:1,2,1
blowup: chart=x weight=2:1,1,1
blowup: chart=x weight=2:1,1,1 base=5.y
",
        )
        .unwrap();
        let run = run_chain(&germ, &chain, DEFAULT_TRUNCATION).unwrap();
        let straight = run_chain(
            &quartet("x^2 + y^3 + z^5 + y*u^4"),
            &e8_chain(),
            DEFAULT_TRUNCATION,
        )
        .unwrap();
        assert_eq!(
            run.discrepancy_table().unwrap(),
            straight.discrepancy_table().unwrap()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Any positive weight on the node either fails validation with a
        /// structured error or yields a chart germ that revalidates (the
        /// multiply-back identity is checked inside `blowup_chart`).
        #[test]
        fn random_weights_give_valid_charts_or_clean_errors(
            b in proptest::array::uniform4(1u32..=6),
            chart in 0usize..4,
        ) {
            let node = quartet("x*y + z^2 + u^2");
            let weight = BlowupWeight::new(1, b.to_vec()).unwrap();
            let name = QUARTET[chart];
            match blowup_chart(&node, &weight, name) {
                Ok(result) => {
                    prop_assert_eq!(
                        result.multiplicities[0].clone(),
                        weight.order(&node.equations()[0]).unwrap()
                    );
                    prop_assert!(result.germ.equations()[0].constant_term().is_zero());
                }
                Err(BlowupError::NotPrimitive { .. })
                | Err(BlowupError::UnitTransform { .. })
                | Err(BlowupError::Germ(_)) => {}
                Err(other) => prop_assert!(false, "unexpected error: {}", other),
            }
        }
    }
}
