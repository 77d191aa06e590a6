//! Milnor-dimension oracle.
//!
//! For a polynomial `f` vanishing at the origin, the oracle computes
//! `dim k[x]/(J + m^(D+1))` where `J` is the Jacobian ideal, by building a
//! degree-graded echelon of the products `m * df/dx_i` modulo large primes.
//! The dimension is monotone nondecreasing in `D`; once every monomial of
//! some degree `d` is a pivot of the echelon, the dimension can never grow
//! again, so the oracle reports the stabilized value (the Milnor number for
//! an isolated singularity, 0 for a smooth point). If no degree completes
//! before the bound, the outcome is `Unstable`, the signature of a
//! non-isolated singularity within the probed range.
//!
//! Ranks are taken modulo two independent 31-bit primes that must agree
//! (with escalation to further primes on a mismatch), which keeps the
//! computation exact in practice while avoiding rational blow-up.

use std::collections::HashMap;

use crate::linalg::{mod_inverse, rational_mod_p};
use crate::poly::{ExponentVector, Polynomial};

/// Primes just below 2^31 used for modular rank computations.
const PRIMES: [u64; 5] = [
    2_147_483_629,
    2_147_483_587,
    2_147_483_579,
    2_147_483_563,
    2_147_483_549,
];

/// Outcome of the oracle: a stabilized dimension or failure to stabilize
/// within the degree bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilnorOutcome {
    Stable(u32),
    Unstable,
}

/// Compute the Milnor dimension of `f` with truncation degree at most
/// `degree_bound`.
///
/// `f` must vanish at the origin. A smooth point yields `Stable(0)`.
pub fn milnor_number(f: &Polynomial, degree_bound: u32) -> MilnorOutcome {
    // Start with a small working degree and enlarge only when needed: the
    // echelon width grows quickly with the truncation degree.
    let first = degree_bound.min(12);
    match milnor_with_window(f, first) {
        MilnorOutcome::Stable(mu) => MilnorOutcome::Stable(mu),
        MilnorOutcome::Unstable if degree_bound > first => {
            milnor_with_window(f, degree_bound)
        }
        other => other,
    }
}

fn milnor_with_window(f: &Polynomial, window: u32) -> MilnorOutcome {
    let mut outcomes: Vec<MilnorOutcome> = Vec::new();
    for &p in PRIMES.iter() {
        let outcome = match milnor_mod_p(f, window, p) {
            Some(o) => o,
            None => continue, // a denominator vanished mod p
        };
        if outcomes.contains(&outcome) {
            return outcome;
        }
        outcomes.push(outcome);
    }
    // No two primes agreed; report the most conservative reading.
    outcomes.into_iter().last().unwrap_or(MilnorOutcome::Unstable)
}

/// Enumerate the exponent vectors of total degree <= bound in the canonical
/// graded order.
fn monomials_up_to(nvars: usize, bound: u32) -> Vec<ExponentVector> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    fn rec(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<ExponentVector>) {
        if pos == current.len() {
            out.push(ExponentVector::new(current.clone()));
            return;
        }
        for e in 0..=remaining {
            current[pos] = e;
            rec(current, pos + 1, remaining - e, out);
            current[pos] = 0;
        }
    }
    rec(&mut current, 0, bound, &mut out);
    out.sort();
    out
}

fn milnor_mod_p(f: &Polynomial, window: u32, p: u64) -> Option<MilnorOutcome> {
    let n = f.vars().len();
    debug_assert!(
        f.constant_term() == num_traits::Zero::zero(),
        "oracle input must vanish at the origin"
    );

    let derivatives: Vec<Polynomial> = (0..n)
        .map(|i| f.derivative(i))
        .filter(|d| !d.is_zero())
        .collect();
    if derivatives.is_empty() {
        // f is a nonzero constant multiple of nothing differentiable; with
        // f vanishing at the origin this cannot happen for nonzero f.
        return Some(MilnorOutcome::Unstable);
    }

    let monomials = monomials_up_to(n, window);
    let mut index: HashMap<ExponentVector, usize> = HashMap::with_capacity(monomials.len());
    for (i, ev) in monomials.iter().enumerate() {
        index.insert(ev.clone(), i);
    }
    let ncols = monomials.len();
    // Column index ranges per degree, exploiting the graded monomial order.
    let mut degree_start = vec![0usize; (window + 2) as usize];
    for (i, ev) in monomials.iter().enumerate() {
        let d = ev.degree() as usize;
        if degree_start[d + 1] <= i {
            degree_start[d + 1] = i + 1;
        }
    }
    for d in 1..degree_start.len() {
        if degree_start[d] < degree_start[d - 1] {
            degree_start[d] = degree_start[d - 1];
        }
    }

    // Reduce each derivative to (exponent vector, coefficient mod p) pairs.
    let mut deriv_rows: Vec<(u32, Vec<(ExponentVector, u64)>)> = Vec::new();
    for d in &derivatives {
        let mult = d.multiplicity().expect("nonzero");
        let mut terms = Vec::with_capacity(d.num_terms());
        for (ev, c) in d.terms() {
            let v = rational_mod_p(c, p)?;
            if v != 0 {
                terms.push((ev.clone(), v));
            }
        }
        if terms.is_empty() {
            // The whole derivative vanished mod p; this prime is unusable.
            return None;
        }
        deriv_rows.push((mult, terms));
    }

    // Dense echelon keyed by pivot column.
    let mut echelon: Vec<Vec<u64>> = Vec::new();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut pivots_in_degree = vec![0usize; (window + 1) as usize];

    let reduce_and_insert = |row: &mut Vec<u64>,
                                 echelon: &mut Vec<Vec<u64>>,
                                 pivot_of_col: &mut Vec<Option<usize>>,
                                 pivots_in_degree: &mut Vec<usize>,
                                 monomials: &[ExponentVector]| {
        let mut col = 0;
        while col < ncols {
            if row[col] == 0 {
                col += 1;
                continue;
            }
            match pivot_of_col[col] {
                Some(r) => {
                    let factor = row[col];
                    let pivot_row = &echelon[r];
                    for c in col..ncols {
                        if pivot_row[c] != 0 {
                            let sub = factor as u128 * pivot_row[c] as u128 % p as u128;
                            row[c] = ((row[c] as u128 + p as u128 - sub) % p as u128) as u64;
                        }
                    }
                    debug_assert_eq!(row[col], 0);
                }
                None => {
                    // Normalize and store.
                    let inv = mod_inverse(row[col], p);
                    for c in col..ncols {
                        if row[c] != 0 {
                            row[c] = (row[c] as u128 * inv as u128 % p as u128) as u64;
                        }
                    }
                    pivot_of_col[col] = Some(echelon.len());
                    pivots_in_degree[monomials[col].degree() as usize] += 1;
                    echelon.push(std::mem::take(row));
                    return;
                }
            }
        }
        // Row reduced to zero: dependent.
    };

    for d in 0..=window {
        // Insert every product m * derivative whose initial degree is d.
        for (mult, terms) in &deriv_rows {
            if d < *mult {
                continue;
            }
            let mdeg = d - *mult;
            let lo = degree_start[mdeg as usize];
            let hi = degree_start[mdeg as usize + 1];
            for m in &monomials[lo..hi] {
                let mut row = vec![0u64; ncols];
                let mut nonempty = false;
                for (ev, v) in terms {
                    let shifted = ev.mul(m);
                    if shifted.degree() <= window {
                        let idx = index[&shifted];
                        row[idx] = (row[idx] + v) % p;
                        nonempty = true;
                    }
                }
                if nonempty {
                    reduce_and_insert(
                        &mut row,
                        &mut echelon,
                        &mut pivot_of_col,
                        &mut pivots_in_degree,
                        &monomials,
                    );
                }
            }
        }
        // If every monomial of degree d is a pivot, the ideal contains the
        // d-th power of the maximal ideal and the quotient dimension is
        // frozen: count the nonpivot monomials below degree d.
        let in_degree = degree_start[d as usize + 1] - degree_start[d as usize];
        if pivots_in_degree[d as usize] == in_degree {
            let mut mu = 0u32;
            for e in 0..d {
                let count = degree_start[e as usize + 1] - degree_start[e as usize];
                mu += (count - pivots_in_degree[e as usize]) as u32;
            }
            return Some(MilnorOutcome::Stable(mu));
        }
    }
    Some(MilnorOutcome::Unstable)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly3(text: &str) -> Polynomial {
        Polynomial::parse(text, &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn a_series_milnor_numbers() {
        for n in 1..=6u32 {
            let f = poly3(&format!("x^2 + y^2 + z^{}", n + 1));
            assert_eq!(
                milnor_number(&f, 16),
                MilnorOutcome::Stable(n),
                "A_{} Milnor number",
                n
            );
        }
    }

    #[test]
    fn e6_milnor_number() {
        assert_eq!(milnor_number(&poly3("x^2 + y^3 + z^4"), 16), MilnorOutcome::Stable(6));
    }

    #[test]
    fn d_and_e_series() {
        assert_eq!(milnor_number(&poly3("x^2 + y^2*z + z^3"), 16), MilnorOutcome::Stable(4));
        assert_eq!(milnor_number(&poly3("x^2 + y^2*z + z^7"), 18), MilnorOutcome::Stable(8));
        assert_eq!(milnor_number(&poly3("x^2 + y^3 + y*z^3"), 16), MilnorOutcome::Stable(7));
        assert_eq!(milnor_number(&poly3("x^2 + y^3 + z^5"), 16), MilnorOutcome::Stable(8));
    }

    #[test]
    fn non_isolated_singularity_is_unstable() {
        assert_eq!(milnor_number(&poly3("x^2 + y^2*z"), 14), MilnorOutcome::Unstable);
    }

    #[test]
    fn smooth_points_have_dimension_zero() {
        assert_eq!(milnor_number(&poly3("x + y^2"), 10), MilnorOutcome::Stable(0));
    }

    #[test]
    fn four_variable_threefold_points() {
        let f = Polynomial::parse("x^2 + y^3 + z^5 + u^7", &["x", "y", "z", "u"]).unwrap();
        // mu = 1*2*4*6 = 48 for this Brieskorn form.
        assert_eq!(milnor_number(&f, 20), MilnorOutcome::Stable(48));
        let odp = Polynomial::parse("x^2 + y^2 + z^2 + u^2", &["x", "y", "z", "u"]).unwrap();
        assert_eq!(milnor_number(&odp, 10), MilnorOutcome::Stable(1));
    }

    #[test]
    fn plane_curve_milnor_numbers() {
        let g = Polynomial::parse("z^2 + u^3", &["z", "u"]).unwrap();
        assert_eq!(milnor_number(&g, 10), MilnorOutcome::Stable(2));
        let sq = Polynomial::parse("z^2 + 2*z*u^2 + u^4", &["z", "u"]).unwrap();
        assert_eq!(milnor_number(&sq, 12), MilnorOutcome::Unstable);
    }

    #[test]
    fn invariant_under_linear_change() {
        // E6 composed with an invertible linear substitution.
        let f = poly3("x^2 + y^3 + z^4");
        let images = vec![
            poly3("x + y - z"),
            poly3("y + 2*z"),
            poly3("x + z"),
        ];
        let g = f.substitute(&images).unwrap();
        assert_eq!(milnor_number(&g, 16), MilnorOutcome::Stable(6));
    }
}
