//! Catalog of minimal-discrepancy weighted blow-ups per singularity class.
//!
//! Each terminal class carries a finite family of candidate weights, written
//! in the coordinates of the classifier's presentation (for `cD` germs, of
//! the doubled-line normal form). Candidates are generated symbolically and
//! then pushed through a uniform filter: the weight must validate on the
//! centre, realize discrepancy exactly `1/r` (an integer at least `2` for
//! the auxiliary Gorenstein contractions), cut an irreducible exceptional
//! divisor (weighted initial form neither a single monomial nor divisible
//! by a variable), and produce charts that are units or classify as
//! terminal. A candidate whose chart cannot be certified terminal is
//! discarded; an empty list after filtering is reported as a
//! [`CatalogGap`](InvariantError::CatalogGap) because every terminal
//! singular point admits such a blow-up, so emptiness means the catalog is
//! missing a family.
//!
//! The families are toric over the rationals: weights act on the given
//! coordinates by monomial substitution. Constructions that require
//! conjugate coordinates (asymmetric weights on an irrational square pair,
//! odd-multiplicity diagonal pairs) have no candidates here and surface as
//! catalog gaps.

use crate::blowup::{blowup_chart, discrepancy, BlowupError, BlowupWeight};
use crate::classify::{terminal_classify, SingularityClass, SingularityKind};
use crate::germ::normal_form::normal_form_cd;
use crate::germ::Germ;
use crate::invariants::{InvariantError, WMorphism};
use crate::poly::{frac, rat, Polynomial};
use crate::DEFAULT_TRUNCATION;
use num_rational::BigRational;
use num_traits::One;

/// Candidate numerator patterns for `cE` points, listed over the role order
/// (square variable, cube variable, remaining pair). The remaining pair is
/// tried in both orders when the two entries differ.
const CE_NUMERATORS: [[u32; 4]; 15] = [
    [2, 2, 1, 1],
    [3, 2, 1, 1],
    [3, 2, 2, 1],
    [4, 3, 2, 1],
    [5, 3, 2, 1],
    [5, 4, 2, 1],
    [6, 4, 3, 1],
    [7, 5, 3, 1],
    [8, 5, 3, 1],
    [9, 6, 4, 1],
    [10, 7, 4, 1],
    [12, 8, 5, 1],
    [15, 10, 6, 1],
    [4, 2, 1, 1],
    [3, 3, 1, 1],
];

/// Largest value of the free parameter in the one-parameter weight
/// families. Filters cut the families down to the finitely many weights
/// that match the germ, so the bound only needs to dominate the orders
/// reachable at the default truncation.
const FAMILY_BOUND: u32 = 13;

/// An unfiltered candidate: a numerator pattern over a centre germ.
struct Candidate {
    centre: Germ,
    numerators: Vec<u32>,
    provenance: String,
}

impl Candidate {
    fn new(centre: &Germ, numerators: Vec<u32>, provenance: String) -> Candidate {
        Candidate {
            centre: centre.clone(),
            numerators,
            provenance,
        }
    }
}

/// Enumerate the w-morphisms over a germ: the weighted blow-ups from the
/// catalog with discrepancy exactly `1/r`, where `r` is the Cartier index.
/// Smooth germs get the empty list; singular germs whose class has no
/// surviving candidate get a catalog gap error.
pub fn enumerate_w_morphisms(g: &Germ) -> Result<Vec<WMorphism>, InvariantError> {
    let class = terminal_classify(g)?;
    enumerate_for_class(&class)
}

pub(crate) fn enumerate_for_class(
    class: &SingularityClass,
) -> Result<Vec<WMorphism>, InvariantError> {
    if matches!(class.kind, SingularityKind::Smooth) {
        return Ok(Vec::new());
    }
    let index = class.presentation.index();
    let expected = frac(1, i64::from(index));
    let kept = filter_candidates(minimal_candidates(class)?, Some(&expected));
    if kept.is_empty() {
        return Err(InvariantError::CatalogGap {
            class: class.kind.label(),
        });
    }
    Ok(kept)
}

/// Enumerate every divisorial contraction in the catalog over a Gorenstein
/// germ: the discrepancy-one blow-ups together with the higher-discrepancy
/// families. Used by the elephant height, which must see all exceptional
/// divisors over a Gorenstein point, not only the minimal ones.
pub fn gorenstein_contractions(g: &Germ) -> Result<Vec<WMorphism>, InvariantError> {
    let class = terminal_classify(g)?;
    gorenstein_contractions_for_class(&class)
}

pub(crate) fn gorenstein_contractions_for_class(
    class: &SingularityClass,
) -> Result<Vec<WMorphism>, InvariantError> {
    if matches!(class.kind, SingularityKind::Smooth) {
        return Ok(Vec::new());
    }
    let one = BigRational::one();
    let mut kept = filter_candidates(minimal_candidates(class)?, Some(&one));
    kept.extend(filter_candidates(deep_candidates(class)?, None));
    if kept.is_empty() {
        return Err(InvariantError::CatalogGap {
            class: class.kind.label(),
        });
    }
    Ok(kept)
}

/// Candidates for the discrepancy-`1/r` families.
fn minimal_candidates(class: &SingularityClass) -> Result<Vec<Candidate>, InvariantError> {
    let p = &class.presentation;
    Ok(match &class.kind {
        SingularityKind::Smooth => Vec::new(),
        SingularityKind::CyclicQuotient { .. } => quotient_candidates(p),
        SingularityKind::CA { .. } => ca_candidates(p),
        SingularityKind::CAQuotient { r } => ca_quotient_candidates(p, *r),
        SingularityKind::CAxQuotient { r } => cax_candidates(p, *r),
        SingularityKind::CD { .. } => cd_candidates(&cd_centre(class)?),
        SingularityKind::CDQuotient { r } => cd_quotient_candidates(p, *r),
        SingularityKind::CE { .. } => ce_candidates(p, &CE_NUMERATORS, "ce"),
        SingularityKind::CEQuotient => ce_candidates(p, &[[3, 2, 3, 1]], "ce/2"),
    })
}

/// Candidates for the integer-discrepancy (at least two) families over
/// Gorenstein points.
fn deep_candidates(class: &SingularityClass) -> Result<Vec<Candidate>, InvariantError> {
    let p = &class.presentation;
    Ok(match &class.kind {
        SingularityKind::CA { n: 2 } => deep_ca2_candidates(p),
        SingularityKind::CD { .. } => deep_cd_candidates(&cd_centre(class)?),
        SingularityKind::CE { n: 6 } => ce_candidates(p, &[[3, 3, 2, 1]], "h:ce6"),
        SingularityKind::CE { n: 7 } | SingularityKind::CE { n: 8 } => {
            ce_candidates(p, &[[7, 5, 3, 2]], "h:ce")
        }
        _ => Vec::new(),
    })
}

/// Run the uniform filters. `expected` pins the discrepancy exactly; `None`
/// accepts any integer discrepancy of at least two.
fn filter_candidates(cands: Vec<Candidate>, expected: Option<&BigRational>) -> Vec<WMorphism> {
    let mut out: Vec<WMorphism> = Vec::new();
    'cand: for c in cands {
        let Ok(weight) = BlowupWeight::new(c.centre.index(), c.numerators.clone()) else {
            continue;
        };
        if weight.validate(&c.centre).is_err() {
            continue;
        }
        let disc = match discrepancy(&c.centre, &weight) {
            Ok(d) => d,
            Err(_) => continue,
        };
        match expected {
            Some(e) => {
                if &disc != e {
                    continue;
                }
            }
            None => {
                if !disc.is_integer() || disc < rat(2) {
                    continue;
                }
            }
        }
        let fractions = weight.fractions();
        for eq in c.centre.equations() {
            let init = eq.weighted_initial_form(&fractions);
            if init.num_terms() < 2 {
                continue 'cand;
            }
            if (0..c.centre.ambient_dim()).any(|v| init.min_exponent(v).unwrap_or(0) > 0) {
                continue 'cand;
            }
            if initial_splits(&init, c.centre.ambient_dim()) {
                continue 'cand;
            }
        }
        for var in c.centre.vars().to_vec() {
            match blowup_chart(&c.centre, &weight, &var) {
                Ok(res) => {
                    if terminal_classify(&res.germ).is_err() {
                        continue 'cand;
                    }
                }
                Err(BlowupError::UnitTransform { .. }) => {}
                Err(_) => continue 'cand,
            }
        }
        if out
            .iter()
            .any(|w| w.centre == c.centre && w.weight.numerators() == weight.numerators())
        {
            continue;
        }
        out.push(WMorphism {
            weight,
            centre: c.centre,
            provenance: c.provenance,
            discrepancy: disc,
        });
    }
    out
}

/// Detect initial forms that factor over the complex numbers even though
/// they look fine over the rationals. A form `c v^2 + R` with `R` free of
/// `v` splits exactly when `R` is a constant multiple of a perfect square
/// (the two conjugate factors are `sqrt(c) v ± sqrt(-R)`), and then the
/// exceptional divisor breaks into two components, so the weight does not
/// define a divisorial contraction.
fn initial_splits(init: &Polynomial, n: usize) -> bool {
    for v in 0..n {
        if init.degree_in(v) != Some(2) {
            continue;
        }
        let quad = init.coefficient_of(v, 2);
        let lin = init.coefficient_of(v, 1);
        let rest = init.coefficient_of(v, 0);
        if quad.total_degree() == Some(0) && lin.is_zero() && !rest.is_zero() {
            return constant_multiple_of_square(&rest);
        }
    }
    false
}

/// Greedy square root from the lowest term: `p` is a constant multiple of
/// `g^2` exactly when the reconstruction closes with zero remainder.
fn constant_multiple_of_square(p: &Polynomial) -> bool {
    let Some((lt_ev, lt_c)) = p.terms().next() else {
        return false;
    };
    let exps: Vec<u32> = lt_ev.exponents().to_vec();
    if exps.iter().any(|&e| e % 2 != 0) {
        return false;
    }
    let refs: Vec<&str> = p.vars().iter().map(|s| s.as_str()).collect();
    let half: Vec<u32> = exps.iter().map(|&e| e / 2).collect();
    let root_ev = crate::poly::ExponentVector::new(half);
    let q = p.scale(&lt_c.clone().recip());
    let mut g = Polynomial::from_terms(&refs, vec![(root_ev.clone(), rat(1))]);
    for _ in 0..(4 * p.num_terms() + 8) {
        let r = q.sub(&g.mul(&g));
        let Some((rev, rc)) = r.terms().next() else {
            return true;
        };
        let mut next = Vec::with_capacity(refs.len());
        for (i, &e) in rev.exponents().iter().enumerate() {
            let base = root_ev.exponent(i);
            if e < base {
                return false;
            }
            next.push(e - base);
        }
        let coeff = rc / rat(2);
        g = g.add(&Polynomial::from_terms(
            &refs,
            vec![(crate::poly::ExponentVector::new(next), coeff)],
        ));
    }
    false
}

/// Weights over a cyclic quotient point: the multiples `k * chars mod r`
/// that are everywhere nonzero and sum to `r + 1`.
fn quotient_candidates(p: &Germ) -> Vec<Candidate> {
    let action = p.action();
    let r = action.index();
    let mut out = Vec::new();
    for k in 1..r {
        let nums: Vec<u32> = (0..p.ambient_dim())
            .map(|i| (u64::from(k) * u64::from(action.character(i)) % u64::from(r)) as u32)
            .collect();
        if nums.iter().all(|&n| n != 0) && nums.iter().sum::<u32>() == r + 1 {
            out.push(Candidate::new(p, nums, format!("quotient:k={k}")));
        }
    }
    out
}

/// The variable pairs a `cA`-type quadratic part offers: cross monomials
/// give split pairs, pure squares give diagonal pairs.
fn quadratic_pairs(e: &Polynomial) -> (Vec<(usize, usize)>, Vec<usize>) {
    let q = e.homogeneous_part(2);
    let mut cross = Vec::new();
    let mut squares = Vec::new();
    for (ev, _) in q.terms() {
        let support: Vec<usize> = (0..ev.len()).filter(|&i| ev.exponent(i) > 0).collect();
        match support.as_slice() {
            [i, j] if ev.exponent(*i) == 1 && ev.exponent(*j) == 1 => cross.push((*i, *j)),
            [i] if ev.exponent(*i) == 2 => squares.push(*i),
            _ => {}
        }
    }
    (cross, squares)
}

/// Least total degree among terms supported away from the pair `(i, j)`,
/// weighting variable `z_scale[v]` units per exponent. `None` when every
/// term touches the pair.
fn residual_order(e: &Polynomial, i: usize, j: usize, scale: &[u32]) -> Option<u32> {
    let mut best: Option<u32> = None;
    for (ev, _) in e.terms() {
        if ev.exponent(i) > 0 || ev.exponent(j) > 0 {
            continue;
        }
        let deg: u32 = (0..ev.len()).map(|v| ev.exponent(v) * scale[v]).sum();
        best = Some(best.map_or(deg, |b| b.min(deg)));
    }
    best
}

fn ones(n: usize) -> Vec<u32> {
    vec![1; n]
}

/// Gorenstein `cA` points: split pairs get `(b, m - b)` over the residual
/// order `m`; diagonal pairs only support the symmetric weight, so the
/// whole symmetric family is offered and the filters keep the match.
fn ca_candidates(p: &Germ) -> Vec<Candidate> {
    let e = &p.equations()[0];
    let n = p.ambient_dim();
    let (cross, squares) = quadratic_pairs(e);
    let mut out = Vec::new();
    for &(i, j) in &cross {
        let Some(m) = residual_order(e, i, j, &ones(n)) else {
            continue;
        };
        for b in 1..m {
            let mut nums = ones(n);
            nums[i] = b;
            nums[j] = m - b;
            out.push(Candidate::new(p, nums, format!("ca:b={b}")));
        }
    }
    if cross.is_empty() {
        for (a, &i) in squares.iter().enumerate() {
            for &j in &squares[a + 1..] {
                for b in 1..=FAMILY_BOUND {
                    let mut nums = ones(n);
                    nums[i] = b;
                    nums[j] = b;
                    out.push(Candidate::new(p, nums, format!("ca:diag:b={b}")));
                }
            }
        }
    }
    out
}

/// Deep contractions over a `cA_2` point: the pair carries `(4, 3)` and the
/// remaining variables `(2, 1)`, in every assignment.
fn deep_ca2_candidates(p: &Germ) -> Vec<Candidate> {
    let e = &p.equations()[0];
    let n = p.ambient_dim();
    if n != 4 {
        return Vec::new();
    }
    let (cross, squares) = quadratic_pairs(e);
    let mut pairs = cross;
    if pairs.is_empty() {
        for (a, &i) in squares.iter().enumerate() {
            for &j in &squares[a + 1..] {
                pairs.push((i, j));
            }
        }
    }
    let mut out = Vec::new();
    for &(i, j) in &pairs {
        let rest: Vec<usize> = (0..n).filter(|v| *v != i && *v != j).collect();
        for (pi, pj) in [(4, 3), (3, 4)] {
            for (ri, rj) in [(2, 1), (1, 2)] {
                let mut nums = ones(n);
                nums[i] = pi;
                nums[j] = pj;
                nums[rest[0]] = ri;
                nums[rest[1]] = rj;
                out.push(Candidate::new(p, nums, "h:ca2:(4,3,2,1)".to_string()));
            }
        }
    }
    out
}

fn modinv(a: u32, r: u32) -> Option<u32> {
    (1..r).find(|&k| (u64::from(a) * u64::from(k)) % u64::from(r) == 1)
}

/// `cA/r` points: the cross pair carries `(b, M - b)` with `b` running over
/// a congruence class mod `r`, the coprime-character variable weight `1/r`,
/// and the invariant variable weight `1`.
fn ca_quotient_candidates(p: &Germ, r: u32) -> Vec<Candidate> {
    let e = &p.equations()[0];
    let n = p.ambient_dim();
    let action = p.action();
    let (cross, _) = quadratic_pairs(e);
    let mut out = Vec::new();
    for &(i, j) in &cross {
        let rest: Vec<usize> = (0..n).filter(|v| *v != i && *v != j).collect();
        if rest.len() != 2 {
            continue;
        }
        for (z, u) in [(rest[0], rest[1]), (rest[1], rest[0])] {
            if action.character(u) != 0 {
                continue;
            }
            let Some(k) = modinv(action.character(z), r) else {
                continue;
            };
            let mut scale = ones(n);
            scale[u] = r;
            let Some(m) = residual_order(e, i, j, &scale) else {
                continue;
            };
            let mut b = (u64::from(k) * u64::from(action.character(i)) % u64::from(r)) as u32;
            if b == 0 {
                b = r;
            }
            while b < m {
                let mut nums = ones(n);
                nums[i] = b;
                nums[j] = m - b;
                nums[z] = 1;
                nums[u] = r;
                out.push(Candidate::new(p, nums, format!("ca/{r}:b={b}")));
                b += r;
            }
        }
    }
    out
}

/// `cAx/2` and `cAx/4` points: fixed numerator patterns over the square
/// variables, selected by character.
fn cax_candidates(p: &Germ, r: u32) -> Vec<Candidate> {
    let e = &p.equations()[0];
    let n = p.ambient_dim();
    let action = p.action();
    let (_, squares) = quadratic_pairs(e);
    let mut out = Vec::new();
    if r == 2 {
        let s0: Vec<usize> = squares
            .iter()
            .copied()
            .filter(|&v| action.character(v) == 0)
            .collect();
        let s1: Vec<usize> = squares
            .iter()
            .copied()
            .filter(|&v| action.character(v) == 1)
            .collect();
        for &a in &s0 {
            for &b in &s1 {
                let mut nums = ones(n);
                nums[a] = 2;
                nums[b] = 3;
                out.push(Candidate::new(p, nums, "cax/2".to_string()));
            }
        }
    } else if r == 4 {
        let odd: Vec<usize> = squares
            .iter()
            .copied()
            .filter(|&v| action.character(v) % 2 == 1)
            .collect();
        for &a in &odd {
            for &b in &odd {
                if a == b {
                    continue;
                }
                let rest: Vec<usize> = (0..n).filter(|v| *v != a && *v != b).collect();
                if rest.len() != 2 {
                    continue;
                }
                for (c, d) in [(rest[0], rest[1]), (rest[1], rest[0])] {
                    if action.character(c) != 2 || action.character(d) % 2 != 1 {
                        continue;
                    }
                    let mut nums = ones(n);
                    nums[a] = 3;
                    nums[b] = 5;
                    nums[c] = 2;
                    nums[d] = 1;
                    out.push(Candidate::new(p, nums, "cax/4".to_string()));
                }
            }
        }
    }
    out
}

/// Doubled-line normal form of a Gorenstein `cD` germ: coordinates ordered
/// (square, line, line partner, residual variable).
fn cd_centre(class: &SingularityClass) -> Result<Germ, InvariantError> {
    normal_form_cd(&class.presentation, DEFAULT_TRUNCATION)
        .map(|nf| nf.germ)
        .map_err(|e| InvariantError::UnsupportedLocus {
            detail: format!("cD normal form failed: {e}"),
        })
}

/// Gorenstein `cD` points over the normal form `x^2 + y^2 z + ...`: three
/// one-parameter families.
fn cd_candidates(centre: &Germ) -> Vec<Candidate> {
    let mut out = Vec::new();
    for b in 1..=FAMILY_BOUND {
        out.push(Candidate::new(
            centre,
            vec![b, b, 1, 1],
            format!("cd:(b,b,1,1):b={b}"),
        ));
        out.push(Candidate::new(
            centre,
            vec![b + 1, b, 1, 1],
            format!("cd:(b+1,b,1,1):b={b}"),
        ));
        if b >= 2 {
            out.push(Candidate::new(
                centre,
                vec![b, b - 1, 2, 1],
                format!("cd:(b,b-1,2,1):b={b}"),
            ));
        }
    }
    out
}

/// Deep contractions over Gorenstein `cD` points, in normal-form order.
fn deep_cd_candidates(centre: &Germ) -> Vec<Candidate> {
    let mut out = Vec::new();
    for b in 1..=FAMILY_BOUND {
        let m = 2 * b + 1;
        let mut a = 3;
        while a * 2 <= m {
            if m % a == 0 {
                out.push(Candidate::new(
                    centre,
                    vec![b + 1, b, 1, a],
                    format!("h:cd:(b+1,b,1,a):b={b},a={a}"),
                ));
            }
            a += 2;
        }
        if b >= 2 {
            out.push(Candidate::new(
                centre,
                vec![b, b, 1, 2],
                format!("h:cd:(b,b,1,2):b={b}"),
            ));
        }
    }
    out.push(Candidate::new(
        centre,
        vec![3, 3, 2, 1],
        "h:cd:(3,3,2,1)".to_string(),
    ));
    out.push(Candidate::new(
        centre,
        vec![3, 4, 1, 2],
        "h:cd:(3,4,1,2)".to_string(),
    ));
    out
}

/// `cD/2` points: the square variable carries `b + 2`, the line `b`, the
/// line partner `2` and the residual variable `1`, for odd `b`.
fn cd_quotient_2_candidates(p: &Germ) -> Vec<Candidate> {
    let e = &p.equations()[0];
    let n = p.ambient_dim();
    let (_, squares) = quadratic_pairs(e);
    let cubic = e.homogeneous_part(3);
    let mut out = Vec::new();
    for &sx in &squares {
        for (ev, _) in cubic.terms() {
            let support: Vec<usize> = (0..ev.len()).filter(|&i| ev.exponent(i) > 0).collect();
            let [y, w] = support.as_slice() else {
                continue;
            };
            let (y, w) = if ev.exponent(*y) == 2 && ev.exponent(*w) == 1 {
                (*y, *w)
            } else if ev.exponent(*y) == 1 && ev.exponent(*w) == 2 {
                (*w, *y)
            } else {
                continue;
            };
            if y == sx || w == sx {
                continue;
            }
            let Some(other) = (0..n).find(|v| *v != sx && *v != y && *v != w) else {
                continue;
            };
            let mut b = 1;
            while b <= FAMILY_BOUND {
                let mut nums = ones(n);
                nums[sx] = b + 2;
                nums[y] = b;
                nums[w] = 2;
                nums[other] = 1;
                out.push(Candidate::new(p, nums, format!("cd/2:b={b}")));
                b += 2;
            }
        }
    }
    out
}

/// `cD/3` points: characters normalize to one invariant variable, one of
/// character two and two of character one; two numerator patterns apply,
/// with the character-one pair tried both ways.
fn cd_quotient_3_candidates(p: &Germ) -> Vec<Candidate> {
    let n = p.ambient_dim();
    let action = p.action();
    let mut chars: Vec<u32> = (0..n).map(|i| action.character(i)).collect();
    if chars.iter().filter(|&&c| c == 1).count() != 2 {
        chars = chars.iter().map(|&c| (2 * c) % 3).collect();
        if chars.iter().filter(|&&c| c == 1).count() != 2 {
            return Vec::new();
        }
    }
    let Some(v0) = (0..n).find(|&i| chars[i] == 0) else {
        return Vec::new();
    };
    let Some(v2) = (0..n).find(|&i| chars[i] == 2) else {
        return Vec::new();
    };
    let wns: Vec<usize> = (0..n).filter(|&i| chars[i] == 1).collect();
    let mut out = Vec::new();
    for (head, tail, label) in [(3, 2, "cd/3:a"), (6, 5, "cd/3:b")] {
        for (wa, wb) in [(wns[0], wns[1]), (wns[1], wns[0])] {
            let mut nums = ones(n);
            nums[v0] = head;
            nums[v2] = tail;
            nums[wa] = 4;
            nums[wb] = 1;
            out.push(Candidate::new(p, nums, label.to_string()));
        }
    }
    out
}

fn cd_quotient_candidates(p: &Germ, r: u32) -> Vec<Candidate> {
    match r {
        2 => cd_quotient_2_candidates(p),
        3 => cd_quotient_3_candidates(p),
        _ => Vec::new(),
    }
}

/// `cE`-type points (and `cE/2`): numerator patterns over the role order
/// (square variable, cube variable, remaining pair both ways).
fn ce_candidates(p: &Germ, patterns: &[[u32; 4]], label: &str) -> Vec<Candidate> {
    let e = &p.equations()[0];
    let n = p.ambient_dim();
    if n != 4 {
        return Vec::new();
    }
    let (_, squares) = quadratic_pairs(e);
    let cubic = e.homogeneous_part(3);
    let cubes: Vec<usize> = (0..n)
        .filter(|&v| {
            cubic.terms().any(|(ev, _)| {
                ev.exponent(v) == 3 && (0..n).all(|w| w == v || ev.exponent(w) == 0)
            })
        })
        .collect();
    let mut out = Vec::new();
    for &sq in &squares {
        for &cu in &cubes {
            if sq == cu {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|v| *v != sq && *v != cu).collect();
            for pat in patterns {
                let mut assignments = vec![(rest[0], rest[1])];
                if pat[2] != pat[3] {
                    assignments.push((rest[1], rest[0]));
                }
                for (za, ua) in assignments {
                    let mut nums = ones(n);
                    nums[sq] = pat[0];
                    nums[cu] = pat[1];
                    nums[za] = pat[2];
                    nums[ua] = pat[3];
                    out.push(Candidate::new(
                        p,
                        nums,
                        format!("{label}:({},{},{},{})", pat[0], pat[1], pat[2], pat[3]),
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::CyclicAction;
    use crate::poly::Polynomial;

    fn hyper(vars: &[&str], r: u32, chars: &[i64], f: &str) -> Germ {
        let poly = Polynomial::parse(f, vars).unwrap();
        Germ::hypersurface(vars, CyclicAction::new(r, chars), poly).unwrap()
    }

    fn numerator_set(wms: &[WMorphism]) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = wms
            .iter()
            .map(|w| w.weight.numerators().to_vec())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn half_point_has_exactly_the_symmetric_blowup() {
        let g = Germ::quotient_point(2, &[1, 1, 1]).unwrap();
        let wms = enumerate_w_morphisms(&g).unwrap();
        assert_eq!(numerator_set(&wms), vec![vec![1, 1, 1]]);
        assert_eq!(wms[0].weight.denominator(), 2);
        // Brute force over all numerator triples in range confirms the
        // catalog's single answer: positivity, compatibility and the
        // discrepancy pin down (1,1,1)/2.
        let mut matches = Vec::new();
        for a in 1..=4u32 {
            for b in 1..=4u32 {
                for c in 1..=4u32 {
                    let w = BlowupWeight::new(2, vec![a, b, c]).unwrap();
                    if w.validate(&g).is_ok()
                        && discrepancy(&g, &w).map(|d| d == frac(1, 2)).unwrap_or(false)
                    {
                        matches.push(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(matches, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn third_point_enumerates_its_unique_weight() {
        let g = Germ::quotient_point(3, &[1, 2, 1]).unwrap();
        let wms = enumerate_w_morphisms(&g).unwrap();
        assert_eq!(numerator_set(&wms), vec![vec![1, 2, 1]]);
    }

    #[test]
    fn ordinary_double_point_family_is_symmetric() {
        let g = hyper(&["x", "y", "z", "u"], 1, &[0, 0, 0, 0], "x*y + z^3 + u^3");
        let wms = enumerate_w_morphisms(&g).unwrap();
        let nums = numerator_set(&wms);
        assert_eq!(nums, vec![vec![1, 2, 1, 1], vec![2, 1, 1, 1]]);
        for w in &wms {
            assert_eq!(w.discrepancy, rat(1));
        }
    }

    #[test]
    fn ca1_with_high_residual_power_has_one_weight() {
        let g = hyper(&["x", "y", "z", "u"], 1, &[0, 0, 0, 0], "x*y + z^2 + u^7");
        let wms = enumerate_w_morphisms(&g).unwrap();
        assert_eq!(numerator_set(&wms), vec![vec![1, 1, 1, 1]]);
    }

    #[test]
    fn ce6_representative_admits_only_the_low_weight() {
        let g = hyper(
            &["x", "y", "z", "u"],
            1,
            &[0, 0, 0, 0],
            "x^2 + y^3 + z^4 + z*u^3",
        );
        let wms = enumerate_w_morphisms(&g).unwrap();
        assert_eq!(numerator_set(&wms), vec![vec![2, 2, 1, 1]]);
    }

    #[test]
    fn ce8_representative_admits_only_its_cascade_start() {
        let g = hyper(
            &["x", "y", "z", "u"],
            1,
            &[0, 0, 0, 0],
            "x^2 + y^3 + z^5 + u^7",
        );
        let wms = enumerate_w_morphisms(&g).unwrap();
        assert_eq!(numerator_set(&wms), vec![vec![3, 2, 2, 1]]);
    }

    #[test]
    fn ca_quotient_family_steps_through_its_congruence_class() {
        // Index-two germ with residual order eight: admissible first
        // numerators run through the odd values below eight.
        let g = hyper(
            &["x", "y", "z", "u"],
            2,
            &[1, 1, 1, 0],
            "x*y + z^8 + z^6*u + u^8",
        );
        let wms = enumerate_w_morphisms(&g).unwrap();
        let mut firsts: Vec<u32> = wms.iter().map(|w| w.weight.numerators()[0]).collect();
        firsts.sort();
        firsts.dedup();
        assert_eq!(firsts, vec![1, 3, 5, 7]);
        for w in &wms {
            assert_eq!(w.discrepancy, frac(1, 2));
            assert_eq!(w.weight.numerators()[2], 1);
            assert_eq!(w.weight.numerators()[3], 2);
        }
    }

    #[test]
    fn odd_diagonal_pair_is_a_catalog_gap() {
        // Quadratic rank two without a rational cross term and odd residual
        // order: no toric weight exists over the rationals.
        let g = hyper(
            &["x", "y", "z", "u"],
            1,
            &[0, 0, 0, 0],
            "x^2 + y^2 + z^3 + z*u^4 + u^6",
        );
        match enumerate_w_morphisms(&g) {
            Err(InvariantError::CatalogGap { class }) => assert!(class.starts_with("cA")),
            other => panic!("expected a catalog gap, got {other:?}"),
        }
    }

    #[test]
    fn gorenstein_contractions_extend_the_minimal_list() {
        // Discrepancy-two contraction over a cD point alongside the
        // discrepancy-one families.
        let g = hyper(
            &["x", "y", "z", "u"],
            1,
            &[0, 0, 0, 0],
            "x^2 + y^2*u + z^3 + u^6",
        );
        let all = gorenstein_contractions(&g).unwrap();
        assert!(all.iter().any(|w| w.discrepancy == rat(1)));
        assert!(all.iter().any(|w| w.discrepancy == rat(2)));
    }

    #[test]
    fn smooth_germ_has_no_blowups() {
        let g = hyper(&["x", "y", "z", "u"], 1, &[0, 0, 0, 0], "u + x^2 + y^2");
        assert!(enumerate_w_morphisms(&g).unwrap().is_empty());
    }
}
