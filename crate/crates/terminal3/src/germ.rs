//! Germs of singularities: an ambient affine space with a cyclic quotient
//! action and at most two defining equations.
//!
//! A germ is the basic object everything else operates on. Hypersurface
//! germs have one equation, complete intersections two, and cyclic quotient
//! (or smooth) points none. Equations must be semi-invariant for the action
//! and vanish at the origin; the expected dimension (ambient minus number
//! of equations) is 3 for the singularities themselves and 2 for the
//! surface sections cut out of them.

pub mod normal_form;

use std::fmt;

use num_traits::Zero;

use crate::classify::milnor::{milnor_number, MilnorOutcome};
use crate::poly::{ExponentVector, PolyError, Polynomial, Rational};

/// A cyclic group action of index `r` on the ambient variables, acting on
/// the i-th variable by the `chars[i]`-th power of a fixed primitive r-th
/// root of unity. `r = 1` is the trivial action.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CyclicAction {
    r: u32,
    chars: Vec<u32>,
}

impl CyclicAction {
    pub fn new(r: u32, chars: &[i64]) -> Self {
        assert!(r >= 1, "group index must be positive");
        CyclicAction {
            r,
            chars: chars
                .iter()
                .map(|&c| (c.rem_euclid(r as i64)) as u32)
                .collect(),
        }
    }

    pub fn trivial(nvars: usize) -> Self {
        CyclicAction {
            r: 1,
            chars: vec![0; nvars],
        }
    }

    pub fn index(&self) -> u32 {
        self.r
    }

    pub fn is_trivial(&self) -> bool {
        self.r == 1
    }

    pub fn nvars(&self) -> usize {
        self.chars.len()
    }

    pub fn character(&self, var: usize) -> u32 {
        self.chars[var]
    }

    pub fn characters(&self) -> &[u32] {
        &self.chars
    }

    /// Character of a monomial: the weighted sum of variable characters.
    pub fn monomial_character(&self, ev: &ExponentVector) -> u32 {
        let mut acc: u64 = 0;
        for (e, c) in ev.exponents().iter().zip(self.chars.iter()) {
            acc = (acc + (*e as u64) * (*c as u64)) % self.r as u64;
        }
        acc as u32
    }

    /// The common character of all monomials of `p`, or the offending pair
    /// of monomials when they disagree. The zero polynomial is vacuously
    /// semi-invariant of character 0.
    pub fn semi_invariant_character(&self, p: &Polynomial) -> Result<u32, (String, u32, String, u32)> {
        let mut seen: Option<(String, u32)> = None;
        for (ev, _) in p.terms() {
            let c = self.monomial_character(ev);
            match &seen {
                None => {
                    seen = Some((monomial_string(p, ev), c));
                }
                Some((first, c0)) => {
                    if c != *c0 {
                        return Err((first.clone(), *c0, monomial_string(p, ev), c));
                    }
                }
            }
        }
        Ok(seen.map(|(_, c)| c).unwrap_or(0))
    }

    /// Remove the variable at `var` from the action.
    pub fn drop_var(&self, var: usize) -> CyclicAction {
        let mut chars = self.chars.clone();
        chars.remove(var);
        CyclicAction { r: self.r, chars }
    }

    /// Factor out the subgroup acting trivially: if some `d > 1` divides the
    /// index and every character, the action factors through index `r/d`.
    pub fn normalized(&self) -> CyclicAction {
        let mut d = self.r;
        for &c in &self.chars {
            d = gcd_u32(d, c);
            if d == 1 {
                return self.clone();
            }
        }
        CyclicAction {
            r: self.r / d,
            chars: self.chars.iter().map(|&c| c / d).collect(),
        }
    }
}

pub(crate) fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

fn monomial_string(p: &Polynomial, ev: &ExponentVector) -> String {
    let parts: Vec<String> = p
        .vars()
        .iter()
        .zip(ev.exponents())
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{}^{}", v, e) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for CyclicAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let chars: Vec<String> = self.chars.iter().map(|c| c.to_string()).collect();
        write!(f, "1/{}({})", self.r, chars.join(","))
    }
}

/// Errors from germ construction and manipulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GermError {
    /// An equation mixes monomials of different characters.
    Equivariance {
        equation: usize,
        monomial_a: String,
        character_a: u32,
        monomial_b: String,
        character_b: u32,
    },
    /// An equation has a nonzero constant term.
    NotVanishing { equation: usize },
    /// An equation is identically zero (possibly after truncation).
    ZeroEquation { equation: usize },
    /// Ambient dimension and equation count do not cut out a surface or
    /// 3-fold.
    DimensionMismatch { ambient: usize, equations: usize },
    /// The action's character list does not match the variable count.
    ActionArity { variables: usize, characters: usize },
    /// A coordinate change whose linear part is singular.
    ChangeNotInvertible,
    /// A coordinate change image with the wrong character.
    ChangeNotEquivariant { variable: String },
    /// A coordinate change that does not fix the origin.
    ChangeMovesOrigin { variable: String },
    /// A coordinate change in the wrong ring.
    ChangeRingMismatch,
    /// Requested elimination of a variable that is not a unit-linear term
    /// of the chosen equation.
    NotLinearInVariable { variable: String },
    /// The elimination fixed point failed to stabilize below the truncation
    /// degree (should not happen for valid inputs).
    EliminationDiverged { variable: String },
    /// Underlying polynomial error.
    Poly(PolyError),
}

impl fmt::Display for GermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GermError::Equivariance {
                equation,
                monomial_a,
                character_a,
                monomial_b,
                character_b,
            } => write!(
                f,
                "equation {} is not semi-invariant: monomials {} and {} have characters {} and {}",
                equation, monomial_a, monomial_b, character_a, character_b
            ),
            GermError::NotVanishing { equation } => {
                write!(f, "equation {} does not vanish at the origin", equation)
            }
            GermError::ZeroEquation { equation } => {
                write!(f, "equation {} is identically zero", equation)
            }
            GermError::DimensionMismatch { ambient, equations } => write!(
                f,
                "{} variables with {} equations do not define a surface or 3-fold germ",
                ambient, equations
            ),
            GermError::ActionArity {
                variables,
                characters,
            } => write!(
                f,
                "action has {} characters for {} variables",
                characters, variables
            ),
            GermError::ChangeNotInvertible => {
                write!(f, "coordinate change has a singular linear part")
            }
            GermError::ChangeNotEquivariant { variable } => write!(
                f,
                "coordinate change image of `{}` is not semi-invariant of the right character",
                variable
            ),
            GermError::ChangeMovesOrigin { variable } => write!(
                f,
                "coordinate change image of `{}` has a constant term",
                variable
            ),
            GermError::ChangeRingMismatch => {
                write!(f, "coordinate change lives in a different ring")
            }
            GermError::NotLinearInVariable { variable } => write!(
                f,
                "equation has no unit linear term in `{}` to eliminate",
                variable
            ),
            GermError::EliminationDiverged { variable } => write!(
                f,
                "elimination of `{}` did not stabilize below the truncation degree",
                variable
            ),
            GermError::Poly(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for GermError {}

impl From<PolyError> for GermError {
    fn from(e: PolyError) -> Self {
        GermError::Poly(e)
    }
}

/// A germ of a singularity: ambient variables, cyclic action, and 0 to 2
/// semi-invariant defining equations vanishing at the origin.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Germ {
    vars: Vec<String>,
    action: CyclicAction,
    equations: Vec<Polynomial>,
}

impl Germ {
    /// Validated constructor. The ambient dimension must be 2 to 5 with
    /// `ambient - #equations` equal to 3 (a 3-fold germ) or 2 (a surface
    /// section).
    pub fn new(
        vars: &[&str],
        action: CyclicAction,
        equations: Vec<Polynomial>,
    ) -> Result<Germ, GermError> {
        let n = vars.len();
        if action.nvars() != n {
            return Err(GermError::ActionArity {
                variables: n,
                characters: action.nvars(),
            });
        }
        let dim = n as i64 - equations.len() as i64;
        if !(2..=5).contains(&n) || equations.len() > 2 || !(dim == 2 || dim == 3) {
            return Err(GermError::DimensionMismatch {
                ambient: n,
                equations: equations.len(),
            });
        }
        let var_names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        for (i, eq) in equations.iter().enumerate() {
            if eq.vars() != var_names.as_slice() {
                return Err(GermError::Poly(PolyError::RingMismatch {
                    left: var_names.clone(),
                    right: eq.vars().to_vec(),
                }));
            }
            if eq.is_zero() {
                return Err(GermError::ZeroEquation { equation: i });
            }
            if !eq.constant_term().is_zero() {
                return Err(GermError::NotVanishing { equation: i });
            }
            if let Err((ma, ca, mb, cb)) = action.semi_invariant_character(eq) {
                return Err(GermError::Equivariance {
                    equation: i,
                    monomial_a: ma,
                    character_a: ca,
                    monomial_b: mb,
                    character_b: cb,
                });
            }
        }
        Ok(Germ {
            vars: var_names,
            action,
            equations,
        })
    }

    /// Hypersurface germ convenience constructor.
    pub fn hypersurface(vars: &[&str], action: CyclicAction, f: Polynomial) -> Result<Germ, GermError> {
        Germ::new(vars, action, vec![f])
    }

    /// A pure cyclic quotient point `1/r(a, b, c)` in standard coordinates.
    pub fn quotient_point(r: u32, chars: &[i64]) -> Result<Germ, GermError> {
        let names = ["x", "y", "z", "u", "t"];
        let vars: Vec<&str> = names[..chars.len()].to_vec();
        Germ::new(&vars, CyclicAction::new(r, chars), Vec::new())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn action(&self) -> &CyclicAction {
        &self.action
    }

    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    pub fn ambient_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn dim(&self) -> usize {
        self.vars.len() - self.equations.len()
    }

    /// True for germs with no defining equations (smooth or quotient
    /// points).
    pub fn is_ambient(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn index(&self) -> u32 {
        self.action.index()
    }

    pub fn is_gorenstein(&self) -> bool {
        self.action.normalized().is_trivial()
    }

    /// The same germ with the action forgotten (the covering germ).
    pub fn cover(&self) -> Germ {
        Germ {
            vars: self.vars.clone(),
            action: CyclicAction::trivial(self.vars.len()),
            equations: self.equations.clone(),
        }
    }

    /// Characters of the defining equations.
    pub fn equation_characters(&self) -> Vec<u32> {
        self.equations
            .iter()
            .map(|eq| {
                self.action
                    .semi_invariant_character(eq)
                    .expect("validated germ has semi-invariant equations")
            })
            .collect()
    }

    /// Serialize in the germ file format.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("ring: {}\n", self.vars.join(", "));
        if !self.action.is_trivial() {
            let chars: Vec<String> = self
                .action
                .characters()
                .iter()
                .map(|c| c.to_string())
                .collect();
            out.push_str(&format!(
                "group: 1/{} ({})\n",
                self.action.index(),
                chars.join(", ")
            ));
        }
        for eq in &self.equations {
            out.push_str(&format!("equation: {}\n", eq));
        }
        out
    }

    /// Parse the germ file format:
    ///
    /// ```text
    /// ring: x, y, z, u
    /// group: 1/2 (1, 1, 1, 0)
    /// equation: xy + z^2 + u^2
    /// ```
    ///
    /// The group line is omitted for a trivial action; blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse_file(text: &str) -> Result<Germ, GermFileError> {
        let mut ring: Option<Vec<String>> = None;
        let mut group: Option<(u32, Vec<i64>)> = None;
        let mut equations: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or(GermFileError::BadLine {
                line: lineno + 1,
                message: "expected `key: value`".into(),
            })?;
            match key.trim() {
                "ring" => {
                    let vars: Vec<String> = value
                        .split(',')
                        .map(|v| v.trim().to_string())
                        .filter(|v| !v.is_empty())
                        .collect();
                    if vars.is_empty() {
                        return Err(GermFileError::BadLine {
                            line: lineno + 1,
                            message: "empty ring".into(),
                        });
                    }
                    ring = Some(vars);
                }
                "group" => {
                    group = Some(parse_group_value(value).map_err(|message| {
                        GermFileError::BadLine {
                            line: lineno + 1,
                            message,
                        }
                    })?);
                }
                "equation" => equations.push(value.trim().to_string()),
                other => {
                    return Err(GermFileError::BadLine {
                        line: lineno + 1,
                        message: format!("unknown key `{}`", other),
                    })
                }
            }
        }
        let ring = ring.ok_or(GermFileError::MissingRing)?;
        let refs: Vec<&str> = ring.iter().map(|s| s.as_str()).collect();
        let action = match group {
            None => CyclicAction::trivial(ring.len()),
            Some((r, chars)) => {
                if chars.len() != ring.len() {
                    return Err(GermFileError::Germ(GermError::ActionArity {
                        variables: ring.len(),
                        characters: chars.len(),
                    }));
                }
                CyclicAction::new(r, &chars)
            }
        };
        let mut polys = Vec::new();
        for text in &equations {
            polys.push(
                Polynomial::parse(text, &refs)
                    .map_err(|e| GermFileError::Germ(GermError::Poly(e)))?,
            );
        }
        Germ::new(&refs, action, polys).map_err(GermFileError::Germ)
    }
}

fn parse_group_value(value: &str) -> Result<(u32, Vec<i64>), String> {
    // Accepts `1/r (a, b, c)` with flexible spacing.
    let v = value.trim();
    let rest = v.strip_prefix("1/").ok_or("expected `1/r (a, b, ...)`")?;
    let open = rest.find('(').ok_or("expected `(` after the index")?;
    let r: u32 = rest[..open]
        .trim()
        .parse()
        .map_err(|_| "bad group index".to_string())?;
    if r == 0 {
        return Err("group index must be positive".into());
    }
    let close = rest.rfind(')').ok_or("expected closing `)`")?;
    let chars: Result<Vec<i64>, _> = rest[open + 1..close]
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect();
    Ok((r, chars.map_err(|_| "bad character list".to_string())?))
}

/// Errors from the germ file reader.
#[derive(Debug)]
pub enum GermFileError {
    MissingRing,
    BadLine { line: usize, message: String },
    Germ(GermError),
}

impl fmt::Display for GermFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GermFileError::MissingRing => write!(f, "germ file has no `ring:` line"),
            GermFileError::BadLine { line, message } => {
                write!(f, "germ file line {}: {}", line, message)
            }
            GermFileError::Germ(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for GermFileError {}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eqs: Vec<String> = self.equations.iter().map(|e| e.to_string()).collect();
        if eqs.is_empty() {
            write!(f, "A^{} / {}", self.vars.len(), self.action)
        } else if self.action.is_trivial() {
            write!(f, "({} = 0)", eqs.join(" = "))
        } else {
            write!(f, "({} = 0) / {}", eqs.join(" = "), self.action)
        }
    }
}

/// An equivariant coordinate change: one image polynomial per ambient
/// variable, applied by substitution and truncated at `truncation_degree`.
#[derive(Clone, Debug)]
pub struct CoordinateChange {
    images: Vec<Polynomial>,
    truncation_degree: u32,
}

impl CoordinateChange {
    /// Validated constructor: images must fix the origin, be semi-invariant
    /// of their variable's character, and have an invertible linear part.
    pub fn new(
        action: &CyclicAction,
        images: Vec<Polynomial>,
        truncation_degree: u32,
    ) -> Result<CoordinateChange, GermError> {
        if images.is_empty() {
            return Err(GermError::ChangeRingMismatch);
        }
        let ring = images[0].vars().to_vec();
        if images.len() != ring.len() || action.nvars() != ring.len() {
            return Err(GermError::ChangeRingMismatch);
        }
        for (i, img) in images.iter().enumerate() {
            if img.vars() != ring.as_slice() {
                return Err(GermError::ChangeRingMismatch);
            }
            if !img.constant_term().is_zero() {
                return Err(GermError::ChangeMovesOrigin {
                    variable: ring[i].clone(),
                });
            }
            match action.semi_invariant_character(img) {
                Ok(c) if img.is_zero() || c == action.character(i) => {}
                _ => {
                    return Err(GermError::ChangeNotEquivariant {
                        variable: ring[i].clone(),
                    })
                }
            }
        }
        // Linear part: matrix whose (i, j) entry is the coefficient of
        // variable j in image i; must be invertible.
        let n = ring.len();
        let mut linear = vec![vec![Rational::zero(); n]; n];
        for (i, img) in images.iter().enumerate() {
            for j in 0..n {
                linear[i][j] = img.coeff(&ExponentVector::unit(n, j));
            }
        }
        if crate::linalg::det(&linear).is_zero() {
            return Err(GermError::ChangeNotInvertible);
        }
        Ok(CoordinateChange {
            images,
            truncation_degree,
        })
    }

    /// The identity change on the given ring.
    pub fn identity(vars: &[&str], truncation_degree: u32) -> CoordinateChange {
        CoordinateChange {
            images: vars.iter().map(|v| Polynomial::variable(vars, v)).collect(),
            truncation_degree,
        }
    }

    /// The identity change with one image replaced.
    pub fn single(
        action: &CyclicAction,
        vars: &[&str],
        var: &str,
        image: Polynomial,
        truncation_degree: u32,
    ) -> Result<CoordinateChange, GermError> {
        let mut images: Vec<Polynomial> =
            vars.iter().map(|v| Polynomial::variable(vars, v)).collect();
        let idx = images
            .iter()
            .position(|p| p.vars()[..].iter().any(|_| false))
            .unwrap_or_else(|| vars.iter().position(|v| *v == var).expect("unknown variable"));
        images[idx] = image;
        CoordinateChange::new(action, images, truncation_degree)
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn truncation_degree(&self) -> u32 {
        self.truncation_degree
    }
}

/// Apply an equivariant coordinate change to a germ, truncating and
/// re-validating the substituted equations.
pub fn apply_change(g: &Germ, c: &CoordinateChange) -> Result<Germ, GermError> {
    if c.images.is_empty() || c.images[0].vars() != g.vars {
        return Err(GermError::ChangeRingMismatch);
    }
    let mut new_eqs = Vec::with_capacity(g.equations.len());
    for eq in &g.equations {
        new_eqs.push(eq.substitute_truncated(&c.images, c.truncation_degree)?);
    }
    let refs = g.var_refs();
    Germ::new(&refs, g.action.clone(), new_eqs)
}

/// Record of one eliminated variable: on the germ, `variable = replacement`
/// holds identically (the replacement is written in the surviving
/// variables).
#[derive(Clone, Debug)]
pub struct EliminationRecord {
    pub variable: String,
    pub replacement: Polynomial,
}

/// Solve equation `eq_index` for `var` (which must occur unit-linearly) and
/// substitute the solution everywhere, dropping the variable and the
/// equation. Returns the reduced germ and the record `var = phi(rest)`.
///
/// The action on the reduced germ is normalized (a common character divisor
/// is factored out). Works at the given total-degree truncation.
pub fn eliminate_variable(
    g: &Germ,
    eq_index: usize,
    var: usize,
    truncation: u32,
) -> Result<(Germ, EliminationRecord), GermError> {
    let f = &g.equations[eq_index];
    let n = g.vars.len();
    let lin = f.coeff(&ExponentVector::unit(n, var));
    if lin.is_zero() {
        return Err(GermError::NotLinearInVariable {
            variable: g.vars[var].clone(),
        });
    }
    // f = lin*v + h with h = lin*v - f; iterate v <- h(v)/lin to the fixed
    // point, which exists because h's v-terms all have total degree >= 2.
    let v_poly = Polynomial::variable(&g.var_refs(), &g.vars[var]);
    let h = v_poly.scale(&lin).sub(f);
    let mut phi = Polynomial::zero_in(g.vars.clone());
    let mut iterations = 0;
    loop {
        let mut images: Vec<Polynomial> = g
            .var_refs()
            .iter()
            .map(|v| Polynomial::variable(&g.var_refs(), v))
            .collect();
        images[var] = phi.clone();
        let next = h
            .substitute_truncated(&images, truncation)?
            .scale(&lin.recip());
        if next == phi {
            break;
        }
        phi = next;
        iterations += 1;
        if iterations > 2 * truncation + 4 {
            return Err(GermError::EliminationDiverged {
                variable: g.vars[var].clone(),
            });
        }
    }
    // Substitute into the other equations and drop the variable.
    let keep: Vec<usize> = (0..n).filter(|&i| i != var).collect();
    let mut images: Vec<Polynomial> = g
        .var_refs()
        .iter()
        .map(|v| Polynomial::variable(&g.var_refs(), v))
        .collect();
    images[var] = phi.clone();
    let mut new_eqs = Vec::new();
    for (i, eq) in g.equations.iter().enumerate() {
        if i == eq_index {
            continue;
        }
        let sub = eq.substitute_truncated(&images, truncation)?;
        new_eqs.push(sub.restrict_vars(&keep)?);
    }
    let new_vars: Vec<&str> = keep.iter().map(|&i| g.vars[i].as_str()).collect();
    let action = g.action.drop_var(var).normalized();
    let reduced = Germ::new(&new_vars, action, new_eqs)?;
    let record = EliminationRecord {
        variable: g.vars[var].clone(),
        replacement: phi.restrict_vars(&keep)?,
    };
    Ok((reduced, record))
}

/// Find `(equation, variable)` pairs where the variable occurs unit-linearly
/// in the equation, so it can be eliminated.
pub fn eliminable_pairs(g: &Germ) -> Vec<(usize, usize)> {
    let n = g.vars.len();
    let mut out = Vec::new();
    for (i, eq) in g.equations.iter().enumerate() {
        for v in 0..n {
            if !eq.coeff(&ExponentVector::unit(n, v)).is_zero() {
                out.push((i, v));
            }
        }
    }
    out
}

/// Eliminate unit-linear variables until none remain, preferring later
/// equations and later variables (which keeps conventional names like `x`,
/// `y` alive). Returns the reduced germ and the elimination records in
/// order.
pub fn simplify(g: &Germ, truncation: u32) -> Result<(Germ, Vec<EliminationRecord>), GermError> {
    let mut current = g.clone();
    let mut records = Vec::new();
    loop {
        let pairs = eliminable_pairs(&current);
        match pairs.last() {
            None => break,
            Some(&(eq, var)) => {
                let (next, record) = eliminate_variable(&current, eq, var, truncation)?;
                records.push(record);
                current = next;
            }
        }
    }
    Ok((current, records))
}

/// Verdict of the isolated-singularity probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolationVerdict {
    Isolated,
    NonIsolated,
    Inconclusive,
}

/// Bound the dimension of the singular locus of a hypersurface germ at the
/// origin: `Isolated` when the Milnor-type dimension stabilizes,
/// `NonIsolated` when a coordinate axis lies in the singular locus, and
/// `Inconclusive` when the degree bound is exhausted first.
///
/// Quotient germs are probed on their cover (the action does not affect
/// isolatedness).
pub fn singular_locus_dimension_bound(g: &Germ, degree_bound: u32) -> IsolationVerdict {
    assert_eq!(
        g.equations.len(),
        1,
        "isolation probe expects a hypersurface germ"
    );
    let f = &g.equations[0];
    let n = g.vars.len();
    // Axis witness: f and all partials vanish identically on a coordinate
    // axis.
    for axis in 0..n {
        let on_axis = |p: &Polynomial| -> bool {
            p.terms().all(|(ev, _)| {
                ev.exponents()
                    .iter()
                    .enumerate()
                    .any(|(i, &e)| i != axis && e > 0)
            })
        };
        if on_axis(f) && (0..n).all(|i| on_axis(&f.derivative(i))) {
            return IsolationVerdict::NonIsolated;
        }
    }
    match milnor_number(f, degree_bound) {
        MilnorOutcome::Stable(_) => IsolationVerdict::Isolated,
        MilnorOutcome::Unstable => IsolationVerdict::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    const XYZU: [&str; 4] = ["x", "y", "z", "u"];

    fn p(text: &str) -> Polynomial {
        Polynomial::parse(text, &XYZU).unwrap()
    }

    #[test]
    fn accepts_classic_hypersurface_germs() {
        let g = Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("x^2+y^3+z^5+u^7")).unwrap();
        assert_eq!(g.dim(), 3);
        assert!(g.is_gorenstein());

        let q = Germ::hypersurface(
            &XYZU,
            CyclicAction::new(2, &[1, 1, 1, 0]),
            p("xy + z^2 + u^2"),
        )
        .unwrap();
        assert_eq!(q.index(), 2);
        assert_eq!(q.equation_characters(), vec![0]);
    }

    #[test]
    fn character_arithmetic_on_semi_invariance() {
        let act = CyclicAction::new(2, &[1, 1, 1, 0]);
        // x and z^3 share character 1.
        assert!(Germ::hypersurface(&XYZU, act.clone(), p("x + z^3")).is_ok());
        // x and z^2 have characters 1 and 0.
        match Germ::hypersurface(&XYZU, act, p("x + z^2")) {
            Err(GermError::Equivariance {
                character_a,
                character_b,
                ..
            }) => {
                assert_ne!(character_a, character_b);
            }
            other => panic!("expected equivariance violation, got {:?}", other),
        }
    }

    #[test]
    fn rejects_nonvanishing_and_zero_equations() {
        assert!(matches!(
            Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("1 + x")),
            Err(GermError::NotVanishing { .. })
        ));
        assert!(matches!(
            Germ::hypersurface(&XYZU, CyclicAction::trivial(4), Polynomial::zero(&XYZU)),
            Err(GermError::ZeroEquation { .. })
        ));
    }

    #[test]
    fn quotient_point_and_dimension_rules() {
        let q = Germ::quotient_point(5, &[3, 2, 1]).unwrap();
        assert_eq!(q.dim(), 3);
        assert!(q.is_ambient());
        // 4 variables with no equation is not a 3-fold germ.
        assert!(matches!(
            Germ::new(&XYZU, CyclicAction::trivial(4), vec![]),
            Err(GermError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn action_normalization_factors_trivial_subgroup() {
        let a = CyclicAction::new(6, &[2, 4, 2]);
        let n = a.normalized();
        assert_eq!(n.index(), 3);
        assert_eq!(n.characters(), &[1, 2, 1]);
        let faithful = CyclicAction::new(2, &[1, 1, 1, 0]);
        assert_eq!(faithful.normalized(), faithful);
    }

    #[test]
    fn coordinate_change_validation() {
        let act = CyclicAction::trivial(4);
        // z -> z - u^2 with the other variables fixed.
        let images = vec![p("x"), p("y"), p("z - u^2"), p("u")];
        let c = CoordinateChange::new(&act, images, 24).unwrap();
        assert_eq!(c.truncation_degree(), 24);

        // Singular linear part.
        let bad = CoordinateChange::new(&act, vec![p("x"), p("x"), p("z"), p("u")], 24);
        assert!(matches!(bad, Err(GermError::ChangeNotInvertible)));

        // Constant term moves the origin.
        let moved = CoordinateChange::new(&act, vec![p("x + 1"), p("y"), p("z"), p("u")], 24);
        assert!(matches!(moved, Err(GermError::ChangeMovesOrigin { .. })));

        // Equivariance: u has character 0 under 1/2(1,1,1,0), so u -> u + z
        // mixes characters.
        let act2 = CyclicAction::new(2, &[1, 1, 1, 0]);
        let uneq = CoordinateChange::new(&act2, vec![p("x"), p("y"), p("z"), p("u + z")], 24);
        assert!(matches!(uneq, Err(GermError::ChangeNotEquivariant { .. })));
    }

    #[test]
    fn apply_change_cancels_terms_exactly() {
        let g = Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("x^2 + y^2*z + y^2*u^2"))
            .unwrap();
        let c = CoordinateChange::new(
            g.action(),
            vec![p("x"), p("y"), p("z - u^2"), p("u")],
            24,
        )
        .unwrap();
        let moved = apply_change(&g, &c).unwrap();
        assert_eq!(moved.equations()[0], p("x^2 + y^2*z"));

        let id = CoordinateChange::identity(&XYZU, 24);
        assert_eq!(apply_change(&g, &id).unwrap(), g);

        // Swapping x and y fixes xy + z^2 + u^3.
        let g2 = Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("xy + z^2 + u^3")).unwrap();
        let swap = CoordinateChange::new(
            g2.action(),
            vec![p("y"), p("x"), p("z"), p("u")],
            24,
        )
        .unwrap();
        assert_eq!(apply_change(&g2, &swap).unwrap(), g2);
    }

    #[test]
    fn elimination_solves_unit_linear_variables() {
        // x^2 + y^3 + u (4 variables, u unit-linear): u = -(x^2 + y^3).
        let g = Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("x^2 + y^3 + u")).unwrap();
        let var = g.var_index("u").unwrap();
        let (reduced, record) = eliminate_variable(&g, 0, var, 24).unwrap();
        assert_eq!(reduced.vars(), &["x", "y", "z"]);
        assert!(reduced.is_ambient());
        assert_eq!(record.variable, "u");
        assert_eq!(
            record.replacement,
            Polynomial::parse("-x^2 - y^3", &["x", "y", "z"]).unwrap()
        );
    }

    #[test]
    fn elimination_iterates_when_variable_reoccurs() {
        // u + x^2 + u^2: u = -(x^2) - u^2 needs the fixed point
        // u = -x^2 - x^4 - 2x^6 - ...
        let g = Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("u + x^2 + u^2")).unwrap();
        let var = g.var_index("u").unwrap();
        let (_, record) = eliminate_variable(&g, 0, var, 8).unwrap();
        let phi = &record.replacement;
        let xyz = ["x", "y", "z"];
        let expect = Polynomial::parse("-x^2 - x^4 - 2*x^6 - 5*x^8", &xyz).unwrap();
        assert_eq!(phi.truncate(8), expect);
        // Check it actually solves the equation to the truncation order.
        let images = vec![
            Polynomial::parse("x", &xyz).unwrap().embed(&XYZU, &[0, 1, 2]),
            Polynomial::parse("y", &xyz).unwrap().embed(&XYZU, &[0, 1, 2]),
            Polynomial::parse("z", &xyz).unwrap().embed(&XYZU, &[0, 1, 2]),
            phi.embed(&XYZU, &[0, 1, 2]),
        ];
        let residual = g.equations()[0]
            .substitute_truncated(&images, 8)
            .unwrap();
        assert!(residual.is_zero(), "residual {}", residual);
    }

    #[test]
    fn elimination_normalizes_the_action() {
        // 1/4(1, 3, 2, 2) germ with equation u + z^2: after eliminating u
        // the action 1/4(1, 3, 2) stays faithful, but with equation
        // u + x^4... use chars (2, 2, 2, 0) scale: eliminating u from
        // u + z^2 leaves chars (2,2,2) under index 4 -> normalizes to
        // 1/2(1,1,1).
        let act = CyclicAction::new(4, &[2, 2, 2, 0]);
        let g = Germ::hypersurface(&XYZU, act, p("u + z^2")).unwrap();
        let var = g.var_index("u").unwrap();
        let (reduced, _) = eliminate_variable(&g, 0, var, 24).unwrap();
        assert_eq!(reduced.action().index(), 2);
        assert_eq!(reduced.action().characters(), &[1, 1, 1]);
    }

    #[test]
    fn germ_file_round_trip() {
        let text = "ring: x, y, z, u\ngroup: 1/2 (1, 1, 1, 0)\nequation: x*y + z^2 + u^2\n";
        let g = Germ::parse_file(text).unwrap();
        assert_eq!(g.index(), 2);
        assert_eq!(g.to_file_string(), text);

        let trivial = "ring: x, y, z, u\nequation: x^2 + y^3 + z^5 + u^7\n";
        let t = Germ::parse_file(trivial).unwrap();
        assert!(t.action().is_trivial());
        assert_eq!(t.to_file_string(), trivial);
    }

    #[test]
    fn isolation_probe() {
        let iso = Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("x^2+y^2+z^2+u^2")).unwrap();
        assert_eq!(
            singular_locus_dimension_bound(&iso, 12),
            IsolationVerdict::Isolated
        );
        let e8 = Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("x^2+y^3+z^5+u^7")).unwrap();
        assert_eq!(
            singular_locus_dimension_bound(&e8, 16),
            IsolationVerdict::Isolated
        );
        let bad = Germ::hypersurface(&XYZU, CyclicAction::trivial(4), p("x^2 + y^2*z")).unwrap();
        assert_eq!(
            singular_locus_dimension_bound(&bad, 12),
            IsolationVerdict::NonIsolated
        );
    }

    #[test]
    fn display_shapes() {
        let q = Germ::quotient_point(5, &[3, 2, 1]).unwrap();
        assert_eq!(q.to_string(), "A^3 / 1/5(3,2,1)");
        let g = Germ::hypersurface(
            &XYZU,
            CyclicAction::new(2, &[1, 1, 1, 0]),
            p("xy + z^2 + u^2"),
        )
        .unwrap();
        assert_eq!(g.to_string(), "(x*y + z^2 + u^2 = 0) / 1/2(1,1,1,0)");
        assert_eq!(rat(1), rat(1));
    }
}
