//! Exact sparse multivariate polynomials over the rationals.
//!
//! This is the arithmetic kernel of the crate: every defining equation,
//! coordinate change, and discrepancy computation runs through these
//! polynomials. Coefficients are arbitrary-precision rationals and all
//! operations are exact; no floating point appears anywhere.
//!
//! Terms are kept in a sorted map under a graded order (total degree first,
//! then lexicographically by the declared variable order), which doubles as
//! the canonical printing order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the crate.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `n/d` (`d` must be nonzero).
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector of a monomial; one entry per ambient variable.
///
/// Ordered by total degree first, then lexicographically by the variable
/// order with earlier-variable-heavy monomials first, so that iterating a
/// term map yields `x^2` before `x*y` before `y^2`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(exponents: Vec<u32>) -> Self {
        ExponentVector(exponents)
    }

    pub fn zero(len: usize) -> Self {
        ExponentVector(vec![0; len])
    }

    /// Exponent vector of a single variable.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut e = vec![0; len];
        e[index] = 1;
        ExponentVector(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Total degree (sum of entries).
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Product of monomials (componentwise sum).
    pub fn mul(&self, other: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.len(), other.len());
        ExponentVector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Inner product with a rational weight vector.
    pub fn weight(&self, w: &[Rational]) -> Rational {
        debug_assert_eq!(self.len(), w.len());
        let mut acc = Rational::zero();
        for (e, wi) in self.0.iter().zip(w.iter()) {
            if *e != 0 {
                acc += wi * Rational::from_integer(BigInt::from(*e));
            }
        }
        acc
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Errors from parsing or combining polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// Malformed expression text; `position` is a byte offset into the input.
    Syntax { position: usize, message: String },
    /// An identifier that is not a declared ring variable.
    UnknownVariable { position: usize, name: String },
    /// Two polynomials from different rings were combined.
    RingMismatch { left: Vec<String>, right: Vec<String> },
    /// A projection tried to drop a variable that still occurs.
    VariableInUse { name: String },
    /// An operation that requires a nonzero polynomial received zero.
    ZeroPolynomial,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::Syntax { position, message } => {
                write!(f, "syntax error at byte {}: {}", position, message)
            }
            PolyError::UnknownVariable { position, name } => {
                write!(f, "unknown variable `{}` at byte {}", name, position)
            }
            PolyError::RingMismatch { left, right } => write!(
                f,
                "ring mismatch: [{}] vs [{}]",
                left.join(", "),
                right.join(", ")
            ),
            PolyError::VariableInUse { name } => {
                write!(f, "variable `{}` still occurs in the polynomial", name)
            }
            PolyError::ZeroPolynomial => write!(f, "operation undefined for the zero polynomial"),
        }
    }
}

impl std::error::Error for PolyError {}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// A polynomial owns the ordered list of its ring's variable names; two
/// polynomials interoperate only when those lists agree exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl Polynomial {
    /// The zero polynomial of the given ring.
    pub fn zero(vars: &[&str]) -> Self {
        Polynomial {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    /// The zero polynomial with owned variable names.
    pub fn zero_in(vars: Vec<String>) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant(vars: &[&str], c: Rational) -> Self {
        let mut p = Polynomial::zero(vars);
        if !c.is_zero() {
            p.terms.insert(ExponentVector::zero(p.vars.len()), c);
        }
        p
    }

    /// The polynomial consisting of the single named variable.
    ///
    /// Panics if the name is not in the ring; use [`Polynomial::parse`] for
    /// untrusted input.
    pub fn variable(vars: &[&str], name: &str) -> Self {
        let mut p = Polynomial::zero(vars);
        let idx = p
            .vars
            .iter()
            .position(|v| v == name)
            .unwrap_or_else(|| panic!("variable `{}` not in ring", name));
        p.terms
            .insert(ExponentVector::unit(p.vars.len(), idx), Rational::one());
        p
    }

    /// Build a polynomial from explicit terms; zero coefficients are dropped
    /// and repeated exponent vectors are summed.
    pub fn from_terms(vars: &[&str], terms: Vec<(ExponentVector, Rational)>) -> Self {
        let mut p = Polynomial::zero(vars);
        for (ev, c) in terms {
            assert_eq!(ev.len(), p.vars.len(), "exponent vector length mismatch");
            p.add_term(ev, c);
        }
        p
    }

    fn add_term(&mut self, ev: ExponentVector, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(ev) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get() + &c;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms in the canonical graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of the given monomial (zero when absent).
    pub fn coeff(&self, ev: &ExponentVector) -> Rational {
        self.terms.get(ev).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&ExponentVector::zero(self.vars.len()))
    }

    fn assert_same_ring(&self, other: &Polynomial) {
        assert_eq!(
            self.vars, other.vars,
            "polynomial ring mismatch: [{}] vs [{}]",
            self.vars.join(", "),
            other.vars.join(", ")
        );
    }

    /// Total degree of the highest term, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|ev| ev.degree()).max()
    }

    /// Minimum total degree among terms (the multiplicity at the origin);
    /// `None` for the zero polynomial.
    pub fn multiplicity(&self) -> Option<u32> {
        // The term order is graded, so the first key has minimal degree.
        self.terms.keys().next().map(|ev| ev.degree())
    }

    /// Degree in a single variable, `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|ev| ev.exponent(var)).max()
    }

    /// Minimum exponent of `var` over all terms, `None` for zero.
    pub fn min_exponent(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|ev| ev.exponent(var)).min()
    }

    /// Minimum of `<exponent vector, w>` over stored terms; `None` encodes
    /// the +infinity order of the zero polynomial.
    ///
    /// Panics if `w` does not have one entry per ring variable.
    pub fn weighted_order(&self, w: &[Rational]) -> Option<Rational> {
        assert_eq!(
            w.len(),
            self.vars.len(),
            "weight vector length {} does not match ring with {} variables",
            w.len(),
            self.vars.len()
        );
        self.terms.keys().map(|ev| ev.weight(w)).min()
    }

    /// The sum of the terms achieving the minimal weighted order (the
    /// initial form with respect to `w`); zero for the zero polynomial.
    pub fn weighted_initial_form(&self, w: &[Rational]) -> Polynomial {
        let mut out = Polynomial::zero_in(self.vars.clone());
        if let Some(min) = self.weighted_order(w) {
            for (ev, c) in &self.terms {
                if ev.weight(w) == min {
                    out.terms.insert(ev.clone(), c.clone());
                }
            }
        }
        out
    }

    /// Drop all terms of total degree greater than `bound`.
    pub fn truncate(&self, bound: u32) -> Polynomial {
        let mut out = Polynomial::zero_in(self.vars.clone());
        for (ev, c) in &self.terms {
            if ev.degree() <= bound {
                out.terms.insert(ev.clone(), c.clone());
            }
        }
        out
    }

    /// True when the polynomial has a nonzero term of degree one or zero.
    pub fn has_linear_or_constant_part(&self) -> bool {
        self.terms.keys().any(|ev| ev.degree() <= 1)
    }

    /// The degree-`d` homogeneous part.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        let mut out = Polynomial::zero_in(self.vars.clone());
        for (ev, c) in &self.terms {
            if ev.degree() == d {
                out.terms.insert(ev.clone(), c.clone());
            }
        }
        out
    }

    /// True when every term has the same total degree (or the polynomial is
    /// zero).
    pub fn is_homogeneous(&self) -> bool {
        match self.multiplicity() {
            None => true,
            Some(m) => self.total_degree() == Some(m),
        }
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_ring(other);
        let mut out = self.clone();
        for (ev, c) in &other.terms {
            out.add_term(ev.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_ring(other);
        let mut out = self.clone();
        for (ev, c) in &other.terms {
            out.add_term(ev.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_ring(other);
        let mut out = Polynomial::zero_in(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.mul(eb), ca * cb);
            }
        }
        out
    }

    /// Product with truncation: all intermediate and final terms above the
    /// total-degree bound are discarded. Agrees with `mul` followed by
    /// `truncate` because total degrees add.
    pub fn mul_truncated(&self, other: &Polynomial, bound: u32) -> Polynomial {
        self.assert_same_ring(other);
        let mut out = Polynomial::zero_in(self.vars.clone());
        for (ea, ca) in &self.terms {
            if ea.degree() > bound {
                continue;
            }
            for (eb, cb) in &other.terms {
                if ea.degree() + eb.degree() <= bound {
                    out.add_term(ea.mul(eb), ca * cb);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero_in(self.vars.clone());
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::constant_in(self.vars.clone(), Rational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn pow_truncated(&self, e: u32, bound: u32) -> Polynomial {
        let mut out = Polynomial::constant_in(self.vars.clone(), Rational::one());
        for _ in 0..e {
            out = out.mul_truncated(self, bound);
            if out.is_zero() {
                break;
            }
        }
        out
    }

    fn constant_in(vars: Vec<String>, c: Rational) -> Self {
        let mut p = Polynomial::zero_in(vars);
        if !c.is_zero() {
            p.terms.insert(ExponentVector::zero(p.vars.len()), c);
        }
        p
    }

    /// Multiply by a single monomial with rational coefficient.
    pub fn mul_monomial(&self, ev: &ExponentVector, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero_in(self.vars.clone());
        if c.is_zero() {
            return out;
        }
        for (e, k) in &self.terms {
            out.terms.insert(e.mul(ev), k * c);
        }
        out
    }

    /// Partial derivative with respect to the variable at `var`.
    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero_in(self.vars.clone());
        for (ev, c) in &self.terms {
            let e = ev.exponent(var);
            if e > 0 {
                let mut exps = ev.exponents().to_vec();
                exps[var] = e - 1;
                out.add_term(
                    ExponentVector::new(exps),
                    c * Rational::from_integer(BigInt::from(e)),
                );
            }
        }
        out
    }

    /// Substitute an image polynomial for every ring variable.
    ///
    /// All images must live in one common ring (which may differ from the
    /// source ring); the result lives there too.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial, PolyError> {
        self.substitute_impl(images, None)
    }

    /// Substitution with total-degree truncation applied to every
    /// intermediate product. Equivalent to `substitute` followed by
    /// `truncate(bound)`.
    pub fn substitute_truncated(
        &self,
        images: &[Polynomial],
        bound: u32,
    ) -> Result<Polynomial, PolyError> {
        self.substitute_impl(images, Some(bound))
    }

    fn substitute_impl(
        &self,
        images: &[Polynomial],
        bound: Option<u32>,
    ) -> Result<Polynomial, PolyError> {
        assert_eq!(
            images.len(),
            self.vars.len(),
            "need one image per ring variable"
        );
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => self.vars.clone(),
        };
        for img in images {
            if img.vars != target {
                return Err(PolyError::RingMismatch {
                    left: target.clone(),
                    right: img.vars.clone(),
                });
            }
        }
        // Cache successive powers of each image as they are needed.
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|_| vec![Polynomial::constant_in(target.clone(), Rational::one())])
            .collect();
        let grow = |powers: &mut Vec<Vec<Polynomial>>, i: usize, e: u32| {
            while powers[i].len() <= e as usize {
                let last = powers[i].last().unwrap();
                let next = match bound {
                    Some(b) => last.mul_truncated(&images[i], b),
                    None => last.mul(&images[i]),
                };
                powers[i].push(next);
            }
        };
        let mut out = Polynomial::zero_in(target.clone());
        for (ev, c) in &self.terms {
            let mut term = Polynomial::constant_in(target.clone(), c.clone());
            for (i, &e) in ev.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                grow(&mut powers, i, e);
                term = match bound {
                    Some(b) => term.mul_truncated(&powers[i][e as usize], b),
                    None => term.mul(&powers[i][e as usize]),
                };
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Evaluate at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = Rational::zero();
        for (ev, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in ev.exponents().iter().enumerate() {
                for _ in 0..e {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Collect the coefficient (a polynomial with `var`-exponent zero) of
    /// `var^k`.
    pub fn coefficient_of(&self, var: usize, k: u32) -> Polynomial {
        let mut out = Polynomial::zero_in(self.vars.clone());
        for (ev, c) in &self.terms {
            if ev.exponent(var) == k {
                let mut exps = ev.exponents().to_vec();
                exps[var] = 0;
                out.terms.insert(ExponentVector::new(exps), c.clone());
            }
        }
        out
    }

    /// Which variables actually occur.
    pub fn used_vars(&self) -> Vec<bool> {
        let mut used = vec![false; self.vars.len()];
        for ev in self.terms.keys() {
            for (i, &e) in ev.exponents().iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        used
    }

    /// Rebuild the polynomial in the subring consisting of the variables at
    /// `keep` (in the given order). Fails if a dropped variable occurs.
    pub fn restrict_vars(&self, keep: &[usize]) -> Result<Polynomial, PolyError> {
        let used = self.used_vars();
        for (i, &u) in used.iter().enumerate() {
            if u && !keep.contains(&i) {
                return Err(PolyError::VariableInUse {
                    name: self.vars[i].clone(),
                });
            }
        }
        let vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let mut out = Polynomial::zero_in(vars);
        for (ev, c) in &self.terms {
            let exps: Vec<u32> = keep.iter().map(|&i| ev.exponent(i)).collect();
            out.terms.insert(ExponentVector::new(exps), c.clone());
        }
        Ok(out)
    }

    /// Reinterpret the polynomial in a larger ring; `positions[i]` is where
    /// the i-th current variable lands.
    pub fn embed(&self, new_vars: &[&str], positions: &[usize]) -> Polynomial {
        assert_eq!(positions.len(), self.vars.len());
        let vars: Vec<String> = new_vars.iter().map(|s| s.to_string()).collect();
        let mut out = Polynomial::zero_in(vars);
        for (ev, c) in &self.terms {
            let mut exps = vec![0u32; new_vars.len()];
            for (i, &p) in positions.iter().enumerate() {
                exps[p] = ev.exponent(i);
            }
            out.terms.insert(ExponentVector::new(exps), c.clone());
        }
        out
    }

    /// Same coefficients, new variable names (lengths must agree).
    pub fn rename_vars(&self, new_vars: &[&str]) -> Polynomial {
        assert_eq!(new_vars.len(), self.vars.len());
        Polynomial {
            vars: new_vars.iter().map(|s| s.to_string()).collect(),
            terms: self.terms.clone(),
        }
    }

    /// Parse an expression in the given ring. See the crate-level grammar:
    /// sums of terms, juxtaposition or `*` for products, `^` for powers,
    /// integer or `(p/q)` coefficients, and parenthesized subexpressions.
    pub fn parse(text: &str, vars: &[&str]) -> Result<Polynomial, PolyError> {
        let tokens = lex(text, vars)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            vars,
        };
        let poly = parser.parse_expr()?;
        if parser.pos < parser.tokens.len() {
            return Err(PolyError::Syntax {
                position: parser.tokens[parser.pos].position,
                message: "unexpected trailing input".into(),
            });
        }
        Ok(poly)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (ev, c) in &self.terms {
            let negative = c.is_negative();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            let mono: Vec<String> = self
                .vars
                .iter()
                .zip(ev.exponents())
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        v.clone()
                    } else {
                        format!("{}^{}", v, e)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&a), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

/// Render a rational as `p` or `p/q` (used by JSON emitters; never a float).
pub fn rational_string(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Int(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    position: usize,
}

fn lex(text: &str, vars: &[&str]) -> Result<Vec<Token>, PolyError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let position = i;
        match c {
            '+' => {
                tokens.push(Token { kind: TokenKind::Plus, position });
                i += 1;
            }
            '-' => {
                tokens.push(Token { kind: TokenKind::Minus, position });
                i += 1;
            }
            '*' => {
                tokens.push(Token { kind: TokenKind::Star, position });
                i += 1;
            }
            '^' => {
                tokens.push(Token { kind: TokenKind::Caret, position });
                i += 1;
            }
            '/' => {
                tokens.push(Token { kind: TokenKind::Slash, position });
                i += 1;
            }
            '(' => {
                tokens.push(Token { kind: TokenKind::LParen, position });
                i += 1;
            }
            ')' => {
                tokens.push(Token { kind: TokenKind::RParen, position });
                i += 1;
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let n = BigInt::parse_bytes(&bytes[start..i], 10).ok_or(PolyError::Syntax {
                    position,
                    message: "malformed integer".into(),
                })?;
                tokens.push(Token { kind: TokenKind::Int(n), position });
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let ch = bytes[i] as char;
                    if ch.is_alphanumeric() || ch == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let word = &text[start..i];
                if let Some(idx) = vars.iter().position(|v| *v == word) {
                    tokens.push(Token { kind: TokenKind::Var(idx), position });
                } else if word.chars().all(|ch| {
                    vars.iter().any(|v| v.len() == 1 && v.chars().next() == Some(ch))
                }) {
                    // A run of single-letter variables written by
                    // juxtaposition, e.g. `xy` for x*y.
                    for (k, ch) in word.chars().enumerate() {
                        let idx = vars
                            .iter()
                            .position(|v| v.len() == 1 && v.chars().next() == Some(ch))
                            .unwrap();
                        tokens.push(Token {
                            kind: TokenKind::Var(idx),
                            position: position + k,
                        });
                    }
                } else {
                    return Err(PolyError::UnknownVariable {
                        position,
                        name: word.to_string(),
                    });
                }
            }
            _ => {
                return Err(PolyError::Syntax {
                    position,
                    message: format!("unexpected character `{}`", c),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.position)
            .unwrap_or_else(|| {
                self.tokens.last().map(|t| t.position + 1).unwrap_or(0)
            })
    }

    fn bump(&mut self) -> Option<&TokenKind> {
        let t = self.tokens.get(self.pos).map(|t| &t.kind);
        self.pos += 1;
        t
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<(), PolyError> {
        let position = self.position();
        match self.bump() {
            Some(k) if k == kind => Ok(()),
            _ => Err(PolyError::Syntax {
                position,
                message: format!("expected {}", what),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut negate = false;
        match self.peek() {
            Some(TokenKind::Minus) => {
                self.bump();
                negate = true;
            }
            Some(TokenKind::Plus) => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.parse_term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = acc.add(&t);
                }
                Some(TokenKind::Minus) => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(TokenKind::Star) => {
                    self.bump();
                    let f = self.parse_factor()?;
                    acc = acc.mul(&f);
                }
                Some(TokenKind::Int(_)) | Some(TokenKind::Var(_)) | Some(TokenKind::LParen) => {
                    let f = self.parse_factor()?;
                    acc = acc.mul(&f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_exponent(&mut self) -> Result<u32, PolyError> {
        // Caller has consumed the caret.
        let position = self.position();
        match self.bump() {
            Some(TokenKind::Int(n)) => n.to_u32().ok_or(PolyError::Syntax {
                position,
                message: "exponent out of range".into(),
            }),
            _ => Err(PolyError::Syntax {
                position,
                message: "expected integer exponent after `^`".into(),
            }),
        }
    }

    fn parse_factor(&mut self) -> Result<Polynomial, PolyError> {
        let position = self.position();
        match self.peek().cloned() {
            Some(TokenKind::Int(n)) => {
                self.bump();
                Ok(Polynomial::constant(
                    self.vars,
                    Rational::from_integer(n),
                ))
            }
            Some(TokenKind::Var(idx)) => {
                self.bump();
                let mut e = 1;
                if let Some(TokenKind::Caret) = self.peek() {
                    self.bump();
                    e = self.parse_exponent()?;
                }
                let mut p = Polynomial::zero(self.vars);
                p.terms.insert(
                    {
                        let mut exps = vec![0u32; self.vars.len()];
                        exps[idx] += e;
                        ExponentVector::new(exps)
                    },
                    Rational::one(),
                );
                if e == 0 {
                    p = Polynomial::constant(self.vars, Rational::one());
                }
                Ok(p)
            }
            Some(TokenKind::LParen) => {
                self.bump();
                // A parenthesized rational literal `(p/q)` (optionally with a
                // signed numerator), otherwise a parenthesized expression.
                if let Some(rat) = self.try_rational_literal()? {
                    return Ok(Polynomial::constant(self.vars, rat));
                }
                let inner = self.parse_expr()?;
                self.expect(&TokenKind::RParen, "closing `)`")?;
                if let Some(TokenKind::Caret) = self.peek() {
                    self.bump();
                    let e = self.parse_exponent()?;
                    return Ok(inner.pow(e));
                }
                Ok(inner)
            }
            _ => Err(PolyError::Syntax {
                position,
                message: "expected a coefficient, variable, or `(`".into(),
            }),
        }
    }

    /// After an already-consumed `(`, recognize `p/q)` or `-p/q)`; rewinds
    /// and returns `None` when the lookahead does not match.
    fn try_rational_literal(&mut self) -> Result<Option<Rational>, PolyError> {
        let save = self.pos;
        let mut negative = false;
        if let Some(TokenKind::Minus) = self.peek() {
            self.bump();
            negative = true;
        }
        let numer = match self.peek().cloned() {
            Some(TokenKind::Int(n)) => {
                self.bump();
                n
            }
            _ => {
                self.pos = save;
                return Ok(None);
            }
        };
        if self.peek() != Some(&TokenKind::Slash) {
            self.pos = save;
            return Ok(None);
        }
        self.bump();
        let position = self.position();
        let denom = match self.bump() {
            Some(TokenKind::Int(n)) => n.clone(),
            _ => {
                return Err(PolyError::Syntax {
                    position,
                    message: "expected denominator".into(),
                })
            }
        };
        if denom.is_zero() {
            return Err(PolyError::Syntax {
                position,
                message: "zero denominator".into(),
            });
        }
        self.expect(&TokenKind::RParen, "closing `)` of rational literal")?;
        let mut r = Rational::new(numer, denom);
        if negative {
            r = -r;
        }
        Ok(Some(r))
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::sub(self, rhs)
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XYZU: [&str; 4] = ["x", "y", "z", "u"];

    fn p(text: &str) -> Polynomial {
        Polynomial::parse(text, &XYZU).expect("parse")
    }

    #[test]
    fn parses_unit_coefficient_sums() {
        let f = p("x^2 + y^3 + z^5 + u^7");
        assert_eq!(f.num_terms(), 4);
        assert_eq!(f.coeff(&ExponentVector::new(vec![2, 0, 0, 0])), rat(1));
        assert_eq!(f.coeff(&ExponentVector::new(vec![0, 0, 0, 7])), rat(1));
    }

    #[test]
    fn juxtaposition_is_product() {
        let f = p("xy + z^2");
        assert_eq!(f.num_terms(), 2);
        assert_eq!(f.coeff(&ExponentVector::new(vec![1, 1, 0, 0])), rat(1));
        assert_eq!(p("xy + z^2"), p("x*y + z^2"));
    }

    #[test]
    fn rational_coefficients_and_signs() {
        let f = p("(1/2)*u^2 - z");
        assert_eq!(f.coeff(&ExponentVector::new(vec![0, 0, 0, 2])), frac(1, 2));
        assert_eq!(f.coeff(&ExponentVector::new(vec![0, 0, 1, 0])), rat(-1));
        let g = p("(-3/4)*x + 2");
        assert_eq!(g.coeff(&ExponentVector::new(vec![1, 0, 0, 0])), frac(-3, 4));
        assert_eq!(g.constant_term(), rat(2));
    }

    #[test]
    fn unknown_variables_are_reported() {
        match Polynomial::parse("x + w", &XYZU) {
            Err(PolyError::UnknownVariable { name, .. }) => assert_eq!(name, "w"),
            other => panic!("expected unknown-variable error, got {:?}", other),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match Polynomial::parse("x + ^2", &XYZU) {
            Err(PolyError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn canonical_print_order_is_graded() {
        let f = p("u^7 + x^2 + z^5 + y^3");
        assert_eq!(f.to_string(), "x^2 + y^3 + z^5 + u^7");
        let g = p("z^2 + xy");
        assert_eq!(g.to_string(), "x*y + z^2");
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "x^2 + y^3 + z^5 + u^7",
            "xy + z^2 - u^2",
            "(1/2)*u^2 - z + 3",
            "-x + (2/3)*y^4*z - 7*u",
            "0",
        ] {
            let f = p(text);
            let printed = f.to_string();
            let reparsed = Polynomial::parse(&printed, &XYZU).expect("reparse");
            assert_eq!(f, reparsed, "round trip failed for `{}`", text);
            assert_eq!(printed, reparsed.to_string());
        }
    }

    #[test]
    fn weighted_order_examples() {
        let f = p("x^2 + y^3 + z^5 + u^7");
        let w = vec![rat(3), rat(2), rat(2), rat(1)];
        assert_eq!(f.weighted_order(&w), Some(rat(6)));
        let zero = Polynomial::zero(&XYZU);
        assert_eq!(zero.weighted_order(&w), None);
        let g = p("xy + z^2 + u^2");
        let half = vec![frac(1, 2), frac(1, 2), frac(1, 2), rat(1)];
        assert_eq!(g.weighted_order(&half), Some(rat(1)));
    }

    #[test]
    fn weighted_initial_form_collects_minimal_terms() {
        let f = p("x^2 + y^3 + z^5 + u^7");
        let w = vec![rat(3), rat(2), rat(2), rat(1)];
        let init = f.weighted_initial_form(&w);
        assert_eq!(init, p("x^2 + y^3"));
    }

    #[test]
    fn truncation_drops_high_degrees_and_is_idempotent() {
        let f = p("x^2 + u^9");
        assert_eq!(f.truncate(8), p("x^2"));
        assert_eq!(f.truncate(9), f);
        assert_eq!(f.truncate(8).truncate(8), f.truncate(8));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(p("z^4 + u^6").multiplicity(), Some(4));
        assert_eq!(p("1 + x").multiplicity(), Some(0));
        assert_eq!(p("yz^3 + u^5").multiplicity(), Some(4));
        assert_eq!(Polynomial::zero(&XYZU).multiplicity(), None);
    }

    #[test]
    fn substitution_examples() {
        let f = p("x^2 + y^2*z");
        let images = vec![p("x"), p("y"), p("z - u^2"), p("u")];
        assert_eq!(f.substitute(&images).unwrap(), p("x^2 + y^2*z - y^2*u^2"));

        let identity: Vec<Polynomial> =
            XYZU.iter().map(|v| Polynomial::variable(&XYZU, v)).collect();
        let g = p("xy + z^2 - (1/3)*u^5");
        assert_eq!(g.substitute(&identity).unwrap(), g);
    }

    #[test]
    fn substitution_into_extended_ring() {
        // x -> x*t, y -> y*t, z -> z*t lands xy + z^2 on t^2*(xy + z^2).
        let tvars = ["x", "y", "z", "u", "t"];
        let f = p("xy + z^2");
        let images = vec![
            Polynomial::parse("x*t", &tvars).unwrap(),
            Polynomial::parse("y*t", &tvars).unwrap(),
            Polynomial::parse("z*t", &tvars).unwrap(),
            Polynomial::parse("u", &tvars).unwrap(),
        ];
        let expected = Polynomial::parse("t^2*(xy + z^2)", &tvars).unwrap();
        assert_eq!(f.substitute(&images).unwrap(), expected);
    }

    #[test]
    fn substitution_truncated_matches_full_then_truncate() {
        let f = p("x^3 + y^2*z^2 + u^6");
        let images = vec![p("x + z^2"), p("y"), p("z + u^3"), p("u")];
        let full = f.substitute(&images).unwrap().truncate(7);
        let trunc = f.substitute_truncated(&images, 7).unwrap();
        assert_eq!(full, trunc);
    }

    #[test]
    fn derivative_and_coefficient_extraction() {
        let f = p("x^2*y + z^3");
        assert_eq!(f.derivative(0), p("2*xy"));
        assert_eq!(f.derivative(2), p("3*z^2"));
        assert_eq!(f.coefficient_of(0, 2), p("y"));
        assert_eq!(f.coefficient_of(2, 0), p("x^2*y"));
    }

    #[test]
    fn restrict_and_embed() {
        let f = p("z^2 + u^3");
        let g = f.restrict_vars(&[2, 3]).unwrap();
        assert_eq!(g.vars(), &["z".to_string(), "u".to_string()]);
        assert_eq!(g.to_string(), "z^2 + u^3");
        let back = g.embed(&XYZU, &[2, 3]);
        assert_eq!(back, f);
        assert!(matches!(
            p("x + z").restrict_vars(&[2, 3]),
            Err(PolyError::VariableInUse { .. })
        ));
    }

    #[test]
    fn rational_strings_are_exact() {
        assert_eq!(rational_string(&frac(3, 5)), "3/5");
        assert_eq!(rational_string(&rat(-4)), "-4");
        assert_eq!(rational_string(&frac(-1, 2)), "-1/2");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_rational() -> impl Strategy<Value = Rational> {
            (any::<i32>(), 1u32..40).prop_map(|(n, d)| {
                Rational::new(BigInt::from(n), BigInt::from(d))
            })
        }

        fn arb_poly() -> impl Strategy<Value = Polynomial> {
            proptest::collection::vec(
                (
                    proptest::collection::vec(0u32..5, 4),
                    -20i64..20,
                ),
                0..6,
            )
            .prop_map(|terms| {
                Polynomial::from_terms(
                    &XYZU,
                    terms
                        .into_iter()
                        .map(|(exps, c)| (ExponentVector::new(exps), rat(c)))
                        .collect(),
                )
            })
        }

        proptest! {
            #[test]
            fn add_commutes(a in arb_poly(), b in arb_poly()) {
                prop_assert_eq!(a.add(&b), b.add(&a));
            }

            #[test]
            fn mul_commutes_and_associates(
                a in arb_poly(), b in arb_poly(), c in arb_poly()
            ) {
                prop_assert_eq!(a.mul(&b), b.mul(&a));
                prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            }

            #[test]
            fn exact_rational_arithmetic(a in arb_rational(), b in arb_rational()) {
                let sum = &a + &b;
                prop_assert_eq!(&sum - &b, a);
            }

            #[test]
            fn parse_print_fixed_point(a in arb_poly()) {
                let printed = a.to_string();
                let reparsed = Polynomial::parse(&printed, &XYZU).unwrap();
                prop_assert_eq!(&reparsed, &a);
                prop_assert_eq!(reparsed.to_string(), printed);
            }

            #[test]
            fn weighted_order_superadditive(a in arb_poly(), b in arb_poly()) {
                let w = vec![rat(3), rat(2), rat(2), rat(1)];
                let prod = a.mul(&b);
                match (a.weighted_order(&w), b.weighted_order(&w), prod.weighted_order(&w)) {
                    (Some(wa), Some(wb), Some(wp)) => prop_assert!(wp >= wa + wb),
                    (Some(_), Some(_), None) => {} // cancellation to zero
                    (None, _, wp) | (_, None, wp) => prop_assert!(wp.is_none()),
                }
            }

            #[test]
            fn weighted_order_additive_on_monomials(
                ea in proptest::collection::vec(0u32..6, 4),
                eb in proptest::collection::vec(0u32..6, 4),
            ) {
                let w = vec![rat(3), rat(2), rat(2), rat(1)];
                let a = Polynomial::from_terms(
                    &XYZU, vec![(ExponentVector::new(ea), rat(5))]);
                let b = Polynomial::from_terms(
                    &XYZU, vec![(ExponentVector::new(eb), frac(1, 3))]);
                let prod = a.mul(&b);
                prop_assert_eq!(
                    prod.weighted_order(&w).unwrap(),
                    a.weighted_order(&w).unwrap() + b.weighted_order(&w).unwrap()
                );
            }

            #[test]
            fn substitution_distributes(a in arb_poly(), b in arb_poly()) {
                let images = vec![
                    Polynomial::parse("x + y", &XYZU).unwrap(),
                    Polynomial::parse("y - z^2", &XYZU).unwrap(),
                    Polynomial::parse("z", &XYZU).unwrap(),
                    Polynomial::parse("u + x", &XYZU).unwrap(),
                ];
                let sum = a.add(&b).substitute(&images).unwrap();
                prop_assert_eq!(
                    sum,
                    a.substitute(&images).unwrap().add(&b.substitute(&images).unwrap())
                );
                let prod = a.mul(&b).substitute(&images).unwrap();
                prop_assert_eq!(
                    prod,
                    a.substitute(&images).unwrap().mul(&b.substitute(&images).unwrap())
                );
            }

            #[test]
            fn truncate_idempotent(a in arb_poly(), bound in 0u32..12) {
                prop_assert_eq!(a.truncate(bound).truncate(bound), a.truncate(bound));
            }
        }
    }
}
