//! Exact sparse multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] is a map from [`Monomial`] exponent vectors to nonzero
//! [`Rational`] coefficients, tied to a shared [`VarTable`]. Zero coefficients
//! are never stored, so two polynomials are equal exactly when their maps are.
//! Monomials compare graded-lexicographically in the table order, which is
//! also the printing order (descending).
//!
//! The text format accepted by [`Polynomial::parse`] is
//!
//! ```text
//! expression ::= ['-'] term (('+'|'-') term)*
//! term       ::= factor ('*' factor)*
//! factor     ::= rational | variable ('^' positive-integer)?
//! rational   ::= integer ('/' positive-integer)?
//! variable   ::= [a-zA-Z][a-zA-Z0-9_]*
//! ```

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;
use thiserror::Error;

/// Arbitrary-precision rational coefficient.
pub type Rational = BigRational;

/// Builds the rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p` or `p/q` into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, PolyError> {
    let text = text.trim();
    let bad = || PolyError::Syntax {
        line: 1,
        column: 1,
        message: format!("`{text}` is not a rational number"),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable tables differ: [{left}] vs [{right}]")]
    TableMismatch { left: String, right: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable table: {0}")]
    InvalidTable(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("divisor is neither a nonzero constant nor monic in `{var}`")]
    NotMonic { var: String },
    #[error("variable `{0}` is unbound")]
    Unbound(String),
}

/// Index of a variable inside a [`VarTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub usize);

/// Variables of the standard table, in canonical order.
pub mod vars {
    use super::Var;
    pub const X: Var = Var(0);
    pub const Y: Var = Var(1);
    pub const Z: Var = Var(2);
    pub const T: Var = Var(3);
    pub const LAMBDA: Var = Var(4);
    pub const W: Var = Var(5);
}

const STANDARD_NAMES: [&str; 6] = ["x", "y", "z", "t", "lambda", "w"];

/// Ordered list of variable names shared by a family of polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(PolyError::InvalidTable(format!(
                    "`{name}` is not a valid variable name"
                )));
            }
            if names[..i].contains(name) {
                return Err(PolyError::InvalidTable(format!("duplicate variable `{name}`")));
            }
        }
        Ok(Arc::new(Self { names }))
    }

    /// The canonical table `x, y, z, t, lambda, w` used throughout the toolkit.
    pub fn standard() -> Arc<Self> {
        static STANDARD: OnceLock<Arc<VarTable>> = OnceLock::new();
        STANDARD
            .get_or_init(|| VarTable::new(STANDARD_NAMES).expect("standard table is valid"))
            .clone()
    }

    /// The standard table followed by user-supplied extra variables.
    pub fn with_extras<I, S>(extras: I) -> Result<Arc<Self>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names = STANDARD_NAMES
            .iter()
            .map(|s| s.to_string())
            .chain(extras.into_iter().map(Into::into));
        Self::new(names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<Var> {
        self.names.iter().position(|n| n == name).map(Var)
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn check(&self, v: Var) -> Result<(), PolyError> {
        if v.0 < self.names.len() {
            Ok(())
        } else {
            Err(PolyError::UnknownVariable(format!("#{}", v.0)))
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

/// Exponent vector indexed by a [`VarTable`].
///
/// Ordered graded-lexicographically: total degree first, then the exponent of
/// the earliest variable in the table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 6]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Self(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Self(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0[v.0]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn with_exp(&self, v: Var, e: u32) -> Self {
        let mut m = self.clone();
        m.0[v.0] = e;
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of [`Polynomial::exact_div`].
#[derive(Debug, Clone, PartialEq)]
pub enum Division {
    Exact(Polynomial),
    /// The divisor does not divide; `remainder` is the nonzero remainder of
    /// division with respect to the chosen variable.
    Remainder {
        quotient: Polynomial,
        remainder: Polynomial,
    },
}

impl Division {
    pub fn into_exact(self) -> Option<Polynomial> {
        match self {
            Division::Exact(q) => Some(q),
            Division::Remainder { .. } => None,
        }
    }
}

#[derive(Clone)]
pub struct Polynomial {
    vars: Arc<VarTable>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Polynomial {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        Self {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Arc<VarTable>, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn var(vars: &Arc<VarTable>, v: Var) -> Self {
        Self::monomial(vars, v, 1, Rational::one())
    }

    /// `c * v^e`.
    pub fn monomial(vars: &Arc<VarTable>, v: Var, e: u32, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            let m = Monomial::one(vars.len()).with_exp(v, e);
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_term(vars: &Arc<VarTable>, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.0.len(), vars.len(), "monomial length must match the table");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Standard-table constructors, used pervasively by the rest of the crate.
    pub fn std_var(v: Var) -> Self {
        Self::var(&VarTable::standard(), v)
    }

    pub fn std_const(c: Rational) -> Self {
        Self::constant(&VarTable::standard(), c)
    }

    pub fn std_zero() -> Self {
        Self::zero(&VarTable::standard())
    }

    pub fn std_one() -> Self {
        Self::one(&VarTable::standard())
    }

    fn from_map(vars: &Arc<VarTable>, map: HashMap<Monomial, Rational>) -> Self {
        Self {
            vars: vars.clone(),
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The coefficient if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.vars.len()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Smallest exponent of `v` over all terms (0 for the zero polynomial).
    pub fn min_degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    fn check_table(&self, other: &Self) -> Result<(), PolyError> {
        if same_table(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(PolyError::TableMismatch {
                left: self.vars.names.join(","),
                right: other.vars.names.join(","),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_table(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m, c.clone());
        }
        Ok(Self {
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_table(other)?;
        Ok(self.mul_impl(other, None))
    }

    /// Product with every monomial of `v`-degree `>= bound` discarded.
    pub fn mul_truncated(&self, other: &Self, v: Var, bound: u32) -> Self {
        self.check_table(other).expect("variable tables must match");
        self.mul_impl(other, Some((v, bound)))
    }

    fn mul_impl(&self, other: &Self, trunc: Option<(Var, u32)>) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.vars);
        }
        // integer numerators over a common denominator; one normalization per
        // output term instead of one per product
        let (da, na) = self.integer_form();
        let (db, nb) = other.integer_form();
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.len().max(other.len()) * 2);
        for (ma, ca) in &na {
            for (mb, cb) in &nb {
                if let Some((v, bound)) = trunc {
                    if ma.exp(v) + mb.exp(v) >= bound {
                        continue;
                    }
                }
                let c = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    Entry::Occupied(mut slot) => *slot.get_mut() += c,
                    Entry::Vacant(slot) => {
                        slot.insert(c);
                    }
                }
            }
        }
        let den = da * db;
        Self {
            vars: self.vars.clone(),
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| {
                    let c = if den.is_one() {
                        Rational::from_integer(c)
                    } else {
                        Rational::new(c, den.clone())
                    };
                    (m, c)
                })
                .collect(),
        }
    }

    /// `(D, n)` with `self = n / D` and `n` integral.
    fn integer_form(&self) -> (BigInt, Vec<(&Monomial, BigInt)>) {
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .terms
            .iter()
            .map(|(m, c)| (m, c.numer() * (&den / c.denom())))
            .collect();
        (den, nums)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by the monomial `v^e`.
    pub fn shift(&self, v: Var, e: u32) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.0[v.0] += e;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    /// Divides by the monomial `v^e`; `None` unless every term is divisible.
    pub fn unshift(&self, v: Var, e: u32) -> Option<Self> {
        if self.terms.keys().any(|m| m.exp(v) < e) {
            return None;
        }
        Some(Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.0[v.0] -= e;
                    (m, c.clone())
                })
                .collect(),
        })
    }

    pub fn pow(&self, n: u32) -> Self {
        self.pow_impl(n, None)
    }

    pub fn pow_truncated(&self, n: u32, v: Var, bound: u32) -> Self {
        self.pow_impl(n, Some((v, bound)))
    }

    fn pow_impl(&self, mut n: u32, trunc: Option<(Var, u32)>) -> Self {
        let mut result = Self::one(&self.vars).truncated_opt(trunc);
        let mut base = self.truncated_opt(trunc);
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_impl(&base, trunc);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_impl(&base, trunc);
            }
        }
        result
    }

    fn truncated_opt(&self, trunc: Option<(Var, u32)>) -> Self {
        match trunc {
            Some((v, bound)) => self.truncate(v, bound),
            None => self.clone(),
        }
    }

    /// Drops every monomial whose `v`-exponent is `>= bound`.
    pub fn truncate(&self, v: Var, bound: u32) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) < bound)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The coefficient of `v^e`, as a polynomial free of `v`.
    pub fn coefficient_of(&self, v: Var, e: u32) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) == e)
                .map(|(m, c)| (m.with_exp(v, 0), c.clone()))
                .collect(),
        }
    }

    /// Splits `self = sum_m m * c_m` where `m` ranges over monomials in `split`
    /// and each `c_m` is free of those variables. Keys are exponent vectors
    /// aligned with `split`.
    pub fn coefficients_in(&self, split: &[Var]) -> BTreeMap<Vec<u32>, Polynomial> {
        let mut out: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = split.iter().map(|&v| m.exp(v)).collect();
            let mut rest = m.clone();
            for &v in split {
                rest.0[v.0] = 0;
            }
            let entry = out.entry(key).or_insert_with(|| Self::zero(&self.vars));
            add_term(&mut entry.terms, &rest, c.clone());
        }
        out
    }

    /// Formal partial derivative.
    pub fn pdiff(&self, v: Var) -> Result<Self, PolyError> {
        self.vars.check(v)?;
        Ok(self.derivative(v))
    }

    pub(crate) fn derivative(&self, v: Var) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) > 0)
                .map(|(m, c)| {
                    let e = m.exp(v);
                    (m.with_exp(v, e - 1), c * Rational::from_integer(BigInt::from(e)))
                })
                .collect(),
        }
    }

    /// Antiderivative in `v` with zero constant of integration.
    pub fn integrate(&self, v: Var) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let e = m.exp(v) + 1;
                    (m.with_exp(v, e), c / Rational::from_integer(BigInt::from(e)))
                })
                .collect(),
        }
    }

    /// Simultaneous substitution; unbound variables map to themselves.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Polynomial>) -> Result<Self, PolyError> {
        self.check_bindings(bindings)?;
        Ok(self.substitute_impl(bindings, None))
    }

    /// Substitution computed modulo `v^bound`.
    pub fn substitute_truncated(
        &self,
        bindings: &BTreeMap<Var, Polynomial>,
        v: Var,
        bound: u32,
    ) -> Result<Self, PolyError> {
        self.check_bindings(bindings)?;
        Ok(self.substitute_impl(bindings, Some((v, bound))))
    }

    fn check_bindings(&self, bindings: &BTreeMap<Var, Polynomial>) -> Result<(), PolyError> {
        for (v, image) in bindings {
            self.vars.check(*v)?;
            self.check_table(image)?;
        }
        Ok(())
    }

    fn substitute_impl(
        &self,
        bindings: &BTreeMap<Var, Polynomial>,
        trunc: Option<(Var, u32)>,
    ) -> Self {
        let bound_vars: Vec<Var> = bindings.keys().copied().collect();
        // self = sum over E of coeff_E * prod v^E_v with coeff_E free of the
        // bound variables; each coeff_E meets the product of powers once
        let mut groups: BTreeMap<Vec<u32>, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = bound_vars.iter().map(|&v| m.exp(v)).collect();
            let mut free = m.clone();
            for &v in &bound_vars {
                free.0[v.0] = 0;
            }
            groups.entry(key).or_default().insert(free, c.clone());
        }
        // powers[i][e] = image(bound_vars[i])^e, truncated when requested
        let mut powers: Vec<Vec<Polynomial>> = bound_vars
            .iter()
            .map(|v| vec![Self::one(&self.vars), bindings[v].truncated_opt(trunc)])
            .collect();
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (key, terms) in groups {
            let coeff = Self {
                vars: self.vars.clone(),
                terms,
            }
            .truncated_opt(trunc);
            let mut prod: Option<Polynomial> = None;
            for (i, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_impl(&powers[i][1], trunc);
                    powers[i].push(next);
                }
                let factor = &powers[i][e as usize];
                prod = Some(match prod {
                    None => factor.clone(),
                    Some(p) => p.mul_impl(factor, trunc),
                });
            }
            let part = match prod {
                None => coeff,
                Some(p) => coeff.mul_impl(&p, trunc),
            };
            for (m, c) in part.terms {
                add_hash_term(&mut acc, m, c);
            }
        }
        Self::from_map(&self.vars, acc)
    }

    /// Division by `q`, which must be a nonzero constant or monic in `v`.
    ///
    /// Returns the quotient when the division is exact, otherwise a
    /// [`Division::Remainder`] report.
    pub fn exact_div(&self, q: &Polynomial, v: Var) -> Result<Division, PolyError> {
        let (quotient, remainder) = self.div_rem_monic(q, v)?;
        Ok(if remainder.is_zero() {
            Division::Exact(quotient)
        } else {
            Division::Remainder {
                quotient,
                remainder,
            }
        })
    }

    /// `self = quotient * q + remainder` with `deg_v(remainder) < deg_v(q)`.
    pub fn div_rem_monic(&self, q: &Polynomial, v: Var) -> Result<(Self, Self), PolyError> {
        self.check_table(q)?;
        self.vars.check(v)?;
        self.div_rem_impl(q, v, None)
    }

    /// Like [`Self::div_rem_monic`], computed modulo `tv^bound`.
    pub fn div_rem_monic_truncated(
        &self,
        q: &Polynomial,
        v: Var,
        tv: Var,
        bound: u32,
    ) -> Result<(Self, Self), PolyError> {
        self.check_table(q)?;
        self.vars.check(v)?;
        self.div_rem_impl(q, v, Some((tv, bound)))
    }

    fn div_rem_impl(
        &self,
        q: &Polynomial,
        v: Var,
        trunc: Option<(Var, u32)>,
    ) -> Result<(Self, Self), PolyError> {
        let not_monic = || PolyError::NotMonic {
            var: self.vars.name(v).to_string(),
        };
        let q = q.truncated_opt(trunc);
        if let Some(c) = q.as_constant() {
            if c.is_zero() {
                return Err(not_monic());
            }
            let inv = c.recip();
            return Ok((self.scale(&inv).truncated_opt(trunc), Self::zero(&self.vars)));
        }
        let dq = q.degree_in(v);
        if !q.coefficient_of(v, dq).is_one() {
            return Err(not_monic());
        }
        let mut rem = self.truncated_opt(trunc);
        let mut quot = Self::zero(&self.vars);
        while !rem.is_zero() {
            let dr = rem.degree_in(v);
            if dr < dq {
                break;
            }
            let lead = Self {
                vars: self.vars.clone(),
                terms: rem
                    .terms
                    .iter()
                    .filter(|(m, _)| m.exp(v) == dr)
                    .map(|(m, c)| (m.with_exp(v, dr - dq), c.clone()))
                    .collect(),
            };
            rem = &rem - &lead.mul_impl(&q, trunc);
            quot = &quot + &lead;
        }
        Ok((quot, rem))
    }

    /// Exact value at a rational point. Only variables occurring in `self`
    /// need to be bound.
    pub fn evaluate(&self, point: &BTreeMap<Var, Rational>) -> Result<Rational, PolyError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let value = point
                    .get(&Var(i))
                    .ok_or_else(|| PolyError::Unbound(self.vars.names[i].clone()))?;
                term *= num_traits::pow(value.clone(), e as usize);
            }
            total += term;
        }
        Ok(total)
    }

    /// Value at the point where every variable is zero.
    pub fn value_at_origin(&self) -> Rational {
        self.constant_term()
    }

    pub fn map_coefficients(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn parse(text: &str, vars: &Arc<VarTable>) -> Result<Self, PolyError> {
        Parser::new(text, vars).parse()
    }

    /// Parses against [`VarTable::standard`].
    pub fn parse_std(text: &str) -> Result<Self, PolyError> {
        Self::parse(text, &VarTable::standard())
    }

    fn write_monomial(&self, f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
        let mut first = true;
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(&self.vars.names[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

fn add_term(terms: &mut BTreeMap<Monomial, Rational>, m: &Monomial, c: Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(m.clone()) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn add_hash_term(acc: &mut HashMap<Monomial, Rational>, m: Monomial, c: Rational) {
    match acc.get_mut(&m) {
        Some(slot) => *slot += c,
        None => {
            acc.insert(m, c);
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                self.write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Deserializes against the standard variable table.
impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Polynomial::parse_std(&text).map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).expect("variable tables must match")
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
        impl $trait<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    vars: &'a Arc<VarTable>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, vars: &'a Arc<VarTable>) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            vars,
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> PolyError {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        PolyError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Polynomial, PolyError> {
        let mut sign_negative = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign_negative = true;
        }
        let mut acc = Polynomial::zero(self.vars);
        loop {
            let term = self.term()?;
            acc = if sign_negative { &acc - &term } else { &acc + &term };
            match self.peek() {
                None => return Ok(acc),
                Some(b'+') => sign_negative = false,
                Some(b'-') => sign_negative = true,
                Some(c) => {
                    return Err(self.error_at(self.pos, format!("unexpected `{}`", c as char)))
                }
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let at = self.pos;
                    let den = self.positive_integer()?;
                    if den.is_zero() {
                        return Err(self.error_at(at, "zero denominator"));
                    }
                    Ok(Polynomial::constant(self.vars, Rational::new(num, den)))
                } else {
                    Ok(Polynomial::constant(self.vars, Rational::from_integer(num)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                let v = self
                    .vars
                    .index_of(name)
                    .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
                let mut e = 1u32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let n = self.positive_integer()?;
                    e = u32::try_from(&n)
                        .ok()
                        .filter(|&e| e > 0)
                        .ok_or_else(|| self.error_at(at, "exponent must be a positive integer"))?;
                }
                Ok(Polynomial::monomial(self.vars, v, e, Rational::one()))
            }
            Some(c) => Err(self.error_at(self.pos, format!("unexpected `{}`", c as char))),
            None => Err(self.error_at(self.pos, "unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error_at(start, "expected an integer"));
        }
        Ok(self.src[start..self.pos].parse().expect("ascii digits"))
    }

    fn positive_integer(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let at = self.pos;
        let n = self.digits()?;
        if n.is_zero() {
            return Err(self.error_at(at, "expected a positive integer"));
        }
        Ok(n)
    }
}
