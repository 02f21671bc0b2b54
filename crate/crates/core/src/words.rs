//! Polynomial automorphisms of `Q[x,z,t]` (and `Q[lambda,x,z,t]`) as words in
//! shears and diagonal scalings, and the lifting of truncated Hamiltonian
//! flows to such words.
//!
//! A word `[g1, ..., gn]` denotes the ring automorphism `g1 ∘ ... ∘ gn`, so
//! `truncate(w1 ++ w2) = truncate(w1) ∘ truncate(w2)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::truncated_flow;
use crate::poly::vars::{T, W, X, Y, Z};
use crate::poly::{parse_rational, Polynomial, Rational, Var};
use crate::trunc_aut::{potential, TruncatedMap};
use crate::truncated::TruncOrder;

/// An elementary automorphism fixing `x` and `lambda`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorRecord", into = "GeneratorRecord")]
pub enum Generator {
    /// `z -> z + f(x, t, lambda)`.
    ZShear(Polynomial),
    /// `t -> t + g(x, z, lambda)`.
    TShear(Polynomial),
    /// `z -> a z`, `t -> b t`.
    Scale(Rational, Rational),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum GeneratorRecord {
    Zshear { poly: Polynomial },
    Tshear { poly: Polynomial },
    Scale { a: String, b: String },
}

impl TryFrom<GeneratorRecord> for Generator {
    type Error = Error;
    fn try_from(record: GeneratorRecord) -> Result<Self> {
        match record {
            GeneratorRecord::Zshear { poly } => Generator::z_shear(poly),
            GeneratorRecord::Tshear { poly } => Generator::t_shear(poly),
            GeneratorRecord::Scale { a, b } => {
                Generator::scale(parse_rational(&a)?, parse_rational(&b)?)
            }
        }
    }
}

impl From<Generator> for GeneratorRecord {
    fn from(g: Generator) -> Self {
        match g {
            Generator::ZShear(poly) => GeneratorRecord::Zshear { poly },
            Generator::TShear(poly) => GeneratorRecord::Tshear { poly },
            Generator::Scale(a, b) => GeneratorRecord::Scale {
                a: a.to_string(),
                b: b.to_string(),
            },
        }
    }
}

fn forbid(p: &Polynomial, banned: &[Var], what: &str) -> Result<()> {
    if banned.iter().any(|&v| p.contains_var(v)) {
        return Err(Error::InvalidGenerator(format!("{what} `{p}`")));
    }
    Ok(())
}

impl Generator {
    pub fn z_shear(f: Polynomial) -> Result<Self> {
        forbid(&f, &[Z, Y, W], "z-shear may only use x, t, lambda:")?;
        Ok(Self::ZShear(f))
    }

    pub fn t_shear(g: Polynomial) -> Result<Self> {
        forbid(&g, &[T, Y, W], "t-shear may only use x, z, lambda:")?;
        Ok(Self::TShear(g))
    }

    pub fn scale(a: Rational, b: Rational) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroScalar);
        }
        Ok(Self::Scale(a, b))
    }

    pub fn inverse(&self) -> Self {
        match self {
            Self::ZShear(f) => Self::ZShear(-f),
            Self::TShear(g) => Self::TShear(-g),
            Self::Scale(a, b) => Self::Scale(a.recip(), b.recip()),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Self::ZShear(f) | Self::TShear(f) => f.is_zero(),
            Self::Scale(a, b) => a.is_one() && b.is_one(),
        }
    }

    pub fn jacobian_det(&self) -> Rational {
        match self {
            Self::Scale(a, b) => a * b,
            _ => Rational::one(),
        }
    }

    /// The ring map of the generator alone, applied to `p`.
    fn substitute_into(&self, p: &Polynomial) -> Result<Polynomial> {
        let (v, image) = match self {
            Self::ZShear(f) => (Z, &Polynomial::std_var(Z) + f),
            Self::TShear(g) => (T, &Polynomial::std_var(T) + g),
            Self::Scale(a, b) => {
                let bindings = [(Z, Polynomial::std_var(Z).scale(a)), (T, Polynomial::std_var(T).scale(b))];
                return Ok(p.substitute(&bindings.into_iter().collect())?);
            }
        };
        Ok(p.substitute(&[(v, image)].into_iter().collect())?)
    }

    /// Replaces the current images `(zi, ti)` of `(z, t)` by the images
    /// under `current ∘ self`, optionally modulo `x^bound`.
    fn step(&self, zi: &mut Polynomial, ti: &mut Polynomial, bound: Option<u32>) {
        let subst = |p: &Polynomial, v: Var, image: &Polynomial| {
            let bindings: BTreeMap<Var, Polynomial> = [(v, image.clone())].into_iter().collect();
            match bound {
                Some(b) => p.substitute_truncated(&bindings, X, b),
                None => p.substitute(&bindings),
            }
            .expect("standard variable table")
        };
        match self {
            Self::ZShear(f) => *zi = &*zi + &subst(f, T, ti),
            Self::TShear(g) => *ti = &*ti + &subst(g, Z, zi),
            Self::Scale(a, b) => {
                *zi = zi.scale(a);
                *ti = ti.scale(b);
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZShear(p) => write!(f, "zshear({p})"),
            Self::TShear(p) => write!(f, "tshear({p})"),
            Self::Scale(a, b) => write!(f, "scale({a}, {b})"),
        }
    }
}

/// A composition word; leftmost generator outermost.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AutWord {
    generators: Vec<Generator>,
}

impl AutWord {
    /// Drops identity generators.
    pub fn new(generators: impl IntoIterator<Item = Generator>) -> Self {
        Self {
            generators: generators.into_iter().filter(|g| !g.is_identity()).collect(),
        }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Whether some generator has a `lambda` coefficient.
    pub fn uses_lambda(&self) -> bool {
        self.generators.iter().any(|g| match g {
            Generator::ZShear(p) | Generator::TShear(p) => p.contains_var(crate::poly::vars::LAMBDA),
            Generator::Scale(..) => false,
        })
    }

    /// `self ∘ other`.
    pub fn then(&self, other: &AutWord) -> AutWord {
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        AutWord { generators }
    }

    pub fn invert(&self) -> AutWord {
        AutWord {
            generators: self.generators.iter().rev().map(Generator::inverse).collect(),
        }
    }

    fn images_impl(&self, bound: Option<u32>) -> (Polynomial, Polynomial) {
        let mut zi = Polynomial::std_var(Z);
        let mut ti = Polynomial::std_var(T);
        for g in &self.generators {
            g.step(&mut zi, &mut ti, bound);
        }
        (zi, ti)
    }

    /// Images of `z` and `t`.
    pub fn images(&self) -> (Polynomial, Polynomial) {
        self.images_impl(None)
    }

    /// `p(images)`, computed one generator at a time from the innermost
    /// one. Intermediate degrees stay near those of the result, whereas
    /// substituting the full images expands large powers first.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        self.generators
            .iter()
            .rev()
            .try_fold(p.clone(), |acc, g| g.substitute_into(&acc))
    }

    pub fn truncate(&self, d: TruncOrder) -> TruncatedMap {
        let (zi, ti) = self.images_impl(Some(d.get()));
        TruncatedMap::new(zi, ti, d)
    }

    /// Upper bound for the total degree of the images, tracked through the
    /// word: a shear term `x^a t^b` contributes `a + b deg T`. Cheap, unlike
    /// [`AutWord::images`], whose degree grows multiplicatively along
    /// alternating nonlinear shears.
    pub fn degree_bound(&self) -> u64 {
        let (mut dz, mut dt) = (1u64, 1u64);
        let through = |f: &Polynomial, v: Var, dv: u64| {
            f.terms()
                .map(|(m, _)| {
                    let e = m.exp(v) as u64;
                    (m.total_degree() as u64 - e).saturating_add(e.saturating_mul(dv))
                })
                .max()
                .unwrap_or(0)
        };
        for g in &self.generators {
            match g {
                Generator::ZShear(f) => dz = dz.max(through(f, T, dt)),
                Generator::TShear(g) => dt = dt.max(through(g, Z, dz)),
                Generator::Scale(..) => {}
            }
        }
        dz.max(dt)
    }

    pub fn jacobian_det(&self) -> Rational {
        self.generators
            .iter()
            .map(Generator::jacobian_det)
            .fold(Rational::one(), |acc, c| acc * c)
    }
}

impl fmt::Display for AutWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "]")
    }
}

/// Parses the display form `[zshear(f), tshear(g), scale(a, b)]`.
impl std::str::FromStr for AutWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidGenerator(format!("{why} in `{text}`"));
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| bad("expected [...]"))?;
        let mut generators = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| bad("expected `(`"))?;
            let close = rest.find(')').ok_or_else(|| bad("expected `)`"))?;
            if close < open {
                return Err(bad("unbalanced parentheses"));
            }
            let (name, arg) = (rest[..open].trim(), &rest[open + 1..close]);
            generators.push(match name {
                "zshear" => Generator::z_shear(Polynomial::parse_std(arg)?)?,
                "tshear" => Generator::t_shear(Polynomial::parse_std(arg)?)?,
                "scale" => {
                    let (a, b) = arg.split_once(',').ok_or_else(|| bad("scale needs two scalars"))?;
                    Generator::scale(parse_rational(a.trim())?, parse_rational(b.trim())?)?
                }
                other => return Err(bad(&format!("unknown generator `{other}`"))),
            });
            rest = rest[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(bad("trailing comma"));
                }
            } else if !rest.is_empty() {
                return Err(bad("expected `,`"));
            }
        }
        Ok(AutWord { generators })
    }
}

pub fn apply(w: &AutWord, p: &Polynomial) -> Result<Polynomial> {
    w.apply(p)
}

pub fn invert_word(w: &AutWord) -> AutWord {
    w.invert()
}

pub fn truncate_word(w: &AutWord, d: TruncOrder) -> TruncatedMap {
    w.truncate(d)
}

pub fn jacobian_det_word(w: &AutWord) -> Rational {
    w.jacobian_det()
}

fn rational(n: u32) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn check_potential(h: &Polynomial) -> Result<()> {
    if h.contains_var(Y) || h.contains_var(W) {
        return Err(Error::OutsideVariables(h.to_string(), "x, z, t, lambda"));
    }
    Ok(())
}

/// Solves `m * sol = rhs` for a square nonsingular rational `m`, with a
/// right-hand side over `Q[lambda]`.
fn solve(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Polynomial>) -> Vec<Polynomial> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).expect("nonsingular system");
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in &mut m[col][col..] {
            *v = &*v * &inv;
        }
        rhs[col] = rhs[col].scale(&inv);
        let pivot_row = m[col].clone();
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for (v, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *v -= p * &factor;
                }
                rhs[r] = &rhs[r] - &rhs[col].scale(&factor);
            }
        }
    }
    rhs
}

/// A word `W ≡ id mod x^j` with `truncate(W, j+1) = exp(x^j D_h) mod x^{j+1}`.
///
/// Only `h mod x` matters. Pure powers of `t` and `z` become single shears.
/// Mixed monomials use commutators of `x`-divisible shears when `j >= 2`.
/// When `j = 1`, the parts `z g(t)` and `t f(z)` come from squares
/// `(z + g)^2 / 2` and `(t + f)^2 / 2`, and the rest is written as a
/// combination of powers of `t + c z`, each realized by conjugating a z-shear
/// with the linear shear `t -> t + c z`.
pub fn realize_first_order(j: u32, h: &Polynomial) -> Result<AutWord> {
    check_potential(h)?;
    if j == 0 {
        return Err(Error::InvalidParameters("first-order exponent j must be at least 1".into()));
    }
    let h0 = h.coefficient_of(X, 0);
    let xj = Polynomial::std_var(X).pow(j);
    let zv = Polynomial::std_var(Z);
    let tv = Polynomial::std_var(T);

    // coefficient (in lambda) of z^p t^q
    let mut coeffs: BTreeMap<(u32, u32), Polynomial> = h0
        .coefficients_in(&[Z, T])
        .into_iter()
        .filter(|(e, _)| e[0] + e[1] > 0)
        .map(|(e, c)| ((e[0], e[1]), c))
        .collect();

    let mut commutators = Vec::new();
    if j >= 2 {
        let mut by_p: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (&(p, q), c) in coeffs.iter().filter(|((p, q), _)| *p > 0 && *q > 0) {
            let entry = by_p.entry(p).or_insert_with(Polynomial::std_zero);
            *entry = &*entry + &(c * &tv.pow(q));
        }
        coeffs.retain(|(p, q), _| *p == 0 || *q == 0);
        // [z -> z + x A(t), t -> t + x^{j-1} z^p] has field -A' z^p d/dz + A p z^{p-1} d/dt
        for (p, a) in by_p {
            let zs = Generator::z_shear(a.shift(X, 1))?;
            let ts = Generator::t_shear(zv.pow(p).shift(X, j - 1))?;
            commutators.extend([zs.clone(), ts.clone(), zs.inverse(), ts.inverse()]);
        }
    } else {
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let subtract = |coeffs: &mut BTreeMap<(u32, u32), Polynomial>, p: &Polynomial| {
            for (e, c) in p.coefficients_in(&[Z, T]) {
                let entry = coeffs.entry((e[0], e[1])).or_insert_with(Polynomial::std_zero);
                *entry = &*entry - &c;
            }
        };
        // z g(t) + t f(z): conjugating a linear shear by a nonlinear one costs a
        // single factor
        let mut g = Polynomial::std_zero();
        let mut f = Polynomial::std_zero();
        for (&(p, q), c) in &coeffs {
            if p == 1 && q >= 1 {
                g = g + c * &tv.pow(q);
            } else if q == 1 && p >= 2 {
                f = f + c * &zv.pow(p);
            }
        }
        if !g.is_zero() {
            // [z -> z + g, t -> t + x z, z -> z - g] realizes (z + g)^2 / 2
            let square = (&zv + &g).pow(2).scale(&half);
            subtract(&mut coeffs, &square);
            let conj = Generator::z_shear(g)?;
            commutators.extend([conj.clone(), Generator::t_shear(zv.shift(X, 1))?, conj.inverse()]);
        }
        if !f.is_zero() {
            // [t -> t + f, z -> z - x t, t -> t - f] realizes (t + f)^2 / 2
            let square = (&tv + &f).pow(2).scale(&half);
            subtract(&mut coeffs, &square);
            let conj = Generator::t_shear(f)?;
            commutators.extend([conj.clone(), Generator::z_shear(-&tv.shift(X, 1))?, conj.inverse()]);
        }
        coeffs.retain(|_, c| !c.is_zero());

        // G_c(s) with G_c(t + c z) accounting for the remaining mixed part
        let mut families: BTreeMap<u32, Polynomial> = BTreeMap::new();
        let max_deg = coeffs.keys().map(|(p, q)| p + q).max().unwrap_or(0);
        for n in 2..=max_deg {
            let mixed: Vec<Polynomial> = (1..n)
                .map(|p| coeffs.get(&(p, n - p)).cloned().unwrap_or_else(Polynomial::std_zero))
                .collect();
            if mixed.iter().all(Polynomial::is_zero) {
                continue;
            }
            // row p, column c: coefficient of z^p t^{n-p} in (t + c z)^n
            let matrix: Vec<Vec<Rational>> = (1..n)
                .map(|p| {
                    let b = Rational::from_integer(binomial(BigInt::from(n), BigInt::from(p)));
                    (1..n).map(|c| &b * num_traits::pow(rational(c), p as usize)).collect()
                })
                .collect();
            let mu = solve(matrix, mixed);
            for (i, m) in mu.into_iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                let c = i as u32 + 1;
                // subtract m (t + c z)^n from the remaining coefficients
                let power = (&tv + &zv.scale(&rational(c))).pow(n);
                for (e, coef) in power.coefficients_in(&[Z, T]) {
                    let key = (e[0], e[1]);
                    let entry = coeffs.entry(key).or_insert_with(Polynomial::std_zero);
                    *entry = &*entry - &(&coef * &m);
                }
                let g = families.entry(c).or_insert_with(Polynomial::std_zero);
                *g = &*g + &(&m * &Polynomial::std_var(T).pow(n));
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        if coeffs.keys().any(|(p, q)| *p > 0 && *q > 0) {
            return Err(Error::VerificationFailed(
                "mixed terms left after the power-sum decomposition".into(),
            ));
        }
        // conjugate z -> z + x A(t) by t -> t + c z; this realizes the
        // potential -(antiderivative of A)(t + c z), so A = -G'
        for (c, g) in families {
            let conj = Generator::t_shear(zv.scale(&rational(c)))?;
            let shear = Generator::z_shear(-&g.derivative(T).shift(X, 1))?;
            commutators.extend([conj.clone(), shear, conj.inverse()]);
        }
    }

    // pure terms: t^q gives z -> z - q x^j t^{q-1}, z^p gives t -> t + p x^j z^{p-1}
    let mut z_part = Polynomial::std_zero();
    let mut t_part = Polynomial::std_zero();
    for ((p, q), c) in &coeffs {
        if *p == 0 {
            z_part = z_part - c * &tv.pow(q - 1).scale(&rational(*q));
        } else {
            t_part = t_part + c * &zv.pow(p - 1).scale(&rational(*p));
        }
    }
    let mut generators = vec![
        Generator::z_shear(&z_part * &xj)?,
        Generator::t_shear(&t_part * &xj)?,
    ];
    generators.extend(commutators);
    let word = AutWord::new(generators);

    let check = TruncOrder::new(j + 1)?;
    if word.truncate(check) != truncated_flow(h, j, check)? {
        return Err(Error::VerificationFailed(format!(
            "first-order realization of {h} at x^{j}"
        )));
    }
    Ok(word)
}

/// A word whose truncation mod `x^d` is exactly `exp(x^j D_h)`.
pub fn lift_hamiltonian(j: u32, h: &Polynomial, d: TruncOrder) -> Result<AutWord> {
    lift_hamiltonian_bounded(j, h, d, None)
}

/// [`lift_hamiltonian`], abandoned with [`Error::DegreeBudget`] as soon as
/// the partial word's [`AutWord::degree_bound`] exceeds `budget`. Words only
/// grow, so the bound of every prefix is a lower bound for the final one.
pub fn lift_hamiltonian_bounded(
    j: u32,
    h: &Polynomial,
    d: TruncOrder,
    budget: Option<u64>,
) -> Result<AutWord> {
    let check_budget = |word: &AutWord| match budget {
        Some(budget) if word.degree_bound() > budget => Err(Error::DegreeBudget {
            bound: word.degree_bound(),
            budget,
        }),
        _ => Ok(()),
    };
    check_potential(h)?;
    if j == 0 || j >= d.get() {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= j <= d - 1, got j = {j}, d = {d}"
        )));
    }
    let target = truncated_flow(h, j, d)?;
    let mut word = realize_first_order(j, h)?;
    check_budget(&word)?;
    for m in j + 1..d.get() {
        let residual = word.invert().truncate(d).compose(&target)?;
        let (a, b) = residual.first_order_part(m)?;
        let hm = potential(&a, &b)?;
        if !hm.is_zero() {
            word = word.then(&realize_first_order(m, &hm)?);
            check_budget(&word)?;
        }
    }
    if word.truncate(d) != target {
        return Err(Error::VerificationFailed(format!("lift of exp(x^{j} D_h), h = {h}")));
    }
    Ok(word)
}

/// Lift that agrees with the flow modulo the deeper order `target >= d`.
pub fn lift_with_target_order(
    j: u32,
    h: &Polynomial,
    d: TruncOrder,
    target: TruncOrder,
) -> Result<AutWord> {
    lift_with_target_order_bounded(j, h, d, target, None)
}

/// [`lift_with_target_order`] under a degree budget, as in
/// [`lift_hamiltonian_bounded`].
pub fn lift_with_target_order_bounded(
    j: u32,
    h: &Polynomial,
    d: TruncOrder,
    target: TruncOrder,
    budget: Option<u64>,
) -> Result<AutWord> {
    if target < d {
        return Err(Error::InvalidParameters(format!(
            "target order {target} is below d = {d}"
        )));
    }
    lift_hamiltonian_bounded(j, h, target, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn p(s: &str) -> Polynomial {
        Polynomial::parse_std(s).unwrap()
    }

    fn order(d: u32) -> TruncOrder {
        TruncOrder::new(d).unwrap()
    }

    fn zs(s: &str) -> Generator {
        Generator::z_shear(p(s)).unwrap()
    }

    fn ts(s: &str) -> Generator {
        Generator::t_shear(p(s)).unwrap()
    }

    #[test]
    fn generator_validation() {
        assert!(Generator::z_shear(p("x*z")).is_err());
        assert!(Generator::t_shear(p("t^2")).is_err());
        assert!(Generator::z_shear(p("x*t + lambda")).is_ok());
        assert!(matches!(Generator::scale(int(0), int(1)), Err(Error::ZeroScalar)));
    }

    #[test]
    fn apply_examples() {
        let w = AutWord::new([zs("x*t")]);
        assert_eq!(w.apply(&p("z")).unwrap(), p("z + x*t"));
        let w = AutWord::new([zs("x*t^2"), ts("z^3 - x"), Generator::scale(int(2), rat(1, 3)).unwrap()]);
        let q = p("z^2*t + x*t - 7");
        assert_eq!(w.invert().apply(&w.apply(&q).unwrap()).unwrap(), q);
        assert_eq!(w.then(&w.invert()).apply(&q).unwrap(), q);
        let s = AutWord::new([Generator::scale(int(2), int(3)).unwrap()]);
        assert_eq!(s.apply(&p("z^2 + t^3")).unwrap(), p("4*z^2 + 27*t^3"));
        // g1(g2(t)) = g1(t + z) = 2t + z
        let w = AutWord::new([zs("t"), ts("z")]);
        assert_eq!(w.images(), (p("z + t"), p("z + 2*t")));
    }

    #[test]
    fn text_round_trip() {
        let w = AutWord::new([zs("x*t^2 - 1/2"), ts("z^3 - x"), Generator::scale(int(2), rat(-1, 3)).unwrap()]);
        assert_eq!(w.to_string().parse::<AutWord>().unwrap(), w);
        assert_eq!("[ ]".parse::<AutWord>().unwrap(), AutWord::identity());
        for bad in ["zshear(t)", "[zshear(z)]", "[zshear(t),]", "[foo(t)]", "[scale(1)]", "[zshear(t) tshear(z)]"] {
            assert!(bad.parse::<AutWord>().is_err(), "{bad}");
        }
    }

    #[test]
    fn invert_examples() {
        assert_eq!(AutWord::new([zs("x*t")]).invert(), AutWord::new([zs("-x*t")]));
        assert!(AutWord::identity().invert().is_empty());
        assert_eq!(
            AutWord::new([zs("t"), ts("z^2")]).invert(),
            AutWord::new([ts("-z^2"), zs("-t")])
        );
    }

    #[test]
    fn truncate_examples() {
        for d in 2..5 {
            let w = AutWord::new([zs("-2*x*t")]);
            assert_eq!(w.truncate(order(d)), truncated_flow(&p("t^2"), 1, order(d)).unwrap());
        }
        let w = AutWord::new([zs("x*t^2 + t"), ts("x^2*z")]);
        assert!(w.then(&w.invert()).truncate(order(3)).is_identity());
        assert!(w.truncate(order(3)).jacobian_det().is_one());
    }

    #[test]
    fn jacobian_examples() {
        assert!(AutWord::new([zs("x*t"), ts("z^4")]).jacobian_det().is_one());
        assert_eq!(AutWord::new([Generator::scale(int(2), int(3)).unwrap()]).jacobian_det(), int(6));
        assert!(AutWord::new([Generator::scale(int(2), rat(1, 2)).unwrap()])
            .jacobian_det()
            .is_one());
    }

    #[test]
    fn serialization_round_trip() {
        let w = AutWord::new([zs("x*t^2"), Generator::scale(int(2), rat(1, 2)).unwrap()]);
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(
            json,
            r#"[{"kind":"zshear","poly":"x*t^2"},{"kind":"scale","a":"2","b":"1/2"}]"#
        );
        assert_eq!(serde_json::from_str::<AutWord>(&json).unwrap(), w);
        assert!(serde_json::from_str::<AutWord>(r#"[{"kind":"zshear","poly":"z"}]"#).is_err());
    }

    #[test]
    fn realize_first_order_examples() {
        assert_eq!(realize_first_order(1, &p("t^2")).unwrap(), AutWord::new([zs("-2*x*t")]));
        assert_eq!(
            realize_first_order(2, &p("z*t")).unwrap(),
            AutWord::new([zs("x*t"), ts("x*z"), zs("-x*t"), ts("-x*z")])
        );
        for h in ["z*t", "z^2*t^3 - lambda*z*t + t^4", "3*z^3*t + z*t^3 + z^2*t^2 + z^5"] {
            for j in 1..4 {
                realize_first_order(j, &p(h)).unwrap();
            }
        }
    }

    #[test]
    fn lift_examples() {
        let r_minus_lambda = p("z^2 + t^3 + x - lambda");
        assert_eq!(
            lift_hamiltonian(1, &r_minus_lambda, order(2)).unwrap(),
            AutWord::new([zs("-3*x*t^2"), ts("2*x*z")])
        );
        let w = lift_hamiltonian(1, &p("t^2"), order(3)).unwrap();
        assert_eq!(w.truncate(order(3)), truncated_flow(&p("t^2"), 1, order(3)).unwrap());
        for d in 2..5 {
            for j in 1..d {
                let h = p("z*t^2 - 2*z^2 + x*z*t");
                let w = lift_hamiltonian(j, &h, order(d)).unwrap();
                assert_eq!(w.truncate(order(d)), truncated_flow(&h, j, order(d)).unwrap());
                assert!(w.jacobian_det().is_one());
            }
        }
        let gr = p("z + 1") * p("z^2 + t^3 + x");
        let w = lift_with_target_order(1, &gr, order(2), order(3)).unwrap();
        assert_eq!(w.truncate(order(3)), truncated_flow(&gr, 1, order(3)).unwrap());
    }

    #[test]
    fn commutator_field() {
        // [z -> z + x^s a(t), t -> t + x^s' b(z)] deviates at x^{s+s'} by a b' d/dt - b a' d/dz
        let (a, b) = (p("t^2 + 3*t"), p("z^3 - z"));
        for (s, s2) in [(1, 1), (1, 2), (2, 1)] {
            let zsh = Generator::z_shear(a.shift(X, s)).unwrap();
            let tsh = Generator::t_shear(b.shift(X, s2)).unwrap();
            let w = AutWord::new([zsh.clone(), tsh.clone(), zsh.inverse(), tsh.inverse()]);
            let m = w.truncate(order(s + s2 + 1));
            let (dz, dt) = m.first_order_part(s + s2).unwrap();
            assert_eq!(dz, -(&b * &a.derivative(T)));
            assert_eq!(dt, &a * &b.derivative(Z));
        }
    }
}
