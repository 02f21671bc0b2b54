//! The hypersurface `X = V(x^d y + z^k + t^l + x)` and its automorphisms.
//!
//! Equality in `Q[X]` is decided by substituting `y = -r / x^d`: the kernel
//! of that substitution is exactly `(P)`, so two polynomials agree on `X`
//! iff their Laurent normal forms coincide.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::vars::{LAMBDA, T, W, X, Y, Z};
use crate::poly::{Division, Polynomial, Rational, Var};
use crate::trunc_aut::RParams;
use crate::words::AutWord;

/// `numerator / x^shift`, with `shift` minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    numerator: Polynomial,
    shift: u32,
}

impl LaurentPoly {
    pub fn new(numerator: Polynomial, shift: u32) -> Self {
        if numerator.is_zero() {
            return Self { numerator, shift: 0 };
        }
        let common = numerator.min_degree_in(X).min(shift);
        Self {
            numerator: numerator.divide_by_x_power(common),
            shift: shift - common,
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / x^{}", self.numerator, self.shift)
        }
    }
}

trait XShift {
    fn divide_by_x_power(&self, e: u32) -> Polynomial;
}

impl XShift for Polynomial {
    fn divide_by_x_power(&self, e: u32) -> Polynomial {
        self.unshift(X, e).expect("e is at most the minimal x-degree")
    }
}

/// Writes `g = a (x + r0s) + b x^d` with `b` free of `x`.
///
/// `x -> -r0s` is the quotient map modulo `x + r0s`, so `b` is the quotient
/// of `g(-r0s)` by `(-r0s)^d`; `r0s` must be monic in `z`.
pub fn decompose_with(g: &Polynomial, r0s: &Polynomial, d: u32) -> Result<(Polynomial, Polynomial)> {
    let x = Polynomial::std_var(X);
    let r = &x + r0s;
    let reduced = g.substitute(&[(X, -r0s)].into_iter().collect())?;
    let (mut b, rem) = reduced.div_rem_monic(&r0s.pow(d), Z)?;
    if !rem.is_zero() {
        return Err(Error::NotInIdeal(g.to_string()));
    }
    if d % 2 == 1 {
        b = -b;
    }
    let xd = x.pow(d);
    let a = match (g - &(&b * &xd)).exact_div(&r, X)? {
        Division::Exact(a) => a,
        Division::Remainder { remainder, .. } => {
            return Err(Error::VerificationFailed(format!(
                "decomposition left remainder {remainder}"
            )))
        }
    };
    if &(&a * &r) + &(&b * &xd) != *g {
        return Err(Error::VerificationFailed(format!("reconstruction of {g}")));
    }
    Ok((a, b))
}

/// Writes `g = a (x + r0s) + b x^d` with `deg_x a < d`, which determines
/// `a` and `b` uniquely. Comparing `x^i`-coefficients gives
/// `a_i = (g_i - a_{i-1}) / r0s` for `i < d`, each an exact division by `r0s`
/// (monic in `z`); unlike [`decompose_with`] nothing is substituted for `x`,
/// so the pieces stay close to the size of `g`.
pub fn decompose_x_adic(g: &Polynomial, r0s: &Polynomial, d: u32) -> Result<(Polynomial, Polynomial)> {
    let mut a = Polynomial::std_zero();
    let mut prev = Polynomial::std_zero();
    for i in 0..d {
        let ai = match (&g.coefficient_of(X, i) - &prev).exact_div(r0s, Z)? {
            Division::Exact(q) => q,
            Division::Remainder { .. } => return Err(Error::NotInIdeal(g.to_string())),
        };
        a = &a + &ai.shift(X, i);
        prev = ai;
    }
    let r = &Polynomial::std_var(X) + r0s;
    let b = (g - &(&a * &r))
        .unshift(X, d)
        .ok_or_else(|| Error::NotInIdeal(g.to_string()))?;
    Ok((a, b))
}

/// Images of `x, y, z, t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Images {
    pub x: Polynomial,
    pub y: Polynomial,
    pub z: Polynomial,
    pub t: Polynomial,
}

impl Images {
    pub fn identity() -> Self {
        Self {
            x: Polynomial::std_var(X),
            y: Polynomial::std_var(Y),
            z: Polynomial::std_var(Z),
            t: Polynomial::std_var(T),
        }
    }

    pub fn as_array(&self) -> [&Polynomial; 4] {
        [&self.x, &self.y, &self.z, &self.t]
    }

    fn bindings(&self) -> BTreeMap<Var, Polynomial> {
        [
            (X, self.x.clone()),
            (Y, self.y.clone()),
            (Z, self.z.clone()),
            (T, self.t.clone()),
        ]
        .into_iter()
        .collect()
    }

    /// Image of `p` under the ring map `v -> self.v`.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        Ok(p.substitute(&self.bindings())?)
    }

    /// `self.apply(p)` when `x -> x` and the `z, t` images are those of
    /// `word`, with `lambda -> collapse` afterwards when given. The word is
    /// applied generator by generator, then `y` (and `lambda`) are replaced.
    pub fn apply_factored(
        &self,
        word: &AutWord,
        collapse: Option<&Polynomial>,
        p: &Polynomial,
    ) -> Result<Polynomial> {
        let mut bindings: BTreeMap<Var, Polynomial> = [(Y, self.y.clone())].into_iter().collect();
        if let Some(c) = collapse {
            bindings.insert(LAMBDA, c.clone());
        }
        Ok(word.apply(p)?.substitute(&bindings)?)
    }

    /// [`Images::compose`] with `self` applied through [`Images::apply_factored`].
    pub fn compose_factored(
        &self,
        word: &AutWord,
        collapse: Option<&Polynomial>,
        other: &Images,
    ) -> Result<Images> {
        let f = |p| self.apply_factored(word, collapse, p);
        Ok(Images {
            x: f(&other.x)?,
            y: f(&other.y)?,
            z: f(&other.z)?,
            t: f(&other.t)?,
        })
    }

    /// `self ∘ other`: `other` first, then `self` on its images.
    pub fn compose(&self, other: &Images) -> Result<Images> {
        Ok(Images {
            x: self.apply(&other.x)?,
            y: self.apply(&other.y)?,
            z: self.apply(&other.z)?,
            t: self.apply(&other.t)?,
        })
    }

    pub fn is_identity(&self) -> bool {
        self == &Self::identity()
    }

    pub fn vanish_at_origin(&self) -> bool {
        self.as_array().iter().all(|p| p.value_at_origin().is_zero())
    }
}

/// How a [`ThreefoldAut`] was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Identity,
    Word { word: AutWord },
    Torus { lambda: String },
    Lnd { side: LndSide, s: Polynomial },
    Images,
    Compose { outer: Box<Provenance>, inner: Box<Provenance> },
    Inverse { of: Box<Provenance> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LndSide {
    /// `s (x^d d/dz - k z^{k-1} d/dy)` with `s` in `Q[x,t]`.
    ZSide,
    /// `s (x^d d/dt - l t^{l-1} d/dy)` with `s` in `Q[x,z]`.
    TSide,
}

/// An automorphism of `Q[X]`, stored by representatives in `Q[x,y,z,t]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreefoldAut {
    pub params: RParams,
    pub images: Images,
    pub inverse: Images,
    pub provenance: Provenance,
}

/// A map fixing the ideal `(x)`: `x -> c x`, `z, t` arbitrary in `x, z, t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMap {
    pub x_scale: Rational,
    pub z: Polynomial,
    pub t: Polynomial,
}

impl BaseMap {
    pub fn from_word(word: &AutWord) -> Self {
        let (z, t) = word.images();
        Self {
            x_scale: Rational::one(),
            z,
            t,
        }
    }

    fn bindings(&self) -> BTreeMap<Var, Polynomial> {
        [
            (X, Polynomial::std_var(X).scale(&self.x_scale)),
            (Z, self.z.clone()),
            (T, self.t.clone()),
        ]
        .into_iter()
        .collect()
    }

    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        Ok(p.substitute(&self.bindings())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threefold {
    params: RParams,
    p: Polynomial,
    r: Polynomial,
    r0: Polynomial,
}

impl Threefold {
    pub fn new(params: RParams) -> Self {
        Self {
            params,
            p: params.p(),
            r: params.r(),
            r0: params.r0(),
        }
    }

    pub fn params(&self) -> RParams {
        self.params
    }

    pub fn p(&self) -> &Polynomial {
        &self.p
    }

    pub fn r(&self) -> &Polynomial {
        &self.r
    }

    pub fn r0(&self) -> &Polynomial {
        &self.r0
    }

    fn d(&self) -> u32 {
        self.params.d()
    }

    /// `p(x, -r/x^d, z, t)` in `Q[x, 1/x, z, t]`.
    pub fn normal_form(&self, p: &Polynomial) -> LaurentPoly {
        let e = p.degree_in(Y);
        let d = self.d();
        let minus_r = -&self.r;
        let mut numerator = Polynomial::std_zero();
        let mut power = Polynomial::std_one();
        for i in 0..=e {
            let coefficient = p.coefficient_of(Y, i);
            if !coefficient.is_zero() {
                numerator = numerator + (&coefficient * &power).shift(X, d * (e - i));
            }
            if i < e {
                power = &power * &minus_r;
            }
        }
        LaurentPoly::new(numerator, d * e)
    }

    pub fn equal_on_x(&self, p: &Polynomial, q: &Polynomial) -> bool {
        self.normal_form(p) == self.normal_form(q)
    }

    /// `g = a r + b x^d` with `b` in `Q[z,t]`.
    pub fn decompose_mod_i(&self, g: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        if g.contains_var(Y) || g.contains_var(W) || g.contains_var(LAMBDA) {
            return Err(Error::OutsideVariables(g.to_string(), "x, z, t"));
        }
        decompose_with(g, &self.r0, self.d())
    }

    /// The unique automorphism of `Q[X]` restricting to `forward` on
    /// `Q[x,z,t]`. `inverse` must be the inverse of `forward`.
    pub fn lift_to_x(
        &self,
        forward: &BaseMap,
        inverse: &BaseMap,
        provenance: Provenance,
    ) -> Result<ThreefoldAut> {
        let images = self.lift_images(forward)?;
        let inverse = self.lift_images(inverse)?;
        let aut = ThreefoldAut {
            params: self.params,
            images,
            inverse,
            provenance,
        };
        self.verify(&aut)?;
        Ok(aut)
    }

    pub fn lift_word(&self, word: &AutWord) -> Result<ThreefoldAut> {
        self.lift_to_x(
            &BaseMap::from_word(word),
            &BaseMap::from_word(&word.invert()),
            Provenance::Word { word: word.clone() },
        )
    }

    /// `y -> (a y - b) / c^d` where `forward(r) = a r + b x^d` and `x -> c x`.
    fn lift_images(&self, map: &BaseMap) -> Result<Images> {
        if map.x_scale.is_zero() {
            return Err(Error::ZeroScalar);
        }
        for v in [&map.z, &map.t] {
            if v.contains_var(Y) || v.contains_var(W) || v.contains_var(LAMBDA) {
                return Err(Error::OutsideVariables(v.to_string(), "x, z, t"));
            }
        }
        let d = self.d();
        let phi_r = map.apply(&self.r)?;
        let delta = &phi_r - &self.r;
        let (a, b) = if map.x_scale.is_one() && (delta.is_zero() || delta.min_degree_in(X) >= d) {
            // A_d shortcut: a = 1 keeps b as the literal x^d-quotient
            (Polynomial::std_one(), delta.divide_by_x_power(d))
        } else {
            // any decomposition gives the same map on X; the x-adic one
            // avoids the blowup of substituting x -> -r0 into phi(r)
            decompose_x_adic(&phi_r, &self.r0, d)?
        };
        let c_d = num_traits::pow(map.x_scale.clone(), d as usize);
        let y = (&a * &Polynomial::std_var(Y) - &b).scale(&c_d.recip());
        Ok(Images {
            x: Polynomial::std_var(X).scale(&map.x_scale),
            y,
            z: map.z.clone(),
            t: map.t.clone(),
        })
    }

    /// Relation preservation and two-sided inverse modulo `(P)`.
    pub fn verify(&self, aut: &ThreefoldAut) -> Result<()> {
        for (name, images) in [("forward", &aut.images), ("inverse", &aut.inverse)] {
            if !self.normal_form(&images.apply(&self.p)?).is_zero() {
                return Err(Error::VerificationFailed(format!("{name} map does not preserve (P)")));
            }
        }
        let composites = match &aut.provenance {
            Provenance::Word { word } => [
                aut.images.compose_factored(word, None, &aut.inverse)?,
                aut.inverse.compose_factored(&word.invert(), None, &aut.images)?,
            ],
            _ => [aut.images.compose(&aut.inverse)?, aut.inverse.compose(&aut.images)?],
        };
        for (name, composite) in ["forward after inverse", "inverse after forward"]
            .into_iter()
            .zip(composites)
        {
            if !self.is_identity_on_x(&composite) {
                return Err(Error::VerificationFailed(format!("{name} is not the identity on X")));
            }
        }
        Ok(())
    }

    pub fn is_identity_on_x(&self, images: &Images) -> bool {
        let id = Images::identity();
        let same = images
            .as_array()
            .iter()
            .zip(id.as_array())
            .all(|(p, v)| self.equal_on_x(p, v));
        same
    }

    /// Two automorphisms inducing the same map on `Q[X]`.
    pub fn same_on_x(&self, f: &ThreefoldAut, g: &ThreefoldAut) -> bool {
        f.images
            .as_array()
            .iter()
            .zip(g.images.as_array())
            .all(|(p, q)| self.equal_on_x(p, q))
    }

    /// `x -> l^{kl} x`, `z -> l^l z`, `t -> l^k t`, `y -> l^{kl(1-d)} y`;
    /// these weights make `P` homogeneous of weight `kl`.
    pub fn torus_action(&self, lambda: &Rational) -> Result<ThreefoldAut> {
        if lambda.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let images = |s: &Rational| {
            let (d, k, l) = (self.params.d() as i64, self.params.k() as i64, self.params.l() as i64);
            let w = |e: i64| pow_signed(s, e);
            Images {
                x: Polynomial::std_var(X).scale(&w(k * l)),
                y: Polynomial::std_var(Y).scale(&w(k * l * (1 - d))),
                z: Polynomial::std_var(Z).scale(&w(l)),
                t: Polynomial::std_var(T).scale(&w(k)),
            }
        };
        let aut = ThreefoldAut {
            params: self.params,
            images: images(lambda),
            inverse: images(&lambda.recip()),
            provenance: Provenance::Torus {
                lambda: lambda.to_string(),
            },
        };
        self.verify(&aut)?;
        Ok(aut)
    }

    /// `exp(s Delta)` for the derivations `Delta` of `Q[x,y,z,t]` killing `P`
    /// and `s` in their kernel.
    pub fn lnd_exponential(&self, side: LndSide, s: &Polynomial) -> Result<ThreefoldAut> {
        let (moving, banned) = match side {
            LndSide::ZSide => (Z, [Z, Y, W, LAMBDA]),
            LndSide::TSide => (T, [T, Y, W, LAMBDA]),
        };
        if banned.iter().any(|&v| s.contains_var(v)) {
            return Err(Error::OutsideVariables(
                s.to_string(),
                if side == LndSide::ZSide { "x, t" } else { "x, z" },
            ));
        }
        let exponent = if side == LndSide::ZSide {
            self.params.k()
        } else {
            self.params.l()
        };
        let xd = Polynomial::std_var(X).pow(self.d());
        // Delta(moving) = x^d, Delta(y) = -e v^{e-1}
        let dy = -&Polynomial::std_var(moving)
            .pow(exponent - 1)
            .scale(&Rational::from_integer(BigInt::from(exponent)));
        let delta = |f: &Polynomial, s: &Polynomial| -> Polynomial {
            s * &(&xd * &f.derivative(moving) + &dy * &f.derivative(Y))
        };
        let exp = |s: &Polynomial| {
            let mut images = Images::identity();
            for v in [Y, moving] {
                let mut acc = Polynomial::std_var(v);
                let mut term = acc.clone();
                let mut n = 0u32;
                loop {
                    n += 1;
                    term = delta(&term, s).scale(&Rational::from_integer(BigInt::from(n)).recip());
                    if term.is_zero() {
                        break;
                    }
                    acc = acc + &term;
                }
                if v == Y {
                    images.y = acc;
                } else if v == Z {
                    images.z = acc;
                } else {
                    images.t = acc;
                }
            }
            images
        };
        let aut = ThreefoldAut {
            params: self.params,
            images: exp(s),
            inverse: exp(&-s),
            provenance: Provenance::Lnd {
                side,
                s: s.clone(),
            },
        };
        self.verify(&aut)?;
        Ok(aut)
    }
}

fn pow_signed(s: &Rational, e: i64) -> Rational {
    let base = if e < 0 { s.recip() } else { s.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

impl ThreefoldAut {
    pub fn identity(params: RParams) -> Self {
        Self {
            params,
            images: Images::identity(),
            inverse: Images::identity(),
            provenance: Provenance::Identity,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ThreefoldAut) -> Result<ThreefoldAut> {
        if self.params != other.params {
            return Err(Error::InvalidParameters(format!(
                "threefolds differ: {} vs {}",
                self.params, other.params
            )));
        }
        Ok(ThreefoldAut {
            params: self.params,
            images: self.images.compose(&other.images)?,
            inverse: other.inverse.compose(&self.inverse)?,
            provenance: Provenance::Compose {
                outer: Box::new(self.provenance.clone()),
                inner: Box::new(other.provenance.clone()),
            },
        })
    }

    pub fn invert(&self) -> ThreefoldAut {
        ThreefoldAut {
            params: self.params,
            images: self.inverse.clone(),
            inverse: self.images.clone(),
            provenance: Provenance::Inverse {
                of: Box::new(self.provenance.clone()),
            },
        }
    }

    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        self.images.apply(p)
    }

    /// All forward and inverse images vanish at the origin.
    pub fn fixes_origin(&self) -> bool {
        self.images.vanish_at_origin() && self.inverse.vanish_at_origin()
    }
}

pub fn normal_form(p: &Polynomial, threefold: &Threefold) -> LaurentPoly {
    threefold.normal_form(p)
}

pub fn fixes_origin(aut: &ThreefoldAut) -> bool {
    aut.fixes_origin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};
    use crate::truncated::TruncOrder;
    use crate::words::{lift_hamiltonian, lift_with_target_order, Generator};

    fn p(s: &str) -> Polynomial {
        Polynomial::parse_std(s).unwrap()
    }

    fn x223() -> Threefold {
        Threefold::new(RParams::new(2, 2, 3).unwrap())
    }

    #[test]
    fn normal_form_examples() {
        let x = x223();
        assert!(x.normal_form(x.p()).is_zero());
        assert_eq!(x.normal_form(&p("x^2*y")), LaurentPoly::new(p("-z^2 - t^3 - x"), 0));
        assert_eq!(x.normal_form(&p("z")), LaurentPoly::new(p("z"), 0));
        let nf = x.normal_form(&p("y"));
        assert_eq!((nf.numerator(), nf.shift()), (&p("-z^2 - t^3 - x"), 2));
        let nf = x.normal_form(&p("x*y"));
        assert_eq!(nf.shift(), 1);
        assert!(x.normal_form(&(p("z*y + t^2 - 4") * x.p().clone())).is_zero());
    }

    #[test]
    fn decompose_examples() {
        let x = x223();
        let (a, b) = x.decompose_mod_i(x.r()).unwrap();
        assert!(a.is_one() && b.is_zero());
        for d in 2..5 {
            let params = RParams::new(d, 2, 3).unwrap();
            let xf = Threefold::new(params);
            let xd = Polynomial::std_var(X).pow(d);
            let (a, b) = xf.decompose_mod_i(&xd).unwrap();
            assert_eq!(&(&a * xf.r()) + &(&b * &xd), xd);
            assert!(!b.contains_var(X));
        }
        assert!(matches!(x.decompose_mod_i(&p("z")), Err(Error::NotInIdeal(_))));
        let g = p("x*z + 3") * x.r().clone() + p("z^4 - t + x") * p("x^2");
        let (a, b) = x.decompose_mod_i(&g).unwrap();
        assert_eq!(&(&a * x.r()) + &(&b * &p("x^2")), g);
        assert!(!b.contains_var(X));
    }

    #[test]
    fn lift_examples() {
        let x = x223();
        let word = AutWord::new([Generator::z_shear(p("x^2")).unwrap()]);
        let aut = x.lift_word(&word).unwrap();
        assert_eq!(aut.images.y, p("y - 2*z - x^2"));
        assert!(x.normal_form(&(p("x^2") * aut.images.y.clone() + aut.apply(x.r()).unwrap()))
            .eq(&x.normal_form(x.p())));
        assert!(x.is_identity_on_x(&x.lift_word(&AutWord::identity()).unwrap().images));
        let gamma_r = p("2 + x*z") * x.r().clone();
        let w = lift_hamiltonian(1, &gamma_r, TruncOrder::new(2).unwrap()).unwrap();
        let aut = x.lift_word(&w).unwrap();
        assert_eq!(aut.images.z, p("z - 6*x*t^2"));
        // not stabilizing (r, x^d)
        let bad = AutWord::new([Generator::z_shear(p("x*t")).unwrap()]);
        assert!(x.lift_word(&bad).is_err());
    }

    #[test]
    fn torus_examples() {
        let x = x223();
        assert!(x.is_identity_on_x(&x.torus_action(&int(1)).unwrap().images));
        let two = x.torus_action(&int(2)).unwrap();
        assert_eq!(
            two.images,
            Images {
                x: p("64*x"),
                y: p("1/64*y"),
                z: p("8*z"),
                t: p("4*t")
            }
        );
        assert_eq!(two.apply(x.p()).unwrap(), x.p().scale(&int(64)));
        let six = x.torus_action(&int(6)).unwrap();
        let three = x.torus_action(&int(3)).unwrap();
        assert!(x.same_on_x(&two.compose(&three).unwrap(), &six));
        assert!(matches!(x.torus_action(&int(0)), Err(Error::ZeroScalar)));
        assert!(x.torus_action(&rat(-1, 3)).unwrap().fixes_origin());
        let base = BaseMap {
            x_scale: int(64),
            z: p("8*z"),
            t: p("4*t"),
        };
        let inv = BaseMap {
            x_scale: rat(1, 64),
            z: p("1/8*z"),
            t: p("1/4*t"),
        };
        let lifted = x.lift_to_x(&base, &inv, Provenance::Images).unwrap();
        assert!(x.same_on_x(&lifted, &two));
    }

    #[test]
    fn lnd_examples() {
        let x = x223();
        assert!(x.is_identity_on_x(&x.lnd_exponential(LndSide::ZSide, &p("0")).unwrap().images));
        let e = x.lnd_exponential(LndSide::ZSide, &p("1")).unwrap();
        assert_eq!(e.images.z, p("z + x^2"));
        assert_eq!(e.images.y, p("y - 2*z - x^2"));
        let word = AutWord::new([Generator::z_shear(p("x^2")).unwrap()]);
        assert_eq!(e.images, x.lift_word(&word).unwrap().images);
        let e = x.lnd_exponential(LndSide::TSide, &p("x*z + 2")).unwrap();
        assert!(e.fixes_origin());
        assert!(x.lnd_exponential(LndSide::TSide, &p("t")).is_err());
    }

    #[test]
    fn fixed_points() {
        let x = x223();
        let d = TruncOrder::new(2).unwrap();
        let deeper = TruncOrder::new(3).unwrap();
        let gamma_r = p("3*x") * x.r().clone();
        let w = lift_with_target_order(1, &gamma_r, d, deeper).unwrap();
        assert!(x.lift_word(&w).unwrap().fixes_origin());
        let ad = AutWord::new([Generator::z_shear(p("x^2*t")).unwrap()]);
        assert!(x.lift_word(&ad).unwrap().fixes_origin());
        assert!(x.lnd_exponential(LndSide::ZSide, &p("1")).unwrap().fixes_origin());
    }
}
