//! Endomorphisms of `Q[x]/(x^d)[z,t]` over `Q[x]/(x^d)`, the filtration
//! `A_j` of maps congruent to the identity mod `x^j`, and the quotient maps
//! `A_j -> (z,t)` and `A_j(r) -> Q[z,t]`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::vars::{T, X, Y, Z};
use crate::poly::{Division, Polynomial, Rational, Var};
use crate::truncated::{reduce, TruncElem, TruncOrder};

/// `(d, k, l)` with `d >= 2`, `2 <= k < l`, `gcd(k, l) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct RParams {
    d: u32,
    k: u32,
    l: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    d: u32,
    k: u32,
    l: u32,
}

impl TryFrom<RawParams> for RParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.d, raw.k, raw.l)
    }
}

impl From<RParams> for RawParams {
    fn from(p: RParams) -> Self {
        RawParams {
            d: p.d,
            k: p.k,
            l: p.l,
        }
    }
}

impl RParams {
    pub fn new(d: u32, k: u32, l: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameters(format!("d must be at least 2, got {d}")));
        }
        if k < 2 || k >= l {
            return Err(Error::InvalidParameters(format!(
                "need 2 <= k < l, got k = {k}, l = {l}"
            )));
        }
        if k.gcd(&l) != 1 {
            return Err(Error::InvalidParameters(format!(
                "k and l must be coprime, got k = {k}, l = {l}"
            )));
        }
        Ok(Self { d, k, l })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn order(&self) -> TruncOrder {
        TruncOrder::new(self.d).expect("d >= 2 is an RParams invariant")
    }

    /// `z^k + t^l`.
    pub fn r0(&self) -> Polynomial {
        Polynomial::std_var(Z).pow(self.k) + Polynomial::std_var(T).pow(self.l)
    }

    /// `z^k + t^l + x`.
    pub fn r(&self) -> Polynomial {
        self.r0() + Polynomial::std_var(X)
    }

    /// `x^d y + z^k + t^l + x`.
    pub fn p(&self) -> Polynomial {
        Polynomial::std_var(Y).shift(X, self.d) + self.r()
    }
}

impl fmt::Display for RParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, k={}, l={})", self.d, self.k, self.l)
    }
}

/// A `Q[x]/(x^d)`-algebra endomorphism given by the images of `z` and `t`.
pub struct TruncatedMap {
    image_z: TruncElem,
    image_t: TruncElem,
    order: TruncOrder,
    inverse: OnceLock<Box<TruncatedMap>>,
}

impl Clone for TruncatedMap {
    fn clone(&self) -> Self {
        let inverse = OnceLock::new();
        if let Some(inv) = self.inverse.get() {
            let _ = inverse.set(inv.clone());
        }
        Self {
            image_z: self.image_z.clone(),
            image_t: self.image_t.clone(),
            order: self.order,
            inverse,
        }
    }
}

impl PartialEq for TruncatedMap {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.image_z == other.image_z
            && self.image_t == other.image_t
    }
}

impl Eq for TruncatedMap {}

impl fmt::Debug for TruncatedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedMap")
            .field("z", &self.image_z.poly().to_string())
            .field("t", &self.image_t.poly().to_string())
            .field("d", &self.order.get())
            .finish()
    }
}

impl fmt::Display for TruncatedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "z -> {}, t -> {} (mod x^{})",
            self.image_z.poly(),
            self.image_t.poly(),
            self.order
        )
    }
}

impl TruncatedMap {
    pub fn new(image_z: Polynomial, image_t: Polynomial, order: TruncOrder) -> Self {
        Self {
            image_z: reduce(&image_z, order),
            image_t: reduce(&image_t, order),
            order,
            inverse: OnceLock::new(),
        }
    }

    pub fn identity(order: TruncOrder) -> Self {
        Self::new(Polynomial::std_var(Z), Polynomial::std_var(T), order)
    }

    /// `z -> a z`, `t -> b t`.
    pub fn scaling(a: Rational, b: Rational, order: TruncOrder) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroScalar);
        }
        Ok(Self::new(
            Polynomial::std_var(Z).scale(&a),
            Polynomial::std_var(T).scale(&b),
            order,
        ))
    }

    pub fn image_z(&self) -> &TruncElem {
        &self.image_z
    }

    pub fn image_t(&self) -> &TruncElem {
        &self.image_t
    }

    pub fn order(&self) -> TruncOrder {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.image_z.poly() == &Polynomial::std_var(Z) && self.image_t.poly() == &Polynomial::std_var(T)
    }

    fn bindings(&self) -> BTreeMap<Var, Polynomial> {
        [
            (Z, self.image_z.poly().clone()),
            (T, self.image_t.poly().clone()),
        ]
        .into_iter()
        .collect()
    }

    /// `p(x, image_z, image_t)` reduced mod `x^d`.
    pub fn apply(&self, p: &Polynomial) -> TruncElem {
        let image = p
            .substitute_truncated(&self.bindings(), X, self.order.get())
            .expect("standard variable table");
        reduce(&image, self.order)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order.get(),
                right: other.order.get(),
            })
        }
    }

    /// `self ∘ other` as ring endomorphisms: `other` is applied to `z, t`
    /// first and `self` to the result.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self::new(
            self.apply(other.image_z.poly()).into_poly(),
            self.apply(other.image_t.poly()).into_poly(),
            self.order,
        ))
    }

    /// `det [[dZ/dz, dZ/dt], [dT/dz, dT/dt]]` in the truncated ring.
    pub fn jacobian_det(&self) -> TruncElem {
        let d = self.order.get();
        let (zz, zt) = (self.image_z.poly().derivative(Z), self.image_z.poly().derivative(T));
        let (tz, tt) = (self.image_t.poly().derivative(Z), self.image_t.poly().derivative(T));
        reduce(&(zz.mul_truncated(&tt, X, d) - zt.mul_truncated(&tz, X, d)), self.order)
    }

    /// Congruent to the identity mod `x^j`, ignoring the determinant.
    pub fn is_congruent_to_identity(&self, j: u32) -> bool {
        let low = |e: &TruncElem, v| (e.poly() - &Polynomial::std_var(v)).truncate(X, j).is_zero();
        low(&self.image_z, Z) && low(&self.image_t, T)
    }

    /// Membership in `A_j`: congruent to the identity mod `x^j` with Jacobian 1.
    pub fn in_a(&self, j: u32) -> bool {
        self.is_congruent_to_identity(j) && self.jacobian_det().is_one()
    }

    /// Whether `f(r)` lies in the ideal `(r)` of the truncated ring.
    pub fn stabilizes_r(&self, params: &RParams) -> Result<bool> {
        if params.order() != self.order {
            return Err(Error::OrderMismatch {
                left: self.order.get(),
                right: params.d(),
            });
        }
        let r = reduce(&params.r(), self.order);
        let (_, rem) = self.apply(&params.r()).divide_by_monic_z(&r)?;
        Ok(rem.is_zero())
    }

    /// Membership in `A_j(r)`.
    pub fn in_a_r(&self, j: u32, params: &RParams) -> Result<bool> {
        Ok(self.in_a(j) && self.stabilizes_r(params)?)
    }

    /// Two-sided inverse, supported for maps congruent to a diagonal scaling
    /// mod `x` (including the identity). Cached after the first call.
    pub fn invert(&self) -> Result<Self> {
        if let Some(inv) = self.inverse.get() {
            return Ok((**inv).clone());
        }
        let inv = self.invert_uncached()?;
        let _ = self.inverse.set(Box::new(inv.clone()));
        Ok(inv)
    }

    fn invert_uncached(&self) -> Result<Self> {
        let lin_z = self.image_z.poly().truncate(X, 1);
        let lin_t = self.image_t.poly().truncate(X, 1);
        let a = diagonal_factor(&lin_z, Z).ok_or(Error::UnsupportedInverse)?;
        let b = diagonal_factor(&lin_t, T).ok_or(Error::UnsupportedInverse)?;
        let inverse = if a == Rational::from_integer(1.into()) && b == Rational::from_integer(1.into())
        {
            self.newton_inverse()
        } else {
            // self = unipotent ∘ s, so self^-1 = s^-1 ∘ unipotent^-1
            let s_inv = Self::scaling(a.recip(), b.recip(), self.order)?;
            let unipotent = self.compose(&s_inv)?;
            s_inv.compose(&unipotent.newton_inverse())?
        };
        if !self.compose(&inverse)?.is_identity() || !inverse.compose(self)?.is_identity() {
            return Err(Error::VerificationFailed(format!("inverse of {self}")));
        }
        let _ = inverse.inverse.set(Box::new(self.clone()));
        Ok(inverse)
    }

    /// `g <- g ∘ (2 id - f ∘ g)` from `g = id`; each step doubles the
    /// x-adic accuracy, so `ceil(log2 d) + 1` steps suffice.
    fn newton_inverse(&self) -> Self {
        let d = self.order.get();
        let steps = u32::BITS - (d - 1).leading_zeros() + 1;
        let two = Rational::from_integer(2.into());
        let mut g = Self::identity(self.order);
        for _ in 0..steps {
            let e = self.compose(&g).expect("same order");
            let correction = Self::new(
                Polynomial::std_var(Z).scale(&two) - e.image_z.poly(),
                Polynomial::std_var(T).scale(&two) - e.image_t.poly(),
                self.order,
            );
            g = g.compose(&correction).expect("same order");
        }
        g
    }

    /// The `x^j` parts `(a, b)` of `image_z - z` and `image_t - t`.
    pub fn first_order_part(&self, j: u32) -> Result<(Polynomial, Polynomial)> {
        if j == 0 || j >= self.order.get() {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= j <= d - 1, got j = {j}, d = {}",
                self.order
            )));
        }
        if !self.is_congruent_to_identity(j) {
            return Err(Error::NotInA(j));
        }
        let a = (self.image_z.poly() - &Polynomial::std_var(Z)).coefficient_of(X, j);
        let b = (self.image_t.poly() - &Polynomial::std_var(T)).coefficient_of(X, j);
        Ok((a, b))
    }

    /// The potential `h` in `(z, t)` with `f ≡ exp(x^j D_h) mod x^{j+1}`,
    /// i.e. `f(z) ≡ z - x^j h_t` and `f(t) ≡ t + x^j h_z`.
    pub fn phi(&self, j: u32) -> Result<Polynomial> {
        let (a, b) = self.first_order_part(j)?;
        potential(&a, &b)
    }

    /// `alpha` with `phi(f) = alpha r0 + c`, for `f` in `A_j(r)`.
    pub fn psi(&self, j: u32, params: &RParams) -> Result<Polynomial> {
        if !self.stabilizes_r(params)? {
            return Err(Error::NotStabilizing(self.to_string()));
        }
        let h0 = self.phi(j)?;
        let c = h0
            .coefficients_in(&[Z, T])
            .remove(&vec![0, 0])
            .unwrap_or_else(Polynomial::std_zero);
        match (&h0 - &c).exact_div(&params.r0(), Z)? {
            Division::Exact(alpha) => Ok(alpha),
            Division::Remainder { remainder, .. } => {
                Err(Error::NotMultipleOfR0(remainder.to_string()))
            }
        }
    }
}

fn diagonal_factor(p: &Polynomial, v: Var) -> Option<Rational> {
    let c = p.coefficient_of(v, 1).as_constant()?;
    let rest = p - &Polynomial::std_var(v).scale(&c);
    (rest.is_zero() && !c.is_zero()).then_some(c)
}

/// Reconstructs `h` with `h_t = -a`, `h_z = b`, `h(0,0) = 0` from a
/// divergence-free pair.
pub fn potential(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    let divergence = a.derivative(Z) + b.derivative(T);
    if !divergence.is_zero() {
        return Err(Error::NotClosed(format!("div = {divergence}")));
    }
    Ok(b.coefficient_of(T, 0).integrate(Z) - a.integrate(T))
}
