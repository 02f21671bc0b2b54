//! Arithmetic in `Q[x]/(x^d)[z,t]`, optionally with `lambda` as an extra
//! coefficient variable.
//!
//! Elements are reduced eagerly (x-degree below `d`), so equality of
//! [`TruncElem`]s is equality of their underlying polynomials.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::vars::{X, Z};
use crate::poly::{Polynomial, Rational};

/// The truncation order `d >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct TruncOrder(u32);

impl TruncOrder {
    pub fn new(d: u32) -> Result<Self> {
        if d >= 2 {
            Ok(Self(d))
        } else {
            Err(Error::InvalidParameters(format!(
                "truncation order must be at least 2, got {d}"
            )))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for TruncOrder {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Self::new(d)
    }
}

impl From<TruncOrder> for u32 {
    fn from(d: TruncOrder) -> u32 {
        d.0
    }
}

impl fmt::Display for TruncOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of the truncated ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncElem {
    poly: Polynomial,
    order: TruncOrder,
}

/// Drops all monomials with x-exponent `>= d`.
pub fn reduce(p: &Polynomial, d: TruncOrder) -> TruncElem {
    TruncElem {
        poly: p.truncate(X, d.get()),
        order: d,
    }
}

impl TruncElem {
    pub fn zero(d: TruncOrder) -> Self {
        reduce(&Polynomial::std_zero(), d)
    }

    pub fn one(d: TruncOrder) -> Self {
        reduce(&Polynomial::std_one(), d)
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_poly(self) -> Polynomial {
        self.poly
    }

    pub fn order(&self) -> TruncOrder {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.poly.is_one()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order.get(),
                right: other.order.get(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            poly: &self.poly + &other.poly,
            order: self.order,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            poly: &self.poly - &other.poly,
            order: self.order,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            poly: self.poly.mul_truncated(&other.poly, X, self.order.get()),
            order: self.order,
        })
    }

    /// Inverse of a unit, i.e. an element whose image mod `x` is a nonzero
    /// rational constant. With `u = c + n`, `n` in `(x)`, the geometric series
    /// `c^-1 * sum_{i<d} (-n/c)^i` terminates because `n^d = 0`.
    pub fn invert(&self) -> Result<Self> {
        let d = self.order.get();
        let c = self
            .poly
            .truncate(X, 1)
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::NotAUnit(self.poly.to_string()))?;
        let c_inv = c.recip();
        let nilpotent = (&self.poly - &Polynomial::std_const(c)).scale(&c_inv);
        let step = -&nilpotent;
        let mut sum = Polynomial::std_one();
        let mut power = Polynomial::std_one();
        for _ in 1..d {
            power = power.mul_truncated(&step, X, d);
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(Self {
            poly: sum.scale(&c_inv),
            order: self.order,
        })
    }

    /// Division with remainder by `m`, which must be monic in `z` over
    /// `Q[x]/(x^d)[t, lambda]`.
    pub fn divide_by_monic_z(&self, m: &TruncElem) -> Result<(TruncElem, TruncElem)> {
        self.check(m)?;
        if m.poly.as_constant().is_some() || !m.poly.coefficient_of(Z, m.poly.degree_in(Z)).is_one()
        {
            return Err(Error::NotMonic(m.poly.to_string()));
        }
        let d = self.order.get();
        let (q, r) = self.poly.div_rem_monic_truncated(&m.poly, Z, X, d)?;
        Ok((reduce(&q, self.order), reduce(&r, self.order)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            poly: self.poly.scale(c),
            order: self.order,
        }
    }
}

impl fmt::Display for TruncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod x^{}", self.poly, self.order)
    }
}

/// True when `p` has a nonzero rational image mod `x` (so it is a unit).
pub fn is_unit(p: &TruncElem) -> bool {
    p.poly
        .truncate(X, 1)
        .as_constant()
        .is_some_and(|c| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse_std(s).unwrap()
    }

    fn order(d: u32) -> TruncOrder {
        TruncOrder::new(d).unwrap()
    }

    fn e(s: &str, d: u32) -> TruncElem {
        reduce(&p(s), order(d))
    }

    #[test]
    fn order_must_be_at_least_two() {
        assert!(TruncOrder::new(1).is_err());
        assert!(TruncOrder::new(0).is_err());
        assert_eq!(TruncOrder::new(2).unwrap().get(), 2);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(e("x^3 + x*z", 2).poly(), &p("x*z"));
        assert_eq!(e("z^2 + t^3 + x", 2).poly(), &p("z^2 + t^3 + x"));
        assert!(e("0", 3).is_zero());
    }

    #[test]
    fn mul_examples() {
        assert!(e("x*z", 4).mul(&e("x^3", 4)).unwrap().is_zero());
        assert_eq!(e("z + x*t", 3).mul(&TruncElem::one(order(3))).unwrap(), e("z + x*t", 3));
        assert!(e("1 + x*z", 2).mul(&e("1 - x*z", 2)).unwrap().is_one());
        assert!(matches!(
            e("z", 2).mul(&e("z", 3)),
            Err(Error::OrderMismatch { .. })
        ));
        assert_eq!(e("x*z", 2).add(&e("x*z", 2)).unwrap(), e("2*x*z", 2));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(e("1 + x*z", 3).invert().unwrap(), e("1 - x*z + x^2*z^2", 3));
        assert_eq!(e("2", 2).invert().unwrap(), e("1/2", 2));
        assert!(matches!(e("z", 3).invert(), Err(Error::NotAUnit(_))));
        assert!(e("x", 3).invert().is_err());
        assert!(e("1 + z", 3).invert().is_err());
    }

    #[test]
    fn divide_by_monic_z_examples() {
        let r = e("z^2 + t^3 + x", 3);
        let (q, rem) = r.divide_by_monic_z(&r).unwrap();
        assert!(q.is_one() && rem.is_zero());
        let (q, rem) = e("x*z^2 + x*t^3 + x^2", 3).divide_by_monic_z(&r).unwrap();
        assert_eq!(q, e("x", 3));
        assert!(rem.is_zero());
        let (q, rem) = e("z", 3).divide_by_monic_z(&r).unwrap();
        assert!(q.is_zero());
        assert_eq!(rem, e("z", 3));
        assert!(matches!(
            e("z", 3).divide_by_monic_z(&e("2*z + t", 3)),
            Err(Error::NotMonic(_))
        ));
    }
}
