//! Poisson bracket in `z, t`, Hamiltonian derivations and their flows.
//!
//! Everything other than `z` and `t` (that is `x` and `lambda`) is a
//! coefficient for the bracket. The formal flow `exp(w D_H)` is kept as a
//! polynomial in the auxiliary variable `w` truncated at a chosen order `N`;
//! the truncated flow `exp(x^j D_H)` on `Q[x]/(x^d)[z,t]` is exact because
//! `x^j D_H` is nilpotent there.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::vars::{T, W, X, Y, Z};
use crate::poly::{Polynomial, Rational};
use crate::trunc_aut::TruncatedMap;
use crate::truncated::TruncOrder;

/// `{f, g} = f_z g_t - g_z f_t`.
pub fn bracket(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let fz = f.derivative(Z);
    let ft = f.derivative(T);
    let gz = g.derivative(Z);
    let gt = g.derivative(T);
    &fz * &gt - &gz * &ft
}

/// `D_H(f) = {H, f}`.
pub fn apply_d(h: &Polynomial, f: &Polynomial) -> Polynomial {
    HamiltonianDerivation::new(h.clone()).apply(f)
}

/// The derivation `D_H = H_z d/dt - H_t d/dz` with cached partials of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianDerivation {
    hamiltonian: Polynomial,
    h_z: Polynomial,
    h_t: Polynomial,
}

impl HamiltonianDerivation {
    pub fn new(hamiltonian: Polynomial) -> Self {
        let h_z = hamiltonian.derivative(Z);
        let h_t = hamiltonian.derivative(T);
        Self {
            hamiltonian,
            h_z,
            h_t,
        }
    }

    pub fn hamiltonian(&self) -> &Polynomial {
        &self.hamiltonian
    }

    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        &self.h_z * &f.derivative(T) - &self.h_t * &f.derivative(Z)
    }

    /// `D_H(f)` modulo `x^bound`.
    pub fn apply_truncated(&self, f: &Polynomial, bound: u32) -> Polynomial {
        self.h_z.mul_truncated(&f.derivative(T), X, bound)
            - self.h_t.mul_truncated(&f.derivative(Z), X, bound)
    }

    /// `[v, D v, D^2 v, ..., D^{n-1} v]`.
    pub fn iterates(&self, v: &Polynomial, n: usize) -> Vec<Polynomial> {
        let mut out = Vec::with_capacity(n);
        if n == 0 {
            return out;
        }
        out.push(v.clone());
        while out.len() < n {
            let next = self.apply(out.last().unwrap());
            out.push(next);
        }
        out
    }
}

fn check_hamiltonian(h: &Polynomial) -> Result<()> {
    if h.contains_var(W) || h.contains_var(Y) {
        return Err(Error::OutsideVariables(h.to_string(), "x, z, t, lambda"));
    }
    Ok(())
}

/// `exp(w D_H)` truncated at `w^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalFlow {
    hamiltonian: Polynomial,
    order: u32,
    image_z: Polynomial,
    image_t: Polynomial,
}

impl FormalFlow {
    pub fn hamiltonian(&self) -> &Polynomial {
        &self.hamiltonian
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `sum_{m<N} w^m/m! D_H^m(z)`.
    pub fn image_z(&self) -> &Polynomial {
        &self.image_z
    }

    pub fn image_t(&self) -> &Polynomial {
        &self.image_t
    }
}

pub fn formal_flow(h: &Polynomial, order: u32) -> Result<FormalFlow> {
    check_hamiltonian(h)?;
    if order == 0 {
        return Err(Error::InvalidParameters("formal flow order must be positive".into()));
    }
    let der = HamiltonianDerivation::new(h.clone());
    let series = |v: &Polynomial| {
        let mut acc = Polynomial::std_zero();
        let mut factorial = Rational::from_integer(BigInt::from(1));
        for (m, term) in der.iterates(v, order as usize).into_iter().enumerate() {
            if m > 0 {
                factorial *= Rational::from_integer(BigInt::from(m));
            }
            acc = acc + term.scale(&factorial.recip()).shift(W, m as u32);
        }
        acc
    };
    Ok(FormalFlow {
        hamiltonian: h.clone(),
        order,
        image_z: series(&Polynomial::std_var(Z)),
        image_t: series(&Polynomial::std_var(T)),
    })
}

/// `{phi(z), phi(t)}` reduced modulo `w^N`. Equal to 1 for every `H`.
pub fn jacobian_det_flow(flow: &FormalFlow) -> Polynomial {
    let n = flow.order;
    let (fz, ft) = (flow.image_z.derivative(Z), flow.image_z.derivative(T));
    let (gz, gt) = (flow.image_t.derivative(Z), flow.image_t.derivative(T));
    fz.mul_truncated(&gt, W, n) - gz.mul_truncated(&ft, W, n)
}

/// `Sigma_n = sum_k C(n,k) {D^k z, D^{n-k} t}` for `n = 0..=n_max`.
pub fn sigma_sequence(h: &Polynomial, n_max: usize) -> Result<Vec<Polynomial>> {
    check_hamiltonian(h)?;
    let der = HamiltonianDerivation::new(h.clone());
    let dz = der.iterates(&Polynomial::std_var(Z), n_max + 1);
    let dt = der.iterates(&Polynomial::std_var(T), n_max + 1);
    Ok((0..=n_max)
        .map(|n| {
            let mut acc = Polynomial::std_zero();
            for k in 0..=n {
                let c = Rational::from_integer(binomial(BigInt::from(n), BigInt::from(k)));
                acc = acc + bracket(&dz[k], &dt[n - k]).scale(&c);
            }
            acc
        })
        .collect())
}

/// `exp(x^j D_H)` on `Q[x]/(x^d)[z,t]`.
///
/// Terms with `m * j >= d` vanish, so exactly `ceil(d/j)` terms are summed.
pub fn truncated_flow(h: &Polynomial, j: u32, d: TruncOrder) -> Result<TruncatedMap> {
    check_hamiltonian(h)?;
    if j == 0 {
        return Err(Error::InvalidParameters("flow exponent j must be at least 1".into()));
    }
    let bound = d.get();
    let steps = bound.div_ceil(j);
    let der = HamiltonianDerivation::new(h.truncate(X, bound));
    let exp = |v: Polynomial| {
        let mut acc = v.clone();
        let mut term = v;
        for m in 1..steps {
            // term already carries x^{(m-1)j}; only D(term) mod x^{d-j} survives
            term = der
                .apply_truncated(&term, bound - j)
                .shift(X, j)
                .scale(&Rational::from_integer(BigInt::from(m)).recip());
            if term.is_zero() {
                break;
            }
            acc = acc + &term;
        }
        acc
    };
    let image_z = exp(Polynomial::std_var(Z));
    let image_t = exp(Polynomial::std_var(T));
    Ok(TruncatedMap::new(image_z, image_t, d))
}

/// Checks the three identities behind the volume-preservation argument:
/// `Sigma_0 = 1`, `Sigma_n = 0` for `1 <= n <= n_max`, and `D(Sigma_n) = Sigma_{n+1}`.
pub fn sigma_identities_hold(h: &Polynomial, n_max: usize) -> Result<bool> {
    let sigma = sigma_sequence(h, n_max + 1)?;
    let der = HamiltonianDerivation::new(h.clone());
    let base = sigma[0].is_one() && sigma[1..=n_max].iter().all(Polynomial::is_zero);
    let recursion = (0..=n_max).all(|n| der.apply(&sigma[n]) == sigma[n + 1]);
    Ok(base && recursion)
}

/// True when `p` is `1` modulo `w^n`.
pub fn is_one_mod_w(p: &Polynomial, n: u32) -> bool {
    let reduced = p.truncate(W, n);
    reduced.is_one() && !reduced.constant_term().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse_std(s).unwrap()
    }

    fn order(d: u32) -> TruncOrder {
        TruncOrder::new(d).unwrap()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(bracket(&p("z"), &p("t")), p("1"));
        let f = p("x*z^3*t + lambda*t^2 - z");
        assert!(bracket(&f, &f).is_zero());
        // {z^2, t^3} = 2z * 3t^2 - 0
        assert_eq!(bracket(&p("z^2"), &p("t^3")), p("6*z*t^2"));
    }

    #[test]
    fn apply_d_examples() {
        // H_z = t, H_t = z: D(z) = -z, D(t) = t
        assert_eq!(apply_d(&p("z*t"), &p("z")), p("-z"));
        assert_eq!(apply_d(&p("z*t"), &p("t")), p("t"));
        let h = p("x*z^2 + t^5 - 3*z*t");
        assert!(apply_d(&h, &h).is_zero());
    }

    #[test]
    fn formal_flow_examples() {
        let id = formal_flow(&p("x^2 + 3*x"), 5).unwrap();
        assert_eq!(id.image_z(), &p("z"));
        assert_eq!(id.image_t(), &p("t"));

        let shear = formal_flow(&p("t^2"), 6).unwrap();
        assert_eq!(shear.image_z(), &p("z - 2*w*t"));
        assert_eq!(shear.image_t(), &p("t"));

        let hyperbolic = formal_flow(&p("z*t"), 2).unwrap();
        assert_eq!(hyperbolic.image_z(), &p("z - w*z"));
        assert_eq!(hyperbolic.image_t(), &p("t + w*t"));

        assert!(formal_flow(&p("z"), 0).is_err());
        assert!(formal_flow(&p("w*z"), 3).is_err());
    }

    #[test]
    fn jacobian_of_formal_flow_is_one() {
        for h in ["z*t", "t^2", "x*z^3 - t^2*z + 2", "z^2*t^2 + lambda*t^3"] {
            for n in 1..=5 {
                let det = jacobian_det_flow(&formal_flow(&p(h), n).unwrap());
                assert!(det.is_one(), "H = {h}, N = {n}: det = {det}");
            }
        }
        // (1 - w + w^2/2)(1 + w + w^2/2) = 1 + w^4/4, so the truncation matters
        let flow = formal_flow(&p("z*t"), 3).unwrap();
        let full = &flow.image_z().derivative(Z) * &flow.image_t().derivative(T);
        assert_eq!(full, p("1 + 1/4*w^4"));
        assert!(jacobian_det_flow(&flow).is_one());
    }

    #[test]
    fn sigma_examples() {
        let h = p("z^3 - x*t^2*z + t");
        let sigma = sigma_sequence(&h, 5).unwrap();
        assert!(sigma[0].is_one());
        assert!(sigma[1..].iter().all(Polynomial::is_zero));
        assert!(sigma_identities_hold(&h, 5).unwrap());
    }

    #[test]
    fn truncated_flow_examples() {
        let h = p("z^2*t + x*t^3");
        let id = truncated_flow(&h, 3, order(3)).unwrap();
        assert!(id.is_identity());

        let f = truncated_flow(&p("z*t"), 1, order(2)).unwrap();
        assert_eq!(f.image_z().poly(), &p("z - x*z"));
        assert_eq!(f.image_t().poly(), &p("t + x*t"));

        for d in 2..6 {
            let f = truncated_flow(&p("t^2"), 1, order(d)).unwrap();
            assert_eq!(f.image_z().poly(), &p("z - 2*x*t"));
            assert_eq!(f.image_t().poly(), &p("t"));
        }

        // exp(x D_{zt}) mod x^3: z -> z(1 - x + x^2/2), t -> t(1 + x + x^2/2)
        let f = truncated_flow(&p("z*t"), 1, order(3)).unwrap();
        assert_eq!(f.image_z().poly(), &p("z - x*z + 1/2*x^2*z"));
        assert_eq!(f.image_t().poly(), &p("t + x*t + 1/2*x^2*t"));
        assert!(truncated_flow(&p("z"), 0, order(3)).is_err());
    }

    #[test]
    fn truncated_flow_agrees_with_formal_flow_at_w_equals_x() {
        let h = p("z^2*t - t^3 + x*z");
        let d = 4;
        let formal = formal_flow(&h, d).unwrap();
        let at_x = |q: &Polynomial| {
            q.substitute(&[(W, p("x"))].into_iter().collect())
                .unwrap()
                .truncate(X, d)
        };
        let f = truncated_flow(&h, 1, order(d)).unwrap();
        assert_eq!(f.image_z().poly(), &at_x(formal.image_z()));
        assert_eq!(f.image_t().poly(), &at_x(formal.image_t()));
        assert_eq!(int(1), f.jacobian_det().poly().constant_term());
    }
}
