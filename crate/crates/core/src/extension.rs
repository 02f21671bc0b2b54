//! Extension of automorphisms of `X` to automorphisms of `Q[x,y,z,t]`
//! preserving the ideal `(P)`.
//!
//! For the flows `exp(x D_{gamma r})` the construction goes through the
//! fibers of `P`: a word `F` over `Q[lambda]` stabilizing `(r - lambda, x^d)`
//! gives `F(r - lambda) = alpha (r - lambda) + beta x^d`, hence
//! `y -> y alpha - beta` preserves `P - lambda`, and `lambda -> P` collapses
//! the family to an automorphism of the ambient ring with `Phi(P) = P`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::vars::{LAMBDA, T, W, X, Y, Z};
use crate::poly::{Polynomial, Rational, Var};
use crate::threefold::{decompose_x_adic, Images, Threefold, ThreefoldAut};
use crate::trunc_aut::RParams;
use crate::truncated::TruncOrder;
use crate::words::{lift_with_target_order_bounded, AutWord, Generator};

/// `F = lift_hamiltonian(1, gamma (r - lambda), depth)` over `Q[lambda]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaFamily {
    word: AutWord,
    gamma: Polynomial,
    order: TruncOrder,
}

impl LambdaFamily {
    pub fn word(&self) -> &AutWord {
        &self.word
    }

    pub fn gamma(&self) -> &Polynomial {
        &self.gamma
    }

    pub fn order(&self) -> TruncOrder {
        self.order
    }

    /// The word with `lambda` replaced by `lambda0`.
    pub fn specialize(&self, lambda0: &Rational) -> Result<AutWord> {
        let value = Polynomial::std_const(lambda0.clone());
        let bindings: BTreeMap<Var, Polynomial> = [(LAMBDA, value)].into_iter().collect();
        let generators = self
            .word
            .generators()
            .iter()
            .map(|g| match g {
                Generator::ZShear(p) => Generator::z_shear(p.substitute(&bindings)?),
                Generator::TShear(p) => Generator::t_shear(p.substitute(&bindings)?),
                Generator::Scale(a, b) => Generator::scale(a.clone(), b.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AutWord::new(generators))
    }

    /// Whether the specialization at `lambda0` stabilizes `(r - lambda0, x^d)`.
    /// Only the image modulo `x^d` matters since `x^d` is in the ideal.
    pub fn stabilizes_fiber(&self, lambda0: &Rational, threefold: &Threefold) -> Result<bool> {
        let d = threefold.params().order();
        let shifted = threefold.r0() - &Polynomial::std_const(lambda0.clone());
        let s = &Polynomial::std_var(X) + &shifted;
        let image = self.specialize(lambda0)?.truncate(d).apply(&s);
        match decompose_x_adic(image.poly(), &shifted, d.get()) {
            Ok(_) => Ok(true),
            Err(Error::NotInIdeal(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// The family of depth `d`.
pub fn build_lambda_family(gamma: &Polynomial, threefold: &Threefold) -> Result<LambdaFamily> {
    build_lambda_family_to_order(gamma, threefold, threefold.params().order())
}

/// A family agreeing with the flow modulo `x^depth`, `depth >= d`; depth
/// `d + 1` yields extensions fixing the origin.
pub fn build_lambda_family_to_order(
    gamma: &Polynomial,
    threefold: &Threefold,
    depth: TruncOrder,
) -> Result<LambdaFamily> {
    build_lambda_family_bounded(gamma, threefold, depth, None)
}

/// [`build_lambda_family_to_order`] under a degree budget on the word, see
/// [`crate::words::lift_hamiltonian_bounded`].
pub fn build_lambda_family_bounded(
    gamma: &Polynomial,
    threefold: &Threefold,
    depth: TruncOrder,
    budget: Option<u64>,
) -> Result<LambdaFamily> {
    for v in [Y, W, LAMBDA] {
        if gamma.contains_var(v) {
            return Err(Error::OutsideVariables(gamma.to_string(), "x, z, t"));
        }
    }
    let h = gamma * &lambda_relation(threefold);
    // the lift certifies its own truncation modulo x^depth
    let word = lift_with_target_order_bounded(1, &h, threefold.params().order(), depth, budget)?;
    Ok(LambdaFamily {
        word,
        gamma: gamma.clone(),
        order: depth,
    })
}

/// `r - lambda`.
fn lambda_relation(threefold: &Threefold) -> Polynomial {
    threefold.r() - &Polynomial::std_var(LAMBDA)
}

/// `phi(r) = alpha r + beta x^d` (over `Q[lambda]` with `r - lambda` for
/// families), and `Phi(P) = quotient P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub alpha: Polynomial,
    pub beta: Polynomial,
    pub quotient: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbientSource {
    Identity,
    Ad { word: AutWord },
    Torus { lambda: String },
    Family { gamma: Polynomial, word: AutWord },
}

/// An automorphism of `Q[x,y,z,t]` with `Phi(P) = quotient P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientAut {
    pub params: RParams,
    pub images: Images,
    pub inverse: Images,
    pub certificate: Certificate,
    pub inverse_certificate: Certificate,
    pub source: AmbientSource,
}

impl AmbientAut {
    pub fn identity(params: RParams) -> Self {
        let trivial = Certificate {
            alpha: Polynomial::std_one(),
            beta: Polynomial::std_zero(),
            quotient: Polynomial::std_one(),
        };
        Self {
            params,
            images: Images::identity(),
            inverse: Images::identity(),
            certificate: trivial.clone(),
            inverse_certificate: trivial,
            source: AmbientSource::Identity,
        }
    }

    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        self.images.apply(p)
    }

    pub fn is_identity(&self) -> bool {
        self.images.is_identity()
    }

    /// Both certificates and both compositions, as exact polynomial
    /// identities.
    pub fn verify(&self) -> Result<()> {
        let p = self.params.p();
        for (name, images, cert) in [
            ("forward", &self.images, &self.certificate),
            ("inverse", &self.inverse, &self.inverse_certificate),
        ] {
            if images.apply(&p)? != &cert.quotient * &p {
                return Err(Error::VerificationFailed(format!(
                    "{name} image of P is not {} * P",
                    cert.quotient
                )));
            }
        }
        let (forward, backward) = match &self.source {
            AmbientSource::Ad { word } => (
                self.images.compose_factored(word, None, &self.inverse)?,
                self.inverse.compose_factored(&word.invert(), None, &self.images)?,
            ),
            AmbientSource::Family { word, .. } => (
                self.images.compose_factored(word, Some(&p), &self.inverse)?,
                self.inverse.compose_factored(&word.invert(), Some(&p), &self.images)?,
            ),
            _ => (self.images.compose(&self.inverse)?, self.inverse.compose(&self.images)?),
        };
        if !forward.is_identity() || !backward.is_identity() {
            return Err(Error::VerificationFailed("inverse images do not invert".into()));
        }
        Ok(())
    }

    /// The induced automorphism of `Q[X]`.
    pub fn restrict_to_x(&self) -> ThreefoldAut {
        ThreefoldAut {
            params: self.params,
            images: self.images.clone(),
            inverse: self.inverse.clone(),
            provenance: crate::threefold::Provenance::Images,
        }
    }

    /// Whether `self` induces `aut` on `X`.
    pub fn restricts_to(&self, aut: &ThreefoldAut, threefold: &Threefold) -> bool {
        threefold.same_on_x(&self.restrict_to_x(), aut)
    }

    pub fn fixes_origin(&self) -> bool {
        self.images.vanish_at_origin() && self.inverse.vanish_at_origin()
    }
}

/// `Phi` extending a word `phi` that is the identity modulo `x^d`:
/// `Phi(y) = y - b` with `phi(r) = r + b x^d`.
#[allow(non_snake_case)]
pub fn extend_Ad(word: &AutWord, threefold: &Threefold) -> Result<AmbientAut> {
    let order = threefold.params().order();
    if word.uses_lambda() {
        return Err(Error::InvalidGenerator(format!("lambda coefficient in {word}")));
    }
    if !word.truncate(order).is_identity() {
        return Err(Error::NotInA(order.get()));
    }
    let (images, certificate) = ad_images(word, threefold)?;
    let (inverse, inverse_certificate) = ad_images(&word.invert(), threefold)?;
    let aut = AmbientAut {
        params: threefold.params(),
        images,
        inverse,
        certificate,
        inverse_certificate,
        source: AmbientSource::Ad { word: word.clone() },
    };
    aut.verify()?;
    Ok(aut)
}

fn ad_images(word: &AutWord, threefold: &Threefold) -> Result<(Images, Certificate)> {
    let d = threefold.params().d();
    let (z, t) = word.images();
    let delta = &subst_zt(threefold.r(), &z, &t)? - threefold.r();
    let b = delta.unshift(X, d).ok_or(Error::NotInA(d))?;
    let images = Images {
        x: Polynomial::std_var(X),
        y: &Polynomial::std_var(Y) - &b,
        z,
        t,
    };
    let certificate = Certificate {
        alpha: Polynomial::std_one(),
        beta: b,
        quotient: Polynomial::std_one(),
    };
    Ok((images, certificate))
}

fn subst_zt(p: &Polynomial, z: &Polynomial, t: &Polynomial) -> Result<Polynomial> {
    Ok(p.substitute(&[(Z, z.clone()), (T, t.clone())].into_iter().collect())?)
}

/// The torus action is linear on the ambient space: `P -> l^{kl} P`.
pub fn extend_torus(lambda: &Rational, threefold: &Threefold) -> Result<AmbientAut> {
    let aut = threefold.torus_action(lambda)?;
    let params = threefold.params();
    let weight = |s: &Rational| num_traits::pow(s.clone(), (params.k() * params.l()) as usize);
    let certificate = |s: &Rational| Certificate {
        alpha: Polynomial::std_const(weight(s)),
        beta: Polynomial::std_zero(),
        quotient: Polynomial::std_const(weight(s)),
    };
    let ambient = AmbientAut {
        params,
        images: aut.images,
        inverse: aut.inverse,
        certificate: certificate(lambda),
        inverse_certificate: certificate(&lambda.recip()),
        source: AmbientSource::Torus {
            lambda: lambda.to_string(),
        },
    };
    ambient.verify()?;
    Ok(ambient)
}

/// Collapses the family along `lambda -> P`.
pub fn extend_generator(family: &LambdaFamily, threefold: &Threefold) -> Result<AmbientAut> {
    if family.order < threefold.params().order() {
        return Err(Error::OrderMismatch {
            left: family.order.get(),
            right: threefold.params().d(),
        });
    }
    let (forward, certificate) = family_images(&family.word, threefold)?;
    let (inverse, inverse_certificate) = family_images(&family.word.invert(), threefold)?;
    let aut = AmbientAut {
        params: threefold.params(),
        images: forward,
        inverse,
        certificate,
        inverse_certificate,
        source: AmbientSource::Family {
            gamma: family.gamma.clone(),
            word: family.word.clone(),
        },
    };
    aut.verify()?;
    Ok(aut)
}

/// Images of `x, y, z, t` after `lambda -> P`, with the `Q[lambda]`
/// decomposition as certificate, normalized by `deg_x alpha < d` (see
/// [`decompose_x_adic`]; the x-free normalization of `beta` is far larger). The quotient is 1: the family map sends
/// `P - lambda` to `alpha (P - lambda)` and fixes `lambda`.
fn family_images(word: &AutWord, threefold: &Threefold) -> Result<(Images, Certificate)> {
    let d = threefold.params().d();
    let shifted = threefold.r0() - &Polynomial::std_var(LAMBDA);
    let (z, t) = word.images();
    let moved = subst_zt(&lambda_relation(threefold), &z, &t)?;
    let (alpha, beta) = decompose_x_adic(&moved, &shifted, d).map_err(|e| match e {
        Error::NotInIdeal(g) => Error::VerificationFailed(format!(
            "family does not stabilize (r - lambda, x^d): {g}"
        )),
        e => e,
    })?;
    let collapse: BTreeMap<Var, Polynomial> = [(LAMBDA, threefold.p().clone())].into_iter().collect();
    let y = &(&Polynomial::std_var(Y) * &alpha) - &beta;
    let images = Images {
        x: Polynomial::std_var(X),
        y: y.substitute(&collapse)?,
        z: z.substitute(&collapse)?,
        t: t.substitute(&collapse)?,
    };
    Ok((
        images,
        Certificate {
            alpha,
            beta,
            quotient: Polynomial::std_one(),
        },
    ))
}

/// Fiber bookkeeping for `Phi(P) = q P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub fiber: String,
    pub quotient: Polynomial,
    /// `Phi(P) - quotient P = 0`.
    pub certificate_holds: bool,
    /// Every fiber is mapped to itself (`quotient = 1`).
    pub preserves_all_fibers: bool,
    /// `Phi` maps `V(P - target)` onto `V(P - fiber)`, i.e. `target = fiber / q`
    /// when `q` is constant.
    pub source_fiber: Option<String>,
}

pub fn restrict_to_fiber(aut: &AmbientAut, threefold: &Threefold, c: &Rational) -> Result<FiberReport> {
    let p = threefold.p();
    let quotient = aut.certificate.quotient.clone();
    let certificate_holds = (aut.apply(p)? - &quotient * p).is_zero();
    // Phi^*(P - c) = q (P - c/q), so points of V(P - c/q) land in V(P - c)
    let source_fiber = quotient
        .as_constant()
        .filter(|q| !q.is_zero())
        .map(|q| (c / q).to_string());
    Ok(FiberReport {
        fiber: c.to_string(),
        preserves_all_fibers: certificate_holds && quotient.is_one(),
        quotient,
        certificate_holds,
        source_fiber,
    })
}

/// `Phi` on the fiber data: `P -> q P`; a constant `q` moves fiber `c` to
/// `q c` under the point map.
pub fn image_fiber(aut: &AmbientAut, c: &Rational) -> Option<Rational> {
    aut.certificate.quotient.as_constant().map(|q| q * c)
}

impl Certificate {
    pub fn is_trivial(&self) -> bool {
        self.alpha.is_one() && self.beta.is_zero() && self.quotient.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn p(s: &str) -> Polynomial {
        Polynomial::parse_std(s).unwrap()
    }

    fn x223() -> Threefold {
        Threefold::new(RParams::new(2, 2, 3).unwrap())
    }

    #[test]
    fn ad_examples() {
        let x = x223();
        let word = AutWord::new([Generator::z_shear(p("x^2*t")).unwrap()]);
        let aut = extend_Ad(&word, &x).unwrap();
        // (z + x^2 t)^2 - z^2 = x^2 (2 z t + x^2 t^2)
        assert_eq!(aut.images.y, p("y - 2*z*t - x^2*t^2"));
        assert_eq!(aut.apply(x.p()).unwrap(), x.p().clone());
        assert!(aut.certificate.alpha.is_one());
        assert!(extend_Ad(&AutWord::identity(), &x).unwrap().is_identity());
        let bad = AutWord::new([Generator::z_shear(p("x*t")).unwrap()]);
        assert!(matches!(extend_Ad(&bad, &x), Err(Error::NotInA(2))));
        assert!(aut.restricts_to(&x.lift_word(&word).unwrap(), &x));
    }

    #[test]
    fn family_examples() {
        let x = x223();
        let zero = build_lambda_family(&p("0"), &x).unwrap();
        assert!(zero.word().is_empty());
        assert!(extend_generator(&zero, &x).unwrap().is_identity());
        let one = build_lambda_family(&p("1"), &x).unwrap();
        let trunc = one.word().truncate(TruncOrder::new(2).unwrap());
        assert_eq!(trunc.image_z().poly(), &p("z - 3*x*t^2"));
        assert_eq!(trunc.image_t().poly(), &p("t + 2*x*z"));
        let aut = extend_generator(&one, &x).unwrap();
        assert_eq!(aut.apply(x.p()).unwrap(), x.p().clone());
        let at_zero = x.lift_word(&one.specialize(&int(0)).unwrap()).unwrap();
        assert!(aut.restricts_to(&at_zero, &x));
        for l0 in [int(0), int(3), rat(-1, 2)] {
            assert!(one.stabilizes_fiber(&l0, &x).unwrap());
        }
        assert!(build_lambda_family(&p("y"), &x).is_err());
    }

    #[test]
    fn deep_family_fixes_origin() {
        let x = x223();
        let deep = build_lambda_family_to_order(&p("3*x"), &x, TruncOrder::new(3).unwrap()).unwrap();
        let aut = extend_generator(&deep, &x).unwrap();
        assert!(aut.fixes_origin());
        let shallow = build_lambda_family(&p("3*x"), &x).unwrap();
        assert!(shallow.word().is_empty());
    }

    #[test]
    fn torus_examples() {
        let x = x223();
        let aut = extend_torus(&int(2), &x).unwrap();
        assert_eq!(aut.apply(x.p()).unwrap(), x.p().scale(&int(64)));
        let report = restrict_to_fiber(&aut, &x, &int(1)).unwrap();
        assert!(report.certificate_holds && !report.preserves_all_fibers);
        assert_eq!(image_fiber(&aut, &int(1)), Some(int(64)));
        assert_eq!(report.source_fiber.as_deref(), Some("1/64"));
        assert!(aut.fixes_origin());
        assert!(extend_torus(&int(0), &x).is_err());
    }

    #[test]
    fn fiber_examples() {
        let x = x223();
        let id = AmbientAut::identity(x.params());
        let report = restrict_to_fiber(&id, &x, &rat(5, 3)).unwrap();
        assert!(report.preserves_all_fibers);
        let word = AutWord::new([Generator::t_shear(p("x^2*z^3 - x^3")).unwrap()]);
        let ad = extend_Ad(&word, &x).unwrap();
        let report = restrict_to_fiber(&ad, &x, &int(-2)).unwrap();
        assert!(report.preserves_all_fibers && report.certificate_holds);
    }

    #[test]
    fn json_round_trip() {
        let x = x223();
        let aut = extend_generator(&build_lambda_family(&p("1"), &x).unwrap(), &x).unwrap();
        let text = serde_json::to_string(&aut).unwrap();
        let back: AmbientAut = serde_json::from_str(&text).unwrap();
        assert_eq!(back, aut);
    }
}
