//! Artifacts emitted by `kr make` and re-verified by `kr make <kind> --check`.

use serde::{Deserialize, Serialize};

use kr_core::extension::{
    build_lambda_family_to_order, extend_Ad, extend_generator, extend_torus, AmbientAut,
    AmbientSource,
};
use kr_core::hamiltonian::truncated_flow;
use kr_core::poly::vars::LAMBDA;
use kr_core::poly::{parse_rational, Polynomial};
use kr_core::threefold::{LndSide, Provenance, Threefold, ThreefoldAut};
use kr_core::trunc_aut::RParams;
use kr_core::truncated::TruncOrder;
use kr_core::words::{lift_with_target_order, AutWord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapImages {
    pub z: Polynomial,
    pub t: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowArtifact {
    pub hamiltonian: Polynomial,
    pub j: u32,
    pub d: u32,
    pub map: MapImages,
    pub jacobian_det: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftArtifact {
    pub hamiltonian: Polynomial,
    pub j: u32,
    pub d: u32,
    /// Truncation depth the word is certified to, at least `d`.
    pub depth: u32,
    pub word: AutWord,
    pub truncation: MapImages,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreefoldArtifact {
    pub aut: ThreefoldAut,
    pub fixes_origin: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendArtifact {
    /// Depth of the family word for `gamma` sources.
    pub depth: Option<u32>,
    pub aut: AmbientAut,
    pub fixes_origin: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
#[allow(clippy::large_enum_variant)] // built and checked once per process
pub enum Artifact {
    Flow(FlowArtifact),
    Lift(LiftArtifact),
    ThreefoldAut(ThreefoldArtifact),
    Extend(ExtendArtifact),
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Flow(_) => "flow",
            Artifact::Lift(_) => "lift",
            Artifact::ThreefoldAut(_) => "threefold-aut",
            Artifact::Extend(_) => "extend",
        }
    }
}

/// Bad input: exit status 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct MakeError {
    pub kind: &'static str,
    pub message: String,
}

impl MakeError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}

impl From<kr_core::Error> for MakeError {
    fn from(e: kr_core::Error) -> Self {
        let kind = match e {
            kr_core::Error::Poly(_) => "parse",
            kr_core::Error::VerificationFailed(_) => "verification",
            _ => "precondition",
        };
        MakeError::new(kind, e.to_string())
    }
}

pub fn parse_poly(what: &str, text: &str) -> Result<Polynomial, MakeError> {
    Polynomial::parse_std(text).map_err(|e| MakeError::new("parse", format!("{what}: {e}")))
}

fn order(d: u32) -> Result<TruncOrder, MakeError> {
    Ok(TruncOrder::new(d)?)
}

pub fn make_flow(h: &str, j: u32, d: u32) -> Result<Artifact, MakeError> {
    let hamiltonian = parse_poly("H", h)?;
    let map = truncated_flow(&hamiltonian, j, order(d)?)?;
    Ok(Artifact::Flow(FlowArtifact {
        j,
        d,
        map: MapImages {
            z: map.image_z().poly().clone(),
            t: map.image_t().poly().clone(),
        },
        jacobian_det: map.jacobian_det().into_poly(),
        hamiltonian,
    }))
}

pub fn make_lift(h: &str, j: u32, d: u32, depth: Option<u32>) -> Result<Artifact, MakeError> {
    let hamiltonian = parse_poly("h", h)?;
    let depth = depth.unwrap_or(d);
    let word = lift_with_target_order(j, &hamiltonian, order(d)?, order(depth)?)?;
    let truncation = word.truncate(order(depth)?);
    Ok(Artifact::Lift(LiftArtifact {
        j,
        d,
        depth,
        truncation: MapImages {
            z: truncation.image_z().poly().clone(),
            t: truncation.image_t().poly().clone(),
        },
        word,
        hamiltonian,
    }))
}

/// Where a threefold automorphism comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThreefoldSource {
    /// The lift of `exp(x D_{gamma r})`, to depth `d + 1` when `deep`.
    Gamma { gamma: String, deep: bool },
    /// A word in JSON form.
    Word(String),
    Torus(String),
    Lnd { side: LndSide, s: String },
}

pub fn make_threefold_aut(params: RParams, source: &ThreefoldSource) -> Result<Artifact, MakeError> {
    let x = Threefold::new(params);
    let aut = match source {
        ThreefoldSource::Gamma { gamma, deep } => {
            let gamma = parse_poly("gamma", gamma)?;
            let depth = params.d() + u32::from(*deep);
            let word =
                lift_with_target_order(1, &(&gamma * x.r()), params.order(), order(depth)?)?;
            x.lift_word(&word)?
        }
        ThreefoldSource::Word(json) => x.lift_word(&parse_word(json)?)?,
        ThreefoldSource::Torus(q) => x.torus_action(&parse_scalar(q)?)?,
        ThreefoldSource::Lnd { side, s } => x.lnd_exponential(*side, &parse_poly("s", s)?)?,
    };
    Ok(Artifact::ThreefoldAut(ThreefoldArtifact {
        fixes_origin: aut.fixes_origin(),
        aut,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendSource {
    Gamma { gamma: String, deep: bool },
    AdWord(String),
    Torus(String),
}

pub fn make_extend(params: RParams, source: &ExtendSource) -> Result<Artifact, MakeError> {
    let x = Threefold::new(params);
    let (aut, depth) = match source {
        ExtendSource::Gamma { gamma, deep } => {
            let gamma = parse_poly("gamma", gamma)?;
            let depth = params.d() + u32::from(*deep);
            let family = build_lambda_family_to_order(&gamma, &x, order(depth)?)?;
            (extend_generator(&family, &x)?, Some(depth))
        }
        ExtendSource::AdWord(json) => (extend_Ad(&parse_word(json)?, &x)?, None),
        ExtendSource::Torus(q) => (extend_torus(&parse_scalar(q)?, &x)?, None),
    };
    Ok(Artifact::Extend(ExtendArtifact {
        depth,
        fixes_origin: aut.fixes_origin(),
        aut,
    }))
}

/// JSON as in the artifacts, or the text form `[zshear(f), tshear(g), ...]`.
fn parse_word(text: &str) -> Result<AutWord, MakeError> {
    if text.trim_start().starts_with("[{") {
        return serde_json::from_str(text).map_err(|e| MakeError::new("parse", format!("word: {e}")));
    }
    text.parse().map_err(|e: kr_core::Error| MakeError::new("parse", format!("word: {e}")))
}

fn parse_scalar(text: &str) -> Result<kr_core::poly::Rational, MakeError> {
    parse_rational(text).map_err(|e| MakeError::new("parse", format!("torus parameter: {e}")))
}

/// Re-runs every certificate of `artifact`; `Err` carries the first failure.
pub fn check(artifact: &Artifact) -> Result<(), String> {
    let fail = |e: kr_core::Error| e.to_string();
    match artifact {
        Artifact::Flow(a) => {
            let d = TruncOrder::new(a.d).map_err(fail)?;
            let map = truncated_flow(&a.hamiltonian, a.j, d).map_err(fail)?;
            if map.image_z().poly() != &a.map.z || map.image_t().poly() != &a.map.t {
                return Err("stored images differ from exp(x^j D_H)".into());
            }
            if !map.jacobian_det().is_one() || !a.jacobian_det.is_one() {
                return Err("Jacobian determinant is not 1".into());
            }
        }
        Artifact::Lift(a) => {
            if a.depth < a.d {
                return Err(format!("depth {} is below d = {}", a.depth, a.d));
            }
            let depth = TruncOrder::new(a.depth).map_err(fail)?;
            let truncation = a.word.truncate(depth);
            if truncation != truncated_flow(&a.hamiltonian, a.j, depth).map_err(fail)? {
                return Err("word does not truncate to exp(x^j D_h)".into());
            }
            if truncation.image_z().poly() != &a.truncation.z
                || truncation.image_t().poly() != &a.truncation.t
            {
                return Err("stored truncation differs from the word".into());
            }
        }
        Artifact::ThreefoldAut(a) => {
            let x = Threefold::new(a.aut.params);
            x.verify(&a.aut).map_err(fail)?;
            if let Provenance::Word { word } = &a.aut.provenance {
                if !x.same_on_x(&x.lift_word(word).map_err(fail)?, &a.aut) {
                    return Err("images differ from the lift of the recorded word".into());
                }
            }
            if a.fixes_origin != a.aut.fixes_origin() {
                return Err("fixes_origin flag is stale".into());
            }
        }
        Artifact::Extend(a) => {
            a.aut.verify().map_err(fail)?;
            let x = Threefold::new(a.aut.params);
            match &a.aut.source {
                AmbientSource::Ad { word } => {
                    if extend_Ad(word, &x).map_err(fail)? != a.aut {
                        return Err("images differ from the extension of the recorded word".into());
                    }
                }
                AmbientSource::Family { gamma, word } => {
                    let depth = TruncOrder::new(a.depth.unwrap_or(a.aut.params.d())).map_err(fail)?;
                    let h = gamma * &(x.r() - &Polynomial::std_var(LAMBDA));
                    if word.truncate(depth) != truncated_flow(&h, 1, depth).map_err(fail)? {
                        return Err("family word does not truncate to exp(x D_(gamma (r - lambda)))".into());
                    }
                }
                AmbientSource::Torus { .. } | AmbientSource::Identity => {}
            }
            if a.fixes_origin != a.aut.fixes_origin() {
                return Err("fixes_origin flag is stale".into());
            }
        }
    }
    Ok(())
}
