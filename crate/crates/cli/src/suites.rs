//! Property suites behind `kr verify`.
//!
//! Each case draws its inputs from its own random stream, so a report depends
//! only on the configuration and not on how cases are scheduled.

use std::collections::BTreeMap;
use std::time::Instant;

use clap::ValueEnum;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use kr_core::extension::{
    build_lambda_family_bounded, extend_Ad, extend_generator, extend_torus,
    image_fiber, restrict_to_fiber,
};
use kr_core::hamiltonian::{
    formal_flow, is_one_mod_w, jacobian_det_flow, sigma_identities_hold, truncated_flow,
};
use kr_core::poly::vars::{LAMBDA, T, X, Z};
use kr_core::poly::{int, Polynomial, Var};
use kr_core::random::{case_rng, PolySampler};
use kr_core::threefold::Threefold;
use kr_core::trunc_aut::RParams;
use kr_core::truncated::TruncOrder;
use kr_core::words::{
    lift_hamiltonian, lift_with_target_order_bounded, AutWord, Generator,
};

use crate::report::{CaseReport, SuiteReport, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    LemmaHamilton,
    Sigma,
    PhiHom,
    PsiHom,
    Lift,
    Extend,
    FixedPoint,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::LemmaHamilton => "lemma-hamilton",
            Target::Sigma => "sigma",
            Target::PhiHom => "phi-hom",
            Target::PsiHom => "psi-hom",
            Target::Lift => "lift",
            Target::Extend => "extend",
            Target::FixedPoint => "fixed-point",
        }
    }

    /// Degree bound for random inputs when none is configured. The γ suites
    /// use 4; the Hamiltonian suites stay below the global bound of 8 where
    /// the series would otherwise dominate the time budget.
    pub fn default_degree(self) -> u32 {
        match self {
            Target::LemmaHamilton => 6,
            Target::Sigma => 6,
            Target::PhiHom | Target::Lift => 8,
            Target::PsiHom => 4,
            Target::Extend | Target::FixedPoint => 4,
        }
    }

    fn kinds(self) -> &'static [&'static str] {
        match self {
            Target::Extend => &["family", "ad", "torus"],
            Target::FixedPoint => &["generator", "ad", "torus"],
            Target::LemmaHamilton => &["hamiltonian"],
            Target::Sigma => &["sigma"],
            Target::PhiHom => &["phi"],
            Target::PsiHom => &["psi"],
            Target::Lift => &["lift"],
        }
    }
}

/// Default cap on [`AutWord::degree_bound`] for words whose exact images are
/// computed.
pub const DEFAULT_BUDGET: u64 = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub target: Target,
    pub params: RParams,
    pub seed: u64,
    pub cases: u64,
    pub degree: Option<u32>,
    /// Formal truncation order `N` for the series suites.
    pub order: u32,
    /// Maximal number of sampled terms per random polynomial.
    pub terms: usize,
    pub budget: u64,
}

impl RunConfig {
    pub fn new(target: Target, params: RParams, seed: u64, cases: u64) -> Self {
        Self {
            target,
            params,
            seed,
            cases,
            degree: None,
            order: 6,
            terms: 4,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree.unwrap_or_else(|| self.target.default_degree())
    }
}

enum Stop {
    Fail(String),
    Skip(String),
}

impl From<kr_core::Error> for Stop {
    fn from(e: kr_core::Error) -> Self {
        match e {
            kr_core::Error::DegreeBudget { .. } => Stop::Skip(e.to_string()),
            e => Stop::Fail(e.to_string()),
        }
    }
}

type Check<T = ()> = Result<T, Stop>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(Stop::Fail(what()))
    }
}

fn within_budget(word: &AutWord, budget: u64) -> Check {
    let bound = word.degree_bound();
    if bound > budget {
        return Err(Stop::Skip(format!(
            "image degree bound {bound} of a {}-letter word exceeds budget {budget}",
            word.len()
        )));
    }
    Ok(())
}

struct Case<'a> {
    cfg: &'a RunConfig,
    threefold: &'a Threefold,
    rng: ChaCha8Rng,
    inputs: BTreeMap<String, String>,
}

impl Case<'_> {
    fn sampler(&self, vars: &[Var], min_degree: u32) -> PolySampler {
        PolySampler::new(vars, min_degree, self.cfg.degree(), self.cfg.terms)
    }

    fn record(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.to_string(), value.to_string());
    }

    fn order(&self) -> TruncOrder {
        self.cfg.params.order()
    }
}

pub fn run(cfg: &RunConfig) -> SuiteReport {
    let start = Instant::now();
    let threefold = Threefold::new(cfg.params);
    let kinds = cfg.target.kinds();
    let jobs: Vec<(usize, u64)> = (0..kinds.len())
        .flat_map(|k| (0..cfg.cases).map(move |i| (k, i)))
        .collect();
    let results: Vec<CaseReport> = jobs
        .par_iter()
        .map(|&(k, i)| {
            let t0 = Instant::now();
            let stream = ((k as u64) << 32) | i;
            let mut case = Case {
                cfg,
                threefold: &threefold,
                rng: case_rng(cfg.seed, stream),
                inputs: BTreeMap::new(),
            };
            let outcome = run_case(cfg.target, kinds[k], &mut case);
            let verdict = match outcome {
                Ok(()) => Verdict::Pass,
                Err(Stop::Fail(reason)) => Verdict::Fail { reason },
                Err(Stop::Skip(reason)) => Verdict::Skipped { reason },
            };
            CaseReport {
                index: i,
                kind: kinds[k].to_string(),
                inputs: case.inputs,
                verdict,
                elapsed_ms: t0.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();
    let count = |f: fn(&Verdict) -> bool| results.iter().filter(|c| f(&c.verdict)).count() as u64;
    SuiteReport {
        target: cfg.target.name().to_string(),
        d: cfg.params.d(),
        k: cfg.params.k(),
        l: cfg.params.l(),
        seed: cfg.seed,
        cases: cfg.cases,
        degree: cfg.degree(),
        budget: cfg.budget,
        passed: count(Verdict::is_pass),
        failed: count(Verdict::is_fail),
        skipped: count(|v| matches!(v, Verdict::Skipped { .. })),
        results,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn run_case(target: Target, kind: &str, case: &mut Case) -> Check {
    match (target, kind) {
        (Target::LemmaHamilton, _) => lemma_hamilton(case),
        (Target::Sigma, _) => sigma(case),
        (Target::PhiHom, _) => phi_hom(case),
        (Target::PsiHom, _) => psi_hom(case),
        (Target::Lift, _) => lift(case),
        (Target::Extend, "family") => extend_family(case),
        (Target::Extend, "ad") => extend_ad(case),
        (Target::Extend, _) => extend_torus_case(case),
        (Target::FixedPoint, "generator") => fixed_point_generator(case),
        (Target::FixedPoint, "ad") => fixed_point_ad(case),
        (Target::FixedPoint, _) => fixed_point_torus(case),
    }
}

/// `det Jac(exp(w D_H)) = 1 mod w^N`, and for every `1 <= j < d` the
/// truncated flow has determinant 1 and inverse `exp(-x^j D_H)`.
fn lemma_hamilton(case: &mut Case) -> Check {
    let h = case.sampler(&[X, Z, T], 0).sample_nonzero(&mut case.rng);
    case.record("H", &h);
    let n = case.cfg.order;
    let det = jacobian_det_flow(&formal_flow(&h, n)?);
    ensure(is_one_mod_w(&det, n), || format!("det Jac(exp(w D_H)) = {det} mod w^{n}"))?;
    let order = case.order();
    for j in 1..order.get() {
        let f = truncated_flow(&h, j, order)?;
        let g = truncated_flow(&-&h, j, order)?;
        ensure(f.jacobian_det().is_one(), || format!("det of exp(x^{j} D_H) is not 1"))?;
        ensure(f.compose(&g)?.is_identity() && g.compose(&f)?.is_identity(), || {
            format!("exp(-x^{j} D_H) does not invert exp(x^{j} D_H)")
        })?;
        ensure(f.invert()? == g, || format!("Newton inverse differs from exp(-x^{j} D_H)"))?;
    }
    Ok(())
}

fn sigma(case: &mut Case) -> Check {
    let h = case.sampler(&[X, Z, T], 0).sample_nonzero(&mut case.rng);
    case.record("H", &h);
    let n = case.cfg.order as usize;
    ensure(sigma_identities_hold(&h, n)?, || {
        format!("Sigma identities fail up to n = {n}")
    })
}

/// Additivity, `Phi_j(exp(x^j D_h)) = h`, and the kernel `A_{j+1}`.
fn phi_hom(case: &mut Case) -> Check {
    let order = case.order();
    let d = order.get();
    let sampler = case.sampler(&[Z, T], 1);
    for j in 1..d {
        let h1 = sampler.sample(&mut case.rng);
        let h2 = sampler.sample(&mut case.rng);
        let h3 = sampler.sample(&mut case.rng);
        case.record(&format!("h1[j={j}]"), &h1);
        case.record(&format!("h2[j={j}]"), &h2);
        case.record(&format!("h3[j={j}]"), &h3);
        let f = truncated_flow(&h1, j, order)?;
        let mut g = truncated_flow(&h2, j, order)?;
        let mut kernel = f.compose(&truncated_flow(&-&h1, j, order)?)?;
        if j + 1 < d {
            let deeper = truncated_flow(&h3, j + 1, order)?;
            g = g.compose(&deeper)?;
            kernel = kernel.compose(&deeper)?;
        }
        ensure(f.phi(j)? == h1, || format!("Phi_{j}(exp(x^{j} D_h1)) != h1"))?;
        ensure(g.phi(j)? == h2, || format!("Phi_{j}(g) != h2"))?;
        ensure(f.compose(&g)?.phi(j)? == &h1 + &h2, || format!("Phi_{j} is not additive"))?;
        ensure(kernel.phi(j)?.is_zero() && kernel.in_a(j + 1), || {
            format!("constructed kernel element is not in A_{}", j + 1)
        })?;
        ensure(h1.is_zero() || !f.is_congruent_to_identity(j + 1), || {
            format!("exp(x^{j} D_h1) with h1 != 0 lies in A_{}", j + 1)
        })?;
    }
    Ok(())
}

/// `Psi_j(exp(x^j D_{alpha r})) = alpha`, additivity, and the kernel on
/// constructed members of `A_{j+1}(r)`.
fn psi_hom(case: &mut Case) -> Check {
    let order = case.order();
    let d = order.get();
    let params = case.cfg.params;
    let r = params.r();
    let sampler = case.sampler(&[Z, T], 0);
    for j in 1..d {
        let a1 = sampler.sample(&mut case.rng);
        let a2 = sampler.sample(&mut case.rng);
        let a3 = sampler.sample(&mut case.rng);
        case.record(&format!("alpha1[j={j}]"), &a1);
        case.record(&format!("alpha2[j={j}]"), &a2);
        case.record(&format!("alpha3[j={j}]"), &a3);
        let f = truncated_flow(&(&a1 * &r), j, order)?;
        let g = truncated_flow(&(&a2 * &r), j, order)?;
        ensure(f.psi(j, &params)? == a1, || format!("Psi_{j}(exp(x^{j} D_(alpha1 r))) != alpha1"))?;
        ensure(f.compose(&g)?.psi(j, &params)? == &a1 + &a2, || {
            format!("Psi_{j} is not additive")
        })?;
        let mut kernel = f.compose(&truncated_flow(&-&(&a1 * &r), j, order)?)?;
        if j + 1 < d {
            kernel = kernel.compose(&truncated_flow(&(&a3 * &r), j + 1, order)?)?;
        }
        ensure(kernel.psi(j, &params)?.is_zero(), || format!("Psi_{j} of a kernel member"))?;
        ensure(kernel.in_a_r(j + 1, &params)?, || {
            format!("kernel member is not in A_{}(r)", j + 1)
        })?;
    }
    Ok(())
}

/// `truncate_word(lift_hamiltonian(j, h, d), d) = exp(x^j D_h)`; odd cases
/// carry `lambda` in the coefficients.
fn lift(case: &mut Case) -> Check {
    let order = case.order();
    let vars: &[Var] = if case.rng.gen_bool(0.5) {
        &[X, LAMBDA, Z, T]
    } else {
        &[X, Z, T]
    };
    let sampler = case.sampler(vars, 0);
    for j in 1..order.get() {
        let h = sampler.sample(&mut case.rng);
        case.record(&format!("h[j={j}]"), &h);
        let word = lift_hamiltonian(j, &h, order)?;
        let flow = truncated_flow(&h, j, order)?;
        ensure(word.truncate(order) == flow, || format!("lift at j = {j} misses the flow"))?;
        ensure(word.invert().truncate(order) == truncated_flow(&-&h, j, order)?, || {
            format!("inverse word at j = {j} misses exp(-x^j D_h)")
        })?;
        ensure(word.jacobian_det() == int(1), || "word determinant is not 1".into())?;
    }
    Ok(())
}

fn sample_gamma(case: &mut Case) -> Polynomial {
    let gamma = case.sampler(&[X, Z, T], 0).sample(&mut case.rng);
    case.record("gamma", &gamma);
    gamma
}

/// A word of one or two shears `x^d s`, hence the identity modulo `x^d`.
fn sample_ad_word(case: &mut Case) -> Check<AutWord> {
    let d = case.cfg.params.d();
    let len = case.rng.gen_range(1..=2);
    let mut z_side = case.rng.gen_bool(0.5);
    let mut generators = Vec::new();
    for _ in 0..len {
        let vars = if z_side { [X, T] } else { [X, Z] };
        let s = case.sampler(&vars, 0).sample_nonzero(&mut case.rng).shift(X, d);
        generators.push(if z_side {
            Generator::z_shear(s)?
        } else {
            Generator::t_shear(s)?
        });
        z_side = !z_side;
    }
    let word = AutWord::new(generators);
    case.record("word", &word);
    Ok(word)
}

fn extend_family(case: &mut Case) -> Check {
    let gamma = sample_gamma(case);
    let x = case.threefold;
    let lambda0 = PolySampler::sample_rational(&mut case.rng);
    case.record("lambda0", &lambda0);
    let family = build_lambda_family_bounded(&gamma, x, x.params().order(), Some(case.cfg.budget))?;
    ensure(family.stabilizes_fiber(&lambda0, x)?, || {
        "specialized family does not stabilize (r - lambda0, x^d)".into()
    })?;
    let aut = extend_generator(&family, x)?;
    ensure(aut.apply(x.p())? == *x.p(), || "Phi(P) != P".into())?;
    let at_zero = x.lift_word(&family.specialize(&int(0))?)?;
    ensure(aut.restricts_to(&at_zero, x), || {
        "restriction to X differs from the lift of the lambda = 0 word".into()
    })
}

fn extend_ad(case: &mut Case) -> Check {
    let word = sample_ad_word(case)?;
    within_budget(&word, case.cfg.budget)?;
    let x = case.threefold;
    let aut = extend_Ad(&word, x)?;
    ensure(aut.restricts_to(&x.lift_word(&word)?, x), || {
        "restriction to X differs from the lifted word".into()
    })?;
    let c = PolySampler::sample_rational(&mut case.rng);
    ensure(restrict_to_fiber(&aut, x, &c)?.preserves_all_fibers, || {
        "A_d extension moves fibers".into()
    })
}

fn extend_torus_case(case: &mut Case) -> Check {
    let x = case.threefold;
    let q = PolySampler::sample_rational(&mut case.rng);
    case.record("lambda", &q);
    let aut = extend_torus(&q, x)?;
    ensure(aut.restricts_to(&x.torus_action(&q)?, x), || {
        "restriction to X differs from the torus action".into()
    })?;
    let weight = num_traits::pow(q.clone(), (x.params().k() * x.params().l()) as usize);
    let c = PolySampler::sample_rational(&mut case.rng);
    let report = restrict_to_fiber(&aut, x, &c)?;
    ensure(
        report.certificate_holds && image_fiber(&aut, &c) == Some(&weight * &c),
        || "fiber c is not sent to lambda^(kl) c".into(),
    )
}

fn fixed_point_generator(case: &mut Case) -> Check {
    let gamma = sample_gamma(case);
    let x = case.threefold;
    let order = x.params().order();
    let deep = TruncOrder::new(order.get() + 1)?;
    let budget = Some(case.cfg.budget);
    let word = lift_with_target_order_bounded(1, &(&gamma * x.r()), order, deep, budget)?;
    let family = build_lambda_family_bounded(&gamma, x, deep, budget)?;
    ensure(x.lift_word(&word)?.fixes_origin(), || "ThreefoldAut moves the origin".into())?;
    ensure(extend_generator(&family, x)?.fixes_origin(), || {
        "AmbientAut moves the origin".into()
    })
}

fn fixed_point_ad(case: &mut Case) -> Check {
    let word = sample_ad_word(case)?;
    within_budget(&word, case.cfg.budget)?;
    let x = case.threefold;
    ensure(x.lift_word(&word)?.fixes_origin(), || "ThreefoldAut moves the origin".into())?;
    ensure(extend_Ad(&word, x)?.fixes_origin(), || "AmbientAut moves the origin".into())
}

fn fixed_point_torus(case: &mut Case) -> Check {
    let x = case.threefold;
    let q = PolySampler::sample_rational(&mut case.rng);
    case.record("lambda", &q);
    ensure(x.torus_action(&q)?.fixes_origin(), || "ThreefoldAut moves the origin".into())?;
    ensure(extend_torus(&q, x)?.fixes_origin(), || "AmbientAut moves the origin".into())
}
