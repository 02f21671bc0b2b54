//! Reproducible random polynomials for the property suites.
//!
//! Support monomials are drawn uniformly from the degree box (all monomials in
//! the chosen variables of total degree at most the bound), coefficients
//! uniformly from `{-9..9} \ {0}`; repeated monomials are merged. Case `i` of a
//! run uses stream `i` of a ChaCha generator seeded with the run seed, so
//! cases are independent of scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::{int, Polynomial, Var};

/// The generator for case `index` of a run with seed `seed`.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySampler {
    vars: Vec<Var>,
    max_degree: u32,
    min_degree: u32,
    max_terms: usize,
    box_monomials: Vec<Vec<u32>>,
}

impl PolySampler {
    /// Monomials in `vars` of total degree in `min_degree..=max_degree`, at
    /// most `max_terms >= 1` of them.
    pub fn new(vars: &[Var], min_degree: u32, max_degree: u32, max_terms: usize) -> Self {
        let mut box_monomials = Vec::new();
        let mut exps = vec![0u32; vars.len()];
        enumerate(&mut exps, 0, max_degree, &mut |e| {
            let total: u32 = e.iter().sum();
            if total >= min_degree {
                box_monomials.push(e.to_vec());
            }
        });
        Self {
            vars: vars.to_vec(),
            max_degree,
            min_degree,
            max_terms: max_terms.max(1),
            box_monomials,
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn min_degree(&self) -> u32 {
        self.min_degree
    }

    /// May be zero when sampled terms cancel; never when `max_terms = 1`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Polynomial {
        if self.box_monomials.is_empty() {
            return Polynomial::std_zero();
        }
        let terms = rng.gen_range(1..=self.max_terms);
        let mut p = Polynomial::std_zero();
        for _ in 0..terms {
            let e = &self.box_monomials[rng.gen_range(0..self.box_monomials.len())];
            let mut c = rng.gen_range(1..=9i64);
            if rng.gen_bool(0.5) {
                c = -c;
            }
            let mut m = Polynomial::std_const(int(c));
            for (v, &k) in self.vars.iter().zip(e) {
                if k > 0 {
                    m = m * Polynomial::std_var(*v).pow(k);
                }
            }
            p = p + m;
        }
        p
    }

    /// Resamples until the result is nonzero.
    pub fn sample_nonzero<R: Rng>(&self, rng: &mut R) -> Polynomial {
        loop {
            let p = self.sample(rng);
            if !p.is_zero() || self.box_monomials.is_empty() {
                return p;
            }
        }
    }

    /// A random rational with numerator in `{-9..9} \ {0}` and denominator in
    /// `1..=9`.
    pub fn sample_rational<R: Rng>(rng: &mut R) -> crate::poly::Rational {
        let mut n = rng.gen_range(1..=9i64);
        if rng.gen_bool(0.5) {
            n = -n;
        }
        crate::poly::rat(n, rng.gen_range(1..=9i64))
    }
}

fn enumerate(exps: &mut Vec<u32>, i: usize, budget: u32, f: &mut impl FnMut(&[u32])) {
    if i == exps.len() {
        f(exps);
        return;
    }
    for e in 0..=budget {
        exps[i] = e;
        enumerate(exps, i + 1, budget - e, f);
    }
    exps[i] = 0;
}
