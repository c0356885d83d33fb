use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, Open01};
use serde::{Deserialize, Serialize};

use super::params::{is_alpha_one, StableParams};

/// Seed of a reproducible random stream: ChaCha20 keyed by `seed`, on
/// stream `stream`. Disjoint streams are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, different stream.
    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }
}

/// Chambers-Mallows-Stuck generator for one S⁰ law.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    params: StableParams,
    alpha_one: bool,
    tan_term: f64,
    offset: f64,
    scale: f64,
}

impl StableSampler {
    pub fn new(params: StableParams) -> Self {
        let alpha = params.alpha();
        let beta = params.beta();
        let alpha_one = is_alpha_one(alpha);
        let tan_term = if alpha_one { 0.0 } else { beta * (PI * alpha / 2.0).tan() };
        let offset = tan_term.atan() / alpha;
        let scale = (1.0 + tan_term * tan_term).powf(1.0 / (2.0 * alpha));
        Self { params, alpha_one, tan_term, offset, scale }
    }

    /// Standard S¹ draw from a uniform angle and a unit exponential.
    fn standard_s1(&self, v: f64, w: f64) -> f64 {
        let alpha = self.params.alpha();
        let beta = self.params.beta();
        if self.alpha_one {
            let lin = FRAC_PI_2 + beta * v;
            2.0 / PI * (lin * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / lin).ln())
        } else {
            let shifted = alpha * (v + self.offset);
            self.scale * shifted.sin() / v.cos().powf(1.0 / alpha)
                * ((v - shifted).cos() / w).powf((1.0 - alpha) / alpha)
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        let v = PI * (u - 0.5);
        let w: f64 = rng.sample(Exp1);
        let z0 = self.standard_s1(v, w) - self.tan_term;
        self.params.gamma() * z0 + self.params.delta()
    }
}

/// `n` iid draws from `params`; the sequence is a function of `seed` only.
pub fn sample_stable(params: &StableParams, n: usize, seed: RngSeed) -> Vec<f64> {
    let sampler = StableSampler::new(*params);
    let mut rng = seed.rng();
    (0..n).map(|_| sampler.sample(&mut rng)).collect()
}
