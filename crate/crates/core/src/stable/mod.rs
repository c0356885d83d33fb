//! S⁰ stable laws: parameter arithmetic, distribution function, quantiles
//! and random variates.

mod cdf;
mod params;
mod sample;

pub use cdf::{stable_cdf, stable_quantile, stable_sf};
pub use params::{is_alpha_one, linear_transform, sign, sum_independent, StableParams, ALPHA_ONE_BAND};
pub use sample::{sample_stable, RngSeed, StableSampler};

impl StableParams {
    pub fn cdf(&self, x: f64) -> f64 {
        stable_cdf(self, x)
    }

    pub fn quantile(&self, p: f64) -> crate::Result<f64> {
        stable_quantile(self, p)
    }
}
