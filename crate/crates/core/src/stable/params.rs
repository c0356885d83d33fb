use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Half-width of the band around alpha = 1 in which the alpha = 1 formulas
/// are used. Sweeps crossing alpha = 1 must sample that point explicitly.
pub const ALPHA_ONE_BAND: f64 = 1e-9;

/// Whether `alpha` is treated as exactly 1.
pub fn is_alpha_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() <= ALPHA_ONE_BAND
}

/// `sign(0) = 0`, unlike `f64::signum`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Parameters `(alpha, beta, gamma, delta)` of a stable law in Nolan's
/// S⁰ parameterization, which is continuous in all four arguments.
///
/// If `Z` is standard S¹ with index `alpha` and skewness `beta`, then
/// `gamma * (Z - beta * tan(pi alpha / 2)) + delta` is S⁰ for `alpha != 1`
/// and `gamma * Z + delta` is S⁰ for `alpha = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

impl TryFrom<RawParams> for StableParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        StableParams::new(r.alpha, r.beta, r.gamma, r.delta)
    }
}

impl From<StableParams> for RawParams {
    fn from(p: StableParams) -> Self {
        RawParams { alpha: p.alpha, beta: p.beta, gamma: p.gamma, delta: p.delta }
    }
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        if ![alpha, beta, gamma, delta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} not in (0, 2]")));
        }
        if beta.abs() > 1.0 {
            return Err(Error::InvalidParams(format!("beta = {beta} not in [-1, 1]")));
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidParams(format!("gamma = {gamma} must be positive")));
        }
        // normalise -0.0 so that serialized output does not depend on sign of zero
        Ok(Self { alpha, beta: beta + 0.0, gamma, delta: delta + 0.0 })
    }

    /// Standard law `S⁰(alpha, beta, 1, 0)`.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Location of the same law in the S¹ parameterization.
    pub fn s1_location(&self) -> f64 {
        if is_alpha_one(self.alpha) {
            self.delta - 2.0 / PI * self.beta * self.gamma * self.gamma.ln()
        } else {
            self.delta - self.beta * self.gamma * (PI * self.alpha / 2.0).tan()
        }
    }
}

/// Parameters of `a * Y + b` for `Y ~ params`.
pub fn linear_transform(params: StableParams, a: f64, b: f64) -> Result<StableParams> {
    if a == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(Error::ZeroScale);
    }
    StableParams::new(params.alpha, sign(a) * params.beta, a.abs() * params.gamma, a * params.delta + b)
}

/// Parameters of the sum of independent stable variables sharing one
/// stability index.
pub fn sum_independent(parts: &[StableParams]) -> Result<StableParams> {
    let first = parts.first().ok_or(Error::EmptySum)?;
    let alpha = first.alpha;
    if let Some(p) = parts.iter().find(|p| p.alpha != alpha) {
        return Err(Error::AlphaMismatch(alpha, p.alpha));
    }

    let mut scale_pow = KahanSum::new();
    let mut skew_weighted = KahanSum::new();
    let mut location = KahanSum::new();
    for p in parts {
        let w = p.gamma.powf(alpha);
        scale_pow.add(w);
        skew_weighted.add(p.beta * w);
        location.add(p.delta);
    }
    let scale_pow = scale_pow.value();
    let gamma = scale_pow.powf(1.0 / alpha);
    let beta = if parts.iter().all(|p| p.beta == first.beta) {
        // weighted mean of a constant
        first.beta
    } else {
        (skew_weighted.value() / scale_pow).clamp(-1.0, 1.0)
    };

    let delta = if is_alpha_one(alpha) {
        let parts_term: KahanSum = parts.iter().map(|p| p.beta * p.gamma * p.gamma.ln()).collect();
        location.value() + 2.0 / PI * (beta * gamma * gamma.ln() - parts_term.value())
    } else {
        let parts_term: KahanSum = parts.iter().map(|p| p.beta * p.gamma).collect();
        location.value() + (PI * alpha / 2.0).tan() * (beta * gamma - parts_term.value())
    };
    StableParams::new(alpha, beta, gamma, delta)
}
