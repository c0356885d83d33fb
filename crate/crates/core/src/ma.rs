//! MA(q) models with stable innovations and their flow aggregation
//! `S_t = X_t + X_{t-1} + ... + X_{t-r+1}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::stable::{is_alpha_one, linear_transform, sign, sum_independent, StableParams};

/// `X_t = sum_j theta[j] e_{t-j}` with `theta[0] = 1` and iid stable `e_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct MAModel {
    theta: Vec<f64>,
    innovation: StableParams,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    theta: Vec<f64>,
    innovation: StableParams,
}

impl TryFrom<RawModel> for MAModel {
    type Error = Error;
    fn try_from(r: RawModel) -> Result<Self> {
        MAModel::new(r.theta, r.innovation)
    }
}

impl From<MAModel> for RawModel {
    fn from(m: MAModel) -> Self {
        RawModel { theta: m.theta, innovation: m.innovation }
    }
}

impl MAModel {
    /// `theta` is the full coefficient vector including `theta[0] = 1`.
    pub fn new(theta: Vec<f64>, innovation: StableParams) -> Result<Self> {
        match theta.first() {
            None => return Err(Error::InvalidModel("theta must contain theta_0".into())),
            Some(&t0) if t0 != 1.0 => return Err(Error::InvalidModel(format!("theta_0 must be exactly 1, got {t0}"))),
            _ => {}
        }
        if let Some(t) = theta.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidModel(format!("non-finite coefficient {t}")));
        }
        Ok(Self { theta, innovation })
    }

    /// Builds the model from `theta_1..theta_q`, prepending `theta_0 = 1`.
    pub fn from_lags(lags: &[f64], innovation: StableParams) -> Result<Self> {
        let mut theta = Vec::with_capacity(lags.len() + 1);
        theta.push(1.0);
        theta.extend_from_slice(lags);
        Self::new(theta, innovation)
    }

    /// Independent innovations only (`q = 0`).
    pub fn iid(innovation: StableParams) -> Self {
        Self { theta: vec![1.0], innovation }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn order(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn innovation(&self) -> &StableParams {
        &self.innovation
    }

    pub fn alpha(&self) -> f64 {
        self.innovation.alpha()
    }

    /// `theta_0 + ... + theta_q`.
    pub fn theta_sum(&self) -> f64 {
        self.theta.iter().sum()
    }

    /// Law of a single `X_t`.
    pub fn marginal(&self) -> Result<StableParams> {
        aggregate_distribution(self, 1)
    }
}

/// Weights `c_j` with `S_t = sum_{j=0}^{r+q-1} c_j e_{t-j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggCoefficients {
    pub r: usize,
    pub c: Vec<f64>,
    /// `r < q`: the weights are exact but the closed-form LQD results,
    /// which assume `r >= q`, do not apply.
    pub below_order: bool,
}

/// Aggregation weights for level `r`.
///
/// For `r >= q` the weights are the prefix sums, the full sum and the
/// suffix sums of `theta`; for `r < q` they come from the defining double
/// sum and `below_order` is set.
pub fn aggregation_coefficients(model: &MAModel, r: usize) -> Result<AggCoefficients> {
    if r < 1 {
        return Err(Error::AggregationLevel { r: r as f64, min: 1.0 });
    }
    let theta = model.theta();
    let q = model.order();
    let c = if r >= q {
        let mut c = Vec::with_capacity(r + q);
        for j in 0..q {
            c.push(theta[..=j].iter().sum());
        }
        let total: f64 = theta.iter().sum();
        c.extend(std::iter::repeat_n(total, r - q));
        for j in r..r + q {
            c.push(theta[j - r + 1..].iter().sum());
        }
        c
    } else {
        let mut c = vec![0.0; r + q];
        for i in 0..r {
            for (j, &t) in theta.iter().enumerate() {
                c[i + j] += t;
            }
        }
        c
    };
    Ok(AggCoefficients { r, c, below_order: r < q })
}

/// Law of `S_t` at level `r`, obtained by scaling the innovation law by each
/// nonzero `c_j` and summing the independent terms.
pub fn aggregate_distribution(model: &MAModel, r: usize) -> Result<StableParams> {
    let coeffs = aggregation_coefficients(model, r)?;
    let parts = coeffs
        .c
        .iter()
        .filter(|&&c| c != 0.0)
        .map(|&c| linear_transform(model.innovation, c, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let out = sum_independent(&parts)?;
    debug_assert!({
        let direct = aggregate_distribution_direct(model, r)?;
        let tol = 1e-9 * (1.0 + out.gamma() + out.delta().abs());
        (direct.gamma() - out.gamma()).abs() <= tol
            && (direct.beta() - out.beta()).abs() <= 1e-9
            && (direct.delta() - out.delta()).abs() <= tol * (1.0 + (PI * model.alpha() / 2.0).tan().abs())
    });
    Ok(out)
}

/// The same law as [`aggregate_distribution`], evaluated from the explicit
/// scale, skewness and location expressions in the weights `c_j`.
pub fn aggregate_distribution_direct(model: &MAModel, r: usize) -> Result<StableParams> {
    let coeffs = aggregation_coefficients(model, r)?;
    let e = model.innovation();
    let alpha = e.alpha();
    let (beta0, gamma0, delta0) = (e.beta(), e.gamma(), e.delta());

    let abs_pow: KahanSum = coeffs.c.iter().map(|c| c.abs().powf(alpha)).collect();
    let signed_pow: KahanSum = coeffs.c.iter().map(|&c| sign(c) * c.abs().powf(alpha)).collect();
    let c_sum: KahanSum = coeffs.c.iter().copied().collect();
    let abs_pow = abs_pow.value();

    let gamma = abs_pow.powf(1.0 / alpha) * gamma0;
    let beta = (signed_pow.value() / abs_pow * beta0).clamp(-1.0, 1.0);
    let delta = if is_alpha_one(alpha) {
        let t: KahanSum =
            coeffs.c.iter().filter(|&&c| c != 0.0).map(|&c| sign(c) * c.abs() * (c.abs() * gamma0).ln()).collect();
        c_sum.value() * delta0 + 2.0 / PI * (beta * gamma * gamma.ln() - beta0 * gamma0 * t.value())
    } else {
        let t: KahanSum = coeffs.c.iter().map(|&c| sign(c) * c.abs()).collect();
        c_sum.value() * delta0 + (PI * alpha / 2.0).tan() * (beta * gamma - beta0 * gamma0 * t.value())
    };
    StableParams::new(alpha, beta, gamma, delta)
}

/// Rolling window sums `x[t] + ... + x[t + r - 1]` for every full window.
pub fn aggregate_series(x: &[f64], r: usize) -> Result<Vec<f64>> {
    if r < 1 {
        return Err(Error::AggregationLevel { r: r as f64, min: 1.0 });
    }
    if x.len() < r {
        return Err(Error::SeriesTooShort { len: x.len(), r });
    }
    // each window summed directly so values do not drift over long series
    Ok(x.windows(r).map(|w| w.iter().sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(alpha: f64) -> StableParams {
        StableParams::new(alpha, 0.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(MAModel::new(vec![], sym(1.5)).is_err());
        assert!(MAModel::new(vec![0.9, 0.2], sym(1.5)).is_err());
        assert!(MAModel::new(vec![1.0, f64::INFINITY], sym(1.5)).is_err());
        let m = MAModel::from_lags(&[0.2, 0.9], sym(1.5)).unwrap();
        assert_eq!(m.theta(), &[1.0, 0.2, 0.9]);
        assert_eq!(m.order(), 2);
    }

    #[test]
    fn coefficient_examples() {
        let iid = MAModel::iid(sym(1.2));
        assert_eq!(aggregation_coefficients(&iid, 5).unwrap().c, vec![1.0; 5]);

        let (t1, t2) = (0.3, -0.7);
        let m = MAModel::from_lags(&[t1, t2], sym(1.2)).unwrap();
        let c = aggregation_coefficients(&m, 4).unwrap().c;
        let want = [1.0, 1.0 + t1, 1.0 + t1 + t2, 1.0 + t1 + t2, t1 + t2, t2];
        assert_eq!(c.len(), 6);
        for (a, b) in c.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-15);
        }

        let m = MAModel::from_lags(&[0.5], sym(1.2)).unwrap();
        let c = aggregation_coefficients(&m, 3).unwrap();
        assert_eq!(c.c, vec![1.0, 1.5, 1.5, 0.5]);
        assert_eq!(c.c.iter().sum::<f64>(), 4.5);
        assert!(!c.below_order);

        assert!(aggregation_coefficients(&m, 0).is_err());
    }

    #[test]
    fn below_order_flagged() {
        let m = MAModel::from_lags(&[0.5, 0.25, 0.125], sym(1.2)).unwrap();
        let c = aggregation_coefficients(&m, 2).unwrap();
        assert!(c.below_order);
        assert_eq!(c.c, vec![1.0, 1.5, 0.75, 0.375, 0.125]);
    }

    #[test]
    fn aggregate_distribution_examples() {
        for &alpha in &[0.7, 1.0, 1.5] {
            let e = StableParams::new(alpha, 0.0, 1.7, 0.4).unwrap();
            let s = aggregate_distribution(&MAModel::iid(e), 6).unwrap();
            assert_eq!(s.beta(), 0.0);
            assert!((s.gamma() - 6f64.powf(1.0 / alpha) * 1.7).abs() < 1e-13);
            assert!((s.delta() - 6.0 * 0.4).abs() < 1e-13);
        }

        let e = StableParams::new(1.3, 0.6, 2.0, -1.0).unwrap();
        let m = MAModel::from_lags(&[0.4, -0.8], e).unwrap();
        let s1 = aggregate_distribution(&m, 1).unwrap();
        let x = sum_independent(&[
            linear_transform(e, 1.0, 0.0).unwrap(),
            linear_transform(e, 0.4, 0.0).unwrap(),
            linear_transform(e, -0.8, 0.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(s1, x);

        let m = MAModel::from_lags(&[0.2, 0.9], sym(1.5)).unwrap();
        let s = aggregate_distribution(&m, 4).unwrap();
        let c = [1.0, 1.2, 2.1, 2.1, 1.1, 0.9];
        let want = c.iter().map(|c: &f64| c.powf(1.5)).sum::<f64>().powf(1.0 / 1.5);
        assert!((s.gamma() - want).abs() < 1e-13);
        assert_eq!(s.beta(), 0.0);
        assert_eq!(s.delta(), 0.0);
    }

    #[test]
    fn zero_weights_are_skipped() {
        // theta = (1, -1) gives c = (1, 0, 0, -1)
        let e = StableParams::new(1.5, 0.5, 1.0, 0.0).unwrap();
        let m = MAModel::from_lags(&[-1.0], e).unwrap();
        let s = aggregate_distribution(&m, 3).unwrap();
        assert!((s.gamma() - 2f64.powf(1.0 / 1.5)).abs() < 1e-14);
        assert_eq!(s.beta(), 0.0);
    }

    #[test]
    fn series_examples() {
        assert_eq!(aggregate_series(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(), vec![3.0, 5.0, 7.0]);
        let x = [0.5, -1.0, 2.0];
        assert_eq!(aggregate_series(&x, 1).unwrap(), x.to_vec());
        assert_eq!(aggregate_series(&[1.0; 5], 5).unwrap(), vec![5.0]);
        assert_eq!(aggregate_series(&[1.0; 3], 4), Err(Error::SeriesTooShort { len: 3, r: 4 }));
    }
}
