//! Log quantile differences `ln(xi_p2 - xi_p1)` and their behaviour under
//! flow aggregation.
//!
//! When the innovations are symmetric or every weight `c_j` is nonnegative,
//! the aggregated law is a location-scale copy of the innovation law and
//!
//! ```text
//! zeta(r) = ln(r |sum theta|^alpha + g_alpha(theta)) / alpha + zeta(0)
//! ```
//!
//! for `r >= q`. Its shape in `ln r` is governed by the sign of `g_alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ma::MAModel;
use crate::stable::{stable_quantile, StableParams};

/// Band around zero inside which `g_alpha(theta)` counts as zero.
pub const G_TOLERANCE: f64 = 1e-12;

/// Quantile levels `0 < p1 < p2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct QuantileLevels {
    p1: f64,
    p2: f64,
}

impl QuantileLevels {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if p1 > 0.0 && p1 < p2 && p2 < 1.0 {
            Ok(Self { p1, p2 })
        } else {
            Err(Error::InvalidLevels(p1, p2))
        }
    }
    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
}

impl Default for QuantileLevels {
    /// `(0.50, 0.95)`
    fn default() -> Self {
        Self { p1: 0.5, p2: 0.95 }
    }
}

impl TryFrom<(f64, f64)> for QuantileLevels {
    type Error = Error;
    fn try_from((p1, p2): (f64, f64)) -> Result<Self> {
        Self::new(p1, p2)
    }
}

impl From<QuantileLevels> for (f64, f64) {
    fn from(l: QuantileLevels) -> Self {
        (l.p1, l.p2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeClass {
    Convex,
    Linear,
    Concave,
}

/// Which of the two sufficient conditions for the closed form hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionStatus {
    /// Symmetric innovations.
    pub a1: bool,
    /// Every forward partial sum `theta_0 + .. + theta_i` (i < q) and every
    /// backward partial sum `theta_i + .. + theta_q` (i >= 1) is nonnegative.
    pub a2: bool,
    pub formula_valid: bool,
}

pub fn log_quantile_difference(params: &StableParams, levels: QuantileLevels) -> Result<f64> {
    let lo = stable_quantile(params, levels.p1)?;
    let hi = stable_quantile(params, levels.p2)?;
    Ok((hi - lo).ln())
}

/// `g_alpha(theta)` for the full coefficient vector (`theta[0] = 1`):
///
/// ```text
/// sum_{i<q} |theta_0 + .. + theta_i|^alpha - q |sum theta|^alpha + sum_{i>=1} |theta_i + .. + theta_q|^alpha
/// ```
pub fn g_alpha(theta: &[f64], alpha: f64) -> f64 {
    let q = theta.len().saturating_sub(1);
    if q == 0 {
        return 0.0;
    }
    let mut forward = 0.0;
    let mut partial = 0.0;
    for &t in &theta[..q] {
        partial += t;
        forward += partial.abs().powf(alpha);
    }
    let total: f64 = theta.iter().sum();
    let mut backward = 0.0f64;
    let mut suffix = 0.0;
    for &t in theta[1..].iter().rev() {
        suffix += t;
        backward += suffix.abs().powf(alpha);
    }
    (forward + backward) - q as f64 * total.abs().powf(alpha)
}

pub fn check_conditions(model: &MAModel) -> ConditionStatus {
    let theta = model.theta();
    let q = model.order();
    let a1 = model.innovation().beta() == 0.0;
    let mut prefix = 0.0;
    let forward_ok = theta[..q].iter().all(|&t| {
        prefix += t;
        prefix >= 0.0
    });
    let mut suffix = 0.0;
    let backward_ok = theta[1..].iter().rev().all(|&t| {
        suffix += t;
        suffix >= 0.0
    });
    let a2 = forward_ok && backward_ok;
    ConditionStatus { a1, a2, formula_valid: a1 || a2 }
}

fn check_level(model: &MAModel, r: f64) -> Result<()> {
    let min = (model.order() as f64).max(f64::MIN_POSITIVE);
    if !(r >= min) || !r.is_finite() {
        return Err(Error::AggregationLevel { r, min: model.order() as f64 });
    }
    Ok(())
}

/// `(r |sum theta|^alpha, g_alpha(theta))`.
fn scale_terms(model: &MAModel, r: f64) -> (f64, f64) {
    let alpha = model.alpha();
    (r * model.theta_sum().abs().powf(alpha), g_alpha(model.theta(), alpha))
}

/// The closed-form right-hand side computed regardless of whether it
/// describes the aggregated law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExploratoryLqd {
    pub value: f64,
    /// `false` means the value is NOT the LQD of the aggregated process.
    pub formula_valid: bool,
}

/// Closed-form LQD right-hand side without the validity gate.
///
/// Real `r >= q` is accepted; only integer `r` has a distributional meaning.
pub fn lqd_formula_unchecked(model: &MAModel, r: f64, levels: QuantileLevels) -> Result<ExploratoryLqd> {
    check_level(model, r)?;
    let (lead, g) = scale_terms(model, r);
    let arg = lead + g;
    if !(arg > 0.0) {
        return Err(Error::NonPositiveArgument(arg));
    }
    let zeta0 = log_quantile_difference(model.innovation(), levels)?;
    Ok(ExploratoryLqd { value: arg.ln() / model.alpha() + zeta0, formula_valid: check_conditions(model).formula_valid })
}

/// LQD of the level-`r` aggregate from the closed form; refuses models for
/// which the closed form does not hold.
pub fn lqd_formula(model: &MAModel, r: f64, levels: QuantileLevels) -> Result<f64> {
    if !check_conditions(model).formula_valid {
        return Err(Error::ConditionsNotSatisfied);
    }
    lqd_formula_unchecked(model, r, levels).map(|v| v.value)
}

/// First derivative of the closed-form LQD with respect to `ln r`.
pub fn lqd_slope(model: &MAModel, r: f64) -> Result<f64> {
    check_level(model, r)?;
    let (lead, g) = scale_terms(model, r);
    let denom = lead + g;
    if !(denom > 0.0) {
        return Err(Error::NonPositiveArgument(denom));
    }
    Ok(lead / denom / model.alpha())
}

/// Second derivative with respect to `ln r`; has the sign of `g_alpha`.
pub fn lqd_curvature(model: &MAModel, r: f64) -> Result<f64> {
    check_level(model, r)?;
    let (lead, g) = scale_terms(model, r);
    let denom = lead + g;
    if !(denom > 0.0) {
        return Err(Error::NonPositiveArgument(denom));
    }
    Ok(lead * g / (denom * denom) / model.alpha())
}

pub fn classify_shape(model: &MAModel) -> Result<ShapeClass> {
    if !check_conditions(model).formula_valid {
        return Err(Error::ConditionsNotSatisfied);
    }
    let g = g_alpha(model.theta(), model.alpha());
    Ok(if g > G_TOLERANCE {
        ShapeClass::Convex
    } else if g < -G_TOLERANCE {
        ShapeClass::Concave
    } else {
        ShapeClass::Linear
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::aggregate_distribution;
    use crate::stable::linear_transform;

    fn model(lags: &[f64], alpha: f64, beta: f64) -> MAModel {
        MAModel::from_lags(lags, StableParams::new(alpha, beta, 1.0, 0.0).unwrap()).unwrap()
    }

    #[test]
    fn levels_validation() {
        assert!(QuantileLevels::new(0.5, 0.5).is_err());
        assert!(QuantileLevels::new(0.0, 0.5).is_err());
        assert!(QuantileLevels::new(0.6, 0.4).is_err());
        assert!(QuantileLevels::new(0.2, 1.0).is_err());
        assert!(QuantileLevels::new(0.2, 0.8).is_ok());
    }

    #[test]
    fn lqd_examples() {
        let cauchy = StableParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let v = log_quantile_difference(&cauchy, QuantileLevels::new(0.25, 0.75).unwrap()).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12);

        let gauss = StableParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
        let v = log_quantile_difference(&gauss, QuantileLevels::default()).unwrap();
        assert!((v - (2f64.sqrt() * 1.644_853_626_951_472_2).ln()).abs() < 1e-10);
        assert!((v - 0.844_225).abs() < 1e-6);

        let x = StableParams::new(1.4, 0.3, 0.7, 2.0).unwrap();
        let levels = QuantileLevels::new(0.1, 0.6).unwrap();
        let y = linear_transform(x, 3.5, -1.0).unwrap();
        let dx = log_quantile_difference(&x, levels).unwrap();
        let dy = log_quantile_difference(&y, levels).unwrap();
        assert!((dy - dx - 3.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn g_examples() {
        for &a in &[0.3, 1.0, 2.0] {
            assert_eq!(g_alpha(&[1.0], a), 0.0);
        }
        assert!(g_alpha(&[1.0, 0.5, -0.2], 2.0).abs() < 1e-14);
        assert!(g_alpha(&[1.0, 0.2, 0.9], 1.0).abs() < 1e-14);
        // q = 2 expanded form
        let (t1, t2, a) = (-0.3f64, 0.45f64, 1.37);
        let want = 1.0 + (1.0 + t1).abs().powf(a) - 2.0 * (1.0 + t1 + t2).abs().powf(a)
            + (t1 + t2).abs().powf(a)
            + t2.abs().powf(a);
        assert!((g_alpha(&[1.0, t1, t2], a) - want).abs() < 1e-14);
    }

    #[test]
    fn conditions_examples() {
        let s = check_conditions(&model(&[0.2, 0.9], 1.5, 0.5));
        assert_eq!(s, ConditionStatus { a1: false, a2: true, formula_valid: true });
        let s = check_conditions(&model(&[-1.4, 0.6], 1.5, 0.0));
        assert_eq!(s, ConditionStatus { a1: true, a2: false, formula_valid: true });
        let s = check_conditions(&model(&[], 1.5, 0.0));
        assert_eq!(s, ConditionStatus { a1: true, a2: true, formula_valid: true });
        let s = check_conditions(&model(&[-1.4, 0.6], 1.5, 0.7));
        assert!(!s.formula_valid);
    }

    #[test]
    fn formula_examples() {
        let levels = QuantileLevels::default();
        let iid = model(&[], 1.3, 0.4);
        let z0 = log_quantile_difference(iid.innovation(), levels).unwrap();
        for r in [1.0, 2.0, 7.0, 40.0] {
            let v = lqd_formula(&iid, r, levels).unwrap();
            assert!((v - (r.ln() / 1.3 + z0)).abs() < 1e-14);
        }

        let m = model(&[0.2, 0.9], 1.5, 0.0);
        let closed = lqd_formula(&m, 4.0, levels).unwrap();
        let via_law = log_quantile_difference(&aggregate_distribution(&m, 4).unwrap(), levels).unwrap();
        assert!((closed - via_law).abs() < 1e-8);

        let m = model(&[0.2, 0.9], 1.0, 0.0);
        let z0 = log_quantile_difference(m.innovation(), levels).unwrap();
        assert!((lqd_formula(&m, 2.0, levels).unwrap() - (4.2f64.ln() + z0)).abs() < 1e-13);
    }

    #[test]
    fn formula_refusals() {
        let levels = QuantileLevels::default();
        let bad = model(&[-1.4, 0.6], 1.5, 0.7);
        assert_eq!(lqd_formula(&bad, 4.0, levels), Err(Error::ConditionsNotSatisfied));
        let explore = lqd_formula_unchecked(&bad, 4.0, levels).unwrap();
        assert!(!explore.formula_valid);
        let m = model(&[0.2, 0.9], 1.5, 0.0);
        assert!(matches!(lqd_formula(&m, 1.0, levels), Err(Error::AggregationLevel { .. })));
        assert!(lqd_formula(&model(&[], 1.5, 0.0), 0.0, levels).is_err());
    }

    #[test]
    fn slope_and_curvature_examples() {
        let iid = model(&[], 1.7, 0.0);
        for r in [1.0, 3.5, 1e4] {
            assert_eq!(lqd_slope(&iid, r).unwrap(), 1.0 / 1.7);
            assert_eq!(lqd_curvature(&iid, r).unwrap(), 0.0);
        }
        let m = model(&[0.2, 0.9], 1.5, 0.0);
        assert!((lqd_slope(&m, 1e9).unwrap() - 1.0 / 1.5).abs() < 1e-8);
        assert!(lqd_curvature(&m, 4.0).unwrap() < 0.0);

        // centred differences in ln r
        let levels = QuantileLevels::default();
        let h = 1e-4;
        let zeta = |lr: f64| lqd_formula(&m, lr.exp(), levels).unwrap();
        let lr = 4f64.ln();
        let fd = (zeta(lr + h) - zeta(lr - h)) / (2.0 * h);
        assert!((fd - lqd_slope(&m, 4.0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn shape_examples() {
        assert_eq!(classify_shape(&model(&[0.2, 0.9], 0.5, 0.0)).unwrap(), ShapeClass::Convex);
        assert_eq!(classify_shape(&model(&[0.2, 0.9], 1.0, 0.0)).unwrap(), ShapeClass::Linear);
        assert_eq!(classify_shape(&model(&[0.2, 0.9], 2.0, 0.0)).unwrap(), ShapeClass::Concave);
        assert_eq!(classify_shape(&model(&[-1.4, 0.6], 1.5, 0.7)), Err(Error::ConditionsNotSatisfied));
    }
}
