//! Distribution function and quantiles of S⁰ stable laws.
//!
//! The standardized law is evaluated with Nolan's one-dimensional integral
//! representation. On `x > zeta` (with `zeta = -beta tan(pi alpha / 2)`)
//!
//! ```text
//! F(x) = c1 + sign(1 - alpha) / pi * ∫_{-theta0}^{pi/2} exp(-(x - zeta)^(alpha/(alpha-1)) V(theta)) dtheta
//! ```
//!
//! and `F(x; alpha, beta) = 1 - F(-x; alpha, -beta)` below `zeta`. The
//! integrand is monotone in `theta` and switches between 0 and 1 where the
//! exponent crosses 1; the interval is split there before adaptive
//! Gauss-Kronrod integration.

use std::f64::consts::{FRAC_PI_2, PI};

use super::params::{is_alpha_one, StableParams};
use crate::error::{Error, Result};
use crate::numeric::{integrate, solve_bracketed, QuadTolerance};

/// `P(X <= x)` and `P(X > x)`, each computed without catastrophic
/// cancellation where the representation allows it.
#[derive(Debug, Clone, Copy)]
struct Tails {
    cdf: f64,
    sf: f64,
}

impl Tails {
    fn from_cdf(cdf: f64) -> Self {
        let cdf = cdf.clamp(0.0, 1.0);
        Tails { cdf, sf: 1.0 - cdf }
    }
    fn from_sf(sf: f64) -> Self {
        let sf = sf.clamp(0.0, 1.0);
        Tails { cdf: 1.0 - sf, sf }
    }
    fn reflect(self) -> Self {
        Tails { cdf: self.sf, sf: self.cdf }
    }
}

fn quad_tol() -> QuadTolerance {
    QuadTolerance { abs: 1e-15, rel: 1e-14, max_segments: 250 }
}

/// `exp(-exp(log_h))` with the infinite limits spelled out.
fn integrand(log_h: f64) -> f64 {
    if log_h.is_nan() {
        return 0.0;
    }
    (-log_h.exp()).exp()
}

/// Splits `[lo, hi]` at the point where `log_h` changes sign (if any) and
/// integrates `exp(-exp(log_h))` over both pieces.
fn integrate_split<F: Fn(f64) -> f64>(log_h: F, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let width = hi - lo;
    let a = lo + 1e-12 * width;
    let b = hi - 1e-12 * width;
    let split = match (log_h(a), log_h(b)) {
        (fa, fb) if fa.is_finite() || fb.is_finite() || fa.signum() != fb.signum() => solve_bracketed(
            |t| {
                let v = log_h(t);
                if v.is_nan() {
                    0.0
                } else {
                    v
                }
            },
            a,
            b,
            1e-15,
        )
        .map(|r| r.x),
        _ => None,
    };
    let f = |t: f64| integrand(log_h(t));
    match split {
        Some(mid) if mid > lo && mid < hi => integrate(f, lo, mid, quad_tol()) + integrate(f, mid, hi, quad_tol()),
        _ => integrate(f, lo, hi, quad_tol()),
    }
}

/// Tails of the standard law at `x > zeta`, for `alpha != 1`; `dx = x - zeta`.
fn tails_above_zeta(dx: f64, alpha: f64, beta: f64) -> Tails {
    let tan_term = beta * (PI * alpha / 2.0).tan();
    let theta0 = tan_term.atan() / alpha;
    let expo = alpha / (alpha - 1.0);
    let log_dx = dx.ln();
    let log_cos_a0 = (alpha * theta0).cos().ln() / (alpha - 1.0);
    let log_h = |theta: f64| {
        let cos_t = theta.cos();
        let core = log_dx + cos_t.ln() - (alpha * (theta0 + theta)).sin().ln();
        let tail = (alpha * theta0 + (alpha - 1.0) * theta).cos().max(0.0).ln();
        expo * core + log_cos_a0 + tail - cos_t.ln()
    };
    let integral = integrate_split(log_h, -theta0, FRAC_PI_2) / PI;
    if alpha < 1.0 {
        let c1 = (FRAC_PI_2 - theta0) / PI;
        let sf = (FRAC_PI_2 + theta0) / PI - integral;
        if sf < 0.5 {
            Tails::from_sf(sf)
        } else {
            Tails::from_cdf(c1 + integral)
        }
    } else {
        Tails::from_sf(integral)
    }
}

/// Tails of the standard alpha = 1 law with `beta > 0`.
fn tails_alpha_one(x: f64, beta: f64) -> Tails {
    let shift = -PI * x / (2.0 * beta);
    let log_2_pi = (2.0 / PI).ln();
    let log_h = |theta: f64| {
        let lin = FRAC_PI_2 + beta * theta;
        shift + log_2_pi + lin.ln() - theta.cos().ln() + lin * theta.tan() / beta
    };
    Tails::from_cdf(integrate_split(log_h, -FRAC_PI_2, FRAC_PI_2) / PI)
}

fn standard_tails(z: f64, alpha: f64, beta: f64) -> Tails {
    if z == f64::INFINITY {
        return Tails { cdf: 1.0, sf: 0.0 };
    }
    if z == f64::NEG_INFINITY {
        return Tails { cdf: 0.0, sf: 1.0 };
    }
    if is_alpha_one(alpha) {
        return if beta == 0.0 {
            let c = z.atan() / PI;
            if z > 0.0 {
                Tails::from_sf(0.5 - c)
            } else {
                Tails::from_cdf(0.5 + c)
            }
        } else if beta > 0.0 {
            tails_alpha_one(z, beta)
        } else {
            tails_alpha_one(-z, -beta).reflect()
        };
    }
    let zeta = -beta * (PI * alpha / 2.0).tan();
    let dx = z - zeta;
    if dx.abs() <= 1e-14 * zeta.abs().max(1.0) {
        let theta0 = (-zeta).atan() / alpha;
        return Tails::from_cdf((FRAC_PI_2 - theta0) / PI);
    }
    if dx > 0.0 {
        tails_above_zeta(dx, alpha, beta)
    } else {
        tails_above_zeta(-dx, alpha, -beta).reflect()
    }
}

/// `P(X <= x)` for `X ~ params`.
///
/// Absolute accuracy is about 1e-12 for parameters away from the alpha = 1
/// boundary; it degrades as `|alpha - 1|` shrinks toward
/// [`ALPHA_ONE_BAND`](super::ALPHA_ONE_BAND) when `beta != 0`.
pub fn stable_cdf(params: &StableParams, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let z = (x - params.delta()) / params.gamma();
    standard_tails(z, params.alpha(), params.beta()).cdf
}

/// `P(X > x)` for `X ~ params`.
pub fn stable_sf(params: &StableParams, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let z = (x - params.delta()) / params.gamma();
    standard_tails(z, params.alpha(), params.beta()).sf
}

/// Quantile of the standard law `S⁰(alpha, beta, 1, 0)`.
fn standard_quantile(p: f64, alpha: f64, beta: f64) -> Result<f64> {
    // Work on whichever tail is smaller so the target is resolved relative
    // to its own magnitude.
    let upper = p > 0.5;
    let target = if upper { 1.0 - p } else { p };
    let g = |z: f64| {
        let t = standard_tails(z, alpha, beta);
        if upper {
            target - t.sf
        } else {
            t.cdf - target
        }
    };

    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut step = 1.0;
    while g(lo) > 0.0 {
        hi = lo;
        step *= 2.0;
        lo -= step;
        if !lo.is_finite() {
            return Err(Error::Bracket(p));
        }
    }
    step = 1.0;
    while g(hi) < 0.0 {
        lo = hi;
        step *= 2.0;
        hi += step;
        if !hi.is_finite() {
            return Err(Error::Bracket(p));
        }
    }
    solve_bracketed(g, lo, hi, 1e-15).map(|r| r.x).ok_or(Error::Bracket(p))
}

/// The `p`-quantile of `params`, found by bracketed inversion of
/// [`stable_cdf`].
pub fn stable_quantile(params: &StableParams, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let z = standard_quantile(p, params.alpha(), params.beta())?;
    Ok(params.gamma() * z + params.delta())
}
