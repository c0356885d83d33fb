use rayon::prelude::*;
use serde::Serialize;
use stable_agg::lqd::{
    check_conditions, classify_shape, g_alpha, lqd_curvature, lqd_formula, lqd_slope, ConditionStatus, ShapeClass,
};
use stable_agg::ma::{aggregate_distribution, aggregation_coefficients, MAModel};
use stable_agg::mc::{verify, VerificationReport};
use stable_agg::region::{
    is_invertible, ma2_subregion, region_category, region_raster, trace_d_alpha, Category, GSign, SubRegion,
};
use stable_agg::stable::{is_alpha_one, RngSeed, StableParams};

use crate::config::{RunConfig, SuiteEntry};
use crate::{num, CliError};

/// MA(2) points representing each open sub-region, R1 through R5.
pub const EXEMPLARS: [(f64, f64); 5] = [(-1.4, 0.6), (-0.5, 0.2), (0.2, 0.9), (-0.2, -0.4), (0.7, -0.2)];

const DEFAULT_SEED: u64 = 2024;
const DEFAULT_VERIFY_N: usize = 1_000_000;
const DEFAULT_VERIFY_R: usize = 4;
const DEFAULT_SCANLINES: usize = 200;

fn json_line<T: Serialize>(out: &mut String, value: &T) {
    out.push_str(&serde_json::to_string(value).expect("report types serialize"));
    out.push('\n');
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

#[derive(Serialize)]
struct AggregateRow<'a> {
    r: usize,
    below_order: bool,
    coefficients: &'a [f64],
    params: StableParams,
}

/// Law of the aggregated process for every requested level.
pub fn aggregate(cfg: &RunConfig) -> Result<String, CliError> {
    let model = cfg.model()?;
    let levels =
        cfg.r.as_deref().filter(|r| !r.is_empty()).ok_or_else(|| CliError::Validation("--r is required".into()))?;
    let mut out = String::new();
    for &r in levels {
        let coeffs = aggregation_coefficients(&model, r)?;
        let params = aggregate_distribution(&model, r)?;
        json_line(&mut out, &AggregateRow { r, below_order: coeffs.below_order, coefficients: &coeffs.c, params });
    }
    Ok(out)
}

fn shape_name(s: ShapeClass) -> &'static str {
    match s {
        ShapeClass::Convex => "convex",
        ShapeClass::Linear => "linear",
        ShapeClass::Concave => "concave",
    }
}

/// Closed-form LQD against `ln r` on a log-spaced grid of levels.
pub fn lqd_curve(cfg: &RunConfig) -> Result<String, CliError> {
    let model = cfg.model()?;
    let levels = cfg.levels()?;
    let shape = classify_shape(&model)?;
    let r_min = cfg.r_min.unwrap_or(model.order().max(1) as f64);
    let r_max = cfg.r_max.unwrap_or(4f64.exp());
    let steps = cfg.r_steps.unwrap_or(200);
    if steps == 0 || !(r_min > 0.0 && r_min <= r_max) || !r_max.is_finite() {
        return Err(CliError::Validation(format!("bad r range [{r_min}, {r_max}] with {steps} steps")));
    }
    let (lo, hi) = (r_min.ln(), r_max.ln());
    let reference = 1.0 / model.alpha();
    let rows = (0..steps)
        .map(|k| {
            let ln_r = if steps == 1 { lo } else { lo + (hi - lo) * k as f64 / (steps - 1) as f64 };
            let r = if k == 0 {
                r_min
            } else if k + 1 == steps {
                r_max
            } else {
                ln_r.exp()
            };
            Ok(vec![
                num(ln_r),
                num(lqd_formula(&model, r, levels)?),
                num(lqd_slope(&model, r)?),
                num(lqd_curvature(&model, r)?),
                num(reference),
                shape_name(shape).to_string(),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(csv_text(&["ln_r", "zeta", "slope", "curvature", "reference_slope", "shape"], rows))
}

/// Sign raster of `g_alpha` over the MA(2) plane, followed by points of the
/// zero curve when `1 < alpha <= 2`.
pub fn region_map(cfg: &RunConfig) -> Result<String, CliError> {
    let alpha = cfg.alpha()?;
    let cells = region_raster(alpha, &cfg.raster())?;
    let mut rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let sign = c.sign.map_or("na", GSign::as_str);
            vec!["cell".into(), num(c.theta1), num(c.theta2), c.subregion.to_string(), sign.into(), num(c.g_alpha)]
        })
        .collect();
    if alpha > 1.0 && !is_alpha_one(alpha) {
        let scanlines = cfg.trace_scanlines.unwrap_or(DEFAULT_SCANLINES);
        for (t1, t2) in trace_d_alpha(alpha, scanlines)? {
            let g = g_alpha(&[1.0, t1, t2], alpha);
            rows.push(vec![
                "trace".into(),
                num(t1),
                num(t2),
                ma2_subregion(t1, t2).to_string(),
                GSign::Zero.as_str().into(),
                num(g),
            ]);
        }
    }
    Ok(csv_text(&["kind", "theta1", "theta2", "subregion", "g_sign", "g_alpha"], rows))
}

fn default_suite() -> Vec<SuiteEntry> {
    EXEMPLARS
        .iter()
        .flat_map(|&(t1, t2)| {
            [1.0, 1.5, 2.0].map(|alpha| SuiteEntry {
                theta: vec![t1, t2],
                alpha,
                beta: 0.0,
                gamma: None,
                delta: None,
                r: None,
                n: None,
                seed: None,
                stream: None,
            })
        })
        .collect()
}

/// Monte Carlo check of each suite entry. Entry `i` uses stream `i` of the
/// base seed unless it names its own.
pub fn verify_suite(cfg: &RunConfig) -> Result<String, CliError> {
    let suite = match (&cfg.suite, &cfg.theta) {
        (Some(s), _) => s.clone(),
        (None, Some(theta)) => vec![SuiteEntry {
            theta: theta.clone(),
            alpha: cfg.alpha()?,
            beta: cfg.beta.unwrap_or(0.0),
            gamma: cfg.gamma,
            delta: cfg.delta,
            r: None,
            n: None,
            seed: None,
            stream: None,
        }],
        (None, None) => default_suite(),
    };
    let levels = cfg.levels()?;
    let base_seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let single_r = match cfg.r.as_deref() {
        None => None,
        Some([r]) => Some(*r),
        Some(_) => return Err(CliError::Validation("verify takes a single --r".into())),
    };
    let jobs = suite
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let innovation = StableParams::new(
                e.alpha,
                e.beta,
                e.gamma.or(cfg.gamma).unwrap_or(1.0),
                e.delta.or(cfg.delta).unwrap_or(0.0),
            )?;
            let model = MAModel::from_lags(&e.theta, innovation)?;
            let r = single_r.or(e.r).unwrap_or(DEFAULT_VERIFY_R);
            let n = cfg.n.or(e.n).unwrap_or(DEFAULT_VERIFY_N);
            let seed = RngSeed::new(e.seed.unwrap_or(base_seed), e.stream.unwrap_or(i as u64));
            Ok((model, r, n, seed))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let reports = jobs
        .par_iter()
        .map(|(model, r, n, seed)| verify(model, *r, levels, *n, *seed))
        .collect::<Result<Vec<VerificationReport>, _>>()?;
    let mut out = String::new();
    for rep in &reports {
        json_line(&mut out, rep);
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::VerificationFailed { failed, total: reports.len(), output: out });
    }
    Ok(out)
}

#[derive(Serialize)]
struct Classification {
    theta: Vec<f64>,
    alpha: f64,
    beta: f64,
    invertible: bool,
    /// MA(2) label; `None` for `q > 2`.
    subregion: Option<SubRegion>,
    /// Known sign behaviour of the whole sub-region or border.
    category: Option<Category>,
    conditions: ConditionStatus,
    g_alpha: f64,
    g_sign: GSign,
    /// `None` when the closed form does not apply.
    shape: Option<ShapeClass>,
}

pub fn classify(cfg: &RunConfig) -> Result<String, CliError> {
    let model = cfg.model()?;
    let theta = model.theta();
    let subregion = match model.order() {
        0 => Some(ma2_subregion(0.0, 0.0)),
        1 => Some(ma2_subregion(theta[1], 0.0)),
        2 => Some(ma2_subregion(theta[1], theta[2])),
        _ => None,
    };
    let g = g_alpha(theta, model.alpha());
    let report = Classification {
        theta: theta.to_vec(),
        alpha: model.alpha(),
        beta: model.innovation().beta(),
        invertible: is_invertible(theta),
        subregion,
        category: subregion.and_then(|s| region_category(s, model.alpha())),
        conditions: check_conditions(&model),
        g_alpha: g,
        g_sign: GSign::of(g),
        shape: classify_shape(&model).ok(),
    };
    let mut out = String::new();
    json_line(&mut out, &report);
    Ok(out)
}
