use std::path::Path;

use clap::Args;
use serde::Deserialize;
use stable_agg::lqd::QuantileLevels;
use stable_agg::ma::MAModel;
use stable_agg::region::RasterSpec;
use stable_agg::stable::StableParams;

use crate::CliError;

/// Everything a subcommand may read. Loaded from `--config` and then
/// overridden field by field from the command line.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `theta_1..theta_q`; `theta_0 = 1` is implied.
    pub theta: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<Vec<usize>>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub r_steps: Option<usize>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub grid: Option<GridConfig>,
    pub trace_scanlines: Option<usize>,
    pub suite: Option<Vec<SuiteEntry>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub theta1: (f64, f64),
    pub theta2: (f64, f64),
    pub cells1: usize,
    pub cells2: usize,
}

/// One `verify` run; unset fields fall back to the top-level values.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub theta: Vec<f64>,
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<usize>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub stream: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<String>,
    /// Output file (default: stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "F")]
    pub alpha: Option<f64>,
    /// Innovation skewness.
    #[arg(long, global = true, value_name = "F", allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// MA coefficients theta_1..theta_q, comma separated ("" for iid).
    #[arg(long, global = true, value_name = "CSV", allow_hyphen_values = true, value_parser = parse_list::<f64>)]
    pub theta: Option<List<f64>>,
    /// Aggregation levels, comma separated.
    #[arg(long, global = true, value_name = "CSV", value_parser = parse_list::<usize>)]
    pub r: Option<List<usize>>,
    #[arg(long, global = true, value_name = "F")]
    pub r_min: Option<f64>,
    #[arg(long, global = true, value_name = "F")]
    pub r_max: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub r_steps: Option<usize>,
    #[arg(long, global = true, value_name = "F")]
    pub p1: Option<f64>,
    #[arg(long, global = true, value_name = "F")]
    pub p2: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub n: Option<usize>,
}

/// Comma-separated values; wrapped so clap treats the list as one value.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<List<T>, String>
where
    T::Err: std::fmt::Display,
{
    if s.trim().is_empty() {
        return Ok(List(Vec::new()));
    }
    s.split(',').map(|v| v.trim().parse::<T>().map_err(|e| format!("{v:?}: {e}"))).collect::<Result<_, _>>().map(List)
}

impl RunConfig {
    pub fn load(flags: &Flags) -> Result<Self, CliError> {
        let mut cfg = match &flags.config {
            Some(path) => Self::from_file(Path::new(path))?,
            None => Self::default(),
        };
        cfg.override_with(flags);
        Ok(cfg)
    }

    fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))
    }

    fn override_with(&mut self, f: &Flags) {
        fn set<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                slot.clone_from(v);
            }
        }
        set(&mut self.alpha, &f.alpha);
        set(&mut self.beta, &f.beta);
        set(&mut self.r_min, &f.r_min);
        set(&mut self.r_max, &f.r_max);
        set(&mut self.r_steps, &f.r_steps);
        set(&mut self.p1, &f.p1);
        set(&mut self.p2, &f.p2);
        set(&mut self.n, &f.n);
        set(&mut self.seed, &f.seed);
        set(&mut self.out, &f.out);
        if let Some(List(t)) = &f.theta {
            self.theta = Some(t.clone());
        }
        if let Some(List(r)) = &f.r {
            self.r = Some(r.clone());
        }
    }

    pub fn alpha(&self) -> Result<f64, CliError> {
        self.alpha.ok_or_else(|| CliError::Validation("--alpha is required".into()))
    }

    pub fn innovation(&self) -> Result<StableParams, CliError> {
        Ok(StableParams::new(
            self.alpha()?,
            self.beta.unwrap_or(0.0),
            self.gamma.unwrap_or(1.0),
            self.delta.unwrap_or(0.0),
        )?)
    }

    pub fn model(&self) -> Result<MAModel, CliError> {
        let lags = self.theta.as_ref().ok_or_else(|| CliError::Validation("--theta is required".into()))?;
        Ok(MAModel::from_lags(lags, self.innovation()?)?)
    }

    pub fn levels(&self) -> Result<QuantileLevels, CliError> {
        let d = QuantileLevels::default();
        Ok(QuantileLevels::new(self.p1.unwrap_or(d.p1()), self.p2.unwrap_or(d.p2()))?)
    }

    pub fn raster(&self) -> RasterSpec {
        match &self.grid {
            Some(g) => RasterSpec { theta1: g.theta1, theta2: g.theta2, cells1: g.cells1, cells2: g.cells2 },
            None => RasterSpec::default(),
        }
    }
}
