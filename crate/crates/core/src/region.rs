//! Invertibility of MA(q) filters and the sign of `g_alpha` over the MA(2)
//! invertibility region.
//!
//! The MA(2) region `{theta2 < 1, theta1 + theta2 > -1, theta1 - theta2 < 1}`
//! is cut into five open sub-regions by the lines `theta1 = -1`,
//! `theta2 = 0` and `theta1 + theta2 = 0`:
//!
//! ```text
//! R1: theta1 < -1, theta2 < 1, theta1 + theta2 > -1
//! R2: theta1 > -1, theta2 > 0, theta1 + theta2 < 0
//! R3: 0 < theta2 < 1, theta1 + theta2 > 0, theta1 - theta2 < 1
//! R4: theta2 < 0, -1 < theta1 + theta2 < 0, theta1 - theta2 < 1
//! R5: theta2 < 0, theta1 + theta2 > 0, theta1 - theta2 < 1
//! ```
//!
//! together with five border segments and the origin.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lqd::{g_alpha, G_TOLERANCE};
use crate::numeric::solve_bracketed;
use crate::stable::is_alpha_one;

/// Width of the band in which a point counts as lying on a border line.
pub const BORDER_TOLERANCE: f64 = 1e-12;

/// Required margin on root moduli in the companion-matrix test.
pub const ROOT_MARGIN: f64 = 1e-10;

/// Border segment between two adjacent sub-regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Border {
    /// `theta1 = -1`, `0 < theta2 < 1`
    B12,
    /// `theta1 + theta2 = 0`, `0 < theta2 < 1`
    B23,
    /// `theta2 = 0`, `-1 < theta1 < 0`
    B24,
    /// `theta2 = 0`, `0 < theta1 < 1`
    B35,
    /// `theta1 + theta2 = 0`, `-1/2 < theta2 < 0`
    B45,
}

impl Border {
    pub const ALL: [Border; 5] = [Border::B12, Border::B23, Border::B24, Border::B35, Border::B45];

    pub fn pair(self) -> (u8, u8) {
        match self {
            Border::B12 => (1, 2),
            Border::B23 => (2, 3),
            Border::B24 => (2, 4),
            Border::B35 => (3, 5),
            Border::B45 => (4, 5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubRegion {
    R1,
    R2,
    R3,
    R4,
    R5,
    Border(Border),
    Origin,
    NotInvertible,
}

impl SubRegion {
    pub const OPEN: [SubRegion; 5] = [SubRegion::R1, SubRegion::R2, SubRegion::R3, SubRegion::R4, SubRegion::R5];
}

impl fmt::Display for SubRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubRegion::R1 => f.write_str("R1"),
            SubRegion::R2 => f.write_str("R2"),
            SubRegion::R3 => f.write_str("R3"),
            SubRegion::R4 => f.write_str("R4"),
            SubRegion::R5 => f.write_str("R5"),
            SubRegion::Border(b) => {
                let (a, c) = b.pair();
                write!(f, "border({a}-{c})")
            }
            SubRegion::Origin => f.write_str("origin"),
            SubRegion::NotInvertible => f.write_str("not_invertible"),
        }
    }
}

impl Serialize for SubRegion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GSign {
    Positive,
    Zero,
    Negative,
}

impl GSign {
    pub fn of(g: f64) -> Self {
        if g > G_TOLERANCE {
            GSign::Positive
        } else if g < -G_TOLERANCE {
            GSign::Negative
        } else {
            GSign::Zero
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GSign::Positive => "positive",
            GSign::Zero => "zero",
            GSign::Negative => "negative",
        }
    }
}

/// Sign behaviour of `g_alpha` over a whole sub-region or border.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Positive,
    Zero,
    Negative,
    /// Both signs occur.
    Mixed,
}

/// Known categorisation of each part of the MA(2) region for a given alpha.
pub fn region_category(label: SubRegion, alpha: f64) -> Option<Category> {
    use Category::*;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return None;
    }
    let cat = match label {
        SubRegion::NotInvertible => return None,
        SubRegion::Origin => Zero,
        _ if alpha < 1.0 && !is_alpha_one(alpha) => Positive,
        SubRegion::R1 | SubRegion::R4 => Positive,
        SubRegion::Border(Border::B12 | Border::B24 | Border::B45) => Positive,
        SubRegion::R2 | SubRegion::R5 if is_alpha_one(alpha) => Positive,
        SubRegion::R2 | SubRegion::R5 => Mixed,
        SubRegion::R3 | SubRegion::Border(Border::B23 | Border::B35) if is_alpha_one(alpha) => Zero,
        SubRegion::R3 | SubRegion::Border(Border::B23 | Border::B35) => Negative,
    };
    Some(cat)
}

/// Strict MA(2) invertibility inequalities.
pub fn is_invertible_ma2(theta1: f64, theta2: f64) -> bool {
    theta2 < 1.0 && theta1 + theta2 > -1.0 && theta1 - theta2 < 1.0
}

/// Moduli of the roots of `w^q + theta1 w^(q-1) + ... + theta_q`, the
/// reciprocals of the roots of `1 + theta1 z + ... + theta_q z^q`.
pub fn reciprocal_root_moduli(theta: &[f64]) -> Vec<f64> {
    let mut q = theta.len().saturating_sub(1);
    while q > 0 && theta[q] == 0.0 {
        q -= 1;
    }
    if q == 0 {
        return Vec::new();
    }
    let mut companion = DMatrix::<f64>::zeros(q, q);
    for j in 0..q {
        companion[(0, j)] = -theta[j + 1] / theta[0];
    }
    for i in 1..q {
        companion[(i, i - 1)] = 1.0;
    }
    companion.complex_eigenvalues().iter().map(|w| w.norm()).collect()
}

/// Whether every root of `1 + theta1 z + ... + theta_q z^q` lies outside the
/// unit circle. `theta` includes `theta[0] = 1`.
pub fn is_invertible(theta: &[f64]) -> bool {
    let mut q = theta.len().saturating_sub(1);
    while q > 0 && theta[q] == 0.0 {
        q -= 1;
    }
    match q {
        0 => true,
        1 => theta[1].abs() < 1.0,
        2 => is_invertible_ma2(theta[1], theta[2]),
        _ => reciprocal_root_moduli(&theta[..=q]).iter().all(|&m| m * (1.0 + ROOT_MARGIN) < 1.0),
    }
}

/// Locates `(theta1, theta2)` in the MA(2) sub-region taxonomy.
pub fn ma2_subregion(theta1: f64, theta2: f64) -> SubRegion {
    if !is_invertible_ma2(theta1, theta2) {
        return SubRegion::NotInvertible;
    }
    let tol = BORDER_TOLERANCE;
    let on_axis = theta2.abs() <= tol;
    let on_diagonal = (theta1 + theta2).abs() <= tol;
    if on_axis && theta1.abs() <= tol {
        return SubRegion::Origin;
    }
    if on_axis {
        return SubRegion::Border(if theta1 < 0.0 { Border::B24 } else { Border::B35 });
    }
    if on_diagonal {
        return SubRegion::Border(if theta2 > 0.0 { Border::B23 } else { Border::B45 });
    }
    if (theta1 + 1.0).abs() <= tol {
        return SubRegion::Border(Border::B12);
    }
    if theta2 > 0.0 {
        if theta1 < -1.0 {
            SubRegion::R1
        } else if theta1 + theta2 < 0.0 {
            SubRegion::R2
        } else {
            SubRegion::R3
        }
    } else if theta1 + theta2 < 0.0 {
        SubRegion::R4
    } else {
        SubRegion::R5
    }
}

pub fn classify_g_sign(theta: &[f64], alpha: f64) -> GSign {
    GSign::of(g_alpha(theta, alpha))
}

/// `(x + y)^alpha - x^alpha - y^alpha`: negative for `alpha < 1`, zero at
/// `alpha = 1` and positive for `alpha > 1` when `x, y > 0`.
pub fn power_sum_gap(x: f64, y: f64, alpha: f64) -> f64 {
    (x + y).powf(alpha) - x.powf(alpha) - y.powf(alpha)
}

/// Cell-centred grid over the `(theta1, theta2)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterSpec {
    pub theta1: (f64, f64),
    pub theta2: (f64, f64),
    pub cells1: usize,
    pub cells2: usize,
}

impl Default for RasterSpec {
    fn default() -> Self {
        Self { theta1: (-2.05, 2.05), theta2: (-1.05, 1.05), cells1: 401, cells2: 201 }
    }
}

impl RasterSpec {
    fn validate(&self) -> Result<()> {
        let ok_range = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo < hi;
        if !ok_range(self.theta1) || !ok_range(self.theta2) {
            return Err(Error::DegenerateGrid("bounds must be finite with min < max".into()));
        }
        if self.cells1 < 2 || self.cells2 < 2 {
            return Err(Error::DegenerateGrid("need at least 2x2 cells".into()));
        }
        Ok(())
    }

    fn center(range: (f64, f64), cells: usize, i: usize) -> f64 {
        range.0 + (i as f64 + 0.5) * (range.1 - range.0) / cells as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RasterCell {
    pub theta1: f64,
    pub theta2: f64,
    pub subregion: SubRegion,
    pub g_alpha: f64,
    /// `None` outside the invertibility region.
    pub sign: Option<GSign>,
}

/// Sign of `g_alpha` at every cell centre, rows of constant `theta2` from
/// the bottom up.
pub fn region_raster(alpha: f64, grid: &RasterSpec) -> Result<Vec<RasterCell>> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::AlphaOutOfRange(alpha, "(0, 2]"));
    }
    grid.validate()?;
    let rows: Vec<Vec<RasterCell>> = (0..grid.cells2)
        .into_par_iter()
        .map(|i2| {
            let theta2 = RasterSpec::center(grid.theta2, grid.cells2, i2);
            (0..grid.cells1)
                .map(|i1| {
                    let theta1 = RasterSpec::center(grid.theta1, grid.cells1, i1);
                    let subregion = ma2_subregion(theta1, theta2);
                    let g = g_alpha(&[1.0, theta1, theta2], alpha);
                    let sign = (subregion != SubRegion::NotInvertible).then(|| GSign::of(g));
                    RasterCell { theta1, theta2, subregion, g_alpha: g, sign }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

const TRACE_SUBSAMPLES: usize = 64;
const TRACE_RESIDUAL: f64 = 1e-10;

/// Points of the zero set `{g_alpha = 0}` inside the MA(2) region for
/// `1 < alpha <= 2`.
///
/// `scanlines` vertical lines at cell centres of `theta1 in (-1, 1)` are
/// searched for sign changes of `g_alpha` in `theta2`, each refined by
/// bracketed root finding. The curve's end points `(0, 0)` and `(-1, 1)`
/// come first in the output.
pub fn trace_d_alpha(alpha: f64, scanlines: usize) -> Result<Vec<(f64, f64)>> {
    if !(alpha > 1.0 && alpha <= 2.0) || is_alpha_one(alpha) {
        return Err(Error::AlphaOutOfRange(alpha, "(1, 2]"));
    }
    if scanlines == 0 {
        return Err(Error::DegenerateGrid("need at least one scanline".into()));
    }
    let per_line: Vec<Vec<(f64, f64)>> = (0..scanlines)
        .into_par_iter()
        .map(|k| {
            let theta1 = -1.0 + (k as f64 + 0.5) * 2.0 / scanlines as f64;
            scanline_zeros(theta1, alpha)
        })
        .collect();
    let mut points = vec![(0.0, 0.0), (-1.0, 1.0)];
    points.extend(per_line.into_iter().flatten());
    Ok(points)
}

fn scanline_zeros(theta1: f64, alpha: f64) -> Vec<(f64, f64)> {
    let g = |theta2: f64| g_alpha(&[1.0, theta1, theta2], alpha);
    let lo = (-1.0 - theta1).max(theta1 - 1.0);
    let hi = 1.0;
    let step = (hi - lo) / TRACE_SUBSAMPLES as f64;
    let mut out = Vec::new();
    let mut prev = (lo + 0.5 * step, g(lo + 0.5 * step));
    for i in 1..TRACE_SUBSAMPLES {
        let t = lo + (i as f64 + 0.5) * step;
        let cur = (t, g(t));
        if prev.1 == 0.0 {
            out.push((theta1, prev.0));
        } else if prev.1.signum() != cur.1.signum() && cur.1 != 0.0 {
            if let Some(root) = solve_bracketed(g, prev.0, cur.0, 1e-15) {
                if root.fx.abs() <= TRACE_RESIDUAL {
                    out.push((theta1, root.x));
                }
            }
        }
        prev = cur;
    }
    if prev.1 == 0.0 {
        out.push((theta1, prev.0));
    }
    out
}
