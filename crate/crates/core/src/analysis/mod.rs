//! Scaling laws and edge-burst phenomenology of loss profiles.

mod intersect;
mod scan;

pub use intersect::{self_intersections, SelfIntersection};
pub use scan::{scan_x0, ScanRow, ScanTable, Trend, TrendKind};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelError;
use crate::walk::{LossProfile, WalkError};

/// Sites closest to the walker's start left out of bulk fits.
pub const NEAR_FIELD: usize = 15;
/// Sites next to each edge left out of bulk fits.
pub const BOUNDARY_LAYER: usize = 10;
/// Fraction of the distance to the edge covered by the fit window.
pub const WINDOW_REACH: f64 = 0.6;
pub const MIN_FIT_POINTS: usize = 20;
/// An edge bursts when `P_edge / P_min` exceeds this.
pub const BURST_THRESHOLD: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("fit window {window:?} on the {side:?} side holds {usable} usable points, need {needed}")]
    WindowTooSmall {
        side: Side,
        window: (usize, usize),
        usable: usize,
        needed: usize,
    },
    #[error("invalid analysis input: {0}")]
    Invalid(String),
    #[error("x0 = {x0} outside 1..={cells}")]
    OutOfRange { x0: usize, cells: usize },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FitKind {
    Power,
    Exp,
}

/// Ordinary least-squares line `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl LineFit {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for (a, b) in x.iter().zip(y) {
            sxx += (a - mx) * (a - mx);
            sxy += (a - mx) * (b - my);
            syy += (b - my) * (b - my);
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
        Self {
            slope,
            intercept,
            r_squared,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    /// `α_b` for a power law `|x − x0|^{−α_b}`, `ln λ_b` for `λ_b^{|x − x0|}`.
    pub exponent: f64,
    pub r_squared: f64,
    /// Inclusive cell range.
    pub window: (usize, usize),
    pub n_points: usize,
    /// Non-positive `P_x` inside the window, left out of both fits.
    pub excluded: usize,
    /// `log P` against `log |x − x0|`.
    pub power: LineFit,
    /// `log P` against `|x − x0|`.
    pub exponential: LineFit,
}

/// Bulk fit window on one side of `x0`: 15 sites of near field and 10 of
/// boundary layer are left out, and the window reaches 60% of the way to the edge.
pub fn fit_window(cells: usize, x0: usize, side: Side) -> Option<(usize, usize)> {
    let (lo, hi) = match side {
        Side::Left => {
            let reach = (WINDOW_REACH * x0 as f64).floor() as usize;
            (x0.saturating_sub(reach), x0.checked_sub(NEAR_FIELD)?)
        }
        Side::Right => {
            let reach = (WINDOW_REACH * (cells + 1 - x0) as f64).floor() as usize;
            (x0 + NEAR_FIELD, x0 + reach)
        }
    };
    let lo = lo.max(BOUNDARY_LAYER + 1);
    let hi = hi.min(cells.checked_sub(BOUNDARY_LAYER)?);
    (lo <= hi).then_some((lo, hi))
}

/// Fits the bulk decay on one side of `x0` by a power law and by an
/// exponential and keeps the better one by `r²`.
pub fn fit_bulk(profile: &LossProfile, x0: usize, side: Side) -> Result<FitResult, AnalysisError> {
    let cells = profile.cells();
    if !(1..=cells).contains(&x0) {
        return Err(AnalysisError::OutOfRange { x0, cells });
    }
    let too_small = |window, usable| AnalysisError::WindowTooSmall {
        side,
        window,
        usable,
        needed: MIN_FIT_POINTS,
    };
    let window = fit_window(cells, x0, side).ok_or_else(|| too_small((0, 0), 0))?;
    let (mut ln_d, mut d, mut ln_p) = (Vec::new(), Vec::new(), Vec::new());
    let mut excluded = 0;
    for x in window.0..=window.1 {
        let p = profile.at(x);
        if !(p > 0.0) {
            excluded += 1;
            continue;
        }
        let dist = x.abs_diff(x0) as f64;
        ln_d.push(dist.ln());
        d.push(dist);
        ln_p.push(p.ln());
    }
    if d.len() < MIN_FIT_POINTS {
        return Err(too_small(window, d.len()));
    }
    let power = LineFit::new(&ln_d, &ln_p);
    let exponential = LineFit::new(&d, &ln_p);
    let (kind, exponent, r_squared) = if power.r_squared > exponential.r_squared {
        (FitKind::Power, -power.slope, power.r_squared)
    } else {
        (FitKind::Exp, exponential.slope, exponential.r_squared)
    };
    Ok(FitResult {
        kind,
        exponent,
        r_squared,
        window,
        n_points: d.len(),
        excluded,
        power,
        exponential,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BurstType {
    None,
    Left,
    Right,
    Bipolar,
}

/// Edge values against the smallest value between the edge and `x0`.
/// A side is `None` when `x0` sits on that edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurstMetrics {
    pub p_edge_left: Option<f64>,
    pub p_edge_right: Option<f64>,
    /// `min{P_1, …, P_x0}`
    pub p_min_left: Option<f64>,
    /// `min{P_x0, …, P_L}`
    pub p_min_right: Option<f64>,
    pub ratio_left: Option<f64>,
    pub ratio_right: Option<f64>,
    pub burst_type: BurstType,
}

pub fn burst_metrics(profile: &LossProfile, x0: usize) -> Result<BurstMetrics, AnalysisError> {
    burst_metrics_with(profile, x0, BURST_THRESHOLD)
}

pub fn burst_metrics_with(profile: &LossProfile, x0: usize, threshold: f64) -> Result<BurstMetrics, AnalysisError> {
    let cells = profile.cells();
    if !(1..=cells).contains(&x0) {
        return Err(AnalysisError::OutOfRange { x0, cells });
    }
    let p = &profile.values;
    let minimum = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    let (p_edge_left, p_min_left) = if x0 > 1 { (Some(p[0]), Some(minimum(&p[..x0]))) } else { (None, None) };
    let (p_edge_right, p_min_right) = if x0 < cells {
        (Some(p[cells - 1]), Some(minimum(&p[x0 - 1..])))
    } else {
        (None, None)
    };
    let ratio = |e: Option<f64>, m: Option<f64>| Some(e? / m?);
    let ratio_left = ratio(p_edge_left, p_min_left);
    let ratio_right = ratio(p_edge_right, p_min_right);
    let bursts = |r: Option<f64>| r.is_some_and(|r| r > threshold);
    let burst_type = match (bursts(ratio_left), bursts(ratio_right)) {
        (true, true) => BurstType::Bipolar,
        (true, false) => BurstType::Left,
        (false, true) => BurstType::Right,
        (false, false) => BurstType::None,
    };
    Ok(BurstMetrics {
        p_edge_left,
        p_edge_right,
        p_min_left,
        p_min_right,
        ratio_left,
        ratio_right,
        burst_type,
    })
}
