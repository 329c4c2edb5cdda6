//! Single-particle dissipative quantum walks and the escape probabilities
//! `P_x` they leave on each lossy site.
//!
//! Two engines compute the same profile independently: an adaptive
//! Dormand–Prince integration of the Schrödinger equation with the loss
//! accumulated alongside, and a frequency-domain quadrature of the resolvent.

mod resolvent;
mod time;

pub use resolvent::{loss_profile_resolvent, QuadratureOptions};
pub(crate) use resolvent::escape_quadrature;
pub use time::{bulk_boundary_equivalence, evolve, loss_profile_time, BoundaryReport, Trajectory, WalkStatus};

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::densela::LinalgError;
use crate::model::{LadderParams, ModelError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid walk: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("quadrature did not converge within {panels} panels (worst relative error {achieved:.3e})")]
    Quadrature { panels: usize, achieved: f64 },
    #[error("integrator step size underflow at t = {t:.6e}")]
    StepUnderflow { t: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    pub params: LadderParams,
    /// Initial cell; the walker starts on `(x0, A)`.
    pub x0: usize,
    pub t_max: f64,
    pub norm_floor: f64,
    pub step_tol: f64,
}

impl WalkConfig {
    pub const DEFAULT_T_MAX: f64 = 1e4;
    pub const DEFAULT_NORM_FLOOR: f64 = 1e-10;
    pub const DEFAULT_STEP_TOL: f64 = 1e-8;

    pub fn new(params: LadderParams, x0: usize) -> Self {
        Self {
            params,
            x0,
            t_max: Self::DEFAULT_T_MAX,
            norm_floor: Self::DEFAULT_NORM_FLOOR,
            step_tol: Self::DEFAULT_STEP_TOL,
        }
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        self.params.validate()?;
        if !(1..=self.params.cells).contains(&self.x0) {
            return Err(WalkError::Invalid(format!(
                "x0 = {} outside 1..={}",
                self.x0, self.params.cells
            )));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(WalkError::Invalid(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.norm_floor > 0.0 && self.norm_floor < 1.0) {
            return Err(WalkError::Invalid(format!(
                "norm_floor must lie in (0, 1), got {}",
                self.norm_floor
            )));
        }
        if !(self.step_tol > 0.0 && self.step_tol < 1.0) {
            return Err(WalkError::Invalid(format!(
                "step_tol must lie in (0, 1), got {}",
                self.step_tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub t: f64,
    pub psi: Vec<C64>,
    /// `⟨ψ|ψ⟩`
    pub norm: f64,
}

impl StateVector {
    pub fn new(t: f64, psi: Vec<C64>) -> Self {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum();
        Self { t, psi, norm }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Engine {
    Time,
    Resolvent,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Time => "TIME",
            Self::Resolvent => "RESOLVENT",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileDiagnostics {
    /// Accepted integrator steps, or integrand evaluations for the resolvent.
    pub evaluations: usize,
    /// Rejected steps, or quadrature panels.
    pub rejected: usize,
    pub t_end: Option<f64>,
    /// `⟨ψ|ψ⟩` left at the stopping time; bounds the unrecorded escape.
    pub residual_norm: f64,
    /// Bound on probability missed by truncation (time tail or frequency cutoff).
    pub tail_bound: f64,
    /// Largest per-site error estimate.
    pub error_estimate: f64,
    /// Frequency cutoff `Ω` of the resolvent engine.
    pub omega: Option<f64>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossProfile {
    /// `P_x` for `x = 1..=L`.
    pub values: Vec<f64>,
    pub engine: Engine,
    pub total: f64,
    pub diagnostics: ProfileDiagnostics,
}

impl LossProfile {
    pub(crate) fn new(values: Vec<f64>, engine: Engine, diagnostics: ProfileDiagnostics) -> Self {
        let total = values.iter().sum();
        Self {
            values,
            engine,
            total,
            diagnostics,
        }
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    /// `P_x` for 1-based `x`.
    pub fn at(&self, x: usize) -> f64 {
        self.values[x - 1]
    }

    /// CSV with columns `x,P_x,engine`; every line of `header` is emitted first
    /// behind a `# ` prefix.
    pub fn to_csv(&self, header: &str) -> String {
        let mut out = String::new();
        for line in header.lines() {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str("x,P_x,engine\n");
        for (i, p) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{:.16e},{}", i + 1, p, self.engine.as_str());
        }
        out
    }
}

/// Largest relative deviation between two profiles over the sites where the
/// reference exceeds `floor`.
pub fn relative_deviation(a: &LossProfile, reference: &LossProfile, floor: f64) -> f64 {
    a.values
        .iter()
        .zip(&reference.values)
        .filter(|(_, r)| **r > floor)
        .map(|(x, r)| (x - r).abs() / r)
        .fold(0.0, f64::max)
}
