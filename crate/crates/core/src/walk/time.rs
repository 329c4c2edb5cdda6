use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Engine, LossProfile, ProfileDiagnostics, StateVector, WalkConfig, WalkError};
use crate::densela::{vec_norm, ComplexMatrix, RowCompressed};
use crate::model::{build_ladder, site_index, Boundary, Sublattice};

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes drop out
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus the embedded fourth-order ones
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Absolute floors of the mixed error test, relative to `step_tol`.
const PSI_FLOOR: f64 = 1e-4;
const LOSS_FLOOR: f64 = 1e-8;

/// Adaptive integrator for `ψ' = -iHψ` together with the escaped
/// probabilities `Q_x' = 2γ_x |ψ_{x,B}|²`.
pub(crate) struct Propagator {
    h: RowCompressed,
    // (cell index, row of its B site, γ)
    channels: Vec<(usize, usize, f64)>,
    pub t: f64,
    pub psi: Vec<C64>,
    pub q: Vec<f64>,
    step: f64,
    rtol: f64,
    dpsi: Vec<Vec<C64>>,
    dq: Vec<Vec<f64>>,
    fresh: bool,
    pub accepted: usize,
    pub rejected: usize,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix, loss: &[f64], psi0: Vec<C64>, rtol: f64) -> Self {
        let channels: Vec<_> = loss
            .iter()
            .enumerate()
            .filter(|(_, g)| **g > 0.0)
            .map(|(i, g)| (i, site_index(i + 1, Sublattice::B), *g))
            .collect();
        let n = h.rows();
        let scale = h.norm_inf().max(1e-300);
        Self {
            h: RowCompressed::from_dense(h),
            t: 0.0,
            psi: psi0,
            q: vec![0.0; loss.len()],
            step: 0.1 / scale,
            rtol,
            dpsi: vec![vec![C64::new(0.0, 0.0); n]; 7],
            dq: vec![vec![0.0; channels.len()]; 7],
            channels,
            fresh: true,
            accepted: 0,
            rejected: 0,
        }
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum()
    }

    fn rhs(&self, psi: &[C64], dpsi: &mut [C64], dq: &mut [f64]) {
        self.h.apply_scaled(psi, C64::new(0.0, -1.0), dpsi);
        for (o, &(_, row, g)) in dq.iter_mut().zip(&self.channels) {
            *o = 2.0 * g * psi[row].norm_sqr();
        }
    }

    /// Takes one accepted step, never past `t_stop`. Returns false once `t_stop` is reached.
    pub fn advance(&mut self, t_stop: f64) -> Result<bool, WalkError> {
        if self.t >= t_stop {
            return Ok(false);
        }
        let n = self.psi.len();
        if self.fresh {
            let (mut k0, mut q0) = (std::mem::take(&mut self.dpsi[0]), std::mem::take(&mut self.dq[0]));
            self.rhs(&self.psi, &mut k0, &mut q0);
            self.dpsi[0] = k0;
            self.dq[0] = q0;
            self.fresh = false;
        }
        let mut stage = vec![C64::new(0.0, 0.0); n];
        loop {
            let h = self.step.min(t_stop - self.t);
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(WalkError::StepUnderflow { t: self.t });
            }
            for s in 1..7 {
                for (i, y) in stage.iter_mut().enumerate() {
                    let mut acc = self.psi[i];
                    for r in 0..s {
                        if A[s][r] != 0.0 {
                            acc += self.dpsi[r][i] * (h * A[s][r]);
                        }
                    }
                    *y = acc;
                }
                let (mut kd, mut qd) = (std::mem::take(&mut self.dpsi[s]), std::mem::take(&mut self.dq[s]));
                self.rhs(&stage, &mut kd, &mut qd);
                self.dpsi[s] = kd;
                self.dq[s] = qd;
            }
            // stage 6 was evaluated at the fifth-order solution, which is now in `stage`
            let mut err = 0.0f64;
            let atol_psi = self.rtol * PSI_FLOOR;
            for i in 0..n {
                let mut e = C64::new(0.0, 0.0);
                for s in 0..7 {
                    if E[s] != 0.0 {
                        e += self.dpsi[s][i] * E[s];
                    }
                }
                let sc = atol_psi + self.rtol * self.psi[i].norm().max(stage[i].norm());
                err = err.max(h * e.norm() / sc);
            }
            let atol_q = self.rtol * LOSS_FLOOR;
            let mut q_new = vec![0.0; self.channels.len()];
            for (c, &(cell, _, _)) in self.channels.iter().enumerate() {
                let inc: f64 = (0..6).map(|s| A[6][s] * self.dq[s][c]).sum();
                let e: f64 = (0..7).map(|s| E[s] * self.dq[s][c]).sum();
                q_new[c] = self.q[cell] + h * inc;
                let sc = atol_q + self.rtol * self.q[cell].max(q_new[c]);
                err = err.max(h * e.abs() / sc);
            }
            if !err.is_finite() {
                self.step = h * 0.2;
                self.rejected += 1;
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.t += h;
                std::mem::swap(&mut self.psi, &mut stage);
                for (c, &(cell, _, _)) in self.channels.iter().enumerate() {
                    self.q[cell] = q_new[c];
                }
                self.dpsi.swap(0, 6);
                self.dq.swap(0, 6);
                self.accepted += 1;
                if h == self.step || factor < 1.0 {
                    self.step = h * factor;
                }
                return Ok(true);
            }
            self.step = h * factor.min(1.0);
            self.rejected += 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "UPPERCASE")]
pub enum WalkStatus {
    /// Norm fell below the floor.
    Complete,
    /// `t_max` reached first; `residual_norm` is the norm left.
    Incomplete { residual_norm: f64 },
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Initial state, every `stride`-th accepted step, and the final state.
    pub snapshots: Vec<StateVector>,
    pub status: WalkStatus,
    /// Escaped probability per cell up to the final time.
    pub escaped: Vec<f64>,
    pub steps: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last(&self) -> &StateVector {
        self.snapshots.last().expect("trajectory holds its initial state")
    }
}

fn initial_state(cfg: &WalkConfig) -> Vec<C64> {
    let mut psi = vec![C64::new(0.0, 0.0); cfg.params.dim()];
    psi[site_index(cfg.x0, Sublattice::A)] = C64::new(1.0, 0.0);
    psi
}

fn run(cfg: &WalkConfig, h: &ComplexMatrix, stride: usize) -> Result<Trajectory, WalkError> {
    let mut prop = Propagator::new(h, &cfg.params.loss, initial_state(cfg), cfg.step_tol);
    let mut snapshots = vec![StateVector::new(0.0, prop.psi.clone())];
    let mut norm = prop.norm();
    while norm >= cfg.norm_floor && prop.advance(cfg.t_max)? {
        norm = prop.norm();
        if stride > 0 && prop.accepted.is_multiple_of(stride) {
            snapshots.push(StateVector::new(prop.t, prop.psi.clone()));
        }
    }
    if snapshots.last().map(|s| s.t) != Some(prop.t) {
        snapshots.push(StateVector::new(prop.t, prop.psi.clone()));
    }
    let status = if norm < cfg.norm_floor {
        WalkStatus::Complete
    } else {
        WalkStatus::Incomplete { residual_norm: norm }
    };
    Ok(Trajectory {
        snapshots,
        status,
        escaped: prop.q,
        steps: prop.accepted,
        rejected: prop.rejected,
    })
}

/// Integrates the walk from `(x0, A)` until the norm drops below `norm_floor`
/// or `t_max` is reached, keeping every `stride`-th step (`0` keeps only the ends).
pub fn evolve(cfg: &WalkConfig, stride: usize) -> Result<Trajectory, WalkError> {
    cfg.validate()?;
    let h = build_ladder(&cfg.params)?;
    run(cfg, h.matrix(), stride)
}

/// `P_x = 2γ_x ∫ |ψ_{x,B}|² dt`, integrated with the trajectory.
pub fn loss_profile_time(cfg: &WalkConfig) -> Result<LossProfile, WalkError> {
    cfg.validate()?;
    if cfg.params.loss.iter().all(|&g| g == 0.0) {
        let diagnostics = ProfileDiagnostics {
            t_end: Some(0.0),
            residual_norm: 1.0,
            complete: true,
            ..ProfileDiagnostics::default()
        };
        return Ok(LossProfile::new(vec![0.0; cfg.params.cells], Engine::Time, diagnostics));
    }
    let h = build_ladder(&cfg.params)?;
    let traj = run(cfg, h.matrix(), 0)?;
    let last = traj.last();
    let diagnostics = ProfileDiagnostics {
        evaluations: traj.steps,
        rejected: traj.rejected,
        t_end: Some(last.t),
        residual_norm: last.norm,
        tail_bound: last.norm,
        error_estimate: cfg.step_tol,
        omega: None,
        complete: matches!(traj.status, WalkStatus::Complete),
    };
    Ok(LossProfile::new(traj.escaped, Engine::Time, diagnostics))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub horizon: f64,
    pub times: Vec<f64>,
    /// `‖ψ_OBC(t) − ψ_PBC(t)‖` on `times`.
    pub difference: Vec<f64>,
    /// `∫_0^t ‖(H_PBC − H_OBC) ψ_OBC‖ ds`, which bounds the difference.
    pub bound: Vec<f64>,
    pub max_difference: f64,
    pub within_bound: bool,
}

/// Runs the same walk under open and periodic boundaries up to `horizon` and
/// compares the states on `samples` evenly spaced times.
pub fn bulk_boundary_equivalence(cfg: &WalkConfig, horizon: f64, samples: usize) -> Result<BoundaryReport, WalkError> {
    cfg.validate()?;
    if !(horizon >= 0.0) || samples == 0 {
        return Err(WalkError::Invalid("horizon must be non-negative with at least one sample".into()));
    }
    let ho = build_ladder(&cfg.params.with_boundary(Boundary::Open))?.into_matrix();
    let hp = build_ladder(&cfg.params.with_boundary(Boundary::Periodic))?.into_matrix();
    let delta = RowCompressed::from_dense(&hp.sub(&ho));
    let mut po = Propagator::new(&ho, &cfg.params.loss, initial_state(cfg), cfg.step_tol);
    let mut pp = Propagator::new(&hp, &cfg.params.loss, initial_state(cfg), cfg.step_tol);
    let leak = |psi: &[C64]| {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        delta.apply_scaled(psi, C64::new(1.0, 0.0), &mut out);
        vec_norm(&out)
    };
    let mut times = vec![0.0];
    let mut difference = vec![0.0];
    let mut bound = vec![0.0];
    // the bound integrand is sampled on the OBC steps (trapezoid)
    let (mut t_prev, mut g_prev, mut acc) = (0.0, leak(&po.psi), 0.0);
    for j in 1..=samples {
        let t = horizon * j as f64 / samples as f64;
        while po.advance(t)? {
            let g = leak(&po.psi);
            acc += 0.5 * (g + g_prev) * (po.t - t_prev);
            t_prev = po.t;
            g_prev = g;
        }
        while pp.advance(t)? {}
        let d: Vec<C64> = po.psi.iter().zip(&pp.psi).map(|(a, b)| a - b).collect();
        times.push(t);
        difference.push(vec_norm(&d));
        bound.push(acc);
    }
    let max_difference = difference.iter().copied().fold(0.0, f64::max);
    // allow for integration error on both sides of the comparison
    let slack = 10.0 * cfg.step_tol;
    let within_bound = difference.iter().zip(&bound).all(|(d, b)| *d <= b * (1.0 + 1e-3) + slack);
    Ok(BoundaryReport {
        horizon,
        times,
        difference,
        bound,
        max_difference,
        within_bound,
    })
}
