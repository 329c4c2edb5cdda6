//! Damping-matrix view of the Lindblad single-particle correlation dynamics.
//!
//! With loss channels `√γ_x c_{x,B}` the deviation `C̃ = C − C(∞)` obeys
//! `dC̃/dt = XC̃ + C̃X†` where `X = i(H₀ᵀ + iM) = i·conj(H)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::LineFit;
use crate::densela::{eigendecompose, expm, vec_norm, ComplexMatrix, LinalgError};
use crate::igc::IgcSolution;
use crate::model::{build_ladder, site_index, Boundary, LadderParams, ModelError, Sublattice};
use crate::walk::{escape_quadrature, QuadratureOptions, WalkConfig, WalkError};

/// `Δ` below this counts as gapless.
pub const GAPLESS_TOL: f64 = 1e-6;
/// Largest ladder the dense correlation propagator accepts.
pub const REFERENCE_MAX_CELLS: usize = 40;
const IDENTITY_TOL: f64 = 1e-14;
const SPECTRAL_SLACK: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiouvilleError {
    #[error("damping matrix layout: {0}")]
    Layout(String),
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("damping spectrum has Re λ = {0:.3e} > 0")]
    Unstable(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

#[derive(Clone, Debug)]
pub struct DampingMatrix {
    pub x: ComplexMatrix,
    /// Diagonal of `M`: `0, γ_1, 0, γ_2, …`.
    pub m: Vec<f64>,
    pub h0: ComplexMatrix,
    pub cells: usize,
    pub boundary: Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Convergence {
    /// Finite gap: the deviation from the steady state decays exponentially.
    Exponential,
    /// Vanishing gap: algebraic approach.
    Algebraic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleReport {
    /// `Δ = min 2Re(−λ)`.
    pub gap: f64,
    pub gapless: bool,
    pub convergence: Convergence,
    /// Eigenvalues of `X`.
    pub spectrum: Vec<C64>,
    pub dark_mode_residuals: Vec<f64>,
    /// `n_x^B`, empty unless requested.
    pub steady_density: Vec<f64>,
}

/// Assembles `X` from the Hermitian and loss parts of the ladder Hamiltonian
/// and checks it against `i·conj(H)`.
pub fn build_damping(p: &LadderParams) -> Result<DampingMatrix, LiouvilleError> {
    let h = build_ladder(p)?;
    let h0 = h.hermitian_part();
    let loss = h.loss_part();
    let n = h.dim();
    let mut m = Vec::with_capacity(n);
    for i in 0..n {
        let expected = if i % 2 == 1 { p.loss[i / 2] } else { 0.0 };
        let found = -loss[(i, i)];
        if (found - C64::new(expected, 0.0)).norm() > IDENTITY_TOL * expected.max(1.0) {
            return Err(LiouvilleError::Layout(format!(
                "loss diagonal at row {i} is {found}, expected {expected}"
            )));
        }
        m.push(expected);
    }
    let off_diagonal = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| loss[(i, j)].norm())
        .fold(0.0, f64::max);
    if off_diagonal > IDENTITY_TOL {
        return Err(LiouvilleError::Layout(format!("loss is not onsite (off-diagonal {off_diagonal:.3e})")));
    }
    let i = C64::new(0.0, 1.0);
    let x = ComplexMatrix::from_fn(n, n, |r, c| {
        let diag = if r == c { i * m[r] } else { C64::new(0.0, 0.0) };
        i * (h0[(c, r)] + diag)
    });
    let defect = x.max_abs_diff(&h.matrix().conj().scale(i));
    if defect > IDENTITY_TOL * h.matrix().norm_inf().max(1.0) {
        return Err(LiouvilleError::Layout(format!("X differs from i·conj(H) by {defect:.3e}")));
    }
    Ok(DampingMatrix {
        x,
        m,
        h0,
        cells: p.cells,
        boundary: p.boundary,
    })
}

/// Gap and convergence class from the full spectrum of `X`.
pub fn liouvillian_gap(d: &DampingMatrix) -> Result<LiouvilleReport, LiouvilleError> {
    let spectrum = eigendecompose(&d.x, false)?.eigenvalues;
    let top = spectrum.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if top > SPECTRAL_SLACK * d.x.norm_inf().max(1.0) {
        return Err(LiouvilleError::Unstable(top));
    }
    let gap = -2.0 * top;
    let gapless = gap < GAPLESS_TOL;
    Ok(LiouvilleReport {
        gap,
        gapless,
        convergence: if gapless { Convergence::Algebraic } else { Convergence::Exponential },
        spectrum,
        dark_mode_residuals: Vec::new(),
        steady_density: Vec::new(),
    })
}

/// `‖Xv − iEv‖/‖v‖` for `v = (e^{−ik}, 0, e^{−2ik}, 0, …)` at every IGC point.
///
/// `X = i·conj(H)` carries the conjugate momentum of the Hamiltonian's dark state.
pub fn dark_mode_check(d: &DampingMatrix, igc: &IgcSolution) -> Vec<f64> {
    igc.points
        .iter()
        .map(|pt| {
            let v: Vec<C64> = pt.plane_wave(d.cells).iter().map(|z| z.conj()).collect();
            let xv = d.x.matvec(&v);
            let target = C64::new(0.0, pt.energy);
            let r: Vec<C64> = xv.iter().zip(&v).map(|(a, b)| a - target * b).collect();
            vec_norm(&r) / vec_norm(&v)
        })
        .collect()
}

/// `n_x^B = (γ_x/π) ∫ |⟨xB|(iω − X)⁻¹|x0 A⟩|² dω` on the walk's quadrature.
pub fn steady_density(p: &LadderParams, x0: usize, opts: &QuadratureOptions) -> Result<Vec<f64>, LiouvilleError> {
    WalkConfig::new(p.clone(), x0).validate()?;
    let d = build_damping(p)?;
    let (values, _) = escape_quadrature(&d.x, |w| C64::new(0.0, w), p, x0, opts)?;
    Ok(values)
}

/// Gap, dark-mode residuals and the steady density for a walker started at `x0`.
pub fn liouville_report(
    p: &LadderParams,
    igc: &IgcSolution,
    x0: usize,
    opts: &QuadratureOptions,
) -> Result<LiouvilleReport, LiouvilleError> {
    let d = build_damping(p)?;
    let mut report = liouvillian_gap(&d)?;
    report.dark_mode_residuals = dark_mode_check(&d, igc);
    report.steady_density = steady_density(p, x0, opts)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub times: Vec<f64>,
    /// `‖C̃(t)‖_F`.
    pub distance: Vec<f64>,
}

impl CorrelationTrace {
    /// Least-squares slope of `ln ‖C̃‖` against `t` over samples with `t ≥ from`.
    pub fn log_slope(&self, from: f64) -> Option<LineFit> {
        let (t, y): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.distance)
            .filter(|(&t, &d)| t >= from && d > 0.0)
            .map(|(&t, &d)| (t, d.ln()))
            .unzip();
        (t.len() >= 2).then(|| LineFit::new(&t, &y))
    }
}

/// `C̃(t) = e^{Xt} C̃(0) e^{X†t}` with `C̃(0) = |x0 A⟩⟨x0 A|`, sampled at
/// `t = j·dt` for `j = 0..=steps`.
pub fn propagate_correlation(
    d: &DampingMatrix,
    x0: usize,
    dt: f64,
    steps: usize,
) -> Result<CorrelationTrace, LiouvilleError> {
    if d.cells > REFERENCE_MAX_CELLS {
        return Err(LiouvilleError::Invalid(format!(
            "reference propagation is limited to {REFERENCE_MAX_CELLS} cells, got {}",
            d.cells
        )));
    }
    if !(1..=d.cells).contains(&x0) || !(dt > 0.0) {
        return Err(LiouvilleError::Invalid(format!("need 1 ≤ x0 ≤ {} and dt > 0", d.cells)));
    }
    let step = expm(&d.x.scale(C64::new(dt, 0.0)))?;
    let step_adj = step.adjoint();
    let n = d.x.rows();
    let src = site_index(x0, Sublattice::A);
    let mut c = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == src && j == src {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut times = Vec::with_capacity(steps + 1);
    let mut distance = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        times.push(j as f64 * dt);
        distance.push(c.norm_fro());
        c = step.matmul(&c).matmul(&step_adj);
    }
    Ok(CorrelationTrace { times, distance })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::igc::solve_connection;
    use crate::walk::loss_profile_resolvent;

    fn ladder(cells: usize, t: Vec<f64>, bc: Boundary) -> LadderParams {
        LadderParams::uniform(cells, t, 0.5, FRAC_PI_2, 0.5, bc)
    }

    #[test]
    fn damping_spectrum_is_conjugated_hamiltonian_spectrum() {
        let p = ladder(24, vec![0.3, 0.5], Boundary::Periodic);
        let d = build_damping(&p).unwrap();
        let lam = liouvillian_gap(&d).unwrap().spectrum;
        let e = eigendecompose(build_ladder(&p).unwrap().matrix(), false).unwrap().eigenvalues;
        let mapped: Vec<C64> = e.iter().map(|z| C64::new(0.0, 1.0) * z.conj()).collect();
        assert!(crate::model::tests::multiset_distance(&lam, &mapped) < 1e-9);
        for (i, g) in d.m.iter().enumerate() {
            assert_eq!(*g, if i % 2 == 1 { 0.5 } else { 0.0 });
        }
    }

    #[test]
    fn lossless_dynamics_is_rotational() {
        let p = ladder(10, vec![0.3, 0.5], Boundary::Open).with_loss(vec![0.0; 10]);
        let d = build_damping(&p).unwrap();
        assert!(d.x.max_abs_diff(&d.h0.transpose().scale(C64::new(0.0, 1.0))) < 1e-15);
        let r = liouvillian_gap(&d).unwrap();
        assert!(r.gap.abs() < 1e-10 && r.gapless);
        assert_eq!(r.convergence, Convergence::Algebraic);
    }

    #[test]
    fn commensurate_ring_is_gapless_and_open_chain_is_not() {
        let ring = ladder(40, vec![0.0, 0.5], Boundary::Periodic);
        assert!(liouvillian_gap(&build_damping(&ring).unwrap()).unwrap().gapless);
        let open = liouvillian_gap(&build_damping(&ring.with_boundary(Boundary::Open)).unwrap()).unwrap();
        assert!(open.gap > 1e-3, "{}", open.gap);
        let gapped = liouvillian_gap(&build_damping(&ladder(40, vec![0.6, 0.5], Boundary::Periodic)).unwrap()).unwrap();
        assert!(gapped.gap > 1e-3 && gapped.convergence == Convergence::Exponential);
    }

    #[test]
    fn dark_modes_ignore_the_loss_profile() {
        let base = ladder(201, vec![0.25, 0.5], Boundary::Periodic);
        let igc = solve_connection(&base.hoppings, base.intra, base.phase);
        assert_eq!(igc.points.len(), 2);
        let profiles = [
            vec![0.5; 201],
            (1..=201).map(|x| 0.01 * x as f64 + 0.2).collect(),
            (0..201).map(|x| 0.4 + 0.2 * ((x * 37 % 101) as f64 / 101.0)).collect(),
        ];
        for loss in profiles {
            let d = build_damping(&base.with_loss(loss)).unwrap();
            for r in dark_mode_check(&d, &igc) {
                assert!(r < 1e-10, "{r}");
            }
        }
        let none = solve_connection(&[0.6, 0.5], 0.5, FRAC_PI_2);
        assert!(dark_mode_check(&build_damping(&base).unwrap(), &none).is_empty());
    }

    #[test]
    fn steady_density_matches_loss_probability() {
        for t in [vec![0.3, 0.5], vec![0.6, 0.5]] {
            let p = ladder(30, t, Boundary::Open);
            let opts = QuadratureOptions::default();
            let n = steady_density(&p, 18, &opts).unwrap();
            let pr = loss_profile_resolvent(&WalkConfig::new(p, 18), &opts).unwrap();
            for (a, b) in n.iter().zip(&pr.values) {
                if b.abs() > 1e-12 {
                    assert!(((a - b) / b).abs() < 1e-6, "{a} {b}");
                }
            }
        }
        // two decoupled A-B dimers
        let dimers = LadderParams::uniform(2, vec![0.3], 0.0, 0.0, 0.5, Boundary::Open);
        let n = steady_density(&dimers, 1, &QuadratureOptions::default()).unwrap();
        assert!((n[0] - 1.0).abs() < 1e-8 && n[1].abs() < 1e-15, "{n:?}");
    }

    #[test]
    fn correlation_decays_at_the_gap() {
        let d = build_damping(&ladder(20, vec![0.6, 0.5], Boundary::Periodic)).unwrap();
        let gap = liouvillian_gap(&d).unwrap().gap;
        let trace = propagate_correlation(&d, 10, 1.0, 400).unwrap();
        assert_eq!(trace.distance[0], 1.0);
        let fit = trace.log_slope(200.0).unwrap();
        assert!((fit.slope + gap).abs() < 0.05 * gap, "{} vs {}", fit.slope, -gap);
        assert!(propagate_correlation(&build_damping(&ladder(41, vec![0.6, 0.5], Boundary::Open)).unwrap(), 1, 1.0, 1).is_err());
    }
}
