#![allow(clippy::excessive_precision)] // tabulated Gauss-Kronrod constants

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{Engine, LossProfile, ProfileDiagnostics, WalkConfig, WalkError};
use crate::densela::{ComplexMatrix, ShiftedSolver};
use crate::model::{bloch_at, build_ladder, site_index, LadderParams, Sublattice};

// 7-point Gauss / 15-point Kronrod, nodes on [0, 1) of the half-interval
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Relative accuracy per site.
    pub rel_tol: f64,
    /// Absolute accuracy per site, in units of `P_x`.
    pub abs_tol: f64,
    /// Bound on the probability lost beyond `±Ω`.
    pub tail_tol: f64,
    pub max_panels: usize,
    /// Uniform panels seeded on `[-‖H‖∞, ‖H‖∞]`.
    pub seed_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            abs_tol: 1e-15,
            tail_tol: 1e-8,
            max_panels: 40_000,
            seed_panels: 64,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    kronrod: Vec<f64>,
    error: Vec<f64>,
}

/// `[(γ_x/π) |G_{xB, x0A}(ω)|²]_x` for every lossy cell.
struct Integrand<'a> {
    solver: ShiftedSolver<'a>,
    shift: fn(f64) -> C64,
    source: usize,
    // (row of B site, γ/π)
    channels: Vec<(usize, f64)>,
}

impl Integrand<'_> {
    fn eval(&self, omega: f64) -> Result<Vec<f64>, WalkError> {
        let mut rhs = vec![C64::new(0.0, 0.0); self.solver.dim()];
        rhs[self.source] = C64::new(1.0, 0.0);
        let g = self.solver.solve((self.shift)(omega), &rhs)?;
        Ok(self.channels.iter().map(|&(row, w)| w * g[row].norm_sqr()).collect())
    }

    fn panel(&self, a: f64, b: f64) -> Result<Panel, WalkError> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let m = self.channels.len();
        let mut kronrod = vec![0.0; m];
        let mut gauss = vec![0.0; m];
        for (j, &x) in XGK.iter().enumerate() {
            let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-x, x] };
            for &s in nodes {
                let f = self.eval(mid + half * s)?;
                for c in 0..m {
                    kronrod[c] += WGK[j] * f[c];
                    if j % 2 == 1 {
                        gauss[c] += WG[j / 2] * f[c];
                    }
                }
            }
        }
        let error = kronrod.iter().zip(&gauss).map(|(k, g)| half * (k - g).abs()).collect();
        for k in &mut kronrod {
            *k *= half;
        }
        Ok(Panel { a, b, kronrod, error })
    }
}

fn evaluate(f: &Integrand, edges: &[(f64, f64)]) -> Result<Vec<Panel>, WalkError> {
    edges.par_iter().map(|&(a, b)| f.panel(a, b)).collect()
}

/// Energies where the periodic bands have a real-part extremum, used as panel edges.
fn band_extrema(p: &LadderParams) -> Vec<f64> {
    let gamma = p.loss.iter().sum::<f64>() / p.loss.len() as f64;
    let n = 512;
    let bands: Vec<[f64; 2]> = (0..n)
        .map(|j| {
            let k = 2.0 * PI * j as f64 / n as f64;
            let e = bloch_at(&p.hoppings, p.intra, p.phase, gamma, k).eigenvalues();
            let (mut lo, mut hi) = (e[0].re, e[1].re);
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            [lo, hi]
        })
        .collect();
    let mut out = Vec::new();
    for band in 0..2 {
        for j in 0..n {
            let (a, b, c) = (bands[(j + n - 1) % n][band], bands[j][band], bands[(j + 1) % n][band]);
            if (b >= a && b >= c) || (b <= a && b <= c) {
                out.push(b);
            }
        }
    }
    out
}

/// `P_x = (γ_x/π) ∫ |⟨x,B|(ω − H)⁻¹|x0,A⟩|² dω` by adaptive Gauss–Kronrod
/// quadrature on `[-Ω, Ω]`.
///
/// `Ω` makes the analytic tail `(γ_x/π)·2/(Ω − ‖H‖∞)` smaller than
/// `tail_tol`. Every node costs one factorization of `ω − H` and yields all
/// sites at once; panels are bisected in rounds until each site meets
/// `max(rel_tol·P_x, abs_tol)`.
pub fn loss_profile_resolvent(cfg: &WalkConfig, opts: &QuadratureOptions) -> Result<LossProfile, WalkError> {
    cfg.validate()?;
    let h = build_ladder(&cfg.params)?;
    let (values, diagnostics) = escape_quadrature(h.matrix(), |w| C64::new(w, 0.0), &cfg.params, cfg.x0, opts)?;
    Ok(LossProfile::new(values, Engine::Resolvent, diagnostics))
}

/// `(γ_x/π) ∫ |⟨x,B|(s(ω) − A)⁻¹|x0,A⟩|² dω` per cell, for a ladder-ordered
/// matrix `A` whose resolvent along `s(ω)` decays like `1/|ω|`.
pub(crate) fn escape_quadrature(
    a: &ComplexMatrix,
    shift: fn(f64) -> C64,
    params: &LadderParams,
    x0: usize,
    opts: &QuadratureOptions,
) -> Result<(Vec<f64>, ProfileDiagnostics), WalkError> {
    let cells = params.cells;
    let gamma_max = params.loss.iter().copied().fold(0.0, f64::max);
    if gamma_max == 0.0 {
        let diagnostics = ProfileDiagnostics {
            residual_norm: 1.0,
            complete: true,
            ..ProfileDiagnostics::default()
        };
        return Ok((vec![0.0; cells], diagnostics));
    }
    let radius = a.norm_inf();
    let omega = radius + 2.0 * gamma_max / (PI * opts.tail_tol);
    let lossy: Vec<usize> = (0..cells).filter(|&i| params.loss[i] > 0.0).collect();
    let f = Integrand {
        solver: ShiftedSolver::new(a),
        shift,
        source: site_index(x0, Sublattice::A),
        channels: lossy
            .iter()
            .map(|&i| (site_index(i + 1, Sublattice::B), params.loss[i] / PI))
            .collect(),
    };

    let mut cuts: Vec<f64> = (0..=opts.seed_panels)
        .map(|j| -radius + 2.0 * radius * j as f64 / opts.seed_panels as f64)
        .collect();
    cuts.extend(band_extrema(params).into_iter().filter(|e| e.abs() < radius));
    let mut r = radius;
    while r < omega {
        r = (2.0 * r).min(omega);
        cuts.push(r);
        cuts.push(-r);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * radius.max(1.0));
    let seeds: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let mut panels = evaluate(&f, &seeds)?;

    let m = f.channels.len();
    let mut evaluations = 15 * panels.len();
    loop {
        let mut total = vec![0.0; m];
        let mut err = vec![0.0; m];
        for p in &panels {
            for c in 0..m {
                total[c] += p.kronrod[c];
                err[c] += p.error[c];
            }
        }
        let tol: Vec<f64> = total.iter().map(|t| (opts.rel_tol * t.abs()).max(opts.abs_tol)).collect();
        let failing: Vec<usize> = (0..m).filter(|&c| err[c] > tol[c]).collect();
        let worst = (0..m).map(|c| err[c] / total[c].abs().max(opts.abs_tol)).fold(0.0, f64::max);
        if failing.is_empty() || panels.len() >= opts.max_panels {
            let complete = failing.is_empty();
            if !complete {
                return Err(WalkError::Quadrature {
                    panels: panels.len(),
                    achieved: worst,
                });
            }
            let mut values = vec![0.0; cells];
            for (c, &i) in lossy.iter().enumerate() {
                values[i] = total[c];
            }
            let diagnostics = ProfileDiagnostics {
                evaluations,
                rejected: panels.len(),
                t_end: None,
                residual_norm: 0.0,
                tail_bound: 2.0 * gamma_max / (PI * (omega - radius)),
                error_estimate: err.iter().copied().fold(0.0, f64::max),
                omega: Some(omega),
                complete,
            };
            return Ok((values, diagnostics));
        }
        // split every panel whose share of some failing site's error is above even
        let share = 1.0 / panels.len() as f64;
        let mut keep = Vec::with_capacity(panels.len());
        let mut split = Vec::new();
        for p in panels {
            let score = failing.iter().map(|&c| p.error[c] / tol[c]).fold(0.0, f64::max);
            if score > share {
                let mid = 0.5 * (p.a + p.b);
                split.push((p.a, mid));
                split.push((mid, p.b));
            } else {
                keep.push(p);
            }
        }
        evaluations += 15 * split.len();
        keep.extend(evaluate(&f, &split)?);
        keep.sort_by(|x, y| x.a.total_cmp(&y.a));
        panels = keep;
    }
}
