//! Imaginary-gap-closed points of the ladder.
//!
//! A plane wave confined to chain A stays dark exactly when the A-B form factor
//! `F(k) = Σ t_m cos(mk)` vanishes. With `u = cos k`, `F` is the Chebyshev
//! series `Σ t_m T_m(u)`, so the roots are found on `u ∈ [-1, 1]`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::model::{site_index, LadderParams, Sublattice};

/// Grid spacing in `u` for the sign-change and minimum scans.
pub const SCAN_STEP: f64 = 1e-3;
/// Bisection stops once `|F| < ROOT_TOL` (or the bracket is exhausted).
pub const ROOT_TOL: f64 = 1e-12;
/// A polished local minimum of `|F|` below this counts as a tangential root.
pub const TANGENT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IgcPoint {
    /// Momentum in `[0, 2π)`.
    pub k: f64,
    /// `e^{ik}`.
    pub beta: C64,
    /// `t_p cos(k − φ)`.
    pub energy: f64,
    /// Double root: `F` touches zero without changing sign, including `k = 0, π`.
    pub marginal: bool,
}

impl IgcPoint {
    /// Normalized chain-A plane wave `e^{ikx}/√L` on a ladder of `cells` cells.
    pub fn plane_wave(&self, cells: usize) -> Vec<C64> {
        let mut psi = vec![C64::new(0.0, 0.0); 2 * cells];
        let norm = 1.0 / (cells as f64).sqrt();
        for x in 1..=cells {
            psi[site_index(x, Sublattice::A)] = C64::from_polar(norm, self.k * x as f64);
        }
        psi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IgcSolution {
    /// Ascending in `k`.
    pub points: Vec<IgcPoint>,
    pub f_min: f64,
    pub k_min: f64,
    pub gapped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IgcClass {
    Igc,
    Gapped,
}

/// `Σ t_m T_m(u)` by Clenshaw's recurrence.
pub fn chebyshev_eval(t: &[f64], u: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in t.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    match t.first() {
        Some(&t0) => t0 + u * b1 - b2,
        None => 0.0,
    }
}

fn scan_grid() -> Vec<f64> {
    let n = (2.0 / SCAN_STEP).round() as usize;
    (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect()
}

fn bisect(t: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = chebyshev_eval(t, a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = chebyshev_eval(t, m);
        if fm.abs() < ROOT_TOL || m == a || m == b {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section minimization of `g` on `[a, b]`.
fn golden_min(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > 1e-15 * (1.0 + a.abs()) {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
        if c >= d {
            break;
        }
    }
    0.5 * (a + b)
}

/// Roots of `Σ t_m T_m(u)` on `[-1, 1]` as `(u, marginal)`, ascending.
fn chebyshev_roots(t: &[f64]) -> Vec<(f64, bool)> {
    let grid = scan_grid();
    let vals: Vec<f64> = grid.iter().map(|&u| chebyshev_eval(t, u)).collect();
    let scale = t.iter().map(|c| c.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut roots: Vec<(f64, bool)> = Vec::new();
    let last = grid.len() - 1;
    for i in 0..=last {
        if vals[i] == 0.0 || vals[i].abs() < ROOT_TOL * scale.min(1.0) {
            let crosses = i > 0 && i < last && (vals[i - 1] < 0.0) != (vals[i + 1] < 0.0);
            roots.push((grid[i], !crosses));
        }
        if i < last && vals[i] != 0.0 && vals[i + 1] != 0.0 && (vals[i] < 0.0) != (vals[i + 1] < 0.0) {
            roots.push((bisect(t, grid[i], grid[i + 1]), false));
        }
    }
    // tangential touches: local minima of |F| between grid nodes without a sign change
    let absf = |u: f64| chebyshev_eval(t, u).abs();
    for i in 0..=last {
        let lo = if i == 0 { 0 } else { i - 1 };
        let hi = (i + 1).min(last);
        let is_min = vals[lo].abs() >= vals[i].abs() && vals[hi].abs() >= vals[i].abs();
        let signed_change = (vals[lo] < 0.0) != (vals[i] < 0.0) || (vals[hi] < 0.0) != (vals[i] < 0.0);
        if !is_min || signed_change || vals[i] == 0.0 {
            continue;
        }
        let u = golden_min(absf, grid[lo], grid[hi]);
        if absf(u) < TANGENT_TOL {
            roots.push((u.clamp(-1.0, 1.0), true));
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, bool)> = Vec::new();
    for r in roots {
        match merged.last_mut() {
            Some(prev) if (r.0 - prev.0).abs() < 1e-9 => {
                prev.1 |= r.1;
                if absf(r.0) < absf(prev.0) {
                    prev.0 = r.0;
                }
            }
            _ => merged.push(r),
        }
    }
    // a root at u = ±1 is a double root in k
    for r in &mut merged {
        if 1.0 - r.0.abs() < 1e-9 {
            r.0 = r.0.signum();
            r.1 = true;
        }
    }
    merged
}

/// Minimum of `F` over `k`, as `(F(k_min), k_min)` with `k_min ∈ [0, π]`.
pub fn f_min_numeric(t: &[f64]) -> (f64, f64) {
    let grid = scan_grid();
    let f = |u: f64| chebyshev_eval(t, u);
    let (ib, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &u)| (i, f(u)))
        .fold((0, f64::INFINITY), |m, c| if c.1 < m.1 { c } else { m });
    let lo = grid[ib.saturating_sub(1)];
    let hi = grid[(ib + 1).min(grid.len() - 1)];
    let mut u = golden_min(f, lo, hi);
    for end in [lo, hi] {
        if f(end) < f(u) {
            u = end;
        }
    }
    (f(u), u.clamp(-1.0, 1.0).acos())
}

/// All real solutions of `Σ t_m cos(mk) = 0` in `[0, 2π)` with their energies
/// `t_p cos(k − φ)`.
pub fn solve_connection(t: &[f64], t_p: f64, phi: f64) -> IgcSolution {
    let mut points = Vec::new();
    for (u, marginal) in chebyshev_roots(t) {
        let k0 = u.acos();
        let ks: &[f64] = if u.abs() == 1.0 { &[k0] } else { &[k0, 2.0 * PI - k0] };
        for &k in ks {
            points.push(IgcPoint {
                k,
                beta: C64::from_polar(1.0, k),
                energy: t_p * (k - phi).cos(),
                marginal,
            });
        }
    }
    points.sort_by(|a, b| a.k.total_cmp(&b.k));
    let (f_min, k_min) = f_min_numeric(t);
    IgcSolution {
        gapped: points.is_empty(),
        points,
        f_min,
        k_min,
    }
}

/// Minimum of `t0 + t1 cos k + t2 cos 2k` for `t1 > 0`, `t2 ≥ 0`.
pub fn f_min_closed_form(t0: f64, t1: f64, t2: f64) -> (f64, f64) {
    if t2 <= t1 / 4.0 {
        (t0 - t1 + t2, PI)
    } else {
        (t0 - t1 * t1 / (8.0 * t2) - t2, (-t1 / (4.0 * t2)).acos())
    }
}

/// IGC energies of the nearest-neighbour ladder,
/// `(t_p/t1)(−t0 cos φ ± √(t1² − t0²) sin φ)`; empty when `|t0| > t1`.
pub fn igc_energies_closed_form(t0: f64, t1: f64, t_p: f64, phi: f64) -> Vec<f64> {
    if t0.abs() > t1 {
        return Vec::new();
    }
    let s = (t1 * t1 - t0 * t0).sqrt() * phi.sin();
    let c = -t0 * phi.cos();
    vec![t_p / t1 * (c + s), t_p / t1 * (c - s)]
}

pub fn classify(p: &LadderParams) -> IgcClass {
    if solve_connection(&p.hoppings, p.intra, p.phase).gapped {
        IgcClass::Gapped
    } else {
        IgcClass::Igc
    }
}
