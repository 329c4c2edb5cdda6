use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::model::LadderParams;

/// Smallest `|sin θ|` between the two tangents at an accepted crossing; a
/// curve retracing itself (e.g. `E(k) = E(−k)` at `φ = 0`) has `sin θ = 0`.
const MIN_CROSSING_SINE: f64 = 1e-4;
const POLISH_TOL: f64 = 1e-12;
pub const MIN_K_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfIntersection {
    pub k1: f64,
    pub k2: f64,
    pub energy: C64,
}

struct Bands<'a> {
    t: &'a [f64],
    intra: f64,
    phase: f64,
    half_gamma: C64,
}

impl Bands<'_> {
    /// `D(k) = h_x² + (h_y + iγ/2)²` and `dD/dk`.
    fn disc(&self, k: f64) -> (C64, C64) {
        let (mut hx, mut dhx) = (0.0, 0.0);
        for (m, &tm) in self.t.iter().enumerate() {
            let mf = m as f64;
            hx += tm * (mf * k).cos();
            dhx -= tm * mf * (mf * k).sin();
        }
        let hy = self.intra * (k - self.phase).cos() + self.half_gamma;
        let dhy = -self.intra * (k - self.phase).sin();
        (hx * hx + hy * hy, 2.0 * hx * dhx + 2.0 * hy * dhy)
    }

    /// Square-root branch of `D(k)` nearest `reference`, with its `k`-derivative.
    fn branch(&self, k: f64, reference: C64) -> (C64, C64) {
        let (d, dd) = self.disc(k);
        let mut w = d.sqrt();
        if (w - reference).norm() > (w + reference).norm() {
            w = -w;
        }
        let dw = if w.norm() > 0.0 { dd / (2.0 * w) } else { C64::new(0.0, 0.0) };
        (w, dw)
    }
}

#[derive(Clone, Copy)]
struct Vertex {
    k: f64,
    w: C64,
}

fn segment_hit(p0: C64, p1: C64, q0: C64, q1: C64) -> Option<(f64, f64)> {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let cross = (d1.conj() * d2).im;
    if cross.abs() <= 1e-9 * d1.norm() * d2.norm() {
        return None;
    }
    let w = q0 - p0;
    let s = (w.conj() * d2).im / cross;
    let u = (w.conj() * d1).im / cross;
    ((0.0..1.0).contains(&s) && (0.0..1.0).contains(&u)).then_some((s, u))
}

/// Crossings of the periodic Bloch spectrum with itself, within a band or
/// between the two bands.
///
/// The square root of the Bloch discriminant is followed continuously in `k`;
/// when it changes sign over one period the two bands form a single loop.
/// Crossings of the sampled polylines are polished by Newton's method on
/// `E_a(k1) = E_b(k2)`.
pub fn self_intersections(p: &LadderParams, k_samples: usize) -> Result<Vec<SelfIntersection>, AnalysisError> {
    let gamma = p
        .uniform_loss()
        .ok_or_else(|| AnalysisError::Invalid("self-intersections need a uniform loss rate".into()))?;
    if k_samples < MIN_K_SAMPLES {
        return Err(AnalysisError::Invalid(format!(
            "need at least {MIN_K_SAMPLES} momentum samples, got {k_samples}"
        )));
    }
    let bands = Bands {
        t: &p.hoppings,
        intra: p.intra,
        phase: p.phase,
        half_gamma: C64::new(0.0, gamma / 2.0),
    };
    let offset = -bands.half_gamma;
    let n = k_samples;
    let step = 2.0 * PI / n as f64;
    let mut track = Vec::with_capacity(n);
    let mut prev = bands.disc(0.0).0.sqrt();
    for j in 0..n {
        let (w, _) = bands.branch(j as f64 * step, prev);
        track.push(Vertex { k: j as f64 * step, w });
        prev = w;
    }
    let (w_wrap, _) = bands.branch(2.0 * PI, prev);
    let swapped = (w_wrap - track[0].w).norm() > (w_wrap + track[0].w).norm();
    let mirror = |v: &Vertex| Vertex { k: v.k, w: -v.w };
    let curves: Vec<Vec<Vertex>> = if swapped {
        vec![track.iter().copied().chain(track.iter().map(mirror)).collect()]
    } else {
        vec![track.clone(), track.iter().map(mirror).collect()]
    };

    let polish = |a: Vertex, b: Vertex| -> Option<(Vertex, Vertex)> {
        let (mut k1, mut k2, mut r1, mut r2) = (a.k, b.k, a.w, b.w);
        for _ in 0..50 {
            let (w1, d1) = bands.branch(k1, r1);
            let (w2, d2) = bands.branch(k2, r2);
            r1 = w1;
            r2 = w2;
            let f = w1 - w2;
            if f.norm() < POLISH_TOL {
                return Some((Vertex { k: k1, w: w1 }, Vertex { k: k2, w: w2 }));
            }
            // real 2×2 Newton step on Re/Im of f
            let (a11, a12, a21, a22) = (d1.re, -d2.re, d1.im, -d2.im);
            let det = a11 * a22 - a12 * a21;
            if det.abs() < 1e-300 {
                return None;
            }
            let dk1 = (-f.re * a22 + f.im * a12) / det;
            let dk2 = (-a11 * f.im + a21 * f.re) / det;
            k1 += dk1;
            k2 += dk2;
        }
        None
    };

    let mut found: Vec<(Vertex, Vertex)> = Vec::new();
    let mut consider = |a: Vertex, b: Vertex| {
        let Some((u, v)) = polish(a, b) else {
            return;
        };
        let wrap = |k: f64| k.rem_euclid(2.0 * PI);
        let (u, v) = (Vertex { k: wrap(u.k), ..u }, Vertex { k: wrap(v.k), ..v });
        let dk = (u.k - v.k).abs().min(2.0 * PI - (u.k - v.k).abs());
        let same_branch = (u.w - v.w).norm() < 1e-9 && dk < 2.0 * step;
        if same_branch || (u.k - a.k).abs().min(2.0 * PI - (u.k - a.k).abs()) > 4.0 * step {
            return;
        }
        let (_, t1) = bands.branch(u.k, u.w);
        let (_, t2) = bands.branch(v.k, v.w);
        let sine = (t1.conj() * t2).im.abs() / (t1.norm() * t2.norm());
        if !(sine > MIN_CROSSING_SINE) {
            return;
        }
        let duplicate = found.iter().any(|(x, y)| {
            let close = |p: &Vertex, q: &Vertex| {
                let d = (p.k - q.k).abs();
                d.min(2.0 * PI - d) < 1e-7 && (p.w - q.w).norm() < 1e-7
            };
            (close(x, &u) && close(y, &v)) || (close(x, &v) && close(y, &u))
        });
        if !duplicate {
            found.push((u, v));
        }
    };

    let seg = |c: &[Vertex], i: usize| (c[i], c[(i + 1) % c.len()]);
    for (ci, ca) in curves.iter().enumerate() {
        for (cj, cb) in curves.iter().enumerate().skip(ci) {
            for i in 0..ca.len() {
                let start = if ci == cj { i + 2 } else { 0 };
                for j in start..cb.len() {
                    if ci == cj && i == 0 && j == ca.len() - 1 {
                        continue;
                    }
                    let (p0, p1) = seg(ca, i);
                    let (q0, q1) = seg(cb, j);
                    if let Some((s, u)) = segment_hit(p0.w, p1.w, q0.w, q1.w) {
                        let along = |a: Vertex, b: Vertex, f: f64| {
                            let kb = if b.k < a.k { b.k + 2.0 * PI } else { b.k };
                            Vertex {
                                k: a.k + f * (kb - a.k),
                                w: a.w + f * (b.w - a.w),
                            }
                        };
                        consider(along(p0, p1, s), along(q0, q1, u));
                    }
                }
            }
        }
    }
    let mut out: Vec<SelfIntersection> = found
        .into_iter()
        .map(|(u, v)| {
            let (a, b) = if u.k <= v.k { (u, v) } else { (v, u) };
            SelfIntersection {
                k1: a.k,
                k2: b.k,
                energy: offset + 0.5 * (a.w + b.w),
            }
        })
        .collect();
    // order on a coarse grid so that refinement-level noise cannot permute the list
    let key = |z: C64| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64);
    out.sort_by_key(|s| key(s.energy));
    Ok(out)
}
