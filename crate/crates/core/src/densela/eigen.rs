use num_complex::Complex64 as C64;

use super::matrix::{dot_conj, vec_norm};
use super::{ComplexMatrix, LinalgError};

/// Relative residual `‖Av − λv‖ / ‖A‖` above which a pair is flagged.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// QR sweeps allowed per unit of matrix dimension.
const SWEEPS_PER_DIM: usize = 30;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Eigenvalues of a dense complex matrix, optionally with right eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// Column `j` is the unit-norm eigenvector for `eigenvalues[j]`.
    pub right_vectors: Option<ComplexMatrix>,
    /// `‖Av − λv‖ / ‖A‖` per pair, present together with `right_vectors`.
    pub residuals: Option<Vec<f64>>,
    pub condition_flag: bool,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// A single eigenpair with its relative residual.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: C64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

/// Hessenberg reduction plus QR eigenvalues of one matrix; eigenvectors are
/// produced on demand by inverse iteration.
pub struct Eigensolver<'a> {
    a: &'a ComplexMatrix,
    hess: ComplexMatrix,
    q: Option<ComplexMatrix>,
    values: Vec<C64>,
    scale: f64,
}

impl<'a> Eigensolver<'a> {
    pub fn new(a: &'a ComplexMatrix) -> Result<Self, LinalgError> {
        Self::build(a, true)
    }

    fn build(a: &'a ComplexMatrix, keep_basis: bool) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::Shape(format!(
                "eigendecomposition needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let (hess, q) = hessenberg(a, keep_basis);
        let values = hessenberg_qr(hess.clone(), a.norm_fro())?;
        Ok(Self {
            a,
            hess,
            q,
            values,
            scale: a.norm_fro(),
        })
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn hessenberg(&self) -> &ComplexMatrix {
        &self.hess
    }

    /// Eigenpairs for the given eigenvalue indices. Members of a numerically
    /// repeated eigenvalue are kept orthogonal to each other, so a defective
    /// eigenvalue shows up as a large residual.
    pub fn pairs(&self, indices: &[usize]) -> Vec<EigenPair> {
        let cluster_tol = f64::EPSILON.sqrt() * self.scale.max(1.0);
        let mut found: Vec<(C64, Vec<C64>)> = Vec::with_capacity(indices.len());
        let mut out = Vec::with_capacity(indices.len());
        for (seq, &idx) in indices.iter().enumerate() {
            let lambda = self.values[idx];
            let cluster: Vec<&Vec<C64>> = found
                .iter()
                .filter(|(mu, _)| (mu - lambda).norm() <= cluster_tol)
                .map(|(_, v)| v)
                .collect();
            let y = self.inverse_iteration(lambda, &cluster, seq);
            let v = self.q.as_ref().expect("eigenvector basis retained").matvec(&y);
            let av = self.a.matvec(&v);
            let r: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - lambda * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let residual = if self.scale > 0.0 { r / self.scale } else { r };
            found.push((lambda, y));
            out.push(EigenPair {
                value: lambda,
                vector: v,
                residual,
            });
        }
        out
    }

    fn inverse_iteration(&self, lambda: C64, cluster: &[&Vec<C64>], seq: usize) -> Vec<C64> {
        let n = self.hess.rows();
        let h = &self.hess;
        // a tiny shift keeps the factorization regular at an exact eigenvalue
        let delta = f64::EPSILON * self.scale.max(f64::MIN_POSITIVE);
        let shift = lambda + C64::new(delta, delta);
        let mut y = start_vector(n, seq);
        for _ in 0..3 {
            y = hessenberg_shifted_solve(h, shift, &y);
            for c in cluster {
                let proj = dot_conj(c, &y);
                for (yi, ci) in y.iter_mut().zip(c.iter()) {
                    *yi -= proj * ci;
                }
            }
            let nrm = vec_norm(&y);
            if nrm == 0.0 || !nrm.is_finite() {
                y = start_vector(n, seq + 1);
                continue;
            }
            for yi in y.iter_mut() {
                *yi /= nrm;
            }
        }
        y
    }
}

/// Eigenvalues (and optionally eigenvectors) of a square matrix.
pub fn eigendecompose(a: &ComplexMatrix, want_vectors: bool) -> Result<Spectrum, LinalgError> {
    let solver = Eigensolver::build(a, want_vectors)?;
    if !want_vectors {
        return Ok(Spectrum {
            eigenvalues: solver.values.clone(),
            right_vectors: None,
            residuals: None,
            condition_flag: false,
        });
    }
    let n = a.rows();
    let indices: Vec<usize> = (0..n).collect();
    let pairs = solver.pairs(&indices);
    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut residuals = Vec::with_capacity(n);
    for (j, p) in pairs.iter().enumerate() {
        for i in 0..n {
            vectors[(i, j)] = p.vector[i];
        }
        residuals.push(p.residual);
    }
    let flagged = residuals.iter().any(|&r| !(r <= RESIDUAL_TOL));
    Ok(Spectrum {
        eigenvalues: solver.values,
        right_vectors: Some(vectors),
        residuals: Some(residuals),
        condition_flag: flagged,
    })
}

/// Largest imaginary part over the spectrum.
pub fn max_imag(spec: &Spectrum) -> Result<f64, LinalgError> {
    spec.eigenvalues
        .iter()
        .map(|z| z.im)
        .reduce(f64::max)
        .ok_or(LinalgError::Empty)
}

fn start_vector(n: usize, seed: usize) -> Vec<C64> {
    // fixed low-discrepancy sequence; deterministic and never orthogonal to a
    // generic eigenvector
    let g = 0.754_877_666_246_692_7_f64;
    let mut v: Vec<C64> = (0..n)
        .map(|i| {
            let u = ((i + 1) as f64 * g + seed as f64 * 0.569_840_290_998_053_2).fract();
            let w = ((i + 1) as f64 * 0.569_840_290_998_053_2 + seed as f64 * g).fract();
            C64::new(0.5 + u, w - 0.5)
        })
        .collect();
    let nrm = vec_norm(&v);
    for x in v.iter_mut() {
        *x /= nrm;
    }
    v
}

/// Householder reduction `A = Q H Q†` to upper Hessenberg form.
fn hessenberg(a: &ComplexMatrix, keep_basis: bool) -> (ComplexMatrix, Option<ComplexMatrix>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = keep_basis.then(|| ComplexMatrix::identity(n));
    if n < 3 {
        return (h, q);
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let tail = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        for i in 0..n {
            v[i] = if i <= k { ZERO } else { h[(i, k)] };
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v[k + 1..].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // H <- (I - tau v v†) H
        for j in 0..n {
            let s: C64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            if s == ZERO {
                continue;
            }
            let s = s * tau;
            for i in k + 1..n {
                h[(i, j)] -= v[i] * s;
            }
        }
        // H <- H (I - tau v v†)
        for i in 0..n {
            let s: C64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum();
            if s == ZERO {
                continue;
            }
            let s = s * tau;
            for j in k + 1..n {
                h[(i, j)] -= s * v[j].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
        h[(k + 1, k)] = alpha;
        if let Some(q) = q.as_mut() {
            for i in 0..n {
                let s: C64 = (k + 1..n).map(|j| q[(i, j)] * v[j]).sum();
                if s == ZERO {
                    continue;
                }
                let s = s * tau;
                for j in k + 1..n {
                    q[(i, j)] -= s * v[j].conj();
                }
            }
        }
    }
    (h, q)
}

/// Givens rotation `[c s; -s̄ c]` with real `c` mapping `(x, y)` to `(r, 0)`.
#[inline]
fn givens(x: C64, y: C64) -> (f64, C64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    let ax = x.norm();
    let r = (ax * ax + y.norm_sqr()).sqrt();
    if ax == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    (ax / r, (x / ax) * y.conj() / r)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let (plus, minus) = (p + disc, p - disc);
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom == ZERO {
        d
    } else {
        d - bc / denom
    }
}

/// Eigenvalues of an upper Hessenberg matrix by implicit single-shift QR.
fn hessenberg_qr(mut h: ComplexMatrix, scale: f64) -> Result<Vec<C64>, LinalgError> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let mut values = vec![ZERO; n];
    if n == 0 {
        return Ok(values);
    }
    let budget = SWEEPS_PER_DIM * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut ihi = n - 1;
    loop {
        // locate the active block [l, ihi]
        let mut l = ihi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = scale;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == ihi {
            values[ihi] = h[(ihi, ihi)];
            its = 0;
            if ihi == 0 {
                break;
            }
            ihi -= 1;
            continue;
        }
        total += 1;
        its += 1;
        if total > budget {
            return Err(LinalgError::NoConvergence {
                block: (l, ihi),
                sweeps: total - 1,
            });
        }
        let shift = if its.is_multiple_of(10) {
            h[(ihi, ihi)] + C64::new(0.75 * h[(ihi, ihi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(ihi - 1, ihi - 1)],
                h[(ihi - 1, ihi)],
                h[(ihi, ihi - 1)],
                h[(ihi, ihi)],
            )
        };
        for k in l..ihi {
            let (x, y) = if k == l {
                (h[(l, l)] - shift, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let jlo = if k == l { l } else { k - 1 };
            for j in jlo..=ihi {
                let (a, b) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            let ihi_r = (k + 2).min(ihi);
            for i in l..=ihi_r {
                let (a, b) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = ZERO;
            }
        }
    }
    Ok(values)
}

/// Solves `(H - shift I) x = b` for upper Hessenberg `H` in `O(n²)`.
fn hessenberg_shifted_solve(h: &ComplexMatrix, shift: C64, b: &[C64]) -> Vec<C64> {
    let n = h.rows();
    let mut u = h.shifted(shift);
    let mut x = b.to_vec();
    let tiny = f64::EPSILON * (h.norm_fro() + shift.norm()).max(f64::MIN_POSITIVE);
    for k in 0..n.saturating_sub(1) {
        if u[(k + 1, k)].norm() > u[(k, k)].norm() {
            for j in k..n {
                let t = u[(k, j)];
                u[(k, j)] = u[(k + 1, j)];
                u[(k + 1, j)] = t;
            }
            x.swap(k, k + 1);
        }
        if u[(k, k)].norm() < tiny {
            u[(k, k)] = C64::new(tiny, 0.0);
        }
        let l = u[(k + 1, k)] / u[(k, k)];
        if l != ZERO {
            for j in k + 1..n {
                let t = u[(k, j)];
                u[(k + 1, j)] -= l * t;
            }
            let t = x[k];
            x[k + 1] -= l * t;
        }
        u[(k + 1, k)] = ZERO;
    }
    if n > 0 && u[(n - 1, n - 1)].norm() < tiny {
        u[(n - 1, n - 1)] = C64::new(tiny, 0.0);
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= u[(i, j)] * x[j];
        }
        x[i] = s / u[(i, i)];
    }
    x
}
