use num_complex::Complex64 as C64;

use super::{ComplexMatrix, LinalgError};

/// Pivots below this fraction of `‖A‖∞` are treated as exact zeros.
pub const SINGULAR_RTOL: f64 = 1e-14;

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct LuFactor {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl LuFactor {
    pub fn new(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::Shape(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let threshold = SINGULAR_RTOL * a.norm_inf();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= threshold || pmag == 0.0 {
                return Err(LinalgError::Singular { column: k, pivot: pmag });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let inv = lu[k * n + k].inv();
            for i in k + 1..n {
                let l = lu[i * n + k] * inv;
                lu[i * n + k] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                let (upper, lower) = lu.split_at_mut(i * n);
                let krow = &upper[k * n + k + 1..k * n + n];
                let irow = &mut lower[k + 1..n];
                for (x, u) in irow.iter_mut().zip(krow) {
                    *x -= l * u;
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: C64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: C64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    pub fn det(&self) -> C64 {
        let mut d: C64 = (0..self.n).map(|i| self.lu[i * self.n + i]).product();
        if self.swaps % 2 == 1 {
            d = -d;
        }
        d
    }
}

/// Solves `A x = b` by partial-pivoted LU.
pub fn lu_solve(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::Shape(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    Ok(LuFactor::new(a)?.solve(b))
}

/// Partial-pivoted LU for a banded matrix with `kl` sub- and `ku` super-diagonals.
///
/// Storage keeps `kl + ku` super-diagonals per row so that row interchanges
/// have room for fill-in. Cost is `O(n kl (kl + ku))`.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    // row i holds columns i - kl ..= i + kl + ku, offset by kl
    band: Vec<C64>,
    // row interchanged with row k at elimination step k
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn new(a: &ComplexMatrix, kl: usize, ku: usize) -> Result<Self, LinalgError> {
        let n = a.rows();
        let threshold = SINGULAR_RTOL * a.norm_inf();
        Self::factor_with(n, kl, ku, threshold, |i, j| a[(i, j)])
    }

    /// Factors `shift * I - A` without forming the shifted dense matrix.
    pub fn shifted(a: &ComplexMatrix, kl: usize, ku: usize, shift: C64) -> Result<Self, LinalgError> {
        Self::shifted_with_norm(a, kl, ku, shift, a.norm_inf())
    }

    fn shifted_with_norm(a: &ComplexMatrix, kl: usize, ku: usize, shift: C64, norm: f64) -> Result<Self, LinalgError> {
        let n = a.rows();
        let threshold = SINGULAR_RTOL * (norm + shift.norm());
        Self::factor_with(n, kl, ku, threshold, |i, j| {
            if i == j {
                shift - a[(i, j)]
            } else {
                -a[(i, j)]
            }
        })
    }

    fn factor_with(
        n: usize,
        kl: usize,
        ku: usize,
        threshold: f64,
        entry: impl Fn(usize, usize) -> C64,
    ) -> Result<Self, LinalgError> {
        let width = 2 * kl + ku + 1;
        let mut band = vec![C64::new(0.0, 0.0); n * width];
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                band[i * width + (j + kl - i)] = entry(i, j);
            }
        }
        let mut pivots: Vec<usize> = (0..n).collect();
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut pmag = band[at(k, k)].norm();
            for i in k + 1..=last {
                let m = band[at(i, k)].norm();
                if m > pmag {
                    p = i;
                    pmag = m;
                }
            }
            if pmag <= threshold || pmag == 0.0 {
                return Err(LinalgError::Singular { column: k, pivot: pmag });
            }
            let jmax = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    band.swap(at(k, j), at(p, j));
                }
                pivots[k] = p;
            }
            let inv = band[at(k, k)].inv();
            for i in k + 1..=last {
                let l = band[at(i, k)] * inv;
                band[at(i, k)] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=jmax {
                    let u = band[at(k, j)];
                    band[at(i, j)] -= l * u;
                }
            }
        }
        Ok(Self {
            n,
            kl,
            width,
            band,
            pivots,
        })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let (n, kl, w) = (self.n, self.kl, self.width);
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk == C64::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.band[i * w + (k + kl - i)] * xk;
            }
        }
        let ku_total = w - kl - 1;
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + ku_total).min(n - 1) {
                s -= self.band[i * w + (j + kl - i)] * x[j];
            }
            x[i] = s / self.band[i * w + kl];
        }
        x
    }
}

/// Repeated solves of `(shift I - A) x = b` for many shifts, choosing a banded
/// factorization when the bandwidth is small compared to the dimension.
#[derive(Clone, Debug)]
pub struct ShiftedSolver<'a> {
    a: &'a ComplexMatrix,
    band: Option<(usize, usize)>,
    norm: f64,
}

impl<'a> ShiftedSolver<'a> {
    pub fn new(a: &'a ComplexMatrix) -> Self {
        let (kl, ku) = a.bandwidths();
        let n = a.rows();
        let band = if 4 * (kl + ku + 1) < n { Some((kl, ku)) } else { None };
        Self { a, band, norm: a.norm_inf() }
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn is_banded(&self) -> bool {
        self.band.is_some()
    }

    pub fn solve(&self, shift: C64, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
        match self.band {
            Some((kl, ku)) => Ok(BandedLu::shifted_with_norm(self.a, kl, ku, shift, self.norm)?.solve(b)),
            None => {
                let m = self.a.scale(C64::new(-1.0, 0.0)).shifted(-shift);
                lu_solve(&m, b)
            }
        }
    }
}
