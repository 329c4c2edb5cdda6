//! Dense complex linear algebra: storage, LU solves (dense and banded),
//! Hessenberg/QR eigenvalues with inverse-iteration eigenvectors, and the
//! matrix exponential used by the small reference propagators.

mod eigen;
mod lu;
mod matrix;

pub use eigen::{eigendecompose, max_imag, EigenPair, Eigensolver, Spectrum, RESIDUAL_TOL};
pub use lu::{lu_solve, BandedLu, LuFactor, ShiftedSolver, SINGULAR_RTOL};
pub use matrix::{dot_conj, vec_norm, ComplexMatrix, RowCompressed};

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular to working precision (column {column}, pivot {pivot:.3e})")]
    Singular { column: usize, pivot: f64 },
    #[error("QR iteration stalled on block rows {}..={} after {sweeps} sweeps", block.0, block.1)]
    NoConvergence { block: (usize, usize), sweeps: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("empty spectrum")]
    Empty,
    #[error("matrix text: {0}")]
    Parse(String),
}

/// `exp(A)` by scaling and squaring with a degree-18 Taylor polynomial.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Shape("expm needs a square matrix".into()));
    }
    let norm = a.norm_one();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
    let n = a.rows();
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=18 {
        term = term.matmul(&scaled).scale(C64::new(1.0 / k as f64, 0.0));
        result = result.add(&term);
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pseudo_random(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, -1.0)];
        let x = lu_solve(&ComplexMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_solve() {
        let a = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(0.0, -1.0)]);
        let x = lu_solve(&a, &[c(2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        assert!(matches!(lu_solve(&a, &[c(1.0, 0.0); 2]), Err(LinalgError::Singular { .. })));
    }

    #[test]
    fn banded_matches_dense() {
        let n = 30;
        let full = pseudo_random(n, 3);
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            if i <= j + 2 && j <= i + 3 {
                full[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert_eq!(a.bandwidths(), (2, 3));
        let b: Vec<C64> = (0..n).map(|i| c(i as f64, 1.0)).collect();
        let dense = lu_solve(&a, &b).unwrap();
        let band = BandedLu::new(&a, 2, 3).unwrap().solve(&b);
        for (x, y) in dense.iter().zip(&band) {
            assert!((x - y).norm() < 1e-10 * (1.0 + x.norm()));
        }
        let shift = c(0.3, 0.7);
        let shifted = ShiftedSolver::new(&a).solve(shift, &b).unwrap();
        let m = a.scale(c(-1.0, 0.0)).shifted(-shift);
        let r = m.matvec(&shifted);
        for (x, y) in r.iter().zip(&b) {
            assert!((x - y).norm() < 1e-10 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn swap_matrix_eigenvalues() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let mut ev = eigendecompose(&a, true).unwrap();
        assert!(!ev.condition_flag);
        ev.eigenvalues.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((ev.eigenvalues[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((ev.eigenvalues[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_is_flagged() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let ev = eigendecompose(&a, true).unwrap();
        assert_eq!(ev.eigenvalues, vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(ev.condition_flag);
    }

    #[test]
    fn degenerate_normal_matrix_not_flagged() {
        let a = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let ev = eigendecompose(&a, true).unwrap();
        assert!(!ev.condition_flag, "{:?}", ev.residuals);
    }

    #[test]
    fn hermitian_max_imag_is_zero() {
        let r = pseudo_random(12, 9);
        let h = r.add(&r.adjoint());
        let ev = eigendecompose(&h, false).unwrap();
        assert!(max_imag(&ev).unwrap().abs() < 1e-12 * h.norm_fro());
    }

    #[test]
    fn empty_spectrum_errors() {
        let s = Spectrum {
            eigenvalues: vec![],
            right_vectors: None,
            residuals: None,
            condition_flag: false,
        };
        assert_eq!(max_imag(&s), Err(LinalgError::Empty));
    }

    #[test]
    fn random_residual_contract() {
        for seed in 0..4 {
            let a = pseudo_random(40, seed);
            let ev = eigendecompose(&a, true).unwrap();
            assert_eq!(ev.len(), 40);
            let res = ev.residuals.unwrap();
            assert!(res.iter().all(|&r| r < RESIDUAL_TOL), "{res:?}");
            assert!(!ev.condition_flag);
        }
    }

    #[test]
    fn expm_of_diagonal() {
        let a = ComplexMatrix::from_diag(&[c(-1.0, 0.5), c(2.0, -3.0)]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - c(-1.0, 0.5).exp()).norm() < 1e-13);
        assert!((e[(1, 1)] - c(2.0, -3.0).exp()).norm() < 1e-12 * c(2.0, -3.0).exp().norm());
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let a = pseudo_random(3, 1);
        let back = ComplexMatrix::from_text(&a.to_text()).unwrap();
        assert_eq!(a, back);
        assert!(ComplexMatrix::from_text("1,0 2\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn trace_and_determinant_reconstructed(n in 2usize..=64, seed in any::<u64>()) {
            let a = pseudo_random(n, seed);
            let ev = eigendecompose(&a, false).unwrap();
            let sum: C64 = ev.eigenvalues.iter().sum();
            prop_assert!((sum - a.trace()).norm() <= 1e-9 * a.norm_fro());
            let prod: C64 = ev.eigenvalues.iter().product();
            let det = LuFactor::new(&a).unwrap().det();
            prop_assert!((prod - det).norm() <= 1e-8 * det.norm());
        }

        #[test]
        fn solve_recovers_rhs(n in 1usize..=40, seed in any::<u64>(), log_cond in 0.0f64..8.0) {
            // D1 U D2 with a graded diagonal pushes the condition number to ~10^log_cond
            let u = pseudo_random(n, seed).add(&ComplexMatrix::identity(n).scale(c(n as f64, 0.0)));
            let grade = |i: usize| 10f64.powf(-log_cond * i as f64 / n.max(2) as f64 / 2.0);
            let a = ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)] * grade(i) * grade(n - 1 - j));
            let b: Vec<C64> = (0..n).map(|i| c((i as f64).sin(), (i as f64).cos())).collect();
            let x = lu_solve(&a, &b).unwrap();
            let r = a.matvec(&x);
            let err: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-10 * vec_norm(&b).max(a.norm_inf() * vec_norm(&x)));
        }
    }
}
