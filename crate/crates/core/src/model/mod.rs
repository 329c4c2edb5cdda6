//! Model parameterizations and dense Hamiltonian builders.
//!
//! Sites are ordered `1A, 1B, 2A, 2B, …` for ladders and non-dissipative
//! sites first for general models.

mod general;
mod ladder;

pub use general::{build_general, GeneralModel};
pub use ladder::{build_bloch, build_ladder, form_factor, site_index, BlochMatrix, LadderParams};
pub(crate) use ladder::bloch_at;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::densela::{vec_norm, ComplexMatrix, Eigensolver, LinalgError, RESIDUAL_TOL};

/// Name of the generator behind [`LossSpec::Random`], recorded in run metadata.
pub const LOSS_PRNG: &str = "ChaCha8Rng (rand_chacha 0.3) seed_from_u64, gen_range(low..high)";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("block `{block}` is not Hermitian (max defect {defect:.3e})")]
    NotHermitian { block: String, defect: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    #[serde(rename = "obc")]
    Open,
    #[serde(rename = "pbc")]
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sublattice {
    A = 0,
    B = 1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteClass {
    Hermitian,
    Dissipative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteLabel {
    Ladder { cell: usize, sub: Sublattice },
    General { class: SiteClass, index: usize },
}

/// A built Hamiltonian together with its site labels.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    matrix: ComplexMatrix,
    sites: Vec<SiteLabel>,
    dissipative: Vec<bool>,
}

impl HamiltonianMatrix {
    pub(crate) fn new(matrix: ComplexMatrix, sites: Vec<SiteLabel>, dissipative: Vec<bool>) -> Self {
        Self {
            matrix,
            sites,
            dissipative,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn sites(&self) -> &[SiteLabel] {
        &self.sites
    }

    pub fn index_of(&self, label: SiteLabel) -> Option<usize> {
        self.sites.iter().position(|s| *s == label)
    }

    pub fn is_dissipative(&self, row: usize) -> bool {
        self.dissipative[row]
    }

    /// `(H + H†)/2`.
    pub fn hermitian_part(&self) -> ComplexMatrix {
        self.matrix.add(&self.matrix.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// `-(i/2)(H − H†)`, which is `-diag(γ)` for onsite loss.
    pub fn loss_part(&self) -> ComplexMatrix {
        self.matrix
            .sub(&self.matrix.adjoint())
            .scale(C64::new(0.0, -0.5))
    }

    /// Entries coupling two sites of the given dissipativity classes.
    fn block_apply(&self, rows_dissipative: bool, cols_dissipative: bool, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in (0..n).filter(|&i| self.dissipative[i] == rows_dissipative) {
            out[i] = (0..n)
                .filter(|&j| self.dissipative[j] == cols_dissipative)
                .map(|j| self.matrix[(i, j)] * v[j])
                .sum();
        }
        out
    }
}

/// Loss-rate profile over the cells `x = 1..=L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LossSpec {
    Uniform(f64),
    /// `γ_x = slope · x + offset`.
    Linear { slope: f64, offset: f64 },
    /// Independent uniform draws from `[low, high)`.
    Random { low: f64, high: f64, seed: u64 },
    Explicit(Vec<f64>),
}

impl LossSpec {
    pub fn rates(&self, cells: usize) -> Result<Vec<f64>, ModelError> {
        let rates = match self {
            Self::Uniform(g) => vec![*g; cells],
            Self::Linear { slope, offset } => (1..=cells).map(|x| slope * x as f64 + offset).collect(),
            Self::Random { low, high, seed } => {
                if !(low < high) {
                    return Err(ModelError::Invalid(format!(
                        "random loss range needs low < high, got [{low}, {high})"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..cells).map(|_| rng.gen_range(*low..*high)).collect()
            }
            Self::Explicit(v) => {
                if v.len() != cells {
                    return Err(ModelError::Invalid(format!(
                        "explicit loss profile has {} entries for {cells} cells",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        Ok(rates)
    }
}

/// One eigenpair examined by [`verify_dark_modes`].
#[derive(Clone, Debug)]
pub struct DarkModeEntry {
    pub energy: C64,
    /// Total probability on dissipative sites of the unit eigenvector.
    pub dissipative_weight: f64,
    /// `‖(H_h − E)ψ‖`
    pub hermitian_residual: f64,
    /// `‖H_inter ψ‖`
    pub inter_residual: f64,
    pub eigen_residual: f64,
}

#[derive(Clone, Debug)]
pub struct DarkModeReport {
    pub tol: f64,
    pub entries: Vec<DarkModeEntry>,
    pub passed: bool,
    /// Some examined eigenvector failed the eigensolver residual contract.
    pub defective_warning: bool,
}

/// Checks that every eigenstate with `|Im E| < tol` lives on the non-dissipative
/// sites, is an eigenstate of `H_h` and satisfies `H_inter ψ = 0`.
pub fn verify_dark_modes(h: &HamiltonianMatrix, tol: f64) -> Result<DarkModeReport, ModelError> {
    let solver = Eigensolver::new(h.matrix())?;
    let chosen: Vec<usize> = solver
        .values()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.im.abs() < tol)
        .map(|(i, _)| i)
        .collect();
    let mut entries = Vec::with_capacity(chosen.len());
    for pair in solver.pairs(&chosen) {
        let psi = &pair.vector;
        let weight: f64 = psi
            .iter()
            .enumerate()
            .filter(|(i, _)| h.is_dissipative(*i))
            .map(|(_, z)| z.norm_sqr())
            .sum();
        let hh = h.block_apply(false, false, psi);
        let herm: Vec<C64> = hh.iter().zip(psi).map(|(a, b)| a - pair.value * b).collect();
        let mut inter = h.block_apply(true, false, psi);
        for (o, x) in inter.iter_mut().zip(h.block_apply(false, true, psi)) {
            *o += x;
        }
        entries.push(DarkModeEntry {
            energy: pair.value,
            dissipative_weight: weight,
            hermitian_residual: vec_norm(&herm),
            inter_residual: vec_norm(&inter),
            eigen_residual: pair.residual,
        });
    }
    let passed = entries
        .iter()
        .all(|e| e.hermitian_residual < tol && e.inter_residual < tol);
    let defective_warning = entries.iter().any(|e| !(e.eigen_residual <= RESIDUAL_TOL));
    Ok(DarkModeReport {
        tol,
        entries,
        passed,
        defective_warning,
    })
}

#[cfg(test)]
pub(crate) mod tests;
