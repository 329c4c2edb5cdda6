use num_complex::Complex64 as C64;

use super::{HamiltonianMatrix, LadderParams, ModelError, SiteClass, SiteLabel, Sublattice};
use crate::densela::ComplexMatrix;

const HERMITIAN_TOL: f64 = 1e-12;

/// Arbitrary dissipative graph: Hermitian blocks on the non-dissipative (`a`)
/// and dissipative (`b`) sites, couplings `c` from non-dissipative to
/// dissipative sites, and a positive loss rate per dissipative site.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralModel {
    /// `n_h × n_h`, Hermitian.
    pub a: ComplexMatrix,
    /// `n_d × n_d`, Hermitian part of the dissipative block.
    pub b: ComplexMatrix,
    /// `n_d × n_h`, entry `(i, j)` couples `(h, j)` into `(nh, i)`.
    pub c: ComplexMatrix,
    pub gamma: Vec<f64>,
}

impl GeneralModel {
    pub fn n_h(&self) -> usize {
        self.a.rows()
    }

    pub fn n_d(&self) -> usize {
        self.b.rows()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let (nh, nd) = (self.a.rows(), self.b.rows());
        if !self.a.is_square() || !self.b.is_square() {
            return Err(ModelError::Invalid("a and b blocks must be square".into()));
        }
        if self.c.rows() != nd || self.c.cols() != nh {
            return Err(ModelError::Invalid(format!(
                "coupling block must be {nd}x{nh}, got {}x{}",
                self.c.rows(),
                self.c.cols()
            )));
        }
        if self.gamma.len() != nd {
            return Err(ModelError::Invalid(format!(
                "{} loss rates for {nd} dissipative sites",
                self.gamma.len()
            )));
        }
        if let Some(g) = self.gamma.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(ModelError::Invalid(format!("loss rates must be positive, got {g}")));
        }
        for (name, m) in [("a", &self.a), ("b", &self.b)] {
            let defect = m.hermitian_defect();
            if defect > HERMITIAN_TOL {
                return Err(ModelError::NotHermitian {
                    block: name.into(),
                    defect,
                });
            }
        }
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) {
            return Err(ModelError::Invalid("matrix blocks must be finite".into()));
        }
        Ok(())
    }
}

/// Assembles `H = H_h + H_nh + H_inter` with the non-dissipative sites first.
pub fn build_general(g: &GeneralModel) -> Result<HamiltonianMatrix, ModelError> {
    g.validate()?;
    let (nh, nd) = (g.n_h(), g.n_d());
    let n = nh + nd;
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..nh {
        for j in 0..nh {
            h[(i, j)] = g.a[(i, j)];
        }
    }
    for i in 0..nd {
        for j in 0..nd {
            h[(nh + i, nh + j)] = g.b[(i, j)];
        }
        h[(nh + i, nh + i)] -= C64::new(0.0, g.gamma[i]);
        for j in 0..nh {
            h[(nh + i, j)] = g.c[(i, j)];
            h[(j, nh + i)] = g.c[(i, j)].conj();
        }
    }
    let sites = (0..nh)
        .map(|i| SiteLabel::General { class: SiteClass::Hermitian, index: i })
        .chain((0..nd).map(|i| SiteLabel::General { class: SiteClass::Dissipative, index: i }))
        .collect();
    let dissipative = (0..n).map(|i| i >= nh).collect();
    Ok(HamiltonianMatrix::new(h, sites, dissipative))
}

impl LadderParams {
    /// Rewrites the ladder as a general model: A sites non-dissipative, B sites
    /// dissipative, both in cell order. Every loss rate must be positive.
    pub fn to_general(&self) -> Result<GeneralModel, ModelError> {
        let h = super::build_ladder(self)?;
        if self.loss.iter().any(|&g| g <= 0.0) {
            return Err(ModelError::Invalid(
                "general form needs every B site to be lossy".into(),
            ));
        }
        let l = self.cells;
        let idx = |x: usize, s: Sublattice| super::site_index(x, s);
        let m = h.matrix();
        let a = ComplexMatrix::from_fn(l, l, |i, j| m[(idx(i + 1, Sublattice::A), idx(j + 1, Sublattice::A))]);
        let c = ComplexMatrix::from_fn(l, l, |i, j| m[(idx(i + 1, Sublattice::B), idx(j + 1, Sublattice::A))]);
        let b = ComplexMatrix::from_fn(l, l, |i, j| {
            let z = m[(idx(i + 1, Sublattice::B), idx(j + 1, Sublattice::B))];
            if i == j {
                C64::new(z.re, 0.0)
            } else {
                z
            }
        });
        Ok(GeneralModel {
            a,
            b,
            c,
            gamma: self.loss.clone(),
        })
    }
}
