use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Boundary, HamiltonianMatrix, ModelError, SiteLabel, Sublattice};
use crate::densela::ComplexMatrix;

/// Two-leg dissipative ladder: chain A and chain B with intra-chain hopping
/// `intra` carrying the Peierls phase, A-B couplings of range `hoppings.len() - 1`,
/// and one loss rate per unit cell on its B site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderParams {
    /// Number of unit cells `L`.
    pub cells: usize,
    /// A-B amplitudes `t_0, t_1, …, t_n`.
    pub hoppings: Vec<f64>,
    /// Intra-chain amplitude `t_p`.
    pub intra: f64,
    /// Peierls phase `φ` in radians.
    pub phase: f64,
    /// Loss rate `γ_x` of each cell's B site, `x = 1..=L`.
    pub loss: Vec<f64>,
    pub boundary: Boundary,
}

impl LadderParams {
    /// Ladder with the same loss rate on every B site.
    pub fn uniform(
        cells: usize,
        hoppings: Vec<f64>,
        intra: f64,
        phase: f64,
        gamma: f64,
        boundary: Boundary,
    ) -> Self {
        Self {
            cells,
            hoppings,
            intra,
            phase,
            loss: vec![gamma; cells],
            boundary,
        }
    }

    pub fn coupling_range(&self) -> usize {
        self.hoppings.len().saturating_sub(1)
    }

    pub fn dim(&self) -> usize {
        2 * self.cells
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        Self {
            boundary,
            ..self.clone()
        }
    }

    pub fn with_loss(&self, loss: Vec<f64>) -> Self {
        Self {
            loss,
            ..self.clone()
        }
    }

    /// Common loss rate when every cell has the same one.
    pub fn uniform_loss(&self) -> Option<f64> {
        let first = *self.loss.first()?;
        self.loss.iter().all(|&g| g == first).then_some(first)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.cells < 2 {
            return Err(ModelError::Invalid(format!(
                "ladder needs at least 2 cells, got {}",
                self.cells
            )));
        }
        if self.hoppings.is_empty() {
            return Err(ModelError::Invalid("hoppings must list at least t_0".into()));
        }
        let n = self.coupling_range();
        if 2 * n >= self.cells {
            return Err(ModelError::Invalid(format!(
                "coupling range {n} must be below L/2 = {}",
                self.cells as f64 / 2.0
            )));
        }
        if self.loss.len() != self.cells {
            return Err(ModelError::Invalid(format!(
                "{} loss rates given for {} cells",
                self.loss.len(),
                self.cells
            )));
        }
        if !self.hoppings.iter().all(|t| t.is_finite()) || !self.intra.is_finite() || !self.phase.is_finite() {
            return Err(ModelError::Invalid("hopping amplitudes and phase must be finite".into()));
        }
        if let Some((x, g)) = self
            .loss
            .iter()
            .enumerate()
            .find(|(_, g)| !(g.is_finite() && **g >= 0.0))
        {
            return Err(ModelError::Invalid(format!(
                "loss rate at cell {} must be finite and non-negative, got {g}",
                x + 1
            )));
        }
        Ok(())
    }
}

/// Row index of site `(x, sub)` for 1-based cell `x` in the interleaved ordering.
#[inline]
pub fn site_index(x: usize, sub: Sublattice) -> usize {
    2 * (x - 1) + sub as usize
}

/// Real-space ladder Hamiltonian.
///
/// Chain A carries `(t_p/2) e^{iφ} |x+1,A⟩⟨x,A| + h.c.` and chain B the same
/// hop with opposite sign; A-B couplings are `t_0 |x,B⟩⟨x,A|` plus
/// `(t_m/2)(|x+m,B⟩⟨x,A| + |x-m,B⟩⟨x,A|) + h.c.`, and each B site gets `-iγ_x`.
/// Bonds crossing the boundary exist only for periodic boundaries.
pub fn build_ladder(p: &LadderParams) -> Result<HamiltonianMatrix, ModelError> {
    p.validate()?;
    let l = p.cells;
    let periodic = p.boundary == Boundary::Periodic;
    let mut h = ComplexMatrix::zeros(2 * l, 2 * l);
    let mut add_bond = |to: usize, from: usize, amp: C64| {
        h[(to, from)] += amp;
        h[(from, to)] += amp.conj();
    };
    let a = |x: usize| site_index(x, Sublattice::A);
    let b = |x: usize| site_index(x, Sublattice::B);
    // cell arithmetic on 1..=L, wrapping only when periodic
    let shift = |x: usize, d: isize| -> Option<usize> {
        let y = x as isize + d;
        if (1..=l as isize).contains(&y) {
            Some(y as usize)
        } else if periodic {
            Some((y - 1).rem_euclid(l as isize) as usize + 1)
        } else {
            None
        }
    };
    let chain = C64::from_polar(p.intra / 2.0, p.phase);
    for x in 1..=l {
        if let Some(y) = shift(x, 1) {
            add_bond(a(y), a(x), chain);
            add_bond(b(y), b(x), -chain);
        }
        add_bond(b(x), a(x), C64::new(p.hoppings[0], 0.0));
        for (m, &tm) in p.hoppings.iter().enumerate().skip(1) {
            let amp = C64::new(tm / 2.0, 0.0);
            for d in [m as isize, -(m as isize)] {
                if let Some(y) = shift(x, d) {
                    add_bond(b(y), a(x), amp);
                }
            }
        }
    }
    for x in 1..=l {
        h[(b(x), b(x))] += C64::new(0.0, -p.loss[x - 1]);
    }
    let sites = (1..=l)
        .flat_map(|x| {
            [
                SiteLabel::Ladder { cell: x, sub: Sublattice::A },
                SiteLabel::Ladder { cell: x, sub: Sublattice::B },
            ]
        })
        .collect();
    let dissipative = (0..2 * l).map(|i| i % 2 == 1 && p.loss[i / 2] > 0.0).collect();
    Ok(HamiltonianMatrix::new(h, sites, dissipative))
}

/// `h_x(k) = Σ_m t_m cos(mk)`, the A-B form factor (also the connection function).
pub fn form_factor(hoppings: &[f64], k: f64) -> f64 {
    hoppings
        .iter()
        .enumerate()
        .map(|(m, t)| t * (m as f64 * k).cos())
        .sum()
}

/// 2×2 Bloch Hamiltonian of a uniform-loss ladder, A in the upper component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochMatrix {
    pub k: f64,
    pub entries: [[C64; 2]; 2],
}

impl BlochMatrix {
    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Both eigenvalues, `(-iγ/2 + s, -iγ/2 - s)` with `s` the principal root.
    pub fn eigenvalues(&self) -> [C64; 2] {
        let [[a, b], [c, d]] = self.entries;
        let mean = (a + d) * 0.5;
        let half = (a - d) * 0.5;
        let s = (half * half + b * c).sqrt();
        [mean + s, mean - s]
    }
}

/// `H(k) = h_x σ_x + (h_y + iγ/2) σ_z − i(γ/2) I` with `h_y = t_p cos(k − φ)`.
pub fn build_bloch(p: &LadderParams, k: f64) -> Result<BlochMatrix, ModelError> {
    let gamma = p.uniform_loss().ok_or_else(|| {
        ModelError::Invalid("Bloch form needs a uniform loss rate; this ladder breaks translation symmetry".into())
    })?;
    Ok(bloch_at(&p.hoppings, p.intra, p.phase, gamma, k))
}

pub(crate) fn bloch_at(hoppings: &[f64], intra: f64, phase: f64, gamma: f64, k: f64) -> BlochMatrix {
    let hx = C64::new(form_factor(hoppings, k), 0.0);
    let hy = intra * (k - phase).cos();
    BlochMatrix {
        k,
        entries: [
            [C64::new(hy, 0.0), hx],
            [hx, C64::new(-hy, -gamma)],
        ],
    }
}
