use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;

use super::*;
use crate::densela::{eigendecompose, max_imag};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest distance in a greedy nearest-neighbour pairing of two multisets.
pub(crate) fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |m, cur| if cur.1 < m.1 { cur } else { m });
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn bloch_union(p: &LadderParams) -> Vec<C64> {
    (0..p.cells)
        .flat_map(|j| {
            let k = 2.0 * PI * j as f64 / p.cells as f64;
            build_bloch(p, k).unwrap().eigenvalues()
        })
        .collect()
}

#[test]
fn decoupled_dimers() {
    let p = LadderParams::uniform(2, vec![0.3], 0.0, 0.0, 0.5, Boundary::Open);
    let h = build_ladder(&p).unwrap();
    let m = h.matrix();
    for x in 1..=2 {
        let (a, b) = (site_index(x, Sublattice::A), site_index(x, Sublattice::B));
        assert_eq!(m[(b, a)], c(0.3, 0.0));
        assert_eq!(m[(a, b)], c(0.3, 0.0));
        assert_eq!(m[(b, b)], c(0.0, -0.5));
        assert_eq!(m[(a, a)], c(0.0, 0.0));
    }
    assert_eq!(m[(0, 2)], c(0.0, 0.0));
    assert_eq!(m[(1, 3)], c(0.0, 0.0));
}

#[test]
fn rejects_bad_parameters() {
    let mut p = LadderParams::uniform(4, vec![0.3, 0.5, 0.1], 0.5, 0.0, 0.5, Boundary::Open);
    assert!(matches!(build_ladder(&p), Err(ModelError::Invalid(_))));
    p.hoppings = vec![0.3, 0.5];
    p.loss[2] = -0.1;
    assert!(build_ladder(&p).is_err());
    p.loss = vec![0.5; 3];
    assert!(build_ladder(&p).is_err());
    let q = LadderParams::uniform(1, vec![0.3], 0.5, 0.0, 0.5, Boundary::Open);
    assert!(build_ladder(&q).is_err());
}

#[test]
fn bloch_entries() {
    let p = LadderParams::uniform(10, vec![0.3, 0.5], 0.5, FRAC_PI_2, 0.5, Boundary::Periodic);
    let b = build_bloch(&p, 0.0).unwrap();
    assert!((b.entries[0][1].re - 0.8).abs() < 1e-15);
    assert!(b.entries[0][0].re.abs() < 1e-15);
    assert!((b.trace() - c(0.0, -0.5)).norm() < 1e-15);
    let hx = form_factor(&[0.3, 0.5, 0.1], PI);
    assert!((hx + 0.1).abs() < 1e-15);
}

#[test]
fn bloch_rejects_nonuniform_loss() {
    let p = LadderParams::uniform(10, vec![0.3, 0.5], 0.5, FRAC_PI_2, 0.5, Boundary::Periodic);
    let q = p.with_loss((1..=10).map(|x| 0.01 * x as f64 + 0.2).collect());
    assert!(build_bloch(&q, 0.0).is_err());
}

#[test]
fn bloch_at_connection_root_has_real_eigenvalue() {
    let p = LadderParams::uniform(10, vec![0.3, 0.5], 0.5, FRAC_PI_2, 0.5, Boundary::Periodic);
    let k = (-0.6f64).acos();
    let ev = build_bloch(&p, k).unwrap().eigenvalues();
    let hy = 0.5 * (k - FRAC_PI_2).cos();
    let closest = |target: C64| ev.iter().map(|e| (e - target).norm()).fold(f64::INFINITY, f64::min);
    assert!(closest(c(hy, 0.0)) < 1e-12);
    assert!(closest(c(-hy, -0.5)) < 1e-12);
    assert!((hy - 0.4).abs() < 1e-12);
}

#[test]
fn periodic_spectrum_is_union_of_bloch_spectra() {
    for (t, phase) in [(vec![0.3, 0.5], FRAC_PI_2), (vec![0.3, 0.5, 0.2], 0.7), (vec![0.6, 0.5], 0.0)] {
        let p = LadderParams::uniform(24, t, 0.5, phase, 0.5, Boundary::Periodic);
        let real = eigendecompose(build_ladder(&p).unwrap().matrix(), false).unwrap();
        assert!(multiset_distance(&real.eigenvalues, &bloch_union(&p)) < 1e-9);
    }
}

#[test]
fn commensurate_ring_has_exact_igc_eigenvalues() {
    // t0 = 0 puts the connection roots at k = π/2, 3π/2, on the grid of L = 200
    let p = LadderParams::uniform(200, vec![0.0, 0.5], 0.5, FRAC_PI_2, 0.5, Boundary::Periodic);
    let spec = eigendecompose(build_ladder(&p).unwrap().matrix(), false).unwrap();
    for target in [0.5, -0.5] {
        let d = spec
            .eigenvalues
            .iter()
            .map(|e| (e - c(target, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-10, "{target}: {d}");
    }
    assert!(max_imag(&spec).unwrap().abs() < 1e-10);
}

#[test]
fn incommensurate_ring_only_approaches_igc_energy() {
    // arccos(-0.6)/2π is irrational, so no finite ring holds the exact dark state
    let p = LadderParams::uniform(200, vec![0.3, 0.5], 0.5, FRAC_PI_2, 0.5, Boundary::Periodic);
    let spec = eigendecompose(build_ladder(&p).unwrap().matrix(), false).unwrap();
    let top = max_imag(&spec).unwrap();
    assert!(top < -1e-6 && top > -1e-3, "{top}");
}

#[test]
fn plane_wave_residual_on_commensurate_ring() {
    let l = 201;
    let (t0, t1) = (0.25, 0.5);
    let p = LadderParams::uniform(l, vec![t0, t1], 0.5, 0.4, 0.5, Boundary::Periodic);
    let h = build_ladder(&p).unwrap();
    for k in [2.0 * PI / 3.0, 4.0 * PI / 3.0] {
        assert!(form_factor(&p.hoppings, k).abs() < 1e-15);
        let mut psi = vec![c(0.0, 0.0); 2 * l];
        for x in 1..=l {
            psi[site_index(x, Sublattice::A)] = C64::from_polar(1.0 / (l as f64).sqrt(), k * x as f64);
        }
        let e = 0.5 * (k - 0.4).cos();
        let hpsi = h.matrix().matvec(&psi);
        let r: f64 = hpsi.iter().zip(&psi).map(|(a, b)| (a - e * b).norm_sqr()).sum::<f64>().sqrt();
        assert!(r < 1e-9, "{r}");
    }
}

#[test]
fn general_block_diagonal_spectrum() {
    let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(-0.5, 0.0)]).unwrap();
    let b = ComplexMatrix::from_vec(2, 2, vec![c(0.3, 0.0), c(0.0, 0.4), c(0.0, -0.4), c(0.1, 0.0)]).unwrap();
    let g = GeneralModel {
        a: a.clone(),
        b: b.clone(),
        c: ComplexMatrix::zeros(2, 2),
        gamma: vec![0.7, 0.2],
    };
    let h = build_general(&g).unwrap();
    let mut expect = eigendecompose(&a, false).unwrap().eigenvalues;
    let nh = b.sub(&ComplexMatrix::from_diag(&[c(0.0, 0.7), c(0.0, 0.2)]));
    expect.extend(eigendecompose(&nh, false).unwrap().eigenvalues);
    let got = eigendecompose(h.matrix(), false).unwrap().eigenvalues;
    assert!(multiset_distance(&got, &expect) < 1e-12);
    let herm = h.hermitian_part();
    assert!(herm.hermitian_defect() < 1e-15);
}

#[test]
fn general_rejects_non_hermitian_blocks() {
    let g = GeneralModel {
        a: ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.2, 0.0), c(0.3, 0.0), c(0.0, 0.0)]).unwrap(),
        b: ComplexMatrix::zeros(1, 1),
        c: ComplexMatrix::zeros(1, 2),
        gamma: vec![1.0],
    };
    assert!(matches!(build_general(&g), Err(ModelError::NotHermitian { .. })));
}

#[test]
fn ladder_as_general_model_is_a_permutation() {
    let p = LadderParams::uniform(7, vec![0.3, 0.5, 0.1], 0.5, 1.1, 0.5, Boundary::Periodic)
        .with_loss((1..=7).map(|x| 0.1 * x as f64).collect());
    let lad = build_ladder(&p).unwrap();
    let gen = build_general(&p.to_general().unwrap()).unwrap();
    let l = p.cells;
    // general order: 1A..LA, 1B..LB
    let perm = |g: usize| if g < l { site_index(g + 1, Sublattice::A) } else { site_index(g - l + 1, Sublattice::B) };
    for i in 0..2 * l {
        for j in 0..2 * l {
            assert!((gen.matrix()[(i, j)] - lad.matrix()[(perm(i), perm(j))]).norm() < 1e-15);
        }
    }
}

#[test]
fn random_general_model_is_dissipative() {
    let mut s = 17u64;
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
        ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let r = ComplexMatrix::from_fn(5, 5, |_, _| c(next(), next()));
    let a = r.add(&r.adjoint());
    let cpl = ComplexMatrix::from_fn(1, 5, |_, _| c(next(), next()));
    let g = GeneralModel {
        a,
        b: ComplexMatrix::from_diag(&[c(next(), 0.0)]),
        c: cpl,
        gamma: vec![1.0],
    };
    let h = build_general(&g).unwrap();
    let spec = eigendecompose(h.matrix(), false).unwrap();
    assert!(max_imag(&spec).unwrap() <= 1e-12);
}

#[test]
fn dark_modes_on_commensurate_ring() {
    let p = LadderParams::uniform(200, vec![0.0, 0.5], 0.5, FRAC_PI_2, 0.5, Boundary::Periodic);
    let report = verify_dark_modes(&build_ladder(&p).unwrap(), 1e-6).unwrap();
    assert_eq!(report.entries.len(), 2, "{:?}", report.entries);
    assert!(report.passed);
    for e in &report.entries {
        assert!(e.dissipative_weight < 1e-8, "{e:?}");
        assert!((e.energy.re.abs() - 0.5).abs() < 1e-10);
    }
}

#[test]
fn dark_modes_vacuous_without_real_eigenvalues() {
    let p = LadderParams::uniform(6, vec![0.6, 0.5], 0.5, FRAC_PI_2, 0.5, Boundary::Periodic);
    let report = verify_dark_modes(&build_ladder(&p).unwrap(), 1e-6).unwrap();
    assert!(report.entries.is_empty());
    assert!(report.passed);
}

#[test]
fn open_ladder_has_no_igc_states() {
    let p = LadderParams::uniform(200, vec![0.3, 0.5], 0.5, FRAC_PI_2, 0.5, Boundary::Open);
    let spec = eigendecompose(build_ladder(&p).unwrap().matrix(), false).unwrap();
    assert!(spec.eigenvalues.iter().all(|e| e.im.abs() >= 1e-6));
    assert!(max_imag(&spec).unwrap() < -1e-3);
}

#[test]
fn general_model_dark_mode() {
    // a single h-site decoupled from the lossy site by destructive interference
    let a = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let g = GeneralModel {
        a,
        b: ComplexMatrix::zeros(1, 1),
        c: ComplexMatrix::from_vec(1, 2, vec![c(0.5, 0.0), c(-0.5, 0.0)]).unwrap(),
        gamma: vec![0.8],
    };
    let report = verify_dark_modes(&build_general(&g).unwrap(), 1e-8).unwrap();
    assert_eq!(report.entries.len(), 1);
    assert!((report.entries[0].energy - c(1.0, 0.0)).norm() < 1e-10);
    assert!(report.passed && !report.defective_warning);
}

#[test]
fn loss_profiles() {
    assert_eq!(LossSpec::Uniform(0.5).rates(3).unwrap(), vec![0.5; 3]);
    let lin = LossSpec::Linear { slope: 0.01, offset: 0.2 }.rates(200).unwrap();
    assert!((lin[0] - 0.21).abs() < 1e-15 && (lin[199] - 2.2).abs() < 1e-12);
    let spec = LossSpec::Random { low: 0.4, high: 0.6, seed: 5 };
    let r = spec.rates(200).unwrap();
    assert_eq!(r, spec.rates(200).unwrap());
    assert!(r.iter().all(|g| (0.4..0.6).contains(g)));
    assert_ne!(r, LossSpec::Random { low: 0.4, high: 0.6, seed: 6 }.rates(200).unwrap());
    assert!(LossSpec::Explicit(vec![1.0]).rates(2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn built_matrices_have_diagonal_loss_and_decay(
        cells in 6usize..24,
        t in prop::collection::vec(-1.0f64..1.0, 1..3),
        intra in -1.0f64..1.0,
        phase in 0.0f64..TAU,
        seed in any::<u64>(),
        periodic in any::<bool>(),
    ) {
        let bc = if periodic { Boundary::Periodic } else { Boundary::Open };
        let loss = LossSpec::Random { low: 0.0, high: 1.0, seed }.rates(cells).unwrap();
        let p = LadderParams { cells, hoppings: t, intra, phase, loss: loss.clone(), boundary: bc };
        let h = build_ladder(&p).unwrap();
        let anti = h.loss_part();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let expect = if i == j && i % 2 == 1 { c(-loss[i / 2], 0.0) } else { c(0.0, 0.0) };
                prop_assert!((anti[(i, j)] - expect).norm() < 1e-15);
            }
        }
        let spec = eigendecompose(h.matrix(), false).unwrap();
        prop_assert!(max_imag(&spec).unwrap() <= 1e-10 * h.matrix().norm_fro());
    }

    #[test]
    fn bloch_consistency(
        cells in 6usize..20,
        t in prop::collection::vec(-1.0f64..1.0, 1..3),
        intra in -1.0f64..1.0,
        phase in 0.0f64..TAU,
        gamma in 0.0f64..1.0,
    ) {
        let p = LadderParams::uniform(cells, t, intra, phase, gamma, Boundary::Periodic);
        let real = eigendecompose(build_ladder(&p).unwrap().matrix(), false).unwrap();
        prop_assert!(multiset_distance(&real.eigenvalues, &bloch_union(&p)) < 1e-9);
    }
}
