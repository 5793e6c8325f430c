mod common;

use common::*;
use mmes_core::measures::{fully_entangled_fraction, optimal_teleport_fidelity, FefOptions};
use mmes_core::mmes::is_mmes;
use mmes_core::qmat::{
    hermitian_eig, re, seeded_rng, BipartiteShape, DensityMatrix, PureState, Subsystem,
};
use mmes_core::teleport::{
    bell_expansion_residual, mmes_resource_state, record_discarded_state, simulate_mmes_teleport,
    simulate_standard_teleport,
};
use mmes_core::weyl::{bell_dd, WeylIndex};

fn werner(p: f64) -> DensityMatrix {
    let phi = bell_dd(WeylIndex::new(0, 0, 2).unwrap()).to_density();
    let mixed = DensityMatrix::maximally_mixed(phi.shape());
    let m = &phi.matrix().scale_real(p) + &mixed.matrix().scale_real(1.0 - p);
    DensityMatrix::new(phi.shape(), m).unwrap()
}

#[test]
fn resource_structure() {
    let chi = mmes_resource_state(2).unwrap();
    assert_eq!(chi.shape(), BipartiteShape { da: 4, db: 2 });
    let eig = hermitian_eig(chi.matrix()).unwrap();
    assert!((eig.values[0] - 0.5).abs() < 1e-12 && (eig.values[1] - 0.5).abs() < 1e-12);
    assert!(eig.values[2].abs() < 1e-12);
    let cert = is_mmes(&mmes_resource_state(3).unwrap(), Subsystem::B, 1e-8);
    assert!(cert.verdict && cert.rank == 2);
}

#[test]
fn uniform_superposition_d3() {
    let psi = PureState::normalized(BipartiteShape { da: 3, db: 1 }, vec![re(1.0); 3]).unwrap();
    let outs = simulate_mmes_teleport(&psi).unwrap();
    assert_eq!(outs.len(), 18);
    for o in &outs {
        assert!((o.probability - 1.0 / 18.0).abs() < 1e-12);
        assert!((o.fidelity_after_correction - 1.0).abs() < 1e-10);
    }
}

#[test]
fn discarding_the_record_returns_the_input() {
    let mut rng = seeded_rng(31);
    for d in [2, 3] {
        for _ in 0..20 {
            let psi = single(d, &mut rng);
            let outs = simulate_mmes_teleport(&psi).unwrap();
            assert!(record_discarded_state(&outs).max_abs_diff(&psi.projector()) < 1e-10);
        }
    }
}

#[test]
fn expansion_prefactor_1_over_2d_is_wrong() {
    let mut rng = seeded_rng(32);
    for d in [2, 3] {
        let psi = single(d, &mut rng);
        let dd = (d * d) as f64;
        assert!(bell_expansion_residual(&psi, 1.0 / (2.0 * dd)).unwrap() < 1e-10);
        assert!(bell_expansion_residual(&psi, 1.0 / (2.0 * d as f64)).unwrap() > 1e-3);
    }
}

#[test]
fn standard_protocol_monte_carlo() {
    let mut rng = seeded_rng(33);
    let mixed = DensityMatrix::maximally_mixed(BipartiteShape { da: 2, db: 2 });
    let avg: f64 = (0..100)
        .map(|_| simulate_standard_teleport(&mixed, &single(2, &mut rng)).unwrap())
        .sum::<f64>()
        / 100.0;
    assert!((avg - 0.5).abs() < 0.02, "{avg}");

    let w = werner(0.6);
    let f = fully_entangled_fraction(&w, FefOptions::default(), &mut rng)
        .unwrap()
        .value;
    let expected = optimal_teleport_fidelity(f, 2).unwrap();
    assert!((expected - 0.8).abs() < 1e-9);
    let mut worst = 0.0_f64;
    let avg: f64 = (0..200)
        .map(|_| {
            let v = simulate_standard_teleport(&w, &single(2, &mut rng)).unwrap();
            worst = worst.max(v);
            v
        })
        .sum::<f64>()
        / 200.0;
    assert!((avg - expected).abs() < 0.02, "{avg} vs {expected}");
    assert!(worst < 1.0 - 1e-6);
}

#[test]
fn ideal_standard_protocol() {
    let mut rng = seeded_rng(34);
    let phi = bell_dd(WeylIndex::new(0, 0, 3).unwrap()).to_density();
    for _ in 0..10 {
        let f = simulate_standard_teleport(&phi, &single(3, &mut rng)).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }
}
