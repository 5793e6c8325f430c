mod common;

use common::*;
use mmes_core::channels::{
    apply_one_sided, apply_one_sided_with, evolution_report, half_weight_swap_channel,
    make_channel, max_entangled_square, rho_p, swap_mixing_channel, TeleportUsability, TraceCheck,
};
use mmes_core::measures::negativity;
use mmes_core::mmes::is_mmes;
use mmes_core::qmat::{
    haar_random_state, haar_random_unitary, hermitian_eig, seeded_rng, BipartiteShape,
    ComplexMatrix, DensityMatrix, PureState, SeededRng, Subsystem,
};
use mmes_core::Error;
use proptest::prelude::*;

/// `k` Kraus operators cut from the first `n` columns of a Haar unitary.
fn random_channel(n: usize, k: usize, rng: &mut SeededRng) -> mmes_core::channels::KrausChannel {
    let u = haar_random_unitary(n * k, rng);
    let ops = (0..k)
        .map(|b| ComplexMatrix::from_fn(n, n, |r, c| u[(b * n + r, c)]))
        .collect();
    make_channel(ops).unwrap()
}

fn separable(shape: BipartiteShape, terms: usize, rng: &mut SeededRng) -> DensityMatrix {
    let sa = BipartiteShape {
        da: shape.da,
        db: 1,
    };
    let sb = BipartiteShape {
        da: shape.db,
        db: 1,
    };
    let products: Vec<PureState> = (0..terms)
        .map(|_| {
            let a = haar_random_state(sa, rng);
            let b = haar_random_state(sb, rng);
            let amps = mmes_core::qmat::tensor_vec(a.amplitudes(), b.amplitudes());
            PureState::new(shape, amps).unwrap()
        })
        .collect();
    let parts: Vec<(f64, &PureState)> = products.iter().map(|p| (1.0 / terms as f64, p)).collect();
    DensityMatrix::mixture(&parts).unwrap()
}

#[test]
fn swap_mixing_channel_fixes_the_even_mixture() {
    let ch = swap_mixing_channel();
    let target = rho_p(0.5).unwrap();
    for p in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let once = apply_one_sided(&ch, &rho_p(p).unwrap(), Subsystem::B).unwrap();
        assert!(once.matrix().max_abs_diff(target.matrix()) < 1e-10);
        let twice = apply_one_sided(&ch, &once, Subsystem::B).unwrap();
        assert!(twice.matrix().max_abs_diff(target.matrix()) < 1e-10);
    }
}

#[test]
fn square_state_after_channel_matches_oracle_spectrum() {
    let out = apply_one_sided(
        &swap_mixing_channel(),
        &max_entangled_square(4).unwrap(),
        Subsystem::B,
    )
    .unwrap();
    let pt = out.partial_transpose(Subsystem::A);
    let vals = hermitian_eig(&pt).unwrap().values;
    let count = |x: f64| vals.iter().filter(|v| (**v - x).abs() < 1e-10).count();
    assert_eq!((count(0.25), count(0.0), count(-0.25)), (6, 8, 2));
    assert!(!is_mmes(&out, Subsystem::A, 1e-8).verdict);
}

#[test]
fn literal_channel_is_rejected_unless_overridden() {
    let ch = half_weight_swap_channel();
    assert!(!ch.trace_preserving());
    assert!((ch.completeness_deviation() - 0.5).abs() < 1e-12);
    let rho = rho_p(0.3).unwrap();
    assert!(matches!(
        apply_one_sided(&ch, &rho, Subsystem::B),
        Err(Error::NotTracePreserving { .. })
    ));
    let forced =
        apply_one_sided_with(&ch, &rho, Subsystem::B, TraceCheck::AllowNonTracePreserving).unwrap();
    assert!((forced.matrix().trace().re - 1.0).abs() < 1e-12);
}

#[test]
fn evolution_of_rho_p_keeps_perfect_teleportation() {
    let rep = evolution_report(&swap_mixing_channel(), &rho_p(0.2).unwrap(), Subsystem::B).unwrap();
    assert!(rep.mmes_before && rep.mmes_after);
    assert!((rep.negativity_after - 0.5).abs() < 1e-10);
    match rep.usability_after {
        TeleportUsability::Mixed {
            d,
            min_corrected_fidelity,
        } => {
            assert_eq!(d, 2);
            assert!(min_corrected_fidelity > 1.0 - 1e-9);
        }
        other => panic!("unexpected {other:?}"),
    }
    let sq = evolution_report(
        &swap_mixing_channel(),
        &max_entangled_square(4).unwrap(),
        Subsystem::B,
    )
    .unwrap();
    match sq.usability_after {
        TeleportUsability::Standard {
            min_average_fidelity,
            ..
        } => assert!(min_average_fidelity < 1.0 - 1e-6),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn trace_preserving_channels_keep_trace_and_hermiticity(
        seed in any::<u64>(), da in 2usize..=3, db in 2usize..=4, k in 1usize..=3
    ) {
        let mut rng = seeded_rng(seed);
        let shape = BipartiteShape { da, db };
        let ch = random_channel(db, k, &mut rng);
        prop_assert!(ch.trace_preserving());
        let rho = random_density(shape, &mut rng);
        let out = apply_one_sided(&ch, &rho, Subsystem::B).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(out.matrix().hermiticity_deviation() < 1e-10);
    }

    #[test]
    fn local_channels_keep_separable_states_unentangled(seed in any::<u64>(), k in 1usize..=3) {
        let mut rng = seeded_rng(seed);
        let shape = BipartiteShape { da: 2, db: 3 };
        let rho = separable(shape, 3, &mut rng);
        let ch = random_channel(3, k, &mut rng);
        let out = apply_one_sided(&ch, &rho, Subsystem::B).unwrap();
        prop_assert!(negativity(&out) < 1e-10);
    }

    #[test]
    fn channel_commutes_with_untouched_side_unitary(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let shape = BipartiteShape { da: 3, db: 2 };
        let rho = random_density(shape, &mut rng);
        let ch = random_channel(2, 2, &mut rng);
        let u = haar_random_unitary(3, &mut rng);
        let id = ComplexMatrix::identity(2);
        let a = apply_one_sided(&ch, &rho.conjugate_local(&u, &id).unwrap(), Subsystem::B).unwrap();
        let b = apply_one_sided(&ch, &rho, Subsystem::B).unwrap().conjugate_local(&u, &id).unwrap();
        prop_assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
    }
}
