mod common;

use common::*;
use mmes_core::qmat::{
    haar_random_state, hermitian_eig, partial_transpose_op, schmidt_decompose, seeded_rng,
    tensor_product, BipartiteShape, Subsystem,
};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = usize> {
    2usize..=4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_is_associative_and_multiplies_traces(
        seed in any::<u64>(), a in dims(), b in dims(), c in dims()
    ) {
        let mut rng = seeded_rng(seed);
        let x = random_matrix(a, a, &mut rng);
        let y = random_matrix(b, b, &mut rng);
        let z = random_matrix(c, c, &mut rng);
        let left = tensor_product(&tensor_product(&x, &y), &z);
        let right = tensor_product(&x, &tensor_product(&y, &z));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
        let tr = tensor_product(&x, &y).trace();
        prop_assert!((tr - x.trace() * y.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_traces_are_unit_trace(seed in any::<u64>(), da in dims(), db in dims()) {
        let mut rng = seeded_rng(seed);
        let rho = random_density(BipartiteShape { da, db }, &mut rng);
        for side in [Subsystem::A, Subsystem::B] {
            prop_assert!((rho.partial_trace(side).trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_transpose_is_involution(seed in any::<u64>(), da in dims(), db in dims()) {
        let mut rng = seeded_rng(seed);
        let shape = BipartiteShape { da, db };
        let rho = random_density(shape, &mut rng);
        for side in [Subsystem::A, Subsystem::B] {
            let once = rho.partial_transpose(side);
            let twice = partial_transpose_op(&once, shape, side).unwrap();
            prop_assert_eq!(twice.as_slice(), rho.matrix().as_slice());
        }
    }

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = seeded_rng(seed);
        let h = random_hermitian(n, &mut rng);
        let e = hermitian_eig(&h).unwrap();
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - h.trace().re).abs() < 1e-10);
        prop_assert!(e.vectors.unitarity_deviation() < 1e-10);
    }

    #[test]
    fn schmidt_coefficients_are_local_unitary_invariant(
        seed in any::<u64>(), da in dims(), db in 2usize..=6
    ) {
        let mut rng = seeded_rng(seed);
        let shape = BipartiteShape { da, db };
        let psi = haar_random_state(shape, &mut rng);
        let (ua, ub) = local_pair(shape, &mut rng);
        let moved = apply_local(&psi, &ua, &ub);
        let c1 = sorted(schmidt_decompose(&psi).coefficients);
        let c2 = sorted(schmidt_decompose(&moved).coefficients);
        prop_assert_eq!(c1.len(), c2.len());
        for (x, y) in c1.iter().zip(&c2) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }
}
