#![allow(dead_code)]

use mmes_core::qmat::{
    haar_random_state, haar_random_unitary, BipartiteShape, Complex64, ComplexMatrix,
    DensityMatrix, PureState, SeededRng,
};
use rand::Rng;

pub fn random_matrix(rows: usize, cols: usize, rng: &mut SeededRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let g = random_matrix(n, n, rng);
    &g + &g.adjoint()
}

/// Random full-rank density matrix `G G^dagger / Tr`.
pub fn random_density(shape: BipartiteShape, rng: &mut SeededRng) -> DensityMatrix {
    let g = random_matrix(shape.dim(), shape.dim(), rng);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(shape, m.scale_real(1.0 / tr)).unwrap()
}

pub fn single(d: usize, rng: &mut SeededRng) -> PureState {
    haar_random_state(BipartiteShape { da: d, db: 1 }, rng)
}

pub fn local_pair(shape: BipartiteShape, rng: &mut SeededRng) -> (ComplexMatrix, ComplexMatrix) {
    (
        haar_random_unitary(shape.da, rng),
        haar_random_unitary(shape.db, rng),
    )
}

pub fn apply_local(psi: &PureState, ua: &ComplexMatrix, ub: &ComplexMatrix) -> PureState {
    PureState::new(psi.shape(), ua.kron(ub).mul_vec(psi.amplitudes())).unwrap()
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}
