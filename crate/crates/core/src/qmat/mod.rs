//! Dense complex linear algebra and bipartite-state primitives.

mod eig;
mod matrix;
mod random;
mod state;

pub use eig::{hermitian_eig, polar_unitary, trace_norm, HermitianEig, HERMITIAN_TOL};
pub use matrix::{
    complete_orthonormal, inner, tensor_product, tensor_vec, vec_norm, ComplexMatrix,
};
pub use random::{haar_random_state, haar_random_unitary, seeded_rng, SeededRng};
pub use state::{
    fidelity_pure, partial_trace_op, partial_transpose_op, schmidt_decompose, BipartiteShape,
    DensityMatrix, PureState, Schmidt, Subsystem, HERMITIAN_STATE_TOL, NORM_TOL, PSD_TOL,
    TRACE_TOL,
};

pub use num_complex::Complex64;

/// Shorthand for a real-valued complex number.
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
