use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{inner, vec_norm, ComplexMatrix};
use super::state::{BipartiteShape, PureState};

/// Seeded stream used by every randomized routine.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-distributed unitary: Gram-Schmidt QR of a complex Ginibre matrix.
///
/// Gram-Schmidt yields a positive real diagonal in the triangular factor,
/// which is exactly the phase fix that makes the distribution Haar.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut v = g.col(c);
        for _ in 0..2 {
            for u in &cols {
                let k = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= k * y;
                }
            }
        }
        let n = vec_norm(&v);
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    let mut q = ComplexMatrix::zeros(dim, dim);
    for (c, v) in cols.iter().enumerate() {
        q.set_col(c, v);
    }
    q
}

/// Haar-random pure state of the given shape.
pub fn haar_random_state<R: Rng + ?Sized>(shape: BipartiteShape, rng: &mut R) -> PureState {
    let amps: Vec<Complex64> = (0..shape.dim()).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(shape, amps).expect("Gaussian vector is nonzero almost surely")
}
