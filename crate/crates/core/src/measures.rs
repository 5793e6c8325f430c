//! Entanglement quantities: entropy, pure-state entanglement, negativity,
//! fully entangled fraction and the optimal teleportation fidelity.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{
    haar_random_unitary, hermitian_eig, polar_unitary, trace_norm, ComplexMatrix, DensityMatrix,
    PureState, Subsystem,
};

/// Eigenvalues in `[-ENTROPY_CLAMP, 0)` are treated as zero.
pub const ENTROPY_CLAMP: f64 = 1e-8;

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    m.ensure_square()?;
    let tr = m.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::InvalidState(format!("trace {} is not 1", tr.re)));
    }
    let eig = hermitian_eig(m)?;
    let mut s = 0.0;
    for &l in &eig.values {
        if l < -ENTROPY_CLAMP {
            return Err(Error::NegativeEigenvalue(l));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Entanglement of a pure state: entropy of the reduced state on B.
pub fn eof_pure(psi: &PureState) -> f64 {
    eof_pure_side(psi, Subsystem::B)
}

/// Entropy of the reduced state kept on `side`.
pub fn eof_pure_side(psi: &PureState, side: Subsystem) -> f64 {
    let reduced = psi.to_density().partial_trace(side);
    von_neumann_entropy(&reduced).expect("reduced state of a normalized ket is a valid state")
}

/// `(||rho^{T_A}||_1 - 1) / 2`.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    let pt = rho.partial_transpose(Subsystem::A);
    let tn = trace_norm(&pt).expect("partial transpose of a Hermitian matrix is Hermitian");
    ((tn - 1.0) / 2.0).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FefOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for FefOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iter: 1000,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FefResult {
    pub value: f64,
    /// Maximizing one-sided unitary `U` (acts on B).
    pub optimizer: ComplexMatrix,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Flat vector with `U[b][a]` at pair index `(a, b)`; equals `sqrt(d) (I ⊗ U)|Φ>`.
fn lifted(u: &ComplexMatrix) -> Vec<Complex64> {
    let d = u.rows();
    let mut v = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            v.push(u[(b, a)]);
        }
    }
    v
}

/// `<Φ|(I ⊗ U^dagger) rho (I ⊗ U)|Φ>`.
pub fn fef_objective(rho: &DensityMatrix, u: &ComplexMatrix) -> f64 {
    let d = u.rows();
    let v = lifted(u);
    let rv = rho.matrix().mul_vec(&v);
    let num: Complex64 = v.iter().zip(&rv).map(|(x, y)| x.conj() * y).sum();
    num.re / d as f64
}

/// Projected power ascent from a single start. Returns the final unitary,
/// its objective value, and whether the stagnation test fired.
fn ascend(
    rho: &DensityMatrix,
    start: ComplexMatrix,
    max_iter: usize,
    tol: f64,
) -> (ComplexMatrix, f64, bool) {
    let d = start.rows();
    let mut u = start;
    let mut f = fef_objective(rho, &u);
    for _ in 0..max_iter {
        let w = rho.matrix().mul_vec(&lifted(&u));
        // reshape back: entry (b, a) comes from pair index (a, b)
        let m = ComplexMatrix::from_fn(d, d, |b, a| w[a * d + b]);
        let next = polar_unitary(&m).expect("square matrix");
        let f_next = fef_objective(rho, &next);
        let delta = f_next - f;
        if f_next >= f {
            u = next;
            f = f_next;
        }
        if delta.abs() < tol {
            return (u, f, true);
        }
    }
    (u, f, false)
}

/// Fully entangled fraction by multistart projected power ascent.
///
/// The identity is always used as an extra start so the result never falls
/// below `F(I)`; the remaining `restarts` starts are Haar unitaries drawn in
/// order from `rng`. Ties keep the earliest start.
pub fn fully_entangled_fraction<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    opts: FefOptions,
    rng: &mut R,
) -> Result<FefResult> {
    let shape = rho.shape();
    if shape.da != shape.db {
        return Err(Error::DimensionMismatch(format!(
            "fully entangled fraction needs a square shape, got {}x{}",
            shape.da, shape.db
        )));
    }
    let d = shape.da;
    let (mut best_u, mut best_f, mut best_conv) =
        ascend(rho, ComplexMatrix::identity(d), opts.max_iter, opts.tol);
    for _ in 0..opts.restarts {
        let start = haar_random_unitary(d, rng);
        let (u, f, conv) = ascend(rho, start, opts.max_iter, opts.tol);
        if f > best_f {
            best_u = u;
            best_f = f;
            best_conv = conv;
        }
    }
    Ok(FefResult {
        value: best_f.clamp(0.0, 1.0),
        optimizer: best_u,
        restarts_used: opts.restarts,
        converged: best_conv,
    })
}

/// `(d F + 1) / (d + 1)`.
pub fn optimal_teleport_fidelity(fef: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&fef) {
        return Err(Error::InvalidArgument(format!("fef {fef} outside [0, 1]")));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let d = d as f64;
    Ok((d * fef + 1.0) / (d + 1.0))
}
