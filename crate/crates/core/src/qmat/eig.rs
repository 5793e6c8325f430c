//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation to the resulting
//! real symmetric 2x2 block. Sweeps continue until the off-diagonal mass is
//! negligible relative to the Frobenius norm.

use num_complex::Complex64;

use super::matrix::{complete_orthonormal, ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Inputs whose Hermiticity deviation exceeds this are rejected.
pub const HERMITIAN_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.col(k)
    }

    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda = ComplexMatrix::from_real_diagonal(&self.values);
        self.vectors.matmul(&lambda).matmul(&self.vectors.adjoint())
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    m.ensure_square()?;
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    // symmetrize so the rotations act on an exactly Hermitian matrix
    let mut a = ComplexMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
                .map(|(r, c)| a[(r, c)].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEig { values, vectors })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let g_abs = g.norm();
    if g_abs < 1e-300 {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = g / g_abs;

    let theta = (aqq - app) / (2.0 * g_abs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // R = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q)
    let rpp = Complex64::new(c, 0.0);
    let rpq = Complex64::new(s, 0.0);
    let rqp = phase.conj() * (-s);
    let rqq = phase.conj() * c;

    // A <- A R
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * rpp + akq * rqp;
        a[(k, q)] = akp * rpq + akq * rqq;
    }
    // A <- R^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = rpp.conj() * apk + rqp.conj() * aqk;
        a[(q, k)] = rpq.conj() * apk + rqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * rpp + vkq * rqp;
        v[(k, q)] = vkp * rpq + vkq * rqq;
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    m.ensure_square()?;
    Ok(hermitian_eig(m)?.values.iter().map(|x| x.abs()).sum())
}

/// Unitary factor `W` of the polar decomposition `M = W P`.
///
/// Computed from the eigendecomposition of `M^dagger M`; directions with
/// vanishing singular value are completed to an orthonormal set.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.ensure_square()?;
    let n = m.rows();
    let gram = m.adjoint().matmul(m);
    let eig = hermitian_eig(&gram)?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = 1e-12 * top.max(1e-300);

    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for k in 0..n {
        let sigma2 = eig.values[k];
        if sigma2 <= cutoff {
            break;
        }
        let vk = eig.vector(k);
        let sigma = sigma2.sqrt();
        let uk: Vec<Complex64> = m.mul_vec(&vk).into_iter().map(|z| z / sigma).collect();
        left.push(uk);
        right.push(vk);
    }
    let kept = left.len();
    let left = complete_orthonormal(reorthonormalize(left), n);
    for k in kept..n {
        right.push(eig.vector(k));
    }
    let mut w = ComplexMatrix::zeros(n, n);
    for (u, v) in left.iter().zip(&right) {
        w = &w + &ComplexMatrix::outer(u, v);
    }
    Ok(w)
}

fn reorthonormalize(vs: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    use super::matrix::{inner, vec_norm};
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for u in &out {
            let c = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        let nrm = vec_norm(&v);
        out.push(v.into_iter().map(|z| z / nrm).collect());
    }
    out
}
