use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eig::hermitian_eig;
use super::matrix::{complete_orthonormal, inner, vec_norm, ComplexMatrix, ZERO};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_STATE_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Selects one factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Local dimensions `(dA, dB)`; flat index of the pair `(a, b)` is `a * dB + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteShape {
    pub da: usize,
    pub db: usize,
}

impl BipartiteShape {
    pub fn new(da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::InvalidArgument(format!(
                "subsystem dimensions must be positive, got ({da}, {db})"
            )));
        }
        Ok(Self { da, db })
    }

    pub fn dim(&self) -> usize {
        self.da * self.db
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.db + b
    }

    pub fn side(&self, s: Subsystem) -> usize {
        match s {
            Subsystem::A => self.da,
            Subsystem::B => self.db,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            da: self.db,
            db: self.da,
        }
    }
}

/// Normalized ket on a bipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    shape: BipartiteShape,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Validates length and unit norm (within `NORM_TOL`).
    pub fn new(shape: BipartiteShape, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != shape.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for shape {}x{}",
                amplitudes.len(),
                shape.da,
                shape.db
            )));
        }
        let n = vec_norm(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm is {n}, expected 1")));
        }
        Ok(Self { shape, amplitudes })
    }

    /// Normalizes the given vector first.
    pub fn normalized(shape: BipartiteShape, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = vec_norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(shape, amplitudes.into_iter().map(|z| z / n).collect())
    }

    /// A single system viewed as `d x 1`.
    pub fn single(amplitudes: Vec<Complex64>) -> Result<Self> {
        let d = amplitudes.len();
        Self::new(BipartiteShape::new(d.max(1), 1)?, amplitudes)
    }

    pub fn basis(shape: BipartiteShape, a: usize, b: usize) -> Self {
        let mut amps = vec![ZERO; shape.dim()];
        amps[shape.index(a, b)] = Complex64::new(1.0, 0.0);
        Self {
            shape,
            amplitudes: amps,
        }
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Coefficient matrix `M[a][b]` (`dA x dB`).
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_row_major(self.shape.da, self.shape.db, self.amplitudes.clone())
            .expect("length checked at construction")
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            shape: self.shape,
            matrix: self.projector(),
        }
    }

    /// Same amplitudes with the subsystem order exchanged.
    pub fn swap_subsystems(&self) -> Self {
        let s = self.shape;
        let t = s.swapped();
        let mut amps = vec![ZERO; s.dim()];
        for a in 0..s.da {
            for b in 0..s.db {
                amps[t.index(b, a)] = self.amplitudes[s.index(a, b)];
            }
        }
        Self {
            shape: t,
            amplitudes: amps,
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on a bipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: BipartiteShape,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(shape: BipartiteShape, matrix: ComplexMatrix) -> Result<Self> {
        matrix.ensure_square()?;
        if matrix.rows() != shape.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for shape {}x{}",
                matrix.rows(),
                matrix.cols(),
                shape.da,
                shape.db
            )));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > HERMITIAN_STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |rho - rho^dagger| = {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {}{:+}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min = hermitian_eig(&matrix)?
            .values
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self { shape, matrix })
    }

    /// Convex combination of pure states; weights must be nonnegative and sum to one.
    pub fn mixture(components: &[(f64, &PureState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let shape = first.1.shape();
        let mut m = ComplexMatrix::zeros(shape.dim(), shape.dim());
        for &(w, psi) in components {
            if psi.shape() != shape {
                return Err(Error::DimensionMismatch(
                    "mixture of different shapes".into(),
                ));
            }
            if w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {w}")));
            }
            m = &m + &psi.projector().scale_real(w);
        }
        Self::new(shape, m)
    }

    pub fn maximally_mixed(shape: BipartiteShape) -> Self {
        let n = shape.dim();
        Self {
            shape,
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn partial_trace(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace_op(&self.matrix, self.shape, keep).expect("shape checked at construction")
    }

    pub fn partial_transpose(&self, side: Subsystem) -> ComplexMatrix {
        partial_transpose_op(&self.matrix, self.shape, side).expect("shape checked at construction")
    }

    /// `(U_A ⊗ U_B) rho (U_A ⊗ U_B)^dagger`.
    pub fn conjugate_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        if ua.rows() != self.shape.da || ub.rows() != self.shape.db {
            return Err(Error::DimensionMismatch("local unitary dimensions".into()));
        }
        let u = ua.kron(ub);
        Self::new(self.shape, u.matmul(&self.matrix).matmul(&u.adjoint()))
    }

    /// Same operator with the subsystem order exchanged.
    pub fn swap_subsystems(&self) -> Self {
        let s = self.shape;
        let t = s.swapped();
        let mut m = ComplexMatrix::zeros(s.dim(), s.dim());
        for a in 0..s.da {
            for b in 0..s.db {
                for a2 in 0..s.da {
                    for b2 in 0..s.db {
                        m[(t.index(b, a), t.index(b2, a2))] =
                            self.matrix[(s.index(a, b), s.index(a2, b2))];
                    }
                }
            }
        }
        Self {
            shape: t,
            matrix: m,
        }
    }
}

fn check_operator_shape(m: &ComplexMatrix, shape: BipartiteShape) -> Result<()> {
    if m.rows() != shape.dim() || m.cols() != shape.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator for shape {}x{}",
            m.rows(),
            m.cols(),
            shape.da,
            shape.db
        )));
    }
    Ok(())
}

/// Partial trace of an arbitrary operator, keeping subsystem `keep`.
pub fn partial_trace_op(
    m: &ComplexMatrix,
    shape: BipartiteShape,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    check_operator_shape(m, shape)?;
    let (da, db) = (shape.da, shape.db);
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a, a2| {
            (0..db)
                .map(|b| m[(shape.index(a, b), shape.index(a2, b))])
                .sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |b, b2| {
            (0..da)
                .map(|a| m[(shape.index(a, b), shape.index(a, b2))])
                .sum()
        }),
    })
}

/// Partial transpose of an arbitrary operator on subsystem `side`.
pub fn partial_transpose_op(
    m: &ComplexMatrix,
    shape: BipartiteShape,
    side: Subsystem,
) -> Result<ComplexMatrix> {
    check_operator_shape(m, shape)?;
    let n = shape.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..shape.da {
        for b in 0..shape.db {
            for a2 in 0..shape.da {
                for b2 in 0..shape.db {
                    let (r, c) = match side {
                        Subsystem::A => (shape.index(a2, b), shape.index(a, b2)),
                        Subsystem::B => (shape.index(a, b2), shape.index(a2, b)),
                    };
                    out[(r, c)] = m[(shape.index(a, b), shape.index(a2, b2))];
                }
            }
        }
    }
    Ok(out)
}

/// Schmidt form `sum_i c_i |a_i> ⊗ |b_i>` with `min(dA, dB)` terms.
#[derive(Debug, Clone)]
pub struct Schmidt {
    /// Nonnegative, descending.
    pub coefficients: Vec<f64>,
    pub a_basis: Vec<Vec<Complex64>>,
    pub b_basis: Vec<Vec<Complex64>>,
}

impl Schmidt {
    pub fn reconstruct(&self, shape: BipartiteShape) -> Vec<Complex64> {
        let mut out = vec![ZERO; shape.dim()];
        for ((c, a), b) in self
            .coefficients
            .iter()
            .zip(&self.a_basis)
            .zip(&self.b_basis)
        {
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[shape.index(i, j)] += x * y * *c;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition from the eigendecomposition of the smaller reduced
/// operator; partner vectors follow by back-substitution and vanishing
/// coefficients get an orthonormal completion.
pub fn schmidt_decompose(psi: &PureState) -> Schmidt {
    let shape = psi.shape();
    if shape.da > shape.db {
        let s = schmidt_decompose(&psi.swap_subsystems());
        return Schmidt {
            coefficients: s.coefficients,
            a_basis: s.b_basis,
            b_basis: s.a_basis,
        };
    }
    // M M^dagger = rho_A; columns of M^T conj(a_i) / c_i are the B partners
    let m = psi.coefficient_matrix();
    let rho_a = m.matmul(&m.adjoint());
    let eig = hermitian_eig(&rho_a).expect("M M^dagger is Hermitian");
    let k = shape.da;
    let mut coefficients = Vec::with_capacity(k);
    let mut a_basis = Vec::with_capacity(k);
    let mut b_partners = Vec::with_capacity(k);
    let mt = m.transpose();
    for i in 0..k {
        let c = eig.values[i].max(0.0).sqrt();
        let a: Vec<Complex64> = eig.vector(i);
        coefficients.push(c);
        if c > 1e-12 {
            let a_conj: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
            let b: Vec<Complex64> = mt.mul_vec(&a_conj).into_iter().map(|z| z / c).collect();
            b_partners.push(b);
        }
        a_basis.push(a);
    }
    let kept = b_partners.len();
    let mut b_basis = complete_orthonormal(orthonormalize(b_partners), shape.db);
    b_basis.truncate(k.max(kept));
    Schmidt {
        coefficients,
        a_basis,
        b_basis,
    }
}

fn orthonormalize(vs: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for u in &out {
            let c = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        let n = vec_norm(&v);
        out.push(v.into_iter().map(|z| z / n).collect());
    }
    out
}

/// `|<psi|phi>|^2`.
pub fn fidelity_pure(psi: &PureState, phi: &PureState) -> Result<f64> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between dimensions {} and {}",
            psi.dim(),
            phi.dim()
        )));
    }
    Ok(inner(psi.amplitudes(), phi.amplitudes())
        .norm_sqr()
        .min(1.0))
}
