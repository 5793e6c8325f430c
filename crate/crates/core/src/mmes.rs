//! Construction and certification of mixed maximally entangled states.
//!
//! A state on `d ⊗ d'` is certified when every vector in its support is
//! maximally entangled. With `v_m` an orthonormal basis of the support this
//! is equivalent to `Tr_large |v_m><v_n| = δ_mn I/d` for all `m, n`. That
//! condition is invariant under any unitary change of support basis, so the
//! choice of eigenvectors inside a degenerate eigenspace cannot change the
//! verdict.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::eof_pure_side;
use crate::qmat::{
    haar_random_unitary, hermitian_eig, inner, partial_trace_op, re, BipartiteShape, ComplexMatrix,
    DensityMatrix, PureState, Subsystem,
};

/// Eigenvalues at or below this are outside the support.
pub const RANK_CUTOFF: f64 = 1e-10;

const ORTHO_TOL: f64 = 1e-10;

/// Weights `p_m` and, per block, `d` orthonormal columns `|i_m>` in the
/// large space.
#[derive(Debug, Clone)]
pub struct MmesSpec {
    pub d: usize,
    pub weights: Vec<f64>,
    /// Each block is `d' x d` with orthonormal columns.
    pub b_blocks: Vec<ComplexMatrix>,
}

impl MmesSpec {
    /// Blocks spanning consecutive computational basis vectors
    /// `{|m d>, ..., |m d + d - 1>}` of a `large`-dimensional space.
    pub fn computational(d: usize, large: usize, weights: Vec<f64>) -> Self {
        let b_blocks = (0..weights.len())
            .map(|m| {
                ComplexMatrix::from_fn(
                    large,
                    d,
                    |r, c| {
                        if r == m * d + c {
                            re(1.0)
                        } else {
                            re(0.0)
                        }
                    },
                )
            })
            .collect();
        Self {
            d,
            weights,
            b_blocks,
        }
    }

    /// Random weights and blocks taken from the columns of a Haar unitary.
    pub fn random<R: Rng + ?Sized>(d: usize, blocks: usize, large: usize, rng: &mut R) -> Self {
        assert!(large >= blocks * d, "large side too small");
        let u = haar_random_unitary(large, rng);
        let b_blocks = (0..blocks)
            .map(|m| ComplexMatrix::from_fn(large, d, |r, c| u[(r, m * d + c)]))
            .collect();
        let raw: Vec<f64> = (0..blocks).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        Self {
            d,
            weights: raw.into_iter().map(|w| w / total).collect(),
            b_blocks,
        }
    }

    fn large_dim(&self) -> Result<usize> {
        let first = self
            .b_blocks
            .first()
            .ok_or_else(|| Error::InvalidArgument("no blocks".into()))?;
        Ok(first.rows())
    }

    fn validate(&self) -> Result<usize> {
        if self.d == 0 {
            return Err(Error::InvalidArgument("d must be positive".into()));
        }
        if self.weights.len() != self.b_blocks.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} blocks",
                self.weights.len(),
                self.b_blocks.len()
            )));
        }
        if self.weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        let large = self.large_dim()?;
        for b in &self.b_blocks {
            if b.rows() != large || b.cols() != self.d {
                return Err(Error::DimensionMismatch(format!(
                    "block is {}x{}, expected {large}x{}",
                    b.rows(),
                    b.cols(),
                    self.d
                )));
            }
        }
        let required = self.b_blocks.len() * self.d;
        if large < required {
            return Err(Error::DimensionShortfall { large, required });
        }
        // <j_n|i_m> = δ_ij δ_nm
        let cols: Vec<Vec<Complex64>> = self
            .b_blocks
            .iter()
            .flat_map(|b| (0..self.d).map(move |c| b.col(c)))
            .collect();
        let mut worst_cross = 0.0_f64;
        for (x, u) in cols.iter().enumerate() {
            for (y, v) in cols.iter().enumerate() {
                let g = inner(u, v);
                let same_block = x / self.d == y / self.d;
                if x == y {
                    if (g - re(1.0)).norm() > ORTHO_TOL {
                        return Err(Error::InvalidArgument(format!(
                            "block column {x} is not normalized"
                        )));
                    }
                } else if same_block {
                    if g.norm() > ORTHO_TOL {
                        return Err(Error::InvalidArgument(format!(
                            "block columns {x} and {y} are not orthogonal"
                        )));
                    }
                } else {
                    worst_cross = worst_cross.max(g.norm());
                }
            }
        }
        if worst_cross > ORTHO_TOL {
            return Err(Error::CrossBlockOverlap {
                overlap: worst_cross,
            });
        }
        Ok(large)
    }

    /// `|ψ_m> = (1/√d) Σ_i |i> ⊗ |i_m>` on shape `(d, d')`.
    pub fn component(&self, m: usize) -> Result<PureState> {
        let large = self.large_dim()?;
        let shape = BipartiteShape::new(self.d, large)?;
        let block = &self.b_blocks[m];
        let norm = 1.0 / (self.d as f64).sqrt();
        let mut amps = vec![re(0.0); shape.dim()];
        for i in 0..self.d {
            for b in 0..large {
                amps[shape.index(i, b)] += block[(b, i)] * norm;
            }
        }
        PureState::normalized(shape, amps)
    }
}

/// `ρ = Σ_m p_m |ψ_m><ψ_m|` on `d ⊗ d'` with the small side on A.
pub fn construct_mmes(spec: &MmesSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    let comps: Vec<PureState> = (0..spec.weights.len())
        .map(|m| spec.component(m))
        .collect::<Result<_>>()?;
    let pairs: Vec<(f64, &PureState)> = spec.weights.iter().copied().zip(comps.iter()).collect();
    DensityMatrix::mixture(&pairs)
}

#[derive(Debug, Clone, Serialize)]
pub struct MmesCertificate {
    pub verdict: bool,
    pub rank: usize,
    /// Kept (support) eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub worst_schmidt_deviation: f64,
    pub worst_cross_trace_norm: f64,
    pub reduced_small_side_deviation: f64,
    pub small_side: Subsystem,
    pub tolerance: f64,
    pub rank_cutoff: f64,
    /// `d' >= rank * d`; always true when the verdict is.
    pub dimension_bound_holds: bool,
}

/// Certifies `rho` against the mixed-maximal-entanglement structure with
/// the default rank cutoff.
pub fn is_mmes(rho: &DensityMatrix, small_side: Subsystem, tol: f64) -> MmesCertificate {
    is_mmes_with_cutoff(rho, small_side, tol, RANK_CUTOFF)
}

pub fn is_mmes_with_cutoff(
    rho: &DensityMatrix,
    small_side: Subsystem,
    tol: f64,
    rank_cutoff: f64,
) -> MmesCertificate {
    let shape = rho.shape();
    let d = shape.side(small_side);
    let large = shape.side(small_side.other());
    let eig = hermitian_eig(rho.matrix()).expect("density matrices are Hermitian");
    let kept: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > rank_cutoff)
        .collect();
    let vecs: Vec<Vec<Complex64>> = kept.iter().map(|&k| eig.vector(k)).collect();
    let target = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();

    let mut worst_schmidt = 0.0_f64;
    let mut worst_cross = 0.0_f64;
    for (m, vm) in vecs.iter().enumerate() {
        for (n, vn) in vecs.iter().enumerate().skip(m) {
            let op = ComplexMatrix::outer(vm, vn);
            let red = partial_trace_op(&op, shape, small_side).expect("shape is consistent");
            if m == n {
                // Schmidt coefficients are square roots of the reduced spectrum
                let spec = hermitian_eig(&red).expect("reduced operator is Hermitian");
                for &l in &spec.values {
                    worst_schmidt = worst_schmidt.max((l.max(0.0).sqrt() - inv_sqrt_d).abs());
                }
            } else {
                worst_cross = worst_cross.max(red.frobenius_norm());
            }
        }
    }
    if vecs.is_empty() {
        worst_schmidt = f64::INFINITY;
    }
    let reduced = rho.partial_trace(small_side);
    let reduced_dev = reduced.max_abs_diff(&target);

    let verdict = worst_schmidt <= tol && worst_cross <= tol && reduced_dev <= tol;
    MmesCertificate {
        verdict,
        rank: kept.len(),
        eigenvalues: kept.iter().map(|&k| eig.values[k]).collect(),
        worst_schmidt_deviation: worst_schmidt,
        worst_cross_trace_norm: worst_cross,
        reduced_small_side_deviation: reduced_dev,
        small_side,
        tolerance: tol,
        rank_cutoff,
        dimension_bound_holds: large >= kept.len() * d,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub trials: usize,
    pub elements: usize,
    pub rank: usize,
    pub decomposition_size: usize,
    pub min_eof: f64,
    pub max_eof: f64,
}

/// Samples pure-state decompositions of `rho` and records the entanglement
/// of every element.
///
/// Each trial draws an `l x l` Haar unitary `U` with `l = rank + 1` and forms
/// `|u_n> ∝ Σ_m U_nm √p_m |v_m>` from the eigen-decomposition; elements with
/// vanishing weight are skipped.
pub fn decomposition_audit<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    small_side: Subsystem,
    trials: usize,
    rng: &mut R,
) -> AuditReport {
    let shape = rho.shape();
    let eig = hermitian_eig(rho.matrix()).expect("density matrices are Hermitian");
    let kept: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > RANK_CUTOFF)
        .collect();
    let rank = kept.len();
    let scaled: Vec<Vec<Complex64>> = kept
        .iter()
        .map(|&k| {
            let s = eig.values[k].sqrt();
            eig.vector(k).into_iter().map(|z| z * s).collect()
        })
        .collect();
    let l = if rank == 1 { 1 } else { rank + 1 };
    let mut min_eof = f64::INFINITY;
    let mut max_eof = f64::NEG_INFINITY;
    let mut elements = 0;
    for _ in 0..trials {
        let u = haar_random_unitary(l, rng);
        for n in 0..l {
            let mut w = vec![re(0.0); shape.dim()];
            for (m, v) in scaled.iter().enumerate() {
                let c = u[(n, m)];
                for (x, y) in w.iter_mut().zip(v) {
                    *x += c * y;
                }
            }
            let q: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            if q < 1e-14 {
                continue;
            }
            let psi = PureState::normalized(shape, w).expect("nonzero vector");
            let e = eof_pure_side(&psi, small_side);
            min_eof = min_eof.min(e);
            max_eof = max_eof.max(e);
            elements += 1;
        }
    }
    AuditReport {
        trials,
        elements,
        rank,
        decomposition_size: l,
        min_eof,
        max_eof,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::seeded_rng;

    fn two_by_four_example() -> DensityMatrix {
        construct_mmes(&MmesSpec::computational(2, 4, vec![0.5, 0.5])).unwrap()
    }

    #[test]
    fn two_by_four_entries() {
        let rho = two_by_four_example();
        let s = rho.shape();
        // ψ1 = (|00>+|11>)/√2, ψ2 = (|02>+|13>)/√2, each with weight 1/2
        let m = rho.matrix();
        assert!((m[(s.index(0, 0), s.index(1, 1))] - re(0.25)).norm() < 1e-15);
        assert!((m[(s.index(0, 2), s.index(1, 3))] - re(0.25)).norm() < 1e-15);
        assert!((m[(s.index(0, 0), s.index(0, 2))]).norm() < 1e-15);
        let cert = is_mmes(&rho, Subsystem::A, 1e-8);
        assert!(cert.verdict);
        assert_eq!(cert.rank, 2);
    }

    #[test]
    fn single_block_is_pure_maximally_entangled() {
        let rho = construct_mmes(&MmesSpec::computational(3, 3, vec![1.0])).unwrap();
        let cert = is_mmes(&rho, Subsystem::A, 1e-8);
        assert!(cert.verdict);
        assert_eq!(cert.rank, 1);
        assert!((crate::measures::negativity(&rho) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn three_blocks_in_two_by_six() {
        let rho = construct_mmes(&MmesSpec::computational(2, 6, vec![0.5, 0.25, 0.25])).unwrap();
        let cert = is_mmes(&rho, Subsystem::A, 1e-8);
        assert!(cert.verdict);
        assert_eq!(cert.rank, 3);
        let expect = [0.5, 0.25, 0.25];
        for (x, y) in cert.eigenvalues.iter().zip(expect) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn construction_errors() {
        let short = MmesSpec::computational(2, 4, vec![0.5, 0.5]);
        let mut bad = short.clone();
        bad.b_blocks[1] = bad.b_blocks[0].clone();
        assert!(matches!(
            construct_mmes(&bad),
            Err(Error::CrossBlockOverlap { .. })
        ));

        let three = MmesSpec {
            d: 2,
            weights: vec![0.4, 0.3, 0.3],
            b_blocks: vec![short.b_blocks[0].clone(); 3],
        };
        assert!(matches!(
            construct_mmes(&three),
            Err(Error::DimensionShortfall {
                large: 4,
                required: 6
            })
        ));

        let mut weights = short.clone();
        weights.weights = vec![0.25, 0.25];
        assert!(construct_mmes(&weights).is_err());
    }

    #[test]
    fn separable_and_square_mixtures_fail() {
        let s = BipartiteShape::new(2, 2).unwrap();
        let sep = DensityMatrix::new(s, ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]))
            .unwrap();
        assert!(!is_mmes(&sep, Subsystem::A, 1e-8).verdict);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi_p = PureState::new(s, vec![re(h), re(0.0), re(0.0), re(h)]).unwrap();
        let psi_p = PureState::new(s, vec![re(0.0), re(h), re(h), re(0.0)]).unwrap();
        for w in [0.5, 0.3] {
            let rho = DensityMatrix::mixture(&[(w, &phi_p), (1.0 - w, &psi_p)]).unwrap();
            let cert = is_mmes(&rho, Subsystem::A, 1e-8);
            assert!(!cert.verdict);
            assert_eq!(cert.rank, 2);
            assert!(!cert.dimension_bound_holds);
        }
    }

    #[test]
    fn audit_examples() {
        let mut rng = seeded_rng(11);
        let rep = decomposition_audit(&two_by_four_example(), Subsystem::A, 100, &mut rng);
        assert!((rep.min_eof - 1.0).abs() < 1e-8 && (rep.max_eof - 1.0).abs() < 1e-8);
        assert_eq!(rep.rank, 2);

        let s = BipartiteShape::new(2, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(s, vec![re(h), re(0.0), re(0.0), re(h)]).unwrap();
        let rep = decomposition_audit(&bell.to_density(), Subsystem::A, 10, &mut rng);
        assert_eq!(rep.decomposition_size, 1);
        assert_eq!(rep.elements, 10);
        assert!((rep.min_eof - 1.0).abs() < 1e-10);

        let werner = DensityMatrix::new(
            s,
            &bell.projector().scale_real(0.7) + &ComplexMatrix::identity(4).scale_real(0.3 / 4.0),
        )
        .unwrap();
        let rep = decomposition_audit(&werner, Subsystem::A, 20, &mut rng);
        assert!(rep.min_eof < 1.0 - 1e-3);
    }
}
