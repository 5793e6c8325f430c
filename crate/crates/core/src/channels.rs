//! Kraus channels acting on one side of a bipartite state, the
//! entanglement-preserving four-level channel, and the spin-1/2 ⊗ spin-3/2
//! XXZ Hamiltonian used to prepare the initial state.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{eof_pure, negativity};
use crate::mmes::is_mmes;
use crate::qmat::{
    hermitian_eig, re, BipartiteShape, ComplexMatrix, DensityMatrix, PureState, Subsystem,
};
use crate::teleport::{average_fidelity, standard_teleport_outcomes, teleport_with_resource};

pub const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    trace_preserving: bool,
    completeness_deviation: f64,
}

/// Validates `Σ M^dagger M = I` and records the outcome.
pub fn make_channel(ops: Vec<ComplexMatrix>) -> Result<KrausChannel> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidArgument("a channel needs at least one operator".into()))?;
    let n = first.rows();
    if ops.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::DimensionMismatch(
            "Kraus operators must share one square dimension".into(),
        ));
    }
    let sum = ops.iter().fold(ComplexMatrix::zeros(n, n), |acc, m| {
        &acc + &m.adjoint().matmul(m)
    });
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(n));
    Ok(KrausChannel {
        operators: ops,
        trace_preserving: dev <= COMPLETENESS_TOL,
        completeness_deviation: dev,
    })
}

impl KrausChannel {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Largest entry of `|Σ M^dagger M - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        self.completeness_deviation
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    pub fn identity(n: usize) -> Self {
        make_channel(vec![ComplexMatrix::identity(n)]).expect("identity is complete")
    }
}

/// `|0><2| + |1><3| + |3><1| + |2><0|` on four levels.
pub fn level_swap() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(4, 4);
    p[(0, 2)] = re(1.0);
    p[(1, 3)] = re(1.0);
    p[(3, 1)] = re(1.0);
    p[(2, 0)] = re(1.0);
    p
}

/// `{I/√2, P/√2}`: trace preserving.
pub fn swap_mixing_channel() -> KrausChannel {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    make_channel(vec![
        ComplexMatrix::identity(4).scale_real(k),
        level_swap().scale_real(k),
    ])
    .expect("operators share a dimension")
}

/// `{I/2, P/2}`: completeness sums to `I/2`, so the channel loses trace.
pub fn half_weight_swap_channel() -> KrausChannel {
    make_channel(vec![
        ComplexMatrix::identity(4).scale_real(0.5),
        level_swap().scale_real(0.5),
    ])
    .expect("operators share a dimension")
}

/// Whether a channel without the completeness property may be applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceCheck {
    #[default]
    Enforce,
    /// Apply anyway; the result is renormalized to unit trace.
    AllowNonTracePreserving,
}

/// `Σ_k (I ⊗ M_k) ρ (I ⊗ M_k)^dagger` (or mirrored for side A).
pub fn apply_one_sided(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    side: Subsystem,
) -> Result<DensityMatrix> {
    apply_one_sided_with(ch, rho, side, TraceCheck::Enforce)
}

pub fn apply_one_sided_with(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    side: Subsystem,
    check: TraceCheck,
) -> Result<DensityMatrix> {
    let shape = rho.shape();
    if ch.dim() != shape.side(side) {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dimension {}, subsystem has {}",
            ch.dim(),
            shape.side(side)
        )));
    }
    if !ch.trace_preserving && check == TraceCheck::Enforce {
        return Err(Error::NotTracePreserving {
            deviation: ch.completeness_deviation,
        });
    }
    let n = shape.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for m in &ch.operators {
        let lifted = match side {
            Subsystem::A => m.kron(&ComplexMatrix::identity(shape.db)),
            Subsystem::B => ComplexMatrix::identity(shape.da).kron(m),
        };
        out = &out + &lifted.matmul(rho.matrix()).matmul(&lifted.adjoint());
    }
    if !ch.trace_preserving {
        let tr = out.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidState("channel annihilated the state".into()));
        }
        out = out.scale_real(1.0 / tr);
    }
    DensityMatrix::new(shape, out)
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TeleportUsability {
    /// Resource of shape `(2d, d)` or `(d, 2d)`: worst corrected fidelity
    /// over all outcomes and the probe inputs.
    Mixed {
        d: usize,
        min_corrected_fidelity: f64,
    },
    /// Square resource: worst average fidelity of the standard protocol.
    Standard {
        d: usize,
        min_average_fidelity: f64,
    },
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionReport {
    pub negativity_before: f64,
    pub negativity_after: f64,
    pub mmes_before: bool,
    pub mmes_after: bool,
    pub small_side: Subsystem,
    pub usability_before: TeleportUsability,
    pub usability_after: TeleportUsability,
}

/// Inputs used to probe teleportation usability: the computational basis
/// and the uniform superposition.
fn probe_inputs(d: usize) -> Vec<PureState> {
    let shape = BipartiteShape { da: d, db: 1 };
    let mut v: Vec<PureState> = (0..d).map(|i| PureState::basis(shape, i, 0)).collect();
    v.push(PureState::normalized(shape, vec![re(1.0); d]).expect("nonzero"));
    v
}

/// How well `rho` serves as a teleportation resource, when its shape allows it.
pub fn teleport_usability(rho: &DensityMatrix) -> TeleportUsability {
    let s = rho.shape();
    let resource = if s.da == 2 * s.db {
        Some(rho.clone())
    } else if s.db == 2 * s.da {
        Some(rho.swap_subsystems())
    } else {
        None
    };
    if let Some(res) = resource {
        let d = res.shape().db;
        let worst = probe_inputs(d)
            .iter()
            .flat_map(|psi| teleport_with_resource(&res, psi).expect("shapes match"))
            .filter(|o| o.probability >= crate::teleport::ZERO_PROBABILITY)
            .map(|o| o.fidelity_after_correction)
            .fold(f64::INFINITY, f64::min);
        return TeleportUsability::Mixed {
            d,
            min_corrected_fidelity: worst,
        };
    }
    if s.da == s.db {
        let worst = probe_inputs(s.da)
            .iter()
            .map(|psi| average_fidelity(&standard_teleport_outcomes(rho, psi).expect("square")))
            .fold(f64::INFINITY, f64::min);
        return TeleportUsability::Standard {
            d: s.da,
            min_average_fidelity: worst,
        };
    }
    TeleportUsability::NotApplicable
}

/// Negativity, certification verdict and teleportation usability before and
/// after the channel. The certificate uses the smaller side (A on ties).
pub fn evolution_report(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    side: Subsystem,
) -> Result<EvolutionReport> {
    let after = apply_one_sided(ch, rho, side)?;
    let s = rho.shape();
    let small = if s.db < s.da {
        Subsystem::B
    } else {
        Subsystem::A
    };
    Ok(EvolutionReport {
        negativity_before: negativity(rho),
        negativity_after: negativity(&after),
        mmes_before: is_mmes(rho, small, 1e-8).verdict,
        mmes_after: is_mmes(&after, small, 1e-8).verdict,
        small_side: small,
        usability_before: teleport_usability(rho),
        usability_after: teleport_usability(&after),
    })
}

/// `ρ_p = (1-p) Ψ1 + p Ψ2` on `2 ⊗ 4` with `Ψ1 = (|00>+|11>)/√2`,
/// `Ψ2 = (|02>+|13>)/√2`.
pub fn rho_p(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
    }
    let shape = BipartiteShape::new(2, 4)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = vec![re(0.0); 8];
    a[shape.index(0, 0)] = re(h);
    a[shape.index(1, 1)] = re(h);
    let mut b = vec![re(0.0); 8];
    b[shape.index(0, 2)] = re(h);
    b[shape.index(1, 3)] = re(h);
    let psi1 = PureState::new(shape, a)?;
    let psi2 = PureState::new(shape, b)?;
    DensityMatrix::mixture(&[(1.0 - p, &psi1), (p, &psi2)])
}

/// `Σ_{i<n} |ii> / √n` on `n ⊗ n`.
pub fn max_entangled_square(n: usize) -> Result<DensityMatrix> {
    let shape = BipartiteShape::new(n, n)?;
    let mut a = vec![re(0.0); shape.dim()];
    for i in 0..n {
        a[shape.index(i, i)] = re(1.0 / (n as f64).sqrt());
    }
    Ok(PureState::new(shape, a)?.to_density())
}

// ---------------------------------------------------------------------------
// XXZ preparation Hamiltonian

/// Couplings of `J (S1x S2x + S1y S2y) + Δ S1z S2z` for spin 1/2 ⊗ spin 3/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XxzParams {
    pub j: f64,
    pub delta: f64,
}

impl XxzParams {
    pub const SPIN_1: f64 = 0.5;
    pub const SPIN_2: f64 = 1.5;

    pub fn new(j: f64, delta: f64) -> Self {
        Self { j, delta }
    }

    /// `Δ >= J > 0`.
    pub fn in_ising_dominated_regime(&self) -> bool {
        self.delta >= self.j && self.j > 0.0
    }
}

/// `(S^x, S^y, S^z)` with basis order `m = s, s-1, ..., -s` and ħ = 1.
pub fn spin_matrices(s: f64) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let n = (2.0 * s + 1.0).round() as usize;
    let m: Vec<f64> = (0..n).map(|k| s - k as f64).collect();
    let sz = ComplexMatrix::from_real_diagonal(&m);
    // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; |m+1> sits one row above |m>
    let mut sp = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        sp[(k - 1, k)] = re((s * (s + 1.0) - m[k] * (m[k] + 1.0)).sqrt());
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm).scale_real(0.5);
    let sy = (&sp - &sm).scale(Complex64::new(0.0, -0.5));
    (sx, sy, sz)
}

pub fn xxz_hamiltonian(params: XxzParams) -> ComplexMatrix {
    let (x1, y1, z1) = spin_matrices(XxzParams::SPIN_1);
    let (x2, y2, z2) = spin_matrices(XxzParams::SPIN_2);
    let flip = &x1.kron(&x2) + &y1.kron(&y2);
    &flip.scale_real(params.j) + &z1.kron(&z2).scale_real(params.delta)
}

#[derive(Debug, Clone, Serialize)]
pub struct XxzGround {
    pub params: XxzParams,
    pub ising_dominated: bool,
    pub energy: f64,
    pub degeneracy: usize,
    #[serde(skip)]
    pub states: Vec<PureState>,
    pub eof_of_first: f64,
    pub spectrum: Vec<f64>,
}

/// Exact diagonalization of the 8x8 Hamiltonian on shape `(2, 4)`.
pub fn xxz_ground_state(params: XxzParams) -> XxzGround {
    let h = xxz_hamiltonian(params);
    let eig = hermitian_eig(&h).expect("Hamiltonian is Hermitian");
    let mut spectrum = eig.values.clone();
    spectrum.reverse();
    let energy = spectrum[0];
    let shape = BipartiteShape { da: 2, db: 4 };
    let n = eig.values.len();
    let states: Vec<PureState> = (0..n)
        .rev()
        .take_while(|&k| (eig.values[k] - energy).abs() <= 1e-9)
        .map(|k| PureState::normalized(shape, eig.vector(k)).expect("eigenvector is normalized"))
        .collect();
    XxzGround {
        params,
        ising_dominated: params.in_ising_dominated_regime(),
        energy,
        degeneracy: states.len(),
        eof_of_first: eof_pure(&states[0]),
        states,
        spectrum,
    }
}
