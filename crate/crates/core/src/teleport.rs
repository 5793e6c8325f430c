//! Teleportation simulated directly from measurement projectors.
//!
//! Alice holds the input `A1` and her half `A2` of the resource; Bob holds
//! `B`. Every outcome of Alice's Bell measurement is enumerated, Bob's
//! conditional state follows from the Born rule, and Bob applies `U_st`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{re, BipartiteShape, ComplexMatrix, DensityMatrix, PureState};
use crate::weyl::{bell_dd, generalized_bell, weyl_unitary, BellFamily, WeylIndex};

/// Outcomes below this probability are reported with fidelity 1 and are
/// excluded from averages.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, Serialize)]
pub struct TeleportOutcome {
    pub s: usize,
    pub t: usize,
    pub family: u8,
    pub probability: f64,
    pub fidelity_after_correction: f64,
    pub fidelity_before_correction: f64,
    /// Bob's normalized state after the correction.
    #[serde(skip)]
    pub corrected_state: ComplexMatrix,
}

/// `χ = ½|e1><e1| + ½|e2><e2|` on `2d ⊗ d` with
/// `e1 = Σ|i,i>/√d`, `e2 = Σ|d+i,i>/√d`.
pub fn mmes_resource_state(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "d must be at least 2, got {d}"
        )));
    }
    let shape = BipartiteShape::new(2 * d, d)?;
    let norm = re(1.0 / (d as f64).sqrt());
    let mut e1 = vec![re(0.0); shape.dim()];
    let mut e2 = vec![re(0.0); shape.dim()];
    for i in 0..d {
        e1[shape.index(i, i)] = norm;
        e2[shape.index(d + i, i)] = norm;
    }
    let e1 = PureState::new(shape, e1)?;
    let e2 = PureState::new(shape, e2)?;
    DensityMatrix::mixture(&[(0.5, &e1), (0.5, &e2)])
}

fn check_input(psi: &PureState, d: usize) -> Result<()> {
    if psi.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "input state has dimension {}, resource expects {d}",
            psi.dim()
        )));
    }
    Ok(())
}

/// Bob's unnormalized conditional operator `(<Φ| ⊗ I) Ω (|Φ> ⊗ I)`.
fn conditional_operator(full: &ComplexMatrix, phi: &[Complex64], d_bob: usize) -> ComplexMatrix {
    let n = phi.len();
    let mut sigma = ComplexMatrix::zeros(d_bob, d_bob);
    for x in 0..n {
        let cx = phi[x].conj();
        if cx == re(0.0) {
            continue;
        }
        for x2 in 0..n {
            let cx2 = phi[x2];
            if cx2 == re(0.0) {
                continue;
            }
            let k = cx * cx2;
            for b in 0..d_bob {
                for b2 in 0..d_bob {
                    sigma[(b, b2)] += k * full[(x * d_bob + b, x2 * d_bob + b2)];
                }
            }
        }
    }
    sigma
}

fn expectation(psi: &PureState, m: &ComplexMatrix) -> f64 {
    let a = psi.amplitudes();
    let mv = m.mul_vec(a);
    a.iter()
        .zip(&mv)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .re
}

fn run_protocol(
    psi: &PureState,
    resource: &DensityMatrix,
    measurements: Vec<(WeylIndex, u8, PureState)>,
) -> Vec<TeleportOutcome> {
    let d = psi.dim();
    let full = psi.projector().kron(resource.matrix());
    measurements
        .into_iter()
        .map(|(idx, family, phi)| {
            let sigma = conditional_operator(&full, phi.amplitudes(), d);
            let p = sigma.trace().re;
            if p < ZERO_PROBABILITY {
                return TeleportOutcome {
                    s: idx.s,
                    t: idx.t,
                    family,
                    probability: p.max(0.0),
                    fidelity_after_correction: 1.0,
                    fidelity_before_correction: 1.0,
                    corrected_state: psi.projector(),
                };
            }
            let before = sigma.scale_real(1.0 / p);
            let u = weyl_unitary(idx);
            let after = u.matmul(&before).matmul(&u.adjoint());
            TeleportOutcome {
                s: idx.s,
                t: idx.t,
                family,
                probability: p,
                fidelity_after_correction: expectation(psi, &after),
                fidelity_before_correction: expectation(psi, &before),
                corrected_state: after,
            }
        })
        .collect()
}

/// Teleportation of `psi` (dimension `d`) through a `2d ⊗ d` resource using
/// the `2d^2` generalized Bell measurement and `U_st` corrections.
pub fn teleport_with_resource(
    resource: &DensityMatrix,
    psi: &PureState,
) -> Result<Vec<TeleportOutcome>> {
    let shape = resource.shape();
    let d = shape.db;
    if shape.da != 2 * d {
        return Err(Error::DimensionMismatch(format!(
            "resource must have shape (2d, d), got {}x{}",
            shape.da, shape.db
        )));
    }
    check_input(psi, d)?;
    let mut meas = Vec::with_capacity(2 * d * d);
    for family in BellFamily::BOTH {
        for idx in WeylIndex::all(d) {
            meas.push((idx, family.number(), generalized_bell(idx, family).state));
        }
    }
    Ok(run_protocol(psi, resource, meas))
}

/// Teleportation of a `d`-dimensional state with the mixed resource of
/// [`mmes_resource_state`].
pub fn simulate_mmes_teleport(psi: &PureState) -> Result<Vec<TeleportOutcome>> {
    let d = psi.dim();
    let chi = mmes_resource_state(d)?;
    teleport_with_resource(&chi, psi)
}

/// Outcomes of the standard `d ⊗ d` protocol.
pub fn standard_teleport_outcomes(
    resource: &DensityMatrix,
    psi: &PureState,
) -> Result<Vec<TeleportOutcome>> {
    let shape = resource.shape();
    if shape.da != shape.db {
        return Err(Error::DimensionMismatch(format!(
            "standard protocol needs a square resource, got {}x{}",
            shape.da, shape.db
        )));
    }
    let d = shape.da;
    check_input(psi, d)?;
    let meas = WeylIndex::all(d)
        .map(|idx| (idx, 1, bell_dd(idx)))
        .collect();
    Ok(run_protocol(psi, resource, meas))
}

/// Average corrected fidelity of the standard protocol for one input.
pub fn simulate_standard_teleport(resource: &DensityMatrix, psi: &PureState) -> Result<f64> {
    Ok(average_fidelity(&standard_teleport_outcomes(
        resource, psi,
    )?))
}

/// `Σ p f / Σ p` over outcomes with nonzero probability.
pub fn average_fidelity(outcomes: &[TeleportOutcome]) -> f64 {
    let (num, den) = outcomes
        .iter()
        .filter(|o| o.probability >= ZERO_PROBABILITY)
        .fold((0.0, 0.0), |(n, d), o| {
            (
                n + o.probability * o.fidelity_after_correction,
                d + o.probability,
            )
        });
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// Bob's state with the measurement record discarded.
pub fn record_discarded_state(outcomes: &[TeleportOutcome]) -> ComplexMatrix {
    let d = outcomes[0].corrected_state.rows();
    outcomes
        .iter()
        .filter(|o| o.probability >= ZERO_PROBABILITY)
        .fold(ComplexMatrix::zeros(d, d), |acc, o| {
            &acc + &o.corrected_state.scale_real(o.probability)
        })
}

/// `Σ_{i,s,t,s',t'} |Φ^i_st><Φ^i_s't'| ⊗ U_st^dagger |ψ><ψ| U_s't'` on
/// `A1 A2 B`, with no prefactor.
pub fn bell_expansion(psi: &PureState) -> ComplexMatrix {
    let d = psi.dim();
    let proj = psi.projector();
    let n = 2 * d * d * d;
    let mut acc = ComplexMatrix::zeros(n, n);
    for family in BellFamily::BOTH {
        let states: Vec<(ComplexMatrix, Vec<Complex64>)> = WeylIndex::all(d)
            .map(|idx| {
                (
                    weyl_unitary(idx),
                    generalized_bell(idx, family).state.amplitudes().to_vec(),
                )
            })
            .collect();
        for (u, phi) in &states {
            for (u2, phi2) in &states {
                let left = ComplexMatrix::outer(phi, phi2);
                let right = u.adjoint().matmul(&proj).matmul(u2);
                acc = &acc + &left.kron(&right);
            }
        }
    }
    acc
}

/// Largest entry deviation between `prefactor * bell_expansion(psi)` and
/// `|ψ><ψ| ⊗ χ`.
pub fn bell_expansion_residual(psi: &PureState, prefactor: f64) -> Result<f64> {
    let d = psi.dim();
    let chi = mmes_resource_state(d)?;
    let lhs = psi.projector().kron(chi.matrix());
    Ok(bell_expansion(psi).scale_real(prefactor).max_abs_diff(&lhs))
}
