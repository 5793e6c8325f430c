//! Shift and clock operators, the `U_st = h^t g^s` unitary basis, and the
//! `2d^2` generalized Bell states of a `d ⊗ 2d` system.
//!
//! Labels are 0-based: `h|j> = |j+1 mod d>`, `g|j> = ω^j |j>` with
//! `ω = exp(-2πi/d)`. Family 1 pairs `|i>` with `|i>`, family 2 pairs `|i>`
//! with `|d+i>` on the `2d`-dimensional side.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{haar_random_unitary, inner, re, BipartiteShape, ComplexMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylIndex {
    pub s: usize,
    pub t: usize,
    pub d: usize,
}

impl WeylIndex {
    pub fn new(s: usize, t: usize, d: usize) -> Result<Self> {
        if d == 0 || s >= d || t >= d {
            return Err(Error::InvalidArgument(format!(
                "Weyl index (s={s}, t={t}) out of range for d={d}"
            )));
        }
        Ok(Self { s, t, d })
    }

    /// All `d^2` indices, `s` major.
    pub fn all(d: usize) -> impl Iterator<Item = WeylIndex> {
        (0..d).flat_map(move |s| (0..d).map(move |t| WeylIndex { s, t, d }))
    }
}

/// Which seed pairing of the `2d`-dimensional side a Bell state uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellFamily {
    /// `|i, i>`
    First,
    /// `|i, d+i>`
    Second,
}

impl BellFamily {
    pub const BOTH: [BellFamily; 2] = [BellFamily::First, BellFamily::Second];

    pub fn number(self) -> u8 {
        match self {
            BellFamily::First => 1,
            BellFamily::Second => 2,
        }
    }

    fn offset(self, d: usize) -> usize {
        match self {
            BellFamily::First => 0,
            BellFamily::Second => d,
        }
    }
}

/// `ω^k` with `ω = exp(-2πi/d)`.
pub fn omega_pow(k: i64, d: usize) -> Complex64 {
    let k = k.rem_euclid(d as i64) as f64;
    Complex64::from_polar(1.0, -2.0 * PI * k / d as f64)
}

/// Cyclic shift `h`.
pub fn shift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(
        d,
        d,
        |r, c| if r == (c + 1) % d { re(1.0) } else { re(0.0) },
    )
}

/// Clock `g`.
pub fn clock(d: usize) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..d).map(|j| omega_pow(j as i64, d)).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// `U_st = h^t g^s`: maps `|j>` to `ω^{s j} |j + t mod d>`.
pub fn weyl_unitary(idx: WeylIndex) -> ComplexMatrix {
    let d = idx.d;
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + idx.t) % d {
            omega_pow((idx.s * c) as i64, d)
        } else {
            re(0.0)
        }
    })
}

#[derive(Debug, Clone)]
pub struct GeneralizedBellState {
    pub index: WeylIndex,
    pub family: BellFamily,
    /// Shape `(d, 2d)`.
    pub state: PureState,
}

/// `(1/√d) (U_st ⊗ I) Σ_i |i, i + offset>` on `d ⊗ 2d`.
pub fn generalized_bell(idx: WeylIndex, family: BellFamily) -> GeneralizedBellState {
    let d = idx.d;
    let shape = BipartiteShape { da: d, db: 2 * d };
    let state = seeded_bell(idx, shape, family.offset(d));
    GeneralizedBellState {
        index: idx,
        family,
        state,
    }
}

/// Standard `d ⊗ d` Bell state `(1/√d) (U_st ⊗ I) Σ_i |i, i>`.
pub fn bell_dd(idx: WeylIndex) -> PureState {
    seeded_bell(
        idx,
        BipartiteShape {
            da: idx.d,
            db: idx.d,
        },
        0,
    )
}

fn seeded_bell(idx: WeylIndex, shape: BipartiteShape, offset: usize) -> PureState {
    let d = idx.d;
    let u = weyl_unitary(idx);
    let norm = 1.0 / (d as f64).sqrt();
    let mut amps = vec![re(0.0); shape.dim()];
    for i in 0..d {
        for a in 0..d {
            amps[shape.index(a, i + offset)] += u[(a, i)] * norm;
        }
    }
    PureState::new(shape, amps).expect("Weyl images of a normalized vector are normalized")
}

/// All `2d^2` generalized Bell states, family major then `(s, t)`.
pub fn all_generalized_bell(d: usize) -> Vec<GeneralizedBellState> {
    BellFamily::BOTH
        .iter()
        .flat_map(|&f| WeylIndex::all(d).map(move |idx| generalized_bell(idx, f)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisViolation {
    pub check: String,
    pub detail: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitaryBasisReport {
    pub d: usize,
    pub worst_orthogonality: f64,
    pub worst_unitarity: f64,
    pub worst_expansion: f64,
    pub violations: Vec<BasisViolation>,
}

impl UnitaryBasisReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const BASIS_TOL: f64 = 1e-10;

/// Checks trace orthogonality, unitarity and expansion completeness of `{U_st}`.
pub fn verify_unitary_basis<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitaryBasisReport> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "d must be at least 2, got {d}"
        )));
    }
    let ops: Vec<(WeylIndex, ComplexMatrix)> =
        WeylIndex::all(d).map(|i| (i, weyl_unitary(i))).collect();
    Ok(verify_operator_set(d, &ops, rng))
}

/// Runs the basis checks on an arbitrary labelled family of `d^2` operators.
pub fn verify_operator_set<R: Rng + ?Sized>(
    d: usize,
    ops: &[(WeylIndex, ComplexMatrix)],
    rng: &mut R,
) -> UnitaryBasisReport {
    let mut violations = Vec::new();
    let mut worst_orth = 0.0_f64;
    for (i, (a, ua)) in ops.iter().enumerate() {
        for (b, ub) in ops.iter().skip(i) {
            let tr = ua.matmul(&ub.adjoint()).trace();
            let expect = if a == b { d as f64 } else { 0.0 };
            let dev = (tr - re(expect)).norm();
            worst_orth = worst_orth.max(dev);
            if dev > BASIS_TOL {
                violations.push(BasisViolation {
                    check: "orthogonality".into(),
                    detail: format!("({},{}) vs ({},{})", a.s, a.t, b.s, b.t),
                    deviation: dev,
                });
            }
        }
    }
    let mut worst_unit = 0.0_f64;
    for (a, u) in ops {
        let dev = u
            .matmul(&u.adjoint())
            .max_abs_diff(&ComplexMatrix::identity(d));
        worst_unit = worst_unit.max(dev);
        if dev > BASIS_TOL {
            violations.push(BasisViolation {
                check: "unitarity".into(),
                detail: format!("({},{})", a.s, a.t),
                deviation: dev,
            });
        }
    }
    // W = (1/d) Σ Tr(U_st^dagger W) U_st for the Hilbert-Schmidt dual
    let mut worst_exp = 0.0_f64;
    for trial in 0..5 {
        let w = haar_random_unitary(d, rng).matmul(&ComplexMatrix::from_fn(d, d, |r, c| {
            re(1.0 + r as f64 - 0.5 * c as f64)
        }));
        let mut acc = ComplexMatrix::zeros(d, d);
        for (_, u) in ops {
            let coeff = u.adjoint().matmul(&w).trace() / d as f64;
            acc = &acc + &u.scale(coeff);
        }
        let dev = acc.max_abs_diff(&w);
        worst_exp = worst_exp.max(dev);
        if dev > BASIS_TOL {
            violations.push(BasisViolation {
                check: "expansion".into(),
                detail: format!("random matrix #{trial}"),
                deviation: dev,
            });
        }
    }
    UnitaryBasisReport {
        d,
        worst_orthogonality: worst_orth,
        worst_unitarity: worst_unit,
        worst_expansion: worst_exp,
        violations,
    }
}

/// Largest entry deviation of `Σ |Φ><Φ|` over all `2d^2` Bell states from the identity.
pub fn bell_completeness_deviation(d: usize) -> f64 {
    let n = 2 * d * d;
    let mut acc = ComplexMatrix::zeros(n, n);
    for b in all_generalized_bell(d) {
        acc = &acc + &b.state.projector();
    }
    acc.max_abs_diff(&ComplexMatrix::identity(n))
}

/// Largest deviation of the Bell-state Gram matrix from the identity.
pub fn bell_orthonormality_deviation(d: usize) -> f64 {
    let states = all_generalized_bell(d);
    let mut worst = 0.0_f64;
    for (i, x) in states.iter().enumerate() {
        for (j, y) in states.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            let g = inner(x.state.amplitudes(), y.state.amplitudes());
            worst = worst.max((g - re(expect)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{seeded_rng, Subsystem};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn expansion_needs_the_adjoint() {
        let d = 3;
        let mut rng = seeded_rng(8);
        let w = crate::qmat::haar_random_unitary(d, &mut rng);
        let mut acc = ComplexMatrix::zeros(d, d);
        for idx in WeylIndex::all(d) {
            let u = weyl_unitary(idx);
            acc = &acc + &u.scale(u.matmul(&w).trace() / d as f64);
        }
        assert!(acc.max_abs_diff(&w) > 0.1);
    }

    #[test]
    fn qubit_operators() {
        let x = weyl_unitary(WeylIndex::new(0, 1, 2).unwrap());
        let expect =
            ComplexMatrix::from_row_major(2, 2, vec![re(0.0), re(1.0), re(1.0), re(0.0)]).unwrap();
        assert!(x.max_abs_diff(&expect) < 1e-15);
        let z = weyl_unitary(WeylIndex::new(1, 0, 2).unwrap());
        assert!(z.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])) < 1e-15);
        assert_eq!(
            weyl_unitary(WeylIndex::new(0, 0, 4).unwrap()),
            ComplexMatrix::identity(4)
        );
    }

    #[test]
    fn weyl_is_h_to_t_times_g_to_s() {
        let d = 3;
        let (h, g) = (shift(d), clock(d));
        for idx in WeylIndex::all(d) {
            let mut m = ComplexMatrix::identity(d);
            for _ in 0..idx.t {
                m = m.matmul(&h);
            }
            for _ in 0..idx.s {
                m = m.matmul(&g);
            }
            assert!(m.max_abs_diff(&weyl_unitary(idx)) < 1e-14);
        }
    }

    #[test]
    fn trace_orthogonality_all_pairs_d3() {
        let ops: Vec<_> = WeylIndex::all(3).map(weyl_unitary).collect();
        for (i, a) in ops.iter().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                let tr = a.matmul(&b.adjoint()).trace();
                let expect = if i == j { 3.0 } else { 0.0 };
                assert!((tr - re(expect)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn seed_bell_states_d2() {
        let s = FRAC_1_SQRT_2;
        let shape = BipartiteShape::new(2, 4).unwrap();
        let b1 = generalized_bell(WeylIndex::new(0, 0, 2).unwrap(), BellFamily::First);
        let b2 = generalized_bell(WeylIndex::new(0, 0, 2).unwrap(), BellFamily::Second);
        let a1 = b1.state.amplitudes();
        let a2 = b2.state.amplitudes();
        assert!((a1[shape.index(0, 0)] - re(s)).norm() < 1e-15);
        assert!((a1[shape.index(1, 1)] - re(s)).norm() < 1e-15);
        assert!((a2[shape.index(0, 2)] - re(s)).norm() < 1e-15);
        assert!((a2[shape.index(1, 3)] - re(s)).norm() < 1e-15);
    }

    #[test]
    fn bell_basis_is_complete_and_orthonormal() {
        for d in [2, 3] {
            assert!(bell_completeness_deviation(d) < 1e-10);
            assert!(bell_orthonormality_deviation(d) < 1e-10);
        }
    }

    #[test]
    fn bell_states_have_maximally_mixed_small_side() {
        for d in [2, 3] {
            let target = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
            for b in all_generalized_bell(d) {
                let red = b.state.to_density().partial_trace(Subsystem::A);
                assert!(red.max_abs_diff(&target) < 1e-10);
            }
        }
    }

    #[test]
    fn basis_report_passes_and_catches_substitution() {
        let mut rng = seeded_rng(5);
        for d in [2, 5] {
            let rep = verify_unitary_basis(d, &mut rng).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
        let mut ops: Vec<_> = WeylIndex::all(3).map(|i| (i, weyl_unitary(i))).collect();
        ops[1].1 = ComplexMatrix::from_fn(3, 3, |r, c| re((r + 2 * c) as f64 * 0.3));
        let rep = verify_operator_set(3, &ops, &mut rng);
        assert!(rep.violations.iter().any(|v| v.check == "orthogonality"));
        assert!(verify_unitary_basis(1, &mut rng).is_err());
    }
}
