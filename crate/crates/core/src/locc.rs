//! Local discrimination of the mixtures
//! `χ_st = ½(|Φ¹_st><Φ¹_st| + |Φ²_st><Φ²_st|)` on `d ⊗ 2d`.
//!
//! Alice applies a `d x d` unitary, Bob a `2d x 2d` unitary, both measure in
//! the computational basis and compare notes. A setting is perfect for a
//! candidate set when the candidates' joint outcome supports are pairwise
//! disjoint.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{vec_norm, ComplexMatrix, DensityMatrix};
use crate::weyl::{generalized_bell, omega_pow, weyl_unitary, BellFamily, WeylIndex};

/// Outcomes with probability at or below this are outside a support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// `Σ_{i=k}^{d} i` for 0-based `k`, i.e. `(d+k)(d-k+1)/2`.
fn tail_sum(k: usize, d: usize) -> i64 {
    let (d, k) = (d as i64, k as i64);
    (d + k) * (d - k + 1) / 2
}

/// `(H_α)_jk = ω^{-jk - α Σ_{i=k}^{d} i} / √d`.
pub fn gen_hadamard(alpha: usize, d: usize) -> ComplexMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |j, k| {
        let exponent = -((j * k) as i64) - alpha as i64 * tail_sum(k, d);
        omega_pow(exponent, d) * norm
    })
}

/// `H'_α = H_α ⊕ H_α` on the `2d`-dimensional side.
pub fn extended_hadamard(alpha: usize, d: usize) -> ComplexMatrix {
    let h = gen_hadamard(alpha, d);
    h.direct_sum(&h)
}

/// `χ_st` on shape `(d, 2d)`.
pub fn chi_state(idx: WeylIndex) -> DensityMatrix {
    let b1 = generalized_bell(idx, BellFamily::First).state;
    let b2 = generalized_bell(idx, BellFamily::Second).state;
    DensityMatrix::mixture(&[(0.5, &b1), (0.5, &b2)]).expect("equal mixture of two states")
}

/// Meaning of the transposition in the ricochet identity
/// `(I ⊗ H'_j)|Φ^i_st> = (H_j^T ⊗ I)|Φ^i_st>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RicochetConvention {
    /// Transpose taken in the Schmidt frame of `|Φ^i_st>`: the A-side
    /// operator is `U_st H_j^T U_st^dagger`. Holds for every index.
    #[default]
    StateFrame,
    /// Plain matrix transpose `H_j^T`; exact only when `H_j^T` commutes with
    /// `U_st` (always at `s = t = 0`).
    Literal,
}

/// `|| (I ⊗ on_b)|ψ> - (on_a ⊗ I)|ψ> ||` for a `d ⊗ 2d` ket.
pub fn two_sided_deviation(psi: &[Complex64], on_a: &ComplexMatrix, on_b: &ComplexMatrix) -> f64 {
    let da = on_a.rows();
    let db = on_b.rows();
    let lhs = ComplexMatrix::identity(da).kron(on_b).mul_vec(psi);
    let rhs = on_a.kron(&ComplexMatrix::identity(db)).mul_vec(psi);
    let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    vec_norm(&diff)
}

/// Vector-norm deviation between the two sides of the ricochet identity.
pub fn ricochet_check(
    j: usize,
    idx: WeylIndex,
    family: BellFamily,
    convention: RicochetConvention,
) -> f64 {
    let d = idx.d;
    let bell = generalized_bell(idx, family);
    let h_t = gen_hadamard(j, d).transpose();
    let on_a = match convention {
        RicochetConvention::Literal => h_t,
        RicochetConvention::StateFrame => {
            let u = weyl_unitary(idx);
            u.matmul(&h_t).matmul(&u.adjoint())
        }
    };
    two_sided_deviation(bell.state.amplitudes(), &on_a, &extended_hadamard(j, d))
}

/// Worst ricochet deviation over every `(j, s, t, family)` at dimension `d`.
pub fn ricochet_scan(d: usize, convention: RicochetConvention) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..d {
        for idx in WeylIndex::all(d) {
            for f in BellFamily::BOTH {
                worst = worst.max(ricochet_check(j, idx, f, convention));
            }
        }
    }
    worst
}

/// Which party's transform is complex conjugated in the Hadamard settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoccConvention {
    /// `H_α ⊗ H'_α^*`
    #[default]
    ConjugateBob,
    /// `H_α^* ⊗ H'_α`
    ConjugateAlice,
    /// `H_α ⊗ H'_α`
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum SettingLabel {
    Computational,
    Hadamard(usize),
}

impl fmt::Display for SettingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SettingLabel::Computational => write!(f, "computational"),
            SettingLabel::Hadamard(a) => write!(f, "hadamard({a})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementSetting {
    pub label: SettingLabel,
    pub alice_transform: ComplexMatrix,
    pub bob_transform: ComplexMatrix,
}

impl MeasurementSetting {
    pub fn computational(d: usize) -> Self {
        Self {
            label: SettingLabel::Computational,
            alice_transform: ComplexMatrix::identity(d),
            bob_transform: ComplexMatrix::identity(2 * d),
        }
    }

    pub fn hadamard(alpha: usize, d: usize, convention: LoccConvention) -> Self {
        let h = gen_hadamard(alpha, d);
        let hp = extended_hadamard(alpha, d);
        let (alice_transform, bob_transform) = match convention {
            LoccConvention::ConjugateBob => (h, hp.conj()),
            LoccConvention::ConjugateAlice => (h.conj(), hp),
            LoccConvention::Plain => (h, hp),
        };
        Self {
            label: SettingLabel::Hadamard(alpha),
            alice_transform,
            bob_transform,
        }
    }

    /// Computational setting followed by `H_0 .. H_{d-1}`.
    pub fn all(d: usize, convention: LoccConvention) -> Vec<Self> {
        std::iter::once(Self::computational(d))
            .chain((0..d).map(|a| Self::hadamard(a, d, convention)))
            .collect()
    }

    fn d(&self) -> usize {
        self.alice_transform.rows()
    }
}

/// Joint distribution `P(a, b)`, flat index `a * 2d + b`.
pub fn outcome_distribution(setting: &MeasurementSetting, idx: WeylIndex) -> Vec<f64> {
    let d = idx.d;
    let mut p = vec![0.0; 2 * d * d];
    let vb_t = setting.bob_transform.transpose();
    for f in BellFamily::BOTH {
        // (V_A ⊗ V_B)|ψ> has coefficient matrix V_A M V_B^T
        let m = generalized_bell(idx, f).state.coefficient_matrix();
        let out = setting.alice_transform.matmul(&m).matmul(&vb_t);
        for (x, z) in p.iter_mut().zip(out.as_slice()) {
            *x += 0.5 * z.norm_sqr();
        }
    }
    p
}

fn support(dist: &[f64]) -> Vec<usize> {
    (0..dist.len())
        .filter(|&k| dist[k] > SUPPORT_CUTOFF)
        .collect()
}

#[derive(Debug, Clone)]
pub struct DiscriminationProtocol {
    pub d: usize,
    pub candidates: Vec<WeylIndex>,
    pub setting: MeasurementSetting,
    /// Joint outcome `(a, b)` to position in `candidates`.
    pub lookup: BTreeMap<(usize, usize), usize>,
    /// Under a uniform prior over the candidates.
    pub success_probability: f64,
}

impl DiscriminationProtocol {
    pub fn is_perfect(&self) -> bool {
        (self.success_probability - 1.0).abs() < 1e-12
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

/// Precomputed outcome distributions for every `χ_st` under every setting.
pub struct LoccScanner {
    d: usize,
    settings: Vec<MeasurementSetting>,
    /// `dists[setting][s * d + t]`
    dists: Vec<Vec<Vec<f64>>>,
}

impl LoccScanner {
    pub fn new(d: usize, convention: LoccConvention) -> Result<Self> {
        if !is_prime(d) {
            return Err(Error::NonPrimeDimension(d));
        }
        let settings = MeasurementSetting::all(d, convention);
        let dists = settings
            .iter()
            .map(|st| {
                WeylIndex::all(d)
                    .map(|i| outcome_distribution(st, i))
                    .collect()
            })
            .collect();
        Ok(Self { d, settings, dists })
    }

    pub fn settings(&self) -> &[MeasurementSetting] {
        &self.settings
    }

    fn dist(&self, setting: usize, idx: WeylIndex) -> &[f64] {
        &self.dists[setting][idx.s * self.d + idx.t]
    }

    fn validate(&self, candidates: &[WeylIndex]) -> Result<()> {
        if candidates.is_empty() {
            return Err(Error::InvalidArgument("no candidates".into()));
        }
        for (i, c) in candidates.iter().enumerate() {
            if c.d != self.d || c.s >= self.d || c.t >= self.d {
                return Err(Error::InvalidArgument(format!(
                    "candidate ({}, {}) does not belong to d = {}",
                    c.s, c.t, self.d
                )));
            }
            if candidates[..i].contains(c) {
                return Err(Error::InvalidArgument(format!(
                    "candidate ({}, {}) listed twice",
                    c.s, c.t
                )));
            }
        }
        Ok(())
    }

    /// Number of candidate pairs whose supports intersect under `setting`.
    fn overlapping_pairs(&self, setting: usize, candidates: &[WeylIndex]) -> usize {
        let supports: Vec<Vec<usize>> = candidates
            .iter()
            .map(|&c| support(self.dist(setting, c)))
            .collect();
        let mut count = 0;
        for i in 0..supports.len() {
            for j in (i + 1)..supports.len() {
                if supports[i]
                    .iter()
                    .any(|k| supports[j].binary_search(k).is_ok())
                {
                    count += 1;
                }
            }
        }
        count
    }

    /// Maximum-likelihood lookup and its success probability under a
    /// uniform prior.
    fn build(&self, setting: usize, candidates: &[WeylIndex]) -> DiscriminationProtocol {
        let d = self.d;
        let mut lookup = BTreeMap::new();
        let mut success = 0.0;
        for k in 0..2 * d * d {
            let (best, p) = candidates
                .iter()
                .enumerate()
                .map(|(i, &c)| (i, self.dist(setting, c)[k]))
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, x| if x.1 > acc.1 { x } else { acc },
                );
            if p > SUPPORT_CUTOFF {
                lookup.insert((k / (2 * d), k % (2 * d)), best);
                success += p;
            }
        }
        DiscriminationProtocol {
            d,
            candidates: candidates.to_vec(),
            setting: self.settings[setting].clone(),
            lookup,
            success_probability: (success / candidates.len() as f64).min(1.0),
        }
    }

    /// First setting whose candidate supports are pairwise disjoint.
    pub fn protocol_for(&self, candidates: &[WeylIndex]) -> Result<DiscriminationProtocol> {
        self.validate(candidates)?;
        let mut best = (usize::MAX, 0);
        for s in 0..self.settings.len() {
            let overlaps = self.overlapping_pairs(s, candidates);
            if overlaps == 0 {
                return Ok(self.build(s, candidates));
            }
            if overlaps < best.0 {
                best = (overlaps, s);
            }
        }
        Err(Error::NoPerfectSetting {
            best_overlaps: best.0,
            witness: self.settings[best.1].label.to_string(),
        })
    }
}

/// Searches `{computational} ∪ {hadamard(α)}` for a perfect single setting.
pub fn discriminate(candidates: &[WeylIndex], d: usize) -> Result<DiscriminationProtocol> {
    discriminate_with(candidates, d, LoccConvention::default())
}

pub fn discriminate_with(
    candidates: &[WeylIndex],
    d: usize,
    convention: LoccConvention,
) -> Result<DiscriminationProtocol> {
    LoccScanner::new(d, convention)?.protocol_for(candidates)
}

/// Draws joint outcomes of `secret` under the protocol's setting.
pub fn sample_outcomes<R: Rng + ?Sized>(
    protocol: &DiscriminationProtocol,
    secret: WeylIndex,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    if !protocol.candidates.contains(&secret) {
        return Err(Error::SecretNotCandidate);
    }
    let dist = outcome_distribution(&protocol.setting, secret);
    let sampler = WeightedIndex::new(&dist)
        .map_err(|e| Error::InvalidState(format!("outcome distribution: {e}")))?;
    let two_d = 2 * protocol.setting.d();
    Ok((0..trials)
        .map(|_| {
            let k = sampler.sample(rng);
            (k / two_d, k % two_d)
        })
        .collect())
}

/// Fraction of sampled rounds in which the lookup names `secret`.
pub fn sample_run<R: Rng + ?Sized>(
    protocol: &DiscriminationProtocol,
    secret: WeylIndex,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let outcomes = sample_outcomes(protocol, secret, trials, rng)?;
    let hits = outcomes
        .iter()
        .filter(|o| {
            protocol
                .lookup
                .get(o)
                .is_some_and(|&i| protocol.candidates[i] == secret)
        })
        .count();
    Ok(hits as f64 / trials as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub d: usize,
    pub max_size: usize,
    pub subsets_checked: usize,
    /// Subsets within the bound that no single setting separates.
    pub failures: Vec<Vec<(usize, usize)>>,
    /// How often each setting was the first perfect one.
    pub setting_usage: BTreeMap<String, usize>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Exhaustive check of every subset of `{χ_st}` with `2 <= l <= max_size`
/// and `l(l-1)/2 <= d`.
pub fn pair_bound_scan(
    d: usize,
    max_size: usize,
    convention: LoccConvention,
) -> Result<ScanReport> {
    let scanner = LoccScanner::new(d, convention)?;
    let all: Vec<WeylIndex> = WeylIndex::all(d).collect();
    let mut report = ScanReport {
        d,
        max_size,
        subsets_checked: 0,
        failures: Vec::new(),
        setting_usage: BTreeMap::new(),
    };
    for l in 2..=max_size {
        if l * (l - 1) / 2 > d {
            break;
        }
        for combo in combinations(all.len(), l) {
            let cands: Vec<WeylIndex> = combo.iter().map(|&i| all[i]).collect();
            report.subsets_checked += 1;
            match scanner.protocol_for(&cands) {
                Ok(p) => {
                    *report
                        .setting_usage
                        .entry(p.setting.label.to_string())
                        .or_default() += 1;
                }
                Err(Error::NoPerfectSetting { .. }) => {
                    report
                        .failures
                        .push(cands.iter().map(|c| (c.s, c.t)).collect());
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

/// Number of `k`-subsets of `n` items.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
