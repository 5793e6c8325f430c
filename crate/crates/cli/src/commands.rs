use std::path::Path;

use mmes_core::channels::{
    apply_one_sided_with, evolution_report, half_weight_swap_channel, max_entangled_square, rho_p,
    swap_mixing_channel, xxz_ground_state, TraceCheck, XxzParams,
};
use mmes_core::locc::{discriminate, ricochet_scan, sample_run, RicochetConvention};
use mmes_core::measures::{
    fully_entangled_fraction, negativity, optimal_teleport_fidelity, FefOptions,
};
use mmes_core::mmes::is_mmes;
use mmes_core::qmat::{
    haar_random_state, hermitian_eig, seeded_rng, BipartiteShape, Complex64, ComplexMatrix,
    PureState, Subsystem,
};
use mmes_core::teleport::{mmes_resource_state, simulate_mmes_teleport};
use mmes_core::weyl::{
    bell_completeness_deviation, bell_orthonormality_deviation, verify_unitary_basis, WeylIndex,
};
use mmes_core::Error;
use rand::Rng;
use serde_json::{json, Value};

use crate::report::RunReport;
use crate::statefile::{LoadedState, StateFile};
use crate::InputError;

type CmdResult = Result<RunReport, InputError>;

fn load(path: &Path) -> Result<LoadedState, InputError> {
    let file = StateFile::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    file.load()
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

fn pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

pub fn verify(dims: &[usize], tol: f64, seed: u64, literal_kraus: bool) -> CmdResult {
    if dims.is_empty() {
        return Err(InputError("no dimensions given".into()));
    }
    if let Some(bad) = dims.iter().find(|&&d| d < 2) {
        return Err(InputError(format!("dimension {bad} is below 2")));
    }
    let mut rng = seeded_rng(seed);
    let mut report = RunReport::new("verify", seed);
    report
        .param(
            "d",
            dims.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(","),
        )
        .param("tol", format!("{tol:e}"))
        .param(
            "kraus",
            if literal_kraus {
                "literal"
            } else {
                "corrected"
            },
        );
    let mut per_d = serde_json::Map::new();

    for &d in dims {
        let basis = verify_unitary_basis(d, &mut rng)?;
        let basis_worst = basis
            .worst_orthogonality
            .max(basis.worst_unitarity)
            .max(basis.worst_expansion);
        report.verdict(&format!("d={d} unitary basis"), basis.passed(), basis_worst);

        let complete = bell_completeness_deviation(d);
        report.verdict(
            &format!("d={d} Bell completeness"),
            complete <= 1e-10,
            complete,
        );
        let ortho = bell_orthonormality_deviation(d);
        report.verdict(&format!("d={d} Bell orthonormality"), ortho <= 1e-10, ortho);

        let cert = is_mmes(&mmes_resource_state(d)?, Subsystem::B, tol);
        report.verdict(
            &format!("d={d} resource certified"),
            cert.verdict,
            cert.worst_schmidt_deviation
                .max(cert.worst_cross_trace_norm),
        );

        let mut worst_fid = 0.0_f64;
        let mut worst_prob = 0.0_f64;
        let uniform = 1.0 / (2 * d * d) as f64;
        for _ in 0..5 {
            let psi = haar_random_state(BipartiteShape { da: d, db: 1 }, &mut rng);
            for o in simulate_mmes_teleport(&psi)? {
                worst_fid = worst_fid.max(1.0 - o.fidelity_after_correction);
                worst_prob = worst_prob.max((o.probability - uniform).abs());
            }
        }
        report.verdict(
            &format!("d={d} perfect teleportation"),
            worst_fid <= 1e-9,
            worst_fid,
        );
        report.verdict(
            &format!("d={d} uniform outcomes"),
            worst_prob <= 1e-10,
            worst_prob,
        );

        let ricochet = if is_prime(d) {
            let r = ricochet_scan(d, RicochetConvention::StateFrame);
            report.verdict(&format!("d={d} ricochet identity"), r <= 1e-10, r);
            Some(r)
        } else {
            None
        };
        per_d.insert(
            d.to_string(),
            json!({
                "basis_violations": basis.violations.len(),
                "resource_rank": cert.rank,
                "ricochet": ricochet,
            }),
        );
    }

    let ch = if literal_kraus {
        half_weight_swap_channel()
    } else {
        swap_mixing_channel()
    };
    report.verdict(
        "channel trace preserving",
        ch.trace_preserving(),
        ch.completeness_deviation(),
    );
    let mut worst_neg = 0.0_f64;
    let mut all_certified = true;
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let out = apply_one_sided_with(
            &ch,
            &rho_p(p)?,
            Subsystem::B,
            TraceCheck::AllowNonTracePreserving,
        )?;
        all_certified &= is_mmes(&out, Subsystem::A, tol).verdict;
        worst_neg = worst_neg.max((negativity(&out) - 0.5).abs());
    }
    report.verdict(
        "channel output stays maximally entangled",
        all_certified && worst_neg <= 1e-10,
        worst_neg,
    );

    let mut worst_eig = 0.0_f64;
    for n in [2, 4, 8, 16] {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = &g + &g.adjoint();
        worst_eig = worst_eig.max(hermitian_eig(&h)?.reconstruct().max_abs_diff(&h));
    }
    report.verdict("eigen reconstruction", worst_eig <= 1e-10, worst_eig);
    report.details = json!({ "per_dimension": per_d });
    Ok(report)
}

pub fn mmes_check(input: &Path, side: Subsystem, tol: f64, seed: u64) -> CmdResult {
    let rho = load(input)?.into_density();
    let cert = is_mmes(&rho, side, tol);
    let mut report = RunReport::new("mmes-check", seed);
    report
        .param("input", input.display())
        .param(
            "small_side",
            serde_json::to_value(side)?.as_str().unwrap_or_default(),
        )
        .param("tol", format!("{tol:e}"));
    report.verdict(
        "mixed maximally entangled",
        cert.verdict,
        cert.worst_schmidt_deviation
            .max(cert.worst_cross_trace_norm)
            .max(cert.reduced_small_side_deviation),
    );
    report.details = serde_json::to_value(&cert)?;
    Ok(report)
}

pub fn teleport(d: usize, state: Option<&Path>, seed: u64) -> CmdResult {
    if d < 2 {
        return Err(InputError(format!("d must be at least 2, got {d}")));
    }
    let shape = BipartiteShape { da: d, db: 1 };
    let psi = match state {
        Some(path) => match load(path)? {
            LoadedState::Pure(p) if p.dim() == d => PureState::new(shape, p.amplitudes().to_vec())?,
            LoadedState::Pure(p) => {
                return Err(InputError(format!(
                    "{}: input has dimension {}, expected {d}",
                    path.display(),
                    p.dim()
                )))
            }
            LoadedState::Density(_) => {
                return Err(InputError(format!(
                    "{}: teleport input must be pure",
                    path.display()
                )))
            }
        },
        None => haar_random_state(shape, &mut seeded_rng(seed)),
    };
    let outcomes = simulate_mmes_teleport(&psi)?;
    let uniform = 1.0 / (2 * d * d) as f64;
    let worst_fid = outcomes
        .iter()
        .map(|o| 1.0 - o.fidelity_after_correction)
        .fold(0.0, f64::max);
    let worst_prob = outcomes
        .iter()
        .map(|o| (o.probability - uniform).abs())
        .fold(0.0, f64::max);
    let mut report = RunReport::new("teleport", seed);
    report.param("d", d).param(
        "input",
        state.map_or("random".to_string(), |p| p.display().to_string()),
    );
    report.verdict("perfect teleportation", worst_fid <= 1e-9, worst_fid);
    report.verdict("uniform outcomes", worst_prob <= 1e-10, worst_prob);
    report.details = json!({
        "input": psi.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "outcomes": outcomes,
    });
    Ok(report)
}

pub fn channel_demo(p: f64, seed: u64) -> CmdResult {
    let ch = swap_mixing_channel();
    let family = evolution_report(&ch, &rho_p(p)?, Subsystem::B)?;
    let square = evolution_report(&ch, &max_entangled_square(4)?, Subsystem::B)?;
    let mut report = RunReport::new("channel-demo", seed);
    report.param("p", p);
    report.verdict(
        "rho_p stays maximally entangled",
        family.mmes_after && (family.negativity_after - 0.5).abs() <= 1e-10,
        (family.negativity_after - 0.5).abs(),
    );
    let drop = square.negativity_before - square.negativity_after;
    report.verdict("square state loses negativity", drop >= 0.1, drop);
    report.details = json!({ "rho_p": family, "square_4x4": square });
    Ok(report)
}

fn parse_subset(d: usize, text: &str) -> Result<Vec<WeylIndex>, InputError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
            let [s, t] = parts.as_slice() else {
                return Err(InputError(format!(
                    "candidate {pair:?} is not of the form s,t"
                )));
            };
            let s: usize = s
                .parse()
                .map_err(|_| InputError(format!("bad index in {pair:?}")))?;
            let t: usize = t
                .parse()
                .map_err(|_| InputError(format!("bad index in {pair:?}")))?;
            Ok(WeylIndex::new(s, t, d)?)
        })
        .collect()
}

pub fn locc(d: usize, subset: &str, trials: usize, seed: u64) -> CmdResult {
    if trials == 0 {
        return Err(InputError("trials must be positive".into()));
    }
    let candidates = parse_subset(d, subset)?;
    let mut report = RunReport::new("locc", seed);
    report
        .param("d", d)
        .param("subset", subset)
        .param("trials", trials);
    let protocol = match discriminate(&candidates, d) {
        Ok(p) => p,
        Err(Error::NoPerfectSetting {
            best_overlaps,
            witness,
        }) => {
            report.verdict("perfect single setting exists", false, best_overlaps as f64);
            report.details = json!({ "best_setting": witness, "overlapping_pairs": best_overlaps });
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    let mut rng = seeded_rng(seed);
    let mut rates = Vec::new();
    for &c in &candidates {
        rates.push(json!({ "candidate": [c.s, c.t], "success_rate": sample_run(&protocol, c, trials, &mut rng)? }));
    }
    let min_rate = rates
        .iter()
        .filter_map(|r| r["success_rate"].as_f64())
        .fold(1.0, f64::min);
    report.verdict(
        "perfect single setting exists",
        true,
        protocol.success_probability,
    );
    report.verdict("sampled success rate", min_rate == 1.0, min_rate);
    let lookup: Vec<Value> = protocol
        .lookup
        .iter()
        .map(|(&(a, b), &i)| json!({ "alice": a, "bob": b, "candidate": [candidates[i].s, candidates[i].t] }))
        .collect();
    report.details = json!({
        "setting": protocol.setting.label,
        "success_probability": protocol.success_probability,
        "lookup": lookup,
        "rates": rates,
    });
    Ok(report)
}

pub fn fef(input: &Path, restarts: usize, max_iter: usize, tol: f64, seed: u64) -> CmdResult {
    let rho = load(input)?.into_density();
    let shape = rho.shape();
    if shape.da != shape.db {
        return Err(InputError(format!(
            "{}: fully entangled fraction needs a square shape, got {}x{}",
            input.display(),
            shape.da,
            shape.db
        )));
    }
    let opts = FefOptions {
        restarts,
        max_iter,
        tol,
    };
    let res = fully_entangled_fraction(&rho, opts, &mut seeded_rng(seed))?;
    let d = shape.da;
    let floor = 1.0 / (d * d) as f64;
    let mut report = RunReport::new("fef", seed);
    report
        .param("input", input.display())
        .param("restarts", restarts)
        .param("max_iter", max_iter)
        .param("tol", format!("{tol:e}"));
    report.verdict(
        "value within [1/d^2, 1]",
        res.value >= floor - 1e-9 && res.value <= 1.0,
        res.value,
    );
    report.details = json!({
        "value": res.value,
        "converged": res.converged,
        "restarts_used": res.restarts_used,
        "optimal_teleport_fidelity": optimal_teleport_fidelity(res.value, d)?,
        "optimizer": pairs(&res.optimizer),
    });
    Ok(report)
}

pub fn xxz(j: f64, delta: f64, seed: u64) -> CmdResult {
    if !j.is_finite() || !delta.is_finite() {
        return Err(InputError("couplings must be finite".into()));
    }
    let g = xxz_ground_state(XxzParams::new(j, delta));
    let mut report = RunReport::new("xxz", seed);
    report.param("j", j).param("delta", delta);
    report.verdict(
        "unique ground state",
        g.degeneracy == 1,
        g.degeneracy as f64,
    );
    report.details = serde_json::to_value(&g)?;
    Ok(report)
}
