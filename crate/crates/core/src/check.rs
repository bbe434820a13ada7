//! Invariant suite behind `hornlr check`.
//!
//! Every check is seeded and reports counts only (no timings), so two runs
//! with the same configuration serialize to identical bytes.

use num_bigint::BigUint;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::converse_scan::{scan, ScanTarget, DEFAULT_C0};
use crate::error::Result;
use crate::horn_realize::{verify_theorem1_sweep, RealizeConfig};
use crate::lr::{balanced_frame_triples, lr_character_oracle, lr_general, lr_tableaux};
use crate::schur_weyl::{
    kw_bound, measurement_distribution, pinsker_gap, projector_trace_direct, projector_trace_schur,
    random_density, DensityOperator,
};
use crate::symfun::{gl_dim, sym_dim};
use crate::weights::{enumerate_frames, normalize, shift_triple, SpectralTriple};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckConfig {
    pub quick: bool,
    pub seed: u64,
    pub direct_cap: usize,
    pub realize: RealizeConfig,
}

impl CheckConfig {
    pub fn new(quick: bool, seed: u64) -> Self {
        CheckConfig {
            quick,
            seed,
            direct_cap: crate::schur_weyl::DEFAULT_DIRECT_CAP,
            realize: RealizeConfig {
                seed,
                ..Default::default()
            },
        }
    }

    fn pick<T>(&self, quick: T, full: T) -> T {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The search ran out of budget; not a counterexample.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    pub cases: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<f64>,
}

impl CheckOutcome {
    fn from_violations(name: &str, cases: usize, violations: Vec<String>) -> Self {
        CheckOutcome {
            name: name.to_string(),
            status: if violations.is_empty() {
                Status::Pass
            } else {
                Status::Fail
            },
            cases,
            violations: violations.len(),
            first_violation: violations.into_iter().next(),
            worst: None,
        }
    }

    fn with_worst(mut self, worst: f64) -> Self {
        self.worst = Some(worst);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub quick: bool,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

pub fn run_checks(cfg: &CheckConfig) -> Result<CheckReport> {
    let checks = vec![
        lr_agreement(cfg)?,
        lr_symmetry(cfg)?,
        semigroup(cfg)?,
        saturation(cfg)?,
        shift_invariance(cfg)?,
        schur_weyl_dimensions(cfg)?,
        route_agreement(cfg)?,
        distribution_and_bound(cfg)?,
        pinsker(cfg),
        horn_sweep(cfg)?,
        converse(cfg)?,
    ];
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(CheckReport {
        quick: cfg.quick,
        seed: cfg.seed,
        passed,
        checks,
    })
}

fn rng_for(cfg: &CheckConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng
}

fn lr_agreement(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let (boxes, d_max) = cfg.pick((6, 3), (8, 4));
    let triples: Vec<SpectralTriple> = (1..=d_max)
        .flat_map(|d| balanced_frame_triples(boxes, d))
        .collect();
    let bad = triples
        .par_iter()
        .map(|t| {
            let a = lr_tableaux(t)?.coefficient;
            let b = lr_character_oracle(t)?.coefficient;
            Ok((a != b).then(|| format!("{t}: tableaux {a}, oracle {b}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckOutcome::from_violations(
        "lr_tableaux_matches_character_oracle",
        triples.len(),
        bad.into_iter().flatten().collect(),
    ))
}

fn lr_symmetry(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let boxes = cfg.pick(6, 8);
    let triples = balanced_frame_triples(boxes, 3);
    let bad = triples
        .par_iter()
        .map(|t| {
            let a = lr_tableaux(t)?.coefficient;
            let b = lr_tableaux(&t.swapped())?.coefficient;
            Ok((a != b).then(|| format!("{t}: {a} vs swapped {b}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckOutcome::from_violations(
        "lr_symmetric_in_mu_nu",
        triples.len(),
        bad.into_iter().flatten().collect(),
    ))
}

fn nonzero_triples(max_boxes: usize, d: usize) -> Result<Vec<SpectralTriple>> {
    let mut out = Vec::new();
    for t in balanced_frame_triples(max_boxes, d) {
        if lr_tableaux(&t)?.is_nonzero() {
            out.push(t);
        }
    }
    Ok(out)
}

fn semigroup(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let pairs = cfg.pick(100, 500);
    let pool = nonzero_triples(6, 3)?;
    let mut rng = rng_for(cfg, 1);
    let sampled: Vec<(SpectralTriple, SpectralTriple)> = (0..pairs)
        .map(|_| {
            let a = pool.choose(&mut rng).expect("nonempty pool").clone();
            let b = pool.choose(&mut rng).expect("nonempty pool").clone();
            (a, b)
        })
        .collect();
    let bad = sampled
        .par_iter()
        .map(|(a, b)| {
            let s = a.sum(b);
            let c = lr_tableaux(&s)?.coefficient;
            Ok((c == 0).then(|| format!("{a} + {b} = {s} has coefficient 0")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckOutcome::from_violations(
        "semigroup",
        pairs,
        bad.into_iter().flatten().collect(),
    ))
}

fn saturation(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let boxes = cfg.pick(4, 6);
    let triples = balanced_frame_triples(boxes, 3);
    let bad = triples
        .par_iter()
        .map(|t| {
            if lr_tableaux(t)?.is_nonzero() {
                return Ok(None);
            }
            let doubled = lr_tableaux(&t.scaled(2))?.coefficient;
            Ok((doubled != 0).then(|| format!("{t}: c = 0 but doubled c = {doubled}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckOutcome::from_violations(
        "saturation_at_scale_two",
        triples.len(),
        bad.into_iter().flatten().collect(),
    ))
}

fn shift_invariance(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let samples = cfg.pick(50, 200);
    let pool = balanced_frame_triples(6, 3);
    let mut rng = rng_for(cfg, 2);
    let bases: Vec<SpectralTriple> = (0..samples)
        .map(|_| {
            let t = pool.choose(&mut rng).expect("nonempty pool");
            // move into weights with negative parts
            shift_triple(t, -rng.random_range(0..=3), -rng.random_range(0..=3))
        })
        .collect();
    let bad = bases
        .par_iter()
        .map(|t| {
            let base = lr_general(t)?.coefficient;
            for m in -2..=2 {
                for n in -2..=2 {
                    let s = shift_triple(t, m, n);
                    let c = lr_general(&s)?.coefficient;
                    if c != base {
                        return Ok(Some(format!("{t}: {base}, shifted by ({m},{n}): {c}")));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckOutcome::from_violations(
        "shift_invariance",
        samples,
        bad.into_iter().flatten().collect(),
    ))
}

fn schur_weyl_dimensions(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let k_max = cfg.pick(6, 10);
    let mut cases = 0;
    let mut bad = Vec::new();
    for d in 1..=3usize {
        for k in 0..=k_max {
            cases += 1;
            let mut total = BigUint::from(0u32);
            for f in enumerate_frames(k, d) {
                total += gl_dim(&f, d)? * sym_dim(&f)?;
            }
            let expected = BigUint::from(d).pow(k as u32);
            if total != expected {
                bad.push(format!("d={d}, k={k}: {total} != {expected}"));
            }
        }
    }
    Ok(CheckOutcome::from_violations(
        "schur_weyl_dimension_count",
        cases,
        bad,
    ))
}

fn route_agreement(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let k_max = cfg.pick(4, 6);
    let mut rng = rng_for(cfg, 3);
    let mut cases = 0;
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for d in 1..=3usize {
        let rho = random_density(d, &mut rng);
        for k in 1..=k_max {
            for f in enumerate_frames(k, d) {
                let a = projector_trace_schur(&rho, &f)?;
                let b = projector_trace_direct(&rho, &f, cfg.direct_cap)?;
                cases += 1;
                worst = worst.max((a - b).abs());
                if (a - b).abs() > 1e-10 {
                    bad.push(format!("d={d}, lambda={f}: schur {a:e}, direct {b:e}"));
                }
            }
        }
    }
    Ok(CheckOutcome::from_violations("projector_routes_agree", cases, bad).with_worst(worst))
}

fn distribution_and_bound(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let (states, k_max) = cfg.pick((10, 6), (100, 10));
    let mut rng = rng_for(cfg, 4);
    let rhos: Vec<DensityOperator> = (0..states)
        .map(|i| random_density(2 + i % 2, &mut rng))
        .collect();
    let mut cases = 0;
    let mut bad = Vec::new();
    for rho in &rhos {
        let r = rho.spectrum();
        for k in 1..=k_max {
            let dist = measurement_distribution(rho, k)?;
            if (dist.total() - 1.0).abs() > 1e-9 {
                bad.push(format!("k={k}: distribution sums to {}", dist.total()));
            }
            for (f, p) in &dist.entries {
                cases += 1;
                let bound = kw_bound(f, &r, rho.dim())?;
                if *p > bound + 1e-12 {
                    bad.push(format!(
                        "lambda={f}: probability {p:e} above bound {bound:e}"
                    ));
                }
            }
        }
    }
    Ok(CheckOutcome::from_violations(
        "outcome_probability_bound",
        cases,
        bad,
    ))
}

fn pinsker(cfg: &CheckConfig) -> CheckOutcome {
    let samples = cfg.pick(200, 1000);
    let mut rng = rng_for(cfg, 5);
    let mut bad = Vec::new();
    for _ in 0..samples {
        let d = rng.random_range(2..=4);
        let p = random_density(d, &mut rng).spectrum();
        let q = random_density(d, &mut rng).spectrum();
        let gap = pinsker_gap(&p, &q);
        if gap < -1e-12 {
            bad.push(format!("{:?} vs {:?}: gap {gap:e}", p.values(), q.values()));
        }
    }
    CheckOutcome::from_violations("pinsker", samples, bad)
}

fn horn_sweep(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let (boxes, d_max) = cfg.pick((4, 3), (6, 3));
    let mut cases = 0;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for d in 1..=d_max {
        let report = verify_theorem1_sweep(boxes, d, &cfg.realize)?;
        cases += report.triples;
        worst = worst.max(report.worst_residual);
        failures.extend(
            report
                .failures
                .iter()
                .map(|t| format!("{t} not realized within budget")),
        );
    }
    let mut out = CheckOutcome::from_violations("horn_realization_sweep", cases, failures);
    if out.status == Status::Fail {
        out.status = Status::Inconclusive;
    }
    Ok(out.with_worst(worst))
}

fn converse(cfg: &CheckConfig) -> Result<CheckOutcome> {
    let (targets, ns): (usize, &[usize]) = cfg.pick((4, &[8, 16]), (20, &[8, 16, 32]));
    let mut rng = rng_for(cfg, 6);
    let mut bad = Vec::new();
    for i in 0..targets {
        let a = random_diagonal(2, &mut rng)?;
        let b = random_diagonal(2, &mut rng)?;
        let p = if i % 2 == 0 { 0.25 } else { 0.5 };
        let target = ScanTarget::from_states(&a, &b, p)?;
        let report = scan(&target, ns, DEFAULT_C0)?;
        for n in &report.summary.missing {
            bad.push(format!("target {i}: no witness at n={n}"));
        }
        for w in &report.witnesses {
            if w.distances.iter().any(|&x| x > w.epsilon) {
                bad.push(format!(
                    "target {i}: witness at n={} outside its balls",
                    w.n
                ));
            }
            let bar = normalize(&w.triple.lambda)?;
            if (bar.l1_distance(&target.r_c) - w.distances[2]).abs() > 1e-12 {
                bad.push(format!("target {i}: inconsistent distance at n={}", w.n));
            }
        }
    }
    Ok(CheckOutcome::from_violations(
        "converse_scan_witnesses",
        targets * ns.len(),
        bad,
    ))
}

/// Diagonal state with a flat-Dirichlet spectrum.
pub(crate) fn random_diagonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityOperator> {
    let x: Vec<f64> = (0..d)
        .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let s: f64 = x.iter().sum();
    DensityOperator::from_diagonal(&x.iter().map(|v| v / s).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes_and_is_reproducible() {
        let cfg = CheckConfig::new(true, 0);
        let a = run_checks(&cfg).unwrap();
        assert!(a.passed, "{a:#?}");
        let b = run_checks(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
