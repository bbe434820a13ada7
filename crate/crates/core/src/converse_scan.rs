//! Integer witnesses for the converse direction: given `rho^A`, `rho^B` and
//! `p`, find triples of frames with nonzero LR coefficient whose
//! normalizations approach `(Spec rho^A, Spec rho^B, Spec rho^C)`,
//! `rho^C = p rho^A + (1-p) rho^B`.
//!
//! At scale `n` the triple has `|mu| = k = round(p n)`, `|nu| = n - k`,
//! `|lambda| = n`, and each normalized weight must lie in the ℓ₁ ball of
//! radius `epsilon_schedule(n, d, c0)` around its target spectrum.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lr::{lr_character_oracle, lr_tableaux};
use crate::schur_weyl::DensityOperator;
use crate::weights::{
    enumerate_frames, normalize, DominantWeight, NormalizedSpectrum, SpectralTriple,
};

pub const DEFAULT_C0: f64 = 2.0;

/// Witnesses with `|lambda|` up to this size are re-checked with the
/// character oracle.
const ORACLE_CHECK_MAX_BOXES: i64 = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTarget {
    pub r_a: NormalizedSpectrum,
    pub r_b: NormalizedSpectrum,
    pub r_c: NormalizedSpectrum,
    pub p: f64,
}

impl ScanTarget {
    pub fn new(
        r_a: NormalizedSpectrum,
        r_b: NormalizedSpectrum,
        r_c: NormalizedSpectrum,
        p: f64,
    ) -> Result<Self> {
        if r_a.len() != r_b.len() || r_a.len() != r_c.len() {
            return Err(Error::domain("target spectra must share the dimension d"));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!("p = {p} is outside (0, 1]")));
        }
        Ok(ScanTarget { r_a, r_b, r_c, p })
    }

    /// Target built from two states, with `r_c` the spectrum of their mixture.
    pub fn from_states(rho_a: &DensityOperator, rho_b: &DensityOperator, p: f64) -> Result<Self> {
        let r_c = mixture_spectrum(rho_a, rho_b, p)?;
        Self::new(rho_a.spectrum(), rho_b.spectrum(), r_c, p)
    }

    pub fn dim(&self) -> usize {
        self.r_a.len()
    }

    /// Swaps the roles of `A` and `B` (`p -> 1 - p`).
    pub fn swapped(&self) -> Result<Self> {
        Self::new(
            self.r_b.clone(),
            self.r_a.clone(),
            self.r_c.clone(),
            1.0 - self.p,
        )
    }

    /// `k = round(p n)`, rounding halves up.
    pub fn split(&self, n: usize) -> usize {
        ((self.p * n as f64) + 0.5).floor() as usize
    }
}

/// Descending spectrum of `p rho^A + (1-p) rho^B`.
pub fn mixture_spectrum(
    rho_a: &DensityOperator,
    rho_b: &DensityOperator,
    p: f64,
) -> Result<NormalizedSpectrum> {
    if rho_a.dim() != rho_b.dim() {
        return Err(Error::domain("states have different dimensions"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("p = {p} is outside [0, 1]")));
    }
    let mix = rho_a
        .operator()
        .scale(p)
        .add(&rho_b.operator().scale(1.0 - p));
    Ok(DensityOperator::from_hermitian(mix)?.spectrum())
}

/// `c0 · d · sqrt(ln n / n)`.
pub fn epsilon_schedule(n: usize, d: usize, c0: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("epsilon schedule needs n >= 2"));
    }
    let nf = n as f64;
    Ok(c0 * d as f64 * (nf.ln() / nf).sqrt())
}

/// A candidate triple with its ℓ₁ distances to the three targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub triple: SpectralTriple,
    pub distances: [f64; 3],
}

impl Candidate {
    /// `(d_mu + d_nu) + d_lambda`; symmetric in `mu <-> nu` bit for bit.
    pub fn total(&self) -> f64 {
        (self.distances[0] + self.distances[1]) + self.distances[2]
    }

    fn rank(&self, other: &Self) -> Ordering {
        self.total()
            .total_cmp(&other.total())
            .then_with(|| other.triple.lambda.cmp(&self.triple.lambda))
            .then_with(|| other.triple.mu.cmp(&self.triple.mu))
            .then_with(|| other.triple.nu.cmp(&self.triple.nu))
    }
}

/// Normalized weight; the empty frame (only possible for `nu` when `p = 1`)
/// maps to the zero vector and is at distance 0 from any target.
fn normalized_or_zero(w: &DominantWeight) -> Vec<f64> {
    if w.size() == 0 {
        vec![0.0; w.dim()]
    } else {
        normalize(w).expect("nonzero frame").values().to_vec()
    }
}

fn ball(
    frames: Vec<DominantWeight>,
    target: &NormalizedSpectrum,
    eps: f64,
) -> Vec<(DominantWeight, f64)> {
    frames
        .into_iter()
        .filter_map(|f| {
            let dist = if f.size() == 0 {
                0.0
            } else {
                normalize(&f).ok()?.l1_distance(target)
            };
            (dist <= eps).then_some((f, dist))
        })
        .collect()
}

fn check_split(target: &ScanTarget, n: usize) -> Result<usize> {
    let k = target.split(n);
    if k == 0 {
        return Err(Error::domain(format!("scale n = {n} gives k = 0")));
    }
    if k == n && target.p < 1.0 {
        return Err(Error::domain(format!(
            "scale n = {n} gives n - k = 0 with p < 1"
        )));
    }
    Ok(k)
}

/// All balanced frame triples at scale `n` inside the three ε-balls, ordered
/// by increasing total distance (ties: larger `lambda`, then `mu`, then `nu`
/// first).
pub fn ranked_candidates(target: &ScanTarget, n: usize, eps: f64) -> Result<Vec<Candidate>> {
    let k = check_split(target, n)?;
    let d = target.dim();
    let mus = ball(enumerate_frames(k, d), &target.r_a, eps);
    let nus = ball(enumerate_frames(n - k, d), &target.r_b, eps);
    let lambdas = ball(enumerate_frames(n, d), &target.r_c, eps);
    let mut out = Vec::with_capacity(mus.len() * nus.len() * lambdas.len());
    for (mu, dm) in &mus {
        for (nu, dn) in &nus {
            for (lambda, dl) in &lambdas {
                out.push(Candidate {
                    triple: SpectralTriple {
                        mu: mu.clone(),
                        nu: nu.clone(),
                        lambda: lambda.clone(),
                    },
                    distances: [*dm, *dn, *dl],
                });
            }
        }
    }
    out.sort_by(|a, b| a.rank(b));
    Ok(out)
}

pub fn candidate_triples(target: &ScanTarget, n: usize, eps: f64) -> Result<Vec<SpectralTriple>> {
    Ok(ranked_candidates(target, n, eps)?
        .into_iter()
        .map(|c| c.triple)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedTriple {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanWitness {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub triple: SpectralTriple,
    pub normalized: NormalizedTriple,
    /// `(‖mu/k - r_A‖₁, ‖nu/(n-k) - r_B‖₁, ‖lambda/n - r_C‖₁)`.
    pub distances: [f64; 3],
    pub coefficient: u64,
}

impl ScanWitness {
    pub fn median_distance(&self) -> f64 {
        median3(self.distances)
    }
}

pub(crate) fn median3(mut x: [f64; 3]) -> f64 {
    x.sort_by(f64::total_cmp);
    x[1]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedScale {
    pub n: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub n: usize,
    pub distances: [f64; 3],
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub c0: f64,
    pub d: usize,
    pub p: f64,
    /// Scales where no candidate had a nonzero coefficient.
    pub missing: Vec<usize>,
    pub skipped: Vec<SkippedScale>,
    pub series: Vec<SeriesPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub witnesses: Vec<ScanWitness>,
    pub summary: ScanSummary,
}

impl ScanReport {
    pub fn witness_at(&self, n: usize) -> Option<&ScanWitness> {
        self.witnesses.iter().find(|w| w.n == n)
    }
}

/// Closest witness at scale `n`, if any.
pub fn scan_scale(target: &ScanTarget, n: usize, c0: f64) -> Result<Option<ScanWitness>> {
    let k = check_split(target, n)?;
    let eps = epsilon_schedule(n, target.dim(), c0)?;
    let candidates = ranked_candidates(target, n, eps)?;
    let hit = candidates
        .par_iter()
        .filter(|c| {
            c.triple.lambda.contains(&c.triple.mu) && c.triple.lambda.contains(&c.triple.nu)
        })
        .map(|c| lr_tableaux(&c.triple).map(|r| (c, r.coefficient)))
        .find_first(|r| r.as_ref().map_or(true, |(_, coeff)| *coeff > 0))
        .transpose()?;
    let Some((c, coefficient)) = hit else {
        return Ok(None);
    };
    if c.triple.lambda.size() <= ORACLE_CHECK_MAX_BOXES {
        let check = lr_character_oracle(&c.triple)?.coefficient;
        assert_eq!(
            check, coefficient,
            "tableau count disagrees with oracle on {}",
            c.triple
        );
    }
    Ok(Some(ScanWitness {
        n,
        k,
        epsilon: eps,
        normalized: NormalizedTriple {
            mu: normalized_or_zero(&c.triple.mu),
            nu: normalized_or_zero(&c.triple.nu),
            lambda: normalized_or_zero(&c.triple.lambda),
        },
        triple: c.triple.clone(),
        distances: c.distances,
        coefficient,
    }))
}

/// Runs [`scan_scale`] over increasing scales. Scales with `k = 0` (or
/// `n - k = 0` while `p < 1`) are skipped and noted.
pub fn scan(target: &ScanTarget, n_values: &[usize], c0: f64) -> Result<ScanReport> {
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("scales must be strictly increasing"));
    }
    if c0.is_nan() || c0 <= 0.0 {
        return Err(Error::domain("c0 must be positive"));
    }
    let mut witnesses = Vec::new();
    let mut missing = Vec::new();
    let mut skipped = Vec::new();
    for &n in n_values {
        if n < 2 {
            skipped.push(SkippedScale {
                n,
                reason: "n < 2".into(),
            });
            continue;
        }
        if let Err(e) = check_split(target, n) {
            skipped.push(SkippedScale {
                n,
                reason: e.to_string(),
            });
            continue;
        }
        match scan_scale(target, n, c0)? {
            Some(w) => witnesses.push(w),
            None => missing.push(n),
        }
    }
    let series = witnesses
        .iter()
        .map(|w| SeriesPoint {
            n: w.n,
            distances: w.distances,
            median: w.median_distance(),
        })
        .collect();
    Ok(ScanReport {
        witnesses,
        summary: ScanSummary {
            c0,
            d: target.dim(),
            p: target.p,
            missing,
            skipped,
            series,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(v: &[f64]) -> NormalizedSpectrum {
        NormalizedSpectrum::new(v.to_vec()).unwrap()
    }

    fn w(p: &[i64]) -> DominantWeight {
        DominantWeight::new(p.to_vec()).unwrap()
    }

    fn target(a: &[f64], b: &[f64], c: &[f64], p: f64) -> ScanTarget {
        ScanTarget::new(spec(a), spec(b), spec(c), p).unwrap()
    }

    #[test]
    fn epsilon_examples() {
        let e = epsilon_schedule(8, 1, 1.0).unwrap();
        assert!((e - (8f64.ln() / 8.0).sqrt()).abs() < 1e-15);
        assert!((e - 0.52).abs() < 0.015);
        assert!(epsilon_schedule(100, 2, 2.0).unwrap() < epsilon_schedule(10, 2, 2.0).unwrap());
        let (a, b) = (
            epsilon_schedule(20, 2, 2.0).unwrap(),
            epsilon_schedule(20, 4, 2.0).unwrap(),
        );
        assert!((b - 2.0 * a).abs() < 1e-15);
        assert!(epsilon_schedule(1, 2, 2.0).is_err());
    }

    #[test]
    fn candidates_near_purity() {
        let t = target(&[1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], 0.5);
        let c = candidate_triples(&t, 4, 0.1).unwrap();
        assert_eq!(
            c,
            vec![SpectralTriple::from_parts(&[2, 0], &[2, 0], &[4, 0])]
        );
    }

    #[test]
    fn wide_ball_covers_everything() {
        let t = target(&[0.7, 0.3], &[0.6, 0.4], &[0.65, 0.35], 0.5);
        let c = candidate_triples(&t, 6, 2.0).unwrap();
        // 2 frames of 3 in two rows, squared, times 4 frames of 6
        assert_eq!(c.len(), 2 * 2 * 4);
        assert!(c.iter().all(|x| x.is_balanced()));
    }

    #[test]
    fn candidates_include_balanced_square() {
        let t = target(&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5], 0.5);
        let c = candidate_triples(&t, 4, 0.3).unwrap();
        let sq = SpectralTriple::from_parts(&[1, 1], &[1, 1], &[2, 2]);
        assert!(c.contains(&sq));
        assert_eq!(c[0], sq);
        assert_eq!(lr_character_oracle(&sq).unwrap().coefficient, 1);
    }

    #[test]
    fn pure_states_give_trivial_witnesses() {
        let t = target(&[1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], 0.5);
        let report = scan(&t, &[2, 4, 6], DEFAULT_C0).unwrap();
        assert_eq!(report.witnesses.len(), 3);
        for wit in &report.witnesses {
            let h = wit.n as i64 / 2;
            assert_eq!(
                wit.triple,
                SpectralTriple::from_parts(&[h, 0], &[h, 0], &[2 * h, 0])
            );
            assert_eq!(wit.coefficient, 1);
            assert_eq!(wit.distances, [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn maximally_mixed_qubits() {
        let t = target(&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5], 0.5);
        let report = scan(&t, &[4, 8, 16], DEFAULT_C0).unwrap();
        assert_eq!(report.witnesses.len(), 3);
        assert_eq!(
            report.witnesses[0].triple,
            SpectralTriple::from_parts(&[1, 1], &[1, 1], &[2, 2])
        );
        for wit in &report.witnesses {
            assert_eq!(wit.distances, [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn distances_shrink_for_a_mixture() {
        let a = DensityOperator::from_diagonal(&[0.7, 0.3]).unwrap();
        let b = DensityOperator::from_diagonal(&[0.6, 0.4]).unwrap();
        let t = ScanTarget::from_states(&a, &b, 0.5).unwrap();
        let report = scan(&t, &[8, 16, 32], DEFAULT_C0).unwrap();
        assert_eq!(report.witnesses.len(), 3);
        let med: Vec<f64> = report
            .witnesses
            .iter()
            .map(|w| w.median_distance())
            .collect();
        assert!(med[2] <= med[0], "{med:?}");
        for wit in &report.witnesses {
            assert!(wit.distances.iter().all(|&x| x <= wit.epsilon));
            assert!(wit.coefficient >= 1);
        }
    }

    #[test]
    fn p_one_degenerates() {
        let t = target(&[0.7, 0.3], &[0.5, 0.5], &[0.7, 0.3], 1.0);
        let report = scan(&t, &[4, 8, 10], DEFAULT_C0).unwrap();
        assert_eq!(report.witnesses.len(), 3);
        for wit in &report.witnesses {
            assert_eq!(wit.triple.nu, DominantWeight::zeros(2));
            assert_eq!(wit.triple.mu, wit.triple.lambda);
            assert_eq!(wit.coefficient, 1);
        }
    }

    #[test]
    fn zero_k_is_skipped() {
        let t = target(&[0.7, 0.3], &[0.5, 0.5], &[0.55, 0.45], 0.1);
        let report = scan(&t, &[2, 4, 10], DEFAULT_C0).unwrap();
        assert_eq!(
            report
                .summary
                .skipped
                .iter()
                .map(|s| s.n)
                .collect::<Vec<_>>(),
            vec![2, 4]
        );
        assert_eq!(report.witnesses.len(), 1);
        assert!(candidate_triples(&t, 4, 1.0).is_err());
    }

    #[test]
    fn mixture_examples() {
        let a = DensityOperator::from_diagonal(&[0.8, 0.2]).unwrap();
        let b = DensityOperator::from_diagonal(&[0.1, 0.9]).unwrap();
        assert_eq!(mixture_spectrum(&a, &b, 1.0).unwrap(), a.spectrum());
        let e0 = DensityOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        let e1 = DensityOperator::from_diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(
            mixture_spectrum(&e0, &e1, 0.5).unwrap().values(),
            &[0.5, 0.5]
        );
        for p in [0.0, 0.3, 0.9] {
            let s = mixture_spectrum(&a, &a, p).unwrap();
            assert!(s.l1_distance(&a.spectrum()) < 1e-12);
        }
        assert!(mixture_spectrum(&a, &b, 1.5).is_err());
    }

    #[test]
    fn swap_symmetry() {
        let a = DensityOperator::from_diagonal(&[0.83, 0.17]).unwrap();
        let b = DensityOperator::from_diagonal(&[0.38, 0.62]).unwrap();
        let t = ScanTarget::from_states(&a, &b, 0.25).unwrap();
        let ns = [8, 16, 32];
        let fwd = scan(&t, &ns, DEFAULT_C0).unwrap();
        let bwd = scan(&t.swapped().unwrap(), &ns, DEFAULT_C0).unwrap();
        assert_eq!(fwd.witnesses.len(), bwd.witnesses.len());
        for (x, y) in fwd.witnesses.iter().zip(&bwd.witnesses) {
            assert_eq!(x.triple.swapped(), y.triple);
            assert_eq!(x.coefficient, y.coefficient);
            assert_eq!(x.distances[2], y.distances[2]);
        }
    }

    #[test]
    fn ranking_is_by_total_distance() {
        let t = target(&[0.6, 0.4], &[0.9, 0.1], &[0.75, 0.25], 0.5);
        let c = ranked_candidates(&t, 10, 2.0).unwrap();
        assert!(c.windows(2).all(|p| p[0].total() <= p[1].total()));
        assert_eq!(c[0].triple.mu, w(&[3, 2]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_witnesses_inside_balls(
            a in 0.0f64..=1.0,
            b in 0.0f64..=1.0,
            quarter in prop::bool::ANY,
            n in 4usize..=24,
        ) {
            let ra = NormalizedSpectrum::from_unnormalized(vec![a, 1.0 - a]).unwrap();
            let rb = NormalizedSpectrum::from_unnormalized(vec![b, 1.0 - b]).unwrap();
            let p = if quarter { 0.25 } else { 0.5 };
            let mix: Vec<f64> = ra.values().iter().zip(rb.values()).map(|(x, y)| p * x + (1.0 - p) * y).collect();
            let t = ScanTarget::new(ra, rb, NormalizedSpectrum::from_unnormalized(mix).unwrap(), p).unwrap();
            let w = scan_scale(&t, n, DEFAULT_C0).unwrap();
            let w = w.expect("witness at desk scale");
            prop_assert!(w.distances.iter().all(|&x| x <= w.epsilon));
            prop_assert_eq!(w.k, t.split(n));
            prop_assert!(w.coefficient >= 1);
            prop_assert_eq!(w.triple.lambda.size(), n as i64);
        }
    }
}
