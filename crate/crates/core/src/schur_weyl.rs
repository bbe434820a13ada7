//! Spectrum estimation by projecting `rho^{⊗k}` onto the Schur-Weyl blocks
//! `U_lambda ⊗ V_lambda` of `(C^d)^{⊗k}`.
//!
//! Outcome probabilities are computed two ways:
//!
//! - [`projector_trace_schur`]: `dim V_lambda · s_lambda(Spec rho)`.
//! - [`projector_trace_direct`]: the isotypic projector
//!   `P_lambda = (dim V_lambda / k!) sum_pi chi_lambda(pi) R(pi)` applied to
//!   `rho^{⊗k}` through explicit index permutations on `(C^d)^{⊗k}`.
//!
//! All divergences are in nats.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{random_unitary, CMatrix, HermitianOperator};
use crate::symfun::{conjugacy_classes, factorial, schur_poly, sym_character, sym_dim};
use crate::weights::{
    enumerate_frames, l1_distance, normalize, DominantWeight, NormalizedSpectrum,
};

const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Default cap on `d^k` for the direct-projector route.
pub const DEFAULT_DIRECT_CAP: usize = 4096;

/// Unit-trace positive semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::from_hermitian(HermitianOperator::new(matrix)?)
    }

    pub fn from_hermitian(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::domain(format!(
                "density operator has trace {tr}, not 1"
            )));
        }
        let min = op.eigenvalues_desc().last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::domain(format!(
                "density operator has negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityOperator { op })
    }

    /// `diag(values)`; entries must be nonnegative and sum to 1.
    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::from_hermitian(HermitianOperator::from_real_diagonal(values))
    }

    /// `U diag(spectrum) U†`.
    pub fn from_spectrum(spectrum: &NormalizedSpectrum, u: &CMatrix) -> Result<Self> {
        Self::from_hermitian(HermitianOperator::conjugated_diagonal(u, spectrum.values()))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Descending eigenvalues, clamped into `[0, 1]` and renormalized.
    pub fn spectrum(&self) -> NormalizedSpectrum {
        let clamped: Vec<f64> = self
            .op
            .eigenvalues_desc()
            .into_iter()
            .map(|v| v.clamp(0.0, 1.0))
            .collect();
        NormalizedSpectrum::from_unnormalized(clamped)
            .expect("validated density operator has positive trace")
    }

    pub fn conjugated(&self, u: &CMatrix) -> Self {
        DensityOperator {
            op: self.op.conjugated(u),
        }
    }
}

/// Density operator with a flat-Dirichlet spectrum in a Haar-random basis.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    let weights: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let spectrum = NormalizedSpectrum::from_unnormalized(weights).expect("positive weights");
    let u = random_unitary(d, rng);
    DensityOperator::from_spectrum(&spectrum, &u).expect("valid by construction")
}

fn frame_size(lambda: &DominantWeight) -> Result<usize> {
    if !lambda.is_frame() {
        return Err(Error::domain(format!("{lambda} is not a Young frame")));
    }
    Ok(lambda.size() as usize)
}

/// `Tr P_lambda rho^{⊗k}` for a state with the given spectrum.
pub fn outcome_probability(spectrum: &NormalizedSpectrum, lambda: &DominantWeight) -> Result<f64> {
    frame_size(lambda)?;
    if lambda.rows() > spectrum.len() {
        return Ok(0.0);
    }
    let dim = sym_dim(lambda)?.to_f64().expect("finite dimension");
    Ok(dim * schur_poly(lambda, spectrum.values())?)
}

/// `Tr P_lambda rho^{⊗k} = dim V_lambda · s_lambda(Spec rho)`.
pub fn projector_trace_schur(rho: &DensityOperator, lambda: &DominantWeight) -> Result<f64> {
    outcome_probability(&rho.spectrum(), lambda)
}

/// `Tr P_lambda rho^{⊗k}` from the explicit isotypic projector.
///
/// `Tr R(pi) rho^{⊗k}` depends only on the cycle type of `pi`, so the sum
/// over `S_k` is taken class by class with one representative permutation
/// each; every representative is applied as an index permutation over all
/// `d^k` basis tuples.
pub fn projector_trace_direct(
    rho: &DensityOperator,
    lambda: &DominantWeight,
    cap: usize,
) -> Result<f64> {
    let k = frame_size(lambda)?;
    let d = rho.dim();
    if lambda.rows() > d {
        return Ok(0.0);
    }
    let states = d
        .checked_pow(k as u32)
        .filter(|&s| s <= cap)
        .ok_or_else(|| {
            Error::Resource(format!(
                "d^k = {d}^{k} exceeds the direct-projector cap {cap}; use the Schur route"
            ))
        })?;
    let m = rho.matrix();
    let mut total = Complex64::new(0.0, 0.0);
    for (class, size) in conjugacy_classes(k).iter() {
        let chi = sym_character(lambda, class)?
            .to_f64()
            .expect("finite character");
        if chi == 0.0 {
            continue;
        }
        let perm = representative(class.parts());
        let tr = permuted_tensor_trace(m, &perm, d, states);
        total += tr * (chi * size.to_f64().expect("finite class size"));
    }
    let dim = sym_dim(lambda)?.to_f64().expect("finite dimension");
    let factor = dim / factorial(k).to_f64().expect("finite factorial");
    Ok(factor * total.re)
}

/// A permutation with the given cycle lengths, as `pi[j]` images.
fn representative(cycles: &[usize]) -> Vec<usize> {
    let mut perm = Vec::new();
    let mut start = 0;
    for &len in cycles {
        for j in 0..len {
            perm.push(start + (j + 1) % len);
        }
        start += len;
    }
    perm
}

/// `Tr R(pi) rho^{⊗k} = sum_b prod_j rho[b_{pi(j)}, b_j]`.
fn permuted_tensor_trace(
    m: &DMatrix<Complex64>,
    perm: &[usize],
    d: usize,
    states: usize,
) -> Complex64 {
    let k = perm.len();
    let mut digits = vec![0usize; k];
    let mut total = Complex64::new(0.0, 0.0);
    for _ in 0..states {
        let mut term = Complex64::new(1.0, 0.0);
        for j in 0..k {
            term *= m[(digits[perm[j]], digits[j])];
        }
        total += term;
        for digit in digits.iter_mut() {
            *digit += 1;
            if *digit < d {
                break;
            }
            *digit = 0;
        }
    }
    total
}

/// Outcome statistics of the Schur-Weyl measurement on `k` copies.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDistribution {
    pub k: usize,
    pub d: usize,
    /// Frames of `k` with at most `d` rows, lexicographically descending.
    pub entries: Vec<(DominantWeight, f64)>,
}

impl MeasurementDistribution {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn probability(&self, frame: &DominantWeight) -> Option<f64> {
        self.entries
            .iter()
            .find(|(f, _)| f == frame)
            .map(|(_, p)| *p)
    }

    /// Outcome with the largest probability (first one on ties).
    pub fn mode(&self) -> Option<&DominantWeight> {
        self.entries
            .iter()
            .fold(None::<&(DominantWeight, f64)>, |best, e| match best {
                Some(b) if b.1 >= e.1 => Some(b),
                _ => Some(e),
            })
            .map(|(f, _)| f)
    }

    /// Total probability of outcomes with `‖lambda/k - r‖₁ > radius`.
    pub fn mass_outside(&self, r: &NormalizedSpectrum, radius: f64) -> f64 {
        self.entries
            .iter()
            .filter(|(f, _)| {
                let bar = normalize(f).expect("k >= 1");
                bar.l1_distance(r) > radius
            })
            .map(|(_, p)| p)
            .sum()
    }
}

pub fn measurement_distribution(
    rho: &DensityOperator,
    k: usize,
) -> Result<MeasurementDistribution> {
    distribution_for_spectrum(&rho.spectrum(), k)
}

/// Same as [`measurement_distribution`] but from the spectrum alone.
pub fn distribution_for_spectrum(
    spectrum: &NormalizedSpectrum,
    k: usize,
) -> Result<MeasurementDistribution> {
    if k == 0 {
        return Err(Error::domain("need at least one copy (k >= 1)"));
    }
    let d = spectrum.len();
    let entries = enumerate_frames(k, d)
        .into_par_iter()
        .map(|f| {
            let p = outcome_probability(spectrum, &f)?;
            Ok((f, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementDistribution { k, d, entries })
}

pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let mut total = 0.0;
    for i in 0..n {
        let pi = p.get(i).copied().unwrap_or(0.0);
        let qi = q.get(i).copied().unwrap_or(0.0);
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return f64::INFINITY;
        }
        total += pi * (pi / qi).ln();
    }
    // rounding can leave a tiny negative value for p ≈ q
    total.max(0.0)
}

/// `D(p‖q) = sum p_i ln(p_i / q_i)` in nats, `+inf` off the support of `q`.
pub fn kl_divergence(p: &NormalizedSpectrum, q: &NormalizedSpectrum) -> f64 {
    kl_slices(p.values(), q.values())
}

/// `(k+1)^{d(d-1)/2} exp(-k D(lambda/k ‖ r))`.
pub fn kw_bound(lambda: &DominantWeight, r: &NormalizedSpectrum, d: usize) -> Result<f64> {
    let k = frame_size(lambda)?;
    if k == 0 {
        return Err(Error::domain("bound needs |lambda| >= 1"));
    }
    let bar = normalize(lambda)?;
    let div = kl_divergence(&bar, r);
    if div.is_infinite() {
        return Ok(0.0);
    }
    let exponent = (d * (d - 1) / 2) as f64;
    let kf = k as f64;
    Ok((exponent * (kf + 1.0).ln() - kf * div).exp())
}

/// `D(p‖q) - ‖p - q‖₁² / 2` (nats form of Pinsker's inequality).
pub fn pinsker_gap(p: &NormalizedSpectrum, q: &NormalizedSpectrum) -> f64 {
    let l1 = l1_distance(p.values(), q.values());
    kl_divergence(p, q) - l1 * l1 / 2.0
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRecord {
    pub frame: Vec<i64>,
    pub prob: f64,
    pub bound: f64,
}

/// `{"k", "d", "outcomes": [{"frame", "prob", "bound"}]}`.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub k: usize,
    pub d: usize,
    pub outcomes: Vec<OutcomeRecord>,
}

pub fn estimate_report(rho: &DensityOperator, k: usize) -> Result<EstimateReport> {
    let spectrum = rho.spectrum();
    let dist = distribution_for_spectrum(&spectrum, k)?;
    let outcomes = dist
        .entries
        .iter()
        .map(|(f, p)| {
            Ok(OutcomeRecord {
                frame: f.parts().to_vec(),
                prob: *p,
                bound: kw_bound(f, &spectrum, dist.d)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport {
        k,
        d: dist.d,
        outcomes,
    })
}
