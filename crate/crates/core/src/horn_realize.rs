//! Numerical witnesses for Horn's problem: Hermitian `A`, `B` with
//! `(Spec A, Spec B, Spec A+B) = (mu, nu, lambda)`.
//!
//! `A = diag(mu)` and `B = V diag(nu) V†`, so the first two spectra hold
//! exactly and only `V ∈ U(d)` is searched. Joint conjugation does not change
//! `Spec(A+B)`, so fixing `A` to be diagonal loses no generality.
//!
//! The search first tries the `d!` commuting configurations (`V` a
//! permutation matrix), then runs seeded restarts of an annealed random walk
//! `V <- exp(i s H) V` with `H` a random unit-norm Hermitian direction and a
//! self-adjusting step `s`, each finished by a Gauss-Newton polish.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{random_hermitian, random_unitary, unitary_exp, CMatrix, HermitianOperator};
use crate::lr::{balanced_frame_triples, lr_tableaux};
use crate::schur_weyl::DensityOperator;
use crate::weights::{l1_distance, DominantWeight, SpectralTriple};

/// Search budget for [`realize_triple`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizeConfig {
    pub tol: f64,
    pub restarts: usize,
    pub steps: usize,
    /// Per-step decay of the annealing temperature.
    pub step_decay: f64,
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for RealizeConfig {
    fn default() -> Self {
        RealizeConfig {
            tol: 1e-6,
            restarts: 32,
            steps: 2000,
            step_decay: 0.995,
            initial_step: 0.5,
            seed: 0,
        }
    }
}

/// Restarts evaluated together before checking for success.
const RESTART_BATCH: usize = 8;
const STEP_GROW: f64 = 1.5;
const STEP_SHRINK: f64 = 0.85;
const MAX_STEP: f64 = 1.5;
const MIN_STEP: f64 = 1e-13;

#[derive(Debug, Clone, Serialize)]
pub struct RealizationResult {
    #[serde(rename = "A")]
    pub a: HermitianOperator,
    #[serde(rename = "B")]
    pub b: HermitianOperator,
    pub residual: f64,
    pub iterations: usize,
    pub seed: u64,
    pub converged: bool,
    /// Restart that produced the result; `None` for a commuting solution.
    pub restart: Option<usize>,
    pub triple: SpectralTriple,
}

fn weight_f64(w: &DominantWeight) -> Vec<f64> {
    w.parts().iter().map(|&p| p as f64).collect()
}

/// ℓ₁ distance between the descending spectrum of `A + B` and `lambda`.
pub fn spectral_residual(
    a: &HermitianOperator,
    b: &HermitianOperator,
    lambda: &DominantWeight,
) -> Result<f64> {
    if a.dim() != b.dim() || a.dim() != lambda.dim() {
        return Err(Error::domain(format!(
            "dimension mismatch: A is {}, B is {}, lambda has {}",
            a.dim(),
            b.dim(),
            lambda.dim()
        )));
    }
    Ok(l1_distance(
        &a.add(b).eigenvalues_desc(),
        &weight_f64(lambda),
    ))
}

struct Objective {
    a: HermitianOperator,
    nu: Vec<f64>,
    lambda: Vec<f64>,
}

impl Objective {
    fn b(&self, v: &CMatrix) -> HermitianOperator {
        HermitianOperator::conjugated_diagonal(v, &self.nu)
    }

    fn eval(&self, v: &CMatrix) -> f64 {
        l1_distance(&self.a.add(&self.b(v)).eigenvalues_desc(), &self.lambda)
    }
}

struct RestartOutcome {
    v: CMatrix,
    residual: f64,
    iterations: usize,
}

/// One restart: an annealed walk on the ℓ₁ residual followed by
/// [`polish`]. The reported residual is the best seen, non-increasing along
/// the run.
fn run_restart(
    obj: &Objective,
    cfg: &RealizeConfig,
    index: usize,
    trace: Option<&mut Vec<f64>>,
) -> RestartOutcome {
    let d = obj.nu.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64 + 1);

    let mut v = random_unitary(d, &mut rng);
    let mut current = obj.eval(&v);
    let mut best = (v.clone(), current);
    let mut step = cfg.initial_step;
    let mut temperature = 0.05 * current.max(cfg.tol);
    let mut iterations = 0;
    let mut history = trace;

    while iterations < cfg.steps && best.1 > cfg.tol {
        iterations += 1;
        let h = random_hermitian(d, &mut rng);
        let candidate = unitary_exp(&h, step) * &v;
        let value = obj.eval(&candidate);
        let improved = value < current;
        let accept = improved || rng.random::<f64>() < (-(value - current) / temperature).exp();
        if improved {
            step = (step * STEP_GROW).min(MAX_STEP);
        } else {
            step = (step * STEP_SHRINK).max(MIN_STEP);
        }
        if accept {
            v = candidate;
            current = value;
        }
        if current < best.1 {
            best = (v.clone(), current);
        }
        temperature *= cfg.step_decay;
        if let Some(h) = history.as_deref_mut() {
            h.push(best.1);
        }
    }
    if best.1 > cfg.tol {
        let (v, residual, steps) = polish(obj, best.0, best.1, cfg.tol, history);
        best = (v, residual);
        iterations += steps;
    }
    RestartOutcome {
        v: best.0,
        residual: best.1,
        iterations,
    }
}

const POLISH_ITERATIONS: usize = 60;
const POLISH_BACKTRACKS: usize = 20;

/// Orthonormal basis of the real vector space of `d x d` Hermitian matrices.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let one = Complex64::new(1.0, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = one;
        basis.push(m);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut re = CMatrix::zeros(d, d);
            re[(i, j)] = Complex64::new(s, 0.0);
            re[(j, i)] = Complex64::new(s, 0.0);
            basis.push(re);
            let mut im = CMatrix::zeros(d, d);
            im[(i, j)] = Complex64::new(0.0, -s);
            im[(j, i)] = Complex64::new(0.0, s);
            basis.push(im);
        }
    }
    basis
}

/// Real coordinates of a Hermitian matrix in [`hermitian_basis`] order
/// (an isometry for the Frobenius norm).
fn hermitian_coords(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut out: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
    for i in 0..d {
        for j in i + 1..d {
            out.push(s * m[(i, j)].re);
            out.push(-s * m[(i, j)].im);
        }
    }
    out
}

/// Gauss-Newton refinement of `A + V diag(nu) V† = W diag(lambda) W†` over
/// `(V, W) ∈ U(d)²`, started from the eigenbasis of the current `A + B`.
/// The equation is smooth in `(V, W)` and its Frobenius residual bounds the
/// ℓ₂ eigenvalue error, so it keeps converging where the eigenvalue residual
/// is kinked or flat.
fn polish(
    obj: &Objective,
    v0: CMatrix,
    residual0: f64,
    tol: f64,
    mut history: Option<&mut Vec<f64>>,
) -> (CMatrix, f64, usize) {
    let d = obj.nu.len();
    let sum = obj.a.add(&obj.b(&v0));
    let eig = sum.matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut w = CMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);

    let basis = hermitian_basis(d);
    let n = basis.len();
    let mut v = v0;
    let mut best = (v.clone(), residual0);
    let mismatch = |v: &CMatrix, w: &CMatrix| -> CMatrix {
        obj.a.matrix() + obj.b(v).matrix()
            - HermitianOperator::conjugated_diagonal(w, &obj.lambda).matrix()
    };
    let norm2 = |m: &CMatrix| m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let i = Complex64::new(0.0, 1.0);

    let mut f = mismatch(&v, &w);
    let mut steps = 0;
    while steps < POLISH_ITERATIONS && best.1 > tol * 1e-3 {
        steps += 1;
        let bv = obj.b(&v);
        let cw = HermitianOperator::conjugated_diagonal(&w, &obj.lambda);
        let mut jac = DMatrix::<f64>::zeros(n, 2 * n);
        for (k, g) in basis.iter().enumerate() {
            let dv = (g * bv.matrix() - bv.matrix() * g) * i;
            let dw = (g * cw.matrix() - cw.matrix() * g) * (-i);
            for (row, x) in hermitian_coords(&dv).into_iter().enumerate() {
                jac[(row, k)] = x;
            }
            for (row, x) in hermitian_coords(&dw).into_iter().enumerate() {
                jac[(row, n + k)] = x;
            }
        }
        let rhs = DVector::from_vec(hermitian_coords(&f).into_iter().map(|x| -x).collect());
        let Ok(x) = jac.svd(true, true).solve(&rhs, 1e-12) else {
            break;
        };
        let direction = |offset: usize| -> CMatrix {
            basis
                .iter()
                .enumerate()
                .fold(CMatrix::zeros(d, d), |acc, (k, g)| {
                    acc + g * Complex64::new(x[offset + k], 0.0)
                })
        };
        let (hv, hw) = (direction(0), direction(n));
        let current = norm2(&f);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..POLISH_BACKTRACKS {
            let vn = unitary_exp(&hv, alpha) * &v;
            let wn = unitary_exp(&hw, alpha) * &w;
            let fnew = mismatch(&vn, &wn);
            if norm2(&fnew) < current {
                v = vn;
                w = wn;
                f = fnew;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        let r = obj.eval(&v);
        if r < best.1 {
            best = (v.clone(), r);
        }
        if let Some(h) = history.as_deref_mut() {
            h.push(best.1);
        }
    }
    (best.0, best.1, steps)
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let d = perm.len();
    let mut m = CMatrix::zeros(d, d);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Searches for Hermitian `A`, `B` realizing the triple. The result is
/// deterministic in `cfg.seed`; `converged` is false when the budget ran out,
/// which for a triple with nonzero LR coefficient means the search fell short,
/// not that no witness exists.
pub fn realize_triple(t: &SpectralTriple, cfg: &RealizeConfig) -> Result<RealizationResult> {
    if cfg.restarts == 0 || cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::domain("restarts must be positive and tol > 0"));
    }
    let obj = Objective {
        a: HermitianOperator::from_real_diagonal(&weight_f64(&t.mu)),
        nu: weight_f64(&t.nu),
        lambda: weight_f64(&t.lambda),
    };
    let finish =
        |v: &CMatrix, residual: f64, iterations: usize, restart: Option<usize>| RealizationResult {
            a: obj.a.clone(),
            b: obj.b(v),
            residual,
            iterations,
            seed: cfg.seed,
            converged: residual <= cfg.tol,
            restart,
            triple: t.clone(),
        };

    let d = t.dim();
    if d <= 6 {
        let commuting = permutations(d)
            .into_iter()
            .map(|p| {
                let v = permutation_matrix(&p);
                let r = obj.eval(&v);
                (v, r)
            })
            .min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((v, r)) = commuting {
            if r <= cfg.tol {
                return Ok(finish(&v, r, 0, None));
            }
        }
    }

    let mut best: Option<(usize, RestartOutcome)> = None;
    let indices: Vec<usize> = (0..cfg.restarts).collect();
    for batch in indices.chunks(RESTART_BATCH) {
        let outcomes: Vec<(usize, RestartOutcome)> = batch
            .par_iter()
            .map(|&i| (i, run_restart(&obj, cfg, i, None)))
            .collect();
        for (i, out) in outcomes {
            // strict < keeps the lowest restart index on ties
            if best.as_ref().is_none_or(|(_, b)| out.residual < b.residual) {
                best = Some((i, out));
            }
        }
        if best.as_ref().is_some_and(|(_, b)| b.residual <= cfg.tol) {
            break;
        }
    }
    let (i, out) = best.expect("at least one restart");
    Ok(finish(&out.v, out.residual, out.iterations, Some(i)))
}

/// Best-so-far residual after each step of one restart.
pub fn restart_trace(t: &SpectralTriple, cfg: &RealizeConfig, restart: usize) -> Vec<f64> {
    let obj = Objective {
        a: HermitianOperator::from_real_diagonal(&weight_f64(&t.mu)),
        nu: weight_f64(&t.nu),
        lambda: weight_f64(&t.lambda),
    };
    let mut trace = Vec::new();
    run_restart(&obj, cfg, restart, Some(&mut trace));
    trace
}

/// `(p, rho^A, rho^B, rho^C)` with `p = Tr A / Tr(A+B)`.
#[derive(Debug, Clone, Serialize)]
pub struct DensityForm {
    pub p: f64,
    pub rho_a: DensityOperator,
    pub rho_b: DensityOperator,
    pub rho_c: DensityOperator,
}

const DENSITY_PSD_TOL: f64 = 1e-10;

pub fn to_density_form(a: &HermitianOperator, b: &HermitianOperator) -> Result<DensityForm> {
    if a.dim() != b.dim() {
        return Err(Error::domain("A and B have different dimensions"));
    }
    if !a.is_psd(DENSITY_PSD_TOL) || !b.is_psd(DENSITY_PSD_TOL) {
        return Err(Error::domain(
            "A and B must be positive semidefinite; shift the triple to frames first",
        ));
    }
    let (ta, tb) = (a.trace(), b.trace());
    if ta <= 0.0 || tb <= 0.0 {
        return Err(Error::domain("A and B need positive trace"));
    }
    let total = ta + tb;
    Ok(DensityForm {
        p: ta / total,
        rho_a: DensityOperator::from_hermitian(a.scale(1.0 / ta))?,
        rho_b: DensityOperator::from_hermitian(b.scale(1.0 / tb))?,
        rho_c: DensityOperator::from_hermitian(a.add(b).scale(1.0 / total))?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub max_boxes: usize,
    pub d: usize,
    pub tol: f64,
    pub triples: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub worst_residual: f64,
    /// Triples the search did not realize within budget (inconclusive).
    pub failures: Vec<SpectralTriple>,
}

/// Realizes every balanced frame triple with `|lambda| <= max_boxes` and
/// nonzero LR coefficient.
pub fn verify_theorem1_sweep(
    max_boxes: usize,
    d: usize,
    cfg: &RealizeConfig,
) -> Result<SweepReport> {
    let targets: Vec<SpectralTriple> = balanced_frame_triples(max_boxes, d)
        .into_iter()
        .filter(|t| lr_tableaux(t).map(|r| r.is_nonzero()).unwrap_or(false))
        .collect();
    let results = targets
        .par_iter()
        .map(|t| realize_triple(t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let successes = results.iter().filter(|r| r.converged).count();
    let worst_residual = results.iter().map(|r| r.residual).fold(0.0, f64::max);
    let failures = results
        .iter()
        .filter(|r| !r.converged)
        .map(|r| r.triple.clone())
        .collect();
    Ok(SweepReport {
        max_boxes,
        d,
        tol: cfg.tol,
        triples: results.len(),
        successes,
        success_rate: if results.is_empty() {
            1.0
        } else {
            successes as f64 / results.len() as f64
        },
        worst_residual,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(mu: &[i64], nu: &[i64], lambda: &[i64]) -> SpectralTriple {
        SpectralTriple::from_parts(mu, nu, lambda)
    }

    fn diag(v: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(v)
    }

    #[test]
    fn commuting_examples_are_exact() {
        let cfg = RealizeConfig {
            tol: 1e-8,
            ..Default::default()
        };
        let r = realize_triple(&t(&[1, 0], &[1, 0], &[1, 1]), &cfg).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.a, diag(&[1.0, 0.0]));
        assert_eq!(r.b, diag(&[0.0, 1.0]));
        let r = realize_triple(&t(&[1, 0], &[1, 0], &[2, 0]), &cfg).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.b, diag(&[1.0, 0.0]));
    }

    #[test]
    fn multiplicity_two_triple() {
        let cfg = RealizeConfig::default();
        let x = t(&[2, 1, 0], &[2, 1, 0], &[3, 2, 1]);
        let r = realize_triple(&x, &cfg).unwrap();
        assert!(r.converged, "residual {}", r.residual);
        assert!(r.residual <= 1e-6);
        assert!((spectral_residual(&r.a, &r.b, &x.lambda).unwrap() - r.residual).abs() < 1e-12);
        check_spectra(&r, &x);
    }

    fn check_spectra(r: &RealizationResult, x: &SpectralTriple) {
        for (ev, w) in [
            (r.a.eigenvalues_desc(), &x.mu),
            (r.b.eigenvalues_desc(), &x.nu),
        ] {
            for (e, &p) in ev.iter().zip(w.parts()) {
                assert!((e - p as f64).abs() < 1e-10, "{ev:?} vs {w}");
            }
        }
    }

    #[test]
    fn residual_examples() {
        let lam = DominantWeight::new(vec![1, 1]).unwrap();
        assert_eq!(
            spectral_residual(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &lam).unwrap(),
            0.0
        );
        let zero = DominantWeight::zeros(2);
        assert_eq!(
            spectral_residual(
                &HermitianOperator::zeros(2),
                &HermitianOperator::zeros(2),
                &zero
            )
            .unwrap(),
            0.0
        );
        assert_eq!(
            spectral_residual(&diag(&[1.0, 0.0]), &diag(&[1.0, 0.0]), &lam).unwrap(),
            2.0
        );
        assert!(spectral_residual(&diag(&[1.0]), &diag(&[1.0, 0.0]), &lam).is_err());
    }

    #[test]
    fn density_form_examples() {
        let f = to_density_form(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap();
        assert!((f.p - 0.5).abs() < 1e-15);
        assert_eq!(f.rho_c.spectrum().values(), &[0.5, 0.5]);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(3, &mut rng);
        let b = HermitianOperator::conjugated_diagonal(&u, &[0.6, 0.3, 0.1]);
        let f = to_density_form(&b.scale(2.0), &b).unwrap();
        assert!((f.p - 2.0 / 3.0).abs() < 1e-12);
        for rho in [&f.rho_a, &f.rho_b, &f.rho_c] {
            let diff = rho.matrix() - b.matrix();
            assert!(diff.iter().all(|z| z.norm() < 1e-12));
        }

        let f = to_density_form(&diag(&[2.0, 1.0, 0.0]), &diag(&[2.0, 1.0, 0.0])).unwrap();
        assert!((f.p - 0.5).abs() < 1e-15);
        for rho in [&f.rho_a, &f.rho_b, &f.rho_c] {
            let s = rho.spectrum();
            assert!((s.values()[0] - 2.0 / 3.0).abs() < 1e-15);
            assert!((s.values()[1] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn density_form_errors() {
        assert!(to_density_form(&diag(&[1.0, -1.0]), &diag(&[1.0, 0.0])).is_err());
        assert!(to_density_form(&diag(&[0.0, 0.0]), &diag(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn density_form_of_a_witness() {
        let x = t(&[2, 1, 0], &[1, 1, 0], &[3, 2, 0]);
        let r = realize_triple(&x, &RealizeConfig::default()).unwrap();
        assert!(r.converged);
        let f = to_density_form(&r.a, &r.b).unwrap();
        assert!((f.p - 3.0 / 5.0).abs() < 1e-12);
        let mix = f
            .rho_a
            .operator()
            .scale(f.p)
            .add(&f.rho_b.operator().scale(1.0 - f.p));
        assert!((mix.matrix() - f.rho_c.matrix())
            .iter()
            .all(|z| z.norm() < 1e-12));
        let sc = f.rho_c.spectrum();
        for (s, e) in sc.values().iter().zip([0.6, 0.4, 0.0]) {
            assert!((s - e).abs() < 1e-6);
        }
    }

    #[test]
    fn best_residual_is_monotone() {
        let cfg = RealizeConfig {
            tol: 1e-12,
            steps: 400,
            ..Default::default()
        };
        let trace = restart_trace(&t(&[3, 1, 0], &[2, 1, 0], &[4, 2, 1]), &cfg, 0);
        assert!(!trace.is_empty());
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn unbalanced_residual_lower_bound() {
        let cfg = RealizeConfig {
            restarts: 2,
            steps: 200,
            ..Default::default()
        };
        for x in [t(&[1, 0], &[1, 0], &[1, 0]), t(&[2, 1], &[1, 0], &[2, 1])] {
            let r = realize_triple(&x, &cfg).unwrap();
            assert!(!r.converged);
            let gap = (x.mu.size() + x.nu.size() - x.lambda.size()).abs() as f64;
            assert!(r.residual >= gap / x.dim() as f64);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let x = t(&[2, 1, 0], &[1, 1, 0], &[2, 2, 1]);
        let cfg = RealizeConfig {
            seed: 42,
            ..Default::default()
        };
        let a = realize_triple(&x, &cfg).unwrap();
        let b = realize_triple(&x, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn sweep_small() {
        let report = verify_theorem1_sweep(0, 2, &RealizeConfig::default()).unwrap();
        assert_eq!(report.triples, 1);
        assert_eq!(report.success_rate, 1.0);
        assert_eq!(report.worst_residual, 0.0);
        let report = verify_theorem1_sweep(4, 2, &RealizeConfig::default()).unwrap();
        assert_eq!(report.success_rate, 1.0, "{:?}", report.failures);
    }

    #[test]
    fn permutation_list() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
