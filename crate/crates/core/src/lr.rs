//! Littlewood-Richardson coefficients.
//!
//! Two independent routes are provided:
//!
//! - [`lr_tableaux`] counts LR skew tableaux of shape `lambda/mu` and content
//!   `nu` whose reverse reading word is a lattice word. This is the fast path.
//! - [`lr_character_oracle`] computes the dimension of the
//!   `S_k x S_{n-k}`-invariants of `V_lambda ⊗ V_mu ⊗ V_nu` by averaging
//!   characters over conjugacy-class pairs. Slow, but shares no code with the
//!   tableau count beyond frame enumeration.
//!
//! [`lr_general`] extends the tableau route to dominant weights with negative
//! parts through the shift `mu + m, nu + n, lambda + (m + n)`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symfun::{conjugacy_classes, factorial, sym_character};
use crate::weights::{enumerate_frames, shift_triple, SpectralTriple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LrMethod {
    Tableaux,
    CharacterOracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LRResult {
    pub coefficient: u64,
    pub method: LrMethod,
    pub triple: SpectralTriple,
}

impl LRResult {
    pub fn is_nonzero(&self) -> bool {
        self.coefficient != 0
    }
}

fn require_frames(t: &SpectralTriple) -> Result<()> {
    if !t.is_frames() {
        return Err(Error::domain(format!(
            "{t} has negative parts; use lr_general for dominant weights"
        )));
    }
    Ok(())
}

fn as_usize(parts: &[i64]) -> Vec<usize> {
    parts.iter().map(|&p| p as usize).collect()
}

/// Counts LR tableaux of shape `lambda/mu` with content `nu`.
///
/// Unbalanced or non-contained triples give 0. Negative parts are a domain
/// error.
pub fn lr_tableaux(t: &SpectralTriple) -> Result<LRResult> {
    require_frames(t)?;
    let coefficient = if !t.is_balanced() || !t.lambda.contains(&t.mu) || !t.lambda.contains(&t.nu)
    {
        0
    } else {
        let mut counter = TableauCounter::new(
            as_usize(t.mu.parts()),
            as_usize(t.nu.parts()),
            as_usize(t.lambda.parts()),
        );
        counter.count()
    };
    Ok(LRResult {
        coefficient,
        method: LrMethod::Tableaux,
        triple: t.clone(),
    })
}

/// Row-by-row enumeration of LR fillings.
///
/// A semistandard row is determined by how many of each letter it holds, so
/// row `r` is chosen as a count vector `c[1..=min(r+1, d)]`. Reading rows top
/// to bottom, each right to left, the lattice condition only needs checking
/// after the block of `i+1`s in each row: `T[i+1] + c[i+1] <= T[i]`. Column
/// strictness reads `mu[r] + #(<= i in row r) <= mu[r-1] + #(<= i-1 in row r-1)`.
struct TableauCounter {
    mu: Vec<usize>,
    nu: Vec<usize>,
    lambda: Vec<usize>,
    memo: HashMap<(usize, Vec<usize>, Vec<usize>), u64>,
}

impl TableauCounter {
    fn new(mu: Vec<usize>, nu: Vec<usize>, lambda: Vec<usize>) -> Self {
        TableauCounter {
            mu,
            nu,
            lambda,
            memo: HashMap::new(),
        }
    }

    fn count(&mut self) -> u64 {
        let d = self.lambda.len();
        // Letters are 1..=d; index 0 of the cumulative vectors is the empty prefix.
        self.rows_from(0, vec![0; d + 1], vec![0; d + 1])
    }

    /// `totals[i]`: letters `i` placed so far. `prev_cum[i]`: letters `<= i`
    /// in the previous row.
    fn rows_from(&mut self, r: usize, totals: Vec<usize>, prev_cum: Vec<usize>) -> u64 {
        let d = self.lambda.len();
        if r == d {
            return u64::from(totals[1..] == self.nu[..]);
        }
        let key = (r, totals, prev_cum);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (_, totals, prev_cum) = &key;
        let width = self.lambda[r] - self.mu[r];
        let letters = (r + 1).min(d);
        let mut cum = vec![0usize; d + 1];
        let mut row_totals = totals.clone();
        let mut found = 0u64;
        self.fill_row(
            r,
            1,
            letters,
            width,
            &mut cum,
            &mut row_totals,
            totals,
            prev_cum,
            &mut found,
        );
        self.memo.insert(key, found);
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn fill_row(
        &mut self,
        r: usize,
        letter: usize,
        letters: usize,
        width: usize,
        cum: &mut Vec<usize>,
        row_totals: &mut Vec<usize>,
        totals: &[usize],
        prev_cum: &[usize],
        found: &mut u64,
    ) {
        let d = self.lambda.len();
        let placed = cum[letter - 1];
        if letter > letters {
            if placed == width {
                // Letters above `letters` never occur in this row.
                cum[letter..=d].fill(placed);
                *found += self.rows_from(r + 1, row_totals.clone(), cum.clone());
            }
            return;
        }
        let remaining = width - placed;
        let mut max_c = remaining.min(self.nu[letter - 1] - totals[letter]);
        if letter >= 2 {
            // lattice condition against the letters `letter - 1` read so far
            max_c = max_c.min(totals[letter - 1].saturating_sub(totals[letter]));
        }
        if r > 0 {
            // column strictness against row r-1
            let limit = self.mu[r - 1] + prev_cum[letter - 1];
            let here = self.mu[r] + placed;
            if here > limit {
                return;
            }
            max_c = max_c.min(limit - here);
        }
        for c in 0..=max_c {
            cum[letter] = placed + c;
            row_totals[letter] = totals[letter] + c;
            self.fill_row(
                r,
                letter + 1,
                letters,
                width,
                cum,
                row_totals,
                totals,
                prev_cum,
                found,
            );
        }
        row_totals[letter] = totals[letter];
    }
}

/// Character-theoretic LR coefficient:
/// `(1 / (k! (n-k)!)) sum_{rho1, rho2} |C_rho1| |C_rho2| chi_lambda(rho1 ∪ rho2) chi_mu(rho1) chi_nu(rho2)`.
///
/// Requires a balanced triple of frames.
pub fn lr_character_oracle(t: &SpectralTriple) -> Result<LRResult> {
    require_frames(t)?;
    if !t.is_balanced() {
        return Err(Error::domain(format!(
            "oracle needs |mu| + |nu| = |lambda|, got {} + {} != {}",
            t.mu.size(),
            t.nu.size(),
            t.lambda.size()
        )));
    }
    let k = t.mu.size() as usize;
    let l = t.nu.size() as usize;
    let left = conjugacy_classes(k);
    let right = conjugacy_classes(l);
    let mut sum = BigInt::zero();
    for (rho1, size1) in left.iter() {
        let chi_mu = sym_character(&t.mu, rho1)?;
        if chi_mu.is_zero() {
            continue;
        }
        for (rho2, size2) in right.iter() {
            let chi_nu = sym_character(&t.nu, rho2)?;
            if chi_nu.is_zero() {
                continue;
            }
            let chi_lambda = sym_character(&t.lambda, &rho1.union(rho2))?;
            sum += BigInt::from(size1 * size2) * chi_lambda * &chi_mu * chi_nu;
        }
    }
    let order = BigInt::from(factorial(k) * factorial(l));
    assert!(
        (&sum % &order).is_zero(),
        "character sum {sum} not divisible by {order} for {t}: character table bug"
    );
    let value = sum / order;
    assert!(!value.is_negative(), "negative multiplicity for {t}");
    let coefficient = BigUint::try_from(value)
        .ok()
        .and_then(|v| v.to_u64())
        .expect("LR coefficient fits in u64");
    Ok(LRResult {
        coefficient,
        method: LrMethod::CharacterOracle,
        triple: t.clone(),
    })
}

/// LR coefficient of arbitrary dominant weights: shifts by the smallest
/// `m, n >= 0` that make `mu` and `nu` frames and counts tableaux.
pub fn lr_general(t: &SpectralTriple) -> Result<LRResult> {
    let d = t.dim();
    let m = (-t.mu.parts()[d - 1]).max(0);
    let n = (-t.nu.parts()[d - 1]).max(0);
    let shifted = shift_triple(t, m, n);
    let coefficient = if !shifted.is_balanced() || !shifted.lambda.is_frame() {
        // lambda ⊇ mu is necessary, so a negative shifted lambda forces 0
        0
    } else {
        lr_tableaux(&shifted)?.coefficient
    };
    Ok(LRResult {
        coefficient,
        method: LrMethod::Tableaux,
        triple: t.clone(),
    })
}

/// Smallest `N <= n_max` with `c_{N mu, N nu}^{N lambda} != 0`.
pub fn find_scaling(t: &SpectralTriple, n_max: u32) -> Result<Option<u32>> {
    if !t.is_balanced() {
        return Ok(None);
    }
    for n in 1..=n_max {
        if lr_general(&t.scaled(i64::from(n)))?.is_nonzero() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Every balanced triple of frames with `|lambda| <= max_boxes` in dimension `d`.
pub fn balanced_frame_triples(max_boxes: usize, d: usize) -> Vec<SpectralTriple> {
    let mut out = Vec::new();
    for n in 0..=max_boxes {
        let lambdas = enumerate_frames(n, d);
        for k in 0..=n {
            let mus = enumerate_frames(k, d);
            let nus = enumerate_frames(n - k, d);
            for mu in &mus {
                for nu in &nus {
                    for lambda in &lambdas {
                        out.push(SpectralTriple {
                            mu: mu.clone(),
                            nu: nu.clone(),
                            lambda: lambda.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}
