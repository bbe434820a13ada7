//! Dominant weights of GL(d), Young frames and their normalized spectra.
//!
//! A [`DominantWeight`] always carries its dimension `d` explicitly: shorter
//! inputs are padded with trailing zeros by the caller via
//! [`DominantWeight::padded`], never implicitly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// True iff `parts` is weakly decreasing.
pub fn dominance_check(parts: &[i64]) -> bool {
    parts.windows(2).all(|w| w[0] >= w[1])
}

/// Weakly decreasing integer vector of fixed length `d >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DominantWeight {
    parts: Vec<i64>,
}

impl DominantWeight {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::domain("a dominant weight needs dimension d >= 1"));
        }
        if !dominance_check(&parts) {
            return Err(Error::domain(format!(
                "weight {} is not weakly decreasing",
                join(&parts)
            )));
        }
        Ok(DominantWeight { parts })
    }

    /// Builds a Young frame, rejecting negative parts.
    pub fn frame(parts: Vec<i64>) -> Result<Self> {
        let w = Self::new(parts)?;
        if !w.is_frame() {
            return Err(Error::domain(format!("{w} has negative parts")));
        }
        Ok(w)
    }

    /// The empty frame `(0, ..., 0)` of dimension `d`.
    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        DominantWeight { parts: vec![0; d] }
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn dim(&self) -> usize {
        self.parts.len()
    }

    /// Nonnegative parts, i.e. a Young frame.
    pub fn is_frame(&self) -> bool {
        self.parts.last().is_some_and(|&p| p >= 0)
    }

    /// `|w|`, the sum of the parts.
    pub fn size(&self) -> i64 {
        self.parts.iter().sum()
    }

    /// Number of nonzero parts (rows of the frame).
    pub fn rows(&self) -> usize {
        self.parts.iter().filter(|&&p| p != 0).count()
    }

    /// Pads with trailing zeros to dimension `d`. Fails if the result is not
    /// dominant or if a nonzero part would have to be dropped.
    pub fn padded(&self, d: usize) -> Result<Self> {
        if d < self.dim() {
            if self.parts[d..].iter().any(|&p| p != 0) {
                return Err(Error::domain(format!(
                    "{self} does not fit in dimension {d}"
                )));
            }
            return Self::new(self.parts[..d].to_vec());
        }
        let mut parts = self.parts.clone();
        parts.resize(d, 0);
        Self::new(parts)
    }

    /// `w + m (1^d)`.
    pub fn shifted(&self, m: i64) -> Self {
        DominantWeight {
            parts: self.parts.iter().map(|&p| p + m).collect(),
        }
    }

    pub fn scaled(&self, factor: i64) -> Self {
        assert!(factor >= 0, "scaling by a negative factor breaks dominance");
        DominantWeight {
            parts: self.parts.iter().map(|&p| p * factor).collect(),
        }
    }

    /// Componentwise sum of two weights of equal dimension.
    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        DominantWeight {
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Componentwise `self >= other` (skew-shape containment `other ⊆ self`).
    pub fn contains(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.parts.iter().zip(&other.parts).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for DominantWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.parts))
    }
}

impl FromStr for DominantWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad weight part {t:?} in {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

impl Serialize for DominantWeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DominantWeight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn join(parts: &[i64]) -> String {
    parts
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Descending probability vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NormalizedSpectrum {
    values: Vec<f64>,
}

const SPECTRUM_SUM_TOL: f64 = 1e-12;

impl NormalizedSpectrum {
    /// Validates an already normalized, descending vector.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("empty spectrum"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain(
                "spectrum entries must be finite and nonnegative",
            ));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("spectrum must be sorted descending"));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::domain(format!("spectrum sums to {total}, not 1")));
        }
        Ok(NormalizedSpectrum { values })
    }

    /// Sorts descending and divides by the total. Entries must be nonnegative
    /// with a positive sum.
    pub fn from_unnormalized(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain(
                "spectrum entries must be finite and nonnegative",
            ));
        }
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            return Err(Error::domain("spectrum has zero total weight"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        values.iter_mut().for_each(|v| *v /= total);
        Ok(NormalizedSpectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ℓ₁ distance; the shorter vector is padded with zeros.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        l1_distance(&self.values, &other.values)
    }
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .sum()
}

/// `w / |w|` for a nonzero frame.
pub fn normalize(w: &DominantWeight) -> Result<NormalizedSpectrum> {
    if !w.is_frame() {
        return Err(Error::domain(format!(
            "cannot normalize {w}: negative parts"
        )));
    }
    let total = w.size();
    if total <= 0 {
        return Err(Error::domain(format!(
            "cannot normalize {w}: zero total weight"
        )));
    }
    let t = total as f64;
    Ok(NormalizedSpectrum {
        values: w.parts().iter().map(|&p| p as f64 / t).collect(),
    })
}

/// A triple `(mu, nu, lambda)` of dominant weights of common dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectralTriple {
    pub mu: DominantWeight,
    pub nu: DominantWeight,
    pub lambda: DominantWeight,
}

impl SpectralTriple {
    pub fn new(mu: DominantWeight, nu: DominantWeight, lambda: DominantWeight) -> Result<Self> {
        if mu.dim() != nu.dim() || mu.dim() != lambda.dim() {
            return Err(Error::domain(format!(
                "triple dimensions differ: {}, {}, {}",
                mu.dim(),
                nu.dim(),
                lambda.dim()
            )));
        }
        Ok(SpectralTriple { mu, nu, lambda })
    }

    /// Pads all three weights to the largest of their lengths (or `d`, if
    /// given and larger).
    pub fn padded(
        mu: &DominantWeight,
        nu: &DominantWeight,
        lambda: &DominantWeight,
        d: Option<usize>,
    ) -> Result<Self> {
        let d = d.unwrap_or_else(|| mu.dim().max(nu.dim()).max(lambda.dim()));
        Self::new(mu.padded(d)?, nu.padded(d)?, lambda.padded(d)?)
    }

    /// Convenience constructor from raw parts; panics on invalid input.
    pub fn from_parts(mu: &[i64], nu: &[i64], lambda: &[i64]) -> Self {
        let w = |p: &[i64]| DominantWeight::new(p.to_vec()).expect("dominant weight");
        Self::padded(&w(mu), &w(nu), &w(lambda), None).expect("valid triple")
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    /// `|mu| + |nu| = |lambda|`.
    pub fn is_balanced(&self) -> bool {
        self.mu.size() + self.nu.size() == self.lambda.size()
    }

    pub fn is_frames(&self) -> bool {
        self.mu.is_frame() && self.nu.is_frame() && self.lambda.is_frame()
    }

    pub fn swapped(&self) -> Self {
        SpectralTriple {
            mu: self.nu.clone(),
            nu: self.mu.clone(),
            lambda: self.lambda.clone(),
        }
    }

    pub fn scaled(&self, factor: i64) -> Self {
        SpectralTriple {
            mu: self.mu.scaled(factor),
            nu: self.nu.scaled(factor),
            lambda: self.lambda.scaled(factor),
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        SpectralTriple {
            mu: self.mu.sum(&other.mu),
            nu: self.nu.sum(&other.nu),
            lambda: self.lambda.sum(&other.lambda),
        }
    }
}

impl fmt::Display for SpectralTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{};{}", self.mu, self.nu, self.lambda)
    }
}

impl FromStr for SpectralTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lists: Vec<&str> = s.split(';').collect();
        if lists.len() != 3 {
            return Err(Error::Parse(format!(
                "expected three ';'-separated weights in {s:?}"
            )));
        }
        Self::new(lists[0].parse()?, lists[1].parse()?, lists[2].parse()?)
    }
}

/// `mu + m(1^d)`, `nu + n(1^d)`, `lambda + (m+n)(1^d)`.
pub fn shift_triple(t: &SpectralTriple, m: i64, n: i64) -> SpectralTriple {
    SpectralTriple {
        mu: t.mu.shifted(m),
        nu: t.nu.shifted(n),
        lambda: t.lambda.shifted(m + n),
    }
}

/// All partitions of `n` into at most `d` parts, padded to length `d`, in
/// lexicographically descending order.
pub fn enumerate_frames(n: usize, d: usize) -> Vec<DominantWeight> {
    assert!(d >= 1, "dimension must be at least 1");
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(d);
    fill_frames(n, n, d, &mut current, &mut out);
    out
}

fn fill_frames(
    remaining: usize,
    max_part: usize,
    d: usize,
    current: &mut Vec<i64>,
    out: &mut Vec<DominantWeight>,
) {
    let slots = d - current.len();
    if slots == 0 {
        if remaining == 0 {
            out.push(DominantWeight {
                parts: current.clone(),
            });
        }
        return;
    }
    // The remaining slots can absorb at most slots * max_part boxes.
    if remaining > slots * max_part {
        return;
    }
    let lo = remaining.div_ceil(slots);
    for part in (lo..=max_part.min(remaining)).rev() {
        current.push(part as i64);
        fill_frames(remaining - part, part, d, current, out);
        current.pop();
    }
}
