//! Hermitian operators and unitary helpers on `C^d`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;

/// A `d x d` complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates `‖M - M†‖_max <= 1e-12` (scaled by the largest entry when
    /// that exceeds 1).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::domain(format!(
                "operator must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let skew = max_abs(&(&matrix - matrix.adjoint()));
        if skew > HERMITIAN_TOL * scale {
            return Err(Error::domain(format!(
                "operator is not Hermitian (skew {skew:e})"
            )));
        }
        Ok(HermitianOperator {
            matrix: hermitian_part(&matrix),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        HermitianOperator {
            matrix: CMatrix::from_diagonal(&v),
        }
    }

    pub fn zeros(d: usize) -> Self {
        HermitianOperator {
            matrix: CMatrix::zeros(d, d),
        }
    }

    /// `U diag(values) U†`.
    pub fn conjugated_diagonal(u: &CMatrix, values: &[f64]) -> Self {
        let d = HermitianOperator::from_real_diagonal(values);
        d.conjugated(u)
    }

    /// `U M U†`, re-symmetrized to absorb rounding.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        HermitianOperator {
            matrix: hermitian_part(&(u * &self.matrix * u.adjoint())),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues_desc(&self) -> Vec<f64> {
        eigenvalues_desc(&self.matrix)
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianOperator {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianOperator {
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    /// Smallest eigenvalue `>= -tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.eigenvalues_desc().last().is_some_and(|&v| v >= -tol)
    }

    /// Rows of `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        matrix_to_pairs(&self.matrix)
    }
}

impl Serialize for HermitianOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = self.to_pairs();
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for row in &rows {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// One matrix entry in JSON input: either `[re, im]` or a bare real number.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum EntryRepr {
    Complex([f64; 2]),
    Real(f64),
}

/// Parses a nested-array JSON matrix.
pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<EntryRepr>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Parse("matrix must be square and nonempty".into()));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| match rows[i][j] {
        EntryRepr::Complex([re, im]) => Complex64::new(re, im),
        EntryRepr::Real(re) => Complex64::new(re, 0.0),
    }))
}

pub fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn eigenvalues_desc(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// GUE-style random Hermitian matrix with unit Frobenius norm.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let h = hermitian_part(&g);
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        h.map(|z| z / norm)
    } else {
        h
    }
}

/// `exp(i t H)` for Hermitian `H`.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&x| Complex64::from_polar(1.0, t * x)),
    );
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&phases) * v.adjoint()
}

/// `‖U†U - I‖_max`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let d = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::identity(d, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=5 {
            let u = random_unitary(d, &mut rng);
            assert!(unitarity_defect(&u) < 1e-12);
            let h = random_hermitian(d, &mut rng);
            let v = unitary_exp(&h, 0.3);
            assert!(unitarity_defect(&v) < 1e-12);
        }
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(3, &mut rng);
        let a = HermitianOperator::conjugated_diagonal(&u, &[2.0, 1.0, -0.5]);
        let ev = a.eigenvalues_desc();
        for (x, y) in ev.iter().zip([2.0, 1.0, -0.5]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a.trace() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert!(matches!(HermitianOperator::new(m), Err(Error::Domain(_))));
    }

    #[test]
    fn json_matrix_forms() {
        let m = matrix_from_json("[[[0.5,0],[0,0.1]],[[0,-0.1],0.5]]").unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.1));
        assert_eq!(m[(1, 1)], Complex64::new(0.5, 0.0));
        assert!(matrix_from_json("[[1,2]]").is_err());
        let h = HermitianOperator::new(m).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, "[[[0.5,0.0],[0.0,0.1]],[[0.0,-0.1],[0.5,0.0]]]");
    }
}
