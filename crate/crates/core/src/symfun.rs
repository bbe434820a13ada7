//! Symmetric-group characters, representation dimensions and Schur polynomials.
//!
//! Characters use the Murnaghan-Nakayama rule on beta-sets (abacus form),
//! memoized over `(frame, remaining cycle type)` in a process-wide table.
//! All integer results are exact big integers.

use std::collections::HashMap;
use std::ops::{Add, Mul};
use std::sync::{Arc, LazyLock, Mutex, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::weights::{enumerate_frames, DominantWeight};

/// Conjugacy class label of `S_k`: a partition of `k` into positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    /// Sorts the cycle lengths descending; zero lengths are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::domain("cycle lengths must be positive"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    /// The identity class `(1^k)`.
    pub fn identity(k: usize) -> Self {
        CycleType { parts: vec![1; k] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The `k` of `S_k`.
    pub fn order(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Cycle type of the product permutation in `S_k x S_l ⊂ S_{k+l}`.
    pub fn union(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    /// Centralizer order `z_rho = prod_i i^{m_i} m_i!`.
    pub fn centralizer_order(&self) -> BigUint {
        let mut counts: HashMap<usize, u64> = HashMap::new();
        for &p in &self.parts {
            *counts.entry(p).or_default() += 1;
        }
        counts.into_iter().fold(BigUint::one(), |acc, (len, m)| {
            acc * BigUint::from(len).pow(m as u32) * factorial(m as usize)
        })
    }

    /// Number of permutations with this cycle type, `k! / z_rho`.
    pub fn class_size(&self) -> BigUint {
        factorial(self.order()) / self.centralizer_order()
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// All partitions of `k` as nonzero-part vectors, lexicographically descending.
pub fn partitions(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    enumerate_frames(k, k).iter().map(frame_parts).collect()
}

type ClassTable = Arc<Vec<(CycleType, BigUint)>>;

static CLASSES: LazyLock<Mutex<HashMap<usize, ClassTable>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Conjugacy classes of `S_k` with their sizes, cached per `k`.
pub fn conjugacy_classes(k: usize) -> ClassTable {
    if let Some(t) = CLASSES.lock().expect("class cache poisoned").get(&k) {
        return Arc::clone(t);
    }
    let table: ClassTable = Arc::new(
        partitions(k)
            .into_iter()
            .map(|p| {
                let c = CycleType { parts: p };
                let size = c.class_size();
                (c, size)
            })
            .collect(),
    );
    CLASSES
        .lock()
        .expect("class cache poisoned")
        .entry(k)
        .or_insert(table)
        .clone()
}

fn frame_parts(w: &DominantWeight) -> Vec<usize> {
    w.parts()
        .iter()
        .take_while(|&&p| p > 0)
        .map(|&p| p as usize)
        .collect()
}

fn checked_frame(lambda: &DominantWeight) -> Result<Vec<usize>> {
    if !lambda.is_frame() {
        return Err(Error::domain(format!("{lambda} is not a Young frame")));
    }
    Ok(frame_parts(lambda))
}

type CharKey = (Vec<usize>, Vec<usize>);

static CHARACTERS: LazyLock<RwLock<HashMap<CharKey, BigInt>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Exact character value `chi_lambda(rho)` of the irreducible `S_k`
/// representation labelled by the frame `lambda`.
pub fn sym_character(lambda: &DominantWeight, rho: &CycleType) -> Result<BigInt> {
    let shape = checked_frame(lambda)?;
    let k: usize = shape.iter().sum();
    if k != rho.order() {
        return Err(Error::domain(format!(
            "size mismatch: |lambda| = {k}, |rho| = {}",
            rho.order()
        )));
    }
    Ok(murnaghan_nakayama(&shape, &rho.parts))
}

fn murnaghan_nakayama(shape: &[usize], rho: &[usize]) -> BigInt {
    let Some((&r, rest)) = rho.split_first() else {
        // Only the empty frame has size 0.
        return BigInt::one();
    };
    let key = (shape.to_vec(), rho.to_vec());
    if let Some(v) = CHARACTERS
        .read()
        .expect("character memo poisoned")
        .get(&key)
    {
        return v.clone();
    }

    // Beta-set: beta_i = lambda_i + (len - 1 - i), strictly decreasing.
    let len = shape.len();
    let beta: Vec<usize> = shape
        .iter()
        .enumerate()
        .map(|(i, &p)| p + len - 1 - i)
        .collect();
    let mut total = BigInt::zero();
    for (idx, &b) in beta.iter().enumerate() {
        if b < r {
            continue;
        }
        let target = b - r;
        if beta.contains(&target) {
            continue;
        }
        // Beads jumped over by the move b -> b - r give the hook's leg length.
        let leg = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut moved = beta.clone();
        moved[idx] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let reduced: Vec<usize> = moved
            .iter()
            .enumerate()
            .map(|(i, &x)| x - (len - 1 - i))
            .take_while(|&p| p > 0)
            .collect();
        let value = murnaghan_nakayama(&reduced, rest);
        if leg % 2 == 0 {
            total += value;
        } else {
            total -= value;
        }
    }

    CHARACTERS
        .write()
        .expect("character memo poisoned")
        .insert(key, total.clone());
    total
}

/// `dim V_lambda` by the hook length formula.
pub fn sym_dim(lambda: &DominantWeight) -> Result<BigUint> {
    let shape = checked_frame(lambda)?;
    Ok(hook_length_dim(&shape))
}

fn hook_length_dim(shape: &[usize]) -> BigUint {
    let k: usize = shape.iter().sum();
    let cols = shape.first().copied().unwrap_or(0);
    let conj: Vec<usize> = (0..cols)
        .map(|j| shape.iter().filter(|&&p| p > j).count())
        .collect();
    let hooks = shape
        .iter()
        .enumerate()
        .flat_map(|(i, &row)| (0..row).map(move |j| (i, j, row)))
        .fold(BigUint::one(), |acc, (i, j, row)| {
            acc * BigUint::from(row - j + conj[j] - i - 1)
        });
    factorial(k) / hooks
}

/// `dim U_lambda` of GL(d) by the Weyl dimension formula. Accepts dominant
/// weights with negative parts; `lambda` is padded to dimension `d`.
pub fn gl_dim(lambda: &DominantWeight, d: usize) -> Result<BigUint> {
    let w = lambda.padded(d)?;
    let parts = w.parts();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..d {
        for j in i + 1..d {
            num *= BigInt::from(parts[i] - parts[j] + (j - i) as i64);
            den *= BigInt::from((j - i) as i64);
        }
    }
    debug_assert!((&num % &den).is_zero());
    Ok((num / den)
        .to_biguint()
        .expect("Weyl dimension is positive"))
}

/// Schur polynomial `s_lambda(x)` in floating point.
pub fn schur_poly(lambda: &DominantWeight, x: &[f64]) -> Result<f64> {
    let shape = checked_frame(lambda)?;
    Ok(schur_branching(&shape, x))
}

/// Schur polynomial `s_lambda(x)` in exact rational arithmetic.
pub fn schur_poly_exact(lambda: &DominantWeight, x: &[BigRational]) -> Result<BigRational> {
    let shape = checked_frame(lambda)?;
    Ok(schur_branching(&shape, x))
}

/// Sums monomials over Gelfand-Tsetlin patterns, i.e. over semistandard
/// tableaux grouped by the shape filled with entries `<= m` for each `m`:
/// `s_lambda(x_1..x_m) = sum_{mu interlacing lambda} s_mu(x_1..x_{m-1}) x_m^{|lambda|-|mu|}`.
fn schur_branching<T>(shape: &[usize], x: &[T]) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    if shape.len() > x.len() {
        return T::zero();
    }
    let mut padded = shape.to_vec();
    padded.resize(x.len(), 0);
    let mut memo = HashMap::new();
    branch(&padded, x, &mut memo)
}

fn branch<T>(lambda: &[usize], x: &[T], memo: &mut HashMap<Vec<usize>, T>) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    let m = lambda.len();
    if m == 0 {
        return T::one();
    }
    if m == 1 {
        return pow(&x[0], lambda[0]);
    }
    if let Some(v) = memo.get(lambda) {
        return v.clone();
    }
    let size: usize = lambda.iter().sum();
    let mut total = T::zero();
    let mut mu = vec![0usize; m - 1];
    interlacing(lambda, 0, &mut mu, &mut |mu| {
        let inner = branch(mu, &x[..m - 1], memo);
        let removed = size - mu.iter().sum::<usize>();
        total = total.clone() + inner * pow(&x[m - 1], removed);
    });
    memo.insert(lambda.to_vec(), total.clone());
    total
}

/// Visits every `mu` with `lambda_i >= mu_i >= lambda_{i+1}`.
fn interlacing(lambda: &[usize], i: usize, mu: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if i == mu.len() {
        visit(mu);
        return;
    }
    for v in lambda[i + 1]..=lambda[i] {
        mu[i] = v;
        interlacing(lambda, i + 1, mu, visit);
    }
}

fn pow<T: Clone + One + Mul<Output = T>>(base: &T, exp: usize) -> T {
    (0..exp).fold(T::one(), |acc, _| acc * base.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::ToBigInt;

    fn w(p: &[i64]) -> DominantWeight {
        DominantWeight::new(p.to_vec()).unwrap()
    }

    fn ct(p: &[usize]) -> CycleType {
        CycleType::new(p.to_vec()).unwrap()
    }

    #[test]
    fn character_examples() {
        for k in 1..7usize {
            for rho in partitions(k) {
                let v = sym_character(&w(&[k as i64]), &CycleType::new(rho).unwrap()).unwrap();
                assert_eq!(v, BigInt::one());
            }
        }
        assert_eq!(
            sym_character(&w(&[1, 1]), &ct(&[2])).unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            sym_character(&w(&[2, 1]), &ct(&[1, 1, 1])).unwrap(),
            BigInt::from(2)
        );
    }

    #[test]
    fn character_table_s4() {
        // rows (4),(3,1),(2,2),(2,1,1),(1,1,1,1); columns (1^4),(2,1,1),(2,2),(3,1),(4)
        let table: [[i64; 5]; 5] = [
            [1, 1, 1, 1, 1],
            [3, 1, -1, 0, -1],
            [2, 0, 2, -1, 0],
            [3, -1, -1, 0, 1],
            [1, -1, 1, 1, -1],
        ];
        let rows = [&[4][..], &[3, 1], &[2, 2], &[2, 1, 1], &[1, 1, 1, 1]];
        let cols = [&[1, 1, 1, 1][..], &[2, 1, 1], &[2, 2], &[3, 1], &[4]];
        for (r, shape) in rows.iter().enumerate() {
            for (c, rho) in cols.iter().enumerate() {
                let got = sym_character(&w(shape), &ct(rho)).unwrap();
                assert_eq!(got, BigInt::from(table[r][c]), "chi_{shape:?}({rho:?})");
            }
        }
    }

    #[test]
    fn character_size_mismatch() {
        assert!(matches!(
            sym_character(&w(&[2, 1]), &ct(&[2])),
            Err(Error::Domain(_))
        ));
        assert!(sym_character(&w(&[1, -1]), &ct(&[])).is_err());
    }

    #[test]
    fn character_at_identity_is_dimension() {
        for k in 0..=9usize {
            for shape in partitions(k) {
                let lam = DominantWeight::frame(if shape.is_empty() {
                    vec![0]
                } else {
                    shape.iter().map(|&p| p as i64).collect()
                })
                .unwrap();
                let chi = sym_character(&lam, &CycleType::identity(k)).unwrap();
                assert_eq!(chi, sym_dim(&lam).unwrap().to_bigint().unwrap());
            }
        }
    }

    #[test]
    fn row_orthogonality() {
        // sum_rho |C_rho| chi_a(rho) chi_b(rho) = k! delta_ab
        for k in 1..=7usize {
            let frames = enumerate_frames(k, k);
            let classes = conjugacy_classes(k);
            for a in &frames {
                for b in &frames {
                    let s: BigInt = classes
                        .iter()
                        .map(|(c, size)| {
                            BigInt::from(size.clone())
                                * sym_character(a, c).unwrap()
                                * sym_character(b, c).unwrap()
                        })
                        .sum();
                    let expect = if a == b {
                        BigInt::from(factorial(k))
                    } else {
                        BigInt::zero()
                    };
                    assert_eq!(s, expect, "k={k} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(sym_dim(&w(&[5])).unwrap(), BigUint::one());
        assert_eq!(sym_dim(&w(&[2, 1])).unwrap(), BigUint::from(2u32));
        assert_eq!(sym_dim(&w(&[2, 2])).unwrap(), BigUint::from(2u32));
        assert_eq!(sym_dim(&w(&[3, 2, 1])).unwrap(), BigUint::from(16u32));
        assert_eq!(gl_dim(&w(&[1, 0]), 2).unwrap(), BigUint::from(2u32));
        assert_eq!(gl_dim(&w(&[1, 1]), 2).unwrap(), BigUint::from(1u32));
        assert_eq!(gl_dim(&w(&[2, 0]), 2).unwrap(), BigUint::from(3u32));
        assert_eq!(gl_dim(&w(&[2, 1, 0]), 3).unwrap(), BigUint::from(8u32));
        // determinant twist does not change the dimension
        assert_eq!(gl_dim(&w(&[1, 0, -1]), 3).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn sum_of_squared_dimensions() {
        for k in 0..=8usize {
            let total: BigUint = enumerate_frames(k, k.max(1))
                .iter()
                .map(|f| sym_dim(f).unwrap().pow(2))
                .sum();
            assert_eq!(total, factorial(k), "k={k}");
        }
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for k in 0..=10usize {
            let total: BigUint = conjugacy_classes(k).iter().map(|(_, s)| s.clone()).sum();
            assert_eq!(total, factorial(k));
        }
        assert_eq!(ct(&[2, 1, 1]).class_size(), BigUint::from(6u32));
        assert_eq!(ct(&[2, 2]).class_size(), BigUint::from(3u32));
    }

    #[test]
    fn schur_examples() {
        let (a, b) = (0.3, 0.45);
        assert!((schur_poly(&w(&[1]), &[a, b]).unwrap() - (a + b)).abs() < 1e-15);
        assert!((schur_poly(&w(&[1, 1]), &[a, b]).unwrap() - a * b).abs() < 1e-15);
        assert!((schur_poly(&w(&[2]), &[0.5, 0.5]).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(schur_poly(&w(&[1, 1, 1]), &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(schur_poly(&w(&[0, 0]), &[0.2, 0.8]).unwrap(), 1.0);
    }

    #[test]
    fn schur_exact_matches_float() {
        let xs = [
            BigRational::new(2.into(), 3.into()),
            BigRational::new(1.into(), 4.into()),
            BigRational::new(1.into(), 12.into()),
        ];
        let xf = [2.0 / 3.0, 0.25, 1.0 / 12.0];
        for n in 0..=6usize {
            for f in enumerate_frames(n, 3) {
                let exact = schur_poly_exact(&f, &xs).unwrap();
                let approx = schur_poly(&f, &xf).unwrap();
                let e = exact.numer().to_string().parse::<f64>().unwrap()
                    / exact.denom().to_string().parse::<f64>().unwrap();
                assert!((e - approx).abs() < 1e-14, "{f}");
            }
        }
        // s_(2,1)(1,1,1) = 8
        let ones = vec![BigRational::one(); 3];
        assert_eq!(
            schur_poly_exact(&w(&[2, 1, 0]), &ones).unwrap(),
            BigRational::from_integer(8.into())
        );
    }

    /// Brute-force SSYT enumeration, independent of the branching recursion.
    fn ssyt_sum(shape: &[usize], x: &[f64]) -> f64 {
        let cells: Vec<(usize, usize)> = shape
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| (0..r).map(move |j| (i, j)))
            .collect();
        let mut fill = vec![vec![0usize; shape.first().copied().unwrap_or(0)]; shape.len()];
        fn go(idx: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<usize>>, x: &[f64]) -> f64 {
            if idx == cells.len() {
                return fill
                    .iter()
                    .flat_map(|r| r.iter())
                    .filter(|&&v| v > 0)
                    .map(|&v| x[v - 1])
                    .product();
            }
            let (i, j) = cells[idx];
            let lo_row = if j > 0 { fill[i][j - 1] } else { 1 };
            let lo_col = if i > 0 { fill[i - 1][j] + 1 } else { 1 };
            let mut s = 0.0;
            for v in lo_row.max(lo_col)..=x.len() {
                fill[i][j] = v;
                s += go(idx + 1, cells, fill, x);
            }
            fill[i][j] = 0;
            s
        }
        go(0, &cells, &mut fill, x)
    }

    #[test]
    fn branching_matches_tableaux_enumeration() {
        let x = [0.5, 0.3, 0.15, 0.05];
        for n in 0..=6usize {
            for f in enumerate_frames(n, 4) {
                let shape = frame_parts(&f);
                let brute = ssyt_sum(&shape, &x);
                assert!((schur_poly(&f, &x).unwrap() - brute).abs() < 1e-14, "{f}");
            }
        }
    }

    #[test]
    fn principal_specialization_is_gl_dim() {
        for n in 0..=8usize {
            for d in 1..=4usize {
                for f in enumerate_frames(n, d) {
                    let ones = vec![BigRational::one(); d];
                    let s = schur_poly_exact(&f, &ones).unwrap();
                    assert_eq!(
                        s,
                        BigRational::from_integer(BigInt::from(gl_dim(&f, d).unwrap()))
                    );
                }
            }
        }
    }

    #[test]
    fn schur_weyl_dimension_count() {
        for d in 1..=3usize {
            for k in 0..=8usize {
                let total: BigUint = enumerate_frames(k, d)
                    .iter()
                    .map(|f| gl_dim(f, d).unwrap() * sym_dim(f).unwrap())
                    .sum();
                assert_eq!(total, BigUint::from(d).pow(k as u32), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn concurrent_characters_match_sequential() {
        use rayon::prelude::*;
        let frames = enumerate_frames(9, 9);
        let classes = conjugacy_classes(9);
        let jobs: Vec<_> = frames
            .iter()
            .flat_map(|f| classes.iter().map(move |(c, _)| (f.clone(), c.clone())))
            .collect();
        let par: Vec<BigInt> = jobs
            .par_iter()
            .map(|(f, c)| sym_character(f, c).unwrap())
            .collect();
        let seq: Vec<BigInt> = jobs
            .iter()
            .map(|(f, c)| sym_character(f, c).unwrap())
            .collect();
        assert_eq!(par, seq);
    }
}
