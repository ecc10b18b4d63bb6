//! Exact dense linear algebra over the integers and rationals.
//!
//! Matrices here are tiny (Picard ranks and feasibility systems in the
//! single digits), so everything is plain `Vec<Vec<_>>` with fraction-free
//! or rational elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mat_vec(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Row vector times matrix: `vᵀ M`.
pub fn vec_mat(v: &[BigInt], m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| v.iter().zip(m).map(|(x, row)| x * &row[j]).sum())
        .collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    a.iter().map(|row| vec_mat(row, b)).collect()
}

pub fn transpose(m: &[Vec<BigInt>]) -> IntMatrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn is_square(m: &[Vec<BigInt>], n: usize) -> bool {
    m.len() == n && m.iter().all(|r| r.len() == n)
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: IntMatrix = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn to_rational(m: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect()
}

/// Reduced row echelon form over the rationals.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigRational>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn rref(m: &[Vec<BigRational>]) -> Echelon {
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon { rows: a, pivots }
}

/// Inverse of an integer matrix with determinant ±1.
pub fn unimodular_inverse(m: &[Vec<BigInt>]) -> Result<IntMatrix> {
    let n = m.len();
    if !is_square(m, n) {
        return Err(Error::InvalidArgument("basis change matrix must be square".into()));
    }
    let det = determinant(m);
    if det.abs() != BigInt::one() {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    let mut aug: Vec<Vec<BigRational>> = to_rational(m);
    for (i, row) in aug.iter_mut().enumerate() {
        for j in 0..n {
            row.push(if i == j { BigRational::one() } else { BigRational::zero() });
        }
    }
    let ech = rref(&aug);
    ech.rows
        .iter()
        .map(|row| {
            row[n..]
                .iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(Error::NotUnimodular(det.to_string()))
                    }
                })
                .collect()
        })
        .collect()
}

/// Unique rational solution of `A x = b`; errors on inconsistency or rank
/// deficiency.
pub fn solve_unique(a: &[Vec<BigInt>], b: &[BigInt]) -> Result<Vec<BigRational>> {
    let n = a.first().map_or(0, Vec::len);
    let mut aug = to_rational(a);
    for (row, rhs) in aug.iter_mut().zip(b) {
        row.push(BigRational::from_integer(rhs.clone()));
    }
    let ech = rref(&aug);
    if ech.pivots.last() == Some(&n) {
        return Err(Error::Contradiction(
            "the incidence equations have no common solution".into(),
        ));
    }
    if ech.rank() < n {
        return Err(Error::Rank {
            rank: ech.rank(),
            needed: n,
        });
    }
    Ok(ech.rows.iter().map(|r| r[n].clone()).collect())
}

/// Smallest positive integer multiple of a rational vector, divided by the
/// gcd of its entries. The zero vector maps to itself.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}
