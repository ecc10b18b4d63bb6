//! Dimension counts and the monoid test used for families of surfaces.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_int;

/// `dim G(k, n)` for `k`-planes in `Pⁿ`: `(k+1)(n-k)`.
pub fn grassmannian_dim(k: &BigInt, n: &BigInt) -> Result<BigInt> {
    if k.is_negative() || k >= n {
        return Err(Error::InvalidArgument(format!("need 0 ≤ k < n, got k = {k}, n = {n}")));
    }
    Ok((k + 1u32) * (n - k))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionCount {
    #[serde(with = "serde_int::vec")]
    pub grassmannian: Vec<BigInt>,
    #[serde(with = "serde_int::vec")]
    pub param_space_dims: Vec<BigInt>,
    #[serde(with = "serde_int::scalar")]
    pub lhs: BigInt,
    #[serde(with = "serde_int::scalar")]
    pub rhs: BigInt,
    pub dominant_possible: bool,
    /// Holds only the dimension comparison; generic finiteness of the map
    /// is an assumption.
    pub assumption: String,
}

/// Compares the total dimension of a parameter space with `dim G(k, n)`.
pub fn dominance_count(param_space_dims: &[BigInt], k: &BigInt, n: &BigInt) -> Result<DimensionCount> {
    if let Some(d) = param_space_dims.iter().find(|d| d.is_negative()) {
        return Err(Error::InvalidArgument(format!("negative dimension {d}")));
    }
    let lhs: BigInt = param_space_dims.iter().sum();
    let rhs = grassmannian_dim(k, n)?;
    Ok(DimensionCount {
        grassmannian: vec![k.clone(), n.clone()],
        param_space_dims: param_space_dims.to_vec(),
        dominant_possible: lhs >= rhs,
        lhs,
        rhs,
        assumption: "the map to the Grassmannian is generically finite".into(),
    })
}

/// A degree `deg` hypersurface with a point of multiplicity `deg - 1` is a
/// monoid, and projection from that point makes it Cremona equivalent to a
/// hyperplane.
pub fn monoid_ce_predicate(deg: &BigInt, mult: &BigInt) -> Result<bool> {
    if !deg.is_positive() || mult.is_negative() || mult > deg {
        return Err(Error::InvalidArgument(format!(
            "need deg ≥ 1 and 0 ≤ mult ≤ deg, got deg = {deg}, mult = {mult}"
        )));
    }
    Ok(*mult == deg - 1u32)
}

/// Expected projective dimension of plane curves of degree `d` with the
/// given point multiplicities: `C(d+2, 2) - Σ m(m+1)/2 - 1`. It can
/// undercount when the conditions are dependent.
pub fn expected_linear_system_dim(d: &BigInt, mults: &[BigInt]) -> Result<BigInt> {
    if d.is_negative() || mults.iter().any(|m| m.is_negative()) {
        return Err(Error::InvalidArgument("degree and multiplicities must be nonnegative".into()));
    }
    let sections = binomial(d + 2u32, BigInt::from(2));
    let conditions: BigInt = mults.iter().map(|m| m * (m + 1u32) / 2u32).sum();
    Ok(sections - conditions - 1u32)
}
