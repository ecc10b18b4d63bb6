//! Degree test for negative log Kodaira dimension of `(P³, S)`.
//!
//! If `S` is double along `Γ`, an adjoint divisor `D` of degree `d` must
//! contain `Γ` with multiplicity at least `d/2`. Intersecting with `S` gives
//! `deg_s·d = deg(D·S) ≥ 2·(d/2)·deg Γ = d·deg Γ`, which is impossible when
//! `deg_s < deg Γ`. The test is only sufficient.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_int;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NegativityVerdict {
    NegativeCertified,
    Inconclusive,
}

impl NegativityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NegativeCertified => "NEGATIVE_CERTIFIED",
            Self::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativityCertificate {
    #[serde(with = "serde_int::scalar")]
    pub deg_s: BigInt,
    #[serde(with = "serde_int::scalar")]
    pub deg_gamma: BigInt,
    pub verdict: NegativityVerdict,
    pub witness_inequality: String,
    /// Modelling assumption the test rests on.
    pub assumption: String,
}

impl NegativityCertificate {
    pub fn is_negative(&self) -> bool {
        self.verdict == NegativityVerdict::NegativeCertified
    }
}

pub fn negativity_certificate(deg_s: &BigInt, deg_gamma: &BigInt) -> Result<NegativityCertificate> {
    for (name, v) in [("deg_s", deg_s), ("deg_gamma", deg_gamma)] {
        if !v.is_positive() {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    let (verdict, witness_inequality) = if deg_s < deg_gamma {
        (
            NegativityVerdict::NegativeCertified,
            format!("{deg_s}·deg D ≥ {deg_gamma}·deg D is impossible since {deg_s} < {deg_gamma}"),
        )
    } else {
        (
            NegativityVerdict::Inconclusive,
            format!("{deg_s} ≥ {deg_gamma}: no contradiction from the degree test"),
        )
    };
    Ok(NegativityCertificate {
        deg_s: deg_s.clone(),
        deg_gamma: deg_gamma.clone(),
        verdict,
        witness_inequality,
        assumption: "S has multiplicity exactly 2 along Γ (generic projection)".into(),
    })
}
