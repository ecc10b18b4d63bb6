//! The blow-up `ν: T → P³` of the double curve of a projected surface.
//!
//! `Pic(T)` has rank 2, spanned by `ν*H` and the exceptional divisor `E_Γ`.
//! The strict transform of `S` is `S_T = d·ν*H - 2E_Γ` and the canonical
//! class is `K_T = -4ν*H + E_Γ`. Both restrict to the smooth surface
//! `S_T ≅ W` through `ν*H|_{S_T} = H` and `E_Γ|_{S_T} = Γ_W`, which is all
//! the intersection theory needed for curves lying on `S_T`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::DivisorClass;
use crate::projection::ProjectionModel;
use crate::serde_int;

/// `h·ν*H + e·E_Γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreefoldDivisor {
    #[serde(with = "serde_int::scalar")]
    pub h: BigInt,
    #[serde(with = "serde_int::scalar")]
    pub e: BigInt,
}

impl ThreefoldDivisor {
    pub fn new(h: impl Into<BigInt>, e: impl Into<BigInt>) -> Self {
        Self { h: h.into(), e: e.into() }
    }

    pub fn exceptional() -> Self {
        Self::new(0, 1)
    }

    pub fn canonical() -> Self {
        Self::new(-4, 1)
    }
}

impl fmt::Display for ThreefoldDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeff = |c: &BigInt| if c.abs().is_one() { String::new() } else { c.abs().to_string() };
        let h = match (self.h.is_zero(), self.h.is_negative()) {
            (true, _) => String::new(),
            (false, neg) => format!("{}{}H", if neg { "-" } else { "" }, coeff(&self.h)),
        };
        match (h.is_empty(), self.e.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{h}"),
            (true, false) => write!(f, "{}{}E", if self.e.is_negative() { "-" } else { "" }, coeff(&self.e)),
            (false, false) => write!(
                f,
                "{h} {} {}E",
                if self.e.is_negative() { "-" } else { "+" },
                coeff(&self.e)
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RayKind {
    Fibration,
    BirationalContractionFano,
    FlopWallCanonicalFano,
    Unclassified,
}

impl RayKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fibration => "FIBRATION",
            Self::BirationalContractionFano => "BIRATIONAL_CONTRACTION_FANO",
            Self::FlopWallCanonicalFano => "FLOP_WALL_CANONICAL_FANO",
            Self::Unclassified => "UNCLASSIFIED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RayVerdict {
    #[serde(rename = "ray", serialize_with = "ray_coeffs")]
    pub ray_class: DivisorClass,
    #[serde(with = "serde_int::scalar")]
    pub s_dot: BigInt,
    #[serde(with = "serde_int::scalar")]
    pub k_dot: BigInt,
    pub kind: RayKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<String>,
}

fn ray_coeffs<S: serde::Serializer>(c: &DivisorClass, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde_int::vec::serialize(c.coeffs(), s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupThreefold {
    projection: ProjectionModel,
    sing_points: Option<BigInt>,
    curve_generators: Vec<DivisorClass>,
    declared_effective: Vec<(String, ThreefoldDivisor)>,
}

impl BlowupThreefold {
    pub fn new(projection: ProjectionModel) -> Self {
        let sing_points = projection.triple_points().cloned();
        Self {
            projection,
            sing_points,
            curve_generators: Vec::new(),
            declared_effective: Vec::new(),
        }
    }

    /// Declares the generators of the curve cone of `S_T` used for nefness
    /// and for the fibration test.
    pub fn with_curve_generators(mut self, generators: Vec<DivisorClass>) -> Result<Self> {
        for g in &generators {
            self.surface_lattice_contains(g)?;
        }
        self.curve_generators = generators;
        Ok(self)
    }

    /// Declares an effective divisor on `T` that is assumed, not derived.
    pub fn with_declared_divisor(mut self, name: impl Into<String>, d: ThreefoldDivisor) -> Self {
        self.declared_effective.push((name.into(), d));
        self
    }

    pub fn projection(&self) -> &ProjectionModel {
        &self.projection
    }

    /// Number of `1/2(1,-1,1)` points, one over each triple point of `Γ`.
    pub fn sing_points(&self) -> Option<&BigInt> {
        self.sing_points.as_ref()
    }

    pub fn curve_generators(&self) -> &[DivisorClass] {
        &self.curve_generators
    }

    pub fn declared_divisors(&self) -> &[(String, ThreefoldDivisor)] {
        &self.declared_effective
    }

    pub fn h_restrict(&self) -> &DivisorClass {
        self.projection.source().polarization()
    }

    pub fn e_restrict(&self) -> &DivisorClass {
        self.projection.gamma_w()
    }

    pub fn strict_surface(&self) -> ThreefoldDivisor {
        ThreefoldDivisor::new(self.projection.deg_s().clone(), -2)
    }

    fn surface_lattice_contains(&self, c: &DivisorClass) -> Result<()> {
        self.projection.source().lattice().contains(c)
    }

    /// Restriction of a divisor on `T` to `S_T`.
    pub fn restrict(&self, d: &ThreefoldDivisor) -> Result<DivisorClass> {
        self.h_restrict()
            .scaled(&d.h)
            .checked_add(&self.e_restrict().scaled(&d.e))
    }

    /// `D·C` for a curve `C ⊂ S_T`.
    pub fn dot(&self, d: &ThreefoldDivisor, c: &DivisorClass) -> Result<BigInt> {
        self.surface_lattice_contains(c)?;
        let lattice = self.projection.source().lattice();
        Ok(&d.h * lattice.pair(self.h_restrict(), c)? + &d.e * lattice.pair(self.e_restrict(), c)?)
    }

    /// `S_T·C = d·(C·H) - 2·(C·Γ_W)`.
    pub fn st_dot(&self, c: &DivisorClass) -> Result<BigInt> {
        self.dot(&self.strict_surface(), c)
    }

    /// `K_T·C = -4·(C·H) + C·Γ_W`.
    pub fn kt_dot(&self, c: &DivisorClass) -> Result<BigInt> {
        self.dot(&ThreefoldDivisor::canonical(), c)
    }

    pub fn is_nef_on(&self, generators: &[DivisorClass]) -> Result<bool> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        for g in generators {
            if self.st_dot(g)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `S_T|_{S_T} ≡ 0` forces `Γ_W = (d/2)·H`, hence `d² = 4·deg Γ`.
    pub fn fibration_numerology(&self) -> (BigInt, BigInt) {
        let d = self.projection.deg_s();
        (d * d, self.projection.deg_gamma() * 4)
    }

    /// Classifies the second extremal ray, spanned by the caller-supplied
    /// curve class `c` on `S_T`.
    pub fn classify_second_ray(&self, c: &DivisorClass) -> Result<RayVerdict> {
        let s_dot = self.st_dot(c)?;
        let k_dot = self.kt_dot(c)?;
        let mut assumptions = Vec::new();
        let kind = if s_dot.is_negative() && k_dot.is_zero() {
            RayKind::FlopWallCanonicalFano
        } else if s_dot.is_zero() && k_dot.is_negative() {
            let mut negative = None;
            for (name, d) in &self.declared_effective {
                if self.dot(d, c)?.is_negative() {
                    negative = Some(name.clone());
                    break;
                }
            }
            if let Some(name) = negative {
                assumptions.push(format!(
                    "effective divisor `{name}` is declared by the model, not constructed"
                ));
                RayKind::BirationalContractionFano
            } else {
                let nef = !self.curve_generators.is_empty() && self.is_nef_on(&self.curve_generators)?;
                let (lhs, rhs) = self.fibration_numerology();
                if nef && lhs == rhs {
                    RayKind::Fibration
                } else {
                    RayKind::Unclassified
                }
            }
        } else {
            RayKind::Unclassified
        };
        Ok(RayVerdict {
            ray_class: c.clone(),
            s_dot,
            k_dot,
            kind,
            assumptions,
        })
    }

    /// `-K_T` is positive on the fibres of `ν` (relative ampleness of the
    /// terminal blow-up, `-K_T·fibre = 1`) and must be positive on every
    /// supplied ray.
    pub fn fano_check(&self, rays: &[DivisorClass]) -> Result<bool> {
        if rays.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        for r in rays {
            if !(-self.kt_dot(r)?).is_positive() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `sup { t ≥ 0 : S_T + t·K_T ∈ cone(E_Γ, declared divisors) }`, or
    /// `None` when `S_T` itself is outside that cone. `Some(None)` means
    /// the supremum is unbounded.
    pub fn effective_threshold(&self) -> Option<Option<BigRational>> {
        let s = self.strict_surface();
        let k = ThreefoldDivisor::canonical();
        let mut gens = vec![ThreefoldDivisor::exceptional()];
        gens.extend(self.declared_effective.iter().map(|(_, d)| d.clone()));
        let q = |x: &BigInt| BigRational::from_integer(x.clone());

        let mut best: Option<Option<BigRational>> = None;
        let mut consider = |hi: Option<BigRational>| {
            best = match (best.take(), hi) {
                (None, h) => Some(h),
                (Some(None), _) | (_, None) => Some(None),
                (Some(Some(a)), Some(b)) => Some(Some(if a > b { a } else { b })),
            };
        };
        for i in 0..gens.len() {
            for j in i..gens.len() {
                let (a, b) = (&gens[i], &gens[j]);
                let det = &a.h * &b.e - &b.h * &a.e;
                // S + tK = x·a + y·b; x, y affine in t.
                let (x0, x1, y0, y1) = if det.is_zero() {
                    if i != j {
                        continue;
                    }
                    // single ray: S + tK must be a nonnegative multiple of a
                    match single_ray_interval(a, &s, &k) {
                        Some(hi) => {
                            consider(hi);
                            continue;
                        }
                        None => continue,
                    }
                } else {
                    let d = q(&det);
                    (
                        q(&(&s.h * &b.e - &b.h * &s.e)) / &d,
                        q(&(&k.h * &b.e - &b.h * &k.e)) / &d,
                        q(&(&a.h * &s.e - &s.h * &a.e)) / &d,
                        q(&(&a.h * &k.e - &k.h * &a.e)) / &d,
                    )
                };
                if let Some(hi) = affine_nonneg_sup(&[(x0, x1), (y0, y1)]) {
                    consider(hi);
                }
            }
        }
        best
    }
}

/// For constraints `c0 + c1·t ≥ 0` on `t ≥ 0`, the supremum of the feasible
/// set (`Some(None)` if unbounded), or `None` if infeasible.
fn affine_nonneg_sup(constraints: &[(BigRational, BigRational)]) -> Option<Option<BigRational>> {
    let mut lo = BigRational::zero();
    let mut hi: Option<BigRational> = None;
    for (c0, c1) in constraints {
        if c1.is_zero() {
            if c0.is_negative() {
                return None;
            }
        } else {
            let root = -c0 / c1;
            if c1.is_positive() {
                if root > lo {
                    lo = root;
                }
            } else {
                hi = Some(match hi {
                    Some(h) if h < root => h,
                    _ => root,
                });
            }
        }
    }
    match &hi {
        Some(h) if h < &lo => None,
        _ => Some(hi),
    }
}

fn single_ray_interval(
    a: &ThreefoldDivisor,
    s: &ThreefoldDivisor,
    k: &ThreefoldDivisor,
) -> Option<Option<BigRational>> {
    // S + tK parallel to a: (s.h + t k.h) a.e - (s.e + t k.e) a.h = 0
    let c0 = &s.h * &a.e - &s.e * &a.h;
    let c1 = &k.h * &a.e - &k.e * &a.h;
    let t = if c1.is_zero() {
        if !c0.is_zero() {
            return None;
        }
        None
    } else {
        Some(BigRational::new(-c0, c1))
    };
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    // nonnegative multiple: (S + tK)·a ≥ 0 in the euclidean sense
    let proj = |t: &BigRational| {
        (q(&s.h) + t * q(&k.h)) * q(&a.h) + (q(&s.e) + t * q(&k.e)) * q(&a.e)
    };
    match t {
        Some(t) if !t.is_negative() && !proj(&t).is_negative() => Some(Some(t)),
        Some(_) => None,
        None => {
            // whole line is parallel; feasible where the projection is nonnegative
            let p0 = proj(&BigRational::zero());
            let p1 = proj(&BigRational::one()) - &p0;
            affine_nonneg_sup(&[(p0, p1)])
        }
    }
}
