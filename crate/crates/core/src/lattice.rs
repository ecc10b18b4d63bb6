//! Divisor-class lattices of smooth projective surfaces.
//!
//! An [`IntersectionLattice`] is a named integer basis together with its
//! intersection form (the gram matrix), the canonical class, and an optional
//! declared effectivity rule. Every [`DivisorClass`] carries the id of the
//! lattice it lives in; arithmetic across lattices is rejected instead of
//! being silently coerced.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix};
use crate::serde_int;

/// Shorthand for building coefficient vectors from small literals.
pub fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeId(String);

impl LatticeId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LatticeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// How a lattice decides whether a class is effective.
///
/// These are model inputs, not computed cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EffectivityRule {
    /// Effective iff every coordinate is nonnegative.
    AllCoordsNonneg,
    /// Basis `(L, E_1, .., E_n)` of a plane blown up in general points.
    /// `dL + Σ c_i E_i` counts as effective when `d ≥ 0`, every imposed
    /// multiplicity `m_i = max(0, -c_i)` is at most `d`, and the expected
    /// dimension `(d+1)(d+2)/2 - Σ m_i(m_i+1)/2` is positive.
    StandardBlowupCone,
    /// Effective iff the class is a nonnegative integer combination of the
    /// generators. `grading` is a coordinate functional that must be
    /// strictly positive on every generator; it bounds the search.
    ExplicitGeneratorList {
        generators: Vec<Vec<BigInt>>,
        grading: Vec<BigInt>,
    },
}

impl EffectivityRule {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AllCoordsNonneg => "ALL_COORDS_NONNEG",
            Self::StandardBlowupCone => "STANDARD_BLOWUP_CONE",
            Self::ExplicitGeneratorList { .. } => "EXPLICIT_GENERATOR_LIST",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass {
    lattice: LatticeId,
    #[serde(with = "serde_int::vec")]
    coeffs: Vec<BigInt>,
}

impl DivisorClass {
    pub fn lattice(&self) -> &LatticeId {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn same_space(&self, other: &DivisorClass) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch {
                expected: self.lattice.to_string(),
                found: other.lattice.to_string(),
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &DivisorClass) -> Result<DivisorClass> {
        self.same_space(other)?;
        Ok(DivisorClass {
            lattice: self.lattice.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &DivisorClass) -> Result<DivisorClass> {
        self.checked_add(&other.negated())
    }

    pub fn negated(&self) -> DivisorClass {
        self.scaled(&-BigInt::one())
    }

    pub fn scaled(&self, k: &BigInt) -> DivisorClass {
        DivisorClass {
            lattice: self.lattice.clone(),
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionLattice {
    id: LatticeId,
    basis_labels: Vec<String>,
    gram: IntMatrix,
    canonical: Vec<BigInt>,
    effectivity: Option<EffectivityRule>,
}

impl IntersectionLattice {
    pub fn new(
        id: impl Into<String>,
        basis_labels: Vec<String>,
        gram: IntMatrix,
        canonical: Vec<BigInt>,
        effectivity: Option<EffectivityRule>,
    ) -> Result<Self> {
        let n = basis_labels.len();
        if gram.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: gram.len(),
            });
        }
        for row in &gram {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::AsymmetricGram(i, j));
                }
            }
        }
        if canonical.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: canonical.len(),
            });
        }
        let lattice = Self {
            id: LatticeId::new(id),
            basis_labels,
            gram,
            canonical,
            effectivity: None,
        };
        match effectivity {
            Some(rule) => lattice.with_effectivity(rule),
            None => Ok(lattice),
        }
    }

    /// The projective plane: basis `L`, `L² = 1`, `K = -3L`.
    pub fn projective_plane() -> Self {
        Self::new(
            "P2",
            vec!["L".into()],
            vec![ints(&[1])],
            ints(&[-3]),
            Some(EffectivityRule::StandardBlowupCone),
        )
        .expect("static lattice")
    }

    /// `P¹ × P¹` with the two ruling classes `f1 = (1,0)`, `f2 = (0,1)`.
    pub fn quadric() -> Self {
        Self::new(
            "F0",
            vec!["f1".into(), "f2".into()],
            vec![ints(&[0, 1]), ints(&[1, 0])],
            ints(&[-2, -2]),
            Some(EffectivityRule::AllCoordsNonneg),
        )
        .expect("static lattice")
    }

    /// The plane blown up in `n` points, basis `(L, E_1, .., E_n)`.
    pub fn blown_up_plane(n: usize) -> Self {
        let mut lattice = Self::projective_plane();
        for _ in 0..n {
            lattice = lattice.blow_up_point().0;
        }
        lattice.id = LatticeId::new(format!("Bl{n}P2"));
        lattice
    }

    pub fn with_effectivity(mut self, rule: EffectivityRule) -> Result<Self> {
        if let EffectivityRule::ExplicitGeneratorList { generators, grading } = &rule {
            if grading.len() != self.rank() {
                return Err(Error::Config(format!(
                    "grading has length {}, lattice rank is {}",
                    grading.len(),
                    self.rank()
                )));
            }
            for g in generators {
                if g.len() != self.rank() {
                    return Err(Error::Config(format!(
                        "generator of length {} in a rank {} lattice",
                        g.len(),
                        self.rank()
                    )));
                }
                if !matrix::dot(grading, g).is_positive() {
                    return Err(Error::Config(
                        "grading must be strictly positive on every generator".into(),
                    ));
                }
            }
        }
        self.effectivity = Some(rule);
        Ok(self)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = LatticeId::new(id);
        self
    }

    pub fn id(&self) -> &LatticeId {
        &self.id
    }

    pub fn rank(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn effectivity(&self) -> Option<&EffectivityRule> {
        self.effectivity.as_ref()
    }

    pub fn class(&self, coeffs: Vec<BigInt>) -> Result<DivisorClass> {
        if coeffs.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: coeffs.len(),
            });
        }
        Ok(DivisorClass {
            lattice: self.id.clone(),
            coeffs,
        })
    }

    pub fn class_i64(&self, coeffs: &[i64]) -> Result<DivisorClass> {
        self.class(ints(coeffs))
    }

    pub fn zero(&self) -> DivisorClass {
        DivisorClass {
            lattice: self.id.clone(),
            coeffs: vec![BigInt::zero(); self.rank()],
        }
    }

    pub fn basis_class(&self, i: usize) -> DivisorClass {
        let mut c = self.zero();
        c.coeffs[i] = BigInt::one();
        c
    }

    pub fn labelled(&self, label: &str) -> Option<DivisorClass> {
        self.basis_labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.basis_class(i))
    }

    pub fn canonical(&self) -> DivisorClass {
        DivisorClass {
            lattice: self.id.clone(),
            coeffs: self.canonical.clone(),
        }
    }

    pub fn contains(&self, d: &DivisorClass) -> Result<()> {
        if d.lattice != self.id {
            return Err(Error::LatticeMismatch {
                expected: self.id.to_string(),
                found: d.lattice.to_string(),
            });
        }
        if d.dim() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: d.dim(),
            });
        }
        Ok(())
    }

    /// `d1ᵀ · gram · d2`.
    pub fn pair(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<BigInt> {
        self.contains(d1)?;
        self.contains(d2)?;
        Ok(matrix::dot(&matrix::vec_mat(&d1.coeffs, &self.gram), &d2.coeffs))
    }

    pub fn self_intersection(&self, d: &DivisorClass) -> Result<BigInt> {
        self.pair(d, d)
    }

    /// Arithmetic genus by adjunction, `C·(C + K)/2 + 1`.
    pub fn genus(&self, c: &DivisorClass) -> Result<BigInt> {
        let ck = c.checked_add(&self.canonical())?;
        let twice = self.pair(c, &ck)?;
        if twice.is_odd() {
            return Err(Error::AdjunctionParity(twice.to_string()));
        }
        Ok(twice / 2 + 1)
    }

    pub fn is_effective(&self, d: &DivisorClass) -> Result<bool> {
        self.contains(d)?;
        let rule = self
            .effectivity
            .as_ref()
            .ok_or_else(|| Error::RuleNotDeclared(self.id.to_string()))?;
        match rule {
            EffectivityRule::AllCoordsNonneg => Ok(d.coeffs.iter().all(|c| !c.is_negative())),
            EffectivityRule::StandardBlowupCone => self.standard_blowup_effective(d),
            EffectivityRule::ExplicitGeneratorList { generators, grading } => {
                if generators.is_empty() {
                    return Err(Error::Config(format!(
                        "lattice `{}` declares an empty generator list",
                        self.id
                    )));
                }
                Ok(in_monoid(&d.coeffs, generators, grading))
            }
        }
    }

    fn standard_blowup_effective(&self, d: &DivisorClass) -> Result<bool> {
        let n = self.rank();
        let shape_ok = (0..n).all(|i| {
            (0..n).all(|j| {
                let want = match (i, j) {
                    (0, 0) => 1,
                    _ if i == j => -1,
                    _ => 0,
                };
                self.gram[i][j] == BigInt::from(want)
            })
        });
        if !shape_ok {
            return Err(Error::Config(format!(
                "STANDARD_BLOWUP_CONE needs a (L, E_1, .., E_n) basis; lattice `{}` has another gram",
                self.id
            )));
        }
        let degree = &d.coeffs[0];
        if degree.is_negative() {
            return Ok(false);
        }
        let mut imposed = BigInt::zero();
        for c in &d.coeffs[1..] {
            if c.is_negative() {
                let m = -c;
                if &m > degree {
                    return Ok(false);
                }
                imposed += &m * (&m + 1) / 2;
            }
        }
        let sections = (degree + 1) * (degree + 2) / 2;
        Ok(sections > imposed)
    }

    /// Blow up one general point: appends an exceptional class `E_k`.
    pub fn blow_up_point(&self) -> (IntersectionLattice, BlowupMap) {
        let label = format!("E{}", self.rank());
        let id = format!("Bl({})", self.id);
        self.blow_up_point_as(id, label)
    }

    pub fn blow_up_point_as(
        &self,
        id: impl Into<String>,
        label: impl Into<String>,
    ) -> (IntersectionLattice, BlowupMap) {
        let n = self.rank();
        let mut gram: IntMatrix = self
            .gram
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.push(BigInt::zero());
                r
            })
            .collect();
        let mut last = vec![BigInt::zero(); n + 1];
        last[n] = -BigInt::one();
        gram.push(last);

        let mut canonical = self.canonical.clone();
        canonical.push(BigInt::one());

        let mut labels = self.basis_labels.clone();
        labels.push(label.into());

        // Standard-cone rule survives a point blow-up; the others do not
        // describe the new surface.
        let effectivity = match self.effectivity {
            Some(EffectivityRule::StandardBlowupCone) => Some(EffectivityRule::StandardBlowupCone),
            _ => None,
        };
        let target = IntersectionLattice {
            id: LatticeId::new(id),
            basis_labels: labels,
            gram,
            canonical,
            effectivity,
        };
        let pullback = (0..n)
            .map(|i| {
                let mut row = self.basis_class(i).coeffs;
                row.push(BigInt::zero());
                row
            })
            .collect();
        let map = BlowupMap {
            source: self.id.clone(),
            target: target.id.clone(),
            pullback,
            exceptional: vec![target.basis_class(n)],
        };
        (target, map)
    }

    /// Re-express the lattice in a new basis. Row `i` of `matrix` holds the
    /// old coordinates of the `i`-th new basis vector; it must be unimodular.
    /// When `expected_gram` is given the transformed gram must equal it.
    pub fn change_basis(
        &self,
        id: impl Into<String>,
        labels: Vec<String>,
        matrix: IntMatrix,
        expected_gram: Option<&IntMatrix>,
    ) -> Result<(IntersectionLattice, BasisChange)> {
        let n = self.rank();
        if labels.len() != n || !matrix::is_square(&matrix, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len().max(matrix.len()),
            });
        }
        let inverse = matrix::unimodular_inverse(&matrix)?;
        let gram = matrix::mat_mul(&matrix::mat_mul(&matrix, &self.gram), &matrix::transpose(&matrix));
        if let Some(expected) = expected_gram {
            if expected != &gram {
                return Err(Error::GramMismatch);
            }
        }
        // old coords = new coords · matrix, so new coords = old coords · matrix⁻¹
        let canonical = matrix::vec_mat(&self.canonical, &inverse);
        let target = IntersectionLattice {
            id: LatticeId::new(id),
            basis_labels: labels,
            gram,
            canonical,
            effectivity: None,
        };
        let change = BasisChange {
            source: self.id.clone(),
            target: target.id.clone(),
            to_new: inverse,
            to_old: matrix,
        };
        Ok((target, change))
    }
}

/// Nonnegative integer combination test with memoised failures.
fn in_monoid(target: &[BigInt], generators: &[Vec<BigInt>], grading: &[BigInt]) -> bool {
    fn go(
        rem: Vec<BigInt>,
        start: usize,
        gens: &[Vec<BigInt>],
        grades: &[BigInt],
        grading: &[BigInt],
        failed: &mut HashSet<(Vec<BigInt>, usize)>,
    ) -> bool {
        if rem.iter().all(Zero::is_zero) {
            return true;
        }
        let grade = matrix::dot(grading, &rem);
        if !grade.is_positive() || failed.contains(&(rem.clone(), start)) {
            return false;
        }
        for j in start..gens.len() {
            if grades[j] > grade {
                continue;
            }
            let next: Vec<BigInt> = rem.iter().zip(&gens[j]).map(|(a, b)| a - b).collect();
            if go(next, j, gens, grades, grading, failed) {
                return true;
            }
        }
        failed.insert((rem, start));
        false
    }
    let grades: Vec<BigInt> = generators.iter().map(|g| matrix::dot(grading, g)).collect();
    go(target.to_vec(), 0, generators, &grades, grading, &mut HashSet::new())
}

/// A birational morphism of surfaces seen on Picard lattices: the pullback
/// matrix (row `i` is the image of the `i`-th source basis vector) plus the
/// exceptional classes it contracts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupMap {
    pub source: LatticeId,
    pub target: LatticeId,
    #[serde(with = "serde_int::matrix")]
    pub pullback: IntMatrix,
    pub exceptional: Vec<DivisorClass>,
}

impl BlowupMap {
    pub fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass> {
        if d.lattice != self.source {
            return Err(Error::LatticeMismatch {
                expected: self.source.to_string(),
                found: d.lattice.to_string(),
            });
        }
        if d.dim() != self.pullback.len() {
            return Err(Error::DimensionMismatch {
                expected: self.pullback.len(),
                found: d.dim(),
            });
        }
        Ok(DivisorClass {
            lattice: self.target.clone(),
            coeffs: matrix::vec_mat(&d.coeffs, &self.pullback),
        })
    }

    /// `self` followed by `next`: pulls back through both.
    pub fn compose(&self, next: &BlowupMap) -> Result<BlowupMap> {
        if self.target != next.source {
            return Err(Error::LatticeMismatch {
                expected: next.source.to_string(),
                found: self.target.to_string(),
            });
        }
        let mut exceptional = self
            .exceptional
            .iter()
            .map(|e| next.pullback(e))
            .collect::<Result<Vec<_>>>()?;
        exceptional.extend(next.exceptional.iter().cloned());
        Ok(BlowupMap {
            source: self.source.clone(),
            target: next.target.clone(),
            pullback: matrix::mat_mul(&self.pullback, &next.pullback),
            exceptional,
        })
    }

    /// Re-expresses the target side in the basis given by `change`.
    pub fn then_change(&self, change: &BasisChange) -> Result<BlowupMap> {
        let pullback = self
            .pullback
            .iter()
            .map(|row| {
                let d = DivisorClass {
                    lattice: self.target.clone(),
                    coeffs: row.clone(),
                };
                change.forward(&d).map(|c| c.coeffs)
            })
            .collect::<Result<_>>()?;
        let exceptional = self
            .exceptional
            .iter()
            .map(|e| change.forward(e))
            .collect::<Result<_>>()?;
        Ok(BlowupMap {
            source: self.source.clone(),
            target: change.target.clone(),
            pullback,
            exceptional,
        })
    }

    /// Checks the blow-up rules on basis vectors: the pullback is an
    /// isometry, exceptional classes are disjoint `(-1)`-classes orthogonal
    /// to every pullback, and `K' = p*K + Σ E`.
    pub fn verify(&self, source: &IntersectionLattice, target: &IntersectionLattice) -> Result<()> {
        if source.id != self.source || target.id != self.target {
            return Err(Error::LatticeMismatch {
                expected: format!("{} -> {}", self.source, self.target),
                found: format!("{} -> {}", source.id, target.id),
            });
        }
        let images: Vec<DivisorClass> = (0..source.rank())
            .map(|i| self.pullback(&source.basis_class(i)))
            .collect::<Result<_>>()?;
        for i in 0..source.rank() {
            for j in 0..source.rank() {
                if target.pair(&images[i], &images[j])? != source.gram[i][j] {
                    return Err(Error::Contradiction(format!(
                        "pullback is not an isometry on basis pair ({i}, {j})"
                    )));
                }
            }
            for e in &self.exceptional {
                if !target.pair(&images[i], e)?.is_zero() {
                    return Err(Error::Contradiction(
                        "exceptional class meets a pulled-back class".into(),
                    ));
                }
            }
        }
        for (a, e) in self.exceptional.iter().enumerate() {
            for (b, f) in self.exceptional.iter().enumerate() {
                let want = if a == b { -BigInt::one() } else { BigInt::zero() };
                if target.pair(e, f)? != want {
                    return Err(Error::Contradiction(
                        "exceptional classes must be disjoint (-1)-classes".into(),
                    ));
                }
            }
        }
        let mut k = self.pullback(&source.canonical())?;
        for e in &self.exceptional {
            k = k.checked_add(e)?;
        }
        if k != target.canonical() {
            return Err(Error::Contradiction(format!(
                "canonical class {} differs from p*K + ΣE = {}",
                target.canonical(),
                k
            )));
        }
        Ok(())
    }
}

/// An explicit integral change of basis between two presentations of the
/// same lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    pub source: LatticeId,
    pub target: LatticeId,
    to_new: IntMatrix,
    to_old: IntMatrix,
}

impl BasisChange {
    pub fn forward(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.apply(d, &self.source, &self.target, &self.to_new)
    }

    pub fn backward(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.apply(d, &self.target, &self.source, &self.to_old)
    }

    fn apply(
        &self,
        d: &DivisorClass,
        from: &LatticeId,
        to: &LatticeId,
        m: &IntMatrix,
    ) -> Result<DivisorClass> {
        if &d.lattice != from {
            return Err(Error::LatticeMismatch {
                expected: from.to_string(),
                found: d.lattice.to_string(),
            });
        }
        Ok(DivisorClass {
            lattice: to.clone(),
            coeffs: matrix::vec_mat(&d.coeffs, m),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    id: String,
    basis: Vec<String>,
    #[serde(with = "serde_int::matrix")]
    gram: IntMatrix,
    #[serde(with = "serde_int::vec")]
    canonical: Vec<BigInt>,
    effectivity: String,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_matrix")]
    generators: Option<IntMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_vec")]
    grading: Option<Vec<BigInt>>,
}

mod opt_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<IntMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(m) => serde_int::matrix::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<IntMatrix>, D::Error> {
        serde_int::matrix::deserialize(d).map(Some)
    }
}

mod opt_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(m) => serde_int::vec::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<BigInt>>, D::Error> {
        serde_int::vec::deserialize(d).map(Some)
    }
}

impl Serialize for IntersectionLattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (effectivity, generators, grading) = match &self.effectivity {
            None => ("UNDECLARED".to_string(), None, None),
            Some(EffectivityRule::ExplicitGeneratorList { generators, grading }) => (
                "EXPLICIT_GENERATOR_LIST".to_string(),
                Some(generators.clone()),
                Some(grading.clone()),
            ),
            Some(rule) => (rule.name().to_string(), None, None),
        };
        LatticeJson {
            id: self.id.to_string(),
            basis: self.basis_labels.clone(),
            gram: self.gram.clone(),
            canonical: self.canonical.clone(),
            effectivity,
            generators,
            grading,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntersectionLattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = LatticeJson::deserialize(d)?;
        let rule = match raw.effectivity.as_str() {
            "UNDECLARED" => None,
            "ALL_COORDS_NONNEG" => Some(EffectivityRule::AllCoordsNonneg),
            "STANDARD_BLOWUP_CONE" => Some(EffectivityRule::StandardBlowupCone),
            "EXPLICIT_GENERATOR_LIST" => Some(EffectivityRule::ExplicitGeneratorList {
                generators: raw.generators.unwrap_or_default(),
                grading: raw
                    .grading
                    .ok_or_else(|| D::Error::custom("EXPLICIT_GENERATOR_LIST needs `grading`"))?,
            }),
            other => return Err(D::Error::custom(format!("unknown effectivity rule `{other}`"))),
        };
        IntersectionLattice::new(raw.id, raw.basis, raw.gram, raw.canonical, rule)
            .map_err(D::Error::custom)
    }
}
