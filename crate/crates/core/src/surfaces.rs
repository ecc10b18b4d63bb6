//! Named polarized surfaces and the two-presentation lattice of the common
//! resolution surface `S_Z`.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ints, BlowupMap, DivisorClass, EffectivityRule, IntersectionLattice};
use crate::matrix::{self, IntMatrix};

/// A smooth surface with the hyperplane class of an embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceJson", into = "SurfaceJson")]
pub struct PolarizedSurface {
    name: String,
    lattice: IntersectionLattice,
    polarization: DivisorClass,
}

#[derive(Serialize, Deserialize)]
struct SurfaceJson {
    name: String,
    #[serde(flatten)]
    lattice: IntersectionLattice,
    #[serde(with = "crate::serde_int::vec")]
    polarization: Vec<BigInt>,
}

impl TryFrom<SurfaceJson> for PolarizedSurface {
    type Error = Error;
    fn try_from(raw: SurfaceJson) -> Result<Self> {
        let polarization = raw.lattice.class(raw.polarization)?;
        PolarizedSurface::new(raw.name, raw.lattice, polarization)
    }
}

impl From<PolarizedSurface> for SurfaceJson {
    fn from(s: PolarizedSurface) -> Self {
        SurfaceJson {
            name: s.name,
            polarization: s.polarization.coeffs().to_vec(),
            lattice: s.lattice,
        }
    }
}

impl PolarizedSurface {
    pub fn new(
        name: impl Into<String>,
        lattice: IntersectionLattice,
        polarization: DivisorClass,
    ) -> Result<Self> {
        lattice.contains(&polarization)?;
        let degree = lattice.self_intersection(&polarization)?;
        if !degree.is_positive() {
            return Err(Error::Model(format!("polarization has H² = {degree} ≤ 0")));
        }
        let genus = lattice.genus(&polarization)?;
        if genus.is_negative() {
            return Err(Error::Model(format!("sectional genus {genus} < 0")));
        }
        Ok(Self {
            name: name.into(),
            lattice,
            polarization,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lattice(&self) -> &IntersectionLattice {
        &self.lattice
    }

    pub fn polarization(&self) -> &DivisorClass {
        &self.polarization
    }

    /// `H²`.
    pub fn degree(&self) -> BigInt {
        self.lattice
            .self_intersection(&self.polarization)
            .expect("validated on construction")
    }

    pub fn sectional_genus(&self) -> BigInt {
        self.lattice
            .genus(&self.polarization)
            .expect("validated on construction")
    }

    pub fn class(&self, coeffs: &[i64]) -> Result<DivisorClass> {
        self.lattice.class_i64(coeffs)
    }

    /// `C·H`, the degree of a curve class in the embedding.
    pub fn curve_degree(&self, c: &DivisorClass) -> Result<BigInt> {
        self.lattice.pair(c, &self.polarization)
    }
}

/// `P¹ × P¹` embedded by `O(1,3)`: a rational normal sextic scroll in `P⁷`.
pub fn make_f0_sextic() -> PolarizedSurface {
    let lattice = IntersectionLattice::quadric();
    let h = lattice.class_i64(&[1, 3]).expect("rank 2");
    PolarizedSurface::new("F0 embedded by O(1,3)", lattice, h).expect("static model")
}

/// The plane blown up in ten general points, embedded in `P⁴` by quartics
/// through them.
///
/// The effectivity rule only lists the curves used to decompose classes on
/// this surface: the exceptional lines `m_i = E_i` and the conics
/// `c = L - E_i - E_j`. It is a sub-cone of the effective cone.
pub fn make_bordiga() -> PolarizedSurface {
    let base = IntersectionLattice::blown_up_plane(10);
    let mut h = vec![-1i64; 11];
    h[0] = 4;
    let h = base.class_i64(&h).expect("rank 11");
    let grading = matrix::vec_mat(h.coeffs(), base.gram());
    let lattice = base
        .with_effectivity(EffectivityRule::ExplicitGeneratorList {
            generators: bordiga_generators(),
            grading,
        })
        .expect("quartic hyperplane class is positive on lines and conics");
    PolarizedSurface::new("Bordiga surface in P4", lattice, h).expect("static model")
}

fn bordiga_generators() -> IntMatrix {
    let mut gens = Vec::new();
    for i in 1..=10 {
        let mut m = vec![0i64; 11];
        m[i] = 1;
        gens.push(ints(&m));
    }
    for i in 1..=10 {
        for j in i + 1..=10 {
            let mut c = vec![0i64; 11];
            c[0] = 1;
            c[i] = -1;
            c[j] = -1;
            gens.push(ints(&c));
        }
    }
    gens
}

/// The sextic del Pezzo surface: the plane blown up in three points,
/// anticanonically embedded in `P⁶`.
pub fn make_dp6() -> PolarizedSurface {
    let lattice = IntersectionLattice::blown_up_plane(3);
    let h = lattice.canonical().negated();
    PolarizedSurface::new("del Pezzo surface of degree 6", lattice, h).expect("static model")
}

/// The plane blown up in `multiplicities.len()` general points, polarized by
/// `degree·L - Σ m_i E_i`.
pub fn make_blown_up_plane(
    name: impl Into<String>,
    degree: i64,
    multiplicities: &[i64],
) -> Result<PolarizedSurface> {
    let lattice = IntersectionLattice::blown_up_plane(multiplicities.len());
    let mut coeffs = vec![degree];
    coeffs.extend(multiplicities.iter().map(|m| -m));
    let h = lattice.class_i64(&coeffs)?;
    PolarizedSurface::new(name, lattice, h)
}

/// The exceptional classes `E_i` and the lines `L - E_i - E_j` of a plane
/// blown up in `n` points, in basis `(L, E_1, .., E_n)`.
pub fn exceptional_lines(lattice: &IntersectionLattice) -> Vec<DivisorClass> {
    let n = lattice.rank() - 1;
    let mut out: Vec<DivisorClass> = (1..=n).map(|i| lattice.basis_class(i)).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            let mut c = vec![0i64; n + 1];
            c[0] = 1;
            c[i] = -1;
            c[j] = -1;
            out.push(lattice.class_i64(&c).expect("rank n+1"));
        }
    }
    out
}

/// `C² = -1` and `K·C = -1`.
pub fn is_minus_one_class(lattice: &IntersectionLattice, c: &DivisorClass) -> Result<bool> {
    let minus_one = -BigInt::one();
    Ok(lattice.self_intersection(c)? == minus_one && lattice.pair(c, &lattice.canonical())? == minus_one)
}

/// The surface `S_Z`, presented in basis `(F1, F2, M)`, together with the
/// pullbacks from the quadric (blown up once) and from the plane (blown up
/// twice).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SZModel {
    lattice: IntersectionLattice,
    f0_map: BlowupMap,
    plane_map: BlowupMap,
}

pub fn sz_gram() -> IntMatrix {
    vec![ints(&[-1, 0, 1]), ints(&[0, -1, 1]), ints(&[1, 1, -1])]
}

pub fn make_sz() -> SZModel {
    SZModel::build().expect("both presentations of S_Z agree")
}

impl SZModel {
    fn build() -> Result<Self> {
        let labels = || vec!["F1".to_string(), "F2".to_string(), "M".to_string()];
        let gram = sz_gram();

        // Plane blown up in q1, q2: F_i = E_i, M = L - E1 - E2.
        let p2 = IntersectionLattice::projective_plane();
        let (bl1, first) = p2.blow_up_point();
        let (bl2, second) = bl1.blow_up_point();
        let to_sz = vec![ints(&[0, 1, 0]), ints(&[0, 0, 1]), ints(&[1, -1, -1])];
        let (from_plane_side, plane_change) = bl2.change_basis("SZ", labels(), to_sz, Some(&gram))?;
        let plane_map = first.compose(&second)?.then_change(&plane_change)?;
        plane_map.verify(&p2, &from_plane_side)?;

        // Quadric blown up in p1: F_i = f_i - E, M = E.
        let f0 = IntersectionLattice::quadric();
        let (blp, at_p1) = f0.blow_up_point_as("Bl(F0)", "E");
        let to_sz = vec![ints(&[1, 0, -1]), ints(&[0, 1, -1]), ints(&[0, 0, 1])];
        let (from_f0_side, f0_change) = blp.change_basis("SZ", labels(), to_sz, Some(&gram))?;
        let f0_map = at_p1.then_change(&f0_change)?;
        f0_map.verify(&f0, &from_f0_side)?;

        if from_plane_side.canonical() != from_f0_side.canonical() {
            return Err(Error::Contradiction(
                "the two presentations of S_Z disagree on K".into(),
            ));
        }
        let lattice = from_plane_side.with_effectivity(EffectivityRule::AllCoordsNonneg)?;
        Ok(Self {
            lattice,
            f0_map,
            plane_map,
        })
    }

    pub fn lattice(&self) -> &IntersectionLattice {
        &self.lattice
    }

    pub fn f0_map(&self) -> &BlowupMap {
        &self.f0_map
    }

    pub fn plane_map(&self) -> &BlowupMap {
        &self.plane_map
    }

    /// `(α, β) ↦ (α, β, α + β)`.
    pub fn from_f0(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.f0_map.pullback(d)
    }

    /// A plane class of degree `d` maps to `(d, d, d)`.
    pub fn from_plane(&self, degree: &BigInt) -> Result<DivisorClass> {
        let p2 = IntersectionLattice::projective_plane();
        self.plane_map.pullback(&p2.class(vec![degree.clone()])?)
    }

    fn abc<'a>(&self, d: &'a DivisorClass) -> Result<(&'a BigInt, &'a BigInt, &'a BigInt)> {
        self.lattice.contains(d)?;
        let c = d.coeffs();
        Ok((&c[0], &c[1], &c[2]))
    }

    /// Pulled back from the strict transform of `S` in the blow-up of the
    /// double curve: `a + b = c`.
    pub fn is_st_pullback(&self, d: &DivisorClass) -> Result<bool> {
        let (a, b, c) = self.abc(d)?;
        Ok(&(a + b) == c)
    }

    /// Pulled back from the plane: `a = b = c`.
    pub fn is_plane_pullback(&self, d: &DivisorClass) -> Result<bool> {
        let (a, b, c) = self.abc(d)?;
        Ok(a == b && b == c)
    }
}
