//! Class-level arithmetic of a general projection `π: W → S ⊂ P³`.
//!
//! A general plane section of `S` is a plane curve of degree `d = H²` whose
//! geometric genus is the sectional genus of `W`; its nodes are the points
//! of the double curve `Γ`. The preimage `Γ_W` of `Γ` is reconstructed from
//! its intersection numbers with curves whose images are plane curves.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::DivisorClass;
use crate::matrix;
use crate::serde_int;
use crate::surfaces::PolarizedSurface;

/// `(d-1)(d-2)/2 - g`.
pub fn double_curve_degree(degree: &BigInt, genus: &BigInt) -> Result<BigInt> {
    if degree < &BigInt::from(3) {
        return Err(Error::Model(format!(
            "a surface of degree {degree} in P³ has no double curve"
        )));
    }
    if genus.is_negative() {
        return Err(Error::Model(format!("negative sectional genus {genus}")));
    }
    let nodes: BigInt = (degree - 1) * (degree - 2) / 2 - genus;
    if nodes.is_negative() {
        return Err(Error::Model(format!(
            "degree {degree} and genus {genus} give {nodes} nodes"
        )));
    }
    Ok(nodes)
}

/// Number of points of `Γ` on `π(C)` for a curve whose image spans at most
/// a plane (`δ = C·H ∈ {1, 2}`).
///
/// A plane through `π(C)` cuts `S` in `π(C)` plus a residual plane curve of
/// degree `d - δ`; they meet in `δ(d - δ)` points, of which `C·(H - C)` come
/// from honest intersections on `W`. The rest lie on `Γ`:
/// `δ(d - δ - 1) + C²`.
pub fn plane_image_incidence(surface: &PolarizedSurface, c: &DivisorClass) -> Result<BigInt> {
    let delta = surface.curve_degree(c)?;
    if delta < BigInt::one() || delta > BigInt::from(2) {
        return Err(Error::NotPlanar(delta.to_string()));
    }
    let d = surface.degree();
    let c2 = surface.lattice().self_intersection(c)?;
    Ok(&delta * (&d - &delta - 1) + c2)
}

/// The unique class `X` with `X·C_k = v_k` for every incidence and
/// `X·H = 2·deg Γ`.
pub fn double_point_class(
    surface: &PolarizedSurface,
    deg_gamma: &BigInt,
    incidences: &[(DivisorClass, BigInt)],
) -> Result<DivisorClass> {
    let lattice = surface.lattice();
    let mut rows = Vec::with_capacity(incidences.len() + 1);
    let mut rhs = Vec::with_capacity(incidences.len() + 1);
    for (c, v) in incidences {
        lattice.contains(c)?;
        rows.push(matrix::mat_vec(lattice.gram(), c.coeffs()));
        rhs.push(v.clone());
    }
    rows.push(matrix::mat_vec(lattice.gram(), surface.polarization().coeffs()));
    rhs.push(deg_gamma * 2);

    let solution = matrix::solve_unique(&rows, &rhs)?;
    if let Some(bad) = solution.iter().find(|x| !x.is_integer()) {
        return Err(Error::Contradiction(format!(
            "double-point class has non-integral coefficient {bad}"
        )));
    }
    lattice.class(solution.iter().map(|x| x.to_integer()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ProjectionJson", into = "ProjectionJson")]
pub struct ProjectionModel {
    source: PolarizedSurface,
    deg_s: BigInt,
    sect_genus: BigInt,
    deg_gamma: BigInt,
    gamma_w: DivisorClass,
    triple_points: Option<BigInt>,
    cusps: Option<BigInt>,
}

impl ProjectionModel {
    /// Builds the model from curves with planar images. `deg_gamma`
    /// overrides the genus formula when given (for perturbation runs).
    pub fn new(
        source: PolarizedSurface,
        planar_curves: &[DivisorClass],
        deg_gamma: Option<BigInt>,
        triple_points: Option<BigInt>,
        cusps: Option<BigInt>,
    ) -> Result<Self> {
        let deg_s = source.degree();
        let sect_genus = source.sectional_genus();
        let deg_gamma = match deg_gamma {
            Some(v) => v,
            None => double_curve_degree(&deg_s, &sect_genus)?,
        };
        let incidences = planar_curves
            .iter()
            .map(|c| Ok((c.clone(), plane_image_incidence(&source, c)?)))
            .collect::<Result<Vec<_>>>()?;
        let gamma_w = double_point_class(&source, &deg_gamma, &incidences)?;
        Ok(Self {
            source,
            deg_s,
            sect_genus,
            deg_gamma,
            gamma_w,
            triple_points,
            cusps,
        })
    }

    pub fn source(&self) -> &PolarizedSurface {
        &self.source
    }

    pub fn deg_s(&self) -> &BigInt {
        &self.deg_s
    }

    pub fn sect_genus(&self) -> &BigInt {
        &self.sect_genus
    }

    pub fn deg_gamma(&self) -> &BigInt {
        &self.deg_gamma
    }

    pub fn gamma_w(&self) -> &DivisorClass {
        &self.gamma_w
    }

    pub fn triple_points(&self) -> Option<&BigInt> {
        self.triple_points.as_ref()
    }

    pub fn cusps(&self) -> Option<&BigInt> {
        self.cusps.as_ref()
    }

    pub fn incidence(&self, c: &DivisorClass) -> Result<BigInt> {
        plane_image_incidence(&self.source, c)
    }

    /// `Γ_W · C`; defined for every curve class, planar image or not.
    pub fn gamma_dot(&self, c: &DivisorClass) -> Result<BigInt> {
        self.source.lattice().pair(&self.gamma_w, c)
    }

    /// Every model invariant that fails, as a message. Empty when the model
    /// is a consistent general projection.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.deg_s != self.source.degree() {
            out.push(format!("deg S = {} but H² = {}", self.deg_s, self.source.degree()));
        }
        match double_curve_degree(&self.deg_s, &self.sect_genus) {
            Ok(v) if v != self.deg_gamma => {
                out.push(format!("deg Γ = {} but the genus formula gives {v}", self.deg_gamma))
            }
            Err(e) => out.push(e.to_string()),
            _ => {}
        }
        match self.gamma_dot(self.source.polarization()) {
            Ok(v) if v != &self.deg_gamma * 2 => {
                out.push(format!("Γ_W·H = {v} but 2·deg Γ = {}", &self.deg_gamma * 2))
            }
            Err(e) => out.push(e.to_string()),
            _ => {}
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ProjectionJson {
    source: PolarizedSurface,
    #[serde(with = "serde_int::scalar")]
    deg_s: BigInt,
    #[serde(with = "serde_int::scalar")]
    sect_genus: BigInt,
    #[serde(with = "serde_int::scalar")]
    deg_gamma: BigInt,
    #[serde(with = "serde_int::vec")]
    gamma_w: Vec<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_int::option")]
    triple_points: Option<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_int::option")]
    cusps: Option<BigInt>,
}

impl From<ProjectionModel> for ProjectionJson {
    fn from(p: ProjectionModel) -> Self {
        ProjectionJson {
            gamma_w: p.gamma_w.coeffs().to_vec(),
            source: p.source,
            deg_s: p.deg_s,
            sect_genus: p.sect_genus,
            deg_gamma: p.deg_gamma,
            triple_points: p.triple_points,
            cusps: p.cusps,
        }
    }
}

impl TryFrom<ProjectionJson> for ProjectionModel {
    type Error = Error;
    fn try_from(raw: ProjectionJson) -> Result<Self> {
        let gamma_w = raw.source.lattice().class(raw.gamma_w)?;
        let model = ProjectionModel {
            source: raw.source,
            deg_s: raw.deg_s,
            sect_genus: raw.sect_genus,
            deg_gamma: raw.deg_gamma,
            gamma_w,
            triple_points: raw.triple_points,
            cusps: raw.cusps,
        };
        let problems = model.invariant_violations();
        if !problems.is_empty() {
            return Err(Error::Model(problems.join("; ")));
        }
        Ok(model)
    }
}
