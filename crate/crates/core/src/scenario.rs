//! Scenario files, the end-to-end pipeline and report rendering.
//!
//! A scenario is either a projection pipeline (surface → double curve →
//! blown-up threefold → degree test → optional feasibility system) or a
//! family check comparing two members. Every expected constant carries a
//! free-text source so a report can be audited on its own.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::family::{dominance_count, expected_linear_system_dim, monoid_ce_predicate};
use crate::lattice::DivisorClass;
use crate::log_kodaira::negativity_certificate;
use crate::obstruction::{build_obstruction_system, default_bound, solve_nonneg, FeasibilityStatus};
use crate::projection::{plane_image_incidence, ProjectionModel};
use crate::serde_int::{self, IntRef};
use crate::surfaces::{make_sz, PolarizedSurface};
use crate::threefold::{BlowupThreefold, RayKind, ThreefoldDivisor};

pub const NOT_CE: &str = "NOT_CREMONA_EQUIVALENT_TO_PLANE";
pub const CE_GOOD_MODEL: &str = "CE_TO_PLANE_VIA_GOOD_MODEL";
pub const CE_FIBRATION: &str = "CE_TO_PLANE_VIA_FIBRATION";
pub const CE_MONOID: &str = "CE_TO_PLANE_VIA_MONOID";
pub const CE_NOT_OPEN: &str = "CE_TO_PLANE_NOT_OPEN";
pub const CE_NOT_CLOSED: &str = "CE_TO_PLANE_NOT_CLOSED";
pub const UNDETERMINED: &str = "UNDETERMINED";

const NON_EXISTENCE_NOTE: &str = "Non-existence of a Cremona map to a plane is established by the \
infeasibility certificate above, not by searching over Cremona transformations.";

const BUILTINS: [(&str, &str); 5] = [
    ("sextic-ruled", include_str!("../scenarios/sextic-ruled.json")),
    ("bordiga", include_str!("../scenarios/bordiga.json")),
    ("dp6", include_str!("../scenarios/dp6.json")),
    ("family-open", include_str!("../scenarios/family-open.json")),
    ("family-closed", include_str!("../scenarios/family-closed.json")),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub value: Value,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedCurve {
    pub name: String,
    #[serde(with = "serde_int::vec")]
    pub class: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedDivisor {
    pub name: String,
    #[serde(with = "serde_int::scalar")]
    pub h: BigInt,
    #[serde(with = "serde_int::scalar")]
    pub e: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstructionSpec {
    /// Multiplicity of the surface along its double curve.
    #[serde(with = "serde_int::scalar")]
    pub multiplicity: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSpec {
    pub surface: PolarizedSurface,
    pub curves: Vec<NamedCurve>,
    /// Curves whose images are plane curves, used to pin down `Γ_W`.
    #[serde(default)]
    pub planar_curves: Vec<String>,
    /// Overrides the genus formula for `deg Γ`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_int::option")]
    pub deg_gamma: Option<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_int::option")]
    pub triple_points: Option<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_int::option")]
    pub cusps: Option<BigInt>,
    #[serde(default)]
    pub curve_generators: Vec<String>,
    pub second_ray: String,
    #[serde(default)]
    pub fano_rays: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub declared_divisors: Vec<NamedDivisor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<ObstructionSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyDirection {
    /// Special member Cremona equivalent to a plane, general members not.
    Open,
    /// General members Cremona equivalent to a plane, special member not.
    Closed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Member {
    /// A built-in projection scenario.
    Scenario(String),
    Monoid {
        #[serde(with = "serde_int::scalar")]
        degree: BigInt,
        #[serde(with = "serde_int::scalar")]
        multiplicity: BigInt,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionCountSpec {
    #[serde(with = "serde_int::vec")]
    pub param_space_dims: Vec<BigInt>,
    #[serde(with = "serde_int::scalar")]
    pub k: BigInt,
    #[serde(with = "serde_int::scalar")]
    pub n: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSystemSpec {
    pub name: String,
    #[serde(with = "serde_int::scalar")]
    pub degree: BigInt,
    #[serde(with = "serde_int::vec")]
    pub multiplicities: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub direction: FamilyDirection,
    pub generic_member: Member,
    pub special_member: Member,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension_count: Option<DimensionCountSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub linear_systems: Vec<LinearSystemSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub expected: BTreeMap<String, Expected>,
    /// Facts recorded with a source but not computed.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        message: message.into(),
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path.is_empty() || path == "." { "<document>".to_string() } else { path };
            parse_err(field, e.into_inner().to_string())
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(parse_err("name", "must not be empty"));
        }
        match (&self.projection, &self.family) {
            (Some(p), None) => validate_projection(p),
            (None, Some(f)) => validate_family(f),
            (Some(_), Some(_)) => Err(parse_err("family", "give either `projection` or `family`, not both")),
            (None, None) => Err(parse_err("projection", "one of `projection` or `family` is required")),
        }
    }
}

fn validate_projection(p: &ProjectionSpec) -> Result<()> {
    let lattice = p.surface.lattice();
    let mut names = std::collections::BTreeSet::new();
    for (i, c) in p.curves.iter().enumerate() {
        if !names.insert(c.name.as_str()) {
            return Err(parse_err(format!("projection.curves[{i}].name"), format!("duplicate curve `{}`", c.name)));
        }
        if c.class.len() != lattice.rank() {
            return Err(parse_err(
                format!("projection.curves[{i}].class"),
                format!("expected {} coefficients, found {}", lattice.rank(), c.class.len()),
            ));
        }
    }
    let check = |field: String, name: &str| {
        if names.contains(name) {
            Ok(())
        } else {
            Err(parse_err(field, format!("unknown curve `{name}`")))
        }
    };
    for (i, n) in p.planar_curves.iter().enumerate() {
        check(format!("projection.planar_curves[{i}]"), n)?;
    }
    for (i, n) in p.curve_generators.iter().enumerate() {
        check(format!("projection.curve_generators[{i}]"), n)?;
    }
    for (i, n) in p.fano_rays.iter().enumerate() {
        check(format!("projection.fano_rays[{i}]"), n)?;
    }
    check("projection.second_ray".into(), &p.second_ray)?;
    if let Some(o) = &p.obstruction {
        if !o.multiplicity.is_positive() {
            return Err(parse_err("projection.obstruction.multiplicity", "must be positive"));
        }
    }
    Ok(())
}

fn validate_family(f: &FamilySpec) -> Result<()> {
    for (field, m) in [("family.generic_member", &f.generic_member), ("family.special_member", &f.special_member)] {
        if let Member::Scenario(name) = m {
            if !BUILTINS.iter().any(|(n, _)| n == name) {
                return Err(parse_err(field, format!("`{name}` is not a built-in scenario")));
            }
        }
    }
    Ok(())
}

/// Names of the built-in scenarios.
pub fn list_scenarios() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin(name: &str) -> Result<Scenario> {
    let text = builtin_source(name).ok_or_else(|| Error::UnknownScenario(name.into()))?;
    Scenario::from_json(text)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    Scenario::from_json(&std::fs::read_to_string(path)?)
}

/// A built-in name, or else a path to a scenario file.
pub fn resolve(name_or_path: &str) -> Result<Scenario> {
    if builtin_source(name_or_path).is_some() {
        return builtin(name_or_path);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        load_scenario(path)
    } else {
        Err(Error::UnknownScenario(name_or_path.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeyVerdict {
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub description: String,
    pub computed: BTreeMap<String, Value>,
    pub errors: BTreeMap<String, String>,
    pub expected: BTreeMap<String, Expected>,
    pub verdicts: BTreeMap<String, KeyVerdict>,
    pub overall: CheckStatus,
    pub assumptions: Vec<String>,
    pub metadata: BTreeMap<String, String>,
    pub narrative: Vec<String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.overall == CheckStatus::Pass
    }

    pub fn verdict(&self) -> Option<&str> {
        self.computed.get("verdict").and_then(Value::as_str)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let status = |s: CheckStatus| match s {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
        };
        let cell = |s: &str| s.replace('|', "\\|").replace('\n', " ");
        let mut md = String::new();
        writeln!(md, "# Scenario `{}`: {}\n", self.scenario, status(self.overall)).unwrap();
        if !self.description.is_empty() {
            writeln!(md, "{}\n", self.description).unwrap();
        }
        writeln!(md, "## Transcript\n").unwrap();
        for (i, line) in self.narrative.iter().enumerate() {
            if let Some((head, body)) = line.split_once('\n') {
                writeln!(md, "{}. {head}\n\n```text\n{}\n```\n", i + 1, body.trim_end()).unwrap();
            } else {
                writeln!(md, "{}. {line}", i + 1).unwrap();
            }
        }
        writeln!(md, "\n## Checks\n").unwrap();
        writeln!(md, "| key | expected | computed | status | source |").unwrap();
        writeln!(md, "|---|---|---|---|---|").unwrap();
        for (key, exp) in &self.expected {
            let computed = match (self.computed.get(key), self.errors.get(key)) {
                (Some(v), _) => v.to_string(),
                (None, Some(e)) => format!("error: {e}"),
                (None, None) => "missing".into(),
            };
            let st = self.verdicts.get(key).map_or(CheckStatus::Fail, |v| v.status);
            writeln!(
                md,
                "| `{key}` | `{}` | `{}` | {} | {} |",
                cell(&exp.value.to_string()),
                cell(&computed),
                status(st),
                cell(&exp.source)
            )
            .unwrap();
        }
        let extra: Vec<_> = self.computed.keys().filter(|k| !self.expected.contains_key(*k)).collect();
        if !extra.is_empty() {
            writeln!(md, "\n## Other computed values\n").unwrap();
            for k in extra {
                writeln!(md, "- `{k}` = `{}`", cell(&self.computed[k].to_string())).unwrap();
            }
        }
        if !self.errors.is_empty() {
            writeln!(md, "\n## Errors\n").unwrap();
            for (k, e) in &self.errors {
                writeln!(md, "- `{k}`: {e}").unwrap();
            }
        }
        if !self.assumptions.is_empty() {
            writeln!(md, "\n## Assumptions\n").unwrap();
            for a in &self.assumptions {
                writeln!(md, "- {a}").unwrap();
            }
        }
        if !self.metadata.is_empty() {
            writeln!(md, "\n## Recorded facts (not computed)\n").unwrap();
            for (k, v) in &self.metadata {
                writeln!(md, "- `{k}`: {v}").unwrap();
            }
        }
        md
    }
}

#[derive(Default)]
struct Builder {
    computed: BTreeMap<String, Value>,
    errors: BTreeMap<String, String>,
    narrative: Vec<String>,
    assumptions: Vec<String>,
}

impl Builder {
    fn set(&mut self, key: impl Into<String>, v: Value) {
        self.computed.insert(key.into(), v);
    }

    /// Records the value or the error; returns the value if there was one.
    fn record<T>(&mut self, key: &str, r: Result<T>, to_value: impl FnOnce(&T) -> Value) -> Option<T> {
        match r {
            Ok(v) => {
                self.set(key, to_value(&v));
                Some(v)
            }
            Err(e) => {
                self.errors.insert(key.into(), e.to_string());
                None
            }
        }
    }

    fn say(&mut self, line: impl Into<String>) {
        self.narrative.push(line.into());
    }

    fn assume(&mut self, a: impl Into<String>) {
        let a = a.into();
        if !self.assumptions.contains(&a) {
            self.assumptions.push(a);
        }
    }
}

fn int(v: &BigInt) -> Value {
    serde_json::to_value(IntRef(v)).expect("integer serializes")
}

fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

/// Runs the scenario; never panics on bad models, every failure is a FAIL
/// entry. `bound` caps the feasibility search and defaults to one more than
/// the largest constant of the system.
pub fn run_scenario(s: &Scenario, bound: Option<u64>) -> ScenarioReport {
    let mut b = Builder::default();
    if let Some(p) = &s.projection {
        run_projection(p, bound, &mut b);
    } else if let Some(f) = &s.family {
        run_family(f, bound, &mut b);
    }

    let mut verdicts = BTreeMap::new();
    for (key, exp) in &s.expected {
        let v = match (b.computed.get(key), b.errors.get(key)) {
            (Some(got), _) if *got == exp.value => KeyVerdict { status: CheckStatus::Pass, message: None },
            (Some(got), _) => KeyVerdict {
                status: CheckStatus::Fail,
                message: Some(format!("expected {}, computed {got}", exp.value)),
            },
            (None, Some(e)) => KeyVerdict { status: CheckStatus::Fail, message: Some(e.clone()) },
            (None, None) => KeyVerdict { status: CheckStatus::Fail, message: Some("not computed".into()) },
        };
        verdicts.insert(key.clone(), v);
    }
    let overall = if verdicts.values().all(|v| v.status == CheckStatus::Pass) {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    ScenarioReport {
        scenario: s.name.clone(),
        description: s.description.clone(),
        computed: b.computed,
        errors: b.errors,
        expected: s.expected.clone(),
        verdicts,
        overall,
        assumptions: b.assumptions,
        metadata: s.metadata.clone(),
        narrative: b.narrative,
    }
}

fn run_projection(p: &ProjectionSpec, bound: Option<u64>, b: &mut Builder) {
    let surface = &p.surface;
    let lattice = surface.lattice();
    let degree = surface.degree();
    let genus = surface.sectional_genus();
    b.set("degree", int(&degree));
    b.set("sectional_genus", int(&genus));
    b.say(format!(
        "{}: H² = {degree}, and adjunction 2g - 2 = H·(H + K) gives sectional genus g = {genus}.",
        surface.name()
    ));

    let curves: BTreeMap<&str, DivisorClass> = p
        .curves
        .iter()
        .filter_map(|c| lattice.class(c.class.clone()).ok().map(|d| (c.name.as_str(), d)))
        .collect();
    let pick = |names: &[String]| -> Vec<DivisorClass> { names.iter().filter_map(|n| curves.get(n.as_str()).cloned()).collect() };

    for name in &p.planar_curves {
        if let Some(c) = curves.get(name.as_str()) {
            b.record(&format!("incidence.{name}"), plane_image_incidence(surface, c), int);
        }
    }

    let model = ProjectionModel::new(
        surface.clone(),
        &pick(&p.planar_curves),
        p.deg_gamma.clone(),
        p.triple_points.clone(),
        p.cusps.clone(),
    );
    let Some(model) = b.record("deg_gamma", model, |m| int(m.deg_gamma())) else {
        b.set("verdict", json!(UNDETERMINED));
        b.say("The projection model could not be built; nothing downstream was computed.");
        return;
    };
    let deg_gamma = model.deg_gamma().clone();
    match &p.deg_gamma {
        Some(v) => b.say(format!("deg Γ = {v}, taken from the configuration instead of the genus formula.")),
        None => b.say(format!(
            "A general projection to P³ has a double curve of degree (d-1)(d-2)/2 - g = {deg_gamma}."
        )),
    }
    let gamma_w = model.gamma_w().clone();
    b.set("gamma_w", ints(gamma_w.coeffs()));
    let gw_deg = b.record("gamma_w.degree", lattice.pair(&gamma_w, surface.polarization()), int);
    if let Some(gw_deg) = gw_deg {
        b.set("gamma_w.degree_consistent", json!(gw_deg == &deg_gamma * 2u32));
    }
    let incid: Vec<String> = p
        .planar_curves
        .iter()
        .filter_map(|n| b.computed.get(&format!("incidence.{n}")).map(|v| format!("{n} ↦ {v}")))
        .collect();
    b.say(format!(
        "The double-point class Γ_W = {gamma_w} is the unique solution of the incidences {} and Γ_W·H = 2·deg Γ = {}.",
        if incid.is_empty() { "(none)".to_string() } else { incid.join(", ") },
        &deg_gamma * 2u32
    ));
    if let Some(t) = model.triple_points() {
        b.set("triple_points", int(t));
    }
    if let Some(c) = model.cusps() {
        b.set("cusps", int(c));
    }

    // Blown-up threefold.
    let mut t = match BlowupThreefold::new(model.clone()).with_curve_generators(pick(&p.curve_generators)) {
        Ok(t) => t,
        Err(e) => {
            b.errors.insert("threefold".into(), e.to_string());
            b.set("verdict", json!(UNDETERMINED));
            return;
        }
    };
    for d in &p.declared_divisors {
        t = t.with_declared_divisor(d.name.clone(), ThreefoldDivisor::new(d.h.clone(), d.e.clone()));
    }
    if let Some(sp) = t.sing_points() {
        b.set("sing_points", int(sp));
    }
    let mut ray_lines = Vec::new();
    for c in &p.curves {
        let Some(class) = curves.get(c.name.as_str()) else { continue };
        let s = b.record(&format!("st_dot.{}", c.name), t.st_dot(class), int);
        let k = b.record(&format!("kt_dot.{}", c.name), t.kt_dot(class), int);
        if let (Some(s), Some(k)) = (s, k) {
            ray_lines.push(format!("{}: S_T·C = {s}, K_T·C = {k}", c.name));
        }
    }
    b.say(format!(
        "On T = Bl_Γ P³ with S_T = {} and K_T = {}: {}.",
        t.strict_surface(),
        ThreefoldDivisor::canonical(),
        ray_lines.join("; ")
    ));

    let nef = if p.curve_generators.is_empty() {
        None
    } else {
        b.record("nef", t.is_nef_on(t.curve_generators()), |v| json!(v))
    };
    let ray = curves
        .get(p.second_ray.as_str())
        .map(|c| t.classify_second_ray(c))
        .unwrap_or_else(|| Err(Error::InvalidArgument(format!("unknown curve {}", p.second_ray))));
    let ray = b.record("second_ray.kind", ray, |v| json!(v.kind.as_str()));
    if let Some(r) = &ray {
        for a in &r.assumptions {
            b.assume(a.clone());
        }
        b.say(format!(
            "The second extremal ray is spanned by {} and is classified {}.",
            p.second_ray,
            r.kind.as_str()
        ));
    }
    let fano = if p.fano_rays.is_empty() {
        None
    } else {
        b.record("fano", t.fano_check(&pick(&p.fano_rays)), |v| json!(v))
    };
    if nef.is_some() || fano.is_some() {
        b.say(format!(
            "S_T nef on the declared curve generators: {}; -K_T positive on the ν-fibres and the declared rays: {}.",
            nef.map_or("not checked".into(), |v| v.to_string()),
            fano.map_or("not checked".into(), |v| v.to_string())
        ));
    }
    let (sq, four_gamma) = t.fibration_numerology();
    b.set("fibration_numerology", json!([int(&sq), int(&four_gamma)]));
    if ray.as_ref().is_some_and(|r| r.kind == RayKind::Fibration) {
        b.say(format!(
            "S_T restricts trivially to itself, so d² = 4·deg Γ: {sq} = {four_gamma}; S_T is a fibre of a pencil."
        ));
        b.assume("the general member of the pencil is rational over the function field of its base");
    }

    let mut threshold_positive = None;
    if !p.declared_divisors.is_empty() {
        let thr = t.effective_threshold();
        let (text, positive) = match &thr {
            None => ("S_T is outside the declared effective cone".to_string(), false),
            Some(None) => ("unbounded".to_string(), true),
            Some(Some(q)) => (q.to_string(), q.is_positive()),
        };
        b.set("effective_threshold", json!(text));
        b.set("threshold_positive", json!(positive));
        threshold_positive = Some(positive);
        b.say(format!(
            "S_T + t·K_T stays in the cone spanned by E_Γ and the declared divisors up to t = {text}."
        ));
    }

    let cert = b.record("log_kodaira.verdict", negativity_certificate(&degree, &deg_gamma), |c| {
        json!(c.verdict.as_str())
    });
    if let Some(c) = &cert {
        b.set("log_kodaira.inequality", json!(c.witness_inequality));
        b.assume(c.assumption.clone());
        b.say(format!("Log Kodaira test: {}.", c.witness_inequality));
    }
    let negative = cert.as_ref().map(|c| c.is_negative());

    let mut infeasible = None;
    if let Some(o) = &p.obstruction {
        infeasible = run_obstruction(surface, &model, &o.multiplicity, bound, b);
    }

    let kind = ray.as_ref().map(|r| r.kind);
    let verdict = if infeasible == Some(true)
        && negative == Some(true)
        && kind == Some(RayKind::FlopWallCanonicalFano)
    {
        NOT_CE
    } else if kind == Some(RayKind::Fibration) {
        CE_FIBRATION
    } else if kind == Some(RayKind::BirationalContractionFano)
        && nef == Some(true)
        && fano == Some(true)
        && threshold_positive == Some(true)
        && negative == Some(true)
    {
        CE_GOOD_MODEL
    } else {
        UNDETERMINED
    };
    b.set("verdict", json!(verdict));
    b.say(format!("Verdict: {verdict}."));
    if verdict == NOT_CE {
        b.say(NON_EXISTENCE_NOTE);
    }
}

/// Returns `Some(true)` when the system is certified infeasible.
fn run_obstruction(
    surface: &PolarizedSurface,
    model: &ProjectionModel,
    mult: &BigInt,
    bound: Option<u64>,
    b: &mut Builder,
) -> Option<bool> {
    let sz = make_sz();
    let inputs = (|| -> Result<_> {
        let s_pb = sz.from_f0(surface.polarization())?.scaled(model.deg_s());
        let gamma_total = sz.from_f0(model.gamma_w())?;
        let h_pb = sz.from_plane(&BigInt::one())?;
        Ok((s_pb, h_pb, gamma_total))
    })();
    let (s_pb, h_pb, gamma_total) = b.record("obstruction.inputs", inputs, |(s, h, g)| {
        json!({"s_pullback": ints(s.coeffs()), "h_pullback": ints(h.coeffs()), "e_gamma_total": ints(g.coeffs())})
    })?;
    let sys = b.record(
        "obstruction.constants",
        build_obstruction_system(&sz, &s_pb, &h_pb, &gamma_total, mult),
        |sys| Value::Array(sys.equations().iter().map(|e| int(&e.constant)).collect()),
    )?;
    let bound = bound.unwrap_or_else(|| default_bound(&sys));
    let cert = solve_nonneg(&sys, bound);
    b.set("obstruction.status", json!(cert.status.as_str()));
    if let Some(line) = cert.final_line() {
        b.set("obstruction.final_line", json!(line));
    }
    b.record("obstruction.replay", cert.replay(&sys), |_| json!("OK"));
    b.say(format!(
        "On S_Z: p*S| = {s_pb}, q*H| = {h_pb}, and the double curve pulls back to {gamma_total}. \
Comparing the two decompositions gives a system in nonnegative integers, decided {}:\n{}",
        cert.status.as_str(),
        cert.render(&sys)
    ));
    Some(cert.status == FeasibilityStatus::Infeasible)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ce {
    Yes,
    No,
    Unknown,
}

fn run_member(role: &str, m: &Member, bound: Option<u64>, b: &mut Builder) -> Ce {
    match m {
        Member::Scenario(name) => {
            let s = match builtin(name) {
                Ok(s) if s.projection.is_some() => s,
                Ok(_) => {
                    b.errors.insert(format!("{role}.verdict"), format!("`{name}` is not a projection scenario"));
                    return Ce::Unknown;
                }
                Err(e) => {
                    b.errors.insert(format!("{role}.verdict"), e.to_string());
                    return Ce::Unknown;
                }
            };
            let r = run_scenario(&s, bound);
            let verdict = r.verdict().unwrap_or(UNDETERMINED).to_string();
            b.set(format!("{role}.scenario"), json!(name));
            b.set(format!("{role}.overall"), json!(if r.passed() { "PASS" } else { "FAIL" }));
            b.set(format!("{role}.verdict"), json!(verdict));
            if let Some(v) = r.computed.get("log_kodaira.verdict") {
                b.set(format!("{role}.log_kodaira"), v.clone());
            }
            for a in &r.assumptions {
                b.assume(a.clone());
            }
            b.say(format!(
                "{role}: scenario `{name}` {} with verdict {verdict}.",
                if r.passed() { "passes" } else { "fails" }
            ));
            if verdict.starts_with("CE_TO_PLANE") {
                Ce::Yes
            } else if verdict == NOT_CE {
                Ce::No
            } else {
                Ce::Unknown
            }
        }
        Member::Monoid { degree, multiplicity } => {
            let ok = b.record(&format!("{role}.monoid_predicate"), monoid_ce_predicate(degree, multiplicity), |v| json!(v));
            let ce = ok == Some(true);
            b.set(format!("{role}.verdict"), json!(if ce { CE_MONOID } else { UNDETERMINED }));
            b.say(format!(
                "{role}: a degree {degree} surface with a point of multiplicity {multiplicity} {} a monoid{}.",
                if ce { "is" } else { "is not" },
                if ce { ", so projection from that point is birational onto a plane" } else { "" }
            ));
            if ce {
                Ce::Yes
            } else {
                Ce::Unknown
            }
        }
    }
}

fn run_family(f: &FamilySpec, bound: Option<u64>, b: &mut Builder) {
    let generic = run_member("generic_member", &f.generic_member, bound, b);
    let special = run_member("special_member", &f.special_member, bound, b);

    if let Some(dc) = &f.dimension_count {
        if let Some(c) = b.record("dimension_count.lhs", dominance_count(&dc.param_space_dims, &dc.k, &dc.n), |c| int(&c.lhs)) {
            b.set("dimension_count.rhs", int(&c.rhs));
            b.set("dimension_count.dominant_possible", json!(c.dominant_possible));
            let parts: Vec<String> = c.param_space_dims.iter().map(ToString::to_string).collect();
            b.say(format!(
                "Parameter count {} = {} against dim G({}, {}) = (k+1)(n-k) = {}: dominance {}.",
                parts.join(" + "),
                c.lhs,
                dc.k,
                dc.n,
                c.rhs,
                if c.dominant_possible { "is possible" } else { "is impossible" }
            ));
            b.assume(c.assumption);
        }
    }
    for ls in &f.linear_systems {
        if let Some(d) = b.record(
            &format!("linear_system.{}", ls.name),
            expected_linear_system_dim(&ls.degree, &ls.multiplicities),
            int,
        ) {
            let m: Vec<String> = ls.multiplicities.iter().map(ToString::to_string).collect();
            b.say(format!(
                "Plane curves of degree {} with multiplicities [{}] form a system of expected dimension {d} ({}).",
                ls.degree,
                m.join(", "),
                ls.name
            ));
            b.assume("point conditions imposed on the linear systems are independent");
        }
    }

    let verdict = match (f.direction, generic, special) {
        (FamilyDirection::Open, Ce::No, Ce::Yes) => CE_NOT_OPEN,
        (FamilyDirection::Closed, Ce::Yes, Ce::No) => CE_NOT_CLOSED,
        _ => UNDETERMINED,
    };
    b.set("verdict", json!(verdict));
    b.say(format!("Verdict: {verdict}."));
}
