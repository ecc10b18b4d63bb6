//! Nonnegative integer feasibility of the restriction-class equations on
//! `S_Z`, with certificates.
//!
//! Elimination works on the row space of the augmented matrix `[A | b]`.
//! Its elementary vectors (minimal supports) decide real feasibility of
//! `Ax = b, x ≥ 0` exactly: by Farkas and conformal decomposition, if any
//! combination `yᵀA ≥ 0, yᵀb < 0` exists then an elementary one does. Each
//! derived line is stored with its integer multipliers over the original
//! equations, so a certificate replays without trusting the solver.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::DivisorClass;
use crate::matrix::{primitive_integer, rref, to_rational};
use crate::serde_int::{self, IntRef};
use crate::surfaces::SZModel;

/// `Σ coeffs[i]·x_i = constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearEquation {
    #[serde(with = "serde_int::vec")]
    pub coeffs: Vec<BigInt>,
    #[serde(with = "serde_int::scalar")]
    pub constant: BigInt,
}

impl LinearEquation {
    pub fn new(coeffs: Vec<BigInt>, constant: BigInt) -> Self {
        Self { coeffs, constant }
    }

    pub fn from_i64(coeffs: &[i64], constant: i64) -> Self {
        Self::new(coeffs.iter().map(|&c| c.into()).collect(), constant.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemJson")]
pub struct FeasibilitySystem {
    unknowns: Vec<String>,
    equations: Vec<LinearEquation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemJson {
    unknowns: Vec<String>,
    equations: Vec<LinearEquation>,
}

impl TryFrom<SystemJson> for FeasibilitySystem {
    type Error = Error;
    fn try_from(j: SystemJson) -> Result<Self> {
        Self::new(j.unknowns, j.equations)
    }
}

pub const DEFAULT_UNKNOWNS: [&str; 6] = ["e", "s1", "s2", "a", "b1", "b2"];

impl FeasibilitySystem {
    pub fn new(unknowns: Vec<String>, equations: Vec<LinearEquation>) -> Result<Self> {
        let mut seen = HashSet::new();
        for u in &unknowns {
            if u.is_empty() || !seen.insert(u.as_str()) {
                return Err(Error::InvalidArgument(format!("bad or repeated unknown name {u:?}")));
            }
        }
        for eq in &equations {
            if eq.coeffs.len() != unknowns.len() {
                return Err(Error::DimensionMismatch {
                    expected: unknowns.len(),
                    found: eq.coeffs.len(),
                });
            }
        }
        Ok(Self { unknowns, equations })
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn equations(&self) -> &[LinearEquation] {
        &self.equations
    }

    /// True iff `x` is a nonnegative solution.
    pub fn satisfied_by(&self, x: &[BigInt]) -> bool {
        x.len() == self.unknowns.len()
            && x.iter().all(|v| !v.is_negative())
            && self
                .equations
                .iter()
                .all(|eq| crate::matrix::dot(&eq.coeffs, x) == eq.constant)
    }

    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.unknowns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.unknowns.len(),
                found: names.len(),
            });
        }
        Self::new(names, self.equations.clone())
    }

    /// New unknown `i` is old unknown `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.unknowns.len();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        let unknowns = perm.iter().map(|&p| self.unknowns[p].clone()).collect();
        let equations = self
            .equations
            .iter()
            .map(|eq| LinearEquation::new(perm.iter().map(|&p| eq.coeffs[p].clone()).collect(), eq.constant.clone()))
            .collect();
        Self::new(unknowns, equations)
    }

    /// `first = constant - rest`, e.g. `e = 2 + s1 - b1`.
    pub fn render_equation(&self, eq: &LinearEquation) -> String {
        render_solved(&self.unknowns, &eq.coeffs, &eq.constant)
    }

    pub fn render(&self) -> String {
        self.equations
            .iter()
            .map(|eq| self.render_equation(eq))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn term(coeff: &BigInt, name: &str) -> String {
    if coeff.abs().is_one() {
        name.to_string()
    } else {
        format!("{}*{name}", coeff.abs())
    }
}

fn render_solved(names: &[String], coeffs: &[BigInt], constant: &BigInt) -> String {
    let Some(first) = coeffs.iter().position(|c| !c.is_zero()) else {
        return format!("0 = {constant}");
    };
    let lead = &coeffs[first];
    // Normalize so the leading coefficient is positive.
    let flip = lead.is_negative();
    let sign = |c: &BigInt| if flip { -c } else { c.clone() };
    let mut out = format!("{} = ", term(lead, &names[first]));
    let rhs_const = sign(constant);
    let mut wrote = false;
    if !rhs_const.is_zero() {
        write!(out, "{rhs_const}").unwrap();
        wrote = true;
    }
    for (j, c) in coeffs.iter().enumerate().skip(first + 1) {
        if c.is_zero() {
            continue;
        }
        // move to the right-hand side
        let moved = -sign(c);
        let t = term(&moved, &names[j]);
        match (wrote, moved.is_negative()) {
            (false, true) => write!(out, "-{t}").unwrap(),
            (false, false) => out.push_str(&t),
            (true, true) => write!(out, " - {t}").unwrap(),
            (true, false) => write!(out, " + {t}").unwrap(),
        }
        wrote = true;
    }
    if !wrote {
        out.push('0');
    }
    out
}

/// `0 = t1 + t2 + ...` for a combination with nonnegative coefficients and
/// zero constant.
fn render_zero_sum(names: &[String], coeffs: &[BigInt]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| term(c, n))
        .collect();
    format!("0 = {}", terms.join(" + "))
}

/// Builds the system obtained by comparing the two decompositions of the
/// restricted pullbacks on `S_Z`:
///
/// * `p*S|  = S_Z| + mult·Γ_total + E_S + (0, 0, a+1)`
/// * `q*H|  = S_Z| + E_H + (b1+1, b2+1, 0)`
///
/// with `E_S = (s1, s2, s1+s2)` and `E_H = (e, e, e)`. The `+1` terms come
/// from the exceptional curves over the base points, each appearing with
/// multiplicity at least one. Subtracting gives, coordinatewise,
/// `E_H = E_S + mult·Γ_total - p*S + q*H + (-1, -1, 1) + (-b1, -b2, a)`.
pub fn build_obstruction_system(
    sz: &SZModel,
    s_pullback: &DivisorClass,
    h_pullback: &DivisorClass,
    e_gamma_total: &DivisorClass,
    deg_s_mult: &BigInt,
) -> Result<FeasibilitySystem> {
    if !deg_s_mult.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "multiplicity along the double curve must be positive, got {deg_s_mult}"
        )));
    }
    if !sz.is_st_pullback(s_pullback)? {
        return Err(Error::Predicate(format!("s_pullback {s_pullback} violates a + b = c")));
    }
    if !sz.is_st_pullback(e_gamma_total)? {
        return Err(Error::Predicate(format!("e_gamma_total {e_gamma_total} violates a + b = c")));
    }
    if !sz.is_plane_pullback(h_pullback)? {
        return Err(Error::Predicate(format!("h_pullback {h_pullback} violates a = b = c")));
    }
    let offsets = [BigInt::from(-1), BigInt::from(-1), BigInt::from(1)];
    let k: Vec<BigInt> = (0..3)
        .map(|i| {
            &h_pullback.coeffs()[i] - &s_pullback.coeffs()[i]
                + deg_s_mult * &e_gamma_total.coeffs()[i]
                + &offsets[i]
        })
        .collect();
    // unknowns: e, s1, s2, a, b1, b2
    let rows: [[i64; 6]; 3] = [
        [1, -1, 0, 0, 1, 0],
        [1, 0, -1, 0, 0, 1],
        [1, -1, -1, -1, 0, 0],
    ];
    let equations = rows
        .iter()
        .zip(k)
        .map(|(r, c)| LinearEquation::new(r.iter().map(|&x| x.into()).collect(), c))
        .collect();
    FeasibilitySystem::new(DEFAULT_UNKNOWNS.iter().map(|s| s.to_string()).collect(), equations)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    UnknownUpToBound,
}

impl FeasibilityStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Feasible => "FEASIBLE",
            Self::Infeasible => "INFEASIBLE",
            Self::UnknownUpToBound => "UNKNOWN_UP_TO_BOUND",
        }
    }
}

/// An integer combination of the original equations, with the unknowns in
/// `zeroed` (already forced to zero) dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedLine {
    #[serde(with = "serde_int::vec")]
    pub multipliers: Vec<BigInt>,
    pub zeroed: Vec<usize>,
    #[serde(with = "serde_int::vec")]
    pub coeffs: Vec<BigInt>,
    #[serde(with = "serde_int::scalar")]
    pub constant: BigInt,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ChainStep {
    Combination(DerivedLine),
    ForcedZero { unknown: usize, name: String, from_step: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityCertificate {
    pub status: FeasibilityStatus,
    pub bound: u64,
    pub unknowns: Vec<String>,
    pub witness: Option<Vec<BigInt>>,
    pub chain: Vec<ChainStep>,
}

impl Serialize for FeasibilityCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            status: FeasibilityStatus,
            bound: u64,
            unknowns: &'a [String],
            #[serde(skip_serializing_if = "Option::is_none")]
            witness: Option<BTreeMap<&'a str, IntRef<'a>>>,
            chain: &'a [ChainStep],
        }
        Json {
            status: self.status,
            bound: self.bound,
            unknowns: &self.unknowns,
            witness: self.witness.as_ref().map(|w| {
                self.unknowns.iter().map(String::as_str).zip(w.iter().map(IntRef)).collect()
            }),
            chain: &self.chain,
        }
        .serialize(s)
    }
}

impl FeasibilityCertificate {
    fn feasible(sys: &FeasibilitySystem, bound: u64, witness: Vec<BigInt>, chain: Vec<ChainStep>) -> Self {
        assert!(sys.satisfied_by(&witness), "witness must satisfy the system");
        Self {
            status: FeasibilityStatus::Feasible,
            bound,
            unknowns: sys.unknowns.clone(),
            witness: Some(witness),
            chain,
        }
    }

    /// Named witness values in unknown order.
    pub fn witness_named(&self) -> Option<Vec<(String, BigInt)>> {
        self.witness
            .as_ref()
            .map(|w| self.unknowns.iter().cloned().zip(w.iter().cloned()).collect())
    }

    /// Text of the last derived line.
    pub fn final_line(&self) -> Option<&str> {
        self.chain.iter().rev().find_map(|s| match s {
            ChainStep::Combination(l) => Some(l.text.as_str()),
            ChainStep::ForcedZero { .. } => None,
        })
    }

    /// Mechanically re-derives every step from `sys`. For an INFEASIBLE
    /// certificate the last line must be a nonnegative combination equal to
    /// a negative constant; for FEASIBLE the witness must satisfy `sys`.
    pub fn replay(&self, sys: &FeasibilitySystem) -> Result<()> {
        let n = sys.unknowns.len();
        let m = sys.equations.len();
        let mut forced: Vec<Option<usize>> = vec![None; n];
        for (idx, step) in self.chain.iter().enumerate() {
            match step {
                ChainStep::Combination(line) => {
                    if line.multipliers.len() != m || line.coeffs.len() != n {
                        return Err(Error::Contradiction(format!("step {idx}: wrong shape")));
                    }
                    for &z in &line.zeroed {
                        if z >= n || forced[z].is_none() {
                            return Err(Error::Contradiction(format!(
                                "step {idx}: drops unknown {z} before it is forced to zero"
                            )));
                        }
                    }
                    let mut coeffs = vec![BigInt::zero(); n];
                    let mut constant = BigInt::zero();
                    for (y, eq) in line.multipliers.iter().zip(&sys.equations) {
                        for (c, a) in coeffs.iter_mut().zip(&eq.coeffs) {
                            *c += y * a;
                        }
                        constant += y * &eq.constant;
                    }
                    for &z in &line.zeroed {
                        coeffs[z] = BigInt::zero();
                    }
                    if coeffs != line.coeffs || constant != line.constant {
                        return Err(Error::Contradiction(format!(
                            "step {idx}: stated line is not the claimed combination"
                        )));
                    }
                }
                ChainStep::ForcedZero { unknown, from_step, .. } => {
                    let Some(ChainStep::Combination(src)) =
                        self.chain.get(*from_step).filter(|_| *from_step < idx)
                    else {
                        return Err(Error::Contradiction(format!("step {idx}: bad source step")));
                    };
                    let ok = *unknown < n
                        && src.constant.is_zero()
                        && src.coeffs.iter().all(|c| !c.is_negative())
                        && src.coeffs[*unknown].is_positive();
                    if !ok {
                        return Err(Error::Contradiction(format!(
                            "step {idx}: source line does not force unknown {unknown} to zero"
                        )));
                    }
                    forced[*unknown] = Some(idx);
                }
            }
        }
        match self.status {
            FeasibilityStatus::Infeasible => match self.chain.last() {
                Some(ChainStep::Combination(l))
                    if l.coeffs.iter().all(|c| !c.is_negative()) && l.constant.is_negative() =>
                {
                    Ok(())
                }
                _ => Err(Error::Contradiction("chain does not end in a contradiction".into())),
            },
            FeasibilityStatus::Feasible => match &self.witness {
                Some(w) if sys.satisfied_by(w) => Ok(()),
                _ => Err(Error::Contradiction("witness does not satisfy the system".into())),
            },
            FeasibilityStatus::UnknownUpToBound => Ok(()),
        }
    }

    /// Human-readable proof transcript.
    pub fn render(&self, sys: &FeasibilitySystem) -> String {
        let mut out = String::new();
        writeln!(out, "System (all unknowns ≥ 0):").unwrap();
        for (i, eq) in sys.equations.iter().enumerate() {
            writeln!(out, "  L{}: {}", i + 1, sys.render_equation(eq)).unwrap();
        }
        for (idx, step) in self.chain.iter().enumerate() {
            match step {
                ChainStep::Combination(l) => {
                    let combo = render_combination(&l.multipliers);
                    let with = if l.zeroed.is_empty() {
                        String::new()
                    } else {
                        let names: Vec<String> =
                            l.zeroed.iter().map(|&z| format!("{} = 0", sys.unknowns[z])).collect();
                        format!(" with {}", names.join(", "))
                    };
                    writeln!(out, "  ({}) {combo}{with}: {}", idx + 1, l.text).unwrap();
                }
                ChainStep::ForcedZero { name, from_step, .. } => {
                    writeln!(out, "  ({}) {name} = 0, from ({})", idx + 1, from_step + 1).unwrap();
                }
            }
        }
        match self.status {
            FeasibilityStatus::Infeasible => {
                writeln!(
                    out,
                    "Contradiction: the last line sets a nonnegative combination equal to a negative number."
                )
                .unwrap();
            }
            FeasibilityStatus::Feasible => {
                let w: Vec<String> = self
                    .witness_named()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|(n, v)| format!("{n} = {v}"))
                    .collect();
                writeln!(out, "Witness: {}", w.join(", ")).unwrap();
            }
            FeasibilityStatus::UnknownUpToBound => {
                writeln!(
                    out,
                    "No contradiction by elimination and no solution with all unknowns in [0, {}].",
                    self.bound
                )
                .unwrap();
            }
        }
        out
    }
}

fn render_combination(ys: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, y) in ys.iter().enumerate() {
        if y.is_zero() {
            continue;
        }
        let name = format!("L{}", i + 1);
        let body = if y.abs().is_one() { name } else { format!("{}*{name}", y.abs()) };
        match (out.is_empty(), y.is_negative()) {
            (true, true) => write!(out, "-{body}").unwrap(),
            (true, false) => out.push_str(&body),
            (false, true) => write!(out, " - {body}").unwrap(),
            (false, false) => write!(out, " + {body}").unwrap(),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone)]
struct Candidate {
    multipliers: Vec<BigInt>,
    coeffs: Vec<BigInt>,
    constant: BigInt,
}

impl Candidate {
    fn rows_used(&self) -> usize {
        self.multipliers.iter().filter(|y| !y.is_zero()).count()
    }

    fn support(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn negated(&self) -> Self {
        Self {
            multipliers: self.multipliers.iter().map(|y| -y).collect(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            constant: -&self.constant,
        }
    }
}

/// Elementary vectors of the row space of `[A | b]` restricted to the
/// `active` columns, each with integer multipliers over the original rows.
fn elementary_vectors(sys: &FeasibilitySystem, active: &[usize]) -> Vec<Candidate> {
    let n = sys.unknowns.len();
    let cols = active.len() + 1;
    let row_of = |eq: &LinearEquation| -> Vec<BigInt> {
        let mut r: Vec<BigInt> = active.iter().map(|&j| eq.coeffs[j].clone()).collect();
        r.push(eq.constant.clone());
        r
    };
    let rows: Vec<Vec<BigInt>> = sys.equations.iter().map(row_of).collect();

    // greedy maximal independent subset of rows
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<BigInt>> = basis.iter().map(|&b| rows[b].clone()).collect();
        trial.push(rows[i].clone());
        if rref(&to_rational(&trial)).rank() == trial.len() {
            basis.push(i);
        }
    }
    let r = basis.len();
    if r == 0 {
        return Vec::new();
    }
    let basis_rows: Vec<Vec<BigRational>> = to_rational(&basis.iter().map(|&b| rows[b].clone()).collect::<Vec<_>>());

    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    let mut out = Vec::new();
    for zeros in combinations(cols, r - 1) {
        // z with zᵀ·basis_rows vanishing on `zeros`
        let p: Vec<Vec<BigRational>> = zeros
            .iter()
            .map(|&c| basis_rows.iter().map(|row| row[c].clone()).collect())
            .collect();
        let z = if p.is_empty() {
            vec![BigRational::one()]
        } else {
            let ech = rref(&p);
            if ech.rank() != r - 1 {
                continue;
            }
            let free = (0..r).find(|c| !ech.pivots.contains(c)).expect("one free column");
            let mut z = vec![BigRational::zero(); r];
            z[free] = BigRational::one();
            for (row, &pc) in ech.rows.iter().zip(&ech.pivots) {
                z[pc] = -row[free].clone();
            }
            z
        };
        let z = primitive_integer(&z);
        let mut v = vec![BigInt::zero(); cols];
        for (zk, &b) in z.iter().zip(&basis) {
            for (vj, x) in v.iter_mut().zip(&rows[b]) {
                *vj += zk * x;
            }
        }
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        // canonical direction for de-duplication
        let key = {
            let p = primitive_integer(&v.iter().cloned().map(BigRational::from_integer).collect::<Vec<_>>());
            let neg = p.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
            if neg { p.into_iter().map(|x| -x).collect() } else { p }
        };
        if !seen.insert(key) {
            continue;
        }
        let mut multipliers = vec![BigInt::zero(); sys.equations.len()];
        for (zk, &b) in z.iter().zip(&basis) {
            multipliers[b] = zk.clone();
        }
        let mut coeffs = vec![BigInt::zero(); n];
        for (k, &j) in active.iter().enumerate() {
            coeffs[j] = v[k].clone();
        }
        out.push(Candidate {
            multipliers,
            coeffs,
            constant: v[cols - 1].clone(),
        });
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Orients `c` so its coefficients are nonnegative, if possible.
fn oriented(c: &Candidate) -> Option<Candidate> {
    if c.coeffs.iter().all(Zero::is_zero) {
        // `0 = k`: orient so that k < 0
        return Some(if c.constant.is_positive() { c.negated() } else { c.clone() });
    }
    if c.coeffs.iter().all(|x| !x.is_negative()) {
        Some(c.clone())
    } else if c.coeffs.iter().all(|x| !x.is_positive()) {
        Some(c.negated())
    } else {
        None
    }
}

/// Decides nonnegative integer feasibility of `sys`.
///
/// Elimination first: repeatedly find combinations `Σ wᵢxᵢ = 0` with all
/// `wᵢ ≥ 0` (forcing those unknowns to zero), then look for one with all
/// `wᵢ ≥ 0` and a negative constant. If none exists the system is feasible
/// over the nonnegative reals, and a search over the box `[0, bound]ⁿ`
/// either finds an integer witness or the status is UNKNOWN_UP_TO_BOUND.
pub fn solve_nonneg(sys: &FeasibilitySystem, bound: u64) -> FeasibilityCertificate {
    let n = sys.unknowns.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut zeroed: Vec<usize> = Vec::new();
    let mut chain: Vec<ChainStep> = Vec::new();

    loop {
        let cands = elementary_vectors(sys, &active);
        let oriented_cands: Vec<Candidate> = cands.iter().filter_map(oriented).collect();

        let zero_forcing = oriented_cands
            .iter()
            .filter(|c| c.constant.is_zero() && c.support() > 0)
            .min_by_key(|c| (std::cmp::Reverse(c.support()), c.rows_used()));
        if let Some(c) = zero_forcing {
            let step = chain.len();
            let text = render_zero_sum(&sys.unknowns, &c.coeffs);
            chain.push(ChainStep::Combination(DerivedLine {
                multipliers: c.multipliers.clone(),
                zeroed: zeroed.clone(),
                coeffs: c.coeffs.clone(),
                constant: c.constant.clone(),
                text,
            }));
            for (j, w) in c.coeffs.iter().enumerate() {
                if w.is_positive() {
                    chain.push(ChainStep::ForcedZero { unknown: j, name: sys.unknowns[j].clone(), from_step: step });
                    zeroed.push(j);
                }
            }
            zeroed.sort_unstable();
            active.retain(|j| !zeroed.contains(j));
            continue;
        }

        let contradiction = oriented_cands
            .iter()
            .filter(|c| c.constant.is_negative())
            .min_by_key(|c| (c.rows_used(), c.support()));
        if let Some(c) = contradiction {
            let text = render_solved(&sys.unknowns, &c.coeffs, &c.constant);
            chain.push(ChainStep::Combination(DerivedLine {
                multipliers: c.multipliers.clone(),
                zeroed: zeroed.clone(),
                coeffs: c.coeffs.clone(),
                constant: c.constant.clone(),
                text,
            }));
            return FeasibilityCertificate {
                status: FeasibilityStatus::Infeasible,
                bound,
                unknowns: sys.unknowns.clone(),
                witness: None,
                chain,
            };
        }
        break;
    }

    match box_search(sys, &active, bound) {
        Some(w) => FeasibilityCertificate::feasible(sys, bound, w, chain),
        None => FeasibilityCertificate {
            status: FeasibilityStatus::UnknownUpToBound,
            bound,
            unknowns: sys.unknowns.clone(),
            witness: None,
            chain,
        },
    }
}

/// Integer solution with the `active` unknowns in `[0, bound]` and the rest
/// zero. Enumerates the free variables of the reduced echelon form, pruning
/// on the interval each pivot variable can still reach.
fn box_search(sys: &FeasibilitySystem, active: &[usize], bound: u64) -> Option<Vec<BigInt>> {
    let n = sys.unknowns.len();
    let k = active.len();
    let aug: Vec<Vec<BigInt>> = sys
        .equations
        .iter()
        .map(|eq| {
            let mut r: Vec<BigInt> = active.iter().map(|&j| eq.coeffs[j].clone()).collect();
            r.push(eq.constant.clone());
            r
        })
        .collect();
    let ech = rref(&to_rational(&aug));
    if ech.pivots.last() == Some(&k) {
        return None;
    }
    let free: Vec<usize> = (0..k).filter(|c| !ech.pivots.contains(c)).collect();
    let hi = BigRational::from_integer(BigInt::from(bound));
    let lo = BigRational::zero();

    struct Ctx<'a> {
        ech: &'a crate::matrix::Echelon,
        free: &'a [usize],
        k: usize,
        bound: u64,
        lo: BigRational,
        hi: BigRational,
    }

    // pivot value = rhs - Σ row[f]·x_f; range check over unassigned free vars
    fn feasible_range(ctx: &Ctx, assigned: &[BigRational]) -> bool {
        for row in &ctx.ech.rows {
            let mut val = row[ctx.k].clone();
            let mut min_extra = BigRational::zero();
            let mut max_extra = BigRational::zero();
            for (idx, &f) in ctx.free.iter().enumerate() {
                let c = -&row[f];
                if idx < assigned.len() {
                    val += &c * &assigned[idx];
                } else if c.is_positive() {
                    max_extra += &c * &ctx.hi;
                } else {
                    min_extra += &c * &ctx.hi;
                }
            }
            if &val + &max_extra < ctx.lo || &val + &min_extra > ctx.hi {
                return false;
            }
        }
        true
    }

    fn rec(ctx: &Ctx, assigned: &mut Vec<BigRational>) -> Option<Vec<BigRational>> {
        if !feasible_range(ctx, assigned) {
            return None;
        }
        if assigned.len() == ctx.free.len() {
            let mut x = vec![BigRational::zero(); ctx.k];
            for (idx, &f) in ctx.free.iter().enumerate() {
                x[f] = assigned[idx].clone();
            }
            for (row, &p) in ctx.ech.rows.iter().zip(&ctx.ech.pivots) {
                let mut v = row[ctx.k].clone();
                for (idx, &f) in ctx.free.iter().enumerate() {
                    v -= &row[f] * &assigned[idx];
                }
                if !v.is_integer() || v < ctx.lo || v > ctx.hi {
                    return None;
                }
                x[p] = v;
            }
            return Some(x);
        }
        for t in 0..=ctx.bound {
            assigned.push(BigRational::from_integer(BigInt::from(t)));
            if let Some(x) = rec(ctx, assigned) {
                return Some(x);
            }
            assigned.pop();
        }
        None
    }

    let ctx = Ctx { ech: &ech, free: &free, k, bound, lo, hi };
    let x = rec(&ctx, &mut Vec::new())?;
    let mut full = vec![BigInt::zero(); n];
    for (pos, &j) in active.iter().enumerate() {
        full[j] = x[pos].to_integer();
    }
    Some(full)
}

/// Largest absolute constant, a convenient default search bound.
pub fn default_bound(sys: &FeasibilitySystem) -> u64 {
    sys.equations
        .iter()
        .map(|eq| eq.constant.abs().to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(0)
        .saturating_add(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ints;
    use crate::surfaces::make_sz;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sextic_system() -> FeasibilitySystem {
        let sz = make_sz();
        let lat = sz.lattice();
        build_obstruction_system(
            &sz,
            &lat.class(ints(&[6, 18, 24])).unwrap(),
            &lat.class(ints(&[1, 1, 1])).unwrap(),
            &lat.class(ints(&[4, 8, 12])).unwrap(),
            &BigInt::from(2),
        )
        .unwrap()
    }

    /// Independent oracle: depth-first over all unknowns in `[0, bound]`,
    /// pruning any equation whose remaining range misses its constant.
    fn brute_force(sys: &FeasibilitySystem, bound: i64) -> Option<Vec<i64>> {
        let eqs: Vec<(Vec<i64>, i64)> = sys
            .equations()
            .iter()
            .map(|e| (e.coeffs.iter().map(|c| c.to_i64().unwrap()).collect(), e.constant.to_i64().unwrap()))
            .collect();
        let n = sys.unknowns().len();
        fn go(eqs: &[(Vec<i64>, i64)], n: usize, bound: i64, x: &mut Vec<i64>) -> bool {
            for (c, k) in eqs {
                let fixed: i64 = c.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                let (mut lo, mut hi) = (fixed, fixed);
                for a in &c[x.len()..] {
                    if *a > 0 { hi += a * bound } else { lo += a * bound }
                }
                if *k < lo || *k > hi {
                    return false;
                }
            }
            if x.len() == n {
                return true;
            }
            for v in 0..=bound {
                x.push(v);
                if go(eqs, n, bound, x) {
                    return true;
                }
                x.pop();
            }
            false
        }
        let mut x = Vec::new();
        go(&eqs, n, bound, &mut x).then_some(x)
    }

    #[test]
    fn sextic_system_constants() {
        let sys = sextic_system();
        let constants: Vec<BigInt> = sys.equations().iter().map(|e| e.constant.clone()).collect();
        assert_eq!(constants, ints(&[2, -2, 2]));
        assert_eq!(sys.render_equation(&sys.equations()[1]), "e = -2 + s2 - b2");
    }

    #[test]
    fn sextic_system_is_infeasible_with_replayable_chain() {
        let sys = sextic_system();
        let cert = solve_nonneg(&sys, 50);
        assert_eq!(cert.status, FeasibilityStatus::Infeasible);
        cert.replay(&sys).unwrap();
        let ChainStep::Combination(first) = &cert.chain[0] else { panic!() };
        assert_eq!(first.multipliers, ints(&[1, 0, -1]));
        assert_eq!(first.text, "0 = s2 + a + b1");
        let forced: Vec<&str> = cert
            .chain
            .iter()
            .filter_map(|s| match s {
                ChainStep::ForcedZero { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect();
        assert_eq!(forced, ["s2", "a", "b1"]);
        assert_eq!(cert.final_line(), Some("e = -2 - b2"));
        let text = cert.render(&sys);
        assert!(text.contains("L2 with s2 = 0, a = 0, b1 = 0: e = -2 - b2"), "{text}");
        assert!(brute_force(&sys, 50).is_none());
    }

    #[test]
    fn tampered_chain_fails_replay() {
        let sys = sextic_system();
        let mut cert = solve_nonneg(&sys, 5);
        if let Some(ChainStep::Combination(l)) = cert.chain.last_mut() {
            l.constant = BigInt::from(-3);
        }
        assert!(cert.replay(&sys).is_err());
        let mut cert = solve_nonneg(&sys, 5);
        cert.chain.remove(1);
        assert!(cert.replay(&sys).is_err());
    }

    #[test]
    fn zero_system_has_zero_witness() {
        let sys = FeasibilitySystem::new(vec!["x".into()], vec![LinearEquation::from_i64(&[1], 0)]).unwrap();
        let cert = solve_nonneg(&sys, 0);
        assert_eq!(cert.status, FeasibilityStatus::Feasible);
        assert_eq!(cert.witness, Some(ints(&[0])));
        cert.replay(&sys).unwrap();
    }

    #[test]
    fn toy_system_constants_by_hand() {
        let sz = make_sz();
        let lat = sz.lattice();
        let sys = build_obstruction_system(
            &sz,
            &lat.class(ints(&[2, 6, 8])).unwrap(),
            &lat.class(ints(&[1, 1, 1])).unwrap(),
            &lat.zero(),
            &BigInt::from(2),
        )
        .unwrap();
        // (1,1,1) - (2,6,8) + 0 + (-1,-1,1)
        let constants: Vec<BigInt> = sys.equations().iter().map(|e| e.constant.clone()).collect();
        assert_eq!(constants, ints(&[-2, -6, -6]));
        let cert = solve_nonneg(&sys, 10);
        cert.replay(&sys).unwrap();
        assert_eq!(cert.status, FeasibilityStatus::Infeasible);
    }

    #[test]
    fn predicate_violations_are_errors() {
        let sz = make_sz();
        let lat = sz.lattice();
        let s = lat.class(ints(&[6, 18, 24])).unwrap();
        let g = lat.class(ints(&[4, 8, 12])).unwrap();
        let bad_h = lat.class(ints(&[1, 2, 1])).unwrap();
        assert!(matches!(
            build_obstruction_system(&sz, &s, &bad_h, &g, &BigInt::from(2)),
            Err(Error::Predicate(_))
        ));
        let h = lat.class(ints(&[1, 1, 1])).unwrap();
        let bad_s = lat.class(ints(&[6, 18, 23])).unwrap();
        assert!(matches!(
            build_obstruction_system(&sz, &bad_s, &h, &g, &BigInt::from(2)),
            Err(Error::Predicate(_))
        ));
        assert!(build_obstruction_system(&sz, &s, &h, &g, &BigInt::zero()).is_err());
    }

    #[test]
    fn divisibility_is_left_to_the_search() {
        let sys = FeasibilitySystem::new(vec!["x".into()], vec![LinearEquation::from_i64(&[2], 1)]).unwrap();
        let cert = solve_nonneg(&sys, 20);
        assert_eq!(cert.status, FeasibilityStatus::UnknownUpToBound);
        assert!(cert.render(&sys).contains("[0, 20]"));
    }

    #[test]
    fn inconsistent_constant_row() {
        let sys = FeasibilitySystem::new(
            vec!["x".into(), "y".into()],
            vec![LinearEquation::from_i64(&[1, 1], 1), LinearEquation::from_i64(&[1, 1], 2)],
        )
        .unwrap();
        let cert = solve_nonneg(&sys, 3);
        assert_eq!(cert.status, FeasibilityStatus::Infeasible);
        cert.replay(&sys).unwrap();
        assert_eq!(cert.final_line(), Some("0 = -1"));
    }

    #[test]
    fn system_json_round_trip() {
        let sys = sextic_system();
        let j = serde_json::to_string(&sys).unwrap();
        let back: FeasibilitySystem = serde_json::from_str(&j).unwrap();
        assert_eq!(back, sys);
        let bad = r#"{"unknowns":["x"],"equations":[{"coeffs":[1,2],"constant":0}]}"#;
        assert!(serde_json::from_str::<FeasibilitySystem>(bad).is_err());
        let cert = solve_nonneg(&sys, 3);
        let v = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["status"], "INFEASIBLE");
        assert_eq!(v["chain"][0]["step"], "combination");
    }

    fn random_system(rng: &mut ChaCha8Rng) -> FeasibilitySystem {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=3);
        let names = (0..n).map(|i| format!("x{i}")).collect();
        let eqs = (0..m)
            .map(|_| {
                let c: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
                LinearEquation::from_i64(&c, rng.random_range(-30..=30))
            })
            .collect();
        FeasibilitySystem::new(names, eqs).unwrap()
    }

    #[test]
    fn agrees_with_brute_force_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let bound = 4;
        for _ in 0..300 {
            let sys = random_system(&mut rng);
            let cert = solve_nonneg(&sys, bound);
            cert.replay(&sys).unwrap();
            let oracle = brute_force(&sys, bound as i64);
            match cert.status {
                FeasibilityStatus::Infeasible | FeasibilityStatus::UnknownUpToBound => assert!(oracle.is_none()),
                FeasibilityStatus::Feasible => assert!(oracle.is_some()),
            }
        }
    }

    #[test]
    fn status_ignores_names_and_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let sys = random_system(&mut rng);
            let n = sys.unknowns().len();
            let status = solve_nonneg(&sys, 3).status;
            let renamed = sys.renamed((0..n).map(|i| format!("y{}", n - i)).collect()).unwrap();
            assert_eq!(solve_nonneg(&renamed, 3).status, status);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.reverse();
            perm.rotate_left(rng.random_range(0..n));
            assert_eq!(solve_nonneg(&sys.permuted(&perm).unwrap(), 3).status, status);
        }
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(7, 2).len(), 21);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
