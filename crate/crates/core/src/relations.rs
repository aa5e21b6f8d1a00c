//! Optimal fidelity as a function of purity and concurrence, per rank case,
//! and the inverse problem: recover `s = sin²θ` from a `(P, C)` target and
//! build a state that realizes it.
//!
//! Every coefficient depends on the angles only through
//! `p = sin²φ sin²ψ` and `f = cosφ sinφ cosψ`. With `s = sin²θ`,
//!
//! - `AB + H = s - d s²` and `G = f² s²`,
//! - so `P = 1 - 2s + 2g s² + 2x + 2y` with `g = d - f²`,
//!
//! and each case below fixes `x` and `y` as functions of `s`, which turns
//! the purity equation into a quadratic (or, for `√y = C/2 + √H`, a quartic
//! after squaring).
//!
//! The `*_fidelity` functions are the closed relations: they take the
//! minus root (falling back to the plus root when the minus root leaves
//! `[0, 1]`) and assume `cos²θ - e sin²θ >= 0`. The `solve_*` functions
//! keep every root that yields a valid state of the right class and report
//! the fidelity that state actually has.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, RejectedRoot, Result};
use crate::metrics::{concurrence_closed, optimal_fidelity_closed, purity_closed};
use crate::poly::{half_quadratic, real_roots, Branch};
use crate::xstate::{angles_from_pf, classify_rank, g_bound, h_bound, AngleCoefficients, RankClass, RankKind, XParams};

/// Roots this far outside `[0, 1]` are clamped onto it.
pub const ROOT_TOL: f64 = 1e-10;
/// Largest `|ΔP|`, `|ΔC|` a surviving root may leave.
pub const BACKSUB_TOL: f64 = 1e-9;
/// Roots whose fidelities differ by less than this count as equally good.
pub const FIDELITY_TIE_TOL: f64 = 1e-12;
/// Below this, `4C²p` is treated as zero and the quartic is not formed.
const QUARTIC_DEGENERATE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "pure")]
    Pure,
    #[serde(rename = "rank2k1")]
    Rank2K1,
    #[serde(rename = "rank2k2")]
    Rank2K2,
    #[serde(rename = "rank2k3")]
    Rank2K3,
    #[serde(rename = "rank3k1")]
    Rank3K1,
    #[serde(rename = "rank3k1_ycase")]
    Rank3K1YCase,
    #[serde(rename = "rank3k2")]
    Rank3K2,
    #[serde(rename = "rank3k2_ycase")]
    Rank3K2YCase,
    #[serde(rename = "rank4_xcase")]
    Rank4XCase,
    #[serde(rename = "rank4_quartic")]
    Rank4Quartic,
    #[serde(rename = "rank4_ycase")]
    Rank4YCase,
}

impl Relation {
    pub const ALL: [Relation; 11] = [
        Relation::Pure,
        Relation::Rank2K1,
        Relation::Rank2K2,
        Relation::Rank2K3,
        Relation::Rank3K1,
        Relation::Rank3K1YCase,
        Relation::Rank3K2,
        Relation::Rank3K2YCase,
        Relation::Rank4XCase,
        Relation::Rank4Quartic,
        Relation::Rank4YCase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Pure => "pure",
            Relation::Rank2K1 => "rank2k1",
            Relation::Rank2K2 => "rank2k2",
            Relation::Rank2K3 => "rank2k3",
            Relation::Rank3K1 => "rank3k1",
            Relation::Rank3K1YCase => "rank3k1_ycase",
            Relation::Rank3K2 => "rank3k2",
            Relation::Rank3K2YCase => "rank3k2_ycase",
            Relation::Rank4XCase => "rank4_xcase",
            Relation::Rank4Quartic => "rank4_quartic",
            Relation::Rank4YCase => "rank4_ycase",
        }
    }

    /// Rank class of every state this relation synthesizes.
    pub fn class(self) -> RankClass {
        match self {
            Relation::Pure => RankClass::new(1, RankKind::Sole),
            Relation::Rank2K1 => RankClass::new(2, RankKind::First),
            Relation::Rank2K2 => RankClass::new(2, RankKind::Second),
            Relation::Rank2K3 => RankClass::new(2, RankKind::Third),
            Relation::Rank3K1 | Relation::Rank3K1YCase => RankClass::new(3, RankKind::First),
            Relation::Rank3K2 | Relation::Rank3K2YCase => RankClass::new(3, RankKind::Second),
            Relation::Rank4XCase | Relation::Rank4Quartic | Relation::Rank4YCase => RankClass::new(4, RankKind::Sole),
        }
    }

    /// Name of the free coherence the relation takes as `aux`, if any.
    pub fn aux(self) -> Option<&'static str> {
        match self {
            Relation::Rank2K3 | Relation::Rank3K2 | Relation::Rank4XCase | Relation::Rank4YCase => Some("y"),
            Relation::Rank3K1YCase | Relation::Rank4Quartic => Some("x"),
            _ => None,
        }
    }

    /// Whether `phi` and `psi` are required. Rank-2 relations pick their own angles.
    pub fn needs_angles(self) -> bool {
        !matches!(self, Relation::Pure | Relation::Rank2K1 | Relation::Rank2K2 | Relation::Rank2K3)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRelation(s.to_string()))
    }
}

/// A `(P, C)` target plus whatever else the relation needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationInput {
    pub relation: Relation,
    pub purity: f64,
    pub concurrence: f64,
    #[serde(default)]
    pub phi: Option<f64>,
    #[serde(default)]
    pub psi: Option<f64>,
    #[serde(default)]
    pub aux: Option<f64>,
}

impl RelationInput {
    pub fn new(relation: Relation, purity: f64, concurrence: f64) -> Self {
        Self { relation, purity, concurrence, phi: None, psi: None, aux: None }
    }

    pub fn with_angles(mut self, phi: f64, psi: f64) -> Self {
        self.phi = Some(phi);
        self.psi = Some(psi);
        self
    }

    pub fn with_aux(mut self, aux: f64) -> Self {
        self.aux = Some(aux);
        self
    }

    fn angles(&self) -> Result<(f64, f64)> {
        let name = self.relation.name();
        let phi = self.phi.ok_or(Error::MissingInput { relation: name, input: "phi" })?;
        let psi = self.psi.ok_or(Error::MissingInput { relation: name, input: "psi" })?;
        Ok((check_angle("phi", phi)?, check_angle("psi", psi)?))
    }

    fn aux_value(&self) -> Result<f64> {
        let input = self.relation.aux().unwrap_or("aux");
        let v = self.aux.ok_or(Error::MissingInput { relation: self.relation.name(), input })?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::OutOfRange { name: "aux", value: v, lo: 0.0, hi: f64::INFINITY });
        }
        Ok(v)
    }

    fn preferred_angles(&self) -> Option<(f64, f64)> {
        self.phi.zip(self.psi)
    }
}

fn check_angle(name: &'static str, v: f64) -> Result<f64> {
    if !v.is_finite() || !(-ROOT_TOL..=FRAC_PI_2 + ROOT_TOL).contains(&v) {
        return Err(Error::OutOfRange { name, value: v, lo: 0.0, hi: FRAC_PI_2 });
    }
    Ok(v.clamp(0.0, FRAC_PI_2))
}

fn check_targets(purity: f64, conc: f64) -> Result<()> {
    if !purity.is_finite() || !(0.25 - ROOT_TOL..=1.0 + ROOT_TOL).contains(&purity) {
        return Err(Error::OutOfRange { name: "purity", value: purity, lo: 0.25, hi: 1.0 });
    }
    if !conc.is_finite() || !(-ROOT_TOL..=1.0 + ROOT_TOL).contains(&conc) {
        return Err(Error::OutOfRange { name: "concurrence", value: conc, lo: 0.0, hi: 1.0 });
    }
    Ok(())
}

fn in_unit(s: f64) -> Option<f64> {
    (-ROOT_TOL..=1.0 + ROOT_TOL).contains(&s).then(|| s.clamp(0.0, 1.0))
}

fn raw_rejections(roots: &[(f64, Branch)], reason: &str) -> Vec<RejectedRoot> {
    roots
        .iter()
        .map(|&(s, b)| RejectedRoot { sin2theta: s, branch: b.to_string(), residual: f64::NAN, reason: reason.to_string() })
        .collect()
}

/// The minus root if it lies in `[0, 1]`, otherwise the plus root.
fn formula_root(roots: &[(f64, Branch)], what: &str) -> Result<(f64, Branch)> {
    let pick = |want_plus: bool| roots.iter().find(|(s, b)| (*b == Branch::Plus) == want_plus && in_unit(*s).is_some());
    pick(false)
        .or_else(|| pick(true))
        .map(|&(s, b)| (in_unit(s).unwrap_or(s), b))
        .ok_or_else(|| Error::infeasible(format!("{what} has no root in [0, 1]"), raw_rejections(roots, "outside [0, 1]")))
}

/// `(4 + 2C - (1 + e - 4f) s) / 6`, fidelity when `x` carries the concurrence and dominates.
fn xcase_formula(conc: f64, co: &AngleCoefficients, s: f64) -> f64 {
    (4.0 + 2.0 * conc - (1.0 + co.e - 4.0 * co.f) * s) / 6.0
}

/// `(2 + C) / 3`
pub fn pure_fidelity(conc: f64) -> Result<f64> {
    check_targets(1.0, conc)?;
    Ok((2.0 + conc) / 3.0)
}

/// Rank 2. The first two kinds do not depend on purity; the third needs `P >= 1/2`.
pub fn rank2_fidelity(kind: RankKind, conc: f64, purity: f64, y: f64) -> Result<f64> {
    check_targets(purity, conc)?;
    match kind {
        RankKind::First | RankKind::Second => Ok((2.0 + conc) / 3.0),
        RankKind::Third => {
            if purity < 0.5 {
                return Err(Error::Domain(format!("rank-2 third-kind states need P >= 1/2 for a real sin²θ, got P = {purity}")));
            }
            if y < 0.0 {
                return Err(Error::OutOfRange { name: "y", value: y, lo: 0.0, hi: f64::INFINITY });
            }
            Ok((4.0 + 2.0 * conc + 4.0 * y.sqrt() - 1.0 + (2.0 * purity - 1.0).sqrt()) / 6.0)
        }
        RankKind::Sole => Err(Error::Domain("rank 2 has kinds first, second and third only".into())),
    }
}

/// `s = (-1 ± √(2P - 1)) / (2r)` with `r = p - 1`, for `x = H`, `y = G`.
pub fn v_roots(purity: f64, phi: f64, psi: f64) -> Result<Vec<(f64, Branch)>> {
    if purity < 0.5 {
        return Err(Error::Domain(format!("rank-2 third-kind states need P >= 1/2 for a real sin²θ, got P = {purity}")));
    }
    let r = AngleCoefficients::new(phi, psi).r;
    if r.abs() < 1e-12 {
        return Err(Error::Domain("sin²φ sin²ψ = 1 leaves sin²θ undetermined".into()));
    }
    let root = (2.0 * purity - 1.0).sqrt();
    if root == 0.0 {
        return Ok(vec![(-1.0 / (2.0 * r), Branch::Double)]);
    }
    Ok(vec![((-1.0 + root) / (2.0 * r), Branch::Plus), ((-1.0 - root) / (2.0 * r), Branch::Minus)])
}

/// Rank 3, first kind (`y = G`, `√x = C/2 + f s`):
/// `(2d + 2f²) s² - 2(1 - fC) s + (1 - P + C²/2) = 0`.
pub fn v1_roots(purity: f64, conc: f64, phi: f64, psi: f64) -> Vec<(f64, Branch)> {
    let co = AngleCoefficients::new(phi, psi);
    half_quadratic(2.0 * co.d + 2.0 * co.f * co.f, 1.0 - co.f * conc, 1.0 - purity + 0.5 * conc * conc)
}

/// Rank 3, first kind with `x` given: `2d s² - 2s + (1 + 2x - P) = 0`.
pub fn v2_roots(purity: f64, x: f64, phi: f64, psi: f64) -> Vec<(f64, Branch)> {
    let co = AngleCoefficients::new(phi, psi);
    half_quadratic(2.0 * co.d, 1.0, 1.0 + 2.0 * x - purity)
}

/// Rank 3, second kind (`x = H`, `y` given): `2u s² - 2t s + (1 + 2y - P) = 0`.
pub fn v3_roots(purity: f64, y: f64, phi: f64, psi: f64) -> Vec<(f64, Branch)> {
    let co = AngleCoefficients::new(phi, psi);
    half_quadratic(2.0 * co.u, co.t, 1.0 + 2.0 * y - purity)
}

/// Rank 4 with `√x = C/2 + f s` and `y` given:
/// `(2g + 2f²) s² - 2(1 - fC) s + (1 - P + 2y + C²/2) = 0`.
/// Shared by the relation where `x` dominates and the one where `y` does.
pub fn v4_roots(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Vec<(f64, Branch)> {
    let co = AngleCoefficients::new(phi, psi);
    half_quadratic(2.0 * co.g + 2.0 * co.f * co.f, 1.0 - co.f * conc, 1.0 - purity + 2.0 * y + 0.5 * conc * conc)
}

/// Squares `a s² + b s + k = -2C√p √(s(1 - s))` into a quartic, highest degree first.
pub fn quartic_coefficients(a: f64, b: f64, k: f64, conc: f64, p: f64) -> [f64; 5] {
    let w = 4.0 * conc * conc * p;
    [a * a, 2.0 * a * b, b * b + 2.0 * a * k + w, 2.0 * b * k - w, k * k]
}

fn rank3_kind1_eval(purity: f64, conc: f64, phi: f64, psi: f64) -> Result<(f64, f64, Branch)> {
    check_targets(purity, conc)?;
    let (s, b) = formula_root(&v1_roots(purity, conc, phi, psi), "rank-3 first-kind quadratic")?;
    Ok((xcase_formula(conc, &AngleCoefficients::new(phi, psi), s), s, b))
}

/// `(4 + 2C - (1 + e - 4f) s) / 6` at the minus root of [`v1_roots`].
pub fn rank3_kind1_fidelity(purity: f64, conc: f64, phi: f64, psi: f64) -> Result<f64> {
    Ok(rank3_kind1_eval(purity, conc, phi, psi)?.0)
}

fn rank3_kind1_ycase_eval(purity: f64, conc: f64, x: f64, phi: f64, psi: f64) -> Result<(f64, f64, Branch)> {
    check_targets(purity, conc)?;
    let co = AngleCoefficients::new(phi, psi);
    let roots = v2_roots(purity, x, phi, psi);
    roots
        .iter()
        .filter_map(|&(s, b)| in_unit(s).map(|s| (s, b)))
        .map(|(s, b)| ((4.0 + 2.0 * conc + 4.0 * co.fprime * (s * (1.0 - s)).sqrt() - (1.0 + co.e) * s) / 6.0, s, b))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::infeasible("rank-3 first-kind quadratic (x given) has no root in [0, 1]", raw_rejections(&roots, "outside [0, 1]")))
}

/// `(4 + 2C + 4f′√(s(1 - s)) - (1 + e) s) / 6` at the better root of [`v2_roots`].
pub fn rank3_kind1_fidelity_ycase(purity: f64, conc: f64, x: f64, phi: f64, psi: f64) -> Result<f64> {
    Ok(rank3_kind1_ycase_eval(purity, conc, x, phi, psi)?.0)
}

fn rank3_kind2_eval(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<(f64, f64, Branch)> {
    check_targets(purity, conc)?;
    let (s, b) = formula_root(&v3_roots(purity, y, phi, psi), "rank-3 second-kind quadratic")?;
    Ok((xcase_formula(conc, &AngleCoefficients::new(phi, psi), s), s, b))
}

/// `(4 + 2C - (1 + e - 4f) s) / 6` at the minus root of [`v3_roots`].
pub fn rank3_kind2_fidelity(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<f64> {
    Ok(rank3_kind2_eval(purity, conc, y, phi, psi)?.0)
}

fn rank4_xcase_eval(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<(f64, f64, Branch)> {
    check_targets(purity, conc)?;
    let (s, b) = formula_root(&v4_roots(purity, conc, y, phi, psi), "rank-4 quadratic")?;
    Ok((xcase_formula(conc, &AngleCoefficients::new(phi, psi), s), s, b))
}

/// `(4 + 2C - (1 + e - 4f) s) / 6` at the minus root of [`v4_roots`].
pub fn rank4_fidelity_xcase(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<f64> {
    Ok(rank4_xcase_eval(purity, conc, y, phi, psi)?.0)
}

fn rank4_ycase_eval(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<(f64, f64, Branch)> {
    check_targets(purity, conc)?;
    let (s, b) = formula_root(&v4_roots(purity, conc, y, phi, psi), "rank-4 quadratic")?;
    let co = AngleCoefficients::new(phi, psi);
    Ok(((4.0 + 4.0 * y.sqrt() - (1.0 + co.e) * s) / 6.0, s, b))
}

/// `(4 + 4√y - (1 + e) s) / 6` at the minus root of [`v4_roots`], for states
/// whose concurrence comes from `x` while `y` is the larger coherence.
pub fn rank4_fidelity_ycase_xconc(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<f64> {
    Ok(rank4_ycase_eval(purity, conc, y, phi, psi)?.0)
}

/// A root that produced a valid state of the relation's class and hits the target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvedRoot {
    /// The solved variable: `sin²θ`, or `sin²φ` for the rank-2 second kind.
    pub root: f64,
    pub branch: Branch,
    pub params: XParams,
    /// Optimal fidelity of `params`.
    pub fidelity: f64,
    /// `max(|ΔP|, |ΔC|)` after substituting back.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseSolveResult {
    pub relation: Relation,
    pub roots: Vec<SolvedRoot>,
    pub optimal_fidelity: f64,
    pub chosen_root: usize,
    pub rejected: Vec<RejectedRoot>,
}

impl InverseSolveResult {
    pub fn chosen(&self) -> &SolvedRoot {
        &self.roots[self.chosen_root]
    }
}

struct Candidate {
    root: f64,
    branch: Branch,
    /// `None` when the root lies outside `[0, 1]`.
    params: Option<Result<XParams>>,
    /// Reason to give if back-substitution fails.
    on_miss: &'static str,
}

fn theta_of(s: f64) -> f64 {
    s.clamp(0.0, 1.0).sqrt().asin()
}

fn candidates<F>(roots: &[(f64, Branch)], mut build: F) -> Vec<Candidate>
where
    F: FnMut(f64) -> Result<XParams>,
{
    roots
        .iter()
        .map(|&(root, branch)| Candidate { root, branch, params: in_unit(root).map(&mut build), on_miss: "misses the (P, C) target" })
        .collect()
}

fn finish(
    relation: Relation,
    purity: f64,
    conc: Option<f64>,
    prefer: Option<(f64, f64)>,
    cands: Vec<Candidate>,
) -> Result<InverseSolveResult> {
    let class = relation.class();
    let mut roots = Vec::new();
    let mut rejected = Vec::new();
    for cand in cands {
        let mut reject = |reason: String, residual: f64| {
            rejected.push(RejectedRoot { sin2theta: cand.root, branch: cand.branch.to_string(), residual, reason });
        };
        let params = match cand.params {
            None => {
                reject("outside [0, 1]".into(), f64::NAN);
                continue;
            }
            Some(Err(e)) => {
                reject(e.to_string(), f64::NAN);
                continue;
            }
            Some(Ok(p)) => p,
        };
        let dp = (purity_closed(&params) - purity).abs();
        let dc = conc.map_or(0.0, |c| (concurrence_closed(&params) - c).abs());
        let residual = dp.max(dc);
        if residual.is_nan() || residual > BACKSUB_TOL {
            reject(cand.on_miss.into(), residual);
            continue;
        }
        match classify_rank(&params) {
            Ok(c) if c == class => {}
            Ok(c) => {
                reject(format!("state is {c}, expected {class}"), residual);
                continue;
            }
            Err(e) => {
                reject(e.to_string(), residual);
                continue;
            }
        }
        roots.push(SolvedRoot { root: cand.root, branch: cand.branch, params, fidelity: optimal_fidelity_closed(&params), residual });
    }
    if roots.is_empty() {
        return Err(Error::infeasible(format!("no root of the {relation} relation gives a valid {class} state"), rejected));
    }
    let optimal_fidelity = roots.iter().map(|r| r.fidelity).fold(f64::NEG_INFINITY, f64::max);
    // Among equally good roots: nearest to the preferred angles, else smallest (θ, φ).
    let key = |r: &SolvedRoot| match prefer {
        Some((phi, psi)) => ((r.params.phi - phi).abs() + (r.params.psi - psi).abs(), 0.0),
        None => (r.params.theta, r.params.phi),
    };
    let chosen_root = roots
        .iter()
        .enumerate()
        .filter(|(_, r)| r.fidelity >= optimal_fidelity - FIDELITY_TIE_TOL)
        .min_by(|(_, a), (_, b)| {
            let (ka, kb) = (key(a), key(b));
            ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(InverseSolveResult { relation, roots, optimal_fidelity, chosen_root, rejected })
}

/// Pure states `cos t|00> + sin t|11>`; needs `P = 1`.
pub fn solve_pure(purity: f64, conc: f64) -> Result<InverseSolveResult> {
    check_targets(purity, conc)?;
    let roots = half_quadratic(2.0, 1.0, 0.5 * conc * conc);
    let cands = candidates(&roots, |s| {
        let theta = theta_of(s);
        XParams::new(theta, FRAC_PI_2, FRAC_PI_2, h_bound(theta, FRAC_PI_2, FRAC_PI_2), 0.0, 0.0, 0.0)
    });
    finish(Relation::Pure, purity, Some(conc), None, cands)
}

/// Rank 2, first kind (support on |00>, |11>) or second kind (|01>, |10>):
/// the block populations solve `2s² - 2s + (1 + C²/2 - P) = 0`.
pub fn solve_rank2_block(kind: RankKind, purity: f64, conc: f64) -> Result<InverseSolveResult> {
    check_targets(purity, conc)?;
    let roots = half_quadratic(2.0, 1.0, 1.0 + 0.5 * conc * conc - purity);
    let coherence = 0.25 * conc * conc;
    let (relation, cands) = match kind {
        RankKind::First => (
            Relation::Rank2K1,
            candidates(&roots, |s| XParams::new(theta_of(s), FRAC_PI_2, FRAC_PI_2, coherence, 0.0, 0.0, 0.0)),
        ),
        RankKind::Second => (
            Relation::Rank2K2,
            candidates(&roots, |w| XParams::new(FRAC_PI_2, theta_of(w), 0.0, 0.0, coherence, 0.0, 0.0)),
        ),
        _ => return Err(Error::Domain("block solver handles the first and second kinds only".into())),
    };
    finish(relation, purity, Some(conc), None, cands)
}

/// Rank 2, third kind at fixed angles: `x = H`, `y = G`, `s` from [`v_roots`].
/// Only purity is targeted; concurrence follows from the angles.
pub fn solve_theta_rank2k3(purity: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    check_targets(purity, 0.0)?;
    let roots = v_roots(purity, phi, psi)?;
    let cands = candidates(&roots, |s| {
        let theta = theta_of(s);
        XParams::new(theta, phi, psi, h_bound(theta, phi, psi), g_bound(theta, phi, psi), 0.0, 0.0)
    });
    finish(Relation::Rank2K3, purity, None, Some((phi, psi)), cands)
}

/// Rank 2, third kind from `(P, C, y)`: the angles are free, so they are solved for.
///
/// With `A = s(1 - p)` fixed by `(1 - 2A)² = 2P - 1` and `x = H = (C/2 + √y)²`,
/// `s² - (1 + A)s + (A + x) = 0`; then `p = 1 - A/s`, `f = √y / s`.
pub fn synthesize_rank2k3(purity: f64, conc: f64, y: f64, prefer: Option<(f64, f64)>) -> Result<InverseSolveResult> {
    rank2_fidelity(RankKind::Third, conc, purity, y)?;
    let root = (2.0 * purity - 1.0).sqrt();
    let x = (0.5 * conc + y.sqrt()).powi(2);
    let mut weights = vec![0.5 * (1.0 - root)];
    if root > 0.0 {
        weights.push(0.5 * (1.0 + root));
    }
    let mut cands = Vec::new();
    for a in weights {
        for (s, branch) in half_quadratic(1.0, 0.5 * (1.0 + a), a + x) {
            let Some(sc) = in_unit(s).filter(|&v| v > 0.0) else {
                cands.push(Candidate { root: s, branch, params: None, on_miss: "" });
                continue;
            };
            match angles_from_pf(1.0 - a / sc, y.sqrt() / sc) {
                Err(e) => cands.push(Candidate { root: s, branch, params: Some(Err(e)), on_miss: "" }),
                Ok(fibers) => {
                    for (phi, psi) in fibers {
                        let theta = theta_of(sc);
                        let params = XParams::new(theta, phi, psi, h_bound(theta, phi, psi), g_bound(theta, phi, psi), 0.0, 0.0);
                        cands.push(Candidate { root: s, branch, params: Some(params), on_miss: "misses the (P, C) target" });
                    }
                }
            }
        }
    }
    finish(Relation::Rank2K3, purity, Some(conc), prefer, cands)
}

/// Rank 3, first kind: `y = G`, `√x = C/2 + f s`, `s` from [`v1_roots`].
pub fn solve_rank3_kind1(purity: f64, conc: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    check_targets(purity, conc)?;
    let f = AngleCoefficients::new(phi, psi).f;
    let cands = candidates(&v1_roots(purity, conc, phi, psi), |s| {
        let theta = theta_of(s);
        XParams::new(theta, phi, psi, (0.5 * conc + f * s).powi(2), g_bound(theta, phi, psi), 0.0, 0.0)
    });
    finish(Relation::Rank3K1, purity, Some(conc), None, cands)
}

/// Rank 3, first kind with `x` given: `y = G`, `s` from [`v2_roots`]. The
/// concurrence is then fixed by `s`; roots that miss `C` are rejected.
pub fn solve_rank3_kind1_ycase(purity: f64, conc: f64, x: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    check_targets(purity, conc)?;
    let cands = candidates(&v2_roots(purity, x, phi, psi), |s| {
        let theta = theta_of(s);
        XParams::new(theta, phi, psi, x, g_bound(theta, phi, psi), 0.0, 0.0)
    });
    finish(Relation::Rank3K1YCase, purity, Some(conc), None, cands)
}

/// Rank 3, second kind: `x = H`, `y` given, `s` from [`v3_roots`].
pub fn solve_rank3_kind2(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    check_targets(purity, conc)?;
    let cands = candidates(&v3_roots(purity, y, phi, psi), |s| {
        let theta = theta_of(s);
        XParams::new(theta, phi, psi, h_bound(theta, phi, psi), y, 0.0, 0.0)
    });
    finish(Relation::Rank3K2, purity, Some(conc), None, cands)
}

fn rank4_quadratic(relation: Relation, purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    check_targets(purity, conc)?;
    let f = AngleCoefficients::new(phi, psi).f;
    let cands = candidates(&v4_roots(purity, conc, y, phi, psi), |s| {
        XParams::new(theta_of(s), phi, psi, (0.5 * conc + f * s).powi(2), y, 0.0, 0.0)
    });
    finish(relation, purity, Some(conc), None, cands)
}

/// Rank 4 with `√x = C/2 + f s` and `y` given, `s` from [`v4_roots`].
pub fn solve_rank4_xcase(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    rank4_quadratic(Relation::Rank4XCase, purity, conc, y, phi, psi)
}

/// Same roots as [`solve_rank4_xcase`]; paired with the relation in which `y` dominates.
pub fn solve_rank4_ycase(purity: f64, conc: f64, y: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    rank4_quadratic(Relation::Rank4YCase, purity, conc, y, phi, psi)
}

/// Roots of `a s² + b s + k + 2C√p √(s(1 - s)) = 0`: the quartic from
/// squaring, or the bare quadratic when `4C²p` vanishes.
fn quartic_candidates<F>(a: f64, b: f64, k: f64, conc: f64, p: f64, build: F) -> Vec<Candidate>
where
    F: FnMut(f64) -> Result<XParams>,
{
    if 4.0 * conc * conc * p < QUARTIC_DEGENERATE {
        return candidates(&half_quadratic(a, -0.5 * b, k), build);
    }
    let roots: Vec<(f64, Branch)> = real_roots(&quartic_coefficients(a, b, k, conc, p)).into_iter().map(|s| (s, Branch::Real)).collect();
    let mut cands = candidates(&roots, build);
    for c in cands.iter_mut() {
        if a * c.root * c.root + b * c.root + k > 0.0 {
            c.on_miss = "spurious root introduced by squaring";
        }
    }
    cands
}

/// Rank 4 with `√y = C/2 + f′√(s(1 - s))` and `x` given.
pub fn rank4_quartic_solve(purity: f64, conc: f64, x: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    check_targets(purity, conc)?;
    let co = AngleCoefficients::new(phi, psi);
    let k = 1.0 + 2.0 * x + 0.5 * conc * conc - purity;
    let cands = quartic_candidates(co.alpha, co.beta, k, conc, co.p, |s| {
        let y = (0.5 * conc + co.fprime * (s * (1.0 - s)).sqrt()).powi(2);
        XParams::new(theta_of(s), phi, psi, x, y, 0.0, 0.0)
    });
    finish(Relation::Rank4Quartic, purity, Some(conc), None, cands)
}

/// Rank 3, second kind with the concurrence carried by `y`: `x = H` and
/// `√y = C/2 + f′√(s(1 - s))`. Same quartic as [`rank4_quartic_solve`] with
/// `x = H(s)` folded into the coefficients.
pub fn solve_rank3_kind2_ycase(purity: f64, conc: f64, phi: f64, psi: f64) -> Result<InverseSolveResult> {
    check_targets(purity, conc)?;
    let co = AngleCoefficients::new(phi, psi);
    let k = 1.0 + 0.5 * conc * conc - purity;
    let cands = quartic_candidates(co.alpha - 2.0 * co.p, co.beta + 2.0 * co.p, k, conc, co.p, |s| {
        let theta = theta_of(s);
        let y = (0.5 * conc + co.fprime * (s * (1.0 - s)).sqrt()).powi(2);
        XParams::new(theta, phi, psi, h_bound(theta, phi, psi), y, 0.0, 0.0)
    });
    finish(Relation::Rank3K2YCase, purity, Some(conc), None, cands)
}

/// Runs the solver for `input.relation`.
pub fn solve(input: &RelationInput) -> Result<InverseSolveResult> {
    let (pur, conc) = (input.purity, input.concurrence);
    match input.relation {
        Relation::Pure => solve_pure(pur, conc),
        Relation::Rank2K1 => solve_rank2_block(RankKind::First, pur, conc),
        Relation::Rank2K2 => solve_rank2_block(RankKind::Second, pur, conc),
        Relation::Rank2K3 => synthesize_rank2k3(pur, conc, input.aux_value()?, input.preferred_angles()),
        Relation::Rank3K1 => {
            let (phi, psi) = input.angles()?;
            solve_rank3_kind1(pur, conc, phi, psi)
        }
        Relation::Rank3K1YCase => {
            let (phi, psi) = input.angles()?;
            solve_rank3_kind1_ycase(pur, conc, input.aux_value()?, phi, psi)
        }
        Relation::Rank3K2 => {
            let (phi, psi) = input.angles()?;
            solve_rank3_kind2(pur, conc, input.aux_value()?, phi, psi)
        }
        Relation::Rank3K2YCase => {
            let (phi, psi) = input.angles()?;
            solve_rank3_kind2_ycase(pur, conc, phi, psi)
        }
        Relation::Rank4XCase => {
            let (phi, psi) = input.angles()?;
            solve_rank4_xcase(pur, conc, input.aux_value()?, phi, psi)
        }
        Relation::Rank4YCase => {
            let (phi, psi) = input.angles()?;
            solve_rank4_ycase(pur, conc, input.aux_value()?, phi, psi)
        }
        Relation::Rank4Quartic => {
            let (phi, psi) = input.angles()?;
            rank4_quartic_solve(pur, conc, input.aux_value()?, phi, psi)
        }
    }
}

/// A state realizing the target: the solver's chosen root, with `μ = ν = 0`.
pub fn synthesize_state(input: &RelationInput) -> Result<XParams> {
    Ok(solve(input)?.chosen().params)
}

/// The closed relation's fidelity paired with the valid state at the root it used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub fidelity: f64,
    pub root: SolvedRoot,
}

fn matching_root(result: InverseSolveResult, s: f64, fidelity: f64) -> Result<Evaluation> {
    let InverseSolveResult { roots, rejected, .. } = result;
    roots
        .into_iter()
        .find(|r| in_unit(r.root).is_some_and(|v| (v - s).abs() <= 1e-12))
        .map(|root| Evaluation { fidelity, root })
        .ok_or_else(|| Error::infeasible(format!("the root s = {s} used by the relation gives no valid state"), rejected))
}

/// Closed relation for `input.relation`, together with the state it describes.
///
/// Relations without a displayed closed form (the quartic cases) report the
/// fidelity of the solver's chosen root.
pub fn evaluate(input: &RelationInput) -> Result<Evaluation> {
    let (pur, conc) = (input.purity, input.concurrence);
    let with_chosen = |fidelity: f64| -> Result<Evaluation> {
        let result = solve(input)?;
        Ok(Evaluation { fidelity, root: result.chosen().clone() })
    };
    match input.relation {
        Relation::Pure => with_chosen(pure_fidelity(conc)?),
        Relation::Rank2K1 => with_chosen(rank2_fidelity(RankKind::First, conc, pur, 0.0)?),
        Relation::Rank2K2 => with_chosen(rank2_fidelity(RankKind::Second, conc, pur, 0.0)?),
        Relation::Rank2K3 => with_chosen(rank2_fidelity(RankKind::Third, conc, pur, input.aux_value()?)?),
        Relation::Rank3K2YCase | Relation::Rank4Quartic => {
            let result = solve(input)?;
            let root = result.chosen().clone();
            Ok(Evaluation { fidelity: root.fidelity, root })
        }
        rel => {
            let (phi, psi) = input.angles()?;
            let (fidelity, s, _) = match rel {
                Relation::Rank3K1 => rank3_kind1_eval(pur, conc, phi, psi)?,
                Relation::Rank3K1YCase => rank3_kind1_ycase_eval(pur, conc, input.aux_value()?, phi, psi)?,
                Relation::Rank3K2 => rank3_kind2_eval(pur, conc, input.aux_value()?, phi, psi)?,
                Relation::Rank4XCase => rank4_xcase_eval(pur, conc, input.aux_value()?, phi, psi)?,
                _ => rank4_ycase_eval(pur, conc, input.aux_value()?, phi, psi)?,
            };
            matching_root(solve(input)?, s, fidelity)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::report;
    use crate::xstate::to_density;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    #[test]
    fn pure_and_block_relations() {
        assert_eq!(pure_fidelity(1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(pure_fidelity(0.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pure_fidelity(0.5).unwrap(), 5.0 / 6.0, epsilon = 1e-15);
        assert!(pure_fidelity(1.5).is_err());
        assert_abs_diff_eq!(rank2_fidelity(RankKind::First, 0.4, 0.3, 0.0).unwrap(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(rank2_fidelity(RankKind::First, 0.4, 0.9, 0.0).unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn rank2_third_kind_examples() {
        let f1 = rank2_fidelity(RankKind::Third, 0.2, 0.6, 0.001).unwrap();
        let f2 = rank2_fidelity(RankKind::Third, 0.15, 0.7, 0.001).unwrap();
        assert_abs_diff_eq!(f1, 0.66228, epsilon = 5e-5);
        assert_abs_diff_eq!(f2, 0.67649, epsilon = 5e-5);
        assert!(f2 > f1);
        assert!(matches!(rank2_fidelity(RankKind::Third, 0.2, 0.49, 0.001), Err(Error::Domain(_))));
    }

    #[test]
    fn v_roots_edges() {
        let r = v_roots(0.5, FRAC_PI_4, FRAC_PI_4).unwrap();
        let rr = AngleCoefficients::new(FRAC_PI_4, FRAC_PI_4).r;
        assert_eq!(r, vec![(-1.0 / (2.0 * rr), Branch::Double)]);
        // r = -1/4 at φ = π/2, ψ = π/3: roots {0, 4}.
        let r = v_roots(1.0, FRAC_PI_2, FRAC_PI_3).unwrap();
        assert_abs_diff_eq!(r[0].0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1].0, 4.0, epsilon = 1e-12);
        assert!(v_roots(0.4999, 0.3, 0.3).is_err());
        // Worked example angles: one root sits at θ ≈ 0.5809.
        let r = v_roots(0.6, 0.3124, 1.2036).unwrap();
        assert!(r.iter().any(|(s, _)| (s.sqrt().asin() - 0.5809).abs() < 1e-3), "{r:?}");
    }

    #[test]
    fn solve_theta_rank2k3_round_trip() {
        assert!(solve_theta_rank2k3(0.45, 0.3, 0.3).unwrap_err().is_infeasible());
        let res = solve_theta_rank2k3(0.6, 0.3124, 1.2036).unwrap();
        for root in &res.roots {
            assert_abs_diff_eq!(report(&root.params).unwrap().purity_oracle, 0.6, epsilon = 1e-12);
        }
        let only_zero = solve_theta_rank2k3(1.0, FRAC_PI_2, FRAC_PI_3);
        // s = 0 is |00>, which is rank 1, and s = 4 is outside [0, 1].
        assert!(only_zero.unwrap_err().is_infeasible());
    }

    #[test]
    fn rank2k3_synthesis_example() {
        let input = RelationInput::new(Relation::Rank2K3, 0.6, 0.2).with_aux(0.001);
        let p = synthesize_state(&input).unwrap();
        assert_abs_diff_eq!(p.theta, 0.5809, epsilon = 1e-3);
        assert_abs_diff_eq!(p.phi, 0.3124, epsilon = 1e-3);
        assert_abs_diff_eq!(p.psi, 1.2036, epsilon = 1e-3);
        let r = report(&p).unwrap();
        assert_abs_diff_eq!(r.purity_oracle, 0.6, epsilon = 1e-9);
        assert_abs_diff_eq!(r.concurrence_oracle, 0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(r.fidelity_oracle, rank2_fidelity(RankKind::Third, 0.2, 0.6, 0.001).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn rank2_second_kind_synthesizes_gamma1() {
        let input = RelationInput::new(Relation::Rank2K2, 5.0 / 9.0, 1.0 / 3.0);
        let p = synthesize_state(&input).unwrap();
        let gamma1 = XParams::new(FRAC_PI_2, FRAC_PI_4, 0.0, 0.0, 1.0 / 36.0, 0.0, PI).unwrap();
        let (a, b) = (to_density(&p), to_density(&gamma1));
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(a.entry(i, j).norm(), b.entry(i, j).norm(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bell_target_synthesizes_a_bell_state() {
        let p = synthesize_state(&RelationInput::new(Relation::Pure, 1.0, 1.0)).unwrap();
        let r = report(&p).unwrap();
        assert_abs_diff_eq!(r.fidelity_oracle, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.uhlmann_oracle, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rank3_first_kind_examples() {
        let (p, c) = (0.6, 0.2);
        let f = rank3_kind1_fidelity(p, c, FRAC_PI_4, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(f, 0.68981, epsilon = 5e-5);
        assert_abs_diff_eq!(f, (10.0 + 6.0 * c + (6.0 * p - 3.0 * c * c - 2.0f64).sqrt()) / 18.0, epsilon = 1e-12);
        let g = rank3_kind1_fidelity(0.64, 0.22, FRAC_PI_2, 2.0 * PI / 25.0).unwrap();
        assert_abs_diff_eq!(g, 0.6612, epsilon = 5e-4);
        assert!(f > g);
        // That second target needs x > H, so no valid state realizes it.
        assert!(solve_rank3_kind1(0.64, 0.22, FRAC_PI_2, 2.0 * PI / 25.0).unwrap_err().is_infeasible());
        let res = solve_rank3_kind1(p, c, FRAC_PI_4, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(res.optimal_fidelity, f, epsilon = 1e-12);
    }

    #[test]
    fn rank3_first_kind_bell_limit() {
        assert_abs_diff_eq!(rank3_kind1_fidelity(1.0, 1.0, FRAC_PI_2, FRAC_PI_2).unwrap(), 1.0, epsilon = 1e-12);
        let (s, _) = formula_root(&v1_roots(1.0, 1.0, FRAC_PI_2, FRAC_PI_2), "v1").unwrap();
        assert_abs_diff_eq!(s, 0.5, epsilon = 1e-12);
        let theta = theta_of(s);
        let bell = XParams::new(theta, FRAC_PI_2, FRAC_PI_2, 0.25, 0.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(report(&bell).unwrap().fidelity_oracle, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rank3_first_kind_ycase_examples() {
        let d = AngleCoefficients::new(0.7, 0.9).d;
        let r = v2_roots(1.0, 0.0, 0.7, 0.9);
        assert_abs_diff_eq!(r[0].0, 1.0 / d, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rank3_kind1_fidelity_ycase(1.0, 0.3, 0.0, 0.7, 0.9).unwrap(), (2.0 + 0.3) / 3.0, epsilon = 1e-12);
        // Zero discriminant: 1 + 2x - P = 1/(2d).
        let x = 0.01;
        let purity = 1.0 + 2.0 * x - 1.0 / (2.0 * d);
        let r = v2_roots(purity, x, 0.7, 0.9);
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0].0, 1.0 / (2.0 * d), epsilon = 1e-12);
        // φ = ψ = π/2 forces y = G = 0, so only C = 0 is reachable.
        let f = rank3_kind1_fidelity_ycase(0.7, 0.0, 0.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        let s = (1.0 - (2.0f64 * 0.7 - 1.0).sqrt()) / 2.0;
        assert_abs_diff_eq!(f, (4.0 + 4.0 * (s * (1.0 - s)).sqrt() + 0.0 * s) / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn rank3_second_kind_edges() {
        // Pure limit: P = 1, y = 0 has root s = 0.
        let r = v3_roots(1.0, 0.0, 0.6, 0.8);
        assert!(r.iter().any(|(s, _)| s.abs() < 1e-15));
        assert_abs_diff_eq!(rank3_kind2_fidelity(1.0, 0.1, 0.0, 0.6, 0.8).unwrap(), 2.1 / 3.0, epsilon = 1e-12);
        // u = t² - f² vanishes only as p -> 1; near there the quadratic degrades to its linear root.
        let psi = (1.0f64 - 1e-7).sqrt().asin();
        let co = AngleCoefficients::new(FRAC_PI_2, psi);
        assert!(co.u.abs() < 1e-13);
        let r = v3_roots(0.7, 0.05, FRAC_PI_2, psi);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, Branch::Linear);
        approx::assert_relative_eq!(r[0].0, (1.0 + 0.1 - 0.7) / (2.0 * co.t), max_relative = 1e-6);
    }

    #[test]
    fn rank4_xcase_examples() {
        let (phi, psi) = (FRAC_PI_4, FRAC_PI_4);
        let input = RelationInput::new(Relation::Rank4XCase, 0.7, 0.2).with_angles(phi, psi).with_aux(0.0);
        let ev = evaluate(&input).unwrap();
        let oracle = report(&ev.root.params).unwrap();
        assert_abs_diff_eq!(ev.fidelity, oracle.fidelity_oracle, epsilon = 1e-9);
        assert_abs_diff_eq!(oracle.purity_oracle, 0.7, epsilon = 1e-9);
        assert_abs_diff_eq!(oracle.concurrence_oracle, 0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(rank4_fidelity_xcase(1.0, 0.0, 0.0, phi, psi).unwrap(), 2.0 / 3.0, epsilon = 1e-12);

        // At fixed (P, C) a larger y pushes the minus root up, and 1 + e - 4f > 0 here,
        // so F falls. Each grid point is checked against the oracle.
        let mut last = f64::INFINITY;
        for i in 0..4 {
            let y = 0.002 * i as f64;
            let ev = evaluate(&input.with_aux(y)).unwrap();
            assert_abs_diff_eq!(ev.fidelity, report(&ev.root.params).unwrap().fidelity_oracle, epsilon = 1e-9);
            assert!(ev.fidelity < last);
            last = ev.fidelity;
        }
    }

    #[test]
    fn rank4_ycase_relation_edges() {
        // e = -1 kills the s term.
        let f = rank4_fidelity_ycase_xconc(0.9, 0.2, 0.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(f, 2.0 / 3.0, epsilon = 1e-15);
        // P = 1, C = y = 0 puts the minus root at 0: F = (4 + 4√y)/6 = 2/3.
        let r = v4_roots(1.0, 0.0, 0.0, 0.6, 0.8);
        assert!(r.iter().any(|&(s, b)| b == Branch::Minus && s.abs() < 1e-15));
        assert_abs_diff_eq!(rank4_fidelity_ycase_xconc(1.0, 0.0, 0.0, 0.6, 0.8).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn quartic_fig9_window() {
        let res = rank4_quartic_solve(0.42, 0.2, 0.0, FRAC_PI_4, FRAC_PI_4).unwrap();
        for root in &res.roots {
            let r = report(&root.params).unwrap();
            assert_abs_diff_eq!(r.purity_oracle, 0.42, epsilon = 1e-8);
            assert_abs_diff_eq!(r.concurrence_oracle, 0.2, epsilon = 1e-8);
            assert_abs_diff_eq!(r.fidelity_oracle, root.fidelity, epsilon = 1e-9);
        }
        // Outside the window every real root needs y > G.
        let err = rank4_quartic_solve(0.9, 0.2, 0.0, FRAC_PI_4, FRAC_PI_4).unwrap_err();
        match err {
            Error::Infeasible { candidates, .. } => assert!(!candidates.is_empty()),
            e => panic!("{e}"),
        }
        assert!(rank4_quartic_solve(1.0, 1.0, 0.0, FRAC_PI_2, FRAC_PI_2).unwrap_err().is_infeasible());
    }

    #[test]
    fn quartic_degenerates_to_quadratic() {
        // C = 0: the quartic is the square of αs² + βs + K, solved directly.
        let (phi, psi, x, purity) = (0.5, 0.9, 0.001, 0.6);
        let co = AngleCoefficients::new(phi, psi);
        let k = 1.0 + 2.0 * x - purity;
        let quad = half_quadratic(co.alpha, -0.5 * co.beta, k);
        let quartic = real_roots(&quartic_coefficients(co.alpha, co.beta, k, 0.0, co.p));
        for (s, _) in &quad {
            assert!(quartic.iter().any(|q| (q - s).abs() < 1e-6), "{quad:?} vs {quartic:?}");
        }
        // With f′ = 0 (ψ = 0) α, β reduce to the rank-3 first-kind y-case coefficients.
        let co = AngleCoefficients::new(0.6, 0.0);
        assert_abs_diff_eq!(co.alpha, 2.0 * co.d - 2.0 * co.f * co.f, epsilon = 1e-12);
        assert_abs_diff_eq!(co.beta, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn unknown_relation_name() {
        assert!("rank5".parse::<Relation>().is_err());
        for r in Relation::ALL {
            assert_eq!(r.name().parse::<Relation>().unwrap(), r);
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{}\"", r.name()));
        }
    }

    #[test]
    fn missing_inputs_are_reported() {
        let e = solve(&RelationInput::new(Relation::Rank3K1, 0.6, 0.2)).unwrap_err();
        assert!(matches!(e, Error::MissingInput { input: "phi", .. }));
        let e = solve(&RelationInput::new(Relation::Rank4XCase, 0.6, 0.2).with_angles(0.3, 0.3)).unwrap_err();
        assert!(matches!(e, Error::MissingInput { input: "y", .. }));
    }

    #[test]
    fn result_serializes() {
        let res = solve_rank3_kind1(0.6, 0.2, FRAC_PI_4, FRAC_PI_2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&res).unwrap();
        assert_eq!(v["relation"], "rank3k1");
        assert!(v["roots"][0]["branch"].is_string());
        assert!(v["roots"][0]["params"]["theta"].is_number());
    }
}
