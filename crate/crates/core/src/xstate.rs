//! Seven-parameter X-state model: validation, rank taxonomy, conversion to and
//! from dense density matrices, and the auxiliary coefficients that the
//! closed-form relations are written in.
//!
//! The basis order is |00>, |01>, |10>, |11>. The populations are
//! `cos²θ`, `sin²θ cos²φ`, `sin²θ sin²φ cos²ψ`, `sin²θ sin²φ sin²ψ` and the two
//! coherences are `ρ14 = √x e^{iμ}` and `ρ23 = √y e^{iν}`.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DensityMatrix4;

/// Slack allowed on the positivity bounds `x <= H`, `y <= G` and on angle boxes.
pub const BOUND_TOL: f64 = 1e-12;
/// Tolerance for the equalities of the rank case table.
pub const RANK_TOL: f64 = 1e-10;
/// Off-X entries below this magnitude are treated as zero by [`from_density`].
pub const X_SHAPE_TOL: f64 = 1e-10;
const DEGENERATE_DENOMINATOR: f64 = 1e-12;

/// Unvalidated parameters, as read from user input.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RawParams {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub nu: f64,
}

/// Validated X-state parameters. Construct through [`validate`] or
/// [`XParams::new`]; deserialization validates too.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct XParams {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub x: f64,
    pub y: f64,
    pub mu: f64,
    pub nu: f64,
}

impl TryFrom<RawParams> for XParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        validate(raw)
    }
}

impl From<XParams> for RawParams {
    fn from(p: XParams) -> Self {
        RawParams { theta: p.theta, phi: p.phi, psi: p.psi, x: p.x, y: p.y, mu: p.mu, nu: p.nu }
    }
}

impl XParams {
    pub fn new(theta: f64, phi: f64, psi: f64, x: f64, y: f64, mu: f64, nu: f64) -> Result<Self> {
        validate(RawParams { theta, phi, psi, x, y, mu, nu })
    }

    /// `H = sin²θ cos²θ sin²φ sin²ψ`, the upper bound on `x`.
    pub fn h_bound(&self) -> f64 {
        h_bound(self.theta, self.phi, self.psi)
    }

    /// `G = sin⁴θ cos²φ sin²φ cos²ψ`, the upper bound on `y`.
    pub fn g_bound(&self) -> f64 {
        g_bound(self.theta, self.phi, self.psi)
    }

    pub fn coefficients(&self) -> DerivedCoefficients {
        derived_coefficients(self.theta, self.phi, self.psi, self.x, self.y)
    }

    pub fn with_phases(mut self, mu: f64, nu: f64) -> Self {
        self.mu = mu.rem_euclid(TAU);
        self.nu = nu.rem_euclid(TAU);
        self
    }
}

pub fn h_bound(theta: f64, phi: f64, psi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    (st * ct * phi.sin() * psi.sin()).powi(2)
}

pub fn g_bound(theta: f64, phi: f64, psi: f64) -> f64 {
    let (sp, cp) = phi.sin_cos();
    (theta.sin().powi(2) * cp * sp * psi.cos()).powi(2)
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if !value.is_finite() || value < lo - BOUND_TOL || value > hi + BOUND_TOL {
        return Err(Error::OutOfRange { name, value, lo, hi });
    }
    Ok(value.clamp(lo, hi))
}

/// Checks the angle boxes and the positivity bounds `x ∈ [0, H]`, `y ∈ [0, G]`.
pub fn validate(raw: RawParams) -> Result<XParams> {
    let theta = check_range("theta", raw.theta, 0.0, FRAC_PI_2)?;
    let phi = check_range("phi", raw.phi, 0.0, FRAC_PI_2)?;
    let psi = check_range("psi", raw.psi, 0.0, FRAC_PI_2)?;
    let mu = check_range("mu", raw.mu, 0.0, TAU)?;
    let nu = check_range("nu", raw.nu, 0.0, TAU)?;
    let x = check_range("x", raw.x, 0.0, f64::MAX)?;
    let y = check_range("y", raw.y, 0.0, f64::MAX)?;

    let h = h_bound(theta, phi, psi);
    if x > h + BOUND_TOL {
        return Err(Error::BoundViolation { bound: "x <= H", value: x, limit: h, slack: x - h });
    }
    let g = g_bound(theta, phi, psi);
    if y > g + BOUND_TOL {
        return Err(Error::BoundViolation { bound: "y <= G", value: y, limit: g, slack: y - g });
    }
    Ok(XParams { theta, phi, psi, x, y, mu, nu })
}

/// Functions of `(φ, ψ)` alone. Every relation coefficient is a function of
/// `p = sin²φ sin²ψ` and `f = cosφ sinφ cosψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleCoefficients {
    pub p: f64,
    pub f: f64,
    pub fprime: f64,
    pub q: f64,
    pub e: f64,
    pub r: f64,
    pub d: f64,
    pub t: f64,
    pub u: f64,
    pub g: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl AngleCoefficients {
    pub fn new(phi: f64, psi: f64) -> Self {
        let (sp, cp) = phi.sin_cos();
        let (ss, cs) = psi.sin_cos();
        let p = sp * sp * ss * ss;
        let f = cp * sp * cs;
        let fprime = sp * ss;
        let q = sp * sp * (cp * cp * cs * cs - ss * ss);
        let e = cp * cp + sp * sp * (2.0 * psi).cos();
        let r = -1.0 + p;
        let d = 1.0 - p + p * p;
        let t = 1.0 - p;
        let u = 1.0 + p * p - cp * cp * cs * cs * sp * sp - 2.0 * p;
        let g = (53.0 + 4.0 * (2.0 * phi).cos() + 7.0 * (4.0 * phi).cos() + 8.0 * (4.0 * psi).cos() * sp.powi(4)) / 64.0;
        let alpha = 2.0 * g - 2.0 * fprime * fprime;
        let beta = 2.0 * fprime * fprime - 2.0;
        Self { p, f, fprime, q, e, r, d, t, u, g, alpha, beta }
    }
}

/// All auxiliary scalars of an X-state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCoefficients {
    #[serde(rename = "H")]
    pub h_bound: f64,
    #[serde(rename = "G")]
    pub g_bound: f64,
    /// `A = sin²θ (1 - sin²φ sin²ψ)`, the weight of the |01>,|10> block.
    #[serde(rename = "A")]
    pub a_weight: f64,
    /// `B = 1 - A`, the weight of the |00>,|11> block.
    #[serde(rename = "B")]
    pub b_weight: f64,
    pub f: f64,
    pub fprime: f64,
    pub p: f64,
    pub q: f64,
    pub e: f64,
    pub r: f64,
    pub d: f64,
    pub t: f64,
    pub u: f64,
    pub g: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `k = cos²θ - e sin²θ`, equal to the zz correlation.
    pub k: f64,
    /// `max(x, y)`
    pub a: f64,
}

pub fn derived_coefficients(theta: f64, phi: f64, psi: f64, x: f64, y: f64) -> DerivedCoefficients {
    let ac = AngleCoefficients::new(phi, psi);
    let s = theta.sin().powi(2);
    let c2 = theta.cos().powi(2);
    let a_weight = s * (1.0 - ac.p);
    DerivedCoefficients {
        h_bound: h_bound(theta, phi, psi),
        g_bound: g_bound(theta, phi, psi),
        a_weight,
        b_weight: 1.0 - a_weight,
        f: ac.f,
        fprime: ac.fprime,
        p: ac.p,
        q: ac.q,
        e: ac.e,
        r: ac.r,
        d: ac.d,
        t: ac.t,
        u: ac.u,
        g: ac.g,
        alpha: ac.alpha,
        beta: ac.beta,
        k: c2 - ac.e * s,
        a: x.max(y),
    }
}

/// Recovers `(φ, ψ)` from `p = sin²φ sin²ψ` and `f = cosφ sinφ cosψ ≥ 0`.
///
/// With `w = sin²φ`, `f² = (1 - w)(w - p)`, so there are up to two fibers;
/// both are returned (larger `w` first). Feasible iff `0 <= p <= 1` and
/// `1 - p >= 2f`.
pub fn angles_from_pf(p: f64, f: f64) -> Result<[(f64, f64); 2]> {
    if !(-BOUND_TOL..=1.0 + BOUND_TOL).contains(&p) || f < -BOUND_TOL || !f.is_finite() {
        return Err(Error::Domain(format!("no angles realize p = {p}, f = {f}")));
    }
    let p = p.clamp(0.0, 1.0);
    let f = f.max(0.0);
    let disc = (1.0 - p).powi(2) - 4.0 * f * f;
    if disc < -BOUND_TOL {
        return Err(Error::Domain(format!("no angles realize p = {p}, f = {f}: need 1 - p >= 2f")));
    }
    let root = disc.max(0.0).sqrt();
    let angles = |w: f64| {
        let w = w.clamp(0.0, 1.0);
        let phi = w.sqrt().asin();
        let psi = if w > 0.0 { (p / w).min(1.0).sqrt().asin() } else { 0.0 };
        (phi, psi)
    };
    Ok([angles(0.5 * (1.0 + p + root)), angles(0.5 * (1.0 + p - root))])
}

/// `(p, f)` for a target `(e, f)`: `e = 1 - 2p`.
pub fn p_from_e(e: f64) -> f64 {
    0.5 * (1.0 - e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKind {
    First,
    Second,
    Third,
    Sole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankClass {
    pub rank: u8,
    pub kind: RankKind,
}

impl RankClass {
    pub const fn new(rank: u8, kind: RankKind) -> Self {
        Self { rank, kind }
    }
}

impl std::fmt::Display for RankClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            RankKind::Sole => write!(f, "rank {}", self.rank),
            kind => write!(f, "rank {} ({:?} kind)", self.rank, kind),
        }
    }
}

/// Places a state in the rank/kind case table. Equalities use [`RANK_TOL`].
pub fn classify_rank(p: &XParams) -> Result<RankClass> {
    let co = p.coefficients();
    let (h, g, a, b) = (co.h_bound, co.g_bound, co.a_weight, co.b_weight);
    let (x, y) = (p.x, p.y);

    // Distance of each elementary condition from holding; zero means it holds.
    let eq = |u: f64, v: f64| if (u - v).abs() <= RANK_TOL { 0.0 } else { (u - v).abs() };
    let lt = |u: f64, v: f64| if u < v - RANK_TOL { 0.0 } else { u - v + RANK_TOL };
    let pos = |u: f64| if u > RANK_TOL { 0.0 } else { RANK_TOL - u };
    let zero = |u: f64| if u.abs() <= RANK_TOL { 0.0 } else { u.abs() };

    let cases: [(&str, RankClass, f64); 8] = [
        ("rank1 (x=H, y=0, A=0)", RankClass::new(1, RankKind::Sole), eq(x, h).max(zero(y)).max(zero(a))),
        ("rank1 (x=0, y=G, B=0)", RankClass::new(1, RankKind::Sole), zero(x).max(eq(y, g)).max(zero(b))),
        ("rank2 first", RankClass::new(2, RankKind::First), lt(x, h).max(zero(y)).max(zero(a))),
        ("rank2 second", RankClass::new(2, RankKind::Second), zero(x).max(lt(y, g)).max(zero(b))),
        ("rank2 third", RankClass::new(2, RankKind::Third), eq(x, h).max(eq(y, g)).max(pos(a)).max(pos(b))),
        ("rank3 first", RankClass::new(3, RankKind::First), lt(x, h).max(eq(y, g)).max(pos(a))),
        ("rank3 second", RankClass::new(3, RankKind::Second), eq(x, h).max(lt(y, g)).max(pos(b))),
        ("rank4", RankClass::new(4, RankKind::Sole), lt(x, h).max(lt(y, g)).max(pos(a)).max(pos(b))),
    ];
    for (_, class, distance) in &cases {
        if *distance == 0.0 {
            return Ok(*class);
        }
    }
    Err(Error::AmbiguousRank { distances: cases.iter().map(|(name, _, d)| (name.to_string(), *d)).collect() })
}

/// Dense density matrix of the parametrized X-state.
pub fn to_density(p: &XParams) -> DensityMatrix4 {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    let (ss, cs) = p.psi.sin_cos();
    let s2 = st * st;
    let mut m = Matrix4::<Complex64>::zeros();
    m[(0, 0)] = Complex64::new(ct * ct, 0.0);
    m[(1, 1)] = Complex64::new(s2 * cp * cp, 0.0);
    m[(2, 2)] = Complex64::new(s2 * sp * sp * cs * cs, 0.0);
    m[(3, 3)] = Complex64::new(s2 * sp * sp * ss * ss, 0.0);
    let c14 = Complex64::from_polar(p.x.sqrt(), p.mu);
    let c23 = Complex64::from_polar(p.y.sqrt(), p.nu);
    m[(0, 3)] = c14;
    m[(3, 0)] = c14.conj();
    m[(1, 2)] = c23;
    m[(2, 1)] = c23.conj();
    DensityMatrix4::from_trusted(m)
}

fn phase(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.arg().rem_euclid(TAU)
    }
}

/// Inverse of [`to_density`] for X-shaped matrices.
///
/// Degenerate fibers (a vanishing denominator) set the downstream angles to
/// zero; phases of vanishing coherences are zero.
pub fn from_density(rho: &DensityMatrix4) -> Result<XParams> {
    let offending: Vec<(usize, usize)> = [(0, 1), (0, 2), (1, 3), (2, 3)]
        .into_iter()
        .filter(|&(i, j)| rho.entry(i, j).norm() >= X_SHAPE_TOL || rho.entry(j, i).norm() >= X_SHAPE_TOL)
        .map(|(i, j)| (i + 1, j + 1))
        .collect();
    if !offending.is_empty() {
        return Err(Error::NotXShaped { entries: offending });
    }
    let pop = |i: usize| rho.entry(i, i).re.max(0.0);
    let (r11, r22, r33, r44) = (pop(0), pop(1), pop(2), pop(3));
    let rest = r22 + r33 + r44;

    let theta = rest.sqrt().atan2(r11.sqrt());
    let (phi, psi) = if rest < DEGENERATE_DENOMINATOR {
        (0.0, 0.0)
    } else {
        let tail = r33 + r44;
        let phi = tail.sqrt().atan2(r22.sqrt());
        let psi = if tail < DEGENERATE_DENOMINATOR { 0.0 } else { r44.sqrt().atan2(r33.sqrt()) };
        (phi, psi)
    };

    let c14 = rho.entry(0, 3);
    let c23 = rho.entry(1, 2);
    let mut x = c14.norm_sqr();
    let mut y = c23.norm_sqr();
    // Absorb PSD round-off at the positivity boundary.
    let h = h_bound(theta, phi, psi);
    let g = g_bound(theta, phi, psi);
    if x > h && x - h <= 1e-9 {
        x = h;
    }
    if y > g && y - g <= 1e-9 {
        y = g;
    }
    validate(RawParams { theta, phi, psi, x, y, mu: phase(c14), nu: phase(c23) })
}
