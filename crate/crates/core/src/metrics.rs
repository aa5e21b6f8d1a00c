//! Purity, concurrence, optimal teleportation fidelity and Uhlmann fidelity.
//!
//! Each quantity has a closed form in the X-state parameters and an oracle
//! that works on the dense density matrix only. The oracles never look at
//! the parametrization, so agreement between the two routes is a real check.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, clamp_psd_eigenvalue, hermitian_eigenvalues, kron2, pauli, psd_sqrt, trace_sqrt, DensityMatrix4};
use crate::xstate::{classify_rank, to_density, RankClass, XParams};

/// Closed-vs-oracle gap above which [`report`] refuses to produce a report.
pub const REPORT_DISCREPANCY_LIMIT: f64 = 1e-6;
/// Bell overlaps closer than this count as tied; the earlier state in
/// [`BellState::ALL`] wins.
pub const BELL_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

impl BellState {
    /// Fixed order, also used to break ties.
    pub const ALL: [BellState; 4] = [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    pub fn label(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        }
    }

    pub fn vector(self) -> Vector4<Complex64> {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::ZERO;
        match self {
            BellState::PhiPlus => Vector4::new(h, z, z, h),
            BellState::PhiMinus => Vector4::new(h, z, z, -h),
            BellState::PsiPlus => Vector4::new(z, h, h, z),
            BellState::PsiMinus => Vector4::new(z, h, -h, z),
        }
    }

    pub fn density(self) -> DensityMatrix4 {
        DensityMatrix4::from_trusted(linalg::projector(&self.vector()))
    }
}

impl std::fmt::Display for BellState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// `P = 1 - 2(AB + G - y + H - x)`
pub fn purity_closed(p: &XParams) -> f64 {
    let co = p.coefficients();
    1.0 - 2.0 * (co.a_weight * co.b_weight + co.g_bound - p.y + co.h_bound - p.x)
}

/// `Tr[ρ²]`
pub fn purity_oracle(rho: &DensityMatrix4) -> f64 {
    rho.purity()
}

/// `C = max(0, 2(√x - √G), 2(√y - √H))`
pub fn concurrence_closed(p: &XParams) -> f64 {
    let co = p.coefficients();
    let via_x = 2.0 * (p.x.sqrt() - co.g_bound.sqrt());
    let via_y = 2.0 * (p.y.sqrt() - co.h_bound.sqrt());
    via_x.max(via_y).max(0.0)
}

/// `ρ̃ = (σy ⊗ σy) ρ* (σy ⊗ σy)`
pub fn spin_flip(rho: &DensityMatrix4) -> Matrix4<Complex64> {
    let yy = kron2(&pauli(2), &pauli(2));
    yy * rho.matrix().map(|z| z.conj()) * yy
}

/// Wootters concurrence from the eigenvalues of `√(√ρ ρ̃ √ρ)`.
pub fn concurrence_oracle(rho: &DensityMatrix4) -> Result<f64> {
    let root = psd_sqrt(rho.matrix())?;
    let m = root * spin_flip(rho) * root;
    let m = (m + m.adjoint()).map(|z| z * 0.5);
    let mu = hermitian_eigenvalues(&m)?;
    let mut lambda = [0.0; 4];
    for (l, v) in lambda.iter_mut().zip(mu.iter()) {
        *l = clamp_psd_eigenvalue(*v)?.sqrt();
    }
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

pub use linalg::correlation_matrix;

/// `F = (1/2)[1 + (1/3) Tr√(T†T)]`, always the upper-bound expression.
pub fn optimal_fidelity_oracle(rho: &DensityMatrix4) -> f64 {
    0.5 * (1.0 + correlation_matrix(rho).trace_norm() / 3.0)
}

/// Whether `Tr√(T†T) > 1`, where the fidelity bound is attained with equality.
pub fn equality_regime(rho: &DensityMatrix4) -> bool {
    correlation_matrix(rho).trace_norm() > 1.0
}

/// `F = (1/6)[3 + 4√a + |k|]` with `a = max(x, y)`.
pub fn optimal_fidelity_closed(p: &XParams) -> f64 {
    let co = p.coefficients();
    (3.0 + 4.0 * co.a.sqrt() + co.k.abs()) / 6.0
}

/// `R = [Tr√(√ρ σ √ρ)]²`
pub fn uhlmann_oracle(rho: &DensityMatrix4, sigma: &DensityMatrix4) -> Result<f64> {
    let root = psd_sqrt(rho.matrix())?;
    let m = root * sigma.matrix() * root;
    let m = (m + m.adjoint()).map(|z| z * 0.5);
    Ok(trace_sqrt(&m)?.powi(2))
}

fn argmax(values: [(BellState, f64); 4]) -> (f64, BellState) {
    let mut best = (values[0].1, values[0].0);
    for (state, v) in &values[1..] {
        if *v > best.0 + BELL_TIE_TOL {
            best = (*v, *state);
        }
    }
    best
}

/// Largest Uhlmann fidelity to a Bell state, from the parameters.
pub fn uhlmann_bell_closed(p: &XParams) -> (f64, BellState) {
    let co = p.coefficients();
    let s = p.theta.sin().powi(2);
    let psi_block = 0.25 * (1.0 + co.e) * s;
    let phi_block = 0.25 * (2.0 - (1.0 + co.e) * s);
    let x_term = p.x.sqrt() * p.mu.cos();
    let y_term = p.y.sqrt() * p.nu.cos();
    argmax([
        (BellState::PhiPlus, phi_block + x_term),
        (BellState::PhiMinus, phi_block - x_term),
        (BellState::PsiPlus, psi_block + y_term),
        (BellState::PsiMinus, psi_block - y_term),
    ])
}

/// Largest Uhlmann fidelity to a Bell state via four dense evaluations.
pub fn uhlmann_bell_oracle(rho: &DensityMatrix4) -> Result<(f64, BellState)> {
    let mut values = [(BellState::PhiPlus, 0.0); 4];
    for (slot, state) in values.iter_mut().zip(BellState::ALL) {
        *slot = (state, uhlmann_oracle(rho, &state.density())?);
    }
    Ok(argmax(values))
}

/// Closed forms and oracles side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub params: XParams,
    pub purity_closed: f64,
    pub purity_oracle: f64,
    pub concurrence_closed: f64,
    pub concurrence_oracle: f64,
    pub fidelity_closed: f64,
    pub fidelity_oracle: f64,
    pub uhlmann_closed: f64,
    pub uhlmann_oracle: f64,
    pub uhlmann_argmax: BellState,
    pub rank: RankClass,
    pub equality_regime: bool,
    pub max_abs_discrepancy: f64,
}

pub fn report(p: &XParams) -> Result<MetricsReport> {
    let rho = to_density(p);
    let purity_closed = purity_closed(p);
    let purity_oracle = purity_oracle(&rho);
    let concurrence_closed = concurrence_closed(p);
    let concurrence_oracle = concurrence_oracle(&rho)?;
    let fidelity_closed = optimal_fidelity_closed(p);
    let fidelity_oracle = optimal_fidelity_oracle(&rho);
    let (uhlmann_closed, uhlmann_argmax) = uhlmann_bell_closed(p);
    let (uhlmann_oracle, _) = uhlmann_bell_oracle(&rho)?;

    let gaps = [
        ("purity", (purity_closed - purity_oracle).abs()),
        ("concurrence", (concurrence_closed - concurrence_oracle).abs()),
        ("fidelity", (fidelity_closed - fidelity_oracle).abs()),
        ("uhlmann", (uhlmann_closed - uhlmann_oracle).abs()),
    ];
    let (worst, max_abs_discrepancy) = gaps.iter().copied().fold(("", 0.0), |acc, g| if g.1 > acc.1 { g } else { acc });
    if max_abs_discrepancy > REPORT_DISCREPANCY_LIMIT {
        return Err(Error::Consistency { what: format!("closed-form {worst} disagrees with oracle"), discrepancy: max_abs_discrepancy });
    }
    Ok(MetricsReport {
        params: *p,
        purity_closed,
        purity_oracle,
        concurrence_closed,
        concurrence_oracle,
        fidelity_closed,
        fidelity_oracle,
        uhlmann_closed,
        uhlmann_oracle,
        uhlmann_argmax,
        rank: classify_rank(p)?,
        equality_regime: equality_regime(&rho),
        max_abs_discrepancy,
    })
}
