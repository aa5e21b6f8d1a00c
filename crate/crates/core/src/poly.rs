//! Real roots of low-degree real polynomials.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Discriminants in `[-DISCRIMINANT_CLAMP, 0)` are treated as zero.
pub const DISCRIMINANT_CLAMP: f64 = 1e-12;
/// Positive discriminants this small relative to the terms they cancel count as zero.
pub const DOUBLE_ROOT_REL_TOL: f64 = 1e-14;
/// Leading coefficients below this (relative to the largest) are dropped.
pub const LEADING_ZERO_TOL: f64 = 1e-12;
/// Eigenvalues with `|Im| <= IMAG_TOL (1 + |z|)` are kept as real roots.
pub const IMAG_TOL: f64 = 1e-6;
const NEWTON_STEPS: usize = 8;
const MERGE_TOL: f64 = 1e-10;

/// Which root of a quadratic (or which path of a solver) produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
    /// Zero discriminant, both signs coincide.
    Double,
    /// Leading coefficient vanished.
    Linear,
    /// Root of a higher-degree polynomial.
    Real,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Double => "double",
            Branch::Linear => "linear",
            Branch::Real => "real",
        };
        f.write_str(s)
    }
}

/// Roots of `lead s² - 2 half_b s + c = 0`, written `s = (half_b ± √(half_b² - lead c)) / lead`.
///
/// Returns nothing when the discriminant is clearly negative. When `lead`
/// vanishes the single root `c / (2 half_b)` is returned.
pub fn half_quadratic(lead: f64, half_b: f64, c: f64) -> Vec<(f64, Branch)> {
    let scale = lead.abs().max(half_b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if lead.abs() <= LEADING_ZERO_TOL * scale {
        if half_b == 0.0 {
            return Vec::new();
        }
        return vec![(c / (2.0 * half_b), Branch::Linear)];
    }
    let mut disc = half_b * half_b - lead * c;
    if disc < 0.0 {
        if disc < -DISCRIMINANT_CLAMP * scale.max(1.0) {
            return Vec::new();
        }
        disc = 0.0;
    }
    // Cancellation noise around an exact double root.
    if disc <= DOUBLE_ROOT_REL_TOL * (half_b * half_b).max((lead * c).abs()) {
        disc = 0.0;
    }
    if disc == 0.0 {
        return vec![(half_b / lead, Branch::Double)];
    }
    let root = disc.sqrt();
    // Cancellation-free pair: one root from the formula, the other from Vieta.
    let big = half_b + half_b.signum() * root;
    let (plus, minus) = if big == 0.0 {
        ((half_b + root) / lead, (half_b - root) / lead)
    } else if half_b >= 0.0 {
        (big / lead, c / big)
    } else {
        (c / big, big / lead)
    };
    vec![(plus, Branch::Plus), (minus, Branch::Minus)]
}

/// Evaluates a polynomial given highest-degree coefficient first.
pub fn eval(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &a| acc * s + a)
}

fn eval_with_derivative(coeffs: &[f64], s: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &a in coeffs {
        dp = dp * s + p;
        p = p * s + a;
    }
    (p, dp)
}

fn polish(coeffs: &[f64], mut s: f64) -> f64 {
    let mut best = eval(coeffs, s).abs();
    for _ in 0..NEWTON_STEPS {
        let (p, dp) = eval_with_derivative(coeffs, s);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let next = s - p / dp;
        let r = eval(coeffs, next).abs();
        if r.is_nan() || r >= best {
            break;
        }
        best = r;
        s = next;
    }
    s
}

/// Real roots, ascending, of the polynomial with coefficients given
/// highest degree first. Uses companion-matrix eigenvalues polished by Newton.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if scale == 0.0 || coeffs.iter().any(|a| !a.is_finite()) {
        return Vec::new();
    }
    let start = coeffs.iter().position(|a| a.abs() > LEADING_ZERO_TOL * scale).unwrap_or(coeffs.len());
    let trimmed = &coeffs[start..];
    let degree = trimmed.len().saturating_sub(1);
    let mut roots: Vec<f64> = match degree {
        0 => return Vec::new(),
        1 => vec![-trimmed[1] / trimmed[0]],
        2 => half_quadratic(trimmed[0], -0.5 * trimmed[1], trimmed[2]).into_iter().map(|(s, _)| s).collect(),
        n => {
            let lead = trimmed[0];
            let companion = DMatrix::from_fn(n, n, |i, j| {
                if i == 0 {
                    -trimmed[j + 1] / lead
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            companion
                .complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() <= IMAG_TOL * (1.0 + z.norm()))
                .map(|z| z.re)
                .collect()
        }
    };
    for s in roots.iter_mut() {
        *s = polish(trimmed, *s);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL * (1.0 + b.abs()));
    roots
}
