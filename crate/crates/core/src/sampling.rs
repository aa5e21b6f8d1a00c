//! Seeded random X-states drawn per rank/kind recipe.
//!
//! Angles are drawn from an interior box and `x`, `y` from `[0, H]`, `[0, G]`
//! scaled away from the boundary, then the rank's case constraints are
//! imposed exactly. Every draw is valid by construction.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::xstate::{g_bound, h_bound, RankClass, RankKind, XParams};

const ANGLE_MARGIN: f64 = 0.15;
const BOUND_FRACTION: f64 = 0.95;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn interior_angle<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(ANGLE_MARGIN..FRAC_PI_2 - ANGLE_MARGIN)
}

fn below<R: Rng>(rng: &mut R, bound: f64) -> f64 {
    bound * rng.random_range(0.0..BOUND_FRACTION)
}

fn build(theta: f64, phi: f64, psi: f64, x: f64, y: f64, mu: f64, nu: f64) -> XParams {
    XParams::new(theta, phi, psi, x, y, mu, nu).expect("recipe produces valid parameters")
}

/// Draws a state of the given class. Phases are uniform when `random_phases`
/// is set and zero otherwise.
pub fn sample_class<R: Rng>(rng: &mut R, class: RankClass, random_phases: bool) -> XParams {
    let (mu, nu) = if random_phases { (rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)) } else { (0.0, 0.0) };
    match (class.rank, class.kind) {
        (1, _) => match rng.random_range(0..3) {
            0 => build(0.0, 0.0, 0.0, 0.0, 0.0, mu, nu),
            1 => {
                let theta = interior_angle(rng);
                build(theta, FRAC_PI_2, FRAC_PI_2, h_bound(theta, FRAC_PI_2, FRAC_PI_2), 0.0, mu, nu)
            }
            _ => {
                let phi = interior_angle(rng);
                build(FRAC_PI_2, phi, 0.0, 0.0, g_bound(FRAC_PI_2, phi, 0.0), mu, nu)
            }
        },
        (2, RankKind::First) => {
            let theta = interior_angle(rng);
            let x = below(rng, h_bound(theta, FRAC_PI_2, FRAC_PI_2));
            build(theta, FRAC_PI_2, FRAC_PI_2, x, 0.0, mu, nu)
        }
        (2, RankKind::Second) => {
            let phi = interior_angle(rng);
            let y = below(rng, g_bound(FRAC_PI_2, phi, 0.0));
            build(FRAC_PI_2, phi, 0.0, 0.0, y, mu, nu)
        }
        (2, _) => {
            let (t, ph, ps) = (interior_angle(rng), interior_angle(rng), interior_angle(rng));
            build(t, ph, ps, h_bound(t, ph, ps), g_bound(t, ph, ps), mu, nu)
        }
        (3, RankKind::First) => {
            let (t, ph, ps) = (interior_angle(rng), interior_angle(rng), interior_angle(rng));
            let x = below(rng, h_bound(t, ph, ps));
            build(t, ph, ps, x, g_bound(t, ph, ps), mu, nu)
        }
        (3, _) => {
            let (t, ph, ps) = (interior_angle(rng), interior_angle(rng), interior_angle(rng));
            let y = below(rng, g_bound(t, ph, ps));
            build(t, ph, ps, h_bound(t, ph, ps), y, mu, nu)
        }
        _ => {
            let (t, ph, ps) = (interior_angle(rng), interior_angle(rng), interior_angle(rng));
            let x = below(rng, h_bound(t, ph, ps));
            let y = below(rng, g_bound(t, ph, ps));
            build(t, ph, ps, x, y, mu, nu)
        }
    }
}

/// Draws a state of the given rank, choosing the kind uniformly.
pub fn sample_rank<R: Rng>(rng: &mut R, rank: u8, random_phases: bool) -> XParams {
    let kind = match rank {
        2 => [RankKind::First, RankKind::Second, RankKind::Third][rng.random_range(0..3)],
        3 => [RankKind::First, RankKind::Second][rng.random_range(0..2)],
        _ => RankKind::Sole,
    };
    sample_class(rng, RankClass::new(rank, kind), random_phases)
}

/// Draws interior angles and coherences with no case constraint imposed.
pub fn sample_free<R: Rng>(rng: &mut R) -> XParams {
    let (t, ph, ps) = (rng.random_range(0.0..FRAC_PI_2), rng.random_range(0.0..FRAC_PI_2), rng.random_range(0.0..FRAC_PI_2));
    let x = rng.random_range(0.0..=1.0) * h_bound(t, ph, ps);
    let y = rng.random_range(0.0..=1.0) * g_bound(t, ph, ps);
    build(t, ph, ps, x, y, rng.random_range(0.0..TAU), rng.random_range(0.0..TAU))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xstate::classify_rank;

    #[test]
    fn recipes_classify_as_requested() {
        let mut rng = seeded_rng(7);
        for class in [
            RankClass::new(2, RankKind::First),
            RankClass::new(2, RankKind::Second),
            RankClass::new(2, RankKind::Third),
            RankClass::new(3, RankKind::First),
            RankClass::new(3, RankKind::Second),
            RankClass::new(4, RankKind::Sole),
        ] {
            for _ in 0..200 {
                let p = sample_class(&mut rng, class, true);
                assert_eq!(classify_rank(&p).unwrap(), class, "{p:?}");
            }
        }
        for _ in 0..200 {
            assert_eq!(classify_rank(&sample_rank(&mut rng, 1, true)).unwrap().rank, 1);
        }
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let a = sample_rank(&mut seeded_rng(42), 4, true);
        let b = sample_rank(&mut seeded_rng(42), 4, true);
        assert_eq!(a, b);
    }
}
