mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use proptest::prelude::*;
use xfid_core::metrics::report;
use xfid_core::relations::{rank2_fidelity, rank3_kind1_fidelity, solve, synthesize_rank2k3, Relation};
use xfid_core::sampling::seeded_rng;
use xfid_core::sweep::{fidelity_column, run_sweep, violations, Trend};
use xfid_core::xstate::{angles_from_pf, p_from_e, RankKind};
use xfid_core::{figure_preset, Error};

const TARGETS: usize = 200;

#[test]
fn every_surviving_root_reproduces_its_target() {
    let mut rng = seeded_rng(21);
    for relation in Relation::ALL.into_iter().filter(|r| *r != Relation::Pure) {
        let mut checked = 0;
        let mut draws = 0;
        while checked < TARGETS && draws < common::MAX_DRAWS {
            draws += 1;
            let Some((input, _)) = common::draw(relation, &mut rng) else { continue };
            let result = solve(&input).unwrap_or_else(|e| panic!("{relation}: {e} for {input:?}"));
            for root in &result.roots {
                let rep = report(&root.params).unwrap();
                assert!((rep.purity_oracle - input.purity).abs() < 1e-8, "{relation} {root:?}");
                assert!((rep.concurrence_oracle - input.concurrence).abs() < 1e-8, "{relation} {root:?}");
                assert!((rep.fidelity_oracle - root.fidelity).abs() < 1e-9, "{relation} {root:?}");
                assert_eq!(rep.rank, relation.class());
            }
            checked += 1;
        }
        assert_eq!(checked, TARGETS, "{relation}: too few targets");
    }
}

#[test]
fn pure_targets_round_trip() {
    for i in 1..=20 {
        let c = i as f64 / 20.0;
        let input = xfid_core::RelationInput::new(Relation::Pure, 1.0, c);
        let state = xfid_core::synthesize_state(&input).unwrap();
        let rep = report(&state).unwrap();
        assert!((rep.concurrence_oracle - c).abs() < 1e-8);
        assert!((rep.fidelity_oracle - (2.0 + c) / 3.0).abs() < 1e-9);
    }
}

#[test]
fn presets_on_hundred_point_grids() {
    for id in [1, 3, 4, 7, 8, 9] {
        let mut spec = figure_preset(id).unwrap();
        spec.points = 100;
        let rows = run_sweep(&spec).unwrap();
        assert!(rows.iter().all(|r| !r.skipped), "fig {id}");
        assert!(violations(&rows, Trend::Increasing, fidelity_column).is_empty(), "fig {id}");
    }
    // Both angle choices of the rank-3 purity figure give the same (p, f).
    let mut spec = figure_preset(3).unwrap();
    spec.points = 100;
    let a = run_sweep(&spec).unwrap();
    spec.fixed.insert("phi".into(), FRAC_PI_2);
    spec.fixed.insert("psi".into(), FRAC_PI_4);
    let b = run_sweep(&spec).unwrap();
    for (ra, rb) in a.iter().zip(&b) {
        assert!((ra.fidelity.unwrap() - rb.fidelity.unwrap()).abs() < 1e-12);
    }
}

#[test]
fn rank2_third_kind_relation_rises_with_concurrence() {
    let f: Vec<f64> = (0..100).map(|i| rank2_fidelity(RankKind::Third, i as f64 / 99.0, 0.7, 0.01).unwrap()).collect();
    assert!(f.windows(2).all(|w| w[1] >= w[0]));
}

/// Rank-3 first-kind relation over the grid points where `(e, f)` is realizable.
fn rank3_curve(points: impl Iterator<Item = (f64, f64)>) -> Vec<f64> {
    points
        .filter_map(|(e, f)| {
            let [(phi, psi), _] = angles_from_pf(p_from_e(e), f).ok()?;
            rank3_kind1_fidelity(0.7, 0.2, phi, psi).ok()
        })
        .collect()
}

#[test]
fn rank3_relation_trends_in_e_and_f() {
    let in_e = rank3_curve((0..100).map(|i| (-1.0 + 2.0 * i as f64 / 99.0, 0.0)));
    assert!(in_e.len() > 90);
    assert!(in_e.windows(2).all(|w| w[1] <= w[0]));
    let in_f = rank3_curve((0..100).map(|i| (0.0, 0.25 * i as f64 / 99.0)));
    assert_eq!(in_f.len(), 100);
    assert!(in_f.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn crossings() {
    let f1 = rank2_fidelity(RankKind::Third, 0.2, 0.6, 0.001).unwrap();
    let f2 = rank2_fidelity(RankKind::Third, 0.15, 0.7, 0.001).unwrap();
    assert!(f2 > f1);
    let g1 = rank3_kind1_fidelity(0.6, 0.2, FRAC_PI_4, FRAC_PI_2).unwrap();
    let g2 = rank3_kind1_fidelity(0.64, 0.22, FRAC_PI_2, 2.0 * std::f64::consts::PI / 25.0).unwrap();
    assert!(g1 > g2);
}

proptest! {
    #[test]
    fn rank2_third_kind_rejects_low_purity(p in 0.25f64..0.5, c in 0.0f64..1.0, y in 0.0f64..0.25) {
        let err = synthesize_rank2k3(p, c, y, None).unwrap_err();
        prop_assert!(matches!(err, Error::Domain(_)), "{err:?}");
        prop_assert!(rank2_fidelity(RankKind::Third, c, p, y).is_err());
    }
}
