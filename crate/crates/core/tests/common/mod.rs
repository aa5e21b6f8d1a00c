//! Seeded `(P, C, aux)` targets per relation, drawn from valid states that
//! satisfy the relation's case assumptions.

#![allow(dead_code)]

use rand_chacha::ChaCha8Rng;
use xfid_core::metrics::{concurrence_closed, purity_closed};
use xfid_core::relations::{Relation, RelationInput};
use xfid_core::sampling::sample_class;
use xfid_core::xstate::{RankClass, RankKind};
use xfid_core::XParams;

pub const MAX_DRAWS: usize = 200_000;

/// Which coherence the concurrence comes from, if nonzero.
fn x_branch(p: &XParams) -> f64 {
    2.0 * (p.x.sqrt() - p.g_bound().sqrt())
}

fn y_branch(p: &XParams) -> f64 {
    2.0 * (p.y.sqrt() - p.h_bound().sqrt())
}

fn class_of(relation: Relation) -> RankClass {
    relation.class()
}

/// One draw; `None` when the state falls outside the relation's case.
pub fn draw(relation: Relation, rng: &mut ChaCha8Rng) -> Option<(RelationInput, XParams)> {
    let p = match relation {
        Relation::Rank2K1 | Relation::Rank2K2 | Relation::Rank2K3 | Relation::Rank3K1 | Relation::Rank3K1YCase => {
            sample_class(rng, class_of(relation), false)
        }
        Relation::Rank3K2 | Relation::Rank3K2YCase => sample_class(rng, RankClass::new(3, RankKind::Second), false),
        _ => sample_class(rng, RankClass::new(4, RankKind::Sole), false),
    };
    let c = concurrence_closed(&p);
    let pur = purity_closed(&p);
    let margin = 1e-3;
    let by_x = c > margin && (c - x_branch(&p)).abs() < 1e-14 && x_branch(&p) > y_branch(&p) + margin;
    let by_y = c > margin && (c - y_branch(&p)).abs() < 1e-14 && y_branch(&p) > x_branch(&p) + margin;
    let base = RelationInput::new(relation, pur, c);
    let angled = base.with_angles(p.phi, p.psi);
    let input = match relation {
        Relation::Rank2K1 | Relation::Rank2K2 => (c > margin).then_some(base),
        Relation::Rank2K3 => by_x.then_some(base.with_aux(p.y)),
        Relation::Rank3K1 => by_x.then_some(angled),
        Relation::Rank3K1YCase => by_y.then_some(angled.with_aux(p.x)),
        Relation::Rank3K2 => (by_x && p.x >= p.y).then_some(angled.with_aux(p.y)),
        Relation::Rank3K2YCase => by_y.then_some(angled),
        Relation::Rank4XCase => (by_x && p.x >= p.y).then_some(angled.with_aux(p.y)),
        Relation::Rank4YCase => by_x.then_some(angled.with_aux(p.y)),
        Relation::Rank4Quartic => by_y.then_some(angled.with_aux(p.x)),
        Relation::Pure => None,
    }?;
    Some((input, p))
}
