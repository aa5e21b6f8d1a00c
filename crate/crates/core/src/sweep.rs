//! One-parameter sweeps of the closed relations, cross-checked row by row
//! against the oracles, and the ten figure presets.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{optimal_fidelity_oracle, uhlmann_bell_closed, uhlmann_bell_oracle};
use crate::relations::{evaluate, Relation, RelationInput};
use crate::xstate::{angles_from_pf, p_from_e, to_density, XParams};

/// Grid density of the presets.
pub const PRESET_POINTS: usize = 201;
/// Density of the feasibility probe that fixes a preset's range.
pub const PROBE_POINTS: usize = 2001;
/// Oracle residual every emitted row must stay under.
pub const ROW_RESIDUAL_LIMIT: f64 = 1e-8;
/// Slack allowed by [`violations`] between consecutive rows.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepRelation {
    Rank2k3,
    Rank3k1,
    Rank3k1Ycase,
    Rank3k2,
    Rank4Xcase,
    Rank4Quartic,
    Rank4Ycase,
    UhlmannVsE,
}

impl SweepRelation {
    pub const ALL: [SweepRelation; 8] = [
        SweepRelation::Rank2k3,
        SweepRelation::Rank3k1,
        SweepRelation::Rank3k1Ycase,
        SweepRelation::Rank3k2,
        SweepRelation::Rank4Xcase,
        SweepRelation::Rank4Quartic,
        SweepRelation::Rank4Ycase,
        SweepRelation::UhlmannVsE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepRelation::Rank2k3 => "rank2k3",
            SweepRelation::Rank3k1 => "rank3k1",
            SweepRelation::Rank3k1Ycase => "rank3k1_ycase",
            SweepRelation::Rank3k2 => "rank3k2",
            SweepRelation::Rank4Xcase => "rank4_xcase",
            SweepRelation::Rank4Quartic => "rank4_quartic",
            SweepRelation::Rank4Ycase => "rank4_ycase",
            SweepRelation::UhlmannVsE => "uhlmann_vs_e",
        }
    }

    /// Relation that supplies the fidelity column.
    pub fn relation(self) -> Relation {
        match self {
            SweepRelation::Rank2k3 => Relation::Rank2K3,
            SweepRelation::Rank3k1 => Relation::Rank3K1,
            SweepRelation::Rank3k1Ycase => Relation::Rank3K1YCase,
            SweepRelation::Rank3k2 => Relation::Rank3K2,
            SweepRelation::Rank4Xcase | SweepRelation::UhlmannVsE => Relation::Rank4XCase,
            SweepRelation::Rank4Quartic => Relation::Rank4Quartic,
            SweepRelation::Rank4Ycase => Relation::Rank4YCase,
        }
    }

    pub fn has_uhlmann(self) -> bool {
        self == SweepRelation::UhlmannVsE
    }
}

impl fmt::Display for SweepRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepRelation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SweepRelation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown sweep relation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "P")]
    Purity,
    #[serde(rename = "C")]
    Concurrence,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "f")]
    F,
}

impl SweepVariable {
    /// Key in [`SweepSpec::fixed`] and CSV column name.
    pub fn key(self) -> &'static str {
        match self {
            SweepVariable::Purity => "P",
            SweepVariable::Concurrence => "C",
            SweepVariable::E => "e",
            SweepVariable::F => "f",
        }
    }

    /// Widest range the variable can take.
    pub fn nominal_range(self) -> (f64, f64) {
        match self {
            SweepVariable::Purity => (0.25, 1.0),
            SweepVariable::Concurrence => (0.0, 1.0),
            SweepVariable::E => (-1.0, 1.0),
            SweepVariable::F => (0.0, 0.5),
        }
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "purity" => Ok(SweepVariable::Purity),
            "C" | "concurrence" => Ok(SweepVariable::Concurrence),
            "e" => Ok(SweepVariable::E),
            "f" => Ok(SweepVariable::F),
            _ => Err(Error::InvalidSweep(format!("unknown sweep variable `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Increasing,
    Decreasing,
}

/// A sweep: one relation, one swept input, everything else fixed.
///
/// `fixed` uses the keys `P`, `C`, `phi`, `psi`, `x`, `y`, `e`, `f`. Angles
/// come from `phi`/`psi` when given, otherwise from `(e, f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub relation: SweepRelation,
    pub variable: SweepVariable,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub fixed: BTreeMap<String, f64>,
    /// Expected shape of the fidelity (and Uhlmann) column.
    #[serde(default)]
    pub trend: Option<Trend>,
    #[serde(default)]
    pub note: Option<String>,
}

impl SweepSpec {
    pub fn new(relation: SweepRelation, variable: SweepVariable, lo: f64, hi: f64, points: usize) -> Self {
        Self { relation, variable, lo, hi, points, fixed: BTreeMap::new(), trend: None, note: None }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.fixed.insert(key.to_string(), value);
        self
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| if i + 1 == n { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64 })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidSweep(format!("need lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.points < 2 {
            return Err(Error::InvalidSweep(format!("need at least 2 points, got {}", self.points)));
        }
        if self.fixed.contains_key(self.variable.key()) {
            return Err(Error::InvalidSweep(format!("`{}` is both swept and fixed", self.variable.key())));
        }
        for key in self.fixed.keys() {
            if !["P", "C", "phi", "psi", "x", "y", "e", "f"].contains(&key.as_str()) {
                return Err(Error::InvalidSweep(format!("unknown fixed input `{key}`")));
            }
        }
        Ok(())
    }

    fn value(&self, key: &str, swept: f64) -> Option<f64> {
        if key == self.variable.key() {
            Some(swept)
        } else {
            self.fixed.get(key).copied()
        }
    }

    fn require(&self, key: &'static str, swept: f64) -> Result<f64> {
        self.value(key, swept)
            .ok_or_else(|| Error::InvalidSweep(format!("{} sweep needs `{key}`", self.relation)))
    }

    /// Relation input at one grid point.
    pub fn input_at(&self, swept: f64) -> Result<RelationInput> {
        let relation = self.relation.relation();
        let mut input = RelationInput::new(relation, self.require("P", swept)?, self.require("C", swept)?);
        if let Some(aux) = relation.aux() {
            input = input.with_aux(self.require(aux, swept)?);
        }
        match (self.value("phi", swept), self.value("psi", swept)) {
            (Some(phi), Some(psi)) => input = input.with_angles(phi, psi),
            _ if relation.needs_angles() => {
                let e = self.require("e", swept)?;
                let f = self.require("f", swept)?;
                let [(phi, psi), _] = angles_from_pf(p_from_e(e), f)?;
                input = input.with_angles(phi, psi);
            }
            _ => {}
        }
        Ok(input)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub fidelity: Option<f64>,
    pub uhlmann: Option<f64>,
    pub oracle_residual: Option<f64>,
    pub skipped: bool,
    pub params: Option<XParams>,
    pub skip_reason: Option<String>,
}

impl SweepRow {
    fn skip(value: f64, reason: String) -> Self {
        Self { value, fidelity: None, uhlmann: None, oracle_residual: None, skipped: true, params: None, skip_reason: Some(reason) }
    }
}

fn row_at(spec: &SweepSpec, value: f64) -> Result<SweepRow> {
    let input = spec.input_at(value)?;
    let ev = evaluate(&input)?;
    let state = ev.root.params;
    let rho = to_density(&state);
    let mut residual = (ev.fidelity - optimal_fidelity_oracle(&rho)).abs();
    let uhlmann = if spec.relation.has_uhlmann() {
        let r = uhlmann_bell_closed(&state).0;
        residual = residual.max((r - uhlmann_bell_oracle(&rho)?.0).abs());
        Some(r)
    } else {
        None
    };
    Ok(SweepRow {
        value,
        fidelity: Some(ev.fidelity),
        uhlmann,
        oracle_residual: Some(residual),
        skipped: false,
        params: Some(state),
        skip_reason: None,
    })
}

/// One row per grid point. Infeasible points are kept as skipped rows;
/// malformed specs are errors, as is a sweep with no feasible point.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.points);
    for value in spec.grid() {
        match row_at(spec, value) {
            Ok(row) => rows.push(row),
            Err(e) if e.is_infeasible() => rows.push(SweepRow::skip(value, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if rows.iter().all(|r| r.skipped) {
        return Err(Error::EmptySweep);
    }
    Ok(rows)
}

/// Writes the rows as CSV and returns the number of bytes written. Numbers
/// use the shortest form that parses back to the same `f64`.
pub fn emit_csv<W: Write>(spec: &SweepSpec, rows: &[SweepRow], mut out: W) -> Result<usize> {
    if rows.is_empty() {
        return Err(Error::InvalidSweep("no rows to write".into()));
    }
    let uhl = spec.relation.has_uhlmann();
    let mut text = String::new();
    text.push_str(spec.variable.key());
    text.push_str(if uhl { ",fidelity,uhlmann,oracle_residual,skipped\n" } else { ",fidelity,oracle_residual,skipped\n" });
    let opt = |v: Option<f64>| v.map(|v| format!("{v:?}")).unwrap_or_default();
    for row in rows {
        text.push_str(&format!("{:?}", row.value));
        text.push(',');
        text.push_str(&opt(row.fidelity));
        if uhl {
            text.push(',');
            text.push_str(&opt(row.uhlmann));
        }
        text.push(',');
        text.push_str(&opt(row.oracle_residual));
        text.push_str(if row.skipped { ",1\n" } else { ",0\n" });
    }
    out.write_all(text.as_bytes())?;
    Ok(text.len())
}

/// Indices `i` of emitted rows where the step from row `i` to the next
/// emitted row breaks the trend, for the selected column.
pub fn violations(rows: &[SweepRow], trend: Trend, column: fn(&SweepRow) -> Option<f64>) -> Vec<usize> {
    let emitted: Vec<(usize, f64)> = rows.iter().enumerate().filter_map(|(i, r)| column(r).map(|v| (i, v))).collect();
    emitted
        .windows(2)
        .filter(|w| match trend {
            Trend::Increasing => w[1].1 < w[0].1 - MONOTONE_TOL,
            Trend::Decreasing => w[1].1 > w[0].1 + MONOTONE_TOL,
        })
        .map(|w| w[0].0)
        .collect()
}

pub fn fidelity_column(r: &SweepRow) -> Option<f64> {
    r.fidelity
}

pub fn uhlmann_column(r: &SweepRow) -> Option<f64> {
    r.uhlmann
}

/// Largest oracle residual over emitted rows.
pub fn max_residual(rows: &[SweepRow]) -> f64 {
    rows.iter().filter_map(|r| r.oracle_residual).fold(0.0, f64::max)
}

/// Narrows `spec` to the span between its first and last feasible probe points.
pub fn fit_feasible_range(mut spec: SweepSpec, probe_points: usize, points: usize) -> Result<SweepSpec> {
    spec.points = probe_points;
    let rows = run_sweep(&spec)?;
    let first = rows.iter().position(|r| !r.skipped).ok_or(Error::EmptySweep)?;
    let last = rows.iter().rposition(|r| !r.skipped).ok_or(Error::EmptySweep)?;
    if first == last {
        return Err(Error::InvalidSweep(format!("only one feasible point at {}", rows[first].value)));
    }
    spec.lo = rows[first].value;
    spec.hi = rows[last].value;
    spec.points = points;
    Ok(spec)
}

fn preset_skeleton(id: u32) -> Result<SweepSpec> {
    use SweepRelation as R;
    use SweepVariable as V;
    let nominal = |rel: SweepRelation, var: SweepVariable| {
        let (lo, hi) = var.nominal_range();
        SweepSpec::new(rel, var, lo, hi, PRESET_POINTS)
    };
    let inc = Some(Trend::Increasing);
    let dec = Some(Trend::Decreasing);
    let mut spec = match id {
        1 => nominal(R::Rank2k3, V::Purity).with("y", 0.01).with("C", 0.2),
        2 => nominal(R::Rank2k3, V::Concurrence).with("y", 0.01).with("P", 0.7),
        3 => nominal(R::Rank3k1, V::Purity).with("C", 0.2).with("phi", FRAC_PI_4).with("psi", FRAC_PI_2),
        4 => nominal(R::Rank3k1, V::Concurrence).with("P", 0.7).with("phi", FRAC_PI_4).with("psi", FRAC_PI_2),
        5 => nominal(R::Rank3k1, V::E).with("f", 0.0).with("P", 0.7).with("C", 0.2),
        6 => nominal(R::Rank3k1, V::F).with("e", 0.0).with("P", 0.7).with("C", 0.2),
        7 => nominal(R::Rank4Xcase, V::Purity).with("phi", FRAC_PI_4).with("psi", FRAC_PI_4).with("y", 0.0).with("C", 0.2),
        8 => {
            let mut s = nominal(R::Rank4Xcase, V::Concurrence).with("phi", FRAC_PI_4).with("psi", FRAC_PI_4).with("y", 0.0).with("P", 0.7);
            s.note = Some(
                "caption says the sweep is over purity with e = 0, f = 1/(2√2); P is fixed at 0.7, so the sweep is over \
                 concurrence, and e = 0 is incompatible with f = 1/(2√2), so the angles φ = ψ = π/4 (e = 1/2) are used"
                    .into(),
            );
            s
        }
        9 => nominal(R::Rank4Quartic, V::Purity).with("phi", FRAC_PI_4).with("psi", FRAC_PI_4).with("x", 0.0).with("C", 0.2),
        10 => nominal(R::UhlmannVsE, V::E).with("f", 1.0 / (2.0 * 2f64.sqrt())).with("y", 0.0).with("C", 0.2).with("P", 0.7),
        _ => return Err(Error::UnknownFigure(id)),
    };
    spec.trend = if matches!(id, 5 | 10) { dec } else { inc };
    Ok(spec)
}

/// Sweep behind figure `id` (1 to 10), over the feasible part of the
/// variable's nominal range.
///
/// When no probe point is realizable the nominal range is kept, a note says
/// so, and running the spec fails with [`Error::EmptySweep`].
pub fn figure_preset(id: u32) -> Result<SweepSpec> {
    let skeleton = preset_skeleton(id)?;
    match fit_feasible_range(skeleton.clone(), PROBE_POINTS, PRESET_POINTS) {
        Err(Error::EmptySweep) => {
            let mut spec = skeleton;
            let msg = "no valid state realizes any point of the nominal range";
            spec.note = Some(match spec.note.take() {
                Some(n) => format!("{n}; {msg}"),
                None => msg.to_string(),
            });
            Ok(spec)
        }
        other => other,
    }
}
