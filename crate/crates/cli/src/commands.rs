use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt::Write as _;

use serde::Serialize;
use xfid_core::metrics::{report, MetricsReport};
use xfid_core::relations::{rank2_fidelity, rank3_kind1_fidelity, solve, InverseSolveResult, Relation, RelationInput};
use xfid_core::sweep::{emit_csv, figure_preset, max_residual, run_sweep, violations, SweepRelation, SweepSpec, SweepVariable, PRESET_POINTS};
use xfid_core::verify::{run_verify, VerifySummary};
use xfid_core::xstate::{classify_rank, g_bound, h_bound, validate, RankKind, RawParams, XParams};

use crate::args::{Command, OutputArgs, StateArgs, SweepArgs};
use crate::{CliError, Rendered};

/// Inputs this close outside their domain are moved onto its edge, so that
/// values typed to six digits (θ = 1.5708, y = 0.027778) are accepted.
pub const INPUT_SNAP: f64 = 1e-5;

fn to_radians(v: f64, degrees: bool) -> f64 {
    if degrees { v.to_radians() } else { v }
}

fn snap(name: &str, value: f64, lo: f64, hi: f64, notes: &mut Vec<String>) -> f64 {
    let snapped = if value > hi && value <= hi + INPUT_SNAP {
        hi
    } else if value < lo && value >= lo - INPUT_SNAP {
        lo
    } else {
        value
    };
    if snapped != value {
        notes.push(format!("{name} = {value} moved to {snapped}"));
    }
    snapped
}

/// Converts, snaps and validates the state flags.
pub fn state_from_args(s: &StateArgs, notes: &mut Vec<String>) -> Result<XParams, CliError> {
    let theta = snap("theta", to_radians(s.theta, s.degrees), 0.0, FRAC_PI_2, notes);
    let phi = snap("phi", to_radians(s.phi, s.degrees), 0.0, FRAC_PI_2, notes);
    let psi = snap("psi", to_radians(s.psi, s.degrees), 0.0, FRAC_PI_2, notes);
    let phase = |v: f64| if v.is_finite() { to_radians(v, s.degrees).rem_euclid(TAU) } else { v };
    let x = snap("x", s.x, 0.0, h_bound(theta, phi, psi), notes);
    let y = snap("y", s.y, 0.0, g_bound(theta, phi, psi), notes);
    Ok(validate(RawParams { theta, phi, psi, x, y, mu: phase(s.mu), nu: phase(s.nu) })?)
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(format!("cannot encode JSON: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn no_csv(output: &OutputArgs, command: &str) -> Result<(), CliError> {
    if output.csv {
        return Err(CliError::Usage(format!("`{command}` has no CSV output; use --json or the default text")));
    }
    Ok(())
}

pub(crate) fn dispatch(command: &Command, notes: &mut Vec<String>) -> Result<Rendered, CliError> {
    match command {
        Command::Analyze { state, output } => {
            no_csv(output, "analyze")?;
            let rep = report(&state_from_args(state, notes)?)?;
            Ok(Rendered::ok(if output.json { json(&rep)? } else { analyze_text(&rep) }))
        }
        Command::Classify { state, output } => {
            no_csv(output, "classify")?;
            let class = classify_rank(&state_from_args(state, notes)?)?;
            Ok(Rendered::ok(if output.json { json(&class)? } else { format!("{class}\n") }))
        }
        Command::Solve { relation, purity, concurrence, aux, phi, psi, degrees, output } => {
            no_csv(output, "solve")?;
            let relation: Relation = relation.parse()?;
            let mut input = RelationInput::new(relation, *purity, *concurrence);
            if let Some(aux) = aux {
                input = input.with_aux(*aux);
            }
            match (phi, psi) {
                (Some(phi), Some(psi)) => input = input.with_angles(to_radians(*phi, *degrees), to_radians(*psi, *degrees)),
                (None, None) => {}
                _ => return Err(CliError::Usage("give both --phi and --psi or neither".into())),
            }
            let result = solve(&input)?;
            Ok(Rendered::ok(if output.json { json(&result)? } else { solve_text(&input, &result) }))
        }
        Command::Sweep(args) => sweep(args, notes),
        Command::Verify { samples, seed, output } => {
            no_csv(output, "verify")?;
            if *samples == 0 {
                return Err(CliError::Usage("--samples must be at least 1".into()));
            }
            let summary = run_verify(*samples, *seed)?;
            let text = if output.json { json(&summary)? } else { verify_text(&summary) };
            let failed = (!summary.passed).then(|| format!("verification exceeded {:e}", summary.threshold));
            Ok(Rendered { text, failed })
        }
        Command::Examples { output } => {
            no_csv(output, "examples")?;
            let checks = reference_checks()?;
            let text = if output.json { json(&checks)? } else { examples_text(&checks) };
            let bad = checks.iter().filter(|c| !c.pass).count();
            Ok(Rendered { text, failed: (bad > 0).then(|| format!("{bad} reference checks failed")) })
        }
    }
}

fn analyze_text(r: &MetricsReport) -> String {
    let p = &r.params;
    let mut s = String::new();
    let _ = writeln!(s, "state        theta={} phi={} psi={} x={} y={} mu={} nu={}", p.theta, p.phi, p.psi, p.x, p.y, p.mu, p.nu);
    let _ = writeln!(s, "class        {}", r.rank);
    let _ = writeln!(s, "{:<12} {:>20} {:>20}", "", "closed", "oracle");
    for (name, closed, oracle) in [
        ("purity", r.purity_closed, r.purity_oracle),
        ("concurrence", r.concurrence_closed, r.concurrence_oracle),
        ("fidelity", r.fidelity_closed, r.fidelity_oracle),
        ("uhlmann", r.uhlmann_closed, r.uhlmann_oracle),
    ] {
        let _ = writeln!(s, "{name:<12} {closed:>20.15} {oracle:>20.15}");
    }
    let _ = writeln!(s, "nearest bell {}", r.uhlmann_argmax);
    let _ = writeln!(s, "max gap      {:e}", r.max_abs_discrepancy);
    s
}

fn solve_text(input: &RelationInput, r: &InverseSolveResult) -> String {
    let mut s = String::new();
    let chosen = r.chosen();
    let _ = writeln!(s, "relation     {} ({})", r.relation, r.relation.class());
    let _ = writeln!(s, "target       P={} C={}", input.purity, input.concurrence);
    let _ = writeln!(s, "fidelity     {}", r.optimal_fidelity);
    for root in &r.roots {
        let mark = if std::ptr::eq(root, chosen) { "*" } else { " " };
        let p = &root.params;
        let _ = writeln!(
            s,
            "{mark} sin2theta={} ({}) F={} theta={} phi={} psi={} x={} y={}",
            root.root, root.branch, root.fidelity, p.theta, p.phi, p.psi, p.x, p.y
        );
    }
    if !r.rejected.is_empty() {
        let _ = writeln!(s, "rejected     {} candidate roots", r.rejected.len());
    }
    s
}

fn verify_text(v: &VerifySummary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "seed {} samples/rank {}", v.seed, v.samples_per_rank);
    let _ = writeln!(s, "{:<6} {:>10} {:>10} {:>10} {:>10}", "rank", "purity", "concurr.", "fidelity", "uhlmann");
    for r in &v.ranks {
        let g = r.gaps;
        let _ = writeln!(s, "{:<6} {:>10.1e} {:>10.1e} {:>10.1e} {:>10.1e}", r.rank, g.purity, g.concurrence, g.fidelity, g.uhlmann);
    }
    let _ = writeln!(s, "phase deviation {:.1e}, pure-state law {:.1e}", v.phase_deviation, v.pure_law_deviation);
    let _ = writeln!(s, "{} (threshold {:e})", if v.passed { "PASS" } else { "FAIL" }, v.threshold);
    s
}

#[derive(Debug, Serialize)]
pub struct ReferenceCheck {
    pub name: String,
    pub expected: f64,
    pub got: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: impl Into<String>, got: f64, expected: f64, tolerance: f64) -> ReferenceCheck {
    ReferenceCheck { name: name.into(), expected, got, tolerance, pass: (got - expected).abs() < tolerance }
}

fn reference_checks() -> Result<Vec<ReferenceCheck>, CliError> {
    let gamma1 = XParams::new(FRAC_PI_2, FRAC_PI_4, 0.0, 0.0, 1.0 / 36.0, 0.0, PI)?;
    let gamma2 = XParams::new((2.0f64 / 3.0).sqrt().acos(), FRAC_PI_4, 0.0, 0.0, 1.0 / 36.0, 0.0, 0.0)?;
    let mut out = Vec::new();
    for (name, state, f, r) in [("gamma1", gamma1, 7.0 / 9.0, 2.0 / 3.0), ("gamma2", gamma2, 2.0 / 3.0, 1.0 / 3.0)] {
        let rep = report(&state)?;
        out.push(check(format!("{name} purity"), rep.purity_oracle, 5.0 / 9.0, 1e-12));
        out.push(check(format!("{name} concurrence"), rep.concurrence_oracle, 1.0 / 3.0, 1e-12));
        out.push(check(format!("{name} fidelity"), rep.fidelity_oracle, f, 1e-12));
        out.push(check(format!("{name} uhlmann"), rep.uhlmann_oracle, r, 1e-12));
    }
    let a = rank2_fidelity(RankKind::Third, 0.2, 0.6, 0.001)?;
    let b = rank2_fidelity(RankKind::Third, 0.15, 0.7, 0.001)?;
    out.push(check("rank2k3 P=0.6 C=0.2 y=0.001", a, 0.6623, 5e-4));
    out.push(check("rank2k3 P=0.7 C=0.15 y=0.001", b, 0.6765, 5e-4));
    out.push(check("rank2k3 purer pair wins", f64::from(u8::from(b > a)), 1.0, 0.5));
    let c = rank3_kind1_fidelity(0.6, 0.2, FRAC_PI_4, FRAC_PI_2)?;
    let d = rank3_kind1_fidelity(0.64, 0.22, FRAC_PI_2, 2.0 * PI / 25.0)?;
    out.push(check("rank3k1 P=0.6 C=0.2", c, 0.6898, 5e-4));
    out.push(check("rank3k1 P=0.64 C=0.22", d, 0.6612, 5e-4));
    out.push(check("rank3k1 less pure, less entangled pair wins", f64::from(u8::from(c > d)), 1.0, 0.5));
    Ok(out)
}

fn examples_text(checks: &[ReferenceCheck]) -> String {
    let mut s = String::new();
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in checks {
        let _ = writeln!(
            s,
            "{} {:<width$}  got {:.6}  expected {:.6}  tol {:e}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.got,
            c.expected,
            c.tolerance
        );
    }
    s
}

fn custom_spec(args: &SweepArgs) -> Result<SweepSpec, CliError> {
    let (Some(relation), Some(vary), Some(lo), Some(hi)) = (&args.relation, &args.vary, args.lo, args.hi) else {
        return Err(CliError::Usage("give --figure, or --relation with --vary, --lo and --hi".into()));
    };
    let relation: SweepRelation = relation.parse()?;
    let variable: SweepVariable = vary.parse()?;
    let mut spec = SweepSpec::new(relation, variable, lo, hi, args.points.unwrap_or(PRESET_POINTS));
    let angle = |v: f64| to_radians(v, args.degrees);
    for (key, value) in [
        ("P", args.purity),
        ("C", args.concurrence),
        ("phi", args.phi.map(angle)),
        ("psi", args.psi.map(angle)),
        ("x", args.x),
        ("y", args.y),
        ("e", args.e),
        ("f", args.f),
    ] {
        if let Some(v) = value {
            spec = spec.with(key, v);
        }
    }
    Ok(spec)
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    spec: &'a SweepSpec,
    rows: &'a [xfid_core::SweepRow],
}

fn sweep(args: &SweepArgs, notes: &mut Vec<String>) -> Result<Rendered, CliError> {
    let spec = match args.figure {
        Some(id) => {
            let mut spec = figure_preset(id)?;
            if let Some(n) = args.points {
                spec.points = n;
            }
            spec
        }
        None => custom_spec(args)?,
    };
    if let Some(note) = &spec.note {
        notes.push(note.clone());
    }
    let rows = run_sweep(&spec)?;
    let skipped = rows.iter().filter(|r| r.skipped).count();
    notes.push(format!(
        "{} over {} in [{}, {}]: {} rows, {skipped} skipped, max oracle residual {:e}",
        spec.relation,
        spec.variable.key(),
        spec.lo,
        spec.hi,
        rows.len(),
        max_residual(&rows)
    ));
    if let Some(trend) = spec.trend {
        let broken = violations(&rows, trend, xfid_core::sweep::fidelity_column).len();
        if broken > 0 {
            notes.push(format!("{broken} steps break the expected {trend:?} trend"));
        }
    }
    let text = if args.output.json {
        json(&SweepDocument { spec: &spec, rows: &rows })?
    } else {
        let mut buf = Vec::new();
        emit_csv(&spec, &rows, &mut buf)?;
        String::from_utf8(buf).expect("CSV is ASCII")
    };
    Ok(Rendered::ok(text))
}
