use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use replicator_core::{
    bifurcation_sweep, classify_regime, critical_thresholds, linspace, run_ensemble,
    EnsembleConfig, IntegratorConfig, InteractionStrength, Method, Origin, Regime, StrengthKind,
};

use crate::args::{AnalyzeArgs, SimulateArgs, SweepArgs, ThresholdsArgs, DEFAULT_R};
use crate::csv_io::{self, SummaryRow, SweepRecord, TrajectoryRow};
use crate::error::Result;
use crate::record::OutputRecord;

/// What a command produced: the record plus its human-readable rendering.
#[derive(Debug)]
pub struct Outcome {
    pub record: OutputRecord,
    pub text: String,
    /// Non-fatal problems, reported on stderr.
    pub warnings: Vec<String>,
}

fn describe(strength: InteractionStrength) -> String {
    match strength {
        InteractionStrength::Constant(p) => format!("f(x) = p, p = {p}"),
        InteractionStrength::LinearInFrequency(k) => format!("f(x) = k x, k = {k}"),
    }
}

fn strength_json(strength: InteractionStrength) -> serde_json::Value {
    match strength {
        InteractionStrength::Constant(p) => json!({ "p": p }),
        InteractionStrength::LinearInFrequency(k) => json!({ "k": k }),
    }
}

pub fn cmd_thresholds(args: &ThresholdsArgs) -> Result<Outcome> {
    let game = args.game.reduced(None)?;
    let t = critical_thresholds(game.r())?;
    let mut text = String::new();
    writeln!(text, "r  = {}", game.r()).unwrap();
    writeln!(text, "k1 = {}  (1/(1+r))", t.k1).unwrap();
    writeln!(text, "k2 = {}  ((1+r)/(4r))", t.k2).unwrap();

    let mut params = json!({ "r": game.r() });
    let mut results = json!({ "k1": t.k1, "k2": t.k2 });
    if let Some(d) = args.game.donation()? {
        let (lower, upper) = d.coexistence_window();
        writeln!(
            text,
            "coexistence window for b = {}, c = {}: {} < k < {}",
            d.benefit(),
            d.cost(),
            lower,
            upper
        )
        .unwrap();
        params["b"] = json!(d.benefit());
        params["c"] = json!(d.cost());
        results["window"] = json!({ "lower": lower, "upper": upper });
    }
    Ok(Outcome {
        record: OutputRecord::new("thresholds", params, results),
        text,
        warnings: Vec::new(),
    })
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let game = args.game.reduced(Some(DEFAULT_R))?;
    let strength = args.strength.strength();
    let report = classify_regime(strength, game.r())?;
    if let Some(path) = &args.out {
        csv_io::write_fixed_points(path, &report)?;
    }

    let mut text = String::new();
    writeln!(text, "r = {}, {}", report.r, describe(strength)).unwrap();
    writeln!(
        text,
        "regime: {}  (k1 = {}, k2 = {})",
        report.regime, report.thresholds.k1, report.thresholds.k2
    )
    .unwrap();
    writeln!(text, "{:<22} {:<9} stability", "x*", "origin").unwrap();
    for fp in &report.fixed_points {
        let origin = match fp.origin {
            Origin::Boundary => "boundary",
            Origin::Internal => "internal",
        };
        writeln!(text, "{:<22} {:<9} {}", fp.location, origin, fp.stability).unwrap();
    }

    let mut params = strength_json(strength);
    params["r"] = json!(report.r);
    let results = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome {
        record: OutputRecord::new("analyze", params, results),
        text,
        warnings: Vec::new(),
    })
}

/// Consecutive grid rows whose regimes differ.
pub fn transitions(rows: &[SweepRecord]) -> Vec<(f64, f64, Regime, Regime)> {
    let valid: Vec<(f64, Regime)> = rows
        .iter()
        .filter_map(|r| r.regime.map(|g| (r.param, g)))
        .collect();
    valid
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[0].0, w[1].0, w[0].1, w[1].1))
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Outcome> {
    let game = args.game.reduced(Some(DEFAULT_R))?;
    let (kind, from, to) = if args.linear {
        (
            StrengthKind::Linear,
            args.from.unwrap_or(0.1),
            args.to.unwrap_or(2.0),
        )
    } else {
        (
            StrengthKind::Constant,
            args.from.unwrap_or(0.0),
            args.to.unwrap_or(1.0),
        )
    };
    let grid = linspace(from, to, args.points);
    let results = bifurcation_sweep(game.r(), &grid, kind);

    let mut warnings = Vec::new();
    let rows: Vec<SweepRecord> = grid
        .iter()
        .zip(&results)
        .map(|(&v, res)| match res {
            Ok(row) => SweepRecord::from_row(v, Some(row)),
            Err(e) => {
                warnings.push(format!("parameter {v}: {e}"));
                SweepRecord::from_row(v, None)
            }
        })
        .collect();
    if let Some(path) = &args.out {
        csv_io::write_sweep(path, &rows)?;
    }

    let name = if args.linear { "k" } else { "p" };
    let mut text = String::new();
    writeln!(
        text,
        "r = {}, sweeping {name} over [{from}, {to}] ({} points)",
        game.r(),
        args.points
    )
    .unwrap();
    writeln!(text, "{name:<22} {:<19} fixed points", "regime").unwrap();
    for row in &rows {
        let pts: Vec<String> = row
            .points
            .iter()
            .map(|(x, s)| format!("{x:.6}:{s}"))
            .collect();
        let regime = row.regime.map_or("error", |r| r.as_str());
        writeln!(text, "{:<22} {:<19} {}", row.param, regime, pts.join(" ")).unwrap();
    }
    let trans = transitions(&rows);
    for (a, b, from_r, to_r) in &trans {
        writeln!(text, "transition {from_r} -> {to_r} between {a} and {b}").unwrap();
    }

    let params = json!({
        "variant": if args.linear { "linear" } else { "constant" },
        "r": game.r(), "from": from, "to": to, "points": args.points,
    });
    let results = json!({
        "rows": rows.iter().map(|r| json!({
            "param": r.param,
            "regime": r.regime.map(|g| g.as_str()),
            "fixed_points": r.points.iter().map(|(x, s)| json!({"x": x, "stability": s.as_str()})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "transitions": trans.iter().map(|(a, b, f, t)| json!({
            "after": a, "before": b, "from": f.as_str(), "to": t.as_str(),
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        record: OutputRecord::new("sweep", params, results),
        text,
        warnings,
    })
}

fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let game = args.game.reduced(Some(DEFAULT_R))?;
    let strength = args.strength.strength();
    let method: Method = args.method.into();
    let integrator = IntegratorConfig {
        method,
        step: args.step.unwrap_or(match method {
            Method::PaperEuler => 1.0,
            Method::RungeKutta4 => 0.01,
        }),
        max_steps: args.max_steps,
        tolerance: args.tolerance,
        sample_stride: args.stride,
    };
    let ensemble = EnsembleConfig {
        members: args.members,
        seed: args.seed,
        r: game.r(),
        strength,
        bin_radius: args.bin_radius,
    };
    let res = run_ensemble(&ensemble, &integrator)?;

    let summary: Vec<SummaryRow> = res
        .trajectories
        .iter()
        .enumerate()
        .map(|(i, t)| SummaryRow {
            member: i,
            x0: t.initial_state(),
            x_final: t.final_state(),
            attractor: res.attractor_of(i),
            slow_decay: res.estimates[i].is_some_and(|e| e.slow_decay),
        })
        .collect();

    let method_name = match method {
        Method::PaperEuler => "euler",
        Method::RungeKutta4 => "rk4",
    };
    let mut comments = vec![
        ("seed".to_string(), args.seed.to_string()),
        ("r".to_string(), csv_io::fmt_f64(game.r())),
    ];
    match strength {
        InteractionStrength::Constant(p) => comments.push(("p".into(), csv_io::fmt_f64(p))),
        InteractionStrength::LinearInFrequency(k) => {
            comments.push(("k".into(), csv_io::fmt_f64(k)))
        }
    }
    comments.extend([
        ("members".to_string(), args.members.to_string()),
        ("method".to_string(), method_name.to_string()),
        ("step".to_string(), csv_io::fmt_f64(integrator.step)),
        ("max_steps".to_string(), args.max_steps.to_string()),
    ]);

    let summary_out = args
        .summary
        .clone()
        .or_else(|| args.out.as_deref().map(summary_path));
    if let Some(path) = &args.out {
        let rows = res.trajectories.iter().enumerate().flat_map(|(m, t)| {
            t.samples.iter().map(move |s| TrajectoryRow {
                member: m,
                t: s.t,
                x: s.x,
            })
        });
        csv_io::write_trajectories(path, &comments, rows)?;
    }
    if let Some(path) = &summary_out {
        if let Err(e) = csv_io::write_summary(path, &comments, &summary) {
            if let Some(out) = &args.out {
                let _ = std::fs::remove_file(out);
            }
            return Err(e);
        }
    }

    let mut text = String::new();
    writeln!(
        text,
        "r = {}, {}, {} members, seed {}, {method_name} step {}",
        game.r(),
        describe(strength),
        args.members,
        args.seed,
        integrator.step
    )
    .unwrap();
    writeln!(text, "regime: {}", res.report.regime).unwrap();
    for b in &res.basins {
        writeln!(
            text,
            "basin x* = {:<20} ({}) : {}",
            b.location, b.stability, b.count
        )
        .unwrap();
    }
    if res.unresolved > 0 {
        writeln!(text, "unresolved: {}", res.unresolved).unwrap();
    }
    writeln!(
        text,
        "{:<6} {:<20} {:<22} {:<20} slow_decay",
        "member", "x0", "x_final", "attractor"
    )
    .unwrap();
    for s in &summary {
        let att = s.attractor.map_or("-".to_string(), |a| a.to_string());
        writeln!(
            text,
            "{:<6} {:<20} {:<22} {:<20} {}",
            s.member, s.x0, s.x_final, att, s.slow_decay
        )
        .unwrap();
    }

    let mut params = strength_json(strength);
    params["r"] = json!(game.r());
    params["seed"] = json!(args.seed);
    params["members"] = json!(args.members);
    params["method"] = json!(method_name);
    params["step"] = json!(integrator.step);
    params["max_steps"] = json!(args.max_steps);
    params["tolerance"] = json!(args.tolerance);
    params["bin_radius"] = json!(args.bin_radius);
    let results = json!({
        "regime": res.report.regime.as_str(),
        "basins": res.basins.iter().map(|b| json!({
            "location": b.location, "stability": b.stability.as_str(), "count": b.count,
        })).collect::<Vec<_>>(),
        "unresolved": res.unresolved,
        "members": summary,
    });
    let warnings = if res.unresolved > 0 {
        vec![format!(
            "{} members ended farther than {} from every fixed point",
            res.unresolved, args.bin_radius
        )]
    } else {
        Vec::new()
    };
    Ok(Outcome {
        record: OutputRecord::new("simulate", params, results),
        text,
        warnings,
    })
}
