//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p replicator-cli --test acceptance`.

// NaN must fail a check, so conditions are negated as written.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use replicator_cli::OutputRecord;
use replicator_core::*;

const R: f64 = 0.2;
const SEED: u64 = 42;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn lin(k: f64) -> InteractionStrength {
    InteractionStrength::linear(k).unwrap()
}

fn con(p: f64) -> InteractionStrength {
    InteractionStrength::constant(p).unwrap()
}

fn ensemble(strength: InteractionStrength, integrator: &IntegratorConfig) -> EnsembleResult {
    run_ensemble(&EnsembleConfig::new(R, strength, SEED), integrator).unwrap()
}

fn stable_locations(rep: &RegimeReport) -> Vec<f64> {
    rep.fixed_points
        .iter()
        .filter(|f| f.stability == Stability::Stable)
        .map(|f| f.location)
        .collect()
}

/// Roots of g in (0, 1) by sign-change bisection on a uniform grid.
fn bisection_roots(model: &ModelInstance, cells: usize) -> Vec<f64> {
    let g = |x: f64| model.growth_function(x).unwrap();
    let mut roots = Vec::new();
    for i in 0..cells {
        let (mut a, mut b) = (i as f64 / cells as f64, (i + 1) as f64 / cells as f64);
        if g(a) * g(b) > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(a) * g(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

fn c1_thresholds() -> Check {
    let t = critical_thresholds(R).unwrap();
    ensure!((t.k1 - 1.0 / 1.2).abs() <= 1e-12, "k1 = {}", t.k1);
    ensure!((t.k2 - 1.5).abs() <= 1e-12, "k2 = {}", t.k2);
    ensure!(
        (t.k2 - 0.25 * (1.0 + 1.0 / R)).abs() <= 1e-12,
        "k2 forms disagree"
    );
    Ok(format!("k1 = {}, k2 = {}", t.k1, t.k2))
}

fn c2_constant_regimes() -> Check {
    let rep = classify_regime(con(0.5), R).unwrap();
    ensure!(
        rep.regime == Regime::Bistable,
        "p=0.5 regime {}",
        rep.regime
    );
    let sep = rep.fixed_points[1];
    let expected = R / ((1.0 + R) * (1.0 - 0.5));
    ensure!(
        sep.stability == Stability::Unstable && (sep.location - expected).abs() <= 1e-9,
        "separatrix {:?}",
        sep
    );
    ensure!(
        (sep.location - 1.0 / 3.0).abs() <= 1e-9,
        "separatrix != 1/3"
    );
    ensure!(stable_locations(&rep) == [0.0, 1.0], "p=0.5 stable set");

    let rep = classify_regime(con(0.9), R).unwrap();
    ensure!(
        rep.regime == Regime::DefectorDominance,
        "p=0.9 regime {}",
        rep.regime
    );
    ensure!(
        internal_fixed_point_constant(0.9, R).unwrap().is_none(),
        "p=0.9 interior point"
    );
    ensure!(stable_locations(&rep) == [0.0], "p=0.9 stable set");

    let euler = IntegratorConfig::default();
    let res = ensemble(con(0.5), &euler);
    for (i, t) in res.trajectories.iter().enumerate() {
        let want = if t.initial_state() < sep.location {
            0.0
        } else {
            1.0
        };
        ensure!(
            res.attractor_of(i) == Some(want),
            "p=0.5 member {i} from {} ended at {}",
            t.initial_state(),
            t.final_state()
        );
    }
    let res = ensemble(con(0.9), &euler);
    for i in 0..res.trajectories.len() {
        ensure!(res.attractor_of(i) == Some(0.0), "p=0.9 member {i}");
    }
    Ok("p=0.5 bistable, separatrix 1/3; p=0.9 defectors win; 2x50 members as predicted".into())
}

fn c3_linear_partition() -> Check {
    let grid = linspace(0.1, 2.0, 1000);
    let cell = grid[1] - grid[0];
    let rows = bifurcation_sweep(R, &grid, StrengthKind::Linear);
    let regimes: Vec<Regime> = rows
        .iter()
        .map(|r| r.as_ref().map(|r| r.regime).map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;

    let mut distinct: Vec<Regime> = regimes
        .iter()
        .copied()
        .filter(|r| !r.is_critical())
        .collect();
    distinct.dedup();
    ensure!(
        distinct
            == [
                Regime::Bistable,
                Regime::Coexistence,
                Regime::DefectorDominance
            ],
        "regime sequence {:?}",
        distinct
    );

    let t = critical_thresholds(R).unwrap();
    let changes: Vec<f64> = (1..grid.len())
        .filter(|&i| regimes[i] != regimes[i - 1])
        .map(|i| 0.5 * (grid[i] + grid[i - 1]))
        .collect();
    ensure!(changes.len() == 2, "transitions at {:?}", changes);
    ensure!(
        (changes[0] - t.k1).abs() <= cell,
        "lower transition {} vs {}",
        changes[0],
        t.k1
    );
    ensure!(
        (changes[1] - t.k2).abs() <= cell,
        "upper transition {} vs {}",
        changes[1],
        t.k2
    );
    Ok(format!(
        "transitions at {:.5} and {:.5} (cell {:.5})",
        changes[0], changes[1], cell
    ))
}

fn c4_coexistence() -> Check {
    let roots = internal_fixed_points_linear(1.0, R).unwrap();
    ensure!(roots.len() == 2, "roots {:?}", roots);
    let model = ModelInstance::reduced(R, lin(1.0)).unwrap();
    let oracle = bisection_roots(&model, 10_000);
    ensure!(oracle.len() == 2, "oracle roots {:?}", oracle);
    for ((x, o), lit) in roots.iter().zip(&oracle).zip([0.2113249, 0.7886751]) {
        ensure!((x - o).abs() <= 1e-6, "root {x} vs bisection {o}");
        ensure!((x - lit).abs() <= 1e-6, "root {x} vs {lit}");
    }

    let start = Instant::now();
    let res = ensemble(lin(1.0), &IntegratorConfig::default());
    let elapsed = start.elapsed();
    let mut above = 0;
    for t in &res.trajectories {
        if t.initial_state() > roots[0] {
            above += 1;
            ensure!(
                matches!(t.status, Termination::Converged(_)),
                "status {:?}",
                t.status
            );
            ensure!(
                (t.final_state() - roots[1]).abs() <= 1e-3,
                "member from {} ended at {}",
                t.initial_state(),
                t.final_state()
            );
        }
    }
    ensure!(elapsed.as_secs_f64() < 1.0, "ensemble took {:?}", elapsed);
    Ok(format!(
        "x1 = {:.7}, x2 = {:.7}; {above} members reach x2 in {:?}",
        roots[0], roots[1], elapsed
    ))
}

fn c5_semi_stable() -> Check {
    let roots = internal_fixed_points_linear(1.5, R).unwrap();
    ensure!(
        roots.len() == 1 && (roots[0] - 1.0 / 3.0).abs() <= 1e-9,
        "double root {:?}",
        roots
    );
    let model = ModelInstance::reduced(R, lin(1.5)).unwrap();
    let fp = classify_fixed_point(&model, roots[0]).unwrap();
    ensure!(
        fp.stability == Stability::SemiStable,
        "classified {:?}",
        fp.stability
    );

    let res = ensemble(lin(1.5), &IntegratorConfig::default());
    let mut starts: Vec<f64> = res
        .trajectories
        .iter()
        .map(|t| t.initial_state())
        .filter(|&x| x > 1.0 / 3.0)
        .collect();
    starts.push(0.6);
    let mut worst = 1.0f64;
    for &x0 in &starts {
        let t = integrate(&model, x0, &IntegratorConfig::default()).unwrap();
        let ratios = gap_ratios(&t, 100);
        ensure!(
            ratios.len() >= 100,
            "only {} ratios from {x0}",
            ratios.len()
        );
        let tail = &ratios[ratios.len() - 100..];
        ensure!(
            tail.iter().all(|r| (0.9..=1.0).contains(r)),
            "gap ratios from {x0} leave [0.9, 1]"
        );
        worst = tail.iter().copied().fold(worst, f64::min);
        let est = estimate_attractor(&t).unwrap();
        ensure!(est.slow_decay, "no slow decay flagged from {x0}");
        ensure!(
            (est.location - 1.0 / 3.0).abs() <= 1e-3,
            "ended at {}",
            est.location
        );
    }
    Ok(format!(
        "double root 1/3 semi-stable; {} trajectories, min tail ratio {worst:.6}",
        starts.len()
    ))
}

fn c6_vieta() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut n = 0;
    while n < 1000 {
        let r: f64 = rng.gen_range(0.01..0.99);
        let k: f64 = rng.gen_range(0.05..critical_thresholds(r).unwrap().k2);
        let Some((a, b)) = linear_growth_roots(k, r).unwrap() else {
            return Err(format!("no real roots at k={k}, r={r}"));
        };
        ensure!((a + b - 1.0 / k).abs() <= 1e-9, "sum at k={k}, r={r}");
        ensure!(
            (a * b - r / (k * (1.0 + r))).abs() <= 1e-9,
            "product at k={k}, r={r}"
        );
        n += 1;
    }
    Ok(format!("{n} draws"))
}

fn c7_derivative() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let r = rng.gen_range(0.01..0.99);
        let s = if i % 2 == 0 {
            con(rng.gen_range(0.0..=1.0))
        } else {
            lin(rng.gen_range(0.05..5.0))
        };
        let model = ModelInstance::reduced(r, s).unwrap();
        for j in 0..1000 {
            let x = j as f64 / 999.0;
            let fd =
                (model.replicator_velocity(x + h) - model.replicator_velocity(x - h)) / (2.0 * h);
            let err = (model.velocity_derivative(x).unwrap() - fd).abs();
            worst = worst.max(err);
            ensure!(err <= 1e-6, "{s:?}, r={r}, x={x}: error {err}");
        }
    }
    Ok(format!("max abs error {worst:.2e}"))
}

fn c8_integrator_oracle() -> Check {
    let euler = IntegratorConfig::default();
    let rk4 = IntegratorConfig::rk4_reference();
    for k in [0.5, 1.0, 1.2, 2.0] {
        let a = ensemble(lin(k), &euler);
        let b = ensemble(lin(k), &rk4);
        ensure!(
            a.unresolved == 0 && b.unresolved == 0,
            "k={k}: unresolved members"
        );
        for i in 0..a.trajectories.len() {
            ensure!(
                a.attractor_of(i) == b.attractor_of(i),
                "k={k} member {i}: euler {:?} rk4 {:?}",
                a.attractor_of(i),
                b.attractor_of(i)
            );
        }
    }
    Ok("4 x 50 members agree".into())
}

fn c9_classic_limits() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let s: f64 = rng.gen_range(-5.0..5.0);
        let p = s + rng.gen_range(0.01..3.0);
        let r = p + rng.gen_range(0.01..3.0);
        let t = r + rng.gen_range(0.01..3.0);
        let m = PayoffMatrix::prisoners_dilemma(r, s, t, p).unwrap();
        let model = ModelInstance::new(m, InteractionStrength::Constant(1.0)).unwrap();
        for j in 1..1000 {
            let x = j as f64 / 1000.0;
            let v = model.replicator_velocity(x);
            ensure!(v < 0.0, "{m:?} at x={x}: velocity {v}");
        }
    }
    for _ in 0..100 {
        let r = rng.gen_range(0.01..0.99);
        let model = ModelInstance::reduced(r, InteractionStrength::Constant(0.0)).unwrap();
        for j in 0..=1000 {
            let x = j as f64 / 1000.0;
            let expected = x * (1.0 - x) * (x - r + x * r);
            let v = model.replicator_velocity(x);
            ensure!((v - expected).abs() <= 1e-12, "r={r}, x={x}");
        }
        let x = internal_fixed_point_constant(0.0, r).unwrap();
        ensure!(
            x.is_some_and(|x| (x - r / (1.0 + r)).abs() <= 1e-12),
            "interior point {x:?} at r={r}"
        );
    }
    Ok("100 PD matrices favour defectors; f=0 field and interior point r/(1+r)".into())
}

fn c10_donation() -> Check {
    let d = DonationGame::new(5.0, 1.0).unwrap();
    let mapped = donation_to_reduced(&d).r();
    for k in linspace(0.1, 2.0, 1000) {
        let a = classify_regime(lin(k), mapped).unwrap();
        let b = classify_regime(lin(k), R).unwrap();
        ensure!(a == b, "reports differ at k={k}");
    }

    let out = Command::new(env!("CARGO_BIN_EXE_replicator"))
        .args(["thresholds", "--b", "5", "--c", "1", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "thresholds exited {:?}", out.status);
    let rec = OutputRecord::from_json(&String::from_utf8_lossy(&out.stdout))
        .map_err(|e| e.to_string())?;
    let lower = rec.results["window"]["lower"].as_f64().unwrap_or(f64::NAN);
    let upper = rec.results["window"]["upper"].as_f64().unwrap_or(f64::NAN);
    ensure!((lower - 5.0 / 6.0).abs() <= 1e-12, "lower {lower}");
    ensure!((upper - 1.5).abs() <= 1e-12, "upper {upper}");
    let t = critical_thresholds(R).unwrap();
    ensure!(
        (lower - t.k1).abs() <= 1e-12 && (upper - t.k2).abs() <= 1e-12,
        "window != (k1, k2)"
    );
    Ok(format!(
        "r = c/b = {mapped}; printed window ({lower}, {upper})"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 thresholds", c1_thresholds),
        ("2 constant-strength regimes", c2_constant_regimes),
        ("3 linear-strength regime partition", c3_linear_partition),
        ("4 coexistence fixed points", c4_coexistence),
        ("5 semi-stable double root", c5_semi_stable),
        ("6 Vieta relations", c6_vieta),
        ("7 derivative consistency", c7_derivative),
        ("8 Euler/RK4 attractor agreement", c8_integrator_oracle),
        ("9 classic limits", c9_classic_limits),
        ("10 donation mapping", c10_donation),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
