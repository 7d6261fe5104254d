//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dsair::abm::{abm_run, l1_distance, AbmConfig};
use dsair::analysis::{classify_zone, risk_dominant, transition_graph, zone_boundaries, Zone};
use dsair::commands::{reproduce, Figure};
use dsair::config::RunConfig;
use dsair::evolution::{analyse, fixation_2x2, unsafe_frequency};
use dsair::export::sweep_table;
use dsair::payoff::build_payoff_matrix;
use dsair::sweep::{run_sweep, run_sweep_with_workers, Axis, SweepOutput, SweepParam, SweepSpec};
use dsair::{make_scenario, EvoParams, RaceParams, Regime, Scenario};

use common::{absorption_probability, direct_race_matrix};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, fail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(fail())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_secs, || {
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

fn pr_sweep(scenarios: Vec<Scenario>, race: RaceParams, evo: EvoParams) -> SweepSpec {
    SweepSpec {
        scenarios,
        axes: vec![Axis::new(SweepParam::DisasterRisk, 0.0, 1.0, 101)],
        race,
        evo,
        outputs: vec![
            SweepOutput::Stationary,
            SweepOutput::UnsafeFrequency,
            SweepOutput::Zone,
        ],
    }
}

fn punishment(s_alpha: f64, s_beta: f64) -> RaceParams {
    RaceParams {
        sanction_cost: s_alpha,
        sanction_effect: s_beta,
        ..RaceParams::default()
    }
}

fn pp(commit: bool) -> Scenario {
    make_scenario(Regime::Peer, commit, false).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let scenario = make_scenario(Regime::None, false, false).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let params = RaceParams {
            benefit: rng.random_range(0.0..50.0),
            safety_cost: rng.random_range(0.0..10.0),
            unsafe_speed: rng.random_range(1.001..10.0),
            prize: rng.random_range(0.0..1e6),
            rounds: rng.random_range(1..1000),
            disaster_risk: rng.random_range(0.0..=1.0),
            ..RaceParams::default()
        };
        let matrix = build_payoff_matrix(&scenario, &params).map_err(|e| e.to_string())?;
        let direct = direct_race_matrix(&params);
        for (i, row) in direct.iter().enumerate() {
            for (j, &want) in row.iter().enumerate() {
                let got = matrix.get(i, j);
                if want != 0.0 || got != 0.0 {
                    worst = worst.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE));
                }
            }
        }
    }
    check(worst <= 1e-12, || format!("max relative error {worst:e}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("1000 parameter sets, max relative error {worst:e}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (lower, upper) = zone_boundaries(1.5).map_err(|e| e.to_string())?;
    let ulps = |a: f64, b: f64| (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs();
    check(
        ulps(lower, 1.0 / 3.0) <= 1 && ulps(upper, 7.0 / 9.0) <= 1,
        || format!("boundaries ({lower:?}, {upper:?})"),
    )?;

    // Along every s column the zones run III, II, I with increasing p_r and
    // switch where s(1 - p_r) and 3s(1 - p_r) cross 1.
    let risks = Axis::new(SweepParam::DisasterRisk, 0.0, 1.0, 101).values();
    let speeds = Axis::new(SweepParam::UnsafeSpeed, 1.05, 5.05, 81).values();
    let mut checked = 0;
    for &s in &speeds {
        let mut previous = Zone::III;
        for &p in &risks {
            let zone = classify_zone(s, p).map_err(|e| e.to_string())?;
            check(zone <= previous, || {
                format!("zones not ordered at s={s}, p_r={p}")
            })?;
            previous = zone;
            let gain = s * (1.0 - p);
            if (gain - 1.0).abs() < 1e-9 || (3.0 * gain - 1.0).abs() < 1e-9 {
                continue;
            }
            let expected = if gain > 1.0 {
                Zone::III
            } else if 3.0 * gain > 1.0 {
                Zone::II
            } else {
                Zone::I
            };
            check(zone == expected, || {
                format!("s={s}, p_r={p}: {zone} vs {expected}")
            })?;
            checked += 1;
        }
        check(previous == Zone::I, || format!("no zone I at s={s}"))?;
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!(
        "(1/3, 7/9) within 1 ulp, {checked} grid points classified"
    ))
}

fn criterion_3() -> Outcome {
    let scenario = make_scenario(Regime::None, false, false).unwrap();
    let dominant = |p: f64| {
        let race = RaceParams {
            disaster_risk: p,
            ..RaceParams::default()
        };
        let matrix = build_payoff_matrix(&scenario, &race).unwrap();
        risk_dominant(0, 1, &matrix)
    };
    check(!dominant(0.0) && dominant(1.0), || {
        "no flip on [0, 1]".into()
    })?;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dominant(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let flip = 0.5 * (lo + hi);
    let hand = 1.0 - 51.6 / 229.4;
    let zone_edge = 1.0 - 1.0 / 4.5;
    check((flip - hand).abs() < 1e-9, || {
        format!("flip {flip} vs {hand}")
    })?;
    check((flip - zone_edge).abs() < 0.01, || {
        format!("flip {flip} vs zone edge {zone_edge}")
    })?;
    Ok(format!("AS risk-dominant above p_r = {flip:.6}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let betas = [0.0, 0.1, 1.0, 10.0];
    let mut worst: f64 = 0.0;
    let mut worst_neutral: f64 = 0.0;
    for case in 0..200 {
        let pi = [(); 4].map(|_| rng.random_range(-1.0..1.0));
        let z = rng.random_range(5..=30);
        let beta = betas[case % betas.len()];
        let evo = EvoParams::new(z, beta).map_err(|e| e.to_string())?;
        let rho = fixation_2x2(pi[0], pi[1], pi[2], pi[3], &evo);
        let oracle = absorption_probability(pi, z, beta);
        worst = worst.max((rho - oracle).abs() / oracle);
        if beta == 0.0 {
            worst_neutral = worst_neutral.max((rho - 1.0 / f64::from(z)).abs());
        }
        let flat = fixation_2x2(pi[0], pi[0], pi[0], pi[0], &evo);
        worst_neutral = worst_neutral.max((flat - 1.0 / f64::from(z)).abs());
    }
    check(worst <= 1e-8, || format!("max relative error {worst:e}"))?;
    check(worst_neutral <= 1e-12, || {
        format!("neutral error {worst_neutral:e}")
    })?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "200 cases, max relative error {worst:e}, neutral error {worst_neutral:e}"
    ))
}

/// AU_out for p_r <= lo, PS on [mid_lo, mid_hi], AS_out for p_r >= hi.
fn argmax_pattern(beta: f64, margin: f64) -> Result<usize, String> {
    let scenario = pp(true);
    let names = scenario
        .names()
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>();
    let evo = EvoParams::new(100, beta).map_err(|e| e.to_string())?;
    let spec = pr_sweep(vec![scenario], punishment(0.3, 1.0), evo);
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let eps = 1e-9;
    for point in &result.blocks[0].points {
        let p = point.coordinates[0];
        let expected = if p <= 0.25 - margin + eps {
            "AU_out"
        } else if p >= 0.45 + margin - eps && p <= 0.65 - margin + eps {
            "PS"
        } else if p >= 0.85 + margin - eps {
            "AS_out"
        } else {
            continue;
        };
        let stationary = point.stationary.as_ref().ok_or("missing stationary")?;
        let got = &names[argmax(stationary)];
        check(got == expected, || {
            format!("beta={beta}, p_r={p}: argmax {got}, expected {expected}")
        })?;
        checked += 1;
    }
    Ok(checked)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let checked = argmax_pattern(1.0, 0.0)?;
    let spec = pr_sweep(vec![pp(true)], punishment(0.3, 1.0), EvoParams::default());
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    for point in &result.blocks[0].points {
        let p = point.coordinates[0];
        let u = point.unsafe_frequency.ok_or("missing unsafe frequency")?;
        match point.zone {
            Some(Zone::III) => check(u > 0.5, || format!("zone III p_r={p}: unsafe {u}"))?,
            Some(Zone::I) => check(u < 0.5, || format!("zone I p_r={p}: unsafe {u}"))?,
            _ => {}
        }
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "argmax pattern at {checked} grid points; zone III unsafe, zone I safe"
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let race = RaceParams {
        disaster_risk: 0.1,
        ..punishment(0.3, 1.0)
    };
    let evo = EvoParams::default();
    let mut freqs = Vec::new();
    for commit in [false, true] {
        let scenario = pp(commit);
        let matrix = build_payoff_matrix(&scenario, &race).map_err(|e| e.to_string())?;
        let result = analyse(&matrix, &evo).map_err(|e| e.to_string())?;
        freqs.push(unsafe_frequency(&result.stationary, &scenario));
        if commit {
            let graph = transition_graph(&result, evo.population, 0.02);
            check(graph.has_edge("PS", "AU_out"), || {
                "no PS -> AU_out edge".into()
            })?;
        }
    }
    check(freqs[0] < 0.5, || {
        format!("no-commitment unsafe {}", freqs[0])
    })?;
    check(freqs[1] > 0.5, || format!("commitment unsafe {}", freqs[1]))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "unsafe {:.4} without vs {:.4} with commitments, PS -> AU_out present",
        freqs[0], freqs[1]
    ))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let spec = pr_sweep(
        vec![pp(true), pp(false)],
        punishment(1.0, 1.0),
        EvoParams::default(),
    );
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for (with, without) in result.blocks[0].points.iter().zip(&result.blocks[1].points) {
        let p = with.coordinates[0];
        if !(0.4 - 1e-9..=0.7 + 1e-9).contains(&p) {
            continue;
        }
        let (a, b) = (
            with.unsafe_frequency.unwrap(),
            without.unsafe_frequency.unwrap(),
        );
        check(a <= b, || format!("p_r={p}: commit {a} > no-commit {b}"))?;
        checked += 1;
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "commitments never raise unsafe frequency at {checked} points"
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let spec = SweepSpec {
        scenarios: vec![
            make_scenario(Regime::Institutional, true, false).unwrap(),
            make_scenario(Regime::Institutional, false, false).unwrap(),
        ],
        axes: vec![
            Axis::new(SweepParam::UnsafeSpeed, 1.05, 5.05, 81),
            Axis::new(SweepParam::DisasterRisk, 0.0, 1.0, 101),
        ],
        race: RaceParams {
            sanction_effect: 1.0,
            ..RaceParams::default()
        },
        evo: EvoParams::default(),
        outputs: vec![SweepOutput::UnsafeFrequency, SweepOutput::Zone],
    };
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    let mut column = 0;
    for point in &result.blocks[0].points {
        if (point.coordinates[0] - 1.5).abs() > 1e-9 {
            continue;
        }
        let (p, u) = (point.coordinates[1], point.unsafe_frequency.unwrap());
        match point.zone.unwrap() {
            Zone::III => check(u > 0.5, || format!("commit, s=1.5, p_r={p}: unsafe {u}"))?,
            _ => check(u < 0.5, || format!("commit, s=1.5, p_r={p}: unsafe {u}"))?,
        }
        column += 1;
    }
    check(column == 101, || {
        format!("s=1.5 column has {column} points")
    })?;
    let over: Vec<_> = result.blocks[1]
        .points
        .iter()
        .filter(|pt| pt.zone == Some(Zone::III) && pt.unsafe_frequency.unwrap() < 0.5)
        .collect();
    check(!over.is_empty(), || {
        "no over-regulated zone III point without commitments".into()
    })?;
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "s=1.5 column follows the zones with commitments; {} over-regulated zone III points without",
        over.len()
    ))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut counts = Vec::new();
    for beta in [0.1, 10.0] {
        counts.push(argmax_pattern(beta, 0.05)?);
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "pattern holds at {} (beta=0.1) and {} (beta=10) points",
        counts[0], counts[1]
    ))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let scenario = make_scenario(Regime::None, false, false).unwrap();
    let evo = EvoParams::new(50, 1.0).map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    for p in [0.1, 0.6, 0.9] {
        let race = RaceParams {
            disaster_risk: p,
            ..RaceParams::default()
        };
        let analytic = analyse(&build_payoff_matrix(&scenario, &race).unwrap(), &evo)
            .map_err(|e| e.to_string())?
            .stationary;
        let mut distances: Vec<f64> = std::thread::scope(|scope| {
            let handles: Vec<_> = [1u64, 2, 3]
                .iter()
                .map(|&seed| {
                    let config = AbmConfig {
                        scenario: scenario.clone(),
                        race,
                        evo,
                        mutation: 1e-3,
                        steps: 10_000_000,
                        burn_in: 100_000,
                        seed,
                        trace_points: 0,
                    };
                    scope.spawn(move || abm_run(&config).map(|r| r.frequencies))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap().map(|f| l1_distance(&f, &analytic)))
                .collect::<Result<_, _>>()
        })
        .map_err(|e| e.to_string())?;
        distances.sort_by(f64::total_cmp);
        let median = distances[1];
        check(median < 0.05, || format!("p_r={p}: median L1 {median}"))?;
        report.push(format!("p_r={p}: {median:.4}"));
    }
    within(start.elapsed(), 600.0)?;
    Ok(format!("median L1 {}", report.join(", ")))
}

fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = fs::read_dir(a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        let x = fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = fs::read(b.join(name)).map_err(|e| e.to_string())?;
        check(x == y, || format!("{name:?} differs"))?;
    }
    Ok(names.len())
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = RunConfig::default();
    for run in ["first", "second"] {
        reproduce(Figure::Fig2, &config, &dir.path().join(run)).map_err(|e| e.to_string())?;
    }
    let files = same_tree(&dir.path().join("first"), &dir.path().join("second"))?;
    check(files > 0, || "reproduce wrote nothing".into())?;

    let spec = pr_sweep(
        vec![pp(true), pp(false)],
        punishment(0.3, 1.0),
        EvoParams::default(),
    );
    let serial = run_sweep_with_workers(&spec, 1).map_err(|e| e.to_string())?;
    let parallel = run_sweep_with_workers(&spec, 8).map_err(|e| e.to_string())?;
    for (x, y) in serial.blocks.iter().zip(&parallel.blocks) {
        check(sweep_table(&spec, x) == sweep_table(&spec, y), || {
            format!("{} differs between 1 and 8 workers", x.scenario)
        })?;
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "{files} reproduced files identical; 1 and 8 worker sweeps identical"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("baseline payoff matrix reconstruction", criterion_1),
        ("zone boundaries and zone map", criterion_2),
        ("risk-dominance flip near the zone I edge", criterion_3),
        (
            "fixation probability against birth-death solve",
            criterion_4,
        ),
        ("peer punishment with commitments over p_r", criterion_5),
        ("over-regulation at low risk", criterion_6),
        ("commitments in the lower dilemma zone", criterion_7),
        ("institutional punishment over (s, p_r)", criterion_8),
        ("robustness to selection strength", criterion_9),
        (
            "agent-based simulation against analytic distribution",
            criterion_10,
        ),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
