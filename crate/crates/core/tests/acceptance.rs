//! Acceptance gate: one PASS/FAIL line per criterion; nonzero exit on any FAIL.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use flowgame::graph::{DiagCode, NodeKind};
use flowgame::graphlang::{check_source, parse, serialize};
use flowgame::harness::{
    check_equivalence, framerate_experiment, run, InputTrace, RunOptions, TrajEvent, DEFAULT_TOLERANCE,
};
use flowgame::math::{Orientation, Rotator, Vec3};
use flowgame::physics::rolling_velocity;
use flowgame::scene::{SceneConfig, SceneFile, ScriptMode};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn scene(name: &str) -> (SceneFile, PathBuf) {
    let p = common::assets().join("scenes").join(name);
    (SceneFile::load(&p).unwrap(), p.parent().unwrap().to_path_buf())
}

fn trace(name: &str) -> InputTrace {
    InputTrace::load(&common::assets().join("traces").join(name)).unwrap()
}

fn dual_path_equivalence() -> Outcome {
    let (file, base) = scene("standard.scene");
    let opts = RunOptions {
        stop_on_win: false,
        ..RunOptions::steps(600)
    };
    let t0 = Instant::now();
    let report = check_equivalence(&file, &base, &trace("demo.jsonl"), &opts, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed().as_secs_f64();
    ensure(report.equivalent, format!("not equivalent: {:?}", report.first_divergence))?;
    ensure(report.max_abs_diff <= 1e-12, format!("max diff {}", report.max_abs_diff))?;
    ensure(report.removal_steps_a == report.removal_steps_b, "removal steps differ")?;
    ensure(report.steps_compared == 600, "wrong step count")?;
    ensure(elapsed < 1.0, format!("took {elapsed:.3} s"))?;
    Ok(format!(
        "600 steps, max |diff| = {:e}, {} removals at identical steps, {:.0} ms",
        report.max_abs_diff,
        report.removal_steps_a.len(),
        elapsed * 1e3
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cases = [
        ("standard.scene", "graph", "demo.jsonl"),
        ("standard_rolling.scene", "script", "rolling_demo.jsonl"),
        ("rails.scene", "graph", "rails.jsonl"),
        ("standard.scene", "script", "hold_right.jsonl"),
    ];
    for (i, (s, mode, t)) in cases.iter().enumerate() {
        let mut files = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("{i}_{k}.jsonl"));
            let status = Command::new(env!("CARGO_BIN_EXE_flowgame"))
                .current_dir(common::assets())
                .args(["run", "--scene", &format!("scenes/{s}"), "--mode", mode, "--trace", &format!("traces/{t}")])
                .args(["--steps", "600", "--out", out.to_str().unwrap()])
                .status()
                .map_err(|e| e.to_string())?;
            ensure(status.success(), format!("{s}/{t}: exit {status}"))?;
            files.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        ensure(files[0] == files[1], format!("{s} {mode} {t}: trajectories differ"))?;
    }
    Ok(format!("{} scene/trace pairs byte-identical across two CLI runs", cases.len()))
}

fn frame_rate_independence() -> Outcome {
    let yaw = framerate_experiment(&[30.0, 120.0], 10.0, Rotator::new(0.0, 0.0, 20.0))?;
    let target = Orientation::from_axis_angle_deg(Vec3::UP, 200.0);
    let worst = yaw.rows.iter().map(|r| r.orientation.angle_to_deg(target)).fold(0.0, f64::max);
    ensure(worst <= 1e-9, format!("yaw-only error {worst:e} deg"))?;
    let multi = framerate_experiment(&[30.0, 60.0, 120.0, 960.0], 10.0, Rotator::new(15.0, 30.0, 45.0))?;
    let dev = |r: f64| multi.diff(r, 960.0).unwrap();
    let ratios = [dev(30.0) / dev(60.0), dev(60.0) / dev(120.0)];
    for r in ratios {
        ensure((1.6..=2.4).contains(&r), format!("halving ratio {r:.3}"))?;
    }
    Ok(format!(
        "yaw-only error {worst:.1e} deg; multi-axis halving ratios {:.3}, {:.3}",
        ratios[0], ratios[1]
    ))
}

fn physics_oracle() -> Outcome {
    // rail-free: table far larger than the 5.1 m travel
    let file = SceneFile::standard_layout(SceneConfig {
        table_size: 40.0,
        ..SceneConfig::default()
    })
    .map_err(|e| e.to_string())?
    .with_standard_scripts("graphs");
    let hold = InputTrace::new().hold(0..50, flowgame::scene::AxisSample::new(1.0, 0.0));
    let mut xs = Vec::new();
    for mode in [ScriptMode::Graph, ScriptMode::Script] {
        let traj = run(&file, &common::assets(), mode, &hold, &RunOptions::steps(50)).map_err(|e| e.to_string())?;
        let x = traj.records[49].ball.unwrap().position.x;
        ensure((x - 5.1).abs() <= 1e-9, format!("{mode}: x = {x}"))?;
        xs.push(x);
    }
    let (file, base) = scene("standard_rolling.scene");
    let mut t = trace("rolling_demo.jsonl");
    for k in 400..460 {
        t.set(k, flowgame::scene::AxisSample::new(-1.0, 0.6));
    }
    let opts = RunOptions {
        stop_on_win: false,
        ..RunOptions::steps(1000)
    };
    let traj = run(&file, &base, ScriptMode::Script, &t, &opts).map_err(|e| e.to_string())?;
    let r = file.config.ball_radius;
    let mut worst: f64 = 0.0;
    for rec in &traj.records {
        let b = rec.ball.unwrap();
        worst = worst.max((b.velocity - rolling_velocity(b.angular_velocity, r)).length());
    }
    ensure(traj.records.len() == 1000, "rolling run ended early")?;
    ensure(worst <= 1e-12, format!("rolling residual {worst:e}"))?;
    Ok(format!("x(50) = {} m in both modes; rolling residual max {worst:e} over 1000 steps", xs[0]))
}

fn removal_semantics() -> Outcome {
    let (file, base) = scene("standard.scene");
    for mode in [ScriptMode::Graph, ScriptMode::Script] {
        let traj = run(&file, &base, mode, &trace("demo.jsonl"), &RunOptions::steps(600)).map_err(|e| e.to_string())?;
        let overlaps = traj.events().filter(|(_, e)| matches!(e, TrajEvent::Overlap { .. })).count();
        let removals = traj.removal_steps().len();
        ensure(overlaps == 12 && removals == 12, format!("{mode}: {overlaps} overlaps, {removals} removals"))?;
        let counts: Vec<usize> = traj.records.iter().map(|r| r.active_cubes.len()).collect();
        ensure(counts.windows(2).all(|w| w[1] <= w[0]), format!("{mode}: active count not monotone"))?;
        ensure(traj.won(), format!("{mode}: no win"))?;
    }
    let (file, base) = scene("rails.scene");
    let opts = RunOptions::steps(1000);
    let mut note = String::new();
    for mode in [ScriptMode::Graph, ScriptMode::Script] {
        let traj = run(&file, &base, mode, &trace("rails.jsonl"), &opts).map_err(|e| e.to_string())?;
        let overlaps = traj.events().filter(|(_, e)| matches!(e, TrajEvent::Overlap { .. })).count();
        ensure(traj.removal_steps().is_empty(), format!("{mode}: rails trace removed something"))?;
        ensure(overlaps > 0, format!("{mode}: decoy never touched"))?;
        let speeds: Vec<f64> = traj.records[25..].iter().map(|r| r.ball.unwrap().velocity.length()).collect();
        let spread = speeds.iter().fold(0.0f64, |m, s| m.max((s - speeds[0]).abs()));
        ensure(spread <= 1e-9, format!("{mode}: speed drift {spread:e}"))?;
        let xs: Vec<f64> = traj.records.iter().map(|r| r.ball.unwrap().position.x).collect();
        ensure(xs.iter().all(|x| x.abs() <= 4.5 + 1e-12), format!("{mode}: ball left the table"))?;
        note = format!("rails: 0 removals, {overlaps} untagged overlaps, speed spread {spread:e}");
    }
    Ok(format!("demo: 12 overlaps, 12 removals, monotone, won; {note}"))
}

fn parser_validator() -> Outcome {
    let mut kinds = BTreeSet::new();
    let corpus = common::shipped_sources();
    for (f, src) in &corpus {
        let g = parse(src).map_err(|d| format!("{f}: {d:?}"))?;
        let back = parse(&serialize(&g)).map_err(|d| format!("{f}: {d:?}"))?;
        ensure(back.structurally_eq(&g), format!("{f}: round trip differs"))?;
        kinds.extend(g.nodes.iter().map(|n| n.kind));
    }
    ensure(corpus.len() >= 6, "corpus too small")?;
    ensure(kinds.len() == NodeKind::ALL.len(), format!("corpus covers {} of {} kinds", kinds.len(), NodeKind::ALL.len()))?;
    let mut rng = common::rng(2024);
    for i in 0..500 {
        let g = common::random_graph(&mut rng);
        let text = serialize(&g);
        let back = parse(&text).map_err(|d| format!("generated #{i}: {d:?}"))?;
        ensure(back.structurally_eq(&g), format!("generated #{i} round trip differs"))?;
    }
    let wanted = [
        DiagCode::TypeMismatch,
        DiagCode::UnwiredInput,
        DiagCode::DataCycle,
        DiagCode::ExecCycle,
        DiagCode::UnknownKind,
        DiagCode::DuplicateNodeId,
        DiagCode::CrossEventPayload,
        DiagCode::ExecIntoPure,
    ];
    let mut seen = BTreeSet::new();
    for (_, src) in common::invalid_sources() {
        for d in check_source(&src) {
            seen.insert(format!("{:?}", d.code));
        }
    }
    for code in wanted {
        ensure(seen.contains(&format!("{code:?}")), format!("no corpus file triggers {code:?}"))?;
    }
    let sources: Vec<Vec<u8>> = corpus.iter().map(|(_, s)| s.clone().into_bytes()).collect();
    let fuzz = std::panic::catch_unwind(|| {
        let mut rng = common::rng(99);
        for i in 0..100_000 {
            let m = common::mutate_bytes(&sources[i % sources.len()], &mut rng);
            let _ = flowgame::graphlang::parse_bytes(&m);
            if let Ok(s) = std::str::from_utf8(&m) {
                let _ = check_source(s);
            }
        }
    });
    ensure(fuzz.is_ok(), "parser panicked on a mutated input")?;
    Ok(format!(
        "{} shipped graphs cover all {} kinds; 500 generated round trips; 8/8 codes; 1e5 mutants, no crash",
        corpus.len(),
        NodeKind::ALL.len()
    ))
}

fn record_replay() -> Outcome {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let record = dir.path().join("session.jsonl");
    let (states, recorded) = rt.block_on(async {
        let server = common::live::Server::start(ScriptMode::Script, 250.0, Some(record.clone())).await;
        let states = common::live::play(server.addr, 200, |s| match s {
            10..=59 => (1.0, 0.0),
            60..=99 => (-0.5, 1.0),
            _ => (0.0, 0.0),
        })
        .await;
        let text = common::live::wait_for(&record).await;
        server.stop().await;
        (states, text)
    });
    let trace = InputTrace::parse_jsonl(&recorded).map_err(|e| e.to_string())?;
    let (file, base) = scene("standard.scene");
    let traj = run(&file, &base, ScriptMode::Script, &trace, &RunOptions::steps(200)).map_err(|e| e.to_string())?;
    let live = &states[1..];
    ensure(live.len() == traj.records.len(), format!("{} states vs {} records", live.len(), traj.records.len()))?;
    let mut worst: f64 = 0.0;
    for (st, r) in live.iter().zip(&traj.records) {
        ensure(st.step == r.step, "step mismatch")?;
        let b = r.ball.unwrap();
        let pairs = st.ball.p.iter().zip(b.position.to_array()).chain(st.ball.q.iter().zip(b.orientation.to_array()));
        for (x, y) in pairs {
            worst = worst.max((x - y).abs());
        }
        for c in &r.cubes {
            let sc = st.cubes.iter().find(|x| x.id == c.id).ok_or("cube missing from state")?;
            for (x, y) in sc.q.iter().zip(c.q.to_array()) {
                worst = worst.max((x - y).abs());
            }
        }
        ensure(st.remaining == r.active_cubes.len(), "remaining differs")?;
    }
    ensure(worst <= 1e-12, format!("max diff {worst:e}"))?;
    ensure(trace.len() > 0, "nothing recorded")?;
    Ok(format!("{} live states replayed headless, max diff {worst:e}", live.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("dual-path equivalence", dual_path_equivalence),
        ("determinism", determinism),
        ("frame-rate independence", frame_rate_independence),
        ("physics oracle", physics_oracle),
        ("removal semantics", removal_semantics),
        ("parser/validator", parser_validator),
        ("record/replay", record_replay),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
