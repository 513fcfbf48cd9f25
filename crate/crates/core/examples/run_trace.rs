//! Replays the shipped demo trace through the node-graph path and summarises the run.
//!
//! `cargo run --example run_trace [graph|script]`

use std::path::Path;

use flowgame::harness::{run, InputTrace, RunOptions, TrajEvent};
use flowgame::scene::{SceneFile, ScriptMode};

fn main() {
    let assets = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    let mode = match std::env::args().nth(1).as_deref() {
        Some("script") => ScriptMode::Script,
        _ => ScriptMode::Graph,
    };
    let scene_path = assets.join("scenes/standard.scene");
    let file = SceneFile::load(&scene_path).expect("scene loads");
    let trace = InputTrace::load(&assets.join("traces/demo.jsonl")).expect("trace loads");

    let traj = run(&file, scene_path.parent().unwrap(), mode, &trace, &RunOptions::steps(600)).expect("run succeeds");

    for (step, ev) in traj.events() {
        if let TrajEvent::Removed { actor } = ev {
            println!("step {step:>4}: pickup {actor} removed");
        }
    }
    let last = traj.records.last().unwrap();
    let ball = last.ball.unwrap();
    println!(
        "{mode} mode: {} steps, won = {}, ball at ({:.3}, {:.3}, {:.3})",
        traj.records.len(),
        traj.won(),
        ball.position.x,
        ball.position.y,
        ball.position.z
    );
}
