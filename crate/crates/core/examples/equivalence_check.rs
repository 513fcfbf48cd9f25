//! Runs both scripting paths on one trace and compares them field by field.

use std::path::Path;

use flowgame::harness::{check_equivalence, InputTrace, RunOptions, DEFAULT_TOLERANCE};
use flowgame::scene::SceneFile;

fn main() {
    let assets = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    for (scene, trace) in [("standard.scene", "demo.jsonl"), ("standard_rolling.scene", "rolling_demo.jsonl"), ("rails.scene", "rails.jsonl")] {
        let path = assets.join("scenes").join(scene);
        let file = SceneFile::load(&path).unwrap();
        let trace = InputTrace::load(&assets.join("traces").join(trace)).unwrap();
        let opts = RunOptions {
            stop_on_win: false,
            ..RunOptions::steps(600)
        };
        let report = check_equivalence(&file, path.parent().unwrap(), &trace, &opts, DEFAULT_TOLERANCE).unwrap();
        println!(
            "{scene:<20} equivalent = {:<5} steps = {} max |diff| = {:e}",
            report.equivalent, report.steps_compared, report.max_abs_diff
        );
        if let Some(d) = report.first_divergence {
            println!("  first divergence at step {} in {}", d.step, d.field);
        }
    }
}
