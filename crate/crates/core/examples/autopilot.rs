//! Steers the ball to every pickup and prints the resulting input trace.
//!
//! `cargo run --example autopilot > my_trace.jsonl`

use std::path::Path;

use flowgame::harness::autopilot_trace;
use flowgame::scene::SceneFile;

fn main() {
    let scene = std::env::args().nth(1).unwrap_or_else(|| "standard.scene".into());
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/scenes").join(scene);
    let file = SceneFile::load(&path).unwrap();
    let trace = autopilot_trace(&file, path.parent().unwrap(), 2000).unwrap();
    eprintln!("{} input records", trace.len());
    print!("{}", trace.to_jsonl());
}
