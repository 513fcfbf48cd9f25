//! Holds full right input on an open table and compares the ball against the
//! closed-form semi-implicit Euler position.

use flowgame::harness::{RunError, Simulation};
use flowgame::scene::{AxisSample, SceneConfig, SceneFile, ScriptMode};

fn main() -> Result<(), RunError> {
    let config = SceneConfig {
        table_size: 40.0,
        ..SceneConfig::default()
    };
    let file = SceneFile::standard_layout(config.clone()).unwrap().with_standard_scripts("graphs");
    let base = concat!(env!("CARGO_MANIFEST_DIR"), "/assets");
    let mut sim = Simulation::new(&file, base.as_ref(), ScriptMode::Script)?;
    let dt = sim.fixed_dt();
    let a = config.speed / config.ball_mass;
    for n in 1..=50u32 {
        let rec = sim.tick(AxisSample::new(1.0, 0.0))?;
        let x = rec.ball.unwrap().position.x;
        let expected = a * dt * dt * f64::from(n * (n + 1)) / 2.0;
        if n % 10 == 0 {
            println!("step {n:>2}: x = {x:.12}  expected {expected:.12}  |diff| = {:e}", (x - expected).abs());
        }
    }
    Ok(())
}
