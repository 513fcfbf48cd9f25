//! Integrates a spinning cube at several frame rates and reports how far the
//! final orientations drift apart.

use flowgame::harness::framerate_experiment;
use flowgame::math::Rotator;

fn main() {
    for (label, rates) in [("yaw only", Rotator::new(0.0, 0.0, 20.0)), ("three axes", Rotator::new(15.0, 30.0, 45.0))] {
        let report = framerate_experiment(&[30.0, 60.0, 120.0, 960.0], 10.0, rates).unwrap();
        println!("{label}:");
        for row in &report.rows {
            match report.diff(row.rate_hz, 960.0) {
                Some(dev) => println!("  {:>5} Hz  {:>5} frames  {:>12.3e} deg from 960 Hz", row.rate_hz, row.frames, dev),
                None => println!("  {:>5} Hz  {:>5} frames  reference", row.rate_hz, row.frames),
            }
        }
    }
}
