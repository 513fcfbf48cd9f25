pub mod behaviors;
pub mod graph;
pub mod graphlang;
pub mod harness;
pub mod math;
pub mod physics;
pub mod scene;
pub mod service;
