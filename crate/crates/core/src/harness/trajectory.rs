use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::math::{Orientation, Vec3};
use crate::scene::ScriptMode;

pub const TRAJECTORY_FORMAT: &str = "traj/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub format: String,
    pub fixed_dt: f64,
    pub scene_hash: String,
    pub mode: ScriptMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallState {
    pub position: Vec3,
    pub orientation: Orientation,
    pub velocity: Vec3,
    pub angular_velocity: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubeState {
    pub id: u32,
    pub q: Orientation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajEvent {
    /// A trigger volume owned by `actor` began overlapping `other`.
    Overlap { actor: u32, other: u32 },
    /// `actor` left the active set.
    Removed { actor: u32 },
}

/// State after `step` completed steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallState>,
    /// Active "Pick Up" actors, by id.
    pub cubes: Vec<CubeState>,
    pub active_cubes: Vec<u32>,
    pub events: Vec<TrajEvent>,
    pub won: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub header: TrajectoryHeader,
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn won(&self) -> bool {
        self.records.last().is_some_and(|r| r.won)
    }

    /// Step at which each actor was removed.
    pub fn removal_steps(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            for e in &r.events {
                if let TrajEvent::Removed { actor } = e {
                    out.entry(*actor).or_insert(r.step);
                }
            }
        }
        out
    }

    pub fn events(&self) -> impl Iterator<Item = (u64, &TrajEvent)> {
        self.records.iter().flat_map(|r| r.events.iter().map(move |e| (r.step, e)))
    }

    /// Header line then one line per record; floats in shortest round-trip form.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: TrajectoryHeader = serde_json::from_str(lines.next().ok_or("empty trajectory")?)
            .map_err(|e| format!("header: {e}"))?;
        if header.format != TRAJECTORY_FORMAT {
            return Err(format!("unsupported trajectory format `{}`", header.format));
        }
        let records = lines
            .enumerate()
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("record {}: {e}", i + 1)))
            .collect::<Result<_, _>>()?;
        Ok(Self { header, records })
    }
}
