//! Scene files (`scene/1`, canonical JSON) and the default roll-a-ball layout.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{Actor, DriveMode, RigidBody, Scene, SceneError, Scripting, SolidVolume, TriggerVolume, PICK_UP_TAG};
use crate::behaviors;
use crate::graph::CompiledGraph;
use crate::graphlang::{self, ParseDiagnostic};
use crate::math::{Rotator, Vec3};
use crate::physics::PhysicsConfig;

pub const SCENE_FORMAT: &str = "scene/1";

/// Tunables for a scene. Every field has a default; the geometry defaults
/// describe a 10 x 10 m table with twelve cubes on a 3 m circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub fixed_dt: f64,
    pub table_size: f64,
    pub rail_thickness: f64,
    pub rail_height: f64,
    pub restitution: f64,
    pub cube_count: u32,
    pub cube_circle_radius: f64,
    pub cube_edge: f64,
    /// Gap between the table surface and the bottom of each cube.
    pub cube_hover: f64,
    pub ball_radius: f64,
    pub ball_mass: f64,
    pub rolling_inertia_factor: f64,
    pub drive_mode: DriveMode,
    pub speed: f64,
    pub roll_torque: f64,
    pub rotator_rates: Rotator,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            fixed_dt: 0.02,
            table_size: 10.0,
            rail_thickness: 0.5,
            rail_height: 1.0,
            restitution: 1.0,
            cube_count: 12,
            cube_circle_radius: 3.0,
            cube_edge: 1.0,
            cube_hover: 0.25,
            ball_radius: 0.5,
            ball_mass: 1.0,
            rolling_inertia_factor: 0.4,
            drive_mode: DriveMode::Force,
            speed: 10.0,
            roll_torque: 50.0,
            rotator_rates: Rotator::new(15.0, 30.0, 45.0),
        }
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), SceneError> {
        let positive = [
            ("fixed_dt", self.fixed_dt),
            ("table_size", self.table_size),
            ("rail_thickness", self.rail_thickness),
            ("rail_height", self.rail_height),
            ("cube_circle_radius", self.cube_circle_radius),
            ("cube_edge", self.cube_edge),
            ("ball_radius", self.ball_radius),
            ("ball_mass", self.ball_mass),
            ("rolling_inertia_factor", self.rolling_inertia_factor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SceneError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.cube_hover >= 0.0 && self.cube_hover.is_finite()) {
            return Err(SceneError::InvalidConfig(format!("cube_hover must be >= 0, got {}", self.cube_hover)));
        }
        if !(0.0..=1.0).contains(&self.restitution) {
            return Err(SceneError::InvalidConfig(format!("restitution must lie in [0, 1], got {}", self.restitution)));
        }
        if self.cube_count == 0 {
            return Err(SceneError::InvalidConfig("cube_count must be at least 1".into()));
        }
        let limit = self.table_size / 2.0 - self.cube_edge / 2.0;
        if self.cube_circle_radius > limit {
            return Err(SceneError::InvalidConfig(format!(
                "cube circle radius {} does not fit inside the rails (max {limit})",
                self.cube_circle_radius
            )));
        }
        if self.ball_radius * 2.0 >= self.table_size {
            return Err(SceneError::InvalidConfig("ball does not fit on the table".into()));
        }
        for v in [self.speed, self.roll_torque] {
            if !v.is_finite() {
                return Err(SceneError::InvalidConfig("speed and roll_torque must be finite".into()));
            }
        }
        if !self.rotator_rates.is_finite() {
            return Err(SceneError::InvalidConfig("rotator_rates must be finite".into()));
        }
        Ok(())
    }

    pub fn physics(&self) -> PhysicsConfig {
        PhysicsConfig {
            fixed_dt: self.fixed_dt,
            ball_radius: self.ball_radius,
            rolling_inertia_factor: self.rolling_inertia_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorKind {
    Ball,
    Cube,
    Rail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StringOrList {
    One(String),
    Many(Vec<String>),
}

impl StringOrList {
    pub fn items(&self) -> Vec<&str> {
        match self {
            StringOrList::One(s) => vec![s.as_str()],
            StringOrList::Many(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

/// `"none"`, a behavior name, a `.fg` graph path, or a paired declaration
/// naming both variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptEntry {
    Short(String),
    Paired(PairedScript),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairedScript {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<StringOrList>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub behavior: Option<StringOrList>,
}

impl ScriptEntry {
    fn paired(&self) -> PairedScript {
        match self {
            ScriptEntry::Short(s) if s == "none" => PairedScript::default(),
            ScriptEntry::Short(s) if s.ends_with(".fg") => PairedScript {
                graph: Some(StringOrList::One(s.clone())),
                behavior: None,
            },
            ScriptEntry::Short(s) => PairedScript {
                graph: None,
                behavior: Some(StringOrList::One(s.clone())),
            },
            ScriptEntry::Paired(p) => p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorEntry {
    pub name: String,
    pub kind: ActorKind,
    #[serde(default)]
    pub tag: Option<String>,
    pub position: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_extents: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<ScriptEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub format: String,
    #[serde(default)]
    pub config: SceneConfig,
    pub actors: Vec<ActorEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptMode {
    Graph,
    Script,
}

impl std::fmt::Display for ScriptMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScriptMode::Graph => "graph",
            ScriptMode::Script => "script",
        })
    }
}

impl std::str::FromStr for ScriptMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph" => Ok(ScriptMode::Graph),
            "script" => Ok(ScriptMode::Script),
            other => Err(format!("unknown mode `{other}` (expected graph or script)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum SceneFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported scene format `{0}` (expected {SCENE_FORMAT})")]
    Format(String),
    #[error("{path}: graph has {} diagnostic(s)", diagnostics.len())]
    Graph {
        path: PathBuf,
        source_text: String,
        diagnostics: Vec<ParseDiagnostic>,
    },
    #[error("actor `{actor}`: unknown behavior `{name}`")]
    UnknownBehavior { actor: String, name: String },
    #[error("actor `{actor}`: no {mode} variant declared")]
    MissingVariant { actor: String, mode: ScriptMode },
    #[error("actor `{actor}`: {message}")]
    BadActor { actor: String, message: String },
    #[error(transparent)]
    Scene(#[from] SceneError),
}

impl SceneFile {
    pub fn load(path: &Path) -> Result<SceneFile, SceneFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| SceneFileError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            SceneFileError::Json { source, .. } => SceneFileError::Json {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<SceneFile, SceneFileError> {
        let file: SceneFile = serde_json::from_str(text).map_err(|source| SceneFileError::Json {
            path: PathBuf::from("<scene>"),
            source,
        })?;
        if file.format != SCENE_FORMAT {
            return Err(SceneFileError::Format(file.format));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene file serializes");
        s.push('\n');
        s
    }

    /// The default layout: ball at the center, cubes on a circle, four rails.
    /// No scripts attached.
    pub fn standard_layout(config: SceneConfig) -> Result<SceneFile, SceneError> {
        config.validate()?;
        let c = &config;
        let mut actors = vec![ActorEntry {
            name: "ball".into(),
            kind: ActorKind::Ball,
            tag: None,
            position: [0.0, c.ball_radius, 0.0],
            half_extents: None,
            script: None,
        }];
        let half = c.cube_edge / 2.0;
        let cube_y = c.cube_hover + half;
        for k in 0..c.cube_count {
            let theta = (k as f64 * 360.0 / c.cube_count as f64).to_radians();
            actors.push(ActorEntry {
                name: format!("cube_{k:02}"),
                kind: ActorKind::Cube,
                tag: Some(PICK_UP_TAG.into()),
                position: [c.cube_circle_radius * theta.cos(), cube_y, c.cube_circle_radius * theta.sin()],
                half_extents: Some([half; 3]),
                script: None,
            });
        }
        let h = c.table_size / 2.0;
        let t = c.rail_thickness;
        let ry = c.rail_height / 2.0;
        let rails = [
            ("rail_east", [h + t / 2.0, ry, 0.0], [t / 2.0, ry, h + t]),
            ("rail_west", [-(h + t / 2.0), ry, 0.0], [t / 2.0, ry, h + t]),
            ("rail_north", [0.0, ry, h + t / 2.0], [h + t, ry, t / 2.0]),
            ("rail_south", [0.0, ry, -(h + t / 2.0)], [h + t, ry, t / 2.0]),
        ];
        for (name, position, half_extents) in rails {
            actors.push(ActorEntry {
                name: name.into(),
                kind: ActorKind::Rail,
                tag: None,
                position,
                half_extents: Some(half_extents),
                script: None,
            });
        }
        Ok(SceneFile {
            format: SCENE_FORMAT.into(),
            config,
            actors,
        })
    }

    /// Attaches the shipped paired scripts. `graph_dir` is the graph directory
    /// as seen from wherever the scene file will live. The native rotator is
    /// set to the graph's yaw-only 20 deg/s so both variants match.
    pub fn with_standard_scripts(mut self, graph_dir: &str) -> SceneFile {
        self.config.rotator_rates = Rotator::new(0.0, 0.0, 20.0);
        let g = |f: &str| format!("{graph_dir}/{f}");
        let ball_graph = match self.config.drive_mode {
            DriveMode::Force => g("ball_force.fg"),
            DriveMode::TorqueRolling => g("ball_roll.fg"),
        };
        for a in &mut self.actors {
            a.script = match a.kind {
                ActorKind::Ball => Some(ScriptEntry::Paired(PairedScript {
                    graph: Some(StringOrList::One(ball_graph.clone())),
                    behavior: Some(StringOrList::Many(vec!["player_controller".into(), "pickup_on_ball".into()])),
                })),
                ActorKind::Cube => Some(ScriptEntry::Paired(PairedScript {
                    graph: Some(StringOrList::Many(vec![g("cube_rotator.fg"), g("cube_removal.fg")])),
                    behavior: Some(StringOrList::One("rotator".into())),
                })),
                ActorKind::Rail => None,
            };
        }
        self
    }

    /// True if every scripted actor declares both a graph and a behavior variant.
    pub fn is_paired(&self) -> bool {
        self.actors.iter().all(|a| match &a.script {
            None => true,
            Some(s) => {
                let p = s.paired();
                (p.graph.is_some() && p.behavior.is_some()) || (p.graph.is_none() && p.behavior.is_none())
            }
        })
    }

    /// Graph paths referenced by any actor, deduplicated, in first-use order.
    pub fn graph_paths(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for a in &self.actors {
            if let Some(g) = a.script.as_ref().and_then(|s| s.paired().graph) {
                for p in g.items() {
                    if !out.iter().any(|x| x == p) {
                        out.push(p.to_string());
                    }
                }
            }
        }
        out
    }

    /// SHA-256 over the canonical scene JSON and every referenced graph source.
    pub fn content_hash(&self, base_dir: &Path) -> Result<String, SceneFileError> {
        let mut h = Sha256::new();
        h.update(serde_json::to_string(self).expect("scene file serializes").as_bytes());
        for p in self.graph_paths() {
            let path = base_dir.join(&p);
            let text = std::fs::read(&path).map_err(|source| SceneFileError::Io { path, source })?;
            h.update([0u8]);
            h.update(p.as_bytes());
            h.update([0u8]);
            h.update(&text);
        }
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Builds a live scene. Graph paths resolve against `base_dir`.
    pub fn instantiate(&self, base_dir: &Path, mode: ScriptMode) -> Result<Scene, SceneFileError> {
        self.build(Some((base_dir, mode)))
    }

    /// Builds the scene with no scripts attached.
    pub fn instantiate_unscripted(&self) -> Result<Scene, SceneFileError> {
        self.build(None)
    }

    fn build(&self, scripts: Option<(&Path, ScriptMode)>) -> Result<Scene, SceneFileError> {
        let c = &self.config;
        c.validate()?;
        let mut scene = Scene::new(c.fixed_dt);
        let mut graph_cache: HashMap<PathBuf, Arc<CompiledGraph>> = HashMap::new();
        for entry in &self.actors {
            let bad = |message: String| SceneFileError::BadActor {
                actor: entry.name.clone(),
                message,
            };
            let [x, y, z] = entry.position;
            let position = Vec3::new(x, y, z);
            if !position.is_finite() {
                return Err(bad("position must be finite".into()));
            }
            let mut actor = Actor::new(entry.name.clone(), entry.kind, position);
            actor.tag = entry.tag.clone();
            let half = match entry.half_extents {
                Some([hx, hy, hz]) => {
                    if !(hx > 0.0 && hy > 0.0 && hz > 0.0) || !Vec3::new(hx, hy, hz).is_finite() {
                        return Err(bad("half_extents must be positive".into()));
                    }
                    Some(Vec3::new(hx, hy, hz))
                }
                None => None,
            };
            match entry.kind {
                ActorKind::Ball => {
                    actor.body = Some(RigidBody::new(c.ball_mass, c.drive_mode));
                }
                ActorKind::Cube => {
                    let e = c.cube_edge / 2.0;
                    actor.trigger = Some(TriggerVolume {
                        half_extents: half.unwrap_or(Vec3::new(e, e, e)),
                    });
                }
                ActorKind::Rail => {
                    actor.solid = Some(SolidVolume {
                        half_extents: half.ok_or_else(|| bad("rails need half_extents".into()))?,
                        restitution: c.restitution,
                    });
                }
            }
            if let (Some((base_dir, mode)), Some(script)) = (scripts, &entry.script) {
                let p = script.paired();
                actor.scripting = match (mode, p.graph, p.behavior) {
                    (_, None, None) => None,
                    (ScriptMode::Graph, Some(graphs), _) => {
                        let mut list = Vec::new();
                        for rel in graphs.items() {
                            let path = base_dir.join(rel);
                            if let Some(g) = graph_cache.get(&path) {
                                list.push(g.clone());
                                continue;
                            }
                            let g = Arc::new(load_graph(&path)?);
                            graph_cache.insert(path, g.clone());
                            list.push(g);
                        }
                        Some(Scripting::Graphs(list))
                    }
                    (ScriptMode::Script, _, Some(names)) => {
                        let mut list = Vec::new();
                        for name in names.items() {
                            list.push(behaviors::by_name(name, c).ok_or_else(|| SceneFileError::UnknownBehavior {
                                actor: entry.name.clone(),
                                name: name.to_string(),
                            })?);
                        }
                        Some(Scripting::Behaviors(list))
                    }
                    (mode, _, _) => {
                        return Err(SceneFileError::MissingVariant {
                            actor: entry.name.clone(),
                            mode,
                        })
                    }
                };
            }
            scene.spawn(actor);
        }
        Ok(scene)
    }
}

/// Reads, parses and validates a `.fg` file.
pub fn load_graph(path: &Path) -> Result<CompiledGraph, SceneFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| SceneFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    graphlang::compile_source(&text).map_err(|diagnostics| SceneFileError::Graph {
        path: path.to_path_buf(),
        source_text: text,
        diagnostics,
    })
}

/// The default scene: 1 ball, 12 "Pick Up" cubes, 4 rails, no scripts.
pub fn build_standard_scene(config: SceneConfig) -> Result<Scene, SceneError> {
    let file = SceneFile::standard_layout(config)?;
    file.instantiate_unscripted().map_err(|e| match e {
        SceneFileError::Scene(s) => s,
        other => SceneError::InvalidConfig(other.to_string()),
    })
}
