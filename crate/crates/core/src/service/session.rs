use std::collections::BTreeMap;
use std::path::PathBuf;

use super::protocol::{
    parse_client, BallPose, Box3, ClientMessage, CubePose, ErrorCode, Layout, ServerMessage, StateMessage, PROTOCOL,
};
use crate::harness::{InputTrace, RunError, Simulation};
use crate::scene::{ActorKind, AxisSample, SceneFile, ScriptMode, PICK_UP_TAG};

/// Malformed frames tolerated before the connection is dropped.
pub const MAX_MALFORMED: u32 = 10;

/// What the transport should do after a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub messages: Vec<ServerMessage>,
    pub close: bool,
}

/// Transport-free session state: one scene, sample-and-hold input, and the
/// recording of the input actually applied at each step.
#[derive(Debug)]
pub struct Session {
    file: SceneFile,
    base_dir: PathBuf,
    mode: ScriptMode,
    sim: Option<Simulation>,
    held: AxisSample,
    recording: InputTrace,
    malformed: u32,
    last_cube_pose: BTreeMap<u32, ([f64; 3], [f64; 4])>,
}

impl Session {
    pub fn new(file: SceneFile, base_dir: PathBuf, mode: ScriptMode) -> Self {
        Self {
            file,
            base_dir,
            mode,
            sim: None,
            held: AxisSample::default(),
            recording: InputTrace::new(),
            malformed: 0,
            last_cube_pose: BTreeMap::new(),
        }
    }

    /// True once `hello` has been accepted.
    pub fn is_live(&self) -> bool {
        self.sim.is_some()
    }

    pub fn mode(&self) -> ScriptMode {
        self.mode
    }

    /// Input applied at each step since the last (re)start.
    pub fn recording(&self) -> &InputTrace {
        &self.recording
    }

    pub fn held(&self) -> AxisSample {
        self.held
    }

    pub fn handle_text(&mut self, text: &str) -> Reply {
        match parse_client(text) {
            Ok(msg) => self.handle(msg),
            Err((code, message)) => self.reject(code, message),
        }
    }

    /// A non-text frame.
    pub fn handle_binary(&mut self) -> Reply {
        self.reject(ErrorCode::Malformed, "binary frames are not part of the protocol".into())
    }

    fn reject(&mut self, code: ErrorCode, message: String) -> Reply {
        let mut messages = vec![ServerMessage::Error { code, message }];
        if code != ErrorCode::Malformed {
            return Reply { messages, close: false };
        }
        self.malformed += 1;
        let close = self.malformed >= MAX_MALFORMED;
        if close {
            messages.push(error(ErrorCode::TooManyMalformed, format!("{MAX_MALFORMED} malformed frames, closing")));
        }
        Reply { messages, close }
    }

    fn handle(&mut self, msg: ClientMessage) -> Reply {
        let messages = match msg {
            ClientMessage::Hello { proto } => {
                if self.is_live() {
                    vec![error(ErrorCode::AlreadyGreeted, "session already started".into())]
                } else if proto != PROTOCOL {
                    vec![error(ErrorCode::UnsupportedProto, format!("expected proto `{PROTOCOL}`"))]
                } else {
                    self.start()
                }
            }
            _ if !self.is_live() => vec![error(ErrorCode::NotGreeted, "send hello first".into())],
            ClientMessage::Input { h, v } => {
                self.held = AxisSample::new(h, v);
                Vec::new()
            }
            ClientMessage::Restart => self.start(),
            ClientMessage::Mode { value } => {
                self.mode = value;
                self.start()
            }
        };
        Reply { messages, close: false }
    }

    /// (Re)builds the scene; returns welcome plus the step-0 state.
    fn start(&mut self) -> Vec<ServerMessage> {
        match Simulation::new(&self.file, &self.base_dir, self.mode) {
            Ok(sim) => {
                self.sim = Some(sim);
                self.held = AxisSample::default();
                self.recording = InputTrace::new();
                self.last_cube_pose.clear();
                let layout = self.layout();
                let state = self.state();
                vec![ServerMessage::Welcome { scene: layout }, ServerMessage::State(state)]
            }
            Err(e) => vec![error(ErrorCode::Internal, e.to_string())],
        }
    }

    /// Runs one step with the held input. `None` before hello and after a win.
    pub fn step(&mut self) -> Option<Result<StateMessage, RunError>> {
        let sim = self.sim.as_mut()?;
        if sim.won() {
            return None;
        }
        let k = sim.step_index();
        if let Err(e) = sim.tick(self.held) {
            return Some(Err(e));
        }
        self.recording.set(k, self.held);
        Some(Ok(self.state()))
    }

    fn layout(&self) -> Layout {
        let c = &self.file.config;
        let scene = self.sim.as_ref().expect("live session").scene();
        let boxes = |kind: ActorKind| {
            scene
                .actors()
                .iter()
                .filter(|a| a.kind == kind)
                .map(|a| Box3 {
                    id: a.id.0,
                    p: a.transform.position.to_array(),
                    half_extents: a
                        .solid
                        .map(|s| s.half_extents)
                        .or(a.trigger.map(|t| t.half_extents))
                        .unwrap_or_default()
                        .to_array(),
                })
                .collect()
        };
        Layout {
            mode: self.mode,
            fixed_dt: c.fixed_dt,
            table_size: c.table_size,
            ball_radius: c.ball_radius,
            rails: boxes(ActorKind::Rail),
            cubes: boxes(ActorKind::Cube),
        }
    }

    fn state(&mut self) -> StateMessage {
        let sim = self.sim.as_ref().expect("live session");
        let scene = sim.scene();
        let ball = scene
            .actors()
            .iter()
            .find(|a| a.kind == ActorKind::Ball)
            .map(|a| BallPose {
                p: a.transform.position.to_array(),
                q: a.transform.orientation.to_array(),
            })
            .unwrap_or(BallPose {
                p: [0.0; 3],
                q: [1.0, 0.0, 0.0, 0.0],
            });
        let mut present = BTreeMap::new();
        for a in scene.actors().iter().filter(|a| a.kind == ActorKind::Cube) {
            let pose = (a.transform.position.to_array(), a.transform.orientation.to_array());
            self.last_cube_pose.insert(a.id.0, pose);
            present.insert(a.id.0, a.active);
        }
        // destroyed cubes keep their last pose and read as inactive
        let cubes = self
            .last_cube_pose
            .iter()
            .map(|(&id, &(p, q))| CubePose {
                id,
                p,
                q,
                active: present.get(&id).copied().unwrap_or(false),
            })
            .collect();
        StateMessage {
            step: sim.step_index(),
            t: sim.step_index() as f64 * sim.fixed_dt(),
            ball,
            cubes,
            remaining: scene.active_with_tag(PICK_UP_TAG).count(),
            won: sim.won(),
        }
    }
}

fn error(code: ErrorCode, message: String) -> ServerMessage {
    ServerMessage::Error { code, message }
}
