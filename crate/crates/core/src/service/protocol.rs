use serde::{Deserialize, Serialize};

use crate::scene::ScriptMode;

pub const PROTOCOL: &str = "flow/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Hello { proto: String },
    Input { h: f64, v: f64 },
    Restart,
    Mode { value: ScriptMode },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Welcome { scene: Layout },
    State(StateMessage),
    Error { code: ErrorCode, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    /// Not JSON, not a text frame, or a known type with bad fields.
    Malformed,
    UnknownType,
    UnsupportedProto,
    AlreadyGreeted,
    NotGreeted,
    TooManyMalformed,
    Internal,
}

/// Static scene geometry sent once per session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub mode: ScriptMode,
    pub fixed_dt: f64,
    pub table_size: f64,
    pub ball_radius: f64,
    pub rails: Vec<Box3>,
    pub cubes: Vec<Box3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub id: u32,
    pub p: [f64; 3],
    pub half_extents: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPose {
    pub p: [f64; 3],
    pub q: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubePose {
    pub id: u32,
    pub p: [f64; 3],
    pub q: [f64; 4],
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMessage {
    pub step: u64,
    pub t: f64,
    pub ball: BallPose,
    pub cubes: Vec<CubePose>,
    pub remaining: usize,
    pub won: bool,
}

/// Classifies an inbound text frame.
pub fn parse_client(text: &str) -> Result<ClientMessage, (ErrorCode, String)> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| (ErrorCode::Malformed, format!("not JSON: {e}")))?;
    let ty = value
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or((ErrorCode::Malformed, "missing string field `type`".to_string()))?;
    if !["hello", "input", "restart", "mode"].contains(&ty) {
        return Err((ErrorCode::UnknownType, format!("unknown message type `{ty}`")));
    }
    let msg: ClientMessage = serde_json::from_value(value).map_err(|e| (ErrorCode::Malformed, e.to_string()))?;
    if let ClientMessage::Input { h, v } = msg {
        if !h.is_finite() || !v.is_finite() {
            return Err((ErrorCode::Malformed, "axis values must be finite".into()));
        }
    }
    Ok(msg)
}
