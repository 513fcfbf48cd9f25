//! Live play over websockets (`flow/1` on `/session`) plus static client
//! assets on `/`.

mod protocol;
mod session;

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio::sync::mpsc;
use tower_http::services::ServeDir;

pub use protocol::{
    parse_client, BallPose, Box3, ClientMessage, CubePose, ErrorCode, Layout, ServerMessage, StateMessage, PROTOCOL,
};
pub use session::{Reply, Session, MAX_MALFORMED};

use crate::scene::{SceneFile, ScriptMode};

/// Default port when neither `--port` nor `FLOW_PORT` is given.
pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub scene: SceneFile,
    /// Directory graph paths in the scene resolve against.
    pub base_dir: PathBuf,
    pub mode: ScriptMode,
    pub tick_hz: f64,
    /// Record each session's applied input here. The first session writes
    /// this path, later ones insert `.N` before the extension.
    pub record: Option<PathBuf>,
    pub static_dir: PathBuf,
}

struct AppState {
    cfg: ServeConfig,
    sessions: AtomicU64,
}

pub fn router(cfg: ServeConfig) -> Router {
    let static_dir = cfg.static_dir.clone();
    let state = Arc::new(AppState {
        cfg,
        sessions: AtomicU64::new(0),
    });
    Router::new()
        .route("/session", get(upgrade))
        .fallback_service(ServeDir::new(static_dir))
        .with_state(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    cfg: ServeConfig,
    listener: TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(cfg)).with_graceful_shutdown(shutdown).await
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<Arc<AppState>>) -> Response {
    let n = state.sessions.fetch_add(1, Ordering::SeqCst);
    ws.on_upgrade(move |socket| run_session(socket, state, n))
}

fn record_path(base: &std::path::Path, n: u64) -> PathBuf {
    if n == 0 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{n}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{n}"),
    };
    base.with_file_name(name)
}

enum Inbound {
    Text(String),
    Binary,
}

async fn run_session(socket: WebSocket, state: Arc<AppState>, n: u64) {
    let cfg = &state.cfg;
    let (mut tx, mut rx) = socket.split();
    let (in_tx, mut in_rx) = mpsc::channel::<Inbound>(64);
    let reader = tokio::spawn(async move {
        while let Some(Ok(msg)) = rx.next().await {
            let item = match msg {
                Message::Text(t) => Inbound::Text(t),
                Message::Binary(_) => Inbound::Binary,
                Message::Close(_) => break,
                Message::Ping(_) | Message::Pong(_) => continue,
            };
            if in_tx.send(item).await.is_err() {
                break;
            }
        }
    });

    let mut session = Session::new(cfg.scene.clone(), cfg.base_dir.clone(), cfg.mode);
    let mut pacer = tokio::time::interval(Duration::from_secs_f64(1.0 / cfg.tick_hz));
    pacer.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    tracing::info!(session = n, "session opened");
    'session: loop {
        tokio::select! {
            inbound = in_rx.recv() => {
                let Some(inbound) = inbound else { break };
                let reply = match inbound {
                    Inbound::Text(t) => session.handle_text(&t),
                    Inbound::Binary => session.handle_binary(),
                };
                for m in &reply.messages {
                    if send(&mut tx, m).await.is_err() {
                        break 'session;
                    }
                }
                if reply.close {
                    let _ = tx.send(Message::Close(None)).await;
                    break;
                }
            }
            _ = pacer.tick(), if session.is_live() => {
                match session.step() {
                    Some(Ok(s)) => {
                        if send(&mut tx, &ServerMessage::State(s)).await.is_err() {
                            break;
                        }
                    }
                    Some(Err(e)) => {
                        let m = ServerMessage::Error { code: ErrorCode::Internal, message: e.to_string() };
                        let _ = send(&mut tx, &m).await;
                        break;
                    }
                    None => {}
                }
            }
        }
    }
    reader.abort();
    if let Some(base) = &cfg.record {
        let path = record_path(base, n);
        if let Err(e) = tokio::fs::write(&path, session.recording().to_jsonl()).await {
            tracing::warn!(path = %path.display(), error = %e, "could not write recording");
        }
    }
    tracing::info!(session = n, "session closed");
}

async fn send(
    tx: &mut futures::stream::SplitSink<WebSocket, Message>,
    msg: &ServerMessage,
) -> Result<(), axum::Error> {
    tx.send(Message::Text(serde_json::to_string(msg).expect("server message serializes")))
        .await
}
