//! Starts the websocket service on an ephemeral port, plays a short session as
//! a client and prints a few state messages.

use std::path::Path;
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use flowgame::scene::{SceneFile, ScriptMode};
use flowgame::service::{serve, ServeConfig};
use tokio_tungstenite::tungstenite::Message;

#[tokio::main]
async fn main() {
    let assets = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    let cfg = ServeConfig {
        scene: SceneFile::load(&assets.join("scenes/standard.scene")).unwrap(),
        base_dir: assets.join("scenes"),
        mode: ScriptMode::Graph,
        tick_hz: 100.0,
        record: None,
        static_dir: assets.join("web"),
    };
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(serve(cfg, listener, async {
        let _ = stopped.await;
    }));

    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/session")).await.unwrap();
    ws.send(Message::text(r#"{"type":"hello","proto":"flow/1"}"#)).await.unwrap();
    ws.send(Message::text(r#"{"type":"input","h":1.0,"v":0.5}"#)).await.unwrap();
    let mut shown = 0;
    while let Some(Ok(msg)) = ws.next().await {
        if let Message::Text(text) = msg {
            let line: String = text.chars().take(160).collect();
            println!("{line}");
            shown += 1;
            if shown == 6 {
                break;
            }
        }
    }
    ws.close(None).await.unwrap();
    tokio::time::sleep(Duration::from_millis(50)).await;
    let _ = stop.send(());
    server.await.unwrap().unwrap();
}
