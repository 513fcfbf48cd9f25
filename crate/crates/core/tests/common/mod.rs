#![allow(dead_code)]

use std::path::{Path, PathBuf};

use flowgame::graph::{Graph, Literal, Node, NodeKind, PinType, Wire};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn assets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("assets")
}

pub const SHIPPED_GRAPHS: [&str; 7] = [
    "cube_rotator.fg",
    "cube_rotator_euler.fg",
    "cube_removal.fg",
    "ball_force.fg",
    "ball_roll.fg",
    "ball_pickup.fg",
    "ball_drift.fg",
];

pub fn shipped_sources() -> Vec<(String, String)> {
    SHIPPED_GRAPHS
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(assets().join("graphs").join(f)).unwrap();
            (f.to_string(), text)
        })
        .collect()
}

pub fn invalid_sources() -> Vec<(String, String)> {
    let mut out: Vec<_> = std::fs::read_dir(assets().join("graphs/invalid"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn float(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(-10..=10) as f64,
        1 => rng.gen_range(-1e6..1e6),
        2 => f64::from_bits(rng.gen::<u64>() & 0x7fef_ffff_ffff_ffff) * if rng.gen() { 1.0 } else { -1.0 },
        _ => rng.gen_range(-1.0..1.0) * 10f64.powi(rng.gen_range(-300..300)),
    }
}

fn text(rng: &mut impl Rng) -> String {
    const CHARS: &[char] = &['a', 'Z', ' ', '"', '\\', '\n', '\t', '\r', 'é', '→', '#', '(', ')', '=', '{', '}'];
    (0..rng.gen_range(0..10)).map(|_| *CHARS.choose(rng).unwrap()).collect()
}

fn literal(ty: PinType, rng: &mut impl Rng) -> Option<Literal> {
    Some(match ty {
        PinType::Float => Literal::Float(float(rng)),
        PinType::Bool => Literal::Bool(rng.gen()),
        PinType::Text => Literal::Text(text(rng)),
        PinType::Vector | PinType::Rotator => Literal::Triple([float(rng), float(rng), float(rng)]),
        PinType::ActorRef => return None,
    })
}

/// A random graph that always parses back: well-formed identifiers, known
/// pins, type-correct literals. It need not validate.
pub fn random_graph(rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(format!("G{}", rng.gen_range(0..1000)));
    let n = rng.gen_range(0..12);
    for i in 0..n {
        let kind = *NodeKind::ALL.choose(rng).unwrap();
        let mut node = Node::new(format!("n{i}_{}", kind.name().to_lowercase()), kind);
        for input in kind.spec().inputs {
            if !input.wireable || rng.gen_bool(0.3) {
                if let Some(l) = literal(input.ty, rng) {
                    node.params.insert(input.name.to_string(), l);
                }
            }
        }
        g.nodes.push(node);
    }
    if n == 0 {
        return g;
    }
    for _ in 0..rng.gen_range(0..n * 2) {
        let a = g.nodes.choose(rng).unwrap();
        let b = g.nodes.choose(rng).unwrap();
        let spec = a.kind.spec();
        if rng.gen() {
            if let Some(out) = spec.exec_outs.choose(rng) {
                let w = Wire::new((a.id.as_str(), *out), (b.id.as_str(), "in"));
                if !g.exec_wires.contains(&w) {
                    g.exec_wires.push(w);
                }
            }
        } else if let (Some(out), Some(input)) = (
            spec.outputs.choose(rng),
            b.kind.spec().inputs.iter().filter(|i| i.wireable).collect::<Vec<_>>().choose(rng),
        ) {
            let w = Wire::new((a.id.as_str(), out.name), (b.id.as_str(), input.name));
            if !g.data_wires.contains(&w) {
                g.data_wires.push(w);
            }
        }
    }
    g
}

/// Byte-level mutation of `src`.
pub fn mutate_bytes(src: &[u8], rng: &mut impl Rng) -> Vec<u8> {
    let mut b = src.to_vec();
    for _ in 0..rng.gen_range(1..=4) {
        let len = b.len();
        match rng.gen_range(0..6) {
            0 if len > 0 => {
                let i = rng.gen_range(0..len);
                b[i] ^= 1 << rng.gen_range(0..8);
            }
            1 => {
                const TOKENS: &[&[u8]] = &[b"{", b"}", b"(", b")", b"\"", b"->", b".", b"=", b":", b"\n", b"#", b"node", b"exec", b"data", b"1e999", b"\xff", b"\xc3", b"\xe2\x82"];
                let t = TOKENS.choose(rng).unwrap();
                let i = rng.gen_range(0..=len);
                b.splice(i..i, t.iter().copied());
            }
            2 if len > 0 => {
                let i = rng.gen_range(0..len);
                let j = (i + rng.gen_range(1..20)).min(len);
                b.drain(i..j);
            }
            3 if len > 0 => {
                let i = rng.gen_range(0..len);
                let j = (i + rng.gen_range(1..40)).min(len);
                let chunk = b[i..j].to_vec();
                let k = rng.gen_range(0..=len);
                b.splice(k..k, chunk);
            }
            4 if len > 0 => {
                let i = rng.gen_range(0..len);
                b[i] = rng.gen();
            }
            _ => {
                let i = rng.gen_range(0..=len);
                b.truncate(i);
            }
        }
    }
    b
}

/// Structural mutation of a graph: drop, retarget or add a wire, change a
/// node's kind, or drop a node.
pub fn mutate_graph(g: &Graph, rng: &mut impl Rng) -> Graph {
    let mut g = g.clone();
    if g.nodes.is_empty() {
        return g;
    }
    match rng.gen_range(0..6) {
        0 if !g.data_wires.is_empty() => {
            let i = rng.gen_range(0..g.data_wires.len());
            g.data_wires.remove(i);
        }
        1 if !g.exec_wires.is_empty() => {
            let i = rng.gen_range(0..g.exec_wires.len());
            g.exec_wires.remove(i);
        }
        2 if !g.data_wires.is_empty() => {
            let i = rng.gen_range(0..g.data_wires.len());
            let to = g.nodes.choose(rng).unwrap();
            if let Some(input) = to.kind.spec().inputs.iter().filter(|p| p.wireable).collect::<Vec<_>>().choose(rng) {
                g.data_wires[i].to = flowgame::graph::PinRef::new(to.id.clone(), input.name);
            }
        }
        3 => {
            let i = rng.gen_range(0..g.nodes.len());
            let kind = *NodeKind::ALL.choose(rng).unwrap();
            g.nodes[i].kind = kind;
            let spec = kind.spec();
            g.nodes[i].params.retain(|name, _| spec.input(name).is_some());
        }
        4 => {
            let i = rng.gen_range(0..g.nodes.len());
            let id = g.nodes.remove(i).id;
            g.data_wires.retain(|w| w.from.node != id && w.to.node != id);
            g.exec_wires.retain(|w| w.from.node != id && w.to.node != id);
        }
        _ => {
            let a = g.nodes.choose(rng).unwrap().clone();
            let b = g.nodes.choose(rng).unwrap().clone();
            if let Some(out) = a.kind.spec().outputs.choose(rng) {
                if let Some(input) = b.kind.spec().inputs.iter().filter(|p| p.wireable).collect::<Vec<_>>().choose(rng) {
                    g.data_wires.push(Wire::new((a.id.as_str(), out.name), (b.id.as_str(), input.name)));
                }
            }
        }
    }
    g
}

pub mod live {
    use std::net::SocketAddr;
    use std::path::{Path, PathBuf};
    use std::time::Duration;

    use flowgame::scene::{SceneFile, ScriptMode};
    use flowgame::service::{serve, ServeConfig, ServerMessage, StateMessage};
    use futures::{SinkExt, StreamExt};
    use tokio::sync::oneshot;
    use tokio_tungstenite::tungstenite::Message;

    pub struct Server {
        pub addr: SocketAddr,
        stop: Option<oneshot::Sender<()>>,
        task: tokio::task::JoinHandle<()>,
    }

    impl Server {
        pub async fn start(mode: ScriptMode, tick_hz: f64, record: Option<PathBuf>) -> Server {
            let scene_path = super::assets().join("scenes/standard.scene");
            let cfg = ServeConfig {
                scene: SceneFile::load(&scene_path).unwrap(),
                base_dir: scene_path.parent().unwrap().to_path_buf(),
                mode,
                tick_hz,
                record,
                static_dir: super::assets().join("web"),
            };
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            let addr = listener.local_addr().unwrap();
            let (tx, rx) = oneshot::channel();
            let task = tokio::spawn(async move {
                serve(cfg, listener, async {
                    let _ = rx.await;
                })
                .await
                .unwrap();
            });
            Server {
                addr,
                stop: Some(tx),
                task,
            }
        }

        pub async fn stop(mut self) {
            if let Some(tx) = self.stop.take() {
                let _ = tx.send(());
            }
            let _ = tokio::time::timeout(Duration::from_secs(5), self.task).await;
        }
    }

    /// Plays one session: `plan(step)` gives the axes wanted after state
    /// `step`; an input message is sent only when they change. Returns every
    /// state received, in order, after `steps` states past step 0.
    pub async fn play(addr: SocketAddr, steps: u64, plan: impl Fn(u64) -> (f64, f64)) -> Vec<StateMessage> {
        let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/session")).await.unwrap();
        ws.send(Message::Text(r#"{"type":"hello","proto":"flow/1"}"#.into())).await.unwrap();
        let mut states = Vec::new();
        let mut sent = (0.0, 0.0);
        while let Some(msg) = ws.next().await {
            let Message::Text(text) = msg.unwrap() else { continue };
            match serde_json::from_str::<ServerMessage>(&text).unwrap() {
                ServerMessage::State(s) => {
                    let step = s.step;
                    states.push(s);
                    if step >= steps {
                        break;
                    }
                    let want = plan(step);
                    if want != sent {
                        sent = want;
                        let m = format!(r#"{{"type":"input","h":{},"v":{}}}"#, want.0, want.1);
                        ws.send(Message::Text(m)).await.unwrap();
                    }
                }
                ServerMessage::Welcome { .. } => {}
                ServerMessage::Error { code, message } => panic!("{code:?}: {message}"),
            }
        }
        ws.close(None).await.unwrap();
        states
    }

    pub async fn wait_for(path: &Path) -> String {
        for _ in 0..200 {
            if let Ok(text) = std::fs::read_to_string(path) {
                return text;
            }
            tokio::time::sleep(Duration::from_millis(25)).await;
        }
        panic!("{} never appeared", path.display());
    }
}
