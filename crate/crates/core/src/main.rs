use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flowgame::graphlang::{self, ParseDiagnostic};
use flowgame::harness::{self, InputTrace, RunError, RunOptions};
use flowgame::scene::{SceneFile, SceneFileError, ScriptMode};
use flowgame::service::{self, ServeConfig, DEFAULT_PORT};

const EXIT_NOT_EQUIVALENT: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_FAULT: u8 = 3;

#[derive(Parser)]
#[command(name = "flowgame", version, about = "Roll-a-ball engine with graph and native scripting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Graph,
    Script,
}

impl From<Mode> for ScriptMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Graph => ScriptMode::Graph,
            Mode::Script => ScriptMode::Script,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Fg,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trace and write the trajectory.
    Run {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        fixed_dt: Option<f64>,
        /// Trajectory file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run both scripting paths and compare their trajectories.
    Check {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = harness::DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        fixed_dt: Option<f64>,
    },
    /// Parse and validate a graph file.
    Validate {
        file: PathBuf,
        /// Print the graph in this format when it is valid.
        #[arg(long, value_enum)]
        emit: Option<Emit>,
    },
    /// Serve live sessions over websockets.
    Serve {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum, default_value = "graph")]
        mode: Mode,
        #[arg(long, env = "FLOW_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value_t = 50.0)]
        tick_hz: f64,
        #[arg(long)]
        record: Option<PathBuf>,
        #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/assets/web"))]
        static_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            scene,
            mode,
            trace,
            steps,
            fixed_dt,
            out,
        } => cmd_run(&scene, mode.into(), &trace, steps, fixed_dt, out.as_deref()),
        Command::Check {
            scene,
            trace,
            steps,
            tolerance,
            fixed_dt,
        } => cmd_check(&scene, &trace, steps, tolerance, fixed_dt),
        Command::Validate { file, emit } => cmd_validate(&file, emit),
        Command::Serve {
            scene,
            mode,
            port,
            tick_hz,
            record,
            static_dir,
        } => cmd_serve(&scene, mode.into(), port, tick_hz, record, static_dir),
    };
    ExitCode::from(code)
}

fn load_inputs(scene: &Path, trace: &Path) -> Result<(SceneFile, PathBuf, InputTrace), u8> {
    let file = SceneFile::load(scene).map_err(|e| report_scene_error(&e))?;
    let t = InputTrace::load(trace).map_err(|e| {
        eprintln!("{}: {e}", trace.display());
        EXIT_INVALID
    })?;
    Ok((file, base_dir(scene), t))
}

fn base_dir(scene: &Path) -> PathBuf {
    scene.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn cmd_run(scene: &Path, mode: ScriptMode, trace: &Path, steps: u64, fixed_dt: Option<f64>, out: Option<&Path>) -> u8 {
    let (file, base, t) = match load_inputs(scene, trace) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let opts = RunOptions {
        fixed_dt,
        ..RunOptions::steps(steps)
    };
    match harness::run(&file, &base, mode, &t, &opts) {
        Ok(traj) => {
            let text = traj.to_jsonl();
            let written = match out {
                Some(p) => std::fs::write(p, text),
                None => write_stdout(&text),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_INVALID;
            }
            0
        }
        Err(e) => report_run_error(&e),
    }
}

fn cmd_check(scene: &Path, trace: &Path, steps: u64, tolerance: f64, fixed_dt: Option<f64>) -> u8 {
    let (file, base, t) = match load_inputs(scene, trace) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let opts = RunOptions {
        fixed_dt,
        stop_on_win: false,
        ..RunOptions::steps(steps)
    };
    match harness::check_equivalence(&file, &base, &t, &opts, tolerance) {
        Ok(report) => {
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            let _ = write_stdout(&text);
            if report.equivalent {
                0
            } else {
                EXIT_NOT_EQUIVALENT
            }
        }
        Err(e) => report_run_error(&e),
    }
}

fn cmd_validate(path: &Path, emit: Option<Emit>) -> u8 {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return EXIT_INVALID;
        }
    };
    let shown = path.display().to_string();
    let diags = match std::str::from_utf8(&bytes) {
        Ok(src) => graphlang::check_source(src),
        Err(_) => graphlang::parse_bytes(&bytes).err().unwrap_or_default(),
    };
    print_diagnostics(&shown, &diags);
    if diags.iter().any(ParseDiagnostic::is_error) {
        return EXIT_INVALID;
    }
    let src = String::from_utf8_lossy(&bytes);
    let graph = graphlang::parse(&src).expect("clean source parses");
    let text = match emit {
        Some(Emit::Json) => {
            let mut t = graphlang::to_json(&graph);
            if !t.ends_with('\n') {
                t.push('\n');
            }
            t
        }
        Some(Emit::Fg) => graphlang::serialize(&graph),
        None => return 0,
    };
    let _ = write_stdout(&text);
    0
}

fn cmd_serve(scene: &Path, mode: ScriptMode, port: u16, tick_hz: f64, record: Option<PathBuf>, static_dir: PathBuf) -> u8 {
    if !(tick_hz > 0.0 && tick_hz.is_finite()) {
        eprintln!("error: --tick-hz must be positive");
        return EXIT_INVALID;
    }
    let file = match SceneFile::load(scene) {
        Ok(f) => f,
        Err(e) => return report_scene_error(&e),
    };
    let base = base_dir(scene);
    // fail fast on a scene that cannot be built
    if let Err(e) = file.instantiate(&base, mode) {
        return report_scene_error(&e);
    }
    let cfg = ServeConfig {
        scene: file,
        base_dir: base,
        mode,
        tick_hz,
        record,
        static_dir,
    };
    let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
    let result = rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
        tracing::info!(addr = %listener.local_addr()?, "serving");
        service::serve(cfg, listener, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

/// A closed pipe on the reader side is not an error worth a panic.
fn write_stdout(text: &str) -> std::io::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn print_diagnostics(path: &str, diags: &[ParseDiagnostic]) {
    for d in diags {
        eprintln!("{}", d.render(path));
    }
}

fn report_scene_error(e: &SceneFileError) -> u8 {
    match e {
        SceneFileError::Graph { path, diagnostics, .. } => print_diagnostics(&path.display().to_string(), diagnostics),
        other => eprintln!("error: {other}"),
    }
    EXIT_INVALID
}

fn report_run_error(e: &RunError) -> u8 {
    match e {
        RunError::Validation(s) => report_scene_error(s),
        RunError::Options(_) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
        RunError::Fault { .. } | RunError::Physics { .. } => {
            eprintln!("runtime fault: {e}");
            EXIT_FAULT
        }
    }
}
