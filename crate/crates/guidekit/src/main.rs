use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use guidekit::formats::{encode_log, encode_metrics, encode_script};
use guidekit::{
    decode_log, decode_script, load_app_definition, load_keyword_table, parse_trace, FormatError, ShareService,
    TutorialStore,
};
use guidekit_core::{record_trace, replay, run_trace, summarize_metrics, validate_script, Mode, Session, StepMatch};

#[derive(Parser)]
#[command(name = "guidekit", version, about = "Record and replay interactive phone tutorials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Basic,
    Trial,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Basic => Mode::Basic,
            ModeArg::Trial => Mode::Trial,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Turn a demonstration trace into a tutorial file.
    Record {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that every tutorial step still matches the app.
    Validate {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        tutorial: PathBuf,
    },
    /// Replay a trace against a tutorial and write the event log.
    Run {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        tutorial: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        log: PathBuf,
        /// Keyword table JSON; defaults to English phrases.
        #[arg(long)]
        keywords: Option<PathBuf>,
    },
    /// Print task metrics of a run log as JSON.
    Metrics {
        #[arg(long)]
        log: PathBuf,
    },
    /// Serve the tutorial store and live sessions over HTTP on loopback.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        bind: std::net::IpAddr,
    },
}

/// Exit 1 for validation failures, 2 for unreadable or malformed input.
enum Failure {
    Validation(String),
    Input(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Validation(_) => Failure::Validation(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Record { app, trace, name, out } => {
            let app = load_app_definition(&read(&app)?)?;
            let events = parse_trace(&read(&trace)?)?;
            let (_, script) =
                record_trace(Arc::new(app), &name, &events).map_err(|e| Failure::Validation(e.to_string()))?;
            write(&out, &encode_script(&script))?;
            println!("recorded {} steps to {}", script.len(), out.display());
        }
        Command::Validate { app, tutorial } => {
            let app = load_app_definition(&read(&app)?)?;
            let script = decode_script(&read(&tutorial)?)?;
            let report = validate_script(&script, &app).map_err(|e| Failure::Validation(e.to_string()))?;
            for (i, step) in report.steps.iter().enumerate() {
                match step {
                    StepMatch::Matched(node) => println!("step {i}: ok ({node})"),
                    StepMatch::Missing => println!("step {i}: missing on `{}`", script.steps[i].screen_id),
                }
            }
            if !report.ok {
                return Err(Failure::Validation(format!(
                    "steps {:?} do not match",
                    report.missing()
                )));
            }
        }
        Command::Run {
            mode,
            app,
            tutorial,
            trace,
            log,
            keywords,
        } => {
            let app = Arc::new(load_app_definition(&read(&app)?)?);
            let script = decode_script(&read(&tutorial)?)?;
            let events = parse_trace(&read(&trace)?)?;
            let (entries, metrics) = match keywords {
                None => run_trace(app, script, mode.into(), &events),
                Some(path) => {
                    let table = load_keyword_table(&read(&path)?)?;
                    Session::new("trace", app, Some(script))
                        .and_then(|s| replay(s.with_keywords(table), mode.into(), &events))
                }
            }
            .map_err(|e| Failure::Validation(e.to_string()))?;
            write(&log, &encode_log(&entries))?;
            println!("{}", encode_metrics(&metrics));
        }
        Command::Metrics { log } => {
            let entries = decode_log(&read(&log)?)?;
            let metrics = summarize_metrics(&entries).map_err(|e| Failure::Input(e.to_string()))?;
            println!("{}", encode_metrics(&metrics));
        }
        Command::Serve { port, store, bind } => {
            let store = TutorialStore::open(&store).map_err(|e| Failure::Input(e.to_string()))?;
            let service = Arc::new(ShareService::new(store));
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Input(e.to_string()))?;
            runtime
                .block_on(guidekit::http::serve(SocketAddr::new(bind, port), service))
                .map_err(|e| Failure::Input(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
