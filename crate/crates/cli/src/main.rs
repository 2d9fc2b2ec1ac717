use std::fs::File;
use std::io::Write;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use flexunit::dataset::{colleges, load_csv, CsvOptions, Dataset};
use flexunit::nl::Grammar;
use flexunit::session::replay::{replay, Script};
use flexunit::session::server::serve;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Speech and pen/touch driven unit visualizations, headless.
#[derive(Parser)]
#[command(name = "flexunit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a JSON-lines event script and print the final snapshot.
    Replay {
        #[arg(long)]
        script: PathBuf,
        /// CSV table; defaults to the bundled colleges data.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Overrides the seed in the script header.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the snapshot here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse one utterance and print the outcome as JSON.
    Parse {
        utterance: String,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the dataset schema and statistics as JSON.
    Schema {
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Serve sessions over line-delimited JSON on TCP.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// 0 picks a free port.
        #[arg(long, default_value_t = 7878)]
        port: u16,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(data: Option<&Path>) -> Result<Dataset> {
    match data {
        None => Ok(colleges()),
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            load_csv(file, CsvOptions::default()).with_context(|| format!("loading {}", path.display()))
        }
    }
}

/// Prints a line to stdout; a reader that went away (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Replay {
            script,
            data,
            seed,
            out,
        } => {
            let dataset = Arc::new(load(data.as_deref())?);
            let text = std::fs::read_to_string(&script).with_context(|| format!("reading {}", script.display()))?;
            let parsed = Script::parse(&text).with_context(|| script.display().to_string())?;
            let log = replay(dataset, &parsed, seed).with_context(|| script.display().to_string())?;
            // feedback goes to stderr so the snapshot can be piped
            let mut err = std::io::stderr().lock();
            for r in &log.responses {
                for f in &r.feedback {
                    writeln!(err, "{}: [{:?}] {}", r.seq, f.kind, f.text)?;
                }
            }
            let json = log.snapshot.to_json();
            match out {
                Some(path) => std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?,
                None => emit(&json)?,
            }
        }
        Command::Parse { utterance, data, seed } => {
            let dataset = load(data.as_deref())?;
            let outcome = Grammar::new(&dataset).parse(&utterance, &mut ChaCha8Rng::seed_from_u64(seed));
            emit(&serde_json::to_string_pretty(&outcome)?)?;
        }
        Command::Schema { data } => {
            emit(&serde_json::to_string_pretty(&load(data.as_deref())?.summary_json())?)?;
        }
        Command::Serve { host, port, data, seed } => {
            let dataset = Arc::new(load(data.as_deref())?);
            let listener =
                TcpListener::bind((host.as_str(), port)).with_context(|| format!("binding {host}:{port}"))?;
            emit(&format!("listening on {}", listener.local_addr()?))?;
            let config = flexunit::session::SessionConfig {
                seed,
                ..Default::default()
            };
            serve(listener, dataset, config)?;
        }
    }
    Ok(())
}
