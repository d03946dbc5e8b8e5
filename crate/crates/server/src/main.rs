use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Parser;
use taskforge_core::{builtin_preset, parse_config, validate_config, SessionConfig};
use taskforge_server::{AppState, OpenAuth, RoomOptions, ServerOptions};
use taskforge_telemetry::{HttpTransport, RetryPolicy, SinkConfig};
use tracing_subscriber::EnvFilter;

/// Serve collaborative tower-defense sessions over WebSocket.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// Address to listen on.
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: String,
    /// Session configuration file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long, default_value = "case-study")]
    preset: String,
    /// Base URL of the log collection service.
    #[arg(long)]
    log_sink: Option<String>,
    /// Directory for session log files.
    #[arg(long, default_value = "logs")]
    log_dir: PathBuf,
    #[arg(long, default_value_t = 50)]
    batch_size: usize,
    /// Seconds before a partial log batch is sent.
    #[arg(long, default_value_t = 5.0)]
    flush_interval: f64,
    /// Directory for intent logs, configs and leaderboards.
    #[arg(long)]
    persist: Option<PathBuf>,
    /// Simulation speed multiplier.
    #[arg(long, default_value_t = 1.0)]
    speed: f64,
    /// Seconds between rounds.
    #[arg(long, default_value_t = 10.0)]
    intermission: f64,
    /// Freeze the planning timer while no player is connected.
    #[arg(long)]
    pause_planning_when_empty: bool,
    /// Directory served at `/` (the browser client build).
    #[arg(long)]
    static_dir: Option<PathBuf>,
    /// Minutes before an empty room is closed.
    #[arg(long, default_value_t = 30)]
    idle_minutes: u64,
}

fn load_config(args: &Args) -> Result<SessionConfig> {
    let config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).map_err(|errs| {
                let lines: Vec<String> = errs.iter().map(ToString::to_string).collect();
                anyhow::anyhow!("{}: {}", path.display(), lines.join("; "))
            })?
        }
        None => builtin_preset(&args.preset)?,
    };
    if let Err(errs) = validate_config(&config) {
        for e in &errs {
            eprintln!("{e}");
        }
        bail!("configuration has {} problem(s)", errs.len());
    }
    Ok(config)
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let args = Args::parse();
    let config = load_config(&args)?;
    if !(args.speed.is_finite() && args.speed > 0.0) {
        bail!("--speed must be a positive number");
    }
    if args.batch_size == 0 {
        bail!("--batch-size must be at least 1");
    }
    let opts = ServerOptions {
        config: Arc::new(config),
        room: RoomOptions {
            intermission_ticks: taskforge_core::sim::seconds_to_ticks(args.intermission),
            pause_planning_when_empty: args.pause_planning_when_empty,
            ..RoomOptions::default()
        },
        speed: args.speed,
        log_dir: args.log_dir.clone(),
        sink: SinkConfig {
            endpoint: args.log_sink.clone(),
            batch_size: args.batch_size,
            flush_interval: Duration::from_secs_f64(args.flush_interval.max(0.01)),
            retry: RetryPolicy::default(),
        },
        transport: Arc::new(HttpTransport::new()),
        persist: args.persist.clone(),
        static_dir: args.static_dir.clone(),
        auth: Arc::new(OpenAuth),
        idle_timeout: Duration::from_secs(args.idle_minutes * 60),
    };
    let listener =
        tokio::net::TcpListener::bind(&args.listen).await.with_context(|| format!("binding {}", args.listen))?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    let state = AppState::new(opts);
    tokio::select! {
        res = taskforge_server::serve(listener, state) => res.context("server stopped")?,
        _ = tokio::signal::ctrl_c() => tracing::info!("shutting down"),
    }
    Ok(())
}
