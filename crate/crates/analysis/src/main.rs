use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use taskforge_analysis::table::{heatmap_table, skill_table, spend_table, utterance_table};
use taskforge_analysis::{
    expenditure_series, placement_heatmap, records_in_level, skill_summary, utterance_stats, AnnotationSet, Format,
    Layout, Table,
};
use taskforge_core::{builtin_preset, parse_config, GridMap, SessionConfig};
use taskforge_telemetry::{parse_log, LogRecord};

/// Analyze collaborative tower-defense session logs.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, alias = "out", value_enum, default_value_t = FormatArg::Csv, global = true)]
    format: FormatArg,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tower placement counts per cell.
    Heatmap {
        #[arg(long)]
        log: PathBuf,
        /// `WIDTHxHEIGHT`, a map file, a session config file, or `preset:NAME`.
        #[arg(long)]
        map: String,
        /// Level to read the map from and to restrict BUY records to.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, value_enum, default_value_t = LayoutArg::Long)]
        layout: LayoutArg,
    },
    /// Gold ledger per round.
    Spend {
        #[arg(long)]
        log: PathBuf,
        /// A session config file or `preset:NAME`.
        #[arg(long)]
        config: String,
    },
    /// Utterance statistics, or a skill summary when annotations are given.
    Chat {
        #[arg(long)]
        log: PathBuf,
        /// Lines of `index<TAB>skill[,skill...]`.
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Tsv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LayoutArg {
    Long,
    Grid,
}

fn read_log(path: &Path) -> Result<Vec<LogRecord>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_log(&text);
    for e in &parsed.errors {
        eprintln!("warning: {}: {e}", path.display());
    }
    Ok(parsed.records)
}

fn load_config(spec: &str) -> Result<SessionConfig> {
    if let Some(name) = spec.strip_prefix("preset:") {
        return Ok(builtin_preset(name)?);
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    parse_config(&text).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(ToString::to_string).collect();
        anyhow::anyhow!("{spec}: {}", lines.join("; "))
    })
}

fn map_dims(spec: &str, level: usize) -> Result<(u32, u32)> {
    if let Some((w, h)) = spec.split_once(['x', 'X']) {
        if let (Ok(w), Ok(h)) = (w.parse(), h.parse()) {
            return Ok((w, h));
        }
    }
    if !spec.starts_with("preset:") {
        let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        if let Ok(map) = toml::from_str::<GridMap>(&text) {
            return Ok((map.width, map.height));
        }
    }
    let config = load_config(spec)?;
    let Some(lvl) = config.levels.get(level) else {
        bail!("{spec} has {} level(s), level {level} requested", config.levels.len());
    };
    Ok((lvl.map.width, lvl.map.height))
}

fn run(cli: &Cli) -> Result<Table> {
    match &cli.command {
        Command::Heatmap { log, map, level, layout } => {
            let mut records = read_log(log)?;
            if let Some(level) = level {
                records = records_in_level(&records, *level);
            }
            let (w, h) = map_dims(map, level.unwrap_or(0))?;
            let report = placement_heatmap(&records, w, h);
            for r in &report.rejected {
                eprintln!("warning: BUY at ({}, {}) is outside the {w}x{h} map", r.location.0, r.location.1);
            }
            let layout = match layout {
                LayoutArg::Long => Layout::Long,
                LayoutArg::Grid => Layout::Grid,
            };
            Ok(heatmap_table(&report, layout))
        }
        Command::Spend { log, config } => {
            let records = read_log(log)?;
            let config = load_config(config)?;
            let report = expenditure_series(&records, &config);
            for issue in &report.issues {
                eprintln!("warning: {issue}");
            }
            Ok(spend_table(&report))
        }
        Command::Chat { log, annotations } => {
            let records = read_log(log)?;
            match annotations {
                None => Ok(utterance_table(&utterance_stats(&records))),
                Some(path) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let set = AnnotationSet::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
                    Ok(skill_table(&skill_summary(&records, &set)?))
                }
            }
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let table = run(&cli)?;
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Tsv => Format::Tsv,
    };
    match &cli.output {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            table.write(file, format)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock, format)?;
            lock.flush()?;
        }
    }
    Ok(())
}
