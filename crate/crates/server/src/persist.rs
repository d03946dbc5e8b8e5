//! Intent log and offline replay.
//!
//! The room appends one JSON line per round start, accepted command and round
//! end. Replaying the log through the simulation reproduces every round's
//! final digest.

use std::fs::OpenOptions;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use taskforge_core::sim::state_digest;
use taskforge_core::{init_game_with_players, Command, GameState, PlayerId, SessionConfig, SimError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntentLogEntry {
    RoundStart {
        level: usize,
        round: usize,
        players: Vec<PlayerId>,
    },
    /// Applied when the round's `tick` counter equals `tick`.
    Command {
        level: usize,
        round: usize,
        tick: u64,
        command: Command,
    },
    RoundEnd {
        level: usize,
        round: usize,
        tick: u64,
        digest: String,
    },
}

#[derive(Clone, Debug)]
pub struct IntentLogFile {
    path: PathBuf,
}

impl IntentLogFile {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, entries: &[IntentLogEntry]) -> io::Result<()> {
        if entries.is_empty() {
            return Ok(());
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        for e in entries {
            writeln!(f, "{}", serde_json::to_string(e).map_err(io::Error::other)?)?;
        }
        f.flush()
    }
}

pub fn read_intent_log(path: &Path) -> io::Result<Vec<IntentLogEntry>> {
    let f = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)))?;
        out.push(entry);
    }
    Ok(out)
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("command for level {level} round {round} before its round start")]
    NoRound { level: usize, round: usize },
    #[error("logged command was rejected on replay at tick {tick}: {source}")]
    Rejected { tick: u64, source: SimError },
    #[error("logged command at tick {tick} comes after the round ended at tick {ended}")]
    PastEnd { tick: u64, ended: u64 },
    #[error(transparent)]
    Init(#[from] SimError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayedRound {
    pub level: usize,
    pub round: usize,
    pub tick: u64,
    pub digest: String,
    /// The digest the server recorded, if the log has the round's end.
    pub logged_digest: Option<String>,
}

/// Runs the logged rounds through the simulation.
pub fn replay(config: Arc<SessionConfig>, entries: &[IntentLogEntry]) -> Result<Vec<ReplayedRound>, ReplayError> {
    let mut out = Vec::new();
    let mut current: Option<(usize, usize, GameState)> = None;
    for entry in entries {
        match entry {
            IntentLogEntry::RoundStart { level, round, players } => {
                if let Some((l, r, s)) = current.take() {
                    out.push(finish(l, r, s, None));
                }
                let state = init_game_with_players(config.clone(), *level, *round, players)?;
                current = Some((*level, *round, state));
            }
            IntentLogEntry::Command { level, round, tick, command } => {
                let Some((l, r, state)) = current.as_mut() else {
                    return Err(ReplayError::NoRound { level: *level, round: *round });
                };
                if (*l, *r) != (*level, *round) {
                    return Err(ReplayError::NoRound { level: *level, round: *round });
                }
                while state.tick < *tick && !state.is_over() {
                    state.step();
                }
                if state.tick != *tick {
                    return Err(ReplayError::PastEnd { tick: *tick, ended: state.tick });
                }
                state.apply_command(command).map_err(|source| ReplayError::Rejected { tick: *tick, source })?;
            }
            IntentLogEntry::RoundEnd { level, round, digest, .. } => {
                if let Some((l, r, s)) = current.take() {
                    if (l, r) == (*level, *round) {
                        out.push(finish(l, r, s, Some(digest.clone())));
                    } else {
                        out.push(finish(l, r, s, None));
                    }
                }
            }
        }
    }
    if let Some((l, r, s)) = current.take() {
        out.push(finish(l, r, s, None));
    }
    Ok(out)
}

fn finish(level: usize, round: usize, mut state: GameState, logged: Option<String>) -> ReplayedRound {
    while !state.is_over() {
        state.step();
    }
    ReplayedRound { level, round, tick: state.tick, digest: state_digest(&state), logged_digest: logged }
}
