use std::fs::OpenOptions;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use taskforge_core::sim::ScoreBreakdown;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub team_name: String,
    pub room: String,
    pub level: usize,
    pub round: usize,
    pub score: f64,
    pub breakdown: ScoreBreakdown,
    pub completed_at: DateTime<Utc>,
}

/// Highest scores first; equal scores keep the earlier completion first.
pub fn topk(entries: &[LeaderboardEntry], k: usize) -> Vec<LeaderboardEntry> {
    let mut sorted = entries.to_vec();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.completed_at.cmp(&b.completed_at)));
    sorted.truncate(k);
    sorted
}

/// Append-only JSON-lines file of leaderboard entries.
#[derive(Clone, Debug)]
pub struct LeaderboardFile {
    path: PathBuf,
}

impl LeaderboardFile {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, entry: &LeaderboardEntry) -> io::Result<()> {
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{}", serde_json::to_string(entry).map_err(io::Error::other)?)?;
        f.flush()
    }

    pub fn load(&self) -> io::Result<Vec<LeaderboardEntry>> {
        read_entries(&self.path)
    }
}

fn read_entries(path: &Path) -> io::Result<Vec<LeaderboardEntry>> {
    let f = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(e) => out.push(e),
            Err(e) => tracing::warn!(path = %path.display(), error = %e, "skipping bad leaderboard line"),
        }
    }
    Ok(out)
}

/// Every entry from the `*.leaderboard.jsonl` files in `dir`.
pub fn load_dir(dir: &Path) -> io::Result<Vec<LeaderboardEntry>> {
    let mut out = Vec::new();
    let Ok(rd) = std::fs::read_dir(dir) else {
        return Ok(out);
    };
    for entry in rd {
        let path = entry?.path();
        if path.to_string_lossy().ends_with(".leaderboard.jsonl") {
            out.extend(read_entries(&path)?);
        }
    }
    Ok(out)
}
