//! Placement frequency per cell.

use taskforge_core::GridMap;
use taskforge_telemetry::{Action, LogRecord, RecordBody};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heatmap {
    pub width: u32,
    pub height: u32,
    /// Row-major, `width * height` entries.
    pub counts: Vec<u64>,
}

impl Heatmap {
    pub fn new(width: u32, height: u32) -> Self {
        Heatmap { width, height, counts: vec![0; (width as usize) * (height as usize)] }
    }

    pub fn get(&self, x: u32, y: u32) -> u64 {
        if x < self.width && y < self.height {
            self.counts[(y * self.width + x) as usize]
        } else {
            0
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Rows top to bottom.
    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.counts.chunks(self.width.max(1) as usize)
    }
}

/// A BUY outside the grid. `index` is the record's position in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutOfBounds {
    pub index: usize,
    pub location: (u32, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeatmapReport {
    pub heatmap: Heatmap,
    /// BUY records counted.
    pub buys: u64,
    pub rejected: Vec<OutOfBounds>,
}

/// Counts BUY records per cell. SELL does not decrement.
pub fn placement_heatmap(records: &[LogRecord], width: u32, height: u32) -> HeatmapReport {
    let mut heatmap = Heatmap::new(width, height);
    let mut rejected = Vec::new();
    let mut buys = 0;
    for (index, rec) in records.iter().enumerate() {
        let RecordBody::Action { action: Action::Buy, location: (x, y), .. } = rec.body else {
            continue;
        };
        if x < width && y < height {
            heatmap.counts[(y * width + x) as usize] += 1;
            buys += 1;
        } else {
            rejected.push(OutOfBounds { index, location: (x, y) });
        }
    }
    HeatmapReport { heatmap, buys, rejected }
}

pub fn placement_heatmap_for(records: &[LogRecord], map: &GridMap) -> HeatmapReport {
    placement_heatmap(records, map.width, map.height)
}

/// The records that belong to rounds of `level`. Logs without round
/// boundaries are returned whole.
pub fn records_in_level(records: &[LogRecord], level: usize) -> Vec<LogRecord> {
    if !records.iter().any(|r| r.event() == Some("ROUND_START")) {
        return records.to_vec();
    }
    let mut inside = false;
    let mut out = Vec::new();
    for r in records {
        match r.event() {
            Some("ROUND_START") => inside = r.detail("level").and_then(|l| l.parse().ok()) == Some(level),
            Some("ROUND_END") => inside = false,
            _ if inside => out.push(r.clone()),
            _ => {}
        }
    }
    out
}
