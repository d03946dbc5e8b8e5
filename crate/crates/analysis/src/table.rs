//! CSV and TSV rendering of analysis results.

use std::io::Write;

use crate::chat::{Dimension, SkillSummary, UtteranceStats};
use crate::heatmap::HeatmapReport;
use crate::spend::SpendReport;

/// Written wherever a value is undefined, such as a mean over nothing.
pub const UNDEFINED: &str = "—";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    fn delimiter(self) -> u8 {
        match self {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        }
    }
}

/// Header, rows, and `#` metadata lines printed before the header.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { meta: Vec::new(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> csv::Result<()> {
        let mut out = out;
        for m in &self.meta {
            writeln!(out, "# {m}")?;
        }
        let mut w = csv::WriterBuilder::new().delimiter(format.delimiter()).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, format).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("tables are UTF-8")
    }
}

pub fn mean(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |x| format!("{x:.3}"))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |x| x.to_string())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Layout {
    /// One `x,y,count` row per cell.
    #[default]
    Long,
    /// One row per map row, one column per x.
    Grid,
}

pub fn heatmap_table(report: &HeatmapReport, layout: Layout) -> Table {
    let h = &report.heatmap;
    let mut t = match layout {
        Layout::Long => {
            let mut t = Table::new(&["x", "y", "count"]);
            for y in 0..h.height {
                for x in 0..h.width {
                    t.rows.push(vec![x.to_string(), y.to_string(), h.get(x, y).to_string()]);
                }
            }
            t
        }
        Layout::Grid => {
            let mut header = vec!["y".to_string()];
            header.extend((0..h.width).map(|x| x.to_string()));
            let mut t = Table { header, ..Table::default() };
            for (y, row) in h.rows().enumerate() {
                let mut cells = vec![y.to_string()];
                cells.extend(row.iter().map(u64::to_string));
                t.rows.push(cells);
            }
            t
        }
    };
    t.meta.push(format!(
        "width={} height={} buys={} out_of_bounds={}",
        h.width,
        h.height,
        report.buys,
        report.rejected.len()
    ));
    t
}

pub fn spend_table(report: &SpendReport) -> Table {
    let mut t = Table::new(&[
        "room",
        "level",
        "round",
        "start_gold",
        "tower_spend",
        "upgrade_spend",
        "refunds",
        "bounties",
        "unspent",
        "logged_unspent",
        "buys",
        "kills",
        "leaks",
        "final_health",
        "score",
        "chat",
        "complete",
    ]);
    for r in &report.rounds {
        t.rows.push(vec![
            r.room.clone(),
            r.level.to_string(),
            r.round.to_string(),
            r.start_gold.to_string(),
            r.tower_spend.to_string(),
            r.upgrade_spend.to_string(),
            r.refunds.to_string(),
            r.bounties.to_string(),
            r.unspent.to_string(),
            opt(r.logged_unspent),
            r.buys.to_string(),
            r.kills.to_string(),
            r.leaks.to_string(),
            opt(r.final_health),
            opt(r.score),
            r.chat.to_string(),
            r.complete.to_string(),
        ]);
    }
    t.meta.extend(report.issues.iter().map(|i| format!("issue: {i}")));
    t
}

pub fn utterance_table(stats: &UtteranceStats) -> Table {
    let mut t = Table::new(&["utterances", "vocabulary", "mean_tokens"]);
    t.rows.push(vec![stats.utterances.to_string(), stats.vocabulary.to_string(), mean(stats.mean_tokens)]);
    t
}

pub fn skill_table(summary: &SkillSummary) -> Table {
    let mut t = Table::new(&["dimension", "skill", "count", "mean_tokens", "share"]);
    t.meta.push("count=per-label".to_string());
    t.meta.push(format!(
        "annotated_utterances={} labels={} social_share={} cognitive_share={}",
        summary.annotated_utterances,
        summary.total_labels(),
        mean(summary.dimension_share(Dimension::Social)),
        mean(summary.dimension_share(Dimension::Cognitive)),
    ));
    for r in &summary.rows {
        t.rows.push(vec![
            r.skill.dimension().as_str().to_string(),
            r.skill.as_str().to_string(),
            r.count.to_string(),
            mean(r.mean_tokens),
            mean(summary.share(&[r.skill])),
        ]);
    }
    t
}
