//! Offline analysis of session logs: placement heatmaps, per-round gold
//! ledgers, utterance statistics and skill summaries from human annotations.

pub mod chat;
pub mod heatmap;
pub mod spend;
pub mod table;

pub use chat::{
    skill_summary, tokens, utterance_stats, utterances, AnnotationError, AnnotationSet, DanglingIndex, Dimension,
    Skill, SkillRow, SkillSummary, UtteranceStats,
};
pub use heatmap::{placement_heatmap, placement_heatmap_for, records_in_level, Heatmap, HeatmapReport, OutOfBounds};
pub use spend::{expenditure_series, RoundSummary, SpendIssue, SpendReport};
pub use table::{Format, Layout, Table, UNDEFINED};
