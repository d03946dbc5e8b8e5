//! Session configuration: schema, the TOML document format, validation,
//! built-in presets and the design-checklist report.

mod checklist;
mod presets;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{EnemyVariant, Orientation, TowerSpec};
use crate::grid::{Cell, GridMap};
use crate::sim::ScoreWeights;

pub use checklist::{checklist_report, ChecklistAnswers, HIGH_STRESS, LOW_STRESS};
pub use presets::{builtin_preset, standard_enemies, standard_towers, UnknownPreset, PRESET_NAMES};
pub use validate::{validate_config, ValidationCode, ValidationError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    TowerDefense,
    ObjectSelection,
    ObjectManipulation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MoneyModel {
    Shared,
    Individual,
}

/// Who may sell a tower.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SellPolicy {
    #[default]
    Anyone,
    OwnerOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommSettings {
    pub text_chat: bool,
    pub voice: bool,
    pub push_to_talk: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Visibility {
    pub tower_names: bool,
    pub tower_descriptions: bool,
    pub coordinate_grid: bool,
    pub spawn_preview: bool,
}

impl Default for Visibility {
    fn default() -> Self {
        Self { tower_names: true, tower_descriptions: true, coordinate_grid: true, spawn_preview: true }
    }
}

/// Fraction of a tower's total spend returned when it is sold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefundRates {
    pub planning: f64,
    pub attack: f64,
}

impl Default for RefundRates {
    fn default() -> Self {
        Self { planning: 1.0, attack: 0.75 }
    }
}

/// One player slot: a label (e.g. `H` or `AI`), the towers the slot may
/// build, and the display color used for chat and tower outlines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerAssignment {
    #[serde(default = "default_label")]
    pub label: String,
    pub color: String,
    pub towers: Vec<String>,
}

fn default_label() -> String {
    "H".to_string()
}

/// A tower at a fixed cell, used for pre-placed objects and reference layouts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacedObject {
    pub tower: String,
    pub cell: Cell,
    #[serde(default)]
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    #[serde(default)]
    pub name: String,
    pub starting_gold: u64,
    pub starting_health: u32,
    pub planning_seconds: f64,
    /// Authored lower bound on the gold needed to win; feeds the stress answer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_win_cost: Option<u64>,
    /// Index into `preplaced` of the tower players must pick (object selection).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection_target: Option<usize>,
    #[serde(default)]
    pub preplaced: Vec<PlacedObject>,
    #[serde(default)]
    pub reference_layout: Vec<PlacedObject>,
    pub map: GridMap,
}

/// Authored free-text checklist answers that cannot be derived from the config.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecklistNotes {
    pub solution_space: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(default)]
    pub name: String,
    pub mode: Mode,
    pub rounds_per_level: u32,
    pub money_model: MoneyModel,
    pub interact_during_attack: bool,
    #[serde(default)]
    pub sell_policy: SellPolicy,
    pub comm: CommSettings,
    #[serde(default)]
    pub visibility: Visibility,
    pub score: ScoreWeights,
    #[serde(default)]
    pub refund: RefundRates,
    #[serde(default)]
    pub notes: ChecklistNotes,
    pub team: Vec<TowerAssignment>,
    pub towers: Vec<TowerSpec>,
    pub enemies: Vec<EnemyVariant>,
    pub levels: Vec<LevelSpec>,
}

impl SessionConfig {
    pub fn tower(&self, id: &str) -> Option<&TowerSpec> {
        self.towers.iter().find(|t| t.id == id)
    }

    pub fn enemy(&self, id: &str) -> Option<&EnemyVariant> {
        self.enemies.iter().find(|e| e.id == id)
    }

    pub fn slot_count(&self) -> usize {
        self.team.len()
    }

    pub fn total_rounds(&self) -> usize {
        self.levels.len() * self.rounds_per_level as usize
    }
}

/// A syntax or typing problem in a configuration document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based; 0 when the parser reported no position.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parses a configuration document. Only syntax and typing are checked here;
/// see [`validate_config`] for semantic checks.
pub fn parse_config(text: &str) -> Result<SessionConfig, Vec<ConfigError>> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |span| line_col(text, span.start));
        vec![ConfigError { line, column, message: e.message().to_string() }]
    })
}

/// Renders a configuration as a document accepted by [`parse_config`].
pub fn serialize_config(config: &SessionConfig) -> String {
    toml::to_string(config).expect("session config is always representable as TOML")
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_round_trips_through_the_document_format() {
        for name in PRESET_NAMES {
            let config = builtin_preset(name).unwrap();
            let text = serialize_config(&config);
            let back = parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e:?}\n{text}"));
            assert_eq!(back, config, "{name}");
        }
    }

    #[test]
    fn missing_levels_is_named() {
        let config = builtin_preset("tutorial").unwrap();
        let text = serialize_config(&config);
        let cut = text.find("[[levels]]").unwrap();
        let errs = parse_config(&text[..cut]).unwrap_err();
        assert!(errs[0].message.contains("levels"), "{:?}", errs);
    }

    #[test]
    fn unknown_field_is_rejected_with_position() {
        let text = "mode = \"TOWER_DEFENSE\"\nbogus = 3\n";
        let errs = parse_config(text).unwrap_err();
        assert!(errs[0].message.contains("bogus"), "{:?}", errs);
        assert_eq!(errs[0].line, 2);
    }

    #[test]
    fn type_mismatch_is_reported() {
        let config = builtin_preset("tutorial").unwrap();
        let text = serialize_config(&config).replace("rounds_per_level = 1", "rounds_per_level = \"one\"");
        let errs = parse_config(&text).unwrap_err();
        assert!(errs[0].line > 0);
    }

    #[test]
    fn bad_map_glyph_is_a_parse_error() {
        let config = builtin_preset("tutorial").unwrap();
        let text = serialize_config(&config).replacen("\"....", "\"..?.", 1);
        let errs = parse_config(&text).unwrap_err();
        assert!(errs[0].message.contains("unknown tile"), "{:?}", errs);
    }
}
