//! Design-checklist answers derived from a config.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::grid::TileKind;
use crate::sim::ScoreMode;

use super::{LevelSpec, Mode, MoneyModel, SessionConfig};

pub const HIGH_STRESS: &str = "high stress";
pub const LOW_STRESS: &str = "low/moderate stress";

/// Answers to the ten design questions, one line of text each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistAnswers {
    /// How is the task evaluated for success?
    pub q1: String,
    /// How long does one instance take?
    pub q2: String,
    /// How do skill and expertise scale with repetition?
    pub q3: String,
    /// Which teammates are human or AI?
    pub q4: String,
    /// Symmetry of roles.
    pub q5: String,
    /// Interdependence of teammates.
    pub q6: String,
    /// Openness of the solution space.
    pub q7: String,
    /// Information availability and distribution.
    pub q8: String,
    /// Stress.
    pub q9: String,
    /// Communication medium.
    pub q10: String,
}

impl ChecklistAnswers {
    pub fn as_pairs(&self) -> [(&'static str, &str); 10] {
        [
            ("Q1", &self.q1),
            ("Q2", &self.q2),
            ("Q3", &self.q3),
            ("Q4", &self.q4),
            ("Q5", &self.q5),
            ("Q6", &self.q6),
            ("Q7", &self.q7),
            ("Q8", &self.q8),
            ("Q9", &self.q9),
            ("Q10", &self.q10),
        ]
    }
}

fn fmt_weight(w: f64) -> String {
    if w.fract() == 0.0 {
        format!("{w:.0}")
    } else {
        format!("{w}")
    }
}

/// Seconds until the last scripted enemy would reach the base unhindered.
pub(crate) fn scripted_attack_seconds(level: &LevelSpec, config: &SessionConfig) -> f64 {
    level
        .map
        .spawns
        .iter()
        .flat_map(|s| {
            let length = level.map.routes.get(s.route).map_or(0.0, |r| r.total_length());
            s.entries.iter().map(move |e| {
                let speed = config.enemy(&e.enemy).map_or(1.0, |v| v.speed);
                e.at + length / speed
            })
        })
        .fold(0.0, f64::max)
}

fn q1(config: &SessionConfig) -> String {
    match (config.mode, config.score.mode) {
        (Mode::ObjectSelection, _) => "Binary win/lose: whether the correct object was selected".to_string(),
        (Mode::ObjectManipulation, _) => {
            "Binary win/lose: placed objects must match the reference layout in cell and orientation".to_string()
        }
        (Mode::TowerDefense, ScoreMode::Binary) => "Binary win/lose: the base survives every wave".to_string(),
        (Mode::TowerDefense, ScoreMode::Linear) => {
            let w = &config.score;
            let terms: Vec<String> = [
                (w.unspent, "unspent money"),
                (w.points, "kill points for enemies destroyed (kills)"),
                (w.health, "remaining base health"),
            ]
            .iter()
            .filter(|(x, _)| *x > 0.0)
            .map(|(x, name)| format!("{} x {name}", fmt_weight(*x)))
            .collect();
            if terms.is_empty() {
                "Score: constant zero".to_string()
            } else {
                format!("Score = {}", terms.join(" + "))
            }
        }
    }
}

fn q2(config: &SessionConfig) -> String {
    let parts: Vec<String> = config
        .levels
        .iter()
        .enumerate()
        .map(|(i, level)| {
            let planning = if level.planning_seconds > 0.0 {
                format!("{:.0} s planning", level.planning_seconds)
            } else {
                "untimed planning".to_string()
            };
            match config.mode {
                Mode::TowerDefense => {
                    format!("level {}: {planning} + ~{:.0} s attack", i + 1, scripted_attack_seconds(level, config))
                }
                _ => format!("level {}: {planning}, no attack phase", i + 1),
            }
        })
        .collect();
    parts.join("; ")
}

fn q3(config: &SessionConfig) -> String {
    let reps = if config.rounds_per_level > 1 {
        format!("each level is repeated {} times", config.rounds_per_level)
    } else {
        "each level is played once".to_string()
    };
    if config.levels.len() <= 1 {
        return format!("Single level; {reps}");
    }
    let spawns: Vec<String> = config.levels.iter().map(|l| l.map.spawns.len().to_string()).collect();
    let build: Vec<String> = config.levels.iter().map(|l| l.map.count(TileKind::Buildable).to_string()).collect();
    format!(
        "{} levels; {reps}; spawn points per level {}; buildable cells per level {}",
        config.levels.len(),
        spawns.join(" -> "),
        build.join(" -> ")
    )
}

fn q4(config: &SessionConfig) -> String {
    let labels: Vec<&str> = config.team.iter().map(|s| s.label.as_str()).collect();
    labels.join("-")
}

fn q5(config: &SessionConfig) -> String {
    let sets: Vec<BTreeSet<&str>> = config.team.iter().map(|s| s.towers.iter().map(String::as_str).collect()).collect();
    let sizes: Vec<String> = sets.iter().map(|s| s.len().to_string()).collect();
    if sets.len() <= 1 {
        return format!("Single player with {} towers", sizes.join(""));
    }
    if sets.windows(2).all(|w| w[0] == w[1]) {
        return "Symmetric: every player has the same towers".to_string();
    }
    let disjoint = (0..sets.len()).all(|i| (i + 1..sets.len()).all(|j| sets[i].is_disjoint(&sets[j])));
    if disjoint {
        format!("Asymmetric: each player has unique towers ({} per player)", sizes.join("/"))
    } else {
        format!("Partially symmetric: some towers are shared ({} per player)", sizes.join("/"))
    }
}

fn q6(config: &SessionConfig) -> String {
    let mut parts = Vec::new();
    let exclusive =
        config.towers.iter().filter(|t| config.team.iter().filter(|s| s.towers.contains(&t.id)).count() == 1).count();
    if exclusive > 0 {
        parts.push(format!("{exclusive} tower types are available to only one player"));
    }
    if config.money_model == MoneyModel::Shared {
        parts.push("all purchases draw on one shared gold pool".to_string());
    } else {
        parts.push("each player spends from a separate gold pool".to_string());
    }
    let helpers: Vec<&str> = config
        .team
        .iter()
        .flat_map(|s| s.towers.iter())
        .filter_map(|id| config.tower(id))
        .filter(|t| matches!(t.archetype, crate::catalog::Archetype::Support | crate::catalog::Archetype::Discount))
        .map(|t| t.id.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !helpers.is_empty() {
        parts.push(format!("{} towers strengthen teammates' towers", helpers.join(" and ")));
    }
    parts.join("; ")
}

fn q7(config: &SessionConfig) -> String {
    if !config.notes.solution_space.trim().is_empty() {
        return config.notes.solution_space.trim().to_string();
    }
    match config.mode {
        Mode::ObjectSelection => "Exactly one correct object".to_string(),
        Mode::ObjectManipulation => "Exactly one reference layout".to_string(),
        Mode::TowerDefense => "Not annotated".to_string(),
    }
}

fn q8(config: &SessionConfig) -> String {
    let mut parts = vec![match config.money_model {
        MoneyModel::Shared => "Shared money; all players see the same game state at all times".to_string(),
        MoneyModel::Individual => "Individual money pools; all players see the same game state".to_string(),
    }];
    let v = &config.visibility;
    let hidden: Vec<&str> = [
        (v.tower_names, "tower names"),
        (v.tower_descriptions, "tower descriptions"),
        (v.coordinate_grid, "coordinate grid"),
    ]
    .iter()
    .filter(|(shown, _)| !shown)
    .map(|(_, n)| *n)
    .collect();
    if !hidden.is_empty() {
        parts.push(format!("hidden: {}", hidden.join(", ")));
    }
    parts.push(if v.spawn_preview {
        "enemy spawn sequence is previewed".to_string()
    } else {
        "players must discover the enemy spawn sequence".to_string()
    });
    parts.join("; ")
}

fn q9(config: &SessionConfig) -> &'static str {
    let stressed = config.levels.iter().any(|level| {
        let short = config.mode == Mode::TowerDefense
            && level.planning_seconds > 0.0
            && level.planning_seconds < scripted_attack_seconds(level, config);
        let poor = level.min_win_cost.is_some_and(|c| level.starting_gold < c);
        short || poor
    });
    if stressed {
        HIGH_STRESS
    } else {
        LOW_STRESS
    }
}

fn q10(config: &SessionConfig) -> String {
    let c = &config.comm;
    let voice = if c.push_to_talk { "voice (push-to-talk)" } else { "voice" };
    match (c.text_chat, c.voice) {
        (true, true) => format!("text, {voice}"),
        (true, false) => "text".to_string(),
        (false, true) => voice.to_string(),
        (false, false) => "none".to_string(),
    }
}

/// Maps a config onto the ten design questions. Deterministic.
pub fn checklist_report(config: &SessionConfig) -> ChecklistAnswers {
    ChecklistAnswers {
        q1: q1(config),
        q2: q2(config),
        q3: q3(config),
        q4: q4(config),
        q5: q5(config),
        q6: q6(config),
        q7: q7(config),
        q8: q8(config),
        q9: q9(config).to_string(),
        q10: q10(config),
    }
}
