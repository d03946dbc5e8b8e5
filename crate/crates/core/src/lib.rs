//! Tower-defense rules engine for collaborative play: map and catalog types,
//! session configuration, and a deterministic fixed-step simulation.

pub mod catalog;
pub mod config;
pub mod grid;
pub mod sim;

pub use catalog::{Archetype, EffectParams, EnemyVariant, Orientation, TowerSpec, UpgradeTrack, MAX_UPGRADE_LEVEL};
pub use config::{
    builtin_preset, checklist_report, parse_config, serialize_config, validate_config, ChecklistAnswers, ConfigError,
    LevelSpec, Mode, MoneyModel, PlacedObject, SessionConfig, ValidationCode, ValidationError,
};
pub use grid::{Cell, GridMap, PathRoute, Point, SpawnEntry, SpawnScript, TileKind};
pub use sim::{
    compute_score, evaluate_layout, evaluate_selection, init_game, init_game_with_players, Command, CommandKind,
    EventKind, GameState, Outcome, Phase, PlayerId, ScoreWeights, SimError, SimEvent, TowerId,
};
