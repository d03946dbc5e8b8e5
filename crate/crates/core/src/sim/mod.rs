//! The round state machine.

mod combat;
mod command;
mod digest;
mod engine;
mod score;
mod snapshot;
mod state;

pub use combat::{
    base_upgrade_cost, discount_multiplier, enemy_position, select_target_index, support_buff, tower_stats,
    upgrade_cost, upgraded_stats, TowerStats, RANGE_EPSILON,
};
pub use command::{Command, CommandKind, EventKind, SimError, SimEvent};
pub use digest::{canonical_event, canonical_state, events_digest, state_digest};
pub use engine::{evaluate_layout, evaluate_selection, init_game, init_game_with_players, SelectionVerdict};
pub use score::{compute_score, ScoreBreakdown, ScoreMode, ScoreWeights};
pub use snapshot::{EnemyView, GameSnapshot, TowerView};
pub use state::{
    seconds_to_ticks, EffectKind, EffectState, EnemyInstance, GameState, Outcome, PendingSpawn, Phase, PlayerId,
    Resolution, Totals, TowerId, TowerInstance, Trap, Wallet, DT, TICK_RATE,
};
