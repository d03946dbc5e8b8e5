use serde::{Deserialize, Serialize};

use crate::catalog::{Orientation, UpgradeTrack};
use crate::grid::Cell;

use super::state::{Outcome, Phase, PlayerId, TowerId};

/// A player intent after wire decoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Command {
    pub issuer: PlayerId,
    #[serde(flatten)]
    pub kind: CommandKind,
}

impl Command {
    pub fn new(issuer: PlayerId, kind: CommandKind) -> Self {
        Self { issuer, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommandKind {
    Place {
        tower: String,
        cell: Cell,
        #[serde(default)]
        orientation: Orientation,
    },
    Sell {
        cell: Cell,
    },
    Upgrade {
        cell: Cell,
        track: UpgradeTrack,
    },
    /// Sets or clears the issuer's ready flag.
    Ready {
        ready: bool,
    },
    Select {
        tower: TowerId,
    },
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Place { .. } => "PLACE",
            CommandKind::Sell { .. } => "SELL",
            CommandKind::Upgrade { .. } => "UPGRADE",
            CommandKind::Ready { .. } => "READY",
            CommandKind::Select { .. } => "SELECT",
        }
    }
}

/// Rejection reasons for commands and out-of-contract calls. Every variant
/// has a stable machine-readable [`SimError::code`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("insufficient funds: need {needed}, have {available}")]
    InsufficientFunds { needed: u64, available: u64 },
    #[error("cell occupied")]
    CellOccupied,
    #[error("cell not buildable")]
    CellNotBuildable,
    #[error("cell out of bounds")]
    OutOfBounds,
    #[error("unknown tower type {0:?}")]
    UnknownTower(String),
    #[error("tower type {0:?} is not assigned to this player")]
    TowerNotAssigned(String),
    #[error("max upgrade level reached")]
    MaxUpgradeLevel,
    #[error("action not permitted in the current phase")]
    PhaseViolation,
    #[error("no tower at cell")]
    NoTowerAtCell,
    #[error("tower belongs to another player")]
    NotOwner,
    #[error("unknown player {0}")]
    UnknownPlayer(PlayerId),
    #[error("unknown tower id {0}")]
    UnknownTowerId(TowerId),
    #[error("no free path cell in range for a trap")]
    NoTrapCell,
    #[error("level index {0} out of range")]
    LevelOutOfRange(usize),
    #[error("round index {0} out of range")]
    RoundOutOfRange(usize),
    #[error("unknown spawn point {0}")]
    UnknownSpawnPoint(usize),
    #[error("operation does not apply to this session mode")]
    ModeMismatch,
    #[error("round has not ended")]
    NotEnded,
}

impl SimError {
    pub fn code(&self) -> &'static str {
        match self {
            SimError::InsufficientFunds { .. } => "insufficient_funds",
            SimError::CellOccupied => "cell_occupied",
            SimError::CellNotBuildable => "cell_not_buildable",
            SimError::OutOfBounds => "out_of_bounds",
            SimError::UnknownTower(_) => "unknown_tower",
            SimError::TowerNotAssigned(_) => "tower_not_assigned",
            SimError::MaxUpgradeLevel => "max_upgrade_level",
            SimError::PhaseViolation => "phase_violation",
            SimError::NoTowerAtCell => "no_tower_at_cell",
            SimError::NotOwner => "not_owner",
            SimError::UnknownPlayer(_) => "unknown_player",
            SimError::UnknownTowerId(_) => "unknown_tower_id",
            SimError::NoTrapCell => "no_trap_cell",
            SimError::LevelOutOfRange(_) => "level_out_of_range",
            SimError::RoundOutOfRange(_) => "round_out_of_range",
            SimError::UnknownSpawnPoint(_) => "unknown_spawn_point",
            SimError::ModeMismatch => "mode_mismatch",
            SimError::NotEnded => "not_ended",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub tick: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    Placed { tower: TowerId, spec: String, cell: Cell, orientation: Orientation, by: PlayerId, cost: u64 },
    Sold { tower: TowerId, spec: String, cell: Cell, by: PlayerId, refund: u64 },
    Upgraded { tower: TowerId, spec: String, cell: Cell, track: UpgradeTrack, level: u8, by: PlayerId, cost: u64 },
    Spawned { enemy: u64, variant: String, spawn_point: usize },
    Killed { enemy: u64, variant: String, bounty: u64, points: u64 },
    Leaked { enemy: u64, variant: String },
    PhaseChanged { from: Phase, to: Phase },
    RoundEnded { outcome: Outcome },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Placed { .. } => "PLACED",
            EventKind::Sold { .. } => "SOLD",
            EventKind::Upgraded { .. } => "UPGRADED",
            EventKind::Spawned { .. } => "SPAWNED",
            EventKind::Killed { .. } => "KILLED",
            EventKind::Leaked { .. } => "LEAKED",
            EventKind::PhaseChanged { .. } => "PHASE_CHANGED",
            EventKind::RoundEnded { .. } => "ROUND_ENDED",
        }
    }
}
