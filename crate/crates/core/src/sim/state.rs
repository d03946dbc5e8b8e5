use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{Orientation, UpgradeTrack, MAX_UPGRADE_LEVEL};
use crate::config::SessionConfig;
use crate::grid::Cell;

/// Simulation steps per second.
pub const TICK_RATE: u32 = 20;
/// Seconds per simulation step.
pub const DT: f64 = 1.0 / TICK_RATE as f64;

/// Quantizes a duration to whole ticks.
pub fn seconds_to_ticks(seconds: f64) -> u64 {
    (seconds * f64::from(TICK_RATE)).round().max(0.0) as u64
}

/// A player slot index into the session's team list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(pub u8);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TowerId(pub u32);

impl fmt::Display for TowerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    Planning,
    Attack,
    Ended,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Planning => "PLANNING",
            Phase::Attack => "ATTACK",
            Phase::Ended => "ENDED",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Ongoing,
    Win,
    Lose,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Ongoing => "ONGOING",
            Outcome::Win => "WIN",
            Outcome::Lose => "LOSE",
        }
    }
}

/// Team gold: one shared pool, or one pool per player.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wallet {
    Shared(u64),
    Individual(BTreeMap<PlayerId, u64>),
}

impl Wallet {
    pub fn total(&self) -> u64 {
        match self {
            Wallet::Shared(g) => *g,
            Wallet::Individual(pools) => pools.values().sum(),
        }
    }

    /// Gold available to `player`.
    pub fn balance(&self, player: PlayerId) -> u64 {
        match self {
            Wallet::Shared(g) => *g,
            Wallet::Individual(pools) => pools.get(&player).copied().unwrap_or(0),
        }
    }

    pub(crate) fn debit(&mut self, player: PlayerId, amount: u64) {
        match self {
            Wallet::Shared(g) => *g -= amount,
            Wallet::Individual(pools) => *pools.entry(player).or_default() -= amount,
        }
    }

    pub(crate) fn credit(&mut self, player: PlayerId, amount: u64) {
        match self {
            Wallet::Shared(g) => *g += amount,
            Wallet::Individual(pools) => *pools.entry(player).or_default() += amount,
        }
    }
}

/// Splits `amount` equally over `players`; the remainder goes one coin at a
/// time to the earliest players in the list.
pub(crate) fn split_evenly(amount: u64, players: &[PlayerId]) -> Vec<(PlayerId, u64)> {
    if players.is_empty() {
        return Vec::new();
    }
    let n = players.len() as u64;
    let (share, rem) = (amount / n, amount % n);
    players.iter().enumerate().map(|(i, p)| (*p, share + u64::from((i as u64) < rem))).collect()
}

/// The path-cell trap owned by an obstacle tower.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trap {
    pub cell: Cell,
    pub charges: u32,
    /// Ticks until the next full recharge.
    pub recharge_ticks: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerInstance {
    pub id: TowerId,
    pub spec: String,
    /// `None` for towers placed by the level itself.
    pub owner: Option<PlayerId>,
    pub cell: Cell,
    pub orientation: Orientation,
    /// Levels indexed by [`UpgradeTrack::index`].
    pub levels: [u8; 3],
    /// Ticks until the tower may fire again; fires when `<= 0`.
    pub cooldown_ticks: f64,
    /// Total gold paid for placement and upgrades.
    pub spent: u64,
    pub trap: Option<Trap>,
}

impl TowerInstance {
    pub fn new(id: TowerId, spec: impl Into<String>, owner: Option<PlayerId>, cell: Cell) -> Self {
        Self {
            id,
            spec: spec.into(),
            owner,
            cell,
            orientation: Orientation::default(),
            levels: [0; 3],
            cooldown_ticks: 0.0,
            spent: 0,
            trap: None,
        }
    }

    pub fn level(&self, track: UpgradeTrack) -> u8 {
        self.levels[track.index()]
    }

    pub fn is_maxed(&self, track: UpgradeTrack) -> bool {
        self.level(track) >= MAX_UPGRADE_LEVEL
    }

    pub fn cooldown_seconds(&self) -> f64 {
        self.cooldown_ticks.max(0.0) * DT
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EffectKind {
    Slow,
    Poison,
    Fear,
}

impl EffectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EffectKind::Slow => "SLOW",
            EffectKind::Poison => "POISON",
            EffectKind::Fear => "FEAR",
        }
    }
}

/// A status effect on an enemy.
///
/// `remaining_ticks` counts the movement ticks still to be affected. A fear
/// effect stays attached after it runs out while `immunity_ticks` counts
/// down; the enemy cannot be feared again until it is gone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectState {
    pub kind: EffectKind,
    /// Slow: speed multiplier in (0, 1). Poison: damage per second.
    /// Fear: reverse-speed multiplier.
    pub magnitude: f64,
    pub remaining_ticks: u32,
    pub immunity_ticks: u32,
    /// Set by the decay step when the effect covers the current tick.
    pub active: bool,
}

impl EffectState {
    pub fn new(kind: EffectKind, magnitude: f64, seconds: f64) -> Self {
        Self { kind, magnitude, remaining_ticks: seconds_to_ticks(seconds) as u32, immunity_ticks: 0, active: false }
    }

    pub fn remaining_seconds(&self) -> f64 {
        f64::from(self.remaining_ticks) * DT
    }

    pub fn immunity_seconds(&self) -> f64 {
        f64::from(self.immunity_ticks) * DT
    }

    pub(crate) fn decay(&mut self) {
        if self.remaining_ticks > 0 {
            self.remaining_ticks -= 1;
            self.active = true;
        } else {
            self.active = false;
            self.immunity_ticks = self.immunity_ticks.saturating_sub(1);
        }
    }

    pub(crate) fn finished(&self) -> bool {
        !self.active && self.remaining_ticks == 0 && self.immunity_ticks == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnemyInstance {
    pub variant: String,
    pub route: usize,
    /// Tiles travelled along the route.
    pub progress: f64,
    /// Progress before this tick's movement; traps trigger on crossings.
    pub prev_progress: f64,
    pub health: f64,
    pub effects: Vec<EffectState>,
    /// Global spawn order within the round.
    pub spawn_index: u64,
}

impl EnemyInstance {
    pub fn is_alive(&self) -> bool {
        self.health > 0.0
    }

    pub fn effect(&self, kind: EffectKind) -> Option<&EffectState> {
        self.effects.iter().find(|e| e.kind == kind)
    }

    fn active(&self, kind: EffectKind) -> Option<&EffectState> {
        self.effects.iter().find(|e| e.kind == kind && e.active)
    }

    pub fn is_feared(&self) -> bool {
        self.active(EffectKind::Fear).is_some()
    }

    /// Multiplier from an active slow, 1.0 otherwise.
    pub fn slow_multiplier(&self) -> f64 {
        self.active(EffectKind::Slow).map_or(1.0, |e| e.magnitude)
    }

    pub(crate) fn poison_dps(&self) -> f64 {
        self.active(EffectKind::Poison).map_or(0.0, |e| e.magnitude)
    }

    pub(crate) fn fear_multiplier(&self) -> Option<f64> {
        self.active(EffectKind::Fear).map(|e| e.magnitude)
    }

    /// Whether a new fear may land: no fear running and no immunity left.
    pub fn can_be_feared(&self) -> bool {
        self.effect(EffectKind::Fear).is_none_or(|e| e.remaining_ticks == 0 && e.immunity_ticks == 0)
    }

    /// Applies a slow. The strongest multiplier wins; duration refreshes to
    /// the longer of the two. Slows never stack.
    pub fn apply_slow(&mut self, multiplier: f64, seconds: f64) {
        let fresh = EffectState::new(EffectKind::Slow, multiplier, seconds);
        match self.effects.iter_mut().find(|e| e.kind == EffectKind::Slow) {
            Some(e) => {
                e.magnitude = e.magnitude.min(multiplier);
                e.remaining_ticks = e.remaining_ticks.max(fresh.remaining_ticks);
            }
            None => self.effects.push(fresh),
        }
    }

    /// Applies poison, refreshing the duration on every hit.
    pub fn apply_poison(&mut self, dps: f64, seconds: f64) {
        let fresh = EffectState::new(EffectKind::Poison, dps, seconds);
        match self.effects.iter_mut().find(|e| e.kind == EffectKind::Poison) {
            Some(e) => {
                e.magnitude = e.magnitude.max(dps);
                e.remaining_ticks = fresh.remaining_ticks;
            }
            None => self.effects.push(fresh),
        }
    }

    /// Applies fear unless one is running or immunity remains. Returns
    /// whether the fear landed.
    pub fn apply_fear(&mut self, multiplier: f64, seconds: f64, immunity_seconds: f64) -> bool {
        if !self.can_be_feared() {
            return false;
        }
        let mut fresh = EffectState::new(EffectKind::Fear, multiplier, seconds);
        fresh.immunity_ticks = seconds_to_ticks(immunity_seconds) as u32;
        self.effects.retain(|e| e.kind != EffectKind::Fear);
        self.effects.push(fresh);
        true
    }
}

/// A scripted enemy not yet on the map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PendingSpawn {
    /// Attack-phase tick at which the enemy enters.
    pub tick: u64,
    pub spawn_point: usize,
    pub route: usize,
    pub variant: String,
}

/// How a planning-only level was resolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Selection { selected: TowerId, correct: bool },
    Layout { score: f64 },
    Timeout,
}

/// Running tallies used by conservation and accounting checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub spawned: u64,
    pub killed: u64,
    pub leaked: u64,
    pub bounties: u64,
    pub purchases: u64,
    pub refunds: u64,
}

/// The authoritative state of one round.
#[derive(Clone, Debug)]
pub struct GameState {
    pub(crate) config: Arc<SessionConfig>,
    pub level: usize,
    pub round: usize,
    /// Participating players in join order.
    pub players: Vec<PlayerId>,
    pub phase: Phase,
    /// Steps taken this round, planning and attack combined.
    pub tick: u64,
    /// Attack-phase steps taken; `sim_time = attack_ticks * DT`.
    pub attack_ticks: u64,
    pub planning_ticks: u64,
    /// False when the planning phase has no time limit.
    pub planning_timed: bool,
    pub starting_gold: u64,
    pub wallet: Wallet,
    pub health: i64,
    pub towers: Vec<TowerInstance>,
    pub enemies: Vec<EnemyInstance>,
    pub pending: VecDeque<PendingSpawn>,
    pub kill_points: u64,
    pub ready: BTreeSet<PlayerId>,
    pub outcome: Outcome,
    pub resolution: Option<Resolution>,
    pub totals: Totals,
    pub(crate) next_tower_id: u32,
    pub(crate) next_spawn_index: u64,
}

impl GameState {
    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn config_arc(&self) -> &Arc<SessionConfig> {
        &self.config
    }

    /// Seconds elapsed in the attack phase.
    pub fn sim_time(&self) -> f64 {
        self.attack_ticks as f64 * DT
    }

    pub fn planning_remaining(&self) -> f64 {
        self.planning_ticks as f64 * DT
    }

    pub fn tower(&self, id: TowerId) -> Option<&TowerInstance> {
        self.towers.iter().find(|t| t.id == id)
    }

    pub fn tower_at(&self, cell: Cell) -> Option<&TowerInstance> {
        self.towers.iter().find(|t| t.cell == cell)
    }

    pub fn trap_at(&self, cell: Cell) -> Option<&TowerInstance> {
        self.towers.iter().find(|t| t.trap.as_ref().is_some_and(|tr| tr.cell == cell))
    }

    pub fn is_over(&self) -> bool {
        self.phase == Phase::Ended
    }
}
