//! Tower stats, buffs, discounts and targeting.
//!
//! These work on a config plus a tower slice rather than a full
//! [`GameState`], so offline tools can price upgrades on a reconstructed
//! board.

use crate::catalog::{Archetype, TowerSpec, UpgradeTrack};
use crate::config::SessionConfig;
use crate::grid::{GridMap, Point};

use super::command::SimError;
use super::state::{EnemyInstance, GameState, TowerId, TowerInstance};

/// Slack on closed range boundaries, absorbing float noise in distances.
pub const RANGE_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TowerStats {
    pub range: f64,
    pub damage: f64,
    pub firerate: f64,
}

impl TowerStats {
    /// Firing period in ticks.
    pub fn period_ticks(&self) -> f64 {
        f64::from(super::state::TICK_RATE) / self.firerate
    }
}

fn spec_of<'a>(config: &'a SessionConfig, tower: &TowerInstance) -> &'a TowerSpec {
    config.tower(&tower.spec).unwrap_or_else(|| panic!("tower {} references unknown spec {:?}", tower.id, tower.spec))
}

fn upgraded(base: f64, track: UpgradeTrack, tower: &TowerInstance) -> f64 {
    base * track.multiplier().powi(i32::from(tower.level(track)))
}

/// Stats from the catalog entry and upgrade levels alone.
pub fn upgraded_stats(spec: &TowerSpec, tower: &TowerInstance) -> TowerStats {
    TowerStats {
        range: upgraded(spec.range, UpgradeTrack::Range, tower),
        damage: upgraded(spec.damage, UpgradeTrack::Damage, tower),
        firerate: upgraded(spec.firerate, UpgradeTrack::Firerate, tower),
    }
}

/// Largest buff from any other support tower covering `tower`. Buffs do not
/// stack, and a support's own coverage ignores other supports.
pub fn support_buff(config: &SessionConfig, towers: &[TowerInstance], tower: &TowerInstance) -> f64 {
    towers
        .iter()
        .filter(|s| s.id != tower.id)
        .filter_map(|s| {
            let spec = spec_of(config, s);
            (spec.archetype == Archetype::Support).then_some((s, spec))
        })
        .filter(|(s, spec)| s.cell.distance(tower.cell) <= upgraded_stats(spec, s).range + RANGE_EPSILON)
        .map(|(_, spec)| spec.effect.support_buff)
        .fold(0.0, f64::max)
}

/// Range, damage and firerate after upgrades and support. Sniper speed
/// scaling is applied separately at fire time.
pub fn tower_stats(config: &SessionConfig, towers: &[TowerInstance], tower: &TowerInstance) -> TowerStats {
    let base = upgraded_stats(spec_of(config, tower), tower);
    let k = 1.0 + support_buff(config, towers, tower);
    TowerStats { range: base.range * k, damage: base.damage * k, firerate: base.firerate * k }
}

/// Best (smallest) upgrade-cost multiplier from discount towers covering
/// `tower`; 1.0 when none do.
pub fn discount_multiplier(config: &SessionConfig, towers: &[TowerInstance], tower: &TowerInstance) -> f64 {
    towers
        .iter()
        .filter(|d| d.id != tower.id)
        .filter_map(|d| {
            let spec = spec_of(config, d);
            (spec.archetype == Archetype::Discount).then_some((d, spec))
        })
        .filter(|(d, _)| d.cell.distance(tower.cell) <= tower_stats(config, towers, d).range + RANGE_EPSILON)
        .map(|(_, spec)| spec.effect.discount_multiplier)
        .fold(1.0, f64::min)
}

/// Undiscounted price of the next level on `track`.
pub fn base_upgrade_cost(spec: &TowerSpec, level: u8) -> u64 {
    spec.upgrade_cost * (1u64 << level)
}

/// Price of the next level on `track`: `round(base * 2^level * discount)`.
pub fn upgrade_cost(
    config: &SessionConfig,
    towers: &[TowerInstance],
    tower: &TowerInstance,
    track: UpgradeTrack,
) -> Result<u64, SimError> {
    if tower.is_maxed(track) {
        return Err(SimError::MaxUpgradeLevel);
    }
    let spec = spec_of(config, tower);
    let base = base_upgrade_cost(spec, tower.level(track)) as f64;
    Ok((base * discount_multiplier(config, towers, tower)).round() as u64)
}

pub fn enemy_position(map: &GridMap, enemy: &EnemyInstance) -> Point {
    map.routes[enemy.route].position_at(enemy.progress)
}

/// Furthest-along living enemy within `range` of the tower (all living
/// enemies for map-wide towers). Ties go to the earliest spawn.
pub fn select_target_index(
    archetype: Archetype,
    map: &GridMap,
    enemies: &[EnemyInstance],
    tower: &TowerInstance,
    range: f64,
) -> Option<usize> {
    if !archetype.attacks() {
        return None;
    }
    let origin = tower.cell.point();
    enemies
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_alive())
        .filter(|(_, e)| {
            archetype == Archetype::Map || origin.distance(enemy_position(map, e)) <= range + RANGE_EPSILON
        })
        .max_by(|(_, a), (_, b)| a.progress.total_cmp(&b.progress).then_with(|| b.spawn_index.cmp(&a.spawn_index)))
        .map(|(i, _)| i)
}

impl GameState {
    fn tower_or_err(&self, id: TowerId) -> Result<&TowerInstance, SimError> {
        self.tower(id).ok_or(SimError::UnknownTowerId(id))
    }

    pub fn effective_stats(&self, id: TowerId) -> Result<TowerStats, SimError> {
        let tower = self.tower_or_err(id)?;
        Ok(tower_stats(&self.config, &self.towers, tower))
    }

    pub fn select_target(&self, id: TowerId) -> Result<Option<&EnemyInstance>, SimError> {
        let tower = self.tower_or_err(id)?;
        let archetype = spec_of(&self.config, tower).archetype;
        let range = tower_stats(&self.config, &self.towers, tower).range;
        Ok(select_target_index(archetype, self.map(), &self.enemies, tower, range).map(|i| &self.enemies[i]))
    }

    pub fn upgrade_cost(&self, id: TowerId, track: UpgradeTrack) -> Result<u64, SimError> {
        let tower = self.tower_or_err(id)?;
        upgrade_cost(&self.config, &self.towers, tower, track)
    }

    pub fn map(&self) -> &GridMap {
        &self.config.levels[self.level].map
    }
}
