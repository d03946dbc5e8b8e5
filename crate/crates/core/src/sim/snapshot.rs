use serde::{Deserialize, Serialize};

use super::combat::tower_stats;
use super::state::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerView {
    #[serde(flatten)]
    pub tower: TowerInstance,
    pub range: f64,
    pub damage: f64,
    pub firerate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnemyView {
    #[serde(flatten)]
    pub enemy: EnemyInstance,
    pub x: f64,
    pub y: f64,
}

/// Everything a client needs to draw a round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSnapshot {
    pub level: usize,
    pub round: usize,
    pub phase: Phase,
    pub outcome: Outcome,
    pub tick: u64,
    pub sim_time: f64,
    pub planning_remaining: f64,
    pub planning_timed: bool,
    pub wallet: Wallet,
    pub money: u64,
    pub health: i64,
    pub kill_points: u64,
    pub ready: Vec<PlayerId>,
    pub towers: Vec<TowerView>,
    pub enemies: Vec<EnemyView>,
    pub pending: usize,
    pub resolution: Option<Resolution>,
    pub digest: String,
}

impl GameState {
    pub fn snapshot(&self) -> GameSnapshot {
        let map = self.map();
        GameSnapshot {
            level: self.level,
            round: self.round,
            phase: self.phase,
            outcome: self.outcome,
            tick: self.tick,
            sim_time: self.sim_time(),
            planning_remaining: self.planning_remaining(),
            planning_timed: self.planning_timed,
            wallet: self.wallet.clone(),
            money: self.wallet.total(),
            health: self.health,
            kill_points: self.kill_points,
            ready: self.ready.iter().copied().collect(),
            towers: self
                .towers
                .iter()
                .map(|t| {
                    let s = tower_stats(&self.config, &self.towers, t);
                    TowerView { tower: t.clone(), range: s.range, damage: s.damage, firerate: s.firerate }
                })
                .collect(),
            enemies: self
                .enemies
                .iter()
                .map(|e| {
                    let p = map.routes[e.route].position_at(e.progress);
                    EnemyView { enemy: e.clone(), x: p.x, y: p.y }
                })
                .collect(),
            pending: self.pending.len(),
            resolution: self.resolution.clone(),
            digest: super::digest::state_digest(self),
        }
    }
}
