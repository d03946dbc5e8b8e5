use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use crate::catalog::{Archetype, Orientation, TowerSpec, UpgradeTrack};
use crate::config::{Mode, MoneyModel, PlacedObject, SellPolicy, SessionConfig};
use crate::grid::{Cell, GridMap, TileKind};

use super::combat::{self, enemy_position, select_target_index, tower_stats, TowerStats, RANGE_EPSILON};
use super::command::{Command, CommandKind, EventKind, SimError, SimEvent};
use super::state::*;

/// Progress within this distance of the route end counts as arrived.
const ARRIVAL_EPSILON: f64 = 1e-9;

/// Starts `round_index` of `level_index` with every configured slot playing.
pub fn init_game(
    config: impl Into<Arc<SessionConfig>>,
    level_index: usize,
    round_index: usize,
) -> Result<GameState, SimError> {
    let config = config.into();
    let players: Vec<PlayerId> = (0..config.team.len() as u8).map(PlayerId).collect();
    init_game_with_players(config, level_index, round_index, &players)
}

/// Starts a round with an explicit participant list (in join order). Ready
/// checks and individual-money splits use only these players.
pub fn init_game_with_players(
    config: impl Into<Arc<SessionConfig>>,
    level_index: usize,
    round_index: usize,
    players: &[PlayerId],
) -> Result<GameState, SimError> {
    let config = config.into();
    let level = config.levels.get(level_index).ok_or(SimError::LevelOutOfRange(level_index))?;
    if round_index >= config.rounds_per_level as usize {
        return Err(SimError::RoundOutOfRange(round_index));
    }
    if let Some(p) = players.iter().find(|p| usize::from(p.0) >= config.team.len()) {
        return Err(SimError::UnknownPlayer(*p));
    }

    let wallet = match config.money_model {
        MoneyModel::Shared => Wallet::Shared(level.starting_gold),
        MoneyModel::Individual => {
            Wallet::Individual(split_evenly(level.starting_gold, players).into_iter().collect::<BTreeMap<_, _>>())
        }
    };

    let mut pending: Vec<PendingSpawn> = Vec::new();
    for (sp, script) in level.map.spawns.iter().enumerate() {
        for entry in &script.entries {
            pending.push(PendingSpawn {
                tick: seconds_to_ticks(entry.at),
                spawn_point: sp,
                route: script.route,
                variant: entry.enemy.clone(),
            });
        }
    }
    pending.sort_by_key(|p| p.tick);

    let planning_ticks = seconds_to_ticks(level.planning_seconds);
    let (phase, planning_timed) = match config.mode {
        Mode::TowerDefense if planning_ticks == 0 => (Phase::Attack, false),
        Mode::TowerDefense => (Phase::Planning, true),
        _ => (Phase::Planning, planning_ticks > 0),
    };

    let mut state = GameState {
        config: Arc::clone(&config),
        level: level_index,
        round: round_index,
        players: players.to_vec(),
        phase,
        tick: 0,
        attack_ticks: 0,
        planning_ticks,
        planning_timed,
        starting_gold: level.starting_gold,
        wallet,
        health: i64::from(level.starting_health),
        towers: Vec::new(),
        enemies: Vec::new(),
        pending: VecDeque::from(pending),
        kill_points: 0,
        ready: BTreeSet::new(),
        outcome: Outcome::Ongoing,
        resolution: None,
        totals: Totals::default(),
        next_tower_id: 0,
        next_spawn_index: 0,
    };
    for obj in &level.preplaced {
        state.preplace(obj)?;
    }
    Ok(state)
}

impl GameState {
    fn preplace(&mut self, obj: &PlacedObject) -> Result<(), SimError> {
        let config = Arc::clone(&self.config);
        let spec = config.tower(&obj.tower).ok_or_else(|| SimError::UnknownTower(obj.tower.clone()))?;
        self.check_site(spec, obj.cell)?;
        self.build(spec, None, obj.cell, obj.orientation)?;
        Ok(())
    }

    fn check_site(&self, _spec: &TowerSpec, cell: Cell) -> Result<(), SimError> {
        match self.map().tile(cell) {
            None => Err(SimError::OutOfBounds),
            Some(TileKind::Buildable) if self.tower_at(cell).is_some() => Err(SimError::CellOccupied),
            Some(TileKind::Buildable) => Ok(()),
            Some(_) => Err(SimError::CellNotBuildable),
        }
    }

    /// Nearest free path cell within `range` of `cell`, ties in row-major order.
    fn trap_site(&self, cell: Cell, range: f64) -> Option<Cell> {
        let map = self.map();
        map.cells()
            .filter(|c| map.tile(*c) == Some(TileKind::Path))
            .filter(|c| self.trap_at(*c).is_none())
            .map(|c| (c, c.distance(cell)))
            .filter(|(_, d)| *d <= range + RANGE_EPSILON)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(c, _)| c)
    }

    /// Adds a tower without charging for it; returns its index.
    fn build(
        &mut self,
        spec: &TowerSpec,
        owner: Option<PlayerId>,
        cell: Cell,
        orientation: Orientation,
    ) -> Result<usize, SimError> {
        let id = TowerId(self.next_tower_id);
        let mut tower = TowerInstance::new(id, spec.id.clone(), owner, cell);
        tower.orientation = orientation;
        if spec.archetype == Archetype::Obstacle {
            let range = {
                // Range as it would be once placed, including support cover.
                let mut probe = self.towers.clone();
                probe.push(tower.clone());
                tower_stats(&self.config, &probe, probe.last().unwrap()).range
            };
            let site = self.trap_site(cell, range).ok_or(SimError::NoTrapCell)?;
            tower.trap = Some(Trap {
                cell: site,
                charges: spec.effect.trap_charges,
                recharge_ticks: seconds_to_ticks(spec.effect.trap_recharge_seconds).max(1),
            });
        }
        self.next_tower_id += 1;
        self.towers.push(tower);
        Ok(self.towers.len() - 1)
    }

    fn check_interaction(&self) -> Result<(), SimError> {
        if self.config.mode == Mode::ObjectSelection {
            return Err(SimError::PhaseViolation);
        }
        match self.phase {
            Phase::Planning => Ok(()),
            Phase::Attack if self.config.interact_during_attack => Ok(()),
            _ => Err(SimError::PhaseViolation),
        }
    }

    fn check_funds(&self, player: PlayerId, cost: u64) -> Result<(), SimError> {
        let available = self.wallet.balance(player);
        if available < cost {
            return Err(SimError::InsufficientFunds { needed: cost, available });
        }
        Ok(())
    }

    fn event(&self, kind: EventKind) -> SimEvent {
        SimEvent { tick: self.tick, kind }
    }

    /// Validates and applies one player command. On error the state is untouched.
    pub fn apply_command(&mut self, cmd: &Command) -> Result<Vec<SimEvent>, SimError> {
        if !self.players.contains(&cmd.issuer) {
            return Err(SimError::UnknownPlayer(cmd.issuer));
        }
        if self.phase == Phase::Ended {
            return Err(SimError::PhaseViolation);
        }
        match &cmd.kind {
            CommandKind::Place { tower, cell, orientation } => self.place(cmd.issuer, tower, *cell, *orientation),
            CommandKind::Sell { cell } => self.sell(cmd.issuer, *cell),
            CommandKind::Upgrade { cell, track } => self.upgrade(cmd.issuer, *cell, *track),
            CommandKind::Ready { ready } => self.set_ready(cmd.issuer, *ready),
            CommandKind::Select { tower } => self.select(cmd.issuer, *tower),
        }
    }

    fn place(
        &mut self,
        issuer: PlayerId,
        spec_id: &str,
        cell: Cell,
        orientation: Orientation,
    ) -> Result<Vec<SimEvent>, SimError> {
        self.check_interaction()?;
        let config = Arc::clone(&self.config);
        let spec = config.tower(spec_id).ok_or_else(|| SimError::UnknownTower(spec_id.to_string()))?;
        let assigned =
            config.team.get(usize::from(issuer.0)).is_some_and(|slot| slot.towers.iter().any(|t| t == spec_id));
        if !assigned {
            return Err(SimError::TowerNotAssigned(spec_id.to_string()));
        }
        self.check_site(spec, cell)?;
        self.check_funds(issuer, spec.cost)?;
        let idx = self.build(spec, Some(issuer), cell, orientation)?;
        self.towers[idx].spent = spec.cost;
        self.wallet.debit(issuer, spec.cost);
        self.totals.purchases += spec.cost;
        let id = self.towers[idx].id;
        Ok(vec![self.event(EventKind::Placed {
            tower: id,
            spec: spec.id.clone(),
            cell,
            orientation,
            by: issuer,
            cost: spec.cost,
        })])
    }

    fn sell(&mut self, issuer: PlayerId, cell: Cell) -> Result<Vec<SimEvent>, SimError> {
        self.check_interaction()?;
        let idx = self.towers.iter().position(|t| t.cell == cell).ok_or(SimError::NoTowerAtCell)?;
        let tower = &self.towers[idx];
        if self.config.sell_policy == SellPolicy::OwnerOnly && tower.owner != Some(issuer) {
            return Err(SimError::NotOwner);
        }
        let rate = match self.phase {
            Phase::Attack => self.config.refund.attack,
            _ => self.config.refund.planning,
        };
        let refund = (tower.spent as f64 * rate).floor() as u64;
        let beneficiary = tower.owner.unwrap_or(issuer);
        let tower = self.towers.remove(idx);
        self.wallet.credit(beneficiary, refund);
        self.totals.refunds += refund;
        Ok(vec![self.event(EventKind::Sold { tower: tower.id, spec: tower.spec, cell, by: issuer, refund })])
    }

    fn upgrade(&mut self, issuer: PlayerId, cell: Cell, track: UpgradeTrack) -> Result<Vec<SimEvent>, SimError> {
        self.check_interaction()?;
        let idx = self.towers.iter().position(|t| t.cell == cell).ok_or(SimError::NoTowerAtCell)?;
        let cost = combat::upgrade_cost(&self.config, &self.towers, &self.towers[idx], track)?;
        self.check_funds(issuer, cost)?;
        self.wallet.debit(issuer, cost);
        self.totals.purchases += cost;
        let tower = &mut self.towers[idx];
        tower.levels[track.index()] += 1;
        tower.spent += cost;
        let (id, spec, level) = (tower.id, tower.spec.clone(), tower.level(track));
        Ok(vec![self.event(EventKind::Upgraded { tower: id, spec, cell, track, level, by: issuer, cost })])
    }

    fn set_ready(&mut self, issuer: PlayerId, ready: bool) -> Result<Vec<SimEvent>, SimError> {
        if self.phase != Phase::Planning {
            return Err(SimError::PhaseViolation);
        }
        if ready {
            self.ready.insert(issuer);
        } else {
            self.ready.remove(&issuer);
        }
        if self.players.iter().all(|p| self.ready.contains(p)) {
            return Ok(self.end_planning());
        }
        Ok(Vec::new())
    }

    fn select(&mut self, _issuer: PlayerId, selected: TowerId) -> Result<Vec<SimEvent>, SimError> {
        if self.config.mode != Mode::ObjectSelection || self.phase != Phase::Planning {
            return Err(SimError::PhaseViolation);
        }
        let target =
            self.config.levels[self.level].selection_target.map(|i| TowerId(i as u32)).ok_or(SimError::ModeMismatch)?;
        let verdict = evaluate_selection(self, selected, target)?;
        let correct = verdict == SelectionVerdict::Correct;
        self.resolution = Some(Resolution::Selection { selected, correct });
        Ok(self.finish(if correct { Outcome::Win } else { Outcome::Lose }))
    }

    fn finish(&mut self, outcome: Outcome) -> Vec<SimEvent> {
        let from = self.phase;
        self.phase = Phase::Ended;
        self.outcome = outcome;
        vec![
            self.event(EventKind::PhaseChanged { from, to: Phase::Ended }),
            self.event(EventKind::RoundEnded { outcome }),
        ]
    }

    fn end_planning(&mut self) -> Vec<SimEvent> {
        match self.config.mode {
            Mode::TowerDefense => {
                self.phase = Phase::Attack;
                self.planning_ticks = 0;
                vec![self.event(EventKind::PhaseChanged { from: Phase::Planning, to: Phase::Attack })]
            }
            Mode::ObjectSelection => {
                self.resolution = Some(Resolution::Timeout);
                self.finish(Outcome::Lose)
            }
            Mode::ObjectManipulation => {
                let reference = &self.config.levels[self.level].reference_layout;
                let score = layout_score(self, reference);
                self.resolution = Some(Resolution::Layout { score });
                self.finish(if score >= 1.0 { Outcome::Win } else { Outcome::Lose })
            }
        }
    }

    /// One planning-phase step: counts the timer down and ends planning on expiry.
    pub fn planning_tick(&mut self) -> Result<Vec<SimEvent>, SimError> {
        if self.phase != Phase::Planning {
            return Err(SimError::PhaseViolation);
        }
        self.tick += 1;
        if !self.planning_timed {
            return Ok(Vec::new());
        }
        self.planning_ticks = self.planning_ticks.saturating_sub(1);
        if self.planning_ticks == 0 {
            return Ok(self.end_planning());
        }
        Ok(Vec::new())
    }

    /// Advances whichever phase is running by one tick. No-op once ended.
    pub fn step(&mut self) -> Vec<SimEvent> {
        match self.phase {
            Phase::Planning => self.planning_tick(),
            Phase::Attack => self.tick(),
            Phase::Ended => Ok(Vec::new()),
        }
        .expect("phase checked above")
    }

    /// One attack-phase step.
    ///
    /// Order: spawn, decay effects, move, poison, towers fire, remove the
    /// dead, remove arrivals, check for the end of the round. Within a step,
    /// towers go in placement order and enemies in spawn order.
    pub fn tick(&mut self) -> Result<Vec<SimEvent>, SimError> {
        if self.phase != Phase::Attack {
            return Err(SimError::PhaseViolation);
        }
        self.tick += 1;
        let attack_tick = self.attack_ticks;
        self.attack_ticks += 1;
        let config = Arc::clone(&self.config);
        let map = &config.levels[self.level].map;
        let mut events = Vec::new();

        // 1. spawn
        while self.pending.front().is_some_and(|p| p.tick <= attack_tick) {
            let p = self.pending.pop_front().expect("front checked");
            let variant = config.enemy(&p.variant).expect("validated enemy id");
            let spawn_index = self.next_spawn_index;
            self.next_spawn_index += 1;
            self.totals.spawned += 1;
            self.enemies.push(EnemyInstance {
                variant: p.variant.clone(),
                route: p.route,
                progress: 0.0,
                prev_progress: 0.0,
                health: variant.max_health,
                effects: Vec::new(),
                spawn_index,
            });
            events.push(self.event(EventKind::Spawned {
                enemy: spawn_index,
                variant: p.variant,
                spawn_point: p.spawn_point,
            }));
        }

        // 2. decay effects
        for e in &mut self.enemies {
            e.effects.iter_mut().for_each(EffectState::decay);
            e.effects.retain(|fx| !fx.finished());
        }

        // 3. move
        for e in &mut self.enemies {
            let length = map.routes[e.route].total_length();
            let speed = config.enemy(&e.variant).expect("validated enemy id").speed * e.slow_multiplier();
            e.prev_progress = e.progress;
            match e.fear_multiplier() {
                Some(m) => e.progress = (e.progress - speed * m * DT).max(0.0),
                None => {
                    e.progress = (e.progress + speed * DT).min(length);
                    if length - e.progress < ARRIVAL_EPSILON {
                        e.progress = length;
                    }
                }
            }
        }

        // 4. poison
        for e in &mut self.enemies {
            let dps = e.poison_dps();
            if dps > 0.0 {
                e.health -= dps * DT;
            }
        }

        // 5. towers
        self.fire_towers(&config, map);

        // 6. the dead
        let mut i = 0;
        while i < self.enemies.len() {
            if self.enemies[i].is_alive() {
                i += 1;
                continue;
            }
            let e = self.enemies.remove(i);
            let variant = config.enemy(&e.variant).expect("validated enemy id");
            self.credit_bounty(variant.bounty);
            self.kill_points += variant.points;
            self.totals.killed += 1;
            events.push(self.event(EventKind::Killed {
                enemy: e.spawn_index,
                variant: e.variant,
                bounty: variant.bounty,
                points: variant.points,
            }));
        }

        // 7. arrivals
        let mut i = 0;
        while i < self.enemies.len() {
            let length = map.routes[self.enemies[i].route].total_length();
            if self.enemies[i].progress < length {
                i += 1;
                continue;
            }
            let e = self.enemies.remove(i);
            self.health -= 1;
            self.totals.leaked += 1;
            events.push(self.event(EventKind::Leaked { enemy: e.spawn_index, variant: e.variant }));
        }

        // 8. end of round
        if self.health <= 0 {
            events.extend(self.finish(Outcome::Lose));
        } else if self.pending.is_empty() && self.enemies.is_empty() {
            events.extend(self.finish(Outcome::Win));
        }
        Ok(events)
    }

    fn credit_bounty(&mut self, bounty: u64) {
        self.totals.bounties += bounty;
        match &mut self.wallet {
            Wallet::Shared(g) => *g += bounty,
            Wallet::Individual(pools) => {
                for (p, share) in split_evenly(bounty, &self.players) {
                    *pools.entry(p).or_default() += share;
                }
            }
        }
    }

    fn fire_towers(&mut self, config: &SessionConfig, map: &GridMap) {
        for i in 0..self.towers.len() {
            let spec = config.tower(&self.towers[i].spec).expect("validated tower id");
            let stats = tower_stats(config, &self.towers, &self.towers[i]);
            match spec.archetype {
                Archetype::Discount | Archetype::Support => continue,
                Archetype::Obstacle => {
                    self.run_trap(i, spec, &stats, map);
                    continue;
                }
                _ => {}
            }
            let tower = &mut self.towers[i];
            if tower.cooldown_ticks > 0.0 {
                tower.cooldown_ticks -= 1.0;
            }
            if tower.cooldown_ticks > 0.0 {
                continue;
            }
            if self.fire(i, spec, &stats, map) {
                self.towers[i].cooldown_ticks += stats.period_ticks();
            }
        }
    }

    fn living_within(&self, map: &GridMap, centre: crate::grid::Point, radius: f64) -> Vec<usize> {
        self.enemies
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_alive() && centre.distance(enemy_position(map, e)) <= radius + RANGE_EPSILON)
            .map(|(j, _)| j)
            .collect()
    }

    /// Fires tower `i` if it has something to hit; returns whether it fired.
    fn fire(&mut self, i: usize, spec: &TowerSpec, stats: &TowerStats, map: &GridMap) -> bool {
        let fx = &spec.effect;
        let origin = self.towers[i].cell.point();
        if spec.archetype == Archetype::Multishot {
            let hits = self.multishot_hits(i, stats.range, map);
            for &j in &hits {
                self.enemies[j].health -= stats.damage;
            }
            return !hits.is_empty();
        }
        let Some(t) = select_target_index(spec.archetype, map, &self.enemies, &self.towers[i], stats.range) else {
            return false;
        };
        let target_pos = enemy_position(map, &self.enemies[t]);
        match spec.archetype {
            Archetype::Basic => self.enemies[t].health -= stats.damage,
            Archetype::Poison => {
                self.enemies[t].health -= stats.damage;
                self.enemies[t].apply_poison(fx.poison_dps, fx.poison_seconds);
            }
            Archetype::Slow => {
                self.enemies[t].health -= stats.damage;
                self.enemies[t].apply_slow(fx.slow_multiplier, fx.slow_seconds);
            }
            Archetype::Fear => {
                self.enemies[t].health -= stats.damage;
                self.enemies[t].apply_fear(fx.fear_multiplier, fx.fear_seconds, fx.fear_immunity_seconds);
            }
            Archetype::Sniper => {
                let speed = self.variant_speed(t);
                let factor = (speed / fx.sniper_reference_speed).clamp(1.0, fx.sniper_cap.max(1.0));
                self.enemies[t].health -= stats.damage * factor;
            }
            Archetype::Splash => {
                for j in self.living_within(map, target_pos, fx.splash_radius) {
                    self.enemies[j].health -= stats.damage;
                }
            }
            Archetype::Piercing => {
                let (dx, dy) = (target_pos.x - origin.x, target_pos.y - origin.y);
                let len = dx.hypot(dy);
                let hits: Vec<usize> = if len < 1e-12 {
                    vec![t]
                } else {
                    let (ux, uy) = (dx / len, dy / len);
                    self.living_within(map, origin, stats.range)
                        .into_iter()
                        .filter(|&j| {
                            let p = enemy_position(map, &self.enemies[j]);
                            let (rx, ry) = (p.x - origin.x, p.y - origin.y);
                            let along = rx * ux + ry * uy;
                            let across = (rx * uy - ry * ux).abs();
                            j == t || (along > 0.0 && across <= 0.5)
                        })
                        .collect()
                };
                for j in hits {
                    self.enemies[j].health -= stats.damage;
                }
            }
            Archetype::Map => {
                for e in self.enemies.iter_mut().filter(|e| e.is_alive()) {
                    e.health -= stats.damage;
                }
            }
            Archetype::Multishot | Archetype::Obstacle | Archetype::Discount | Archetype::Support => {
                unreachable!("handled before targeting")
            }
        }
        true
    }

    fn variant_speed(&self, j: usize) -> f64 {
        self.config.enemy(&self.enemies[j].variant).map_or(0.0, |v| v.speed)
    }

    /// First living enemy along each of the four cardinal rays.
    fn multishot_hits(&self, i: usize, range: f64, map: &GridMap) -> Vec<usize> {
        let origin = self.towers[i].cell.point();
        let rays: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        rays.iter()
            .filter_map(|&(ux, uy)| {
                self.enemies
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.is_alive())
                    .filter_map(|(j, e)| {
                        let p = enemy_position(map, e);
                        let (rx, ry) = (p.x - origin.x, p.y - origin.y);
                        let along = rx * ux + ry * uy;
                        let across = (rx * uy - ry * ux).abs();
                        (along > 0.0 && across <= 0.5 && rx.hypot(ry) <= range + RANGE_EPSILON).then_some((
                            j,
                            along,
                            e.spawn_index,
                        ))
                    })
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.2.cmp(&b.2)))
                    .map(|(j, _, _)| j)
            })
            .collect()
    }

    fn run_trap(&mut self, i: usize, spec: &TowerSpec, stats: &TowerStats, map: &GridMap) {
        let period = seconds_to_ticks(spec.effect.trap_recharge_seconds).max(1);
        let Some(trap) = self.towers[i].trap.as_mut() else {
            return;
        };
        trap.recharge_ticks = trap.recharge_ticks.saturating_sub(1);
        if trap.recharge_ticks == 0 {
            trap.charges = spec.effect.trap_charges;
            trap.recharge_ticks = period;
        }
        let cell = trap.cell;
        for e in self.enemies.iter_mut().filter(|e| e.is_alive()) {
            if trap.charges == 0 {
                break;
            }
            let crossed = map.routes[e.route].indices_of(cell).any(|k| {
                let k = k as f64;
                (e.prev_progress < k && k <= e.progress) || (e.progress <= k && k < e.prev_progress)
            });
            if crossed {
                e.health -= stats.damage;
                trap.charges -= 1;
            }
        }
    }

    /// The scripted enemy sequence of a spawn point, in spawn order.
    pub fn spawn_preview(&self, spawn_point: usize) -> Result<Vec<String>, SimError> {
        let script = self.map().spawns.get(spawn_point).ok_or(SimError::UnknownSpawnPoint(spawn_point))?;
        let mut entries: Vec<_> = script.entries.iter().collect();
        entries.sort_by_key(|e| seconds_to_ticks(e.at));
        Ok(entries.into_iter().map(|e| e.enemy.clone()).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionVerdict {
    Correct,
    Incorrect,
}

/// Whether the selected tower is the target. Only defined for object-selection sessions.
pub fn evaluate_selection(state: &GameState, selected: TowerId, target: TowerId) -> Result<SelectionVerdict, SimError> {
    if state.config.mode != Mode::ObjectSelection {
        return Err(SimError::ModeMismatch);
    }
    for id in [selected, target] {
        state.tower(id).ok_or(SimError::UnknownTowerId(id))?;
    }
    Ok(if selected == target { SelectionVerdict::Correct } else { SelectionVerdict::Incorrect })
}

/// Fraction of `reference` matched by placed towers with the same type, cell
/// and orientation. Each placed tower can match at most one reference item.
pub fn evaluate_layout(state: &GameState, reference: &[PlacedObject]) -> Result<f64, SimError> {
    if state.config.mode != Mode::ObjectManipulation {
        return Err(SimError::ModeMismatch);
    }
    Ok(layout_score(state, reference))
}

fn layout_score(state: &GameState, reference: &[PlacedObject]) -> f64 {
    if reference.is_empty() {
        return 1.0;
    }
    let mut wanted: BTreeMap<(&str, Cell, Orientation), usize> = BTreeMap::new();
    for r in reference {
        *wanted.entry((r.tower.as_str(), r.cell, r.orientation)).or_default() += 1;
    }
    let mut placed: BTreeMap<(&str, Cell, Orientation), usize> = BTreeMap::new();
    for t in &state.towers {
        *placed.entry((t.spec.as_str(), t.cell, t.orientation)).or_default() += 1;
    }
    let matched: usize = wanted.iter().map(|(k, n)| (*n).min(placed.get(k).copied().unwrap_or(0))).sum();
    matched as f64 / reference.len() as f64
}
