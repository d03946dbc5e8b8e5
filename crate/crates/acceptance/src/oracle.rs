//! One tower against one enemy: the simulation versus a millisecond
//! time-stepping model of the same rules.

use taskforge_core::sim::{EventKind, DT};
use taskforge_core::{
    builtin_preset, init_game, Archetype, Cell, Command, CommandKind, EffectParams, EnemyVariant, GridMap, Orientation,
    PlayerId, SessionConfig, SpawnEntry, SpawnScript, TowerSpec,
};

pub const ROUTE_TILES: u32 = 10;
pub const ENEMY_HEALTH: f64 = 100.0;
/// Tower cell, one row above the route.
pub const TOWER: (u32, u32) = (5, 1);
const ROUTE_ROW: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub damage: f64,
    pub firerate: f64,
    pub speed: f64,
    pub range: f64,
}

/// Every combination of damage, firerate, speed and range from the test grid.
pub fn grid() -> Vec<Scenario> {
    let mut out = Vec::new();
    for damage in [5.0, 10.0, 20.0] {
        for firerate in [0.5, 1.0, 2.0] {
            for speed in [0.5, 1.0, 2.0] {
                for range in [2.0, 3.0, 5.0] {
                    out.push(Scenario { damage, firerate, speed, range });
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fate {
    Killed,
    Leaked,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Result {
    pub fate: Fate,
    /// Time of the deciding event in seconds of attack time.
    pub seconds: f64,
}

impl Result {
    pub fn ticks(&self) -> f64 {
        self.seconds / DT
    }
}

/// Steps the scenario in 1 ms increments: move, then fire if the cooldown
/// has run out and the enemy is in range, then check arrival.
pub fn scalar_oracle(s: &Scenario) -> Result {
    let period_ms = 1000.0 / s.firerate;
    let (tx, ty) = (f64::from(TOWER.0), f64::from(TOWER.1));
    let mut health = ENEMY_HEALTH;
    let mut cooldown = 0.0f64;
    let mut ms: u64 = 0;
    loop {
        ms += 1;
        let t = ms as f64 / 1000.0;
        let x = (s.speed * t).min(f64::from(ROUTE_TILES));
        if cooldown > 0.0 {
            cooldown -= 1.0;
        }
        let dist = ((x - tx).powi(2) + (f64::from(ROUTE_ROW) - ty).powi(2)).sqrt();
        if cooldown <= 0.0 && dist <= s.range + 1e-9 {
            health -= s.damage;
            cooldown += period_ms;
            if health <= 0.0 {
                return Result { fate: Fate::Killed, seconds: t };
            }
        }
        if x >= f64::from(ROUTE_TILES) {
            return Result { fate: Fate::Leaked, seconds: t };
        }
    }
}

/// A one-level session holding just this scenario, with no planning phase.
pub fn scenario_config(s: &Scenario) -> SessionConfig {
    let mut c = builtin_preset("case-study").expect("preset exists");
    c.name = "oracle".into();
    c.rounds_per_level = 1;
    c.interact_during_attack = true;
    c.towers = vec![TowerSpec {
        id: "basic".into(),
        archetype: Archetype::Basic,
        cost: 100,
        range: s.range,
        damage: s.damage,
        firerate: s.firerate,
        upgrade_cost: 50,
        effect: EffectParams::default(),
        display_name: String::new(),
        description: String::new(),
    }];
    c.enemies =
        vec![EnemyVariant { id: "grunt".into(), max_health: ENEMY_HEALTH, speed: s.speed, points: 1, bounty: 1 }];
    for slot in &mut c.team {
        slot.towers = vec!["basic".into()];
    }
    let width = ROUTE_TILES + 1;
    let mut rows = vec![".".repeat(width as usize); 5];
    rows[ROUTE_ROW as usize] = format!("{}B", ">".repeat(ROUTE_TILES as usize));
    let spawns = vec![SpawnScript { route: 0, entries: vec![SpawnEntry { enemy: "grunt".into(), at: 0.0 }] }];
    let map = GridMap::from_ascii(&rows, &[vec![Cell::new(0, ROUTE_ROW), Cell::new(ROUTE_TILES, ROUTE_ROW)]], spawns)
        .expect("straight map is valid");
    c.levels.truncate(1);
    let level = &mut c.levels[0];
    level.map = map;
    level.preplaced.clear();
    level.reference_layout.clear();
    level.planning_seconds = 0.0;
    level.starting_health = 5;
    level.starting_gold = 1000;
    c
}

/// Runs the simulation on the scenario. The tower is placed before the
/// first attack step.
pub fn simulate(s: &Scenario) -> Result {
    let mut state = init_game(scenario_config(s), 0, 0).expect("scenario config is valid");
    let place = Command::new(
        PlayerId(0),
        CommandKind::Place {
            tower: "basic".into(),
            cell: Cell::new(TOWER.0, TOWER.1),
            orientation: Orientation::North,
        },
    );
    state.apply_command(&place).expect("tower fits");
    for _ in 0..100_000 {
        for ev in state.step() {
            let seconds = state.attack_ticks as f64 * DT;
            match ev.kind {
                EventKind::Killed { .. } => return Result { fate: Fate::Killed, seconds },
                EventKind::Leaked { .. } => return Result { fate: Fate::Leaked, seconds },
                _ => {}
            }
        }
    }
    panic!("scenario {s:?} never resolved");
}

/// Agreement on fate, and event time within one tick.
pub fn agrees(sim: &Result, oracle: &Result) -> bool {
    sim.fate == oracle.fate && (sim.ticks() - oracle.ticks()).abs() <= 1.0 + 1e-9
}
