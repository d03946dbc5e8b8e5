#![allow(dead_code)]

use taskforge_core::config::{
    ChecklistNotes, CommSettings, LevelSpec, Mode, MoneyModel, RefundRates, SellPolicy, SessionConfig, TowerAssignment,
    Visibility,
};
use taskforge_core::sim::{CommandKind, ScoreWeights};
use taskforge_core::*;

pub fn spec(id: &str, archetype: Archetype, range: f64, damage: f64, firerate: f64) -> TowerSpec {
    TowerSpec {
        id: id.into(),
        archetype,
        cost: 100,
        range,
        damage,
        firerate,
        upgrade_cost: 50,
        effect: EffectParams::default(),
        display_name: String::new(),
        description: String::new(),
    }
}

pub fn enemy(id: &str, health: f64, speed: f64) -> EnemyVariant {
    EnemyVariant { id: id.into(), max_health: health, speed, points: 10, bounty: 7 }
}

/// A `width x 5` board with one straight route along row 2, base at the
/// right end. Everything off the route is buildable.
pub fn straight_map(width: u32, spawns: Vec<SpawnScript>) -> GridMap {
    let mut rows: Vec<String> = vec![".".repeat(width as usize); 5];
    rows[2] = format!("{}B", ">".repeat(width as usize - 1));
    GridMap::from_ascii(&rows, &[vec![Cell::new(0, 2), Cell::new(width - 1, 2)]], spawns).unwrap()
}

pub fn script(entries: &[(&str, f64)]) -> SpawnScript {
    SpawnScript {
        route: 0,
        entries: entries.iter().map(|(e, at)| SpawnEntry { enemy: e.to_string(), at: *at }).collect(),
    }
}

pub fn config(towers: Vec<TowerSpec>, enemies: Vec<EnemyVariant>, map: GridMap, players: usize) -> SessionConfig {
    let ids: Vec<String> = towers.iter().map(|t| t.id.clone()).collect();
    SessionConfig {
        name: "test".into(),
        mode: Mode::TowerDefense,
        rounds_per_level: 1,
        money_model: MoneyModel::Shared,
        interact_during_attack: true,
        sell_policy: SellPolicy::Anyone,
        comm: CommSettings { text_chat: true, voice: false, push_to_talk: false },
        visibility: Visibility::default(),
        score: ScoreWeights::binary(),
        refund: RefundRates::default(),
        notes: ChecklistNotes::default(),
        team: (0..players)
            .map(|i| TowerAssignment { label: "H".into(), color: format!("#00000{i}"), towers: ids.clone() })
            .collect(),
        towers,
        enemies,
        levels: vec![LevelSpec {
            name: "t".into(),
            starting_gold: 10_000,
            starting_health: 5,
            planning_seconds: 10.0,
            min_win_cost: None,
            selection_target: None,
            preplaced: vec![],
            reference_layout: vec![],
            map,
        }],
    }
}

pub const P0: PlayerId = PlayerId(0);
pub const P1: PlayerId = PlayerId(1);

pub fn place(who: PlayerId, tower: &str, x: u32, y: u32) -> Command {
    Command::new(
        who,
        CommandKind::Place { tower: tower.into(), cell: Cell::new(x, y), orientation: Orientation::North },
    )
}

pub fn upgrade(who: PlayerId, x: u32, y: u32, track: UpgradeTrack) -> Command {
    Command::new(who, CommandKind::Upgrade { cell: Cell::new(x, y), track })
}

pub fn sell(who: PlayerId, x: u32, y: u32) -> Command {
    Command::new(who, CommandKind::Sell { cell: Cell::new(x, y) })
}

pub fn ready(who: PlayerId) -> Command {
    Command::new(who, CommandKind::Ready { ready: true })
}

/// Readies everyone so the round enters the attack phase.
pub fn start_attack(state: &mut GameState) {
    for p in state.players.clone() {
        state.apply_command(&ready(p)).unwrap();
    }
    assert_eq!(state.phase, Phase::Attack);
}

/// Steps until the round ends or `limit` ticks pass; returns all events.
pub fn run(state: &mut GameState, limit: u64) -> Vec<SimEvent> {
    let mut events = Vec::new();
    for _ in 0..limit {
        if state.is_over() {
            break;
        }
        events.extend(state.step());
    }
    events
}
