//! Built-in session configs.

use crate::catalog::{Archetype, EffectParams, EnemyVariant, Orientation, TowerSpec};
use crate::grid::{Cell, GridMap, PathRoute, SpawnEntry, SpawnScript, TileKind};
use crate::sim::ScoreWeights;

use super::*;

pub const PRESET_NAMES: [&str; 5] = ["tutorial", "case-study", "stress", "object-selection", "object-manipulation"];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown preset {0:?}")]
pub struct UnknownPreset(pub String);

/// Looks up a preset by name. `case-study-L1` .. `case-study-L3` select a
/// single case-study level.
pub fn builtin_preset(name: &str) -> Result<SessionConfig, UnknownPreset> {
    match name {
        "tutorial" => Ok(tutorial()),
        "case-study" => Ok(case_study()),
        "stress" => Ok(stress()),
        "object-selection" => Ok(object_selection()),
        "object-manipulation" => Ok(object_manipulation()),
        _ => {
            let k = name
                .strip_prefix("case-study-L")
                .or_else(|| name.strip_prefix("case-study-l"))
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|k| (1..=3).contains(k))
                .ok_or_else(|| UnknownPreset(name.to_string()))?;
            let mut c = case_study();
            c.name = format!("case-study-L{k}");
            c.levels = vec![c.levels.swap_remove(k - 1)];
            Ok(c)
        }
    }
}

fn tower(id: &str, archetype: Archetype, cost: u64, range: f64, damage: f64, firerate: f64, upgrade: u64) -> TowerSpec {
    TowerSpec {
        id: id.to_string(),
        archetype,
        cost,
        range,
        damage,
        firerate,
        upgrade_cost: upgrade,
        effect: EffectParams::default(),
        display_name: String::new(),
        description: String::new(),
    }
}

fn described(mut t: TowerSpec, name: &str, description: &str) -> TowerSpec {
    t.display_name = name.to_string();
    t.description = description.to_string();
    t
}

/// The twelve-tower catalog. First upgrades cost about 40% of the tower, so
/// a first damage upgrade buys more damage per gold than a second tower.
pub fn standard_towers() -> Vec<TowerSpec> {
    use Archetype::*;
    vec![
        described(tower("basic", Basic, 300, 3.0, 10.0, 1.0, 120), "Basic", "Shoots the lead enemy in range."),
        described(tower("poison", Poison, 400, 3.0, 4.0, 0.8, 160), "Poison", "Hits poison the target for 3 s."),
        described(
            tower("piercing", Piercing, 500, 4.0, 12.0, 0.6, 200),
            "Piercing",
            "Shots pass through every enemy in line.",
        ),
        described(tower("splash", Splash, 550, 3.0, 8.0, 0.7, 220), "Splash", "Damages everything near the target."),
        described(
            tower("obstacle", Obstacle, 350, 2.0, 25.0, 1.0, 140),
            "Obstacle",
            "Lays a trap on a nearby path tile.",
        ),
        described(tower("slow", Slow, 400, 3.0, 2.0, 1.0, 160), "Slow", "Halves the target's speed for 2 s."),
        described(tower("fear", Fear, 600, 2.5, 2.0, 0.4, 240), "Fear", "Sends the target backwards for a moment."),
        described(
            tower("sniper", Sniper, 650, 7.0, 25.0, 0.4, 260),
            "Sniper",
            "Long range; more damage to fast enemies.",
        ),
        described(tower("discount", Discount, 500, 3.0, 0.0, 1.0, 200), "Discount", "Nearby upgrades cost 20% less."),
        described(
            tower("support", Support, 700, 2.0, 0.0, 1.0, 280),
            "Support",
            "Nearby towers get +20% to every stat.",
        ),
        described(tower("multi", Multishot, 450, 3.0, 8.0, 0.8, 180), "Multi", "Fires in all four directions at once."),
        described(tower("map", Map, 900, 0.0, 3.0, 0.25, 360), "Map", "Hits every enemy on the map."),
    ]
}

pub fn standard_enemies() -> Vec<EnemyVariant> {
    let e = |id: &str, max_health: f64, speed: f64, points: u64, bounty: u64| EnemyVariant {
        id: id.to_string(),
        max_health,
        speed,
        points,
        bounty,
    };
    vec![
        e("grunt", 60.0, 1.0, 10, 15),
        e("runner", 35.0, 2.0, 15, 20),
        e("tank", 250.0, 0.6, 40, 50),
        e("swarm", 20.0, 1.5, 5, 5),
    ]
}

const COLORS: [&str; 8] = ["#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#bfef45"];

fn slot(i: usize, towers: &[&str]) -> TowerAssignment {
    TowerAssignment {
        label: "H".to_string(),
        color: COLORS[i].to_string(),
        towers: towers.iter().map(|t| t.to_string()).collect(),
    }
}

const fn c(x: u32, y: u32) -> Cell {
    Cell::new(x, y)
}

/// Builds a map from route corner lists; every route ends at `base`.
/// `blocked` cells that fall on a route stay path.
fn build_map(
    width: u32,
    height: u32,
    routes: &[&[Cell]],
    blocked: &[(Cell, Cell)],
    spawns: Vec<SpawnScript>,
) -> GridMap {
    let routes: Vec<PathRoute> = routes.iter().map(|r| PathRoute::from_corners(r)).collect();
    let base = *routes[0].waypoints.last().expect("non-empty route");
    let mut tiles = vec![TileKind::Buildable; (width * height) as usize];
    for &(a, b) in blocked {
        for y in a.y..=b.y {
            for x in a.x..=b.x {
                tiles[(y * width + x) as usize] = TileKind::Blocked;
            }
        }
    }
    for r in &routes {
        for w in &r.waypoints {
            tiles[(w.y * width + w.x) as usize] = TileKind::Path;
        }
    }
    tiles[(base.y * width + base.x) as usize] = TileKind::Base;
    GridMap { width, height, tiles, routes, spawns, base }
}

/// `count` enemies of one variant, `gap` seconds apart from `start`.
fn wave(out: &mut Vec<SpawnEntry>, enemy: &str, count: usize, start: f64, gap: f64) {
    out.extend((0..count).map(|i| SpawnEntry { enemy: enemy.to_string(), at: start + gap * i as f64 }));
}

fn script(route: usize, waves: &[(&str, usize, f64, f64)]) -> SpawnScript {
    let mut entries = Vec::new();
    for &(enemy, count, start, gap) in waves {
        wave(&mut entries, enemy, count, start, gap);
    }
    entries.sort_by(|a, b| a.at.total_cmp(&b.at));
    SpawnScript { route, entries }
}

fn tutorial() -> SessionConfig {
    let route: &[Cell] = &[c(0, 2), c(5, 2), c(5, 6), c(7, 6)];
    let map = build_map(8, 8, &[route], &[], vec![script(0, &[("grunt", 4, 0.0, 2.0)])]);
    SessionConfig {
        name: "tutorial".to_string(),
        mode: Mode::TowerDefense,
        rounds_per_level: 1,
        money_model: MoneyModel::Shared,
        interact_during_attack: true,
        sell_policy: SellPolicy::Anyone,
        comm: CommSettings { text_chat: true, voice: false, push_to_talk: false },
        visibility: Visibility::default(),
        score: ScoreWeights::binary(),
        refund: RefundRates::default(),
        notes: ChecklistNotes { solution_space: "Open: any layout that stops four grunts wins".to_string() },
        team: vec![slot(0, &["basic", "slow"]), slot(1, &["splash", "poison"])],
        towers: standard_towers(),
        enemies: standard_enemies(),
        levels: vec![LevelSpec {
            name: "Tutorial".to_string(),
            starting_gold: 1500,
            starting_health: 10,
            planning_seconds: 60.0,
            min_win_cost: Some(300),
            selection_target: None,
            preplaced: Vec::new(),
            reference_layout: Vec::new(),
            map,
        }],
    }
}

/// Route shared by every case-study level: enters on the left, ends at the
/// base in the bottom row.
const ROUTE_WEST: &[Cell] = &[c(0, 3), c(12, 3), c(12, 10), c(7, 10), c(7, 15)];
const ROUTE_EAST: &[Cell] = &[c(15, 0), c(15, 13), c(7, 13), c(7, 15)];
const ROUTE_MID: &[Cell] = &[c(0, 8), c(9, 8), c(9, 10), c(7, 10), c(7, 15)];

pub(crate) fn case_study_levels() -> Vec<LevelSpec> {
    let l1 = build_map(
        16,
        16,
        &[ROUTE_WEST],
        &[],
        vec![script(0, &[("grunt", 10, 0.0, 2.0), ("runner", 6, 25.0, 1.5), ("tank", 2, 40.0, 6.0)])],
    );
    let l2 = build_map(
        16,
        16,
        &[ROUTE_WEST, ROUTE_EAST],
        &[(c(4, 0), c(6, 1)), (c(13, 14), c(14, 15))],
        vec![
            script(0, &[("grunt", 10, 0.0, 2.0), ("tank", 2, 30.0, 6.0)]),
            script(1, &[("runner", 8, 5.0, 1.5), ("swarm", 10, 25.0, 0.5)]),
        ],
    );
    let l3 = build_map(
        16,
        16,
        &[ROUTE_WEST, ROUTE_EAST, ROUTE_MID],
        &[(c(4, 0), c(6, 1)), (c(13, 14), c(14, 15)), (c(3, 5), c(6, 6)), (c(13, 8), c(14, 9))],
        vec![
            script(0, &[("grunt", 12, 0.0, 2.0), ("tank", 3, 30.0, 5.0)]),
            script(1, &[("runner", 10, 5.0, 1.5), ("swarm", 12, 25.0, 0.5)]),
            script(2, &[("grunt", 8, 10.0, 2.0), ("runner", 6, 35.0, 1.0), ("tank", 2, 45.0, 6.0)]),
        ],
    );
    let level = |name: &str, planning: f64, min_win: u64, map: GridMap| LevelSpec {
        name: name.to_string(),
        starting_gold: 20000,
        starting_health: 100,
        planning_seconds: planning,
        min_win_cost: Some(min_win),
        selection_target: None,
        preplaced: Vec::new(),
        reference_layout: Vec::new(),
        map,
    };
    vec![level("Level 1", 300.0, 3000, l1), level("Level 2", 330.0, 6000, l2), level("Level 3", 360.0, 9000, l3)]
}

pub(crate) fn case_study_team() -> Vec<TowerAssignment> {
    vec![
        slot(0, &["basic", "splash", "support"]),
        slot(1, &["poison", "slow", "fear"]),
        slot(2, &["piercing", "sniper", "multi"]),
        slot(3, &["discount", "map", "obstacle"]),
    ]
}

fn case_study() -> SessionConfig {
    SessionConfig {
        name: "case-study".to_string(),
        mode: Mode::TowerDefense,
        rounds_per_level: 3,
        money_model: MoneyModel::Shared,
        interact_during_attack: false,
        sell_policy: SellPolicy::Anyone,
        comm: CommSettings { text_chat: true, voice: false, push_to_talk: false },
        visibility: Visibility::default(),
        score: ScoreWeights::linear(1.0, 1.0, 10.0),
        refund: RefundRates::default(),
        notes: ChecklistNotes {
            solution_space: "Open: surplus gold and many winning layouts; upgrades slightly favored over new towers"
                .to_string(),
        },
        team: case_study_team(),
        towers: standard_towers(),
        enemies: standard_enemies(),
        levels: case_study_levels(),
    }
}

fn stress() -> SessionConfig {
    let mut levels = case_study_levels();
    let mut level = levels.swap_remove(1);
    level.name = "Rush".to_string();
    level.starting_gold = 1500;
    level.planning_seconds = 30.0;
    level.min_win_cost = Some(4000);
    SessionConfig {
        name: "stress".to_string(),
        mode: Mode::TowerDefense,
        rounds_per_level: 1,
        money_model: MoneyModel::Shared,
        interact_during_attack: true,
        sell_policy: SellPolicy::Anyone,
        comm: CommSettings { text_chat: true, voice: true, push_to_talk: false },
        visibility: Visibility::default(),
        score: ScoreWeights::binary(),
        refund: RefundRates::default(),
        notes: ChecklistNotes {
            solution_space: "Several: planning-phase gold cannot win alone, bounties must be reinvested".to_string(),
        },
        team: case_study_team(),
        towers: standard_towers(),
        enemies: standard_enemies(),
        levels: vec![level],
    }
}

fn object_board() -> GridMap {
    build_map(10, 10, &[&[c(0, 5), c(9, 5)]], &[], Vec::new())
}

fn placed(tower: &str, cell: Cell, orientation: Orientation) -> PlacedObject {
    PlacedObject { tower: tower.to_string(), cell, orientation }
}

fn object_selection() -> SessionConfig {
    SessionConfig {
        name: "object-selection".to_string(),
        mode: Mode::ObjectSelection,
        rounds_per_level: 1,
        money_model: MoneyModel::Shared,
        interact_during_attack: false,
        sell_policy: SellPolicy::Anyone,
        comm: CommSettings { text_chat: true, voice: true, push_to_talk: false },
        visibility: Visibility { tower_names: false, ..Visibility::default() },
        score: ScoreWeights::binary(),
        refund: RefundRates::default(),
        notes: ChecklistNotes::default(),
        team: vec![slot(0, &[]), slot(1, &[])],
        towers: standard_towers(),
        enemies: standard_enemies(),
        levels: vec![LevelSpec {
            name: "Pick the sniper".to_string(),
            starting_gold: 0,
            starting_health: 1,
            planning_seconds: 120.0,
            min_win_cost: None,
            selection_target: Some(2),
            preplaced: vec![
                placed("basic", c(2, 3), Orientation::North),
                placed("splash", c(4, 7), Orientation::North),
                placed("sniper", c(6, 3), Orientation::North),
                placed("slow", c(8, 7), Orientation::North),
            ],
            reference_layout: Vec::new(),
            map: object_board(),
        }],
    }
}

fn object_manipulation() -> SessionConfig {
    SessionConfig {
        name: "object-manipulation".to_string(),
        mode: Mode::ObjectManipulation,
        rounds_per_level: 1,
        money_model: MoneyModel::Shared,
        interact_during_attack: false,
        sell_policy: SellPolicy::Anyone,
        comm: CommSettings { text_chat: true, voice: true, push_to_talk: false },
        visibility: Visibility::default(),
        score: ScoreWeights::binary(),
        refund: RefundRates::default(),
        notes: ChecklistNotes::default(),
        team: vec![slot(0, &["basic", "multi"]), slot(1, &["splash"])],
        towers: standard_towers(),
        enemies: standard_enemies(),
        levels: vec![LevelSpec {
            name: "Rebuild the outpost".to_string(),
            starting_gold: 3000,
            starting_health: 1,
            planning_seconds: 0.0,
            min_win_cost: None,
            selection_target: None,
            preplaced: vec![
                placed("basic", c(1, 1), Orientation::North),
                placed("multi", c(8, 1), Orientation::North),
                placed("splash", c(1, 8), Orientation::North),
            ],
            reference_layout: vec![
                placed("basic", c(3, 4), Orientation::East),
                placed("multi", c(5, 6), Orientation::South),
                placed("splash", c(7, 4), Orientation::West),
            ],
            map: object_board(),
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_study_shape() {
        let c = builtin_preset("case-study").unwrap();
        assert_eq!(c.levels.len(), 3);
        assert_eq!(c.rounds_per_level, 3);
        assert_eq!(c.money_model, MoneyModel::Shared);
        assert!(!c.interact_during_attack);
        assert!(c.comm.text_chat && !c.comm.voice);
        let spawns: Vec<usize> = c.levels.iter().map(|l| l.map.spawns.len()).collect();
        assert_eq!(spawns, vec![1, 2, 3]);
        let build: Vec<usize> = c.levels.iter().map(|l| l.map.count(TileKind::Buildable)).collect();
        assert!(build.windows(2).all(|w| w[0] >= w[1]), "{build:?}");
        for l in &c.levels {
            assert!((300.0..=360.0).contains(&l.planning_seconds));
            assert_eq!((l.map.width, l.map.height), (16, 16));
        }
        assert_eq!(c.towers.len(), 12);
        let mut all: Vec<&String> = c.team.iter().flat_map(|s| &s.towers).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 12);
        assert!(c.team.iter().all(|s| (2..=4).contains(&s.towers.len())));
    }

    #[test]
    fn single_level_aliases() {
        let l2 = builtin_preset("case-study-L2").unwrap();
        assert_eq!(l2.levels.len(), 1);
        assert_eq!(l2.levels[0].map.spawns.len(), 2);
        assert!(builtin_preset("case-study-L4").is_err());
        assert_eq!(builtin_preset("nope").unwrap_err(), UnknownPreset("nope".into()));
    }

    #[test]
    fn first_damage_upgrade_beats_a_second_tower_per_gold() {
        for t in standard_towers().iter().filter(|t| t.damage > 0.0) {
            let upgrade = t.damage * 0.5 / t.upgrade_cost as f64;
            let another = t.damage / t.cost as f64;
            assert!(upgrade > another, "{}", t.id);
        }
    }

    #[test]
    fn sample_log_cells_are_buildable_on_level_one() {
        let c = builtin_preset("case-study").unwrap();
        let map = &c.levels[0].map;
        for (x, y) in
            [(10, 0), (13, 5), (0, 14), (0, 15), (0, 13), (1, 13), (2, 13), (1, 14), (1, 15), (2, 15), (2, 14), (1, 12)]
        {
            assert_eq!(map.tile(Cell::new(x, y)), Some(TileKind::Buildable), "({x}, {y})");
        }
    }
}
