use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::catalog::Archetype;
use crate::grid::{GridMap, TileKind};
use crate::sim::{init_game, ScoreMode};

use super::{Mode, SessionConfig};

/// Stable identifiers for validation failures. New codes may be added;
/// existing ones are never renamed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValidationCode {
    NoLevels,
    ZeroRounds,
    TeamSize,
    DuplicateColor,
    DuplicateId,
    UnknownTowerRef,
    UnknownEnemyRef,
    InvalidTowerStats,
    InvalidEnemyStats,
    InvalidScoreWeights,
    InvalidRefundRate,
    InvalidLevelValue,
    MapTooSmall,
    RouteEmpty,
    RouteNotAdjacent,
    RouteOffPath,
    RouteNotAtBase,
    UnknownRoute,
    SpawnHeadShared,
    SpawnOrder,
    NoBuildableCells,
    PreplacedMissing,
    PreplacedInvalid,
    SelectionTargetMissing,
    ReferenceLayoutMissing,
}

impl ValidationCode {
    pub fn as_str(self) -> &'static str {
        use ValidationCode::*;
        match self {
            NoLevels => "no_levels",
            ZeroRounds => "zero_rounds",
            TeamSize => "team_size",
            DuplicateColor => "duplicate_color",
            DuplicateId => "duplicate_id",
            UnknownTowerRef => "unknown_tower_ref",
            UnknownEnemyRef => "unknown_enemy_ref",
            InvalidTowerStats => "invalid_tower_stats",
            InvalidEnemyStats => "invalid_enemy_stats",
            InvalidScoreWeights => "invalid_score_weights",
            InvalidRefundRate => "invalid_refund_rate",
            InvalidLevelValue => "invalid_level_value",
            MapTooSmall => "map_too_small",
            RouteEmpty => "route_empty",
            RouteNotAdjacent => "route_not_adjacent",
            RouteOffPath => "route_off_path",
            RouteNotAtBase => "route_not_at_base",
            UnknownRoute => "unknown_route",
            SpawnHeadShared => "spawn_head_shared",
            SpawnOrder => "spawn_order",
            NoBuildableCells => "no_buildable_cells",
            PreplacedMissing => "preplaced_missing",
            PreplacedInvalid => "preplaced_invalid",
            SelectionTargetMissing => "selection_target_missing",
            ReferenceLayoutMissing => "reference_layout_missing",
        }
    }
}

impl fmt::Display for ValidationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationError {
    pub code: ValidationCode,
    /// Location in the document, e.g. `levels[1].map.routes[0]`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.path, self.code, self.message)
    }
}

impl std::error::Error for ValidationError {}

struct Report(Vec<ValidationError>);

impl Report {
    fn push(&mut self, code: ValidationCode, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(ValidationError { code, path: path.into(), message: message.into() });
    }
}

fn non_negative(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Semantic checks on a parsed config. Returns every problem found.
pub fn validate_config(config: &SessionConfig) -> Result<(), Vec<ValidationError>> {
    use ValidationCode::*;
    let mut r = Report(Vec::new());

    if config.levels.is_empty() {
        r.push(NoLevels, "levels", "at least one level is required");
    }
    if config.rounds_per_level == 0 {
        r.push(ZeroRounds, "rounds_per_level", "rounds_per_level must be at least 1");
    }
    if !(1..=8).contains(&config.team.len()) {
        r.push(TeamSize, "team", format!("team must have 1 to 8 slots, has {}", config.team.len()));
    }

    let mut colors = HashSet::new();
    for (i, slot) in config.team.iter().enumerate() {
        if !colors.insert(slot.color.to_ascii_lowercase()) {
            r.push(DuplicateColor, format!("team[{i}].color"), format!("color {:?} already used", slot.color));
        }
        for (j, t) in slot.towers.iter().enumerate() {
            if config.tower(t).is_none() {
                r.push(UnknownTowerRef, format!("team[{i}].towers[{j}]"), format!("unknown tower {t:?}"));
            }
        }
    }

    let mut ids = HashSet::new();
    for (i, t) in config.towers.iter().enumerate() {
        let path = format!("towers[{i}]");
        if !ids.insert(t.id.as_str()) {
            r.push(DuplicateId, &path, format!("duplicate tower id {:?}", t.id));
        }
        let fx = &t.effect;
        let mut bad = Vec::new();
        if !non_negative(t.range) {
            bad.push("range must be >= 0");
        }
        if !non_negative(t.damage) {
            bad.push("damage must be >= 0");
        }
        if t.archetype.attacks() && !(t.firerate.is_finite() && t.firerate > 0.0) {
            bad.push("firerate must be > 0");
        }
        if matches!(t.archetype, Archetype::Discount | Archetype::Support) && t.damage != 0.0 {
            bad.push("discount and support towers deal no damage");
        }
        if !(fx.slow_multiplier > 0.0 && fx.slow_multiplier < 1.0) {
            bad.push("slow multiplier must be in (0, 1)");
        }
        if !(fx.discount_multiplier >= 0.0 && fx.discount_multiplier <= 1.0) {
            bad.push("discount multiplier must be in [0, 1]");
        }
        if fx.sniper_reference_speed.is_nan()
            || fx.sniper_reference_speed <= 0.0
            || fx.sniper_cap.is_nan()
            || fx.sniper_cap < 1.0
        {
            bad.push("sniper reference speed must be > 0 and cap >= 1");
        }
        let durations = [
            fx.poison_dps,
            fx.poison_seconds,
            fx.splash_radius,
            fx.slow_seconds,
            fx.fear_multiplier,
            fx.fear_seconds,
            fx.fear_immunity_seconds,
            fx.trap_recharge_seconds,
            fx.support_buff,
        ];
        if !durations.iter().all(|x| non_negative(*x)) {
            bad.push("effect parameters must be finite and >= 0");
        }
        for msg in bad {
            r.push(InvalidTowerStats, &path, msg);
        }
    }

    let mut ids = HashSet::new();
    for (i, e) in config.enemies.iter().enumerate() {
        let path = format!("enemies[{i}]");
        if !ids.insert(e.id.as_str()) {
            r.push(DuplicateId, &path, format!("duplicate enemy id {:?}", e.id));
        }
        let ok = e.max_health.is_finite() && e.max_health > 0.0 && e.speed.is_finite() && e.speed > 0.0;
        if !ok || e.points == 0 || e.bounty == 0 {
            r.push(InvalidEnemyStats, &path, "health, speed, points and bounty must all be > 0");
        }
    }

    let w = &config.score;
    if w.mode == ScoreMode::Linear && ![w.unspent, w.points, w.health].iter().all(|x| non_negative(*x)) {
        r.push(InvalidScoreWeights, "score", "linear weights must be finite and >= 0");
    }
    for (name, rate) in [("planning", config.refund.planning), ("attack", config.refund.attack)] {
        if !(0.0..=1.0).contains(&rate) {
            r.push(InvalidRefundRate, format!("refund.{name}"), "refund rate must be in [0, 1]");
        }
    }

    for li in 0..config.levels.len() {
        check_level(config, li, &mut r);
    }

    // Everything above is necessary for a round to start; confirm it is
    // sufficient by starting each level once.
    if r.0.is_empty() {
        for li in 0..config.levels.len() {
            if let Err(e) = init_game(config.clone(), li, 0) {
                r.push(PreplacedInvalid, format!("levels[{li}].preplaced"), e.to_string());
            }
        }
    }

    if r.0.is_empty() {
        Ok(())
    } else {
        Err(r.0)
    }
}

fn check_level(config: &SessionConfig, li: usize, r: &mut Report) {
    use ValidationCode::*;
    let level = &config.levels[li];
    let lp = format!("levels[{li}]");
    if !non_negative(level.planning_seconds) {
        r.push(InvalidLevelValue, format!("{lp}.planning_seconds"), "planning_seconds must be >= 0");
    }
    check_map(config, &level.map, &format!("{lp}.map"), r);

    if config.mode == Mode::TowerDefense && level.map.count(TileKind::Buildable) == 0 {
        r.push(NoBuildableCells, format!("{lp}.map.grid"), "no buildable cells");
    }
    for (k, list) in [("preplaced", &level.preplaced), ("reference_layout", &level.reference_layout)] {
        let mut cells = BTreeSet::new();
        for (i, obj) in list.iter().enumerate() {
            let path = format!("{lp}.{k}[{i}]");
            if config.tower(&obj.tower).is_none() {
                r.push(UnknownTowerRef, &path, format!("unknown tower {:?}", obj.tower));
            }
            if level.map.tile(obj.cell) != Some(TileKind::Buildable) {
                r.push(PreplacedInvalid, &path, format!("cell {} is not buildable", obj.cell));
            }
            if k == "preplaced" && !cells.insert(obj.cell) {
                r.push(PreplacedInvalid, &path, format!("cell {} already holds a tower", obj.cell));
            }
        }
    }
    if config.mode != Mode::TowerDefense && level.preplaced.is_empty() {
        r.push(PreplacedMissing, format!("{lp}.preplaced"), "object modes need pre-placed towers");
    }
    if config.mode == Mode::ObjectSelection {
        match level.selection_target {
            None => r.push(SelectionTargetMissing, format!("{lp}.selection_target"), "selection target missing"),
            Some(t) if t >= level.preplaced.len() => r.push(
                SelectionTargetMissing,
                format!("{lp}.selection_target"),
                format!("selection target missing: index {t} is not a pre-placed tower"),
            ),
            Some(_) => {}
        }
    }
    if config.mode == Mode::ObjectManipulation && level.reference_layout.is_empty() {
        r.push(ReferenceLayoutMissing, format!("{lp}.reference_layout"), "reference layout missing");
    }
}

fn check_map(config: &SessionConfig, map: &GridMap, mp: &str, r: &mut Report) {
    use ValidationCode::*;
    if map.width < 4 || map.height < 4 {
        r.push(MapTooSmall, format!("{mp}.grid"), format!("map is {}x{}, minimum 4x4", map.width, map.height));
    }
    for (ri, route) in map.routes.iter().enumerate() {
        let path = format!("{mp}.routes[{ri}]");
        let w = &route.waypoints;
        if w.len() < 2 {
            r.push(RouteEmpty, &path, "route needs at least two cells");
            continue;
        }
        if let Some(i) = w.windows(2).position(|p| !p[0].is_adjacent(p[1])) {
            r.push(RouteNotAdjacent, &path, format!("route not 4-adjacent between {} and {}", w[i], w[i + 1]));
        }
        if w.last() != Some(&map.base) {
            r.push(RouteNotAtBase, &path, format!("route ends at {}, base is {}", w[w.len() - 1], map.base));
        }
        if let Some(c) = w[..w.len() - 1].iter().find(|c| map.tile(**c) != Some(TileKind::Path)) {
            r.push(RouteOffPath, &path, format!("cell {c} is not a path tile"));
        }
    }
    let mut heads = HashSet::new();
    for (si, spawn) in map.spawns.iter().enumerate() {
        let path = format!("{mp}.spawns[{si}]");
        match map.routes.get(spawn.route) {
            None => r.push(UnknownRoute, &path, format!("unknown route {}", spawn.route)),
            Some(route) => {
                if let Some(h) = route.head() {
                    let shared = map.routes.iter().filter(|o| o.head() == Some(h)).count() > 1;
                    if shared || !heads.insert(h) {
                        r.push(SpawnHeadShared, &path, format!("spawn head {h} is not unique to one route"));
                    }
                }
            }
        }
        for (ei, entry) in spawn.entries.iter().enumerate() {
            if config.enemy(&entry.enemy).is_none() {
                r.push(UnknownEnemyRef, format!("{path}.entries[{ei}]"), format!("unknown enemy {:?}", entry.enemy));
            }
            if !non_negative(entry.at) {
                r.push(SpawnOrder, format!("{path}.entries[{ei}]"), "spawn time must be >= 0");
            }
        }
        if spawn.entries.windows(2).any(|p| p[1].at < p[0].at) {
            r.push(SpawnOrder, &path, "spawn times must be non-decreasing");
        }
    }
}
