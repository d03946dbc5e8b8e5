//! A fixed bot command schedule and a headless whole-session runner.

use taskforge_core::{
    init_game, Cell, Command, CommandKind, GameState, Orientation, PlayerId, SessionConfig, SimEvent, TileKind,
    UpgradeTrack,
};

/// One command, issued when the round's tick counter reaches `tick`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scheduled {
    pub level: usize,
    pub round: usize,
    pub tick: u64,
    pub command: Command,
}

/// Tick at which every player readies up.
pub const READY_TICK: u64 = 100;

/// Buildable cells touching the route, in row-major order.
pub fn frontline(config: &SessionConfig, level: usize) -> Vec<Cell> {
    let map = &config.levels[level].map;
    let near_path = |c: Cell| {
        map.cells().any(|o| map.tile(o) == Some(TileKind::Path) && o.x.abs_diff(c.x) <= 1 && o.y.abs_diff(c.y) <= 1)
    };
    let mut cells: Vec<Cell> =
        map.cells().filter(|c| map.tile(*c) == Some(TileKind::Buildable) && near_path(*c)).collect();
    cells.sort_by_key(|c| (c.y, c.x));
    cells
}

/// The same script every time: each player places one of their towers near
/// the route and upgrades it, player 0 buys and sells an extra tower, then
/// everyone readies.
pub fn bot_schedule(config: &SessionConfig) -> Vec<Scheduled> {
    let mut out = Vec::new();
    for level in 0..config.levels.len() {
        let cells = frontline(config, level);
        if cells.is_empty() {
            continue;
        }
        let n = cells.len();
        for round in 0..config.rounds_per_level as usize {
            let mut push = |tick: u64, who: usize, kind: CommandKind| {
                out.push(Scheduled { level, round, tick, command: Command::new(PlayerId(who as u8), kind) });
            };
            for (p, slot) in config.team.iter().enumerate() {
                if slot.towers.is_empty() {
                    continue;
                }
                let cell = cells[(p * 5 + round * 7 + level * 3) % n];
                let tower = slot.towers[round % slot.towers.len()].clone();
                push(10 + 5 * p as u64, p, CommandKind::Place { tower, cell, orientation: Orientation::North });
                let track = UpgradeTrack::ALL[(p + round) % 3];
                push(40 + 5 * p as u64, p, CommandKind::Upgrade { cell, track });
            }
            if let Some(tower) = config.team.first().and_then(|s| s.towers.first()) {
                let extra = cells[(round * 11 + level * 13 + 2) % n];
                push(60, 0, CommandKind::Place { tower: tower.clone(), cell: extra, orientation: Orientation::East });
                push(70, 0, CommandKind::Sell { cell: extra });
            }
            for p in 0..config.team.len() {
                push(READY_TICK, p, CommandKind::Ready { ready: true });
            }
        }
    }
    out
}

/// Events of one round played headless; rejected commands leave no trace.
pub fn play_round(state: &mut GameState, schedule: &[&Scheduled], tick_limit: u64) -> Vec<SimEvent> {
    let mut events = Vec::new();
    let mut next = 0;
    while !state.is_over() && state.tick < tick_limit {
        while next < schedule.len() && schedule[next].tick <= state.tick {
            if let Ok(ev) = state.apply_command(&schedule[next].command) {
                events.extend(ev);
            }
            next += 1;
        }
        events.extend(state.step());
    }
    events
}

/// Plays every round of the session in order and returns the full event log.
pub fn run_session(config: &SessionConfig, schedule: &[Scheduled]) -> Vec<SimEvent> {
    let config = std::sync::Arc::new(config.clone());
    let mut events = Vec::new();
    for level in 0..config.levels.len() {
        for round in 0..config.rounds_per_level as usize {
            let mut state = init_game(config.clone(), level, round).expect("valid round index");
            let mut mine: Vec<&Scheduled> = schedule.iter().filter(|s| s.level == level && s.round == round).collect();
            mine.sort_by_key(|s| s.tick);
            events.extend(play_round(&mut state, &mine, 1_000_000));
        }
    }
    events
}
