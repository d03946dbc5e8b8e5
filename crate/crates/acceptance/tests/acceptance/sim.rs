use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taskforge_acceptance::oracle::{self, agrees, scalar_oracle};
use taskforge_acceptance::report::ensure;
use taskforge_acceptance::schedule::{bot_schedule, run_session};
use taskforge_core::sim::{events_digest, seconds_to_ticks, support_buff, tower_stats, upgrade_cost, TowerInstance};
use taskforge_core::*;

pub fn determinism() -> Result<(), String> {
    let config = builtin_preset("case-study").map_err(|e| e.to_string())?;
    let schedule = bot_schedule(&config);
    let started = Instant::now();
    let mut digests = Vec::new();
    let mut placed = 0;
    for _ in 0..10 {
        let events = run_session(&config, &schedule);
        placed = events.iter().filter(|e| matches!(e.kind, EventKind::Placed { .. })).count();
        digests.push(events_digest(&events));
    }
    let elapsed = started.elapsed();
    ensure(placed > 0, || "the schedule placed no towers".into())?;
    ensure(digests.iter().all(|d| *d == digests[0]), || format!("digests differ: {digests:?}"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))
}

pub fn oracle_grid() -> Result<(), String> {
    let grid = oracle::grid();
    let misses: Vec<String> = grid
        .iter()
        .filter_map(|s| {
            let (sim, reference) = (oracle::simulate(s), scalar_oracle(s));
            (!agrees(&sim, &reference)).then(|| format!("{s:?}: sim {sim:?} oracle {reference:?}"))
        })
        .collect();
    ensure(grid.len() == 81, || format!("grid has {} points", grid.len()))?;
    let kills = grid.iter().filter(|s| scalar_oracle(s).fate == oracle::Fate::Killed).count();
    ensure(kills > 0 && kills < grid.len(), || format!("grid is one-sided: {kills} kills"))?;
    ensure(misses.is_empty(), || format!("{} of 81 disagree: {}", misses.len(), misses.join("; ")))
}

/// A command drawn from what the board allows right now: assigned towers on
/// buildable cells, upgrades and sales of standing towers, ready toggles.
fn random_command(rng: &mut ChaCha8Rng, state: &GameState) -> Command {
    let who = state.players[rng.random_range(0..state.players.len())];
    let slot = &state.config().team[usize::from(who.0)];
    let map = state.map();
    let standing =
        |rng: &mut ChaCha8Rng| state.towers.get(rng.random_range(0..state.towers.len().max(1))).map(|t| t.cell);
    let kind = match rng.random_range(0..10) {
        0..=4 if !slot.towers.is_empty() => {
            let free: Vec<Cell> = map
                .cells()
                .filter(|c| map.tile(*c) == Some(TileKind::Buildable) && state.towers.iter().all(|t| t.cell != *c))
                .collect();
            let cell = free[rng.random_range(0..free.len())];
            let tower = slot.towers[rng.random_range(0..slot.towers.len())].clone();
            CommandKind::Place { tower, cell, orientation: Orientation::North }
        }
        5..=6 if !state.towers.is_empty() => CommandKind::Upgrade {
            cell: standing(rng).expect("non-empty"),
            track: UpgradeTrack::ALL[rng.random_range(0..3)],
        },
        7 if !state.towers.is_empty() => CommandKind::Sell { cell: standing(rng).expect("non-empty") },
        _ => CommandKind::Ready { ready: rng.random_bool(0.8) },
    };
    Command::new(who, kind)
}

pub fn economy_fuzz() -> Result<(), String> {
    let base = builtin_preset("case-study").map_err(|e| e.to_string())?;
    let mut violations = Vec::new();
    let mut accepted = 0u64;
    for seq in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seq);
        let mut config = base.clone();
        config.interact_during_attack = seq % 2 == 0;
        if seq % 3 == 0 {
            config.money_model = MoneyModel::Individual;
        }
        let level = (seq % config.levels.len() as u64) as usize;
        let mut state = init_game(Arc::new(config), level, 0).map_err(|e| e.to_string())?;
        let start = state.wallet.total();
        let commands = rng.random_range(5..40);
        let mut times: Vec<u64> = (0..commands).map(|_| rng.random_range(0..600)).collect();
        times.sort_unstable();
        let (mut bounties, mut purchases, mut refunds) = (0u64, 0u64, 0u64);
        let mut book = |events: &[SimEvent]| {
            for e in events {
                match &e.kind {
                    EventKind::Killed { bounty, .. } => bounties += bounty,
                    EventKind::Placed { cost, .. } | EventKind::Upgraded { cost, .. } => purchases += cost,
                    EventKind::Sold { refund, .. } => refunds += refund,
                    _ => {}
                }
            }
            (bounties, purchases, refunds)
        };
        let mut next = 0;
        let mut check = |state: &GameState, (b, p, r): (u64, u64, u64)| {
            if start + b + r != state.wallet.total() + p && violations.len() < 5 {
                violations.push(format!(
                    "sequence {seq} tick {}: {start} + {b} + {r} != {} + {p}",
                    state.tick,
                    state.wallet.total()
                ));
            }
        };
        while !state.is_over() && state.tick < 3000 {
            while next < times.len() && times[next] <= state.tick {
                let cmd = random_command(&mut rng, &state);
                next += 1;
                let events = state.apply_command(&cmd).unwrap_or_default();
                accepted += u64::from(!events.is_empty());
                let totals = book(&events);
                check(&state, totals);
            }
            let events = state.step();
            let totals = book(&events);
            check(&state, totals);
            if next == times.len() && state.phase == Phase::Planning {
                for p in state.players.clone() {
                    let events =
                        state.apply_command(&Command::new(p, CommandKind::Ready { ready: true })).unwrap_or_default();
                    let totals = book(&events);
                    check(&state, totals);
                }
            }
        }
    }
    ensure(accepted > 1000, || format!("only {accepted} commands were accepted"))?;
    ensure(violations.is_empty(), || violations.join("; "))
}

fn spec(id: &str, archetype: Archetype, range: f64, damage: f64) -> TowerSpec {
    TowerSpec {
        id: id.into(),
        archetype,
        cost: 100,
        range,
        damage,
        firerate: 1.0,
        upgrade_cost: 50,
        effect: EffectParams::default(),
        display_name: String::new(),
        description: String::new(),
    }
}

/// One level on a `width x 5` board with a straight route along row 2.
fn straight_config(towers: Vec<TowerSpec>, width: u32, runner: Option<f64>) -> SessionConfig {
    let mut c = builtin_preset("case-study").expect("preset exists");
    c.rounds_per_level = 1;
    c.interact_during_attack = true;
    let ids: Vec<String> = towers.iter().map(|t| t.id.clone()).collect();
    c.towers = towers;
    c.enemies =
        vec![EnemyVariant { id: "e".into(), max_health: 1000.0, speed: runner.unwrap_or(1.0), points: 1, bounty: 1 }];
    for slot in &mut c.team {
        slot.towers = ids.clone();
    }
    let mut rows = vec![".".repeat(width as usize); 5];
    rows[2] = format!("{}B", ">".repeat(width as usize - 1));
    let spawns = runner.map_or_else(Vec::new, |_| {
        vec![SpawnScript { route: 0, entries: vec![SpawnEntry { enemy: "e".into(), at: 0.0 }] }]
    });
    let map = GridMap::from_ascii(&rows, &[vec![Cell::new(0, 2), Cell::new(width - 1, 2)]], spawns).expect("valid map");
    c.levels.truncate(1);
    let level = &mut c.levels[0];
    level.map = map;
    level.preplaced.clear();
    level.reference_layout.clear();
    level.planning_seconds = 0.0;
    level.starting_gold = 10_000;
    level.starting_health = 5;
    c
}

fn runner(speed: f64, length: u32) -> GameState {
    let c = straight_config(vec![spec("basic", Archetype::Basic, 1.0, 0.0)], length + 1, Some(speed));
    let state = init_game(c, 0, 0).expect("valid config");
    assert_eq!(state.phase, Phase::Attack);
    state
}

fn traversal(speed: f64, length: u32, slow: Option<(u64, f64, f64)>) -> u64 {
    let mut s = runner(speed, length);
    loop {
        if let Some((at, m, secs)) = slow {
            if s.attack_ticks == at {
                if let Some(e) = s.enemies.first_mut() {
                    e.apply_slow(m, secs);
                }
            }
        }
        if s.step().iter().any(|e| matches!(e.kind, EventKind::Leaked { .. })) {
            return s.attack_ticks;
        }
    }
}

fn slow_scenario(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let speed = rng.random_range(0.3..3.0);
    let length = rng.random_range(4..20);
    let at = rng.random_range(1..200);
    let m = rng.random_range(0.05..0.95);
    let secs = rng.random_range(0.05..4.0);
    let plain = traversal(speed, length, None);
    let slowed = traversal(speed, length, Some((at, m, secs)));
    ensure(slowed >= plain, || format!("slow {m} for {secs}s at {at}: {slowed} < {plain} ticks"))
}

fn fear_scenario(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let speed = rng.random_range(0.3..3.0);
    let at = rng.random_range(20..100);
    let fear_secs = rng.random_range(0.05..3.0);
    let immunity = rng.random_range(0.0..6.0);
    let mut s = runner(speed, 200);
    while s.attack_ticks < at {
        s.step();
    }
    ensure(s.enemies[0].apply_fear(1.0, fear_secs, immunity), || "fresh enemy refused fear".into())?;
    let (fear_ticks, immune_ticks) = (seconds_to_ticks(fear_secs), seconds_to_ticks(immunity));
    let mut elapsed = 0;
    loop {
        s.step();
        elapsed += 1;
        let e = &s.enemies[0];
        if e.is_feared() {
            ensure(e.progress - e.prev_progress <= 0.0, || format!("feared enemy advanced at tick {elapsed}"))?;
        }
        let mut probe = e.clone();
        let landed = probe.apply_fear(1.0, fear_secs, immunity);
        if elapsed < fear_ticks + immune_ticks {
            ensure(!landed, || format!("re-feared {elapsed} ticks in, immunity {immunity}s"))?;
        } else {
            return ensure(landed, || "fear never landed again".into());
        }
    }
}

fn support_scenario(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut sup = spec("support", Archetype::Support, 2.5, 0.0);
    sup.effect.support_buff = rng.random_range(0.05..0.8);
    let cfg = straight_config(vec![spec("basic", Archetype::Basic, 3.0, 10.0), sup], 12, None);
    let mut towers: Vec<TowerInstance> = Vec::new();
    for i in 0..rng.random_range(1..10) {
        let cell = Cell::new(rng.random_range(0..12), [0, 1, 3, 4][rng.random_range(0..4)]);
        if towers.iter().any(|t| t.cell == cell) {
            continue;
        }
        let kind = if rng.random_bool(0.5) { "support" } else { "basic" };
        let mut t = TowerInstance::new(TowerId(i), kind, Some(PlayerId(0)), cell);
        t.levels = [rng.random_range(0..4), rng.random_range(0..4), rng.random_range(0..4)];
        towers.push(t);
    }
    let bare: Vec<TowerInstance> = towers.iter().filter(|t| t.spec != "support").cloned().collect();
    for t in &bare {
        let (with, without) = (tower_stats(&cfg, &towers, t), tower_stats(&cfg, &bare, t));
        ensure(
            with.range >= without.range && with.damage >= without.damage && with.firerate >= without.firerate,
            || format!("support lowered {t:?}: {with:?} < {without:?}"),
        )?;
        let k = support_buff(&cfg, &towers, t);
        ensure(k == 0.0 || (k - cfg.towers[1].effect.support_buff).abs() < 1e-12, || format!("buffs stacked to {k}"))?;
    }
    Ok(())
}

fn discount_scenario(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut specs = vec![spec("basic", Archetype::Basic, 3.0, 10.0)];
    for i in 0..3 {
        let mut d = spec(&format!("d{i}"), Archetype::Discount, rng.random_range(1.5..5.0), 0.0);
        d.effect.discount_multiplier = rng.random_range(0.3..1.0);
        specs.push(d);
    }
    specs[0].upgrade_cost = rng.random_range(10..500);
    let cfg = straight_config(specs, 12, None);
    let track = UpgradeTrack::ALL[rng.random_range(0..3)];
    let mut target = TowerInstance::new(TowerId(0), "basic", Some(PlayerId(0)), Cell::new(6, 1));
    target.levels[track.index()] = rng.random_range(0..3);
    let mut towers = vec![target.clone()];
    for i in 0..rng.random_range(1..8) {
        let cell = Cell::new(rng.random_range(0..12), [0, 1, 3, 4][rng.random_range(0..4)]);
        if towers.iter().all(|t| t.cell != cell) {
            towers.push(TowerInstance::new(
                TowerId(i + 1),
                format!("d{}", rng.random_range(0..3)),
                Some(PlayerId(0)),
                cell,
            ));
        }
    }
    let cost = |board: &[TowerInstance]| upgrade_cost(&cfg, board, &target, track).map_err(|e| e.to_string());
    let full = cost(&towers)?;
    let undiscounted = cost(&towers[..1])?;
    ensure(full <= undiscounted, || format!("discount raised the cost: {full} > {undiscounted}"))?;
    let mut best = undiscounted;
    for other in &towers[1..] {
        best = best.min(cost(&[target.clone(), other.clone()])?);
    }
    ensure(full == best, || format!("discounts stacked: {full} vs best single {best}"))
}

type Check = fn(&mut ChaCha8Rng) -> Result<(), String>;

pub fn effects() -> Result<(), String> {
    let checks: [(&str, Check); 4] = [
        ("SLOW", slow_scenario),
        ("FEAR", fear_scenario),
        ("SUPPORT", support_scenario),
        ("DISCOUNT", discount_scenario),
    ];
    let mut failures = Vec::new();
    for (i, (name, check)) in checks.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7919 + i as u64);
        let bad: Vec<String> = (0..200).filter_map(|_| check(&mut rng).err()).collect();
        if let Some(first) = bad.first() {
            failures.push(format!("{name}: {} violations, first {first}", bad.len()));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))
}
