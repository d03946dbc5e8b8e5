use proptest::prelude::*;
use taskforge_core::config::{builtin_preset, SellPolicy, PRESET_NAMES};
use taskforge_core::*;

/// A map whose single route runs west to east with one optional jog.
fn random_map(w: u32, h: u32, r1: u32, r2: u32, jog: u32, blocked: &[(u32, u32)], spawns: Vec<SpawnScript>) -> GridMap {
    let (r1, r2, jog) = (r1 % h, r2 % h, 1 + jog % (w - 2));
    let corners = if r1 == r2 {
        vec![Cell::new(0, r1), Cell::new(w - 1, r1)]
    } else {
        vec![Cell::new(0, r1), Cell::new(jog, r1), Cell::new(jog, r2), Cell::new(w - 1, r2)]
    };
    let route = PathRoute::from_corners(&corners);
    let mut rows: Vec<Vec<char>> = vec![vec!['.'; w as usize]; h as usize];
    for &(x, y) in blocked {
        rows[(y % h) as usize][(x % w) as usize] = '#';
    }
    for c in &route.waypoints {
        rows[c.y as usize][c.x as usize] = '>';
    }
    rows[r2 as usize][w as usize - 1] = 'B';
    let rows: Vec<String> = rows.into_iter().map(|r| r.into_iter().collect()).collect();
    GridMap::from_ascii(&rows, &[corners], spawns).unwrap()
}

prop_compose! {
    fn arb_config()(
        preset in 0..PRESET_NAMES.len(),
        name in "[a-zA-Z0-9 _-]{0,12}",
        (w, h) in (6u32..17, 5u32..13),
        (r1, r2, jog) in (0u32..13, 0u32..13, 0u32..16),
        blocked in prop::collection::vec((0u32..17, 0u32..13), 0..8),
        entries in prop::collection::vec((0usize..4, 0.0f64..60.0), 0..12),
        gold in 0u64..50_000,
        health in 1u32..200,
        planning in prop_oneof![Just(0.0), 1.0f64..400.0],
        stats in prop::collection::vec((0.5f64..9.0, 0.0f64..40.0, 0.05f64..3.0, 1u64..1000), 12),
        speeds in prop::collection::vec((1.0f64..400.0, 0.1f64..3.0), 4),
        flags in (any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>()),
        refund in (0.0f64..=1.0, 0.0f64..=1.0),
        rounds in 1u32..5,
    ) -> SessionConfig {
        let mut c = builtin_preset(PRESET_NAMES[preset]).unwrap();
        c.name = name;
        c.rounds_per_level = rounds;
        c.interact_during_attack = flags.0;
        c.comm.voice = flags.1;
        c.comm.push_to_talk = flags.1 && flags.2;
        c.visibility.tower_names = flags.3;
        c.sell_policy = if flags.4 { SellPolicy::OwnerOnly } else { SellPolicy::Anyone };
        c.refund.planning = refund.0;
        c.refund.attack = refund.1;
        for (t, &(range, damage, firerate, cost)) in c.towers.iter_mut().zip(&stats) {
            t.range = range;
            t.damage = damage;
            t.firerate = firerate;
            t.cost = cost;
        }
        for (e, &(hp, speed)) in c.enemies.iter_mut().zip(&speeds) {
            e.max_health = hp;
            e.speed = speed;
        }
        let mut entries: Vec<SpawnEntry> = entries
            .into_iter()
            .map(|(i, at)| SpawnEntry { enemy: c.enemies[i % c.enemies.len()].id.clone(), at })
            .collect();
        entries.sort_by(|a, b| a.at.total_cmp(&b.at));
        let level = &mut c.levels[0];
        level.starting_gold = gold;
        level.starting_health = health;
        level.planning_seconds = planning;
        // Object modes keep their authored boards; tower defense gets a fresh one.
        if c.mode == Mode::TowerDefense {
            let blocked: Vec<(u32, u32)> = blocked.into_iter().filter(|&(x, _)| x % w != 0 && x % w != w - 1).collect();
            level.map = random_map(w, h, r1, r2, jog, &blocked, vec![SpawnScript { route: 0, entries }]);
            level.preplaced.clear();
        }
        c
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn serialized_configs_parse_back_identically(c in arb_config()) {
        let text = serialize_config(&c);
        let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e:?}\n{text}")))?;
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(serialize_config(&back), text);
    }

    #[test]
    fn valid_configs_start_every_round(c in arb_config()) {
        if validate_config(&c).is_ok() {
            for level in 0..c.levels.len() {
                for round in 0..c.rounds_per_level as usize {
                    let mut s = init_game(c.clone(), level, round).unwrap();
                    for _ in 0..400 {
                        s.step();
                    }
                }
            }
        }
    }

    #[test]
    fn bad_tower_references_are_rejected(c in arb_config(), slot in 0usize..4) {
        let mut c = c;
        let slot = slot % c.team.len();
        c.team[slot].towers.push("no-such-tower".into());
        let errs = validate_config(&c).unwrap_err();
        prop_assert!(errs.iter().any(|e| e.code == ValidationCode::UnknownTowerRef));
    }

    #[test]
    fn broken_routes_are_rejected(c in arb_config()) {
        let mut c = c;
        let route = &mut c.levels[0].map.routes[0].waypoints;
        let last = *route.last().unwrap();
        route.push(Cell::new(last.x + 2, last.y));
        let errs = validate_config(&c).unwrap_err();
        prop_assert!(errs.iter().any(|e| e.code == ValidationCode::RouteNotAdjacent));
    }
}

#[test]
fn every_preset_round_trips() {
    for name in PRESET_NAMES {
        let c = builtin_preset(name).unwrap();
        assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c, "{name}");
        validate_config(&c).unwrap();
    }
}
