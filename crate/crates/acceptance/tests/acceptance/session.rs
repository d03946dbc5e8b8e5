use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use taskforge_acceptance::report::ensure;
use taskforge_acceptance::schedule::{bot_schedule, Scheduled};
use taskforge_analysis::{expenditure_series, placement_heatmap};
use taskforge_core::{builtin_preset, checklist_report, Cell, CommandKind, MoneyModel, Phase, SessionConfig, TileKind};
use taskforge_server::bot::{create_room, BotClient};
use taskforge_server::wire::{ErrorPayload, GameDelta, IntentPayload, MsgType, Role, RoundResult, WireMessage};
use taskforge_server::{read_intent_log, replay, AppState, Effects, OpenAuth, Room, RoomOptions, ServerOptions};
use taskforge_telemetry::{parse_log, serialize_record, HttpTransport, LogRecord, SinkConfig};

fn now() -> DateTime<Utc> {
    DateTime::from_timestamp(1_700_000_000, 0).expect("valid timestamp")
}

pub struct Session {
    pub log: Vec<LogRecord>,
    /// Wallet total when each round ended, keyed by (level, round).
    pub final_money: BTreeMap<(usize, usize), u64>,
}

fn random_intent(
    rng: &mut ChaCha8Rng,
    config: &SessionConfig,
    level: usize,
    slot: usize,
) -> (MsgType, serde_json::Value) {
    let map = &config.levels[level].map;
    let buildable: Vec<Cell> = map.cells().filter(|c| map.tile(*c) == Some(TileKind::Buildable)).collect();
    let cell = buildable[rng.random_range(0..buildable.len())];
    let cell = json!([cell.x, cell.y]);
    match rng.random_range(0..10) {
        0..=4 => {
            let towers = &config.team[slot].towers;
            (MsgType::Place, json!({"cell": cell, "tower_type": towers[rng.random_range(0..towers.len())]}))
        }
        5..=7 => {
            let track = ["RANGE", "DAMAGE", "FIRERATE"][rng.random_range(0..3)];
            (MsgType::Upgrade, json!({"cell": cell, "track": track}))
        }
        _ => (MsgType::Sell, json!({"cell": cell})),
    }
}

/// A whole session through a room with random edits from every player.
pub fn generate(config: SessionConfig, seed: u64) -> Session {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fx = Effects::default();
    let opts = RoomOptions { intermission_ticks: 1, seed, ..RoomOptions::default() };
    let mut room = Room::new("GEN001", Arc::new(config.clone()), opts, now(), &mut fx);
    let ids: Vec<u32> = (0..config.team.len())
        .map(|i| room.connect(&format!("p{i}"), Role::Player, None, None, now(), &mut fx).expect("free slot"))
        .collect();
    let mut seq = 1;
    let mut send = |room: &mut Room, fx: &mut Effects, id: u32, kind: MsgType, payload: serde_json::Value| {
        seq += 1;
        room.handle(id, &WireMessage::new(seq, kind, "GEN001", payload), now(), fx);
    };
    send(&mut room, &mut fx, ids[0], MsgType::Start, json!({}));
    let mut final_money = BTreeMap::new();
    let mut steps = 0u64;
    while !room.is_finished() {
        let game = room.game().expect("session started");
        let (level, round, phase, tick) = (game.level, game.round, game.phase, game.tick);
        if game.is_over() {
            final_money.entry((level, round)).or_insert(game.wallet.total());
        } else if phase == Phase::Planning || (phase == Phase::Attack && tick % 40 == 0) {
            for (slot, id) in ids.iter().enumerate() {
                if rng.random_bool(0.3) {
                    let (kind, payload) = random_intent(&mut rng, &config, level, slot);
                    send(&mut room, &mut fx, *id, kind, payload);
                }
            }
            if phase == Phase::Planning && tick >= 60 {
                for id in &ids {
                    send(&mut room, &mut fx, *id, MsgType::Ready, json!({}));
                }
            }
        }
        room.advance(now(), &mut fx);
        steps += 1;
        assert!(steps < 500_000, "session did not finish");
    }
    if let Some(game) = room.game() {
        final_money.entry((game.level, game.round)).or_insert(game.wallet.total());
    }
    Session { log: fx.log, final_money }
}

fn intent(s: &Scheduled) -> (MsgType, IntentPayload) {
    let mut p = IntentPayload::default();
    let kind = match &s.command.kind {
        CommandKind::Place { tower, cell, orientation } => {
            p.cell = Some(*cell);
            p.tower_type = Some(tower.clone());
            p.orientation = Some(*orientation);
            MsgType::Place
        }
        CommandKind::Upgrade { cell, track } => {
            p.cell = Some(*cell);
            p.track = Some(*track);
            MsgType::Upgrade
        }
        CommandKind::Sell { cell } => {
            p.cell = Some(*cell);
            MsgType::Sell
        }
        CommandKind::Ready { ready } => {
            p.ready = Some(*ready);
            MsgType::Ready
        }
        CommandKind::Select { tower } => {
            p.tower_id = Some(tower.0);
            MsgType::Select
        }
    };
    (kind, p)
}

pub fn shape() -> Result<(), String> {
    let config = builtin_preset("case-study").map_err(|e| e.to_string())?;
    let schedule = bot_schedule(&config);
    let mut fx = Effects::default();
    let mut room = Room::new(
        "SHAPE1",
        Arc::new(config.clone()),
        RoomOptions { intermission_ticks: 0, ..RoomOptions::default() },
        now(),
        &mut fx,
    );
    let ids: Vec<u32> = ["tjwill", "ManedWlf", "schou01", "TommyVCT"]
        .iter()
        .map(|n| room.connect(n, Role::Player, None, None, now(), &mut fx).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut seq = 1;
    let mut send = |room: &mut Room, fx: &mut Effects, id: u32, kind: MsgType, payload: &IntentPayload| {
        seq += 1;
        let body = serde_json::to_value(payload).expect("payload serializes");
        room.handle(id, &WireMessage::new(seq, kind, "SHAPE1", body), now(), fx);
        seq
    };
    send(&mut room, &mut fx, ids[0], MsgType::Start, &IntentPayload::default());
    let mut probes = Vec::new();
    let mut steps = 0;
    while !room.is_finished() {
        let game = room.game().ok_or("session did not start")?;
        let (level, round, tick, phase, attack_ticks) =
            (game.level, game.round, game.tick, game.phase, game.attack_ticks);
        for s in schedule.iter().filter(|s| (s.level, s.round, s.tick) == (level, round, tick)) {
            if phase == Phase::Planning {
                let (kind, payload) = intent(s);
                send(&mut room, &mut fx, ids[usize::from(s.command.issuer.0)], kind, &payload);
            }
        }
        if phase == Phase::Attack && attack_ticks == 5 {
            let probe = IntentPayload {
                cell: Some(Cell::new(0, 0)),
                tower_type: Some(config.team[0].towers[0].clone()),
                ..IntentPayload::default()
            };
            probes.push(send(&mut room, &mut fx, ids[0], MsgType::Place, &probe));
        }
        room.advance(now(), &mut fx);
        steps += 1;
        ensure(steps < 500_000, || "session did not finish".into())?;
    }
    let results: Vec<RoundResult> = fx
        .messages_for(ids[0])
        .filter(|m| m.kind == MsgType::RoundResult)
        .map(|m| m.payload_as::<RoundResult>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let order: Vec<(usize, usize)> = results.iter().map(|r| (r.level, r.round)).collect();
    let expected: Vec<(usize, usize)> = (0..3).flat_map(|l| (0..3).map(move |r| (l, r))).collect();
    ensure(order == expected, || format!("round results {order:?}"))?;

    let spawn_points: Vec<usize> = config.levels.iter().map(|l| l.map.spawns.len()).collect();
    ensure(spawn_points.windows(2).all(|w| w[0] < w[1]), || format!("spawn points per level {spawn_points:?}"))?;

    let codes: Vec<String> = fx
        .messages_for(ids[0])
        .filter(|m| m.kind == MsgType::Error)
        .filter_map(|m| m.payload_as::<ErrorPayload>().ok())
        .filter(|e| e.intent_seq.is_some_and(|s| probes.contains(&s)))
        .map(|e| e.code)
        .collect();
    ensure(probes.len() == 9 && codes == vec!["phase_violation"; 9], || {
        format!("attack edits answered with {codes:?}")
    })?;

    let q10 = checklist_report(&config).q10;
    ensure(q10 == "text", || format!("q10 is {q10:?}"))
}

async fn spawn_server(dir: &Path, config: SessionConfig, speed: f64) -> (String, String) {
    let opts = ServerOptions {
        config: Arc::new(config),
        room: RoomOptions { intermission_ticks: 0, ..RoomOptions::default() },
        speed,
        log_dir: dir.join("logs"),
        sink: SinkConfig::default(),
        transport: Arc::new(HttpTransport::new()),
        persist: Some(dir.join("persist")),
        static_dir: None,
        auth: Arc::new(OpenAuth),
        idle_timeout: Duration::from_secs(60),
    };
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.expect("bind");
    let addr = listener.local_addr().expect("address");
    tokio::spawn(taskforge_server::serve(listener, AppState::new(opts)));
    (format!("http://{addr}"), format!("ws://{addr}/ws"))
}

const WAIT: Duration = Duration::from_secs(30);

async fn full_team(base: &str, ws: &str) -> Result<(String, Vec<BotClient>), String> {
    let created = create_room(base, "tjwill", Role::Player).await.map_err(|e| e.to_string())?;
    let key = created.room_key.clone();
    let (host, _) =
        BotClient::join(ws, &key, "tjwill", Role::Player, Some(&created.token)).await.map_err(|e| e.to_string())?;
    let mut bots = vec![host];
    for name in ["ManedWlf", "schou01", "TommyVCT"] {
        bots.push(BotClient::join(ws, &key, name, Role::Player, None).await.map_err(|e| e.to_string())?.0);
    }
    bots[0].send(MsgType::Start, IntentPayload::default()).await.map_err(|e| e.to_string())?;
    for bot in &mut bots {
        bot.recv_until(WAIT, |m| m.kind == MsgType::GameSnapshot).await.map_err(|e| e.to_string())?;
    }
    Ok((key, bots))
}

fn place(cell: Cell, tower: &str) -> IntentPayload {
    IntentPayload { cell: Some(cell), tower_type: Some(tower.to_string()), ..Default::default() }
}

async fn scripted_round() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = builtin_preset("case-study").map_err(|e| e.to_string())?;
    let (base, ws) = spawn_server(dir.path(), config.clone(), 400.0).await;
    let (key, mut bots) = full_team(&base, &ws).await?;
    for (i, bot) in bots.iter_mut().enumerate() {
        let tower = config.team[i].towers[0].clone();
        bot.send(MsgType::Place, place(Cell::new(2 + 3 * i as u32, 1), &tower)).await.map_err(|e| e.to_string())?;
        bot.send(MsgType::Ready, IntentPayload::default()).await.map_err(|e| e.to_string())?;
    }
    let mut results = Vec::new();
    for bot in &mut bots {
        let msg = bot.recv_until(WAIT, |m| m.kind == MsgType::RoundResult).await.map_err(|e| e.to_string())?;
        results.push(msg.payload_as::<RoundResult>().map_err(|e| e.to_string())?);
    }
    ensure(results.windows(2).all(|w| w[0].digest == w[1].digest), || "clients saw different digests".into())?;
    let entries =
        read_intent_log(&dir.path().join("persist").join(format!("{key}.intents.jsonl"))).map_err(|e| e.to_string())?;
    let replayed = replay(Arc::new(config), &entries).map_err(|e| e.to_string())?;
    let first = replayed.first().ok_or("intent log replayed no rounds")?;
    ensure(first.digest == results[0].digest, || {
        format!("replay {} vs broadcast {}", first.digest, results[0].digest)
    })?;
    for bot in bots {
        bot.close().await.map_err(|e| e.to_string())?;
    }
    Ok(())
}

async fn placement_race() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = builtin_preset("case-study").map_err(|e| e.to_string())?;
    let (base, ws) = spawn_server(dir.path(), config.clone(), 1.0).await;
    let (_, mut bots) = full_team(&base, &ws).await?;
    let (a, rest) = bots.split_first_mut().ok_or("no bots")?;
    let b = &mut rest[0];
    let (ta, tb) = (&config.team[0].towers[0], &config.team[1].towers[0]);
    let (sa, sb) = tokio::join!(a.send(MsgType::Place, place(Cell::new(6, 6), ta)), async {
        b.send(MsgType::Place, place(Cell::new(6, 6), tb)).await
    });
    let (sa, sb) = (sa.map_err(|e| e.to_string())?, sb.map_err(|e| e.to_string())?);

    async fn accepted(bot: &mut BotClient, seq: u64) -> Result<bool, String> {
        let me = bot.member;
        let msg = bot
            .recv_until(WAIT, |m| match m.kind {
                MsgType::Error => m.payload_as::<ErrorPayload>().is_ok_and(|e| e.intent_seq == Some(seq)),
                MsgType::GameDelta => m
                    .payload_as::<GameDelta>()
                    .is_ok_and(|d| d.ack.is_some_and(|ack| ack.member == me && ack.intent_seq == seq)),
                _ => false,
            })
            .await
            .map_err(|e| e.to_string())?;
        Ok(msg.kind == MsgType::GameDelta)
    }
    let (won_a, won_b) = (accepted(a, sa).await?, accepted(b, sb).await?);
    ensure(won_a ^ won_b, || format!("first {won_a}, second {won_b}"))
}

pub fn protocol() -> Result<(), String> {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(4)
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    rt.block_on(async {
        scripted_round().await.map_err(|e| format!("round: {e}"))?;
        placement_race().await.map_err(|e| format!("race: {e}"))
    })
}

pub fn analysis_replay() -> Result<(), String> {
    let case_study = builtin_preset("case-study").map_err(|e| e.to_string())?;
    let mut live = case_study.clone();
    live.interact_during_attack = true;
    let mut split = live.clone();
    split.money_model = MoneyModel::Individual;
    let mut short = case_study.clone();
    short.levels.truncate(1);
    let configs = [case_study.clone(), live, split, short, case_study];
    for (i, config) in configs.into_iter().enumerate() {
        let session = generate(config.clone(), 1000 + i as u64);
        let text: String = session.log.iter().map(|r| serialize_record(r) + "\n").collect();
        let parsed = parse_log(&text);
        ensure(parsed.errors.is_empty(), || format!("session {i}: {:?}", parsed.errors))?;
        let report = expenditure_series(&parsed.records, &config);
        ensure(report.issues.is_empty(), || format!("session {i}: {:?}", report.issues))?;
        ensure(report.rounds.len() == config.total_rounds(), || {
            format!("session {i}: {} rounds", report.rounds.len())
        })?;
        for r in &report.rounds {
            let sim = session.final_money.get(&(r.level, r.round)).copied();
            ensure(sim.is_some_and(|m| m as i64 == r.unspent), || {
                format!("session {i} level {} round {}: analysis {} vs simulation {sim:?}", r.level, r.round, r.unspent)
            })?;
        }
        let buys = text.lines().filter(|l| l.contains("<action>BUY</action>")).count() as u64;
        let w = config.levels.iter().map(|l| l.map.width).max().unwrap_or(0);
        let h = config.levels.iter().map(|l| l.map.height).max().unwrap_or(0);
        let heat = placement_heatmap(&parsed.records, w, h);
        ensure(heat.heatmap.total() == buys, || {
            format!("session {i}: heatmap mass {} vs {buys} BUY lines", heat.heatmap.total())
        })?;
    }
    Ok(())
}
