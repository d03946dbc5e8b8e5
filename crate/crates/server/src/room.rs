//! The synchronous room core. A room owns one session: its members, the
//! current round's [`GameState`], and the per-member message sequence.
//! Every entry point appends what it produced to an [`Effects`] value; the
//! caller routes messages, writes logs and persists intents.

use std::sync::Arc;

use chrono::{DateTime, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use taskforge_core::sim::{compute_score, events_digest, state_digest, ScoreBreakdown, TICK_RATE};
use taskforge_core::{
    init_game_with_players, Command, CommandKind, EventKind, GameState, Orientation, Phase, PlayerId, SessionConfig,
    SimEvent, TowerId,
};
use taskforge_telemetry::{chat_records, Action, LogRecord};

use crate::leaderboard::{topk, LeaderboardEntry};
use crate::names::{session_token, suggest_team_name};
use crate::persist::IntentLogEntry;
use crate::wire::*;

/// Delta broadcast period during the attack phase, in ticks (10 Hz).
pub const DELTA_PERIOD: u64 = 2;
/// Full snapshot period during the attack phase, in ticks (5 s).
pub const SNAPSHOT_PERIOD: u64 = 100;
pub const MAX_TEAM_NAME: usize = 40;

#[derive(Clone, Debug)]
pub struct RoomOptions {
    /// Pause between rounds, in ticks.
    pub intermission_ticks: u64,
    /// Freeze the planning timer while no player is connected.
    pub pause_planning_when_empty: bool,
    /// Seeds the team-name suggestion.
    pub seed: u64,
    pub leaderboard_k: usize,
}

impl Default for RoomOptions {
    fn default() -> Self {
        Self {
            intermission_ticks: 10 * u64::from(TICK_RATE),
            pause_planning_when_empty: false,
            seed: 0,
            leaderboard_k: 10,
        }
    }
}

pub type MemberId = u32;

/// Output of one room call.
#[derive(Debug, Default)]
pub struct Effects {
    pub out: Vec<(MemberId, WireMessage)>,
    pub log: Vec<LogRecord>,
    pub intents: Vec<IntentLogEntry>,
    pub leaderboard: Vec<LeaderboardEntry>,
}

impl Effects {
    pub fn messages_for(&self, member: MemberId) -> impl Iterator<Item = &WireMessage> {
        self.out.iter().filter(move |(m, _)| *m == member).map(|(_, msg)| msg)
    }
}

#[derive(Clone, Debug)]
pub struct Member {
    pub id: MemberId,
    pub name: String,
    pub role: Role,
    pub slot: Option<PlayerId>,
    pub token: String,
    pub connected: bool,
    next_seq: u64,
}

/// A refused join.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct JoinError {
    pub code: &'static str,
    pub message: String,
}

fn join_error(code: &'static str, message: &str) -> JoinError {
    JoinError { code, message: message.to_string() }
}

pub struct Room {
    key: String,
    config: Arc<SessionConfig>,
    options: RoomOptions,
    team_name: String,
    phase: SessionPhase,
    members: Vec<Member>,
    level: usize,
    round: usize,
    game: Option<GameState>,
    /// Simulation events not yet broadcast.
    pending: Vec<SimEvent>,
    round_events: Vec<SimEvent>,
    intermission_left: u64,
    leaderboard: Vec<LeaderboardEntry>,
    results: Vec<RoundResult>,
}

impl Room {
    pub fn new(
        key: impl Into<String>,
        config: Arc<SessionConfig>,
        options: RoomOptions,
        now: DateTime<Utc>,
        fx: &mut Effects,
    ) -> Self {
        let team_name = suggest_team_name(&mut ChaCha8Rng::seed_from_u64(options.seed));
        let room = Room {
            key: key.into(),
            config,
            options,
            team_name,
            phase: SessionPhase::Lobby,
            members: Vec::new(),
            level: 0,
            round: 0,
            game: None,
            pending: Vec::new(),
            round_events: Vec::new(),
            intermission_left: 0,
            leaderboard: Vec::new(),
            results: Vec::new(),
        };
        fx.log.push(LogRecord::system(
            Some(now),
            "SESSION_START",
            [
                ("room", room.key.clone()),
                ("config", room.config.name.clone()),
                ("seed", room.options.seed.to_string()),
                ("team_name", room.team_name.clone()),
                ("mode", format!("{:?}", room.config.mode)),
            ],
        ));
        room
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn config(&self) -> &Arc<SessionConfig> {
        &self.config
    }

    pub fn team_name(&self) -> &str {
        &self.team_name
    }

    pub fn phase(&self) -> &SessionPhase {
        &self.phase
    }

    pub fn game(&self) -> Option<&GameState> {
        self.game.as_ref()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn member(&self, id: MemberId) -> Option<&Member> {
        self.members.get(id as usize)
    }

    pub fn results(&self) -> &[RoundResult] {
        &self.results
    }

    pub fn leaderboard(&self) -> &[LeaderboardEntry] {
        &self.leaderboard
    }

    pub fn connected_count(&self) -> usize {
        self.members.iter().filter(|m| m.connected).count()
    }

    pub fn is_finished(&self) -> bool {
        self.phase == SessionPhase::Finished
    }

    /// Registers a member without connecting it, e.g. the host of a room
    /// created over HTTP. Returns the member id and its token.
    pub fn reserve(
        &mut self,
        name: &str,
        role: Role,
        now: DateTime<Utc>,
        fx: &mut Effects,
    ) -> Result<(MemberId, String), JoinError> {
        let slot = match role {
            Role::Player => {
                if self.phase != SessionPhase::Lobby {
                    return Err(join_error("in_progress", "players can only join in the lobby"));
                }
                let taken: Vec<PlayerId> = self.members.iter().filter_map(|m| m.slot).collect();
                let free = (0..self.config.slot_count() as u8).map(PlayerId).find(|p| !taken.contains(p));
                Some(free.ok_or_else(|| join_error("room_full", "room full"))?)
            }
            Role::Observer => None,
        };
        if name.trim().is_empty() {
            return Err(join_error("name_empty", "display name is empty"));
        }
        let id = self.members.len() as MemberId;
        let token = session_token();
        self.members.push(Member {
            id,
            name: name.to_string(),
            role,
            slot,
            token: token.clone(),
            connected: false,
            next_seq: 1,
        });
        let mut detail = vec![("member", id.to_string()), ("name", name.to_string()), ("role", format!("{role:?}"))];
        if let Some(s) = slot {
            detail.push(("slot", s.0.to_string()));
        }
        fx.log.push(LogRecord::system(Some(now), "JOIN", detail));
        Ok((id, token))
    }

    /// Connects a member: by token when given, otherwise as a new member.
    /// The member receives its LOBBY_STATE and, once a game exists, a snapshot.
    pub fn connect(
        &mut self,
        name: &str,
        role: Role,
        token: Option<&str>,
        intent_seq: Option<u64>,
        now: DateTime<Utc>,
        fx: &mut Effects,
    ) -> Result<MemberId, JoinError> {
        let id = match token {
            Some(t) => self
                .members
                .iter()
                .find(|m| m.token == t)
                .map(|m| m.id)
                .ok_or_else(|| join_error("bad_token", "unknown session token"))?,
            None => self.reserve(name, role, now, fx)?.0,
        };
        self.members[id as usize].connected = true;
        fx.log.push(LogRecord::system(Some(now), "CONNECT", [("member", id.to_string())]));
        let m = &self.members[id as usize];
        let you = You {
            member: id,
            role: m.role,
            slot: m.slot.map(|s| s.0),
            color: self.color(m.slot),
            token: m.token.clone(),
        };
        let mut lobby = self.lobby_state(None);
        lobby.you = Some(you);
        lobby.intent_seq = intent_seq;
        self.send(fx, id, MsgType::LobbyState, &lobby);
        let others: Vec<MemberId> = self.connected().filter(|m| *m != id).collect();
        let public = self.lobby_state(None);
        for o in others {
            self.send(fx, o, MsgType::LobbyState, &public);
        }
        if self.game.is_some() {
            let snap = self.snapshot(None);
            self.send(fx, id, MsgType::GameSnapshot, &snap);
        }
        Ok(id)
    }

    pub fn disconnect(&mut self, id: MemberId, now: DateTime<Utc>, fx: &mut Effects) {
        let Some(m) = self.members.get_mut(id as usize) else { return };
        if !m.connected {
            return;
        }
        m.connected = false;
        fx.log.push(LogRecord::system(Some(now), "DISCONNECT", [("member", id.to_string())]));
        let public = self.lobby_state(None);
        self.broadcast(fx, MsgType::LobbyState, &public);
    }

    /// Handles one inbound message from a connected member.
    pub fn handle(&mut self, id: MemberId, msg: &WireMessage, now: DateTime<Utc>, fx: &mut Effects) {
        if self.member(id).is_none() {
            return;
        }
        let seq = msg.seq;
        let payload: IntentPayload = match msg.payload_as() {
            Ok(p) => p,
            Err(e) => return self.error(fx, id, Some(seq), "bad_intent", &format!("bad payload: {e}")),
        };
        match msg.kind {
            MsgType::Ping => self.send(fx, id, MsgType::Pong, &Pong { intent_seq: seq }),
            MsgType::Join => self.error(fx, id, Some(seq), "already_joined", "already joined"),
            MsgType::Chat => self.chat(id, seq, payload, now, fx),
            MsgType::SetTeamName => self.set_team_name(id, seq, payload, now, fx),
            MsgType::Start => self.start(id, seq, now, fx),
            MsgType::Place | MsgType::Sell | MsgType::Upgrade | MsgType::Ready | MsgType::Select => {
                self.game_intent(id, seq, msg.kind, payload, now, fx)
            }
            other => self.error(fx, id, Some(seq), "bad_intent", &format!("{other:?} is not an intent")),
        }
    }

    /// Reports an undecodable frame to its sender.
    pub fn malformed(&mut self, id: MemberId, detail: &str, fx: &mut Effects) {
        self.error(fx, id, None, "malformed", detail);
    }

    /// One step of the room clock.
    pub fn advance(&mut self, now: DateTime<Utc>, fx: &mut Effects) {
        match self.phase {
            SessionPhase::InGame => self.advance_game(now, fx),
            SessionPhase::BetweenRounds => {
                self.intermission_left = self.intermission_left.saturating_sub(1);
                if self.intermission_left == 0 {
                    self.start_round(now, fx);
                }
            }
            SessionPhase::Lobby | SessionPhase::Finished => {}
        }
    }

    fn advance_game(&mut self, now: DateTime<Utc>, fx: &mut Effects) {
        let Some(game) = self.game.as_mut() else { return };
        let any_player = self.members.iter().any(|m| m.connected && m.slot.is_some());
        if game.phase == Phase::Planning && self.options.pause_planning_when_empty && !any_player {
            return;
        }
        let before = game.phase;
        let events = game.step();
        let (phase, tick, attack_ticks, planning_ticks, timed) =
            (game.phase, game.tick, game.attack_ticks, game.planning_ticks, game.planning_timed);
        self.record_events(&events, now, fx);
        self.round_events.extend(events.iter().cloned());
        self.pending.extend(events);
        match phase {
            Phase::Ended => self.finish_round(now, fx),
            _ if phase != before => self.flush(fx, None),
            Phase::Planning => {
                if timed && planning_ticks % u64::from(TICK_RATE) == 0 {
                    self.flush(fx, None);
                }
            }
            Phase::Attack => {
                if tick % DELTA_PERIOD == 0 {
                    self.flush(fx, None);
                }
                if attack_ticks % SNAPSHOT_PERIOD == 0 {
                    let snap = self.snapshot(None);
                    self.broadcast(fx, MsgType::GameSnapshot, &snap);
                }
            }
        }
    }

    fn start(&mut self, id: MemberId, seq: u64, now: DateTime<Utc>, fx: &mut Effects) {
        if id != 0 {
            return self.error(fx, id, Some(seq), "not_host", "only the host can start the session");
        }
        if self.phase != SessionPhase::Lobby {
            return self.error(fx, id, Some(seq), "already_started", "session already started");
        }
        if !self.members.iter().any(|m| m.slot.is_some()) {
            return self.error(fx, id, Some(seq), "no_players", "no players have joined");
        }
        self.start_round(now, fx);
        let mut lobby = self.lobby_state(None);
        lobby.intent_seq = Some(seq);
        self.send(fx, id, MsgType::LobbyState, &lobby);
    }

    fn players(&self) -> Vec<PlayerId> {
        let mut p: Vec<PlayerId> = self.members.iter().filter_map(|m| m.slot).collect();
        p.sort();
        p
    }

    fn start_round(&mut self, now: DateTime<Utc>, fx: &mut Effects) {
        let players = self.players();
        let game = match init_game_with_players(self.config.clone(), self.level, self.round, &players) {
            Ok(g) => g,
            Err(e) => {
                tracing::error!(room = %self.key, error = %e, "cannot start round");
                self.phase = SessionPhase::Finished;
                return;
            }
        };
        fx.intents.push(IntentLogEntry::RoundStart { level: self.level, round: self.round, players: players.clone() });
        fx.log.push(LogRecord::system(
            Some(now),
            "ROUND_START",
            [
                ("level", self.level.to_string()),
                ("round", self.round.to_string()),
                ("gold", game.starting_gold.to_string()),
                ("health", game.health.to_string()),
                ("phase", game.phase.as_str().to_string()),
                ("players", players.iter().map(|p| p.0.to_string()).collect::<Vec<_>>().join(",")),
            ],
        ));
        self.game = Some(game);
        self.pending.clear();
        self.round_events.clear();
        self.phase = SessionPhase::InGame;
        let snap = self.snapshot(None);
        self.broadcast(fx, MsgType::GameSnapshot, &snap);
    }

    fn finish_round(&mut self, now: DateTime<Utc>, fx: &mut Effects) {
        self.flush(fx, None);
        let Some(game) = self.game.as_ref() else { return };
        let score = compute_score(game, &self.config.score).unwrap_or(0.0);
        let breakdown: ScoreBreakdown = game.score_breakdown();
        let digest = state_digest(game);
        let total_rounds = self.config.total_rounds();
        let index = self.level * self.config.rounds_per_level as usize + self.round;
        let result = RoundResult {
            level: self.level,
            round: self.round,
            outcome: game.outcome,
            score,
            breakdown: breakdown.clone(),
            digest: digest.clone(),
            events_digest: events_digest(&self.round_events),
            tick: game.tick,
            more: index + 1 < total_rounds,
        };
        fx.intents.push(IntentLogEntry::RoundEnd {
            level: self.level,
            round: self.round,
            tick: game.tick,
            digest: digest.clone(),
        });
        fx.log.push(LogRecord::system(
            Some(now),
            "ROUND_END",
            [
                ("level", self.level.to_string()),
                ("round", self.round.to_string()),
                ("outcome", game.outcome.as_str().to_string()),
                ("score", score.to_string()),
                ("unspent", breakdown.unspent.to_string()),
                ("points", breakdown.points.to_string()),
                ("health", game.health.to_string()),
                ("digest", digest),
            ],
        ));
        let entry = LeaderboardEntry {
            team_name: self.team_name.clone(),
            room: self.key.clone(),
            level: self.level,
            round: self.round,
            score,
            breakdown,
            completed_at: now,
        };
        self.leaderboard.push(entry.clone());
        fx.leaderboard.push(entry);
        self.broadcast(fx, MsgType::RoundResult, &result);
        self.results.push(result);
        let board = LeaderboardPayload { entries: topk(&self.leaderboard, self.options.leaderboard_k) };
        self.broadcast(fx, MsgType::Leaderboard, &board);

        if index + 1 >= total_rounds {
            self.phase = SessionPhase::Finished;
            fx.log.push(LogRecord::system(Some(now), "SESSION_END", [("rounds", total_rounds.to_string())]));
            let lobby = self.lobby_state(None);
            self.broadcast(fx, MsgType::LobbyState, &lobby);
            return;
        }
        self.round += 1;
        if self.round >= self.config.rounds_per_level as usize {
            self.round = 0;
            self.level += 1;
        }
        self.phase = SessionPhase::BetweenRounds;
        self.intermission_left = self.options.intermission_ticks;
        if self.intermission_left == 0 {
            self.start_round(now, fx);
        } else {
            let lobby = self.lobby_state(None);
            self.broadcast(fx, MsgType::LobbyState, &lobby);
        }
    }

    fn chat(&mut self, id: MemberId, seq: u64, p: IntentPayload, now: DateTime<Utc>, fx: &mut Effects) {
        let m = &self.members[id as usize];
        if m.role == Role::Observer {
            return self.error(fx, id, Some(seq), "observer", "observers cannot chat");
        }
        if !self.config.comm.text_chat {
            return self.error(fx, id, Some(seq), "chat_disabled", "text chat is disabled for this session");
        }
        let text = p.text.unwrap_or_default();
        if text.trim().is_empty() {
            return self.error(fx, id, Some(seq), "bad_intent", "empty chat message");
        }
        let records = chat_records(Some(now), &m.name, &text);
        let sent = match &records[0].body {
            taskforge_telemetry::RecordBody::Chat { text, .. } => text.clone(),
            _ => text,
        };
        let relay = ChatRelay {
            member: id,
            name: m.name.clone(),
            slot: m.slot.map(|s| s.0),
            color: self.color(m.slot),
            text: sent,
            intent_seq: seq,
        };
        fx.log.extend(records);
        self.broadcast(fx, MsgType::ChatRelay, &relay);
    }

    fn set_team_name(&mut self, id: MemberId, seq: u64, p: IntentPayload, now: DateTime<Utc>, fx: &mut Effects) {
        if self.members[id as usize].role == Role::Observer {
            return self.error(fx, id, Some(seq), "observer", "observers cannot rename the team");
        }
        let name = p.text.or(p.name).unwrap_or_default().trim().to_string();
        if name.is_empty() || name.chars().count() > MAX_TEAM_NAME || name.contains(['\n', '\r']) {
            return self.error(fx, id, Some(seq), "bad_team_name", "team name must be 1 to 40 characters on one line");
        }
        self.team_name = name.clone();
        fx.log.push(LogRecord::system(Some(now), "TEAM_NAME", [("name", name)]));
        let mut lobby = self.lobby_state(None);
        lobby.intent_seq = Some(seq);
        self.broadcast(fx, MsgType::LobbyState, &lobby);
    }

    fn game_intent(
        &mut self,
        id: MemberId,
        seq: u64,
        kind: MsgType,
        p: IntentPayload,
        now: DateTime<Utc>,
        fx: &mut Effects,
    ) {
        let m = &self.members[id as usize];
        let Some(slot) = m.slot else {
            return self.error(fx, id, Some(seq), "observer", "observers cannot act in the game");
        };
        if p.player.is_some_and(|pl| pl != slot.0) {
            return self.error(fx, id, Some(seq), "player_mismatch", "player does not match the session token");
        }
        if self.phase != SessionPhase::InGame || self.game.is_none() {
            return self.error(fx, id, Some(seq), "not_in_game", "no round is running");
        }
        let command = match self.command(slot, kind, &p) {
            Ok(c) => c,
            Err(msg) => return self.error(fx, id, Some(seq), "bad_intent", &msg),
        };
        let game = self.game.as_mut().expect("checked above");
        let tick = game.tick;
        match game.apply_command(&command) {
            Ok(events) => {
                fx.intents.push(IntentLogEntry::Command { level: self.level, round: self.round, tick, command });
                self.flush(fx, None);
                self.record_events(&events, now, fx);
                self.round_events.extend(events.iter().cloned());
                self.pending.extend(events);
                self.flush(fx, Some(Ack { member: id, intent_seq: seq }));
                if self.game.as_ref().is_some_and(GameState::is_over) {
                    self.finish_round(now, fx);
                }
            }
            Err(e) => self.error(fx, id, Some(seq), e.code(), &e.to_string()),
        }
    }

    fn command(&self, slot: PlayerId, kind: MsgType, p: &IntentPayload) -> Result<Command, String> {
        let cell = || p.cell.ok_or_else(|| "missing cell".to_string());
        let kind = match kind {
            MsgType::Place => {
                let requested = p.tower_type.as_deref().ok_or("missing tower_type")?;
                let tower = self
                    .config
                    .towers
                    .iter()
                    .find(|t| t.id.eq_ignore_ascii_case(requested))
                    .map_or_else(|| requested.to_string(), |t| t.id.clone());
                CommandKind::Place { tower, cell: cell()?, orientation: p.orientation.unwrap_or(Orientation::North) }
            }
            MsgType::Sell => CommandKind::Sell { cell: cell()? },
            MsgType::Upgrade => CommandKind::Upgrade { cell: cell()?, track: p.track.ok_or("missing track")? },
            MsgType::Ready => CommandKind::Ready { ready: p.ready.unwrap_or(true) },
            MsgType::Select => CommandKind::Select { tower: TowerId(p.tower_id.ok_or("missing tower_id")?) },
            _ => unreachable!("not a game intent"),
        };
        Ok(Command::new(slot, kind))
    }

    fn name_of(&self, p: PlayerId) -> String {
        self.members.iter().find(|m| m.slot == Some(p)).map_or_else(|| format!("player{}", p.0), |m| m.name.clone())
    }

    fn record_events(&self, events: &[SimEvent], now: DateTime<Utc>, fx: &mut Effects) {
        let ts = Some(now);
        for ev in events {
            let rec = match &ev.kind {
                EventKind::Placed { spec, cell, by, .. } => {
                    LogRecord::action(ts, Action::Buy, spec, (cell.x, cell.y), self.name_of(*by))
                }
                EventKind::Sold { spec, cell, by, .. } => {
                    LogRecord::action(ts, Action::Sell, spec, (cell.x, cell.y), self.name_of(*by))
                }
                EventKind::Upgraded { spec, cell, track, level, by, .. } => {
                    LogRecord::upgrade(ts, spec, track.as_str(), *level, (cell.x, cell.y), self.name_of(*by))
                }
                EventKind::Killed { variant, bounty, points, .. } => LogRecord::system(
                    ts,
                    "KILL",
                    [("variant", variant.clone()), ("bounty", bounty.to_string()), ("points", points.to_string())],
                ),
                EventKind::Leaked { variant, .. } => LogRecord::system(ts, "LEAK", [("variant", variant.clone())]),
                EventKind::PhaseChanged { from, to } => LogRecord::system(
                    ts,
                    "PHASE",
                    [
                        ("level", self.level.to_string()),
                        ("round", self.round.to_string()),
                        ("from", from.as_str().to_string()),
                        ("to", to.as_str().to_string()),
                        ("tick", ev.tick.to_string()),
                    ],
                ),
                EventKind::Spawned { .. } | EventKind::RoundEnded { .. } => continue,
            };
            fx.log.push(rec);
        }
    }

    /// Broadcasts pending events as one GAME_DELTA.
    fn flush(&mut self, fx: &mut Effects, ack: Option<Ack>) {
        let Some(game) = self.game.as_ref() else { return };
        let delta = GameDelta {
            level: self.level,
            round: self.round,
            tick: game.tick,
            phase: game.phase,
            events: std::mem::take(&mut self.pending),
            money: game.wallet.total(),
            health: game.health,
            kill_points: game.kill_points,
            planning_remaining: game.planning_remaining(),
            ack,
        };
        self.broadcast(fx, MsgType::GameDelta, &delta);
    }

    fn color(&self, slot: Option<PlayerId>) -> Option<String> {
        slot.and_then(|s| self.config.team.get(usize::from(s.0))).map(|a| a.color.clone())
    }

    fn lobby_state(&self, intent_seq: Option<u64>) -> LobbyState {
        LobbyState {
            room: self.key.clone(),
            team_name: self.team_name.clone(),
            phase: self.phase.clone(),
            level: self.level,
            round: self.round,
            slots: self.config.slot_count(),
            members: self
                .members
                .iter()
                .map(|m| MemberView {
                    member: m.id,
                    name: m.name.clone(),
                    role: m.role,
                    slot: m.slot.map(|s| s.0),
                    color: self.color(m.slot),
                    connected: m.connected,
                    host: m.id == 0,
                })
                .collect(),
            you: None,
            intent_seq,
        }
    }

    fn snapshot(&self, intent_seq: Option<u64>) -> SnapshotPayload {
        let game = self.game.as_ref().expect("snapshot needs a game");
        let cfg = &self.config;
        let vis = cfg.visibility.clone();
        let catalog = cfg
            .towers
            .iter()
            .map(|t| {
                let mut t = t.clone();
                if !vis.tower_names {
                    t.display_name.clear();
                }
                if !vis.tower_descriptions {
                    t.description.clear();
                }
                t
            })
            .collect();
        let map = cfg.levels[self.level].map.clone();
        let spawn_preview = if vis.spawn_preview {
            (0..map.spawns.len()).map(|i| game.spawn_preview(i).unwrap_or_default()).collect()
        } else {
            Vec::new()
        };
        SnapshotPayload {
            team_name: self.team_name.clone(),
            map,
            catalog,
            assignments: cfg.team.clone(),
            visibility: vis,
            spawn_preview,
            interact_during_attack: cfg.interact_during_attack,
            text_chat: cfg.comm.text_chat,
            state: game.snapshot(),
            intent_seq,
        }
    }

    fn connected(&self) -> impl Iterator<Item = MemberId> + '_ {
        self.members.iter().filter(|m| m.connected).map(|m| m.id)
    }

    fn send(&mut self, fx: &mut Effects, to: MemberId, kind: MsgType, payload: &impl Serialize) {
        let Some(m) = self.members.get_mut(to as usize) else { return };
        if !m.connected {
            return;
        }
        let seq = m.next_seq;
        m.next_seq += 1;
        fx.out.push((to, WireMessage::new(seq, kind, self.key.clone(), payload)));
    }

    fn broadcast(&mut self, fx: &mut Effects, kind: MsgType, payload: &impl Serialize) {
        let value = serde_json::to_value(payload).expect("payloads serialize");
        let to: Vec<MemberId> = self.connected().collect();
        for id in to {
            self.send(fx, id, kind, &value);
        }
    }

    fn error(&mut self, fx: &mut Effects, to: MemberId, intent_seq: Option<u64>, code: &str, message: &str) {
        let payload = ErrorPayload { intent_seq, code: code.to_string(), message: message.to_string() };
        self.send(fx, to, MsgType::Error, &payload);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct LeaderboardPayload {
    pub entries: Vec<LeaderboardEntry>,
}
