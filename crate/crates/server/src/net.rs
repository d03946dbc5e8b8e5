//! HTTP and WebSocket front end. Each room runs in its own task that owns
//! the [`Room`] and receives connection events over an ordered channel.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use futures_util::{SinkExt, StreamExt};
use serde::{Deserialize, Serialize};
use taskforge_core::SessionConfig;
use taskforge_telemetry::{session_stem, SessionSink, SinkConfig, Transport};
use tokio::sync::{mpsc, oneshot};
use tower_http::services::ServeDir;

use crate::auth::Authenticator;
use crate::leaderboard::{load_dir, topk, LeaderboardFile};
use crate::names::unique_key;
use crate::persist::IntentLogFile;
use crate::room::{Effects, JoinError, MemberId, Room, RoomOptions};
use crate::wire::{ErrorPayload, IntentPayload, MsgType, Role, WireMessage};

pub struct ServerOptions {
    pub config: Arc<SessionConfig>,
    pub room: RoomOptions,
    /// Simulation speed multiplier; 1.0 runs at 20 ticks per second.
    pub speed: f64,
    pub log_dir: PathBuf,
    pub sink: SinkConfig,
    pub transport: Arc<dyn Transport>,
    pub persist: Option<PathBuf>,
    pub static_dir: Option<PathBuf>,
    pub auth: Arc<dyn Authenticator>,
    /// Close rooms that have had nobody connected for this long.
    pub idle_timeout: Duration,
}

enum RoomInput {
    Connect {
        name: String,
        role: Role,
        token: Option<String>,
        intent_seq: u64,
        outbox: mpsc::UnboundedSender<String>,
        reply: oneshot::Sender<Result<MemberId, JoinError>>,
    },
    Frame {
        member: MemberId,
        text: String,
    },
    Disconnect {
        member: MemberId,
    },
}

struct RoomHandle {
    tx: mpsc::UnboundedSender<RoomInput>,
    connected: Arc<AtomicUsize>,
}

pub struct AppState {
    opts: ServerOptions,
    rooms: Mutex<HashMap<String, RoomHandle>>,
}

impl AppState {
    pub fn new(opts: ServerOptions) -> Arc<Self> {
        Arc::new(AppState { opts, rooms: Mutex::default() })
    }

    pub fn room_count(&self) -> usize {
        self.rooms.lock().expect("room map lock").len()
    }
}

#[derive(Debug, Deserialize)]
pub struct CreateRoom {
    pub name: String,
    #[serde(default)]
    pub role: Role,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RoomCreated {
    pub room_key: String,
    pub token: String,
    pub member: MemberId,
}

#[derive(Debug, thiserror::Error)]
pub enum CreateError {
    #[error("{0}")]
    Auth(#[from] crate::auth::AuthError),
    #[error("{0}")]
    Join(#[from] JoinError),
    #[error("cannot open session files: {0}")]
    Io(#[from] std::io::Error),
}

/// Creates a room with the host reserved as member 0 and starts its task.
pub fn create_room(state: &Arc<AppState>, host: &str, role: Role) -> Result<RoomCreated, CreateError> {
    let name = state.opts.auth.authenticate(host, None)?;
    let now = Utc::now();
    let mut rooms = state.rooms.lock().expect("room map lock");
    let live: HashSet<String> = rooms.keys().cloned().collect();
    let key = unique_key(&mut rand::rng(), &live);
    let mut options = state.opts.room.clone();
    options.seed = rand::random();
    let mut fx = Effects::default();
    let mut room = Room::new(key.clone(), state.opts.config.clone(), options, now, &mut fx);
    let (member, token) = room.reserve(&name, role, now, &mut fx)?;

    let sink = SessionSink::open(&state.opts.log_dir, &key, now, state.opts.sink.clone(), state.opts.transport.clone())
        .map_err(|e| match e {
            taskforge_telemetry::SinkError::Io(e) => e,
            other => std::io::Error::other(other.to_string()),
        })?;
    let (intents, board) = match &state.opts.persist {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let config_text = taskforge_core::serialize_config(&state.opts.config);
            std::fs::write(dir.join(format!("{key}.config.toml")), config_text)?;
            (
                Some(IntentLogFile::new(dir.join(format!("{key}.intents.jsonl")))),
                Some(LeaderboardFile::new(dir.join(format!("{}.leaderboard.jsonl", session_stem(&key, now))))),
            )
        }
        None => (None, None),
    };

    let (tx, rx) = mpsc::unbounded_channel();
    let connected = Arc::new(AtomicUsize::new(0));
    rooms.insert(key.clone(), RoomHandle { tx, connected: connected.clone() });
    drop(rooms);

    let mut task = RoomTask {
        room,
        sink: Some(sink),
        intents,
        board,
        outboxes: HashMap::new(),
        connected,
        state: Arc::downgrade(state),
    };
    task.dispatch(fx);
    let period = tick_period(state.opts.speed);
    let idle = state.opts.idle_timeout;
    tokio::spawn(task.run(rx, period, idle));
    tracing::info!(room = %key, "room created");
    Ok(RoomCreated { room_key: key, token, member })
}

fn tick_period(speed: f64) -> Duration {
    let speed = if speed.is_finite() && speed > 0.0 { speed } else { 1.0 };
    Duration::from_secs_f64(taskforge_core::sim::DT / speed).max(Duration::from_micros(10))
}

struct RoomTask {
    room: Room,
    sink: Option<SessionSink>,
    intents: Option<IntentLogFile>,
    board: Option<LeaderboardFile>,
    outboxes: HashMap<MemberId, mpsc::UnboundedSender<String>>,
    connected: Arc<AtomicUsize>,
    state: std::sync::Weak<AppState>,
}

impl RoomTask {
    async fn run(mut self, mut rx: mpsc::UnboundedReceiver<RoomInput>, period: Duration, idle: Duration) {
        let mut ticker = tokio::time::interval(period);
        let mut idle_since = tokio::time::Instant::now();
        loop {
            let mut fx = Effects::default();
            tokio::select! {
                biased;
                input = rx.recv() => match input {
                    Some(input) => self.input(input, &mut fx),
                    None => break,
                },
                _ = ticker.tick() => self.room.advance(Utc::now(), &mut fx),
            }
            let connected = self.room.connected_count();
            self.connected.store(connected, Ordering::Release);
            self.dispatch(fx);
            if connected > 0 {
                idle_since = tokio::time::Instant::now();
            } else if self.room.is_finished() || idle_since.elapsed() >= idle {
                break;
            }
        }
        let key = self.room.key().to_string();
        if let Some(state) = self.state.upgrade() {
            state.rooms.lock().expect("room map lock").remove(&key);
        }
        if let Some(sink) = self.sink.take() {
            let report = sink.close().await;
            tracing::info!(room = %key, ?report, "room closed");
        }
    }

    fn input(&mut self, input: RoomInput, fx: &mut Effects) {
        let now = Utc::now();
        match input {
            RoomInput::Connect { name, role, token, intent_seq, outbox, reply } => {
                let res = self.room.connect(&name, role, token.as_deref(), Some(intent_seq), now, fx);
                if let Ok(id) = &res {
                    self.outboxes.insert(*id, outbox);
                }
                let _ = reply.send(res);
            }
            RoomInput::Frame { member, text } => match WireMessage::from_frame(&text) {
                Ok(msg) if msg.kind.is_intent() => self.room.handle(member, &msg, now, fx),
                Ok(msg) => self.room.malformed(member, &format!("{:?} is not an intent", msg.kind), fx),
                Err(e) => self.room.malformed(member, &e.to_string(), fx),
            },
            RoomInput::Disconnect { member } => {
                self.room.disconnect(member, now, fx);
                self.outboxes.remove(&member);
            }
        }
    }

    fn dispatch(&mut self, fx: Effects) {
        for (to, msg) in fx.out {
            if let Some(out) = self.outboxes.get(&to) {
                let _ = out.send(msg.to_frame());
            }
        }
        if let Some(sink) = self.sink.as_mut() {
            for rec in &fx.log {
                if let Err(e) = sink.record(rec) {
                    tracing::error!(room = %self.room.key(), error = %e, "session log write failed");
                }
            }
        }
        if let Some(f) = &self.intents {
            if let Err(e) = f.append(&fx.intents) {
                tracing::error!(room = %self.room.key(), error = %e, "intent log write failed");
            }
        }
        if let Some(f) = &self.board {
            for entry in &fx.leaderboard {
                if let Err(e) = f.append(entry) {
                    tracing::error!(room = %self.room.key(), error = %e, "leaderboard write failed");
                }
            }
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let mut app = Router::new()
        .route("/healthz", get(healthz))
        .route("/rooms", post(post_room))
        .route("/leaderboard", get(leaderboard))
        .route("/ws", get(ws_upgrade));
    if let Some(dir) = &state.opts.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app.with_state(state)
}

/// Serves until the listener fails or the future is dropped.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

async fn healthz(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let rooms = state.rooms.lock().expect("room map lock");
    let connected: usize = rooms.values().map(|r| r.connected.load(Ordering::Acquire)).sum();
    Json(serde_json::json!({ "status": "ok", "rooms": rooms.len(), "connected": connected }))
}

async fn post_room(State(state): State<Arc<AppState>>, Json(req): Json<CreateRoom>) -> Response {
    match create_room(&state, &req.name, req.role) {
        Ok(created) => (StatusCode::CREATED, Json(created)).into_response(),
        Err(e @ CreateError::Io(_)) => {
            tracing::error!(error = %e, "room creation failed");
            (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response()
        }
        Err(e) => (StatusCode::BAD_REQUEST, e.to_string()).into_response(),
    }
}

#[derive(Debug, Deserialize)]
struct TopK {
    k: Option<usize>,
}

async fn leaderboard(State(state): State<Arc<AppState>>, Query(q): Query<TopK>) -> Response {
    let Some(dir) = &state.opts.persist else {
        return Json(Vec::<()>::new()).into_response();
    };
    match load_dir(dir) {
        Ok(entries) => Json(topk(&entries, q.k.unwrap_or(10).max(1))).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn ws_upgrade(State(state): State<Arc<AppState>>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| session(socket, state))
}

fn reject(code: &str, message: &str, intent_seq: Option<u64>, room: &str) -> Message {
    let payload = ErrorPayload { intent_seq, code: code.to_string(), message: message.to_string() };
    Message::Text(WireMessage::new(0, MsgType::Error, room, payload).to_frame().into())
}

async fn session(mut socket: WebSocket, state: Arc<AppState>) {
    let first = loop {
        match socket.recv().await {
            Some(Ok(Message::Text(t))) => break t.to_string(),
            Some(Ok(Message::Ping(_) | Message::Pong(_))) => continue,
            _ => return,
        }
    };
    let msg = match WireMessage::from_frame(&first) {
        Ok(m) if m.kind == MsgType::Join => m,
        Ok(m) => {
            let _ = socket.send(reject("join_first", "the first message must be JOIN", Some(m.seq), &m.room)).await;
            return;
        }
        Err(e) => {
            let _ = socket.send(reject("malformed", &e.to_string(), None, "")).await;
            return;
        }
    };
    let payload: IntentPayload = msg.payload_as().unwrap_or_default();
    let name = match (&payload.token, state.opts.auth.authenticate(payload.name.as_deref().unwrap_or(""), None)) {
        (_, Ok(name)) => name,
        (Some(_), Err(_)) => String::new(),
        (None, Err(e)) => {
            let _ = socket.send(reject(e.code(), &e.to_string(), Some(msg.seq), &msg.room)).await;
            return;
        }
    };
    let room_tx = state.rooms.lock().expect("room map lock").get(&msg.room).map(|h| h.tx.clone());
    let Some(room_tx) = room_tx else {
        let _ = socket.send(reject("unknown_room", "unknown room key", Some(msg.seq), &msg.room)).await;
        return;
    };
    let (out_tx, mut out_rx) = mpsc::unbounded_channel::<String>();
    let (reply_tx, reply_rx) = oneshot::channel();
    let connect = RoomInput::Connect {
        name,
        role: payload.role.unwrap_or_default(),
        token: payload.token.clone(),
        intent_seq: msg.seq,
        outbox: out_tx,
        reply: reply_tx,
    };
    if room_tx.send(connect).is_err() {
        let _ = socket.send(reject("unknown_room", "room closed", Some(msg.seq), &msg.room)).await;
        return;
    }
    let member = match reply_rx.await {
        Ok(Ok(m)) => m,
        Ok(Err(e)) => {
            let _ = socket.send(reject(e.code, &e.message, Some(msg.seq), &msg.room)).await;
            return;
        }
        Err(_) => return,
    };
    let (mut ws_tx, mut ws_rx) = socket.split();
    let writer = tokio::spawn(async move {
        while let Some(frame) = out_rx.recv().await {
            if ws_tx.send(Message::Text(frame.into())).await.is_err() {
                break;
            }
        }
        let _ = ws_tx.close().await;
    });
    while let Some(Ok(frame)) = ws_rx.next().await {
        match frame {
            Message::Text(t) => {
                if room_tx.send(RoomInput::Frame { member, text: t.to_string() }).is_err() {
                    break;
                }
            }
            Message::Close(_) => break,
            _ => {}
        }
    }
    let _ = room_tx.send(RoomInput::Disconnect { member });
    writer.abort();
}
