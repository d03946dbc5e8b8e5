//! Message schema shared by the server, the bot client and the browser client.
//!
//! Every frame is one JSON object `{seq, type, room, payload}` followed by a
//! newline. Client `seq` numbers its own intents; server `seq` counts the
//! messages addressed to one member, starting at 1, with no gaps.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use taskforge_core::config::{TowerAssignment, Visibility};
use taskforge_core::sim::{GameSnapshot, ScoreBreakdown};
use taskforge_core::{Cell, GridMap, Orientation, Outcome, SimEvent, TowerSpec, UpgradeTrack};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MsgType {
    // client to server
    Join,
    SetTeamName,
    Chat,
    Place,
    Sell,
    Upgrade,
    Ready,
    Select,
    Ping,
    /// Host only: leaves the lobby and starts the first round.
    Start,
    // server to client
    LobbyState,
    GameSnapshot,
    GameDelta,
    ChatRelay,
    Error,
    RoundResult,
    Leaderboard,
    Pong,
}

impl MsgType {
    pub fn is_intent(self) -> bool {
        matches!(
            self,
            MsgType::Join
                | MsgType::SetTeamName
                | MsgType::Chat
                | MsgType::Place
                | MsgType::Sell
                | MsgType::Upgrade
                | MsgType::Ready
                | MsgType::Select
                | MsgType::Ping
                | MsgType::Start
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireMessage {
    pub seq: u64,
    #[serde(rename = "type")]
    pub kind: MsgType,
    #[serde(default)]
    pub room: String,
    #[serde(default)]
    pub payload: Value,
}

impl WireMessage {
    pub fn new(seq: u64, kind: MsgType, room: impl Into<String>, payload: impl Serialize) -> Self {
        WireMessage {
            seq,
            kind,
            room: room.into(),
            payload: serde_json::to_value(payload).expect("payloads serialize"),
        }
    }

    /// One frame: compact JSON plus a trailing newline.
    pub fn to_frame(&self) -> String {
        let mut s = serde_json::to_string(self).expect("wire messages serialize");
        s.push('\n');
        s
    }

    pub fn from_frame(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text.trim_end())
    }

    pub fn payload_as<T: for<'de> Deserialize<'de>>(&self) -> Result<T, serde_json::Error> {
        T::deserialize(&self.payload)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Role {
    #[default]
    Player,
    Observer,
}

/// Payload of every client intent. Fields not used by an intent are omitted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntentPayload {
    /// The issuing slot. The server checks it against the session token.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub player: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<Cell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tower_type: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub track: Option<UpgradeTrack>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ready: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tower_id: Option<u32>,
    // JOIN
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionPhase {
    Lobby,
    InGame,
    BetweenRounds,
    Finished,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberView {
    pub member: u32,
    pub name: String,
    pub role: Role,
    pub slot: Option<u8>,
    pub color: Option<String>,
    pub connected: bool,
    pub host: bool,
}

/// Private part of a LOBBY_STATE sent to the member that just joined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct You {
    pub member: u32,
    pub role: Role,
    pub slot: Option<u8>,
    pub color: Option<String>,
    pub token: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LobbyState {
    pub room: String,
    pub team_name: String,
    pub phase: SessionPhase,
    pub level: usize,
    pub round: usize,
    pub slots: usize,
    pub members: Vec<MemberView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub you: Option<You>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intent_seq: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    pub member: u32,
    pub intent_seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDelta {
    pub level: usize,
    pub round: usize,
    pub tick: u64,
    pub phase: taskforge_core::Phase,
    pub events: Vec<SimEvent>,
    pub money: u64,
    pub health: i64,
    pub kill_points: u64,
    pub planning_remaining: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ack: Option<Ack>,
}

/// Full state for (re)synchronizing a client.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotPayload {
    pub team_name: String,
    pub map: GridMap,
    pub catalog: Vec<TowerSpec>,
    pub assignments: Vec<TowerAssignment>,
    pub visibility: Visibility,
    /// Enemy ids per spawn point, when previews are visible.
    pub spawn_preview: Vec<Vec<String>>,
    pub interact_during_attack: bool,
    pub text_chat: bool,
    pub state: GameSnapshot,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intent_seq: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChatRelay {
    pub member: u32,
    pub name: String,
    pub slot: Option<u8>,
    pub color: Option<String>,
    pub text: String,
    pub intent_seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub intent_seq: Option<u64>,
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundResult {
    pub level: usize,
    pub round: usize,
    pub outcome: Outcome,
    pub score: f64,
    pub breakdown: ScoreBreakdown,
    /// Hex digest of the final game state.
    pub digest: String,
    pub events_digest: String,
    pub tick: u64,
    /// Whether another round follows.
    pub more: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pong {
    pub intent_seq: u64,
}
