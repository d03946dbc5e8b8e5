//! Session service: rooms with host, players and observers, the
//! authoritative round loop, the WebSocket protocol, intent logs for replay,
//! and leaderboards.

pub mod auth;
pub mod bot;
pub mod leaderboard;
pub mod names;
pub mod net;
pub mod persist;
pub mod room;
pub mod wire;

pub use auth::{AuthError, Authenticator, OpenAuth};
pub use leaderboard::{topk, LeaderboardEntry};
pub use net::{create_room, router, serve, AppState, ServerOptions};
pub use persist::{read_intent_log, replay, IntentLogEntry, ReplayedRound};
pub use room::{Effects, MemberId, Room, RoomOptions};
pub use wire::{MsgType, Role, WireMessage};
