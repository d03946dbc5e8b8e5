//! A scripted WebSocket client used by tests and load drivers.

use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use serde::Serialize;
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

use crate::net::RoomCreated;
use crate::wire::{IntentPayload, LobbyState, MsgType, Role, WireMessage};

#[derive(Debug, thiserror::Error)]
pub enum BotError {
    #[error("websocket: {0}")]
    Ws(#[from] tokio_tungstenite::tungstenite::Error),
    #[error("http: {0}")]
    Http(#[from] reqwest::Error),
    #[error("decode: {0}")]
    Decode(#[from] serde_json::Error),
    #[error("sequence gap: expected {expected}, got {got}")]
    Gap { expected: u64, got: u64 },
    #[error("join refused: {0}")]
    Refused(String),
    #[error("connection closed")]
    Closed,
    #[error("timed out waiting for a message")]
    Timeout,
}

/// Creates a room over HTTP. `base` is e.g. `http://127.0.0.1:8080`.
pub async fn create_room(base: &str, host: &str, role: Role) -> Result<RoomCreated, BotError> {
    #[derive(Serialize)]
    struct Req<'a> {
        name: &'a str,
        role: Role,
    }
    let resp = reqwest::Client::new().post(format!("{base}/rooms")).json(&Req { name: host, role }).send().await?;
    let resp = resp.error_for_status()?;
    Ok(serde_json::from_slice(&resp.bytes().await?)?)
}

pub struct BotClient {
    ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
    room: String,
    next_seq: u64,
    last_server_seq: u64,
    pub member: u32,
    pub slot: Option<u8>,
    pub token: String,
    /// Every server message received, in order.
    pub received: Vec<WireMessage>,
}

impl BotClient {
    /// Connects to `ws_url` (e.g. `ws://127.0.0.1:8080/ws`) and joins `room`.
    pub async fn join(
        ws_url: &str,
        room: &str,
        name: &str,
        role: Role,
        token: Option<&str>,
    ) -> Result<(BotClient, LobbyState), BotError> {
        let (ws, _) = tokio_tungstenite::connect_async(ws_url).await?;
        let mut bot = BotClient {
            ws,
            room: room.to_string(),
            next_seq: 1,
            last_server_seq: 0,
            member: 0,
            slot: None,
            token: String::new(),
            received: Vec::new(),
        };
        let payload = IntentPayload {
            name: Some(name.to_string()),
            role: Some(role),
            token: token.map(str::to_string),
            ..Default::default()
        };
        bot.send(MsgType::Join, payload).await?;
        loop {
            let msg = bot.recv().await?;
            match msg.kind {
                MsgType::LobbyState => {
                    let lobby: LobbyState = msg.payload_as()?;
                    if let Some(you) = &lobby.you {
                        bot.member = you.member;
                        bot.slot = you.slot;
                        bot.token = you.token.clone();
                        return Ok((bot, lobby));
                    }
                }
                MsgType::Error => return Err(BotError::Refused(msg.payload.to_string())),
                _ => {}
            }
        }
    }

    /// Sends an intent and returns its sequence number.
    pub async fn send(&mut self, kind: MsgType, payload: IntentPayload) -> Result<u64, BotError> {
        let seq = self.next_seq;
        self.next_seq += 1;
        let msg = WireMessage::new(seq, kind, self.room.clone(), payload);
        self.ws.send(Message::Text(msg.to_frame().into())).await?;
        Ok(seq)
    }

    /// Sends a raw text frame.
    pub async fn send_raw(&mut self, text: &str) -> Result<(), BotError> {
        self.ws.send(Message::Text(text.to_string().into())).await?;
        Ok(())
    }

    /// Next server message. Fails on a sequence gap.
    pub async fn recv(&mut self) -> Result<WireMessage, BotError> {
        loop {
            let frame = self.ws.next().await.ok_or(BotError::Closed)??;
            let text = match frame {
                Message::Text(t) => t.to_string(),
                Message::Close(_) => return Err(BotError::Closed),
                _ => continue,
            };
            let msg = WireMessage::from_frame(&text)?;
            // Seq 0 marks a refusal sent before the member existed.
            if msg.seq != 0 {
                if msg.seq != self.last_server_seq + 1 {
                    return Err(BotError::Gap { expected: self.last_server_seq + 1, got: msg.seq });
                }
                self.last_server_seq = msg.seq;
            }
            self.received.push(msg.clone());
            return Ok(msg);
        }
    }

    /// Receives until `pred` matches or `timeout` passes.
    pub async fn recv_until(
        &mut self,
        timeout: Duration,
        mut pred: impl FnMut(&WireMessage) -> bool,
    ) -> Result<WireMessage, BotError> {
        let deadline = tokio::time::Instant::now() + timeout;
        loop {
            let msg = tokio::time::timeout_at(deadline, self.recv()).await.map_err(|_| BotError::Timeout)??;
            if pred(&msg) {
                return Ok(msg);
            }
        }
    }

    pub async fn close(mut self) -> Result<(), BotError> {
        self.ws.close(None).await?;
        Ok(())
    }
}
