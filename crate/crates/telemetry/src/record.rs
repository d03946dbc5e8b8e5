use std::fmt;

use chrono::{DateTime, Utc};

/// Longest chat message kept, in characters.
pub const CHAT_CAP: usize = 500;

/// Timestamp layout of the leading `<ts>` element.
pub const TS_FORMAT: &str = "%Y-%m-%dT%H:%M:%S%.3fZ";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Buy,
    Sell,
    Upgrade,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Buy => "BUY",
            Action::Sell => "SELL",
            Action::Upgrade => "UPGRADE",
        }
    }

    pub fn parse(s: &str) -> Option<Action> {
        match s {
            "BUY" => Some(Action::Buy),
            "SELL" => Some(Action::Sell),
            "UPGRADE" => Some(Action::Upgrade),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Upgrade track and the level reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpgradeInfo {
    pub track: String,
    pub level: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordBody {
    Chat {
        speaker: String,
        text: String,
    },
    Action {
        action: Action,
        /// Tower spec id, uppercased.
        tower_type: String,
        upgrade: Option<UpgradeInfo>,
        location: (u32, u32),
        user: String,
    },
    /// Phase changes, round results and other bookkeeping.
    System {
        event: String,
        detail: Vec<(String, String)>,
    },
}

/// One log line. `ts` is `None` for lines written without a timestamp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogRecord {
    pub ts: Option<DateTime<Utc>>,
    pub body: RecordBody,
}

impl LogRecord {
    /// A chat record. Line breaks become single spaces; no length cap is
    /// applied here, see [`chat_records`].
    pub fn chat(ts: Option<DateTime<Utc>>, speaker: impl Into<String>, text: &str) -> Self {
        LogRecord { ts, body: RecordBody::Chat { speaker: speaker.into(), text: flatten_lines(text) } }
    }

    pub fn action(
        ts: Option<DateTime<Utc>>,
        action: Action,
        tower: &str,
        location: (u32, u32),
        user: impl Into<String>,
    ) -> Self {
        LogRecord {
            ts,
            body: RecordBody::Action {
                action,
                tower_type: tower.to_uppercase(),
                upgrade: None,
                location,
                user: user.into(),
            },
        }
    }

    pub fn upgrade(
        ts: Option<DateTime<Utc>>,
        tower: &str,
        track: &str,
        level: u8,
        location: (u32, u32),
        user: impl Into<String>,
    ) -> Self {
        let mut r = LogRecord::action(ts, Action::Upgrade, tower, location, user);
        if let RecordBody::Action { upgrade, .. } = &mut r.body {
            *upgrade = Some(UpgradeInfo { track: track.to_uppercase(), level });
        }
        r
    }

    pub fn system<K: Into<String>, V: ToString>(
        ts: Option<DateTime<Utc>>,
        event: &str,
        detail: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        LogRecord {
            ts,
            body: RecordBody::System {
                event: event.to_string(),
                detail: detail.into_iter().map(|(k, v)| (k.into(), v.to_string())).collect(),
            },
        }
    }

    pub fn is_chat(&self) -> bool {
        matches!(self.body, RecordBody::Chat { .. })
    }

    /// Detail value of a system record.
    pub fn detail(&self, key: &str) -> Option<&str> {
        match &self.body {
            RecordBody::System { detail, .. } => detail.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str()),
            _ => None,
        }
    }

    pub fn event(&self) -> Option<&str> {
        match &self.body {
            RecordBody::System { event, .. } => Some(event),
            _ => None,
        }
    }

    pub fn without_ts(&self) -> LogRecord {
        LogRecord { ts: None, body: self.body.clone() }
    }
}

/// Chat record for `text`, capped at [`CHAT_CAP`] characters. A capped
/// message is followed by a `CHAT_TRUNCATED` system record.
pub fn chat_records(ts: Option<DateTime<Utc>>, speaker: &str, text: &str) -> Vec<LogRecord> {
    let flat = flatten_lines(text);
    let len = flat.chars().count();
    if len <= CHAT_CAP {
        return vec![LogRecord::chat(ts, speaker, &flat)];
    }
    let kept: String = flat.chars().take(CHAT_CAP).collect();
    vec![
        LogRecord::chat(ts, speaker, &kept),
        LogRecord::system(ts, "CHAT_TRUNCATED", [("speaker", speaker.to_string()), ("chars", len.to_string())]),
    ]
}

fn flatten_lines(text: &str) -> String {
    text.replace("\r\n", " ").replace(['\n', '\r'], " ")
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\n' | '\r' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

fn escape_detail(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            ';' => out.push_str("%3B"),
            '=' => out.push_str("%3D"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape_detail(s: &str) -> String {
    s.replace("%3D", "=").replace("%3B", ";").replace("%25", "%")
}

/// Renders one record as a single line without the trailing newline.
pub fn serialize_record(r: &LogRecord) -> String {
    let mut out = String::new();
    if let Some(ts) = r.ts {
        out.push_str(&format!("<ts>{}</ts> ", ts.format(TS_FORMAT)));
    }
    match &r.body {
        RecordBody::Chat { speaker, text } => {
            out.push_str(&format!("<speaker>{}</speaker> <chat_text>{}</chat_text>", escape(speaker), escape(text)));
        }
        RecordBody::Action { action, tower_type, upgrade, location, user } => {
            out.push_str(&format!("<action>{action}</action> <tower_type>{}</tower_type> ", escape(tower_type)));
            if let Some(u) = upgrade {
                out.push_str(&format!(
                    "<upgrade_track>{}</upgrade_track> <level>{}</level> ",
                    escape(&u.track),
                    u.level
                ));
            }
            out.push_str(&format!(
                "<location>({}, {})</location> <user>{}</user>",
                location.0,
                location.1,
                escape(user)
            ));
        }
        RecordBody::System { event, detail } => {
            let detail: Vec<String> =
                detail.iter().map(|(k, v)| format!("{}={}", escape_detail(k), escape_detail(v))).collect();
            out.push_str(&format!("<event>{}</event> <detail>{}</detail>", escape(event), escape(&detail.join(";"))));
        }
    }
    out
}
