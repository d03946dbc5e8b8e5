use chrono::{DateTime, NaiveDateTime, Utc};

use crate::record::{unescape_detail, Action, LogRecord, RecordBody, UpgradeInfo, TS_FORMAT};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("malformed tag pair near column {0}")]
    MalformedTag(usize),
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("unrecognized tag sequence {0:?}")]
    Unrecognized(Vec<String>),
    #[error("bad {field} value {value:?}")]
    BadValue { field: &'static str, value: String },
}

/// A line that could not be read. Lines are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedLog {
    pub records: Vec<LogRecord>,
    pub errors: Vec<ParseError>,
}

/// Parses a log. Blank lines are skipped; bad lines are reported and the
/// rest of the input is still read.
pub fn parse_log(text: &str) -> ParsedLog {
    let mut out = ParsedLog::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line) {
            Ok(r) => out.records.push(r),
            Err(kind) => out.errors.push(ParseError { line: i + 1, kind }),
        }
    }
    out
}

/// Parses one record line.
pub fn parse_line(line: &str) -> Result<LogRecord, ParseErrorKind> {
    let mut elems = elements(line)?;
    let ts = match elems.first() {
        Some((tag, v)) if tag == "ts" => {
            let ts = parse_ts(v).ok_or_else(|| bad("ts", v))?;
            elems.remove(0);
            Some(ts)
        }
        _ => None,
    };
    let tags: Vec<&str> = elems.iter().map(|(t, _)| t.as_str()).collect();
    let v = |i: usize| elems[i].1.clone();
    let body = match tags.as_slice() {
        ["speaker", "chat_text"] => RecordBody::Chat { speaker: v(0), text: v(1) },
        ["action", "tower_type", "location", "user"] => action(&v(0), v(1), None, &v(2), v(3))?,
        ["action", "tower_type", "upgrade_track", "level", "location", "user"] => {
            let level = v(3).parse().map_err(|_| bad("level", &v(3)))?;
            action(&v(0), v(1), Some(UpgradeInfo { track: v(2), level }), &v(4), v(5))?
        }
        ["event", "detail"] => RecordBody::System { event: v(0), detail: detail(&v(1))? },
        _ => return Err(ParseErrorKind::Unrecognized(tags.iter().map(|t| t.to_string()).collect())),
    };
    Ok(LogRecord { ts, body })
}

fn bad(field: &'static str, value: &str) -> ParseErrorKind {
    ParseErrorKind::BadValue { field, value: value.to_string() }
}

fn action(
    kind: &str,
    tower_type: String,
    upgrade: Option<UpgradeInfo>,
    loc: &str,
    user: String,
) -> Result<RecordBody, ParseErrorKind> {
    let action = Action::parse(kind).ok_or_else(|| ParseErrorKind::UnknownAction(kind.to_string()))?;
    if (action == Action::Upgrade) != upgrade.is_some() {
        return Err(bad("action", kind));
    }
    Ok(RecordBody::Action { action, tower_type, upgrade, location: location(loc)?, user })
}

fn location(s: &str) -> Result<(u32, u32), ParseErrorKind> {
    let inner = s.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(|| bad("location", s))?;
    let (x, y) = inner.split_once(", ").ok_or_else(|| bad("location", s))?;
    match (x.parse(), y.parse()) {
        (Ok(x), Ok(y)) => Ok((x, y)),
        _ => Err(bad("location", s)),
    }
}

fn detail(s: &str) -> Result<Vec<(String, String)>, ParseErrorKind> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("detail", s))?;
            Ok((unescape_detail(k), unescape_detail(v)))
        })
        .collect()
}

fn parse_ts(s: &str) -> Option<DateTime<Utc>> {
    NaiveDateTime::parse_from_str(s, TS_FORMAT).ok().map(|t| t.and_utc())
}

fn unescape(s: &str) -> String {
    s.replace("&lt;", "<").replace("&gt;", ">").replace("&quot;", "\"").replace("&apos;", "'").replace("&amp;", "&")
}

/// Splits a line into `(tag, unescaped value)` pairs separated by whitespace.
fn elements(line: &str) -> Result<Vec<(String, String)>, ParseErrorKind> {
    let mut out = Vec::new();
    let mut rest = line.trim_end();
    let mut col = 0;
    loop {
        let trimmed = rest.trim_start();
        col += rest.len() - trimmed.len();
        rest = trimmed;
        if rest.is_empty() {
            return Ok(out);
        }
        let malformed = ParseErrorKind::MalformedTag(col + 1);
        let open = rest.strip_prefix('<').ok_or(malformed.clone())?;
        let name_end = open.find('>').ok_or(malformed.clone())?;
        let name = &open[..name_end];
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(malformed);
        }
        let body = &open[name_end + 1..];
        let close = format!("</{name}>");
        let end = body.find(&close).ok_or(malformed.clone())?;
        let raw = &body[..end];
        if raw.contains('<') {
            return Err(malformed);
        }
        out.push((name.to_string(), unescape(raw)));
        let consumed = 1 + name_end + 1 + end + close.len();
        col += consumed;
        rest = &rest[consumed..];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::serialize_record;

    #[test]
    fn empty_input() {
        assert_eq!(parse_log(""), ParsedLog::default());
    }

    #[test]
    fn escaped_text_round_trips() {
        let r = LogRecord::chat(None, "a", "<3");
        let line = serialize_record(&r);
        assert!(line.contains("&lt;3"));
        assert_eq!(parse_line(&line).unwrap(), r);
    }

    #[test]
    fn bad_lines_do_not_stop_parsing() {
        let text = "<speaker>a</speaker> <chat_text>hi</chat_text>\n\
                    <action>STEAL</action> <tower_type>MAP</tower_type> <location>(1, 2)</location> <user>b</user>\n\
                    <speaker>a</speaker> <chat_text>oops\n\
                    junk\n\
                    <speaker>b</speaker> <chat_text>yo</chat_text>\n";
        let parsed = parse_log(text);
        assert_eq!(parsed.records.len(), 2);
        let lines: Vec<usize> = parsed.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 3, 4]);
        assert_eq!(parsed.errors[0].kind, ParseErrorKind::UnknownAction("STEAL".into()));
        assert!(matches!(parsed.errors[1].kind, ParseErrorKind::MalformedTag(_)));
    }

    #[test]
    fn location_needs_one_space_after_comma() {
        let line = "<action>BUY</action> <tower_type>MAP</tower_type> <location>(1,2)</location> <user>b</user>";
        assert!(matches!(parse_line(line), Err(ParseErrorKind::BadValue { field: "location", .. })));
    }
}
