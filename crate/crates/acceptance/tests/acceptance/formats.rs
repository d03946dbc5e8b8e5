use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::Router;
use chrono::{DateTime, Utc};
use taskforge_acceptance::report::ensure;
use taskforge_core::builtin_preset;
use taskforge_telemetry::{
    parse_log, serialize_record, Action, HttpTransport, LogRecord, RecordBody, RetryPolicy, SessionSink, SinkConfig,
};

fn excerpt_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/planning_excerpt.log")
}

/// The `<tag>` tokens of a line, in order.
fn tags(line: &str) -> Vec<&str> {
    line.match_indices('<').filter_map(|(i, _)| line[i..].find('>').map(|j| &line[i..=i + j])).collect()
}

pub fn excerpt() -> Result<(), String> {
    let text = std::fs::read_to_string(excerpt_path()).map_err(|e| e.to_string())?;
    let parsed = parse_log(&text);
    let mut problems = Vec::new();
    if !parsed.errors.is_empty() {
        problems.push(format!("parse errors {:?}", parsed.errors));
    }
    let records = &parsed.records;
    if records.len() != 16 {
        problems.push(format!("{} records, expected 16", records.len()));
    }
    let chats = records.iter().filter(|r| matches!(r.body, RecordBody::Chat { .. })).count();
    let buys: Vec<(&str, (u32, u32))> = records
        .iter()
        .filter_map(|r| match &r.body {
            RecordBody::Action { action: Action::Buy, tower_type, location, .. } => {
                Some((tower_type.as_str(), *location))
            }
            _ => None,
        })
        .collect();
    if (chats, buys.len()) != (3, 13) {
        problems.push(format!("{chats} CHAT and {} BUY records, expected 3 and 13", buys.len()));
    }
    if !buys.contains(&("MAP", (0, 14))) {
        problems.push("no MAP purchase at (0, 14)".into());
    }
    if !buys.contains(&("DISCOUNT", (10, 0))) {
        problems.push("no DISCOUNT purchase at (10, 0)".into());
    }
    let source: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let rewritten: Vec<String> = records.iter().map(|r| serialize_record(&r.without_ts())).collect();
    let same_tags = source.len() == rewritten.len() && source.iter().zip(&rewritten).all(|(a, b)| tags(a) == tags(b));
    if !same_tags || source.iter().zip(&rewritten).any(|(a, b)| a != b) {
        problems.push("reserialized lines differ from the source".into());
    }
    ensure(problems.is_empty(), || problems.join("; "))
}

fn start() -> DateTime<Utc> {
    DateTime::from_timestamp(1_700_000_000, 0).expect("valid timestamp")
}

type Posts = Arc<Mutex<Vec<String>>>;

async fn stub() -> (String, Posts) {
    let posts: Posts = Arc::default();
    let app = Router::new()
        .route(
            "/log",
            post(|State(p): State<Posts>, body: String| async move {
                p.lock().expect("stub lock").push(body);
                StatusCode::NO_CONTENT
            }),
        )
        .with_state(posts.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.expect("bind");
    let addr = listener.local_addr().expect("address");
    tokio::spawn(async move { axum::serve(listener, app).await.expect("stub server") });
    (format!("http://{addr}"), posts)
}

async fn offline_endpoint() -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.expect("bind");
    let addr = listener.local_addr().expect("address");
    drop(listener);
    format!("http://{addr}")
}

fn sink_config(endpoint: String, batch: usize) -> SinkConfig {
    SinkConfig {
        endpoint: Some(endpoint),
        batch_size: batch,
        flush_interval: Duration::from_secs(30),
        retry: RetryPolicy { max_attempts: 3, backoff: Duration::from_millis(5) },
    }
}

async fn offline(records: &[LogRecord]) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = sink_config(offline_endpoint().await, 50);
    let mut sink = SessionSink::open(dir.path(), "OFFLN1", start(), cfg, Arc::new(HttpTransport::new()))
        .map_err(|e| e.to_string())?;
    for r in records {
        sink.record(r).map_err(|e| e.to_string())?;
    }
    let (path, dead) = (sink.path().to_path_buf(), sink.dead_letter_path().to_path_buf());
    let report = sink.close().await;
    let local = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let expected: Vec<String> = records.iter().map(serialize_record).collect();
    ensure(local.lines().eq(expected.iter().map(String::as_str)), || "local file is not the event sequence".into())?;
    ensure(report.records_dead == records.len(), || {
        format!("{} of {} dead-lettered", report.records_dead, records.len())
    })?;
    let dead = std::fs::read_to_string(dead).map_err(|e| e.to_string())?;
    ensure(dead == local, || "dead-letter file differs from the local file".into())
}

async fn online() -> Result<(), String> {
    let (url, posts) = stub().await;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut sink =
        SessionSink::open(dir.path(), "ONLN01", start(), sink_config(url, 50), Arc::new(HttpTransport::new()))
            .map_err(|e| e.to_string())?;
    let records: Vec<LogRecord> = (0..500)
        .map(|i| {
            let ts = Some(start() + chrono::Duration::milliseconds(i));
            LogRecord::chat(ts, "bot", &format!("message {i}"))
        })
        .collect();
    for r in &records {
        sink.record(r).map_err(|e| e.to_string())?;
    }
    let report = sink.close().await;
    let posts = posts.lock().map_err(|e| e.to_string())?.clone();
    ensure(posts.len() == 10, || format!("{} POSTs, expected 10 ({report:?})", posts.len()))?;
    let delivered: Vec<&str> = posts.iter().flat_map(|b| b.lines()).collect();
    let expected: Vec<String> = records.iter().map(serialize_record).collect();
    ensure(delivered.iter().copied().eq(expected.iter().map(String::as_str)), || "records arrived out of order".into())
}

pub fn telemetry() -> Result<(), String> {
    let config = builtin_preset("case-study").map_err(|e| e.to_string())?;
    let mut single = config.clone();
    single.levels.truncate(1);
    let session = super::session::generate(single, 77);
    ensure(session.log.len() > 50, || format!("session produced only {} records", session.log.len()))?;
    let rt = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(2)
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    rt.block_on(async {
        offline(&session.log).await.map_err(|e| format!("offline: {e}"))?;
        online().await.map_err(|e| format!("online: {e}"))
    })
}
