use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::routing::post;
use axum::Router;
use chrono::{DateTime, Utc};
use taskforge_telemetry::*;

type Posts = Arc<Mutex<Vec<(String, String)>>>;

async fn stub() -> (String, Posts) {
    let posts: Posts = Arc::default();
    let app = Router::new()
        .route(
            "/log",
            post(|State(p): State<Posts>, headers: HeaderMap, body: String| async move {
                let session = headers.get("x-session").and_then(|v| v.to_str().ok()).unwrap_or("").to_string();
                p.lock().unwrap().push((session, body));
                StatusCode::NO_CONTENT
            }),
        )
        .with_state(posts.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (format!("http://{addr}"), posts)
}

/// An address with nothing listening.
async fn dead_endpoint() -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    format!("http://{addr}")
}

fn records(n: usize) -> Vec<LogRecord> {
    let t0 = DateTime::from_timestamp_millis(1_700_000_000_000).unwrap();
    (0..n)
        .map(|i| {
            let ts = Some(t0 + chrono::Duration::milliseconds(i as i64));
            match i % 3 {
                0 => LogRecord::chat(ts, "p", &format!("msg {i}")),
                1 => LogRecord::action(ts, Action::Buy, "basic", (i as u32 % 16, 3), "p"),
                _ => LogRecord::system(ts, "TICK", [("n", i)]),
            }
        })
        .collect()
}

fn config(endpoint: String, batch: usize) -> SinkConfig {
    SinkConfig {
        endpoint: Some(endpoint),
        batch_size: batch,
        flush_interval: Duration::from_secs(30),
        retry: RetryPolicy { max_attempts: 3, backoff: Duration::from_millis(5) },
    }
}

fn start() -> DateTime<Utc> {
    DateTime::from_timestamp(1_700_000_000, 0).unwrap()
}

#[tokio::test]
async fn batches_of_fifty_make_ten_posts_in_order() {
    let (url, posts) = stub().await;
    let dir = tempfile::tempdir().unwrap();
    let mut sink =
        SessionSink::open(dir.path(), "ROOM42", start(), config(url, 50), Arc::new(HttpTransport::new())).unwrap();
    let recs = records(500);
    for r in &recs {
        sink.record(r).unwrap();
    }
    let path = sink.path().to_path_buf();
    let report = sink.close().await;
    assert_eq!(report.batches_sent, 10);
    assert_eq!(report.batches_dead, 0);
    let posts = posts.lock().unwrap().clone();
    assert_eq!(posts.len(), 10);
    assert!(posts.iter().all(|(s, _)| s == "ROOM42"));
    let delivered: Vec<String> = posts.iter().flat_map(|(_, b)| b.lines().map(str::to_string)).collect();
    let expected: Vec<String> = recs.iter().map(serialize_record).collect();
    assert_eq!(delivered, expected);
    assert_eq!(std::fs::read_to_string(path).unwrap(), expected.join("\n") + "\n");
}

#[tokio::test]
async fn batch_of_one_posts_every_record() {
    let (url, posts) = stub().await;
    let dir = tempfile::tempdir().unwrap();
    let mut sink =
        SessionSink::open(dir.path(), "R1", start(), config(url, 1), Arc::new(HttpTransport::new())).unwrap();
    let recs = records(7);
    for r in &recs {
        sink.record(r).unwrap();
    }
    sink.close().await;
    let bodies: Vec<String> = posts.lock().unwrap().iter().map(|(_, b)| b.clone()).collect();
    assert_eq!(bodies, recs.iter().map(serialize_record).collect::<Vec<_>>());
}

#[tokio::test]
async fn unreachable_endpoint_fills_the_dead_letter_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut sink =
        SessionSink::open(dir.path(), "R2", start(), config(dead_endpoint().await, 8), Arc::new(HttpTransport::new()))
            .unwrap();
    for r in &records(45) {
        sink.record(r).unwrap();
    }
    let (path, dead) = (sink.path().to_path_buf(), sink.dead_letter_path().to_path_buf());
    let report = sink.close().await;
    assert_eq!(report.records_dead, 45);
    assert_eq!(report.batches_dead, 6);
    let local = std::fs::read_to_string(path).unwrap();
    assert_eq!(local.lines().count(), 45);
    assert_eq!(std::fs::read_to_string(dead).unwrap(), local);
}

#[tokio::test]
async fn interval_flushes_a_partial_batch() {
    let (url, posts) = stub().await;
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(url, 100);
    cfg.flush_interval = Duration::from_millis(50);
    let mut sink = SessionSink::open(dir.path(), "R3", start(), cfg, Arc::new(HttpTransport::new())).unwrap();
    for r in &records(3) {
        sink.record(r).unwrap();
    }
    tokio::time::sleep(Duration::from_millis(400)).await;
    assert_eq!(posts.lock().unwrap().len(), 1);
    sink.close().await;
}

#[tokio::test]
async fn local_file_is_written_before_delivery() {
    struct Check(std::path::PathBuf, Mutex<Vec<usize>>);
    impl Transport for Check {
        fn post<'a>(&'a self, _: &'a str, _: &'a str, body: String) -> PostFuture<'a> {
            let on_disk = std::fs::read_to_string(&self.0).unwrap();
            let ok = body.lines().all(|l| on_disk.lines().any(|d| d == l));
            self.1.lock().unwrap().push(usize::from(ok));
            Box::pin(async { Ok(()) })
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(format!("{}.log", session_stem("R4", start())));
    let check = Arc::new(Check(path, Mutex::default()));
    let mut sink =
        SessionSink::open(dir.path(), "R4", start(), config("http://unused".into(), 2), check.clone()).unwrap();
    for r in &records(10) {
        sink.record(r).unwrap();
    }
    sink.close().await;
    assert_eq!(*check.1.lock().unwrap(), vec![1; 5]);
}

#[test]
fn zero_batch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SinkConfig { batch_size: 0, ..SinkConfig::default() };
    assert!(matches!(
        SessionSink::open(dir.path(), "R", start(), cfg, Arc::new(HttpTransport::new())),
        Err(SinkError::ZeroBatch)
    ));
}
