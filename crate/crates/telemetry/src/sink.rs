use std::fs::{File, OpenOptions};
use std::future::Future;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::pin::Pin;
use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, Utc};
use tokio::sync::mpsc;
use tokio::task::JoinHandle;
use tokio::time::Instant;

use crate::record::{serialize_record, LogRecord};

#[derive(Clone, Debug)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_attempts: 5, backoff: Duration::from_millis(200) }
    }
}

#[derive(Clone, Debug)]
pub struct SinkConfig {
    /// Base URL of the collection service; `None` keeps logs local only.
    pub endpoint: Option<String>,
    pub batch_size: usize,
    pub flush_interval: Duration,
    pub retry: RetryPolicy,
}

impl Default for SinkConfig {
    fn default() -> Self {
        Self { endpoint: None, batch_size: 50, flush_interval: Duration::from_secs(5), retry: RetryPolicy::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SinkError {
    #[error("batch size must be at least 1")]
    ZeroBatch,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct TransportError(pub String);

pub type PostFuture<'a> = Pin<Box<dyn Future<Output = Result<(), TransportError>> + Send + 'a>>;

/// Delivers one batch body for a session.
pub trait Transport: Send + Sync + 'static {
    fn post<'a>(&'a self, url: &'a str, session: &'a str, body: String) -> PostFuture<'a>;
}

/// HTTP delivery: `POST {endpoint}/log` with an `X-Session` header.
#[derive(Clone, Debug, Default)]
pub struct HttpTransport {
    client: reqwest::Client,
}

impl HttpTransport {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Transport for HttpTransport {
    fn post<'a>(&'a self, url: &'a str, session: &'a str, body: String) -> PostFuture<'a> {
        Box::pin(async move {
            let resp = self
                .client
                .post(url)
                .header("X-Session", session)
                .header("Content-Type", "text/plain; charset=utf-8")
                .body(body)
                .send()
                .await
                .map_err(|e| TransportError(e.to_string()))?;
            if resp.status().is_success() {
                Ok(())
            } else {
                Err(TransportError(format!("status {}", resp.status())))
            }
        })
    }
}

/// What the deliverer did over the life of a sink.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeliveryReport {
    pub batches_sent: usize,
    pub batches_dead: usize,
    pub records_sent: usize,
    pub records_dead: usize,
}

/// File name stem for a session: `{room_key}_{start}`.
pub fn session_stem(room_key: &str, start: DateTime<Utc>) -> String {
    format!("{room_key}_{}", start.format("%Y%m%dT%H%M%S%3fZ"))
}

/// Per-session log writer. Every record is written and flushed to the local
/// file before it is handed to the deliverer task.
pub struct SessionSink {
    file: File,
    path: PathBuf,
    dead_path: PathBuf,
    tx: Option<mpsc::UnboundedSender<String>>,
    deliverer: Option<JoinHandle<DeliveryReport>>,
    written: usize,
}

impl SessionSink {
    /// Opens `{dir}/{room_key}_{start}.log`. Must be called inside a tokio
    /// runtime when an endpoint is configured.
    pub fn open(
        dir: &Path,
        room_key: &str,
        start: DateTime<Utc>,
        config: SinkConfig,
        transport: Arc<dyn Transport>,
    ) -> Result<Self, SinkError> {
        if config.batch_size == 0 {
            return Err(SinkError::ZeroBatch);
        }
        std::fs::create_dir_all(dir)?;
        let stem = session_stem(room_key, start);
        let path = dir.join(format!("{stem}.log"));
        let dead_path = dir.join(format!("{stem}.dead.log"));
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        let (tx, deliverer) = match config.endpoint.clone() {
            Some(endpoint) => {
                let (tx, rx) = mpsc::unbounded_channel();
                let job = Deliverer {
                    url: format!("{}/log", endpoint.trim_end_matches('/')),
                    session: room_key.to_string(),
                    config,
                    transport,
                    dead_path: dead_path.clone(),
                };
                (Some(tx), Some(tokio::spawn(job.run(rx))))
            }
            None => (None, None),
        };
        Ok(SessionSink { file, path, dead_path, tx, deliverer, written: 0 })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn dead_letter_path(&self) -> &Path {
        &self.dead_path
    }

    pub fn written(&self) -> usize {
        self.written
    }

    /// Appends a record locally, then queues it for delivery.
    pub fn record(&mut self, record: &LogRecord) -> io::Result<()> {
        let line = serialize_record(record);
        writeln!(self.file, "{line}")?;
        self.file.flush()?;
        self.written += 1;
        if let Some(tx) = &self.tx {
            if tx.send(line).is_err() {
                tracing::warn!(path = %self.path.display(), "telemetry deliverer stopped; record kept locally only");
            }
        }
        Ok(())
    }

    /// Flushes pending batches and waits for the deliverer to finish.
    pub async fn close(mut self) -> DeliveryReport {
        self.tx.take();
        match self.deliverer.take() {
            Some(handle) => handle.await.unwrap_or_default(),
            None => DeliveryReport::default(),
        }
    }
}

struct Deliverer {
    url: String,
    session: String,
    config: SinkConfig,
    transport: Arc<dyn Transport>,
    dead_path: PathBuf,
}

impl Deliverer {
    async fn run(self, mut rx: mpsc::UnboundedReceiver<String>) -> DeliveryReport {
        let mut report = DeliveryReport::default();
        let mut batch: Vec<String> = Vec::new();
        let mut deadline: Option<Instant> = None;
        loop {
            let next = match deadline {
                Some(d) => tokio::select! {
                    line = rx.recv() => Some(line),
                    _ = tokio::time::sleep_until(d) => None,
                },
                None => Some(rx.recv().await),
            };
            match next {
                Some(Some(line)) => {
                    if batch.is_empty() {
                        deadline = Some(Instant::now() + self.config.flush_interval);
                    }
                    batch.push(line);
                    if batch.len() >= self.config.batch_size {
                        self.deliver(std::mem::take(&mut batch), &mut report).await;
                        deadline = None;
                    }
                }
                Some(None) => {
                    if !batch.is_empty() {
                        self.deliver(std::mem::take(&mut batch), &mut report).await;
                    }
                    return report;
                }
                None => {
                    self.deliver(std::mem::take(&mut batch), &mut report).await;
                    deadline = None;
                }
            }
        }
    }

    async fn deliver(&self, batch: Vec<String>, report: &mut DeliveryReport) {
        let body = batch.join("\n");
        let mut delay = self.config.retry.backoff;
        for attempt in 1..=self.config.retry.max_attempts.max(1) {
            match self.transport.post(&self.url, &self.session, body.clone()).await {
                Ok(()) => {
                    report.batches_sent += 1;
                    report.records_sent += batch.len();
                    return;
                }
                Err(e) => {
                    tracing::debug!(attempt, error = %e, url = %self.url, "log batch delivery failed");
                    if attempt < self.config.retry.max_attempts {
                        tokio::time::sleep(delay).await;
                        delay *= 2;
                    }
                }
            }
        }
        tracing::warn!(records = batch.len(), path = %self.dead_path.display(), "log batch parked in dead-letter file");
        report.batches_dead += 1;
        report.records_dead += batch.len();
        if let Err(e) = append_lines(&self.dead_path, &batch) {
            tracing::error!(error = %e, "dead-letter write failed; records remain in the session file");
        }
    }
}

fn append_lines(path: &Path, lines: &[String]) -> io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    for l in lines {
        writeln!(f, "{l}")?;
    }
    f.flush()
}
