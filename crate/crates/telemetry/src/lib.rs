//! Session logging in the XML-tag line format: typed records, a tolerant
//! parser, and a per-session sink that writes locally before delivering
//! batches to a collection endpoint.

mod parse;
mod record;
mod sink;

pub use parse::{parse_line, parse_log, ParseError, ParseErrorKind, ParsedLog};
pub use record::{chat_records, serialize_record, Action, LogRecord, RecordBody, UpgradeInfo, CHAT_CAP, TS_FORMAT};
pub use sink::{
    session_stem, DeliveryReport, HttpTransport, PostFuture, RetryPolicy, SessionSink, SinkConfig, SinkError,
    Transport, TransportError,
};
