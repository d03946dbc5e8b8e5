//! Support code for the end-to-end acceptance run.

pub mod oracle;
pub mod report;
pub mod schedule;
