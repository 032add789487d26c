//! Command-line companion to `asymlab-core`: CSV ingestion, schema-versioned
//! reports, and the command dispatcher shared by the binary and its tests.

pub mod dispatch;
pub mod error;
pub mod ingest;
pub mod report;
