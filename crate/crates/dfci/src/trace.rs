//! Recorded event traces and their JSON Lines file format.
//!
//! One event per line with exactly the fields
//! `seq, ts, protocol, msg_id, kind, from, to, payload_digest, meta`.
//! `ts` is an ISO-8601 UTC timestamp and is informational only; ordering
//! authority is `seq`, which must be strictly increasing within a file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::EventKind;

/// One observed send or receive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEvent {
    pub seq: u64,
    pub ts: String,
    pub protocol: String,
    pub msg_id: String,
    pub kind: EventKind,
    pub from: String,
    pub to: String,
    pub payload_digest: String,
    pub meta: BTreeMap<String, String>,
}

impl TraceEvent {
    /// Lifeline the event occurs on: the sender for sends, the receiver
    /// for receives.
    pub fn lifeline(&self) -> &str {
        match self.kind {
            EventKind::Send => &self.from,
            EventKind::Recv => &self.to,
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceReadError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: seq {seq} does not increase over the previous event (seq {prev})")]
    SeqNotIncreasing { line: usize, seq: u64, prev: u64 },
    #[error("line {line}: payload_digest is not 64 lowercase hex characters")]
    BadDigest { line: usize },
    #[error("line {line}: ts '{ts}' is not an ISO-8601 timestamp")]
    BadTimestamp { line: usize, ts: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn is_hex_digest(s: &str) -> bool {
    s.len() == 64
        && s.chars()
            .all(|c| c.is_ascii_digit() || ('a'..='f').contains(&c))
}

/// Parse a JSONL trace, enforcing the file-format invariants.
pub fn read_trace_str(input: &str) -> Result<Vec<TraceEvent>, TraceReadError> {
    let mut events = Vec::new();
    let mut prev_seq: Option<u64> = None;
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let event: TraceEvent =
            serde_json::from_str(raw).map_err(|source| TraceReadError::Json { line, source })?;
        if let Some(prev) = prev_seq {
            if event.seq <= prev {
                return Err(TraceReadError::SeqNotIncreasing {
                    line,
                    seq: event.seq,
                    prev,
                });
            }
        }
        if !is_hex_digest(&event.payload_digest) {
            return Err(TraceReadError::BadDigest { line });
        }
        if chrono::DateTime::parse_from_rfc3339(&event.ts).is_err() {
            return Err(TraceReadError::BadTimestamp {
                line,
                ts: event.ts.clone(),
            });
        }
        prev_seq = Some(event.seq);
        events.push(event);
    }
    Ok(events)
}

pub fn read_trace_file(path: &Path) -> Result<Vec<TraceEvent>, TraceReadError> {
    read_trace_str(&fs::read_to_string(path)?)
}

pub fn write_trace_str(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for event in events {
        out.push_str(&serde_json::to_string(event).expect("trace events serialize"));
        out.push('\n');
    }
    out
}

pub fn write_trace_file(path: &Path, events: &[TraceEvent]) -> std::io::Result<()> {
    fs::write(path, write_trace_str(events))
}
