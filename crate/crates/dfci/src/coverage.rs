//! Custody coverage: did the ledger span the document's custody window?
//!
//! The window runs from the first trace event of the span-start message
//! to the last trace event of the span-end message. Coverage holds when
//! a seize entry is timestamped no later than the window opens, a
//! present (or final) entry no earlier than it closes, and every examine
//! entry falls inside those custody boundaries. Comparisons use the `ts`
//! fields; `seq` breaks ties between trace events with equal timestamps.

use chrono::{DateTime, FixedOffset};
use serde::Serialize;

use crate::custody::{CustodyAction, CustodyChain, CustodyError, VerifyResult};
use crate::model::MscDocument;
use crate::trace::TraceEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageGapKind {
    SpanStartUncovered,
    SpanEndUncovered,
    ExamineOutsideWindow,
    SpanEventMissing,
}

impl std::fmt::Display for CoverageGapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CoverageGapKind::SpanStartUncovered => "span_start_uncovered",
            CoverageGapKind::SpanEndUncovered => "span_end_uncovered",
            CoverageGapKind::ExamineOutsideWindow => "examine_outside_window",
            CoverageGapKind::SpanEventMissing => "span_event_missing",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageGap {
    pub kind: CoverageGapKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub covered: bool,
    pub gaps: Vec<CoverageGap>,
}

fn parse_ts(ts: &str) -> Result<DateTime<FixedOffset>, CustodyError> {
    DateTime::parse_from_rfc3339(ts).map_err(|_| CustodyError::InvalidTimestamp(ts.to_string()))
}

pub fn check_custody_coverage(
    doc: &MscDocument,
    trace: &[TraceEvent],
    chain: &CustodyChain,
) -> Result<CoverageReport, CustodyError> {
    let span = doc
        .custody_span
        .as_ref()
        .ok_or(CustodyError::NoCustodySpan)?;
    if let VerifyResult::Invalid { index, check, .. } = chain.verify() {
        return Err(CustodyError::BrokenChain { index, check });
    }

    let mut gaps = Vec::new();

    // Window boundaries from the trace, tie-broken by seq.
    let start_event = trace
        .iter()
        .filter(|e| e.msg_id == span.start)
        .min_by_key(|e| e.seq);
    let end_event = trace
        .iter()
        .filter(|e| e.msg_id == span.end)
        .max_by_key(|e| e.seq);

    let (Some(start_event), Some(end_event)) = (start_event, end_event) else {
        let missing = if start_event.is_none() {
            &span.start
        } else {
            &span.end
        };
        gaps.push(CoverageGap {
            kind: CoverageGapKind::SpanEventMissing,
            detail: format!("trace contains no event of span message '{missing}'"),
        });
        return Ok(CoverageReport {
            covered: false,
            gaps,
        });
    };
    let window_open = parse_ts(&start_event.ts)?;
    let window_close = parse_ts(&end_event.ts)?;

    let seize = chain
        .entries
        .iter()
        .filter(|e| e.action == CustodyAction::Seize)
        .map(|e| parse_ts(&e.ts).map(|t| (t, e.index)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .min();
    let custody_open = match seize {
        Some((ts, _)) if ts <= window_open => Some(ts),
        Some((ts, index)) => {
            gaps.push(CoverageGap {
                kind: CoverageGapKind::SpanStartUncovered,
                detail: format!(
                    "earliest seize entry (index {index}) is timestamped {ts} \
                     after the span-start message '{}' at {}",
                    span.start, start_event.ts
                ),
            });
            Some(ts)
        }
        None => {
            gaps.push(CoverageGap {
                kind: CoverageGapKind::SpanStartUncovered,
                detail: "ledger contains no seize entry".to_string(),
            });
            None
        }
    };

    // A closing entry is a present action, or failing that the final entry.
    let closing = chain
        .entries
        .iter()
        .rfind(|e| e.action == CustodyAction::Present)
        .or(chain.entries.last());
    let custody_close = match closing {
        Some(entry) => {
            let ts = parse_ts(&entry.ts)?;
            if ts < window_close {
                gaps.push(CoverageGap {
                    kind: CoverageGapKind::SpanEndUncovered,
                    detail: format!(
                        "custody ends at {} (entry {}) before the span-end message '{}' at {}",
                        entry.ts, entry.index, span.end, end_event.ts
                    ),
                });
            }
            Some(ts)
        }
        None => {
            gaps.push(CoverageGap {
                kind: CoverageGapKind::SpanEndUncovered,
                detail: "ledger is empty".to_string(),
            });
            None
        }
    };

    for entry in chain
        .entries
        .iter()
        .filter(|e| e.action == CustodyAction::Examine)
    {
        let ts = parse_ts(&entry.ts)?;
        let before_open = custody_open.map(|open| ts < open).unwrap_or(true);
        let after_close = custody_close.map(|close| ts > close).unwrap_or(true);
        if before_open || after_close {
            gaps.push(CoverageGap {
                kind: CoverageGapKind::ExamineOutsideWindow,
                detail: format!(
                    "examine entry {} at {} lies outside the custody window",
                    entry.index, entry.ts
                ),
            });
        }
    }

    Ok(CoverageReport {
        covered: gaps.is_empty(),
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::custody::{open_chain, EntryDraft};
    use crate::graph::EventKind;
    use crate::model::{CustodySpan, Item, Lifeline, MessageSpec};
    use std::collections::BTreeMap;

    fn ev(seq: u64, msg: &str, kind: EventKind, ts: &str) -> TraceEvent {
        TraceEvent {
            seq,
            ts: ts.into(),
            protocol: "p".into(),
            msg_id: msg.into(),
            kind,
            from: "A".into(),
            to: "B".into(),
            payload_digest: "0".repeat(64),
            meta: BTreeMap::new(),
        }
    }

    fn doc() -> MscDocument {
        let mut doc = MscDocument::new("p");
        doc.lifelines = vec![Lifeline::new("A"), Lifeline::new("B")];
        doc.body = vec![
            Item::Message(MessageSpec::new("1", "A", "B", "seize")),
            Item::Message(MessageSpec::new("2", "B", "A", "report")),
        ];
        doc.custody_span = Some(CustodySpan {
            start: "1".into(),
            end: "2".into(),
        });
        doc
    }

    fn trace() -> Vec<TraceEvent> {
        vec![
            ev(0, "1", EventKind::Send, "2026-01-01T00:00:00Z"),
            ev(1, "1", EventKind::Recv, "2026-01-01T00:00:01Z"),
            ev(2, "2", EventKind::Send, "2026-01-01T00:00:02Z"),
            ev(3, "2", EventKind::Recv, "2026-01-01T00:00:03Z"),
        ]
    }

    fn draft(ts: &str, action: CustodyAction) -> EntryDraft {
        EntryDraft::new(ts, "A", action, "device_set", "0".repeat(64))
    }

    #[test]
    fn seize_to_present_window_is_covered() {
        let chain = open_chain("p", draft("2026-01-01T00:00:00Z", CustodyAction::Seize))
            .unwrap()
            .append_entry(draft("2026-01-01T00:00:02Z", CustodyAction::Examine))
            .unwrap()
            .append_entry(draft("2026-01-01T00:00:03Z", CustodyAction::Present))
            .unwrap();
        let report = check_custody_coverage(&doc(), &trace(), &chain).unwrap();
        assert!(report.covered, "{report:?}");
    }

    #[test]
    fn chain_ending_early_reports_gap_at_span_end() {
        let chain = open_chain("p", draft("2026-01-01T00:00:00Z", CustodyAction::Seize)).unwrap();
        let report = check_custody_coverage(&doc(), &trace(), &chain).unwrap();
        assert!(!report.covered);
        assert!(report
            .gaps
            .iter()
            .any(|g| g.kind == CoverageGapKind::SpanEndUncovered));
    }

    #[test]
    fn examine_before_seizure_is_a_gap() {
        // Opening seize is late; the examine sits before it.
        let chain = open_chain("p", draft("2026-01-01T00:00:02Z", CustodyAction::Seize))
            .unwrap()
            .append_entry(draft("2026-01-01T00:00:01Z", CustodyAction::Examine))
            .unwrap()
            .append_entry(draft("2026-01-01T00:00:03Z", CustodyAction::Present))
            .unwrap();
        let report = check_custody_coverage(&doc(), &trace(), &chain).unwrap();
        assert!(!report.covered);
        assert!(report
            .gaps
            .iter()
            .any(|g| g.kind == CoverageGapKind::ExamineOutsideWindow));
    }

    #[test]
    fn missing_span_is_an_error() {
        let mut doc = doc();
        doc.custody_span = None;
        let chain = open_chain("p", draft("2026-01-01T00:00:00Z", CustodyAction::Seize)).unwrap();
        assert!(matches!(
            check_custody_coverage(&doc, &trace(), &chain),
            Err(CustodyError::NoCustodySpan)
        ));
    }

    #[test]
    fn broken_chain_is_an_error() {
        let mut chain = open_chain("p", draft("2026-01-01T00:00:00Z", CustodyAction::Seize))
            .unwrap()
            .append_entry(draft("2026-01-01T00:00:03Z", CustodyAction::Present))
            .unwrap();
        chain.entries[1].evidence_id = "other".into();
        assert!(matches!(
            check_custody_coverage(&doc(), &trace(), &chain),
            Err(CustodyError::BrokenChain { index: 1, .. })
        ));
    }
}
