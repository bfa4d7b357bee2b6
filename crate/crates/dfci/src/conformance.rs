//! Trace conformance checking.
//!
//! A trace conforms to a document when some fragment expansion (opt
//! choices and loop counts within declared bounds) makes the trace
//! exactly a linearization of the expanded event graph — so a complete
//! run must contain every mandatory message. [`CheckMode::Prefix`]
//! instead accepts any trace that is a prefix of such a linearization,
//! for in-progress cases.
//!
//! Checking is a single left-to-right pass per candidate expansion with
//! a frontier of enabled events; backtracking happens only over the
//! fragment choice points. Loop-count ambiguity is resolved by that
//! search, never by greedy matching.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    compile, expand, Choice, ChoiceKind, EventGraph, EventKind, ExpandedGraph, FragmentExpansion,
    ModelError, OccurrenceId,
};
use crate::model::MscDocument;
use crate::trace::TraceEvent;

#[derive(Debug, Error)]
pub enum ConformanceError {
    #[error("trace names protocol '{found}' but the document is '{expected}' (seq {seq})")]
    ProtocolMismatch {
        expected: String,
        found: String,
        seq: u64,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Conformant,
    Nonconformant,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Conformant => f.write_str("conformant"),
            Verdict::Nonconformant => f.write_str("nonconformant"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    MissingMessage,
    OrderViolation,
    UnknownMessage,
    LifelineMismatch,
    RecvBeforeSend,
    LoopBoundExceeded,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::MissingMessage => "MissingMessage",
            ViolationKind::OrderViolation => "OrderViolation",
            ViolationKind::UnknownMessage => "UnknownMessage",
            ViolationKind::LifelineMismatch => "LifelineMismatch",
            ViolationKind::RecvBeforeSend => "RecvBeforeSend",
            ViolationKind::LoopBoundExceeded => "LoopBoundExceeded",
        };
        f.write_str(s)
    }
}

/// Where a violation was observed: a trace sequence number, or the end
/// of the trace for omissions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationAt {
    Seq(u64),
    End,
}

impl fmt::Display for ViolationAt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationAt::Seq(s) => write!(f, "{s}"),
            ViolationAt::End => f.write_str("end"),
        }
    }
}

impl Serialize for ViolationAt {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ViolationAt::Seq(s) => serializer.serialize_u64(*s),
            ViolationAt::End => serializer.serialize_str("end"),
        }
    }
}

impl<'de> Deserialize<'de> for ViolationAt {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = ViolationAt;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a sequence number or \"end\"")
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<ViolationAt, E> {
                Ok(ViolationAt::Seq(v))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<ViolationAt, E> {
                if v == "end" {
                    Ok(ViolationAt::End)
                } else {
                    Err(E::custom("expected \"end\""))
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub msg_id: String,
    pub at: ViolationAt,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformanceReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

impl Serialize for ConformanceReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ConformanceReport", 2)?;
        s.serialize_field("verdict", &self.verdict)?;
        s.serialize_field("violations", &self.violations)?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// The trace must be a whole linearization.
    Complete,
    /// The trace may stop early; what was observed must still be a
    /// prefix of some linearization.
    Prefix,
}

/// Check a complete trace against a document.
pub fn check_trace(
    doc: &MscDocument,
    trace: &[TraceEvent],
) -> Result<ConformanceReport, ConformanceError> {
    check_trace_mode(doc, trace, CheckMode::Complete)
}

pub fn check_trace_mode(
    doc: &MscDocument,
    trace: &[TraceEvent],
    mode: CheckMode,
) -> Result<ConformanceReport, ConformanceError> {
    for event in trace {
        if event.protocol != doc.name {
            return Err(ConformanceError::ProtocolMismatch {
                expected: doc.name.clone(),
                found: event.protocol.clone(),
                seq: event.seq,
            });
        }
    }
    let graph = compile(doc)?;
    let norm = normalize(doc, trace);

    let search = search_expansions(&graph, &norm, mode);
    if search.matched {
        return Ok(ConformanceReport {
            verdict: Verdict::Conformant,
            violations: Vec::new(),
        });
    }

    let violations = diagnose(&graph, &norm, mode, &search);
    debug_assert!(!violations.is_empty());
    Ok(ConformanceReport {
        verdict: Verdict::Nonconformant,
        violations,
    })
}

struct NormEvent<'a> {
    seq: u64,
    msg_id: &'a str,
    kind: EventKind,
    from: &'a str,
    to: &'a str,
    canonical_from: Option<&'a str>,
    canonical_to: Option<&'a str>,
}

impl NormEvent<'_> {
    fn lane(&self) -> Option<&str> {
        match self.kind {
            EventKind::Send => self.canonical_from,
            EventKind::Recv => self.canonical_to,
        }
    }
}

fn normalize<'a>(doc: &'a MscDocument, trace: &'a [TraceEvent]) -> Vec<NormEvent<'a>> {
    trace
        .iter()
        .map(|e| NormEvent {
            seq: e.seq,
            msg_id: &e.msg_id,
            kind: e.kind,
            from: &e.from,
            to: &e.to,
            canonical_from: doc.resolve_lifeline(&e.from),
            canonical_to: doc.resolve_lifeline(&e.to),
        })
        .collect()
}

enum MatchOutcome {
    Matched,
    /// The trace event at this index matched no enabled event.
    FailedAt {
        trace_idx: usize,
        expected: Option<(String, EventKind)>,
    },
    /// The trace ended while the expansion still expected events.
    Exhausted {
        msg_id: String,
        kind: EventKind,
    },
}

struct SearchResult {
    matched: bool,
    /// Longest-matching attempt seen, for diagnostics: number of matched
    /// events and how that attempt finished.
    best_matched: usize,
    best_outcome: Option<MatchOutcome>,
}

/// Enumerate candidate expansions in canonical order (choice points in
/// declaration order; loops from the smallest count upward, opts taken
/// before skipped) and run the frontier matcher against each.
fn search_expansions(graph: &EventGraph, norm: &[NormEvent<'_>], mode: CheckMode) -> SearchResult {
    let mut send_counts: BTreeMap<&str, u64> = BTreeMap::new();
    for e in norm {
        if e.kind == EventKind::Send {
            *send_counts.entry(e.msg_id).or_default() += 1;
        }
    }

    let candidates: Vec<Vec<Choice>> = graph
        .choice_points()
        .iter()
        .map(|cp| match cp.kind {
            ChoiceKind::Opt | ChoiceKind::OptionalMessage => vec![Choice::Take, Choice::Skip],
            ChoiceKind::Loop { min_iter, max_iter } => {
                // Trace send counts bound how far any matching expansion
                // can iterate, so the candidate set stays finite even for
                // unbounded loops.
                let lo = min_iter.max(1);
                let observed = loop_observed_bound(graph, cp.id.0, &send_counts);
                let mut hi = lo.max(observed);
                if let crate::model::LoopBound::Finite(max) = max_iter {
                    hi = hi.min(max);
                }
                let mut v: Vec<Choice> = Vec::new();
                if min_iter == 0 {
                    v.push(Choice::Iterations(0));
                }
                v.extend((lo..=hi).map(Choice::Iterations));
                v
            }
        })
        .collect();

    let mut result = SearchResult {
        matched: false,
        best_matched: 0,
        best_outcome: None,
    };
    let mut assignment = FragmentExpansion::default();
    try_assignments(
        graph,
        norm,
        mode,
        &candidates,
        0,
        &mut assignment,
        &mut result,
    );
    result
}

fn loop_observed_bound(
    graph: &EventGraph,
    choice_idx: usize,
    send_counts: &BTreeMap<&str, u64>,
) -> u32 {
    let mut bound = 0u64;
    for occ in graph.occurrences() {
        if occ.choice_path.iter().any(|c| c.0 == choice_idx) {
            let count = send_counts.get(occ.msg_id.as_str()).copied().unwrap_or(0);
            bound = bound.max(count);
        }
    }
    bound.min(u64::from(u32::MAX)) as u32
}

fn try_assignments(
    graph: &EventGraph,
    norm: &[NormEvent<'_>],
    mode: CheckMode,
    candidates: &[Vec<Choice>],
    depth: usize,
    assignment: &mut FragmentExpansion,
    result: &mut SearchResult,
) -> bool {
    if depth == candidates.len() {
        let expanded = match expand(graph, assignment) {
            Ok(e) => e,
            Err(_) => return false,
        };
        let (matched_len, outcome) = match_frontier(graph, &expanded, norm, mode);
        if matches!(outcome, MatchOutcome::Matched) {
            result.matched = true;
            return true;
        }
        if result.best_outcome.is_none() || matched_len > result.best_matched {
            result.best_matched = matched_len;
            result.best_outcome = Some(outcome);
        }
        return false;
    }
    let id = graph.choice_points()[depth].id;
    for &choice in &candidates[depth] {
        assignment.set(id, choice);
        if try_assignments(graph, norm, mode, candidates, depth + 1, assignment, result) {
            return true;
        }
    }
    false
}

/// Deterministic single pass: a trace event may only consume the head of
/// its own lifeline's lane, and a receive additionally requires its send
/// to have been consumed.
fn match_frontier(
    graph: &EventGraph,
    expanded: &ExpandedGraph,
    norm: &[NormEvent<'_>],
    mode: CheckMode,
) -> (usize, MatchOutcome) {
    let mut next: BTreeMap<&str, usize> = expanded.lanes.keys().map(|k| (k.as_str(), 0)).collect();
    let mut consumed = vec![false; expanded.events.len()];

    for (i, ev) in norm.iter().enumerate() {
        let fail = |expected| {
            (
                i,
                MatchOutcome::FailedAt {
                    trace_idx: i,
                    expected,
                },
            )
        };
        let Some(lane_name) = ev.lane() else {
            return fail(None);
        };
        let Some(lane) = expanded.lanes.get(lane_name) else {
            return fail(None);
        };
        let pos = next[lane_name];
        let Some(&cand) = lane.get(pos) else {
            return fail(None);
        };
        let cand_event = &expanded.events[cand];
        let occ = &graph.occurrences()[cand_event.occurrence];
        let expected = Some((occ.msg_id.clone(), cand_event.kind));
        let signature_ok = occ.msg_id == ev.msg_id
            && cand_event.kind == ev.kind
            && ev.canonical_from == Some(occ.canonical_from.as_str())
            && ev.canonical_to == Some(occ.canonical_to.as_str());
        let send_ok = expanded.send_of[cand].is_none_or(|s| consumed[s]);
        if !signature_ok || !send_ok {
            return fail(expected);
        }
        consumed[cand] = true;
        *next.get_mut(lane_name).unwrap() = pos + 1;
    }

    if mode == CheckMode::Prefix {
        return (norm.len(), MatchOutcome::Matched);
    }
    let mut leftover: Option<usize> = None;
    for (idx, c) in consumed.iter().enumerate() {
        if !c {
            let better = leftover
                .map(|cur| expanded.events[idx].unrolled_pos < expanded.events[cur].unrolled_pos)
                .unwrap_or(true);
            if better {
                leftover = Some(idx);
            }
        }
    }
    match leftover {
        None => (norm.len(), MatchOutcome::Matched),
        Some(idx) => {
            let ev = &expanded.events[idx];
            (
                norm.len(),
                MatchOutcome::Exhausted {
                    msg_id: graph.occurrences()[ev.occurrence].msg_id.clone(),
                    kind: ev.kind,
                },
            )
        }
    }
}

/// Localize the first failure of each violation kind. Ties between
/// simultaneous omissions break by lexicographic message id.
fn diagnose(
    graph: &EventGraph,
    norm: &[NormEvent<'_>],
    mode: CheckMode,
    search: &SearchResult,
) -> Vec<Violation> {
    let mut firsts: BTreeMap<ViolationKind, Violation> = BTreeMap::new();
    fn record(
        firsts: &mut BTreeMap<ViolationKind, Violation>,
        kind: ViolationKind,
        msg_id: &str,
        at: ViolationAt,
        explanation: String,
    ) {
        firsts.entry(kind).or_insert(Violation {
            kind,
            msg_id: msg_id.to_string(),
            at,
            explanation,
        });
    }

    let occ_by_msg: BTreeMap<&str, OccurrenceId> = graph
        .occurrences()
        .iter()
        .enumerate()
        .map(|(i, o)| (o.msg_id.as_str(), OccurrenceId(i)))
        .collect();

    // Per-event checks, in sequence order.
    let mut sends: BTreeMap<&str, u64> = BTreeMap::new();
    let mut recvs: BTreeMap<&str, u64> = BTreeMap::new();
    for ev in norm {
        match occ_by_msg.get(ev.msg_id) {
            None => record(
                &mut firsts,
                ViolationKind::UnknownMessage,
                ev.msg_id,
                ViolationAt::Seq(ev.seq),
                format!(
                    "message '{}' does not appear in document '{}'",
                    ev.msg_id,
                    graph.doc_name()
                ),
            ),
            Some(&occ_id) => {
                let occ = graph.occurrence(occ_id);
                let endpoints_ok = ev.canonical_from == Some(occ.canonical_from.as_str())
                    && ev.canonical_to == Some(occ.canonical_to.as_str());
                if !endpoints_ok {
                    record(
                        &mut firsts,
                        ViolationKind::LifelineMismatch,
                        ev.msg_id,
                        ViolationAt::Seq(ev.seq),
                        format!(
                            "message '{}' is charted {} -> {}, observed {} -> {}",
                            ev.msg_id, occ.from, occ.to, ev.from, ev.to
                        ),
                    );
                }
            }
        }
        match ev.kind {
            EventKind::Send => *sends.entry(ev.msg_id).or_default() += 1,
            EventKind::Recv => {
                let s = sends.get(ev.msg_id).copied().unwrap_or(0);
                let r = recvs.entry(ev.msg_id).or_default();
                if *r >= s {
                    record(
                        &mut firsts,
                        ViolationKind::RecvBeforeSend,
                        ev.msg_id,
                        ViolationAt::Seq(ev.seq),
                        format!(
                            "receive of message '{}' observed before a matching send",
                            ev.msg_id
                        ),
                    );
                }
                *r += 1;
            }
        }
    }

    // Instance-count checks against the bounds any expansion allows.
    for (i, occ) in graph.occurrences().iter().enumerate() {
        let occ_id = OccurrenceId(i);
        let observed = sends.get(occ.msg_id.as_str()).copied().unwrap_or(0);
        let (_, max) = graph.instance_bounds(occ_id);
        if let Some(max) = max {
            if observed > max {
                let seq = nth_send_seq(norm, &occ.msg_id, max);
                let (kind, explanation) = if graph.in_loop(occ_id) {
                    (
                        ViolationKind::LoopBoundExceeded,
                        format!(
                            "message '{}' observed {} times, loop bounds admit at most {}",
                            occ.msg_id, observed, max
                        ),
                    )
                } else {
                    (
                        ViolationKind::OrderViolation,
                        format!(
                            "message '{}' observed {} times but can occur at most {}",
                            occ.msg_id, observed, max
                        ),
                    )
                };
                record(&mut firsts, kind, &occ.msg_id, seq, explanation);
            }
        }
    }

    if mode == CheckMode::Complete {
        let mut missing: Vec<&str> = Vec::new();
        for (i, occ) in graph.occurrences().iter().enumerate() {
            let (min, _) = graph.instance_bounds(OccurrenceId(i));
            let complete = sends
                .get(occ.msg_id.as_str())
                .copied()
                .unwrap_or(0)
                .min(recvs.get(occ.msg_id.as_str()).copied().unwrap_or(0));
            if complete < min {
                missing.push(&occ.msg_id);
            }
        }
        missing.sort();
        if let Some(first) = missing.first() {
            record(
                &mut firsts,
                ViolationKind::MissingMessage,
                first,
                ViolationAt::End,
                format!("mandatory message '{first}' was never completed in the trace"),
            );
        }
    }

    // Fall back to the longest-matching attempt for order problems the
    // static passes cannot see.
    match &search.best_outcome {
        Some(MatchOutcome::FailedAt {
            trace_idx,
            expected,
        }) => {
            let ev = &norm[*trace_idx];
            let already_located = firsts.values().any(|v| v.at == ViolationAt::Seq(ev.seq));
            if !already_located || firsts.is_empty() {
                let hint = expected
                    .as_ref()
                    .map(|(m, k)| format!("; the chart expects {k} of '{m}' here"))
                    .unwrap_or_default();
                record(
                    &mut firsts,
                    ViolationKind::OrderViolation,
                    ev.msg_id,
                    ViolationAt::Seq(ev.seq),
                    format!(
                        "{} of message '{}' is not enabled at seq {}{}",
                        ev.kind, ev.msg_id, ev.seq, hint
                    ),
                );
            }
        }
        Some(MatchOutcome::Exhausted { msg_id, kind }) => {
            record(
                &mut firsts,
                ViolationKind::MissingMessage,
                msg_id,
                ViolationAt::End,
                format!("trace ended while the chart still expects {kind} of '{msg_id}'"),
            );
        }
        _ => {}
    }

    let mut out: Vec<Violation> = firsts.into_values().collect();
    out.sort_by(|a, b| a.at.cmp(&b.at).then(a.kind.cmp(&b.kind)));
    out
}

fn nth_send_seq(norm: &[NormEvent<'_>], msg_id: &str, skip: u64) -> ViolationAt {
    let mut seen = 0u64;
    for ev in norm {
        if ev.kind == EventKind::Send && ev.msg_id == msg_id {
            if seen == skip {
                return ViolationAt::Seq(ev.seq);
            }
            seen += 1;
        }
    }
    ViolationAt::End
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Fragment, Item, Lifeline, LoopBound, MessageSpec, MscDocument};
    use crate::trace::TraceEvent;
    use std::collections::BTreeMap;

    pub(crate) fn trace_event(
        seq: u64,
        protocol: &str,
        msg_id: &str,
        kind: EventKind,
        from: &str,
        to: &str,
    ) -> TraceEvent {
        TraceEvent {
            seq,
            ts: format!("2026-01-01T00:00:{:02}Z", seq % 60),
            protocol: protocol.into(),
            msg_id: msg_id.into(),
            kind,
            from: from.into(),
            to: to.into(),
            payload_digest: "0".repeat(64),
            meta: BTreeMap::new(),
        }
    }

    fn doc_chain() -> MscDocument {
        let mut doc = MscDocument::new("p");
        doc.lifelines = vec![Lifeline::new("A"), Lifeline::new("B"), Lifeline::new("C")];
        doc.body = vec![
            Item::Message(MessageSpec::new("1", "A", "B", "m1")),
            Item::Message(MessageSpec::new("2", "B", "C", "m2")),
        ];
        doc
    }

    fn full_trace(doc: &MscDocument) -> Vec<TraceEvent> {
        let mut out = Vec::new();
        for (i, m) in doc.messages().iter().enumerate() {
            out.push(trace_event(
                2 * i as u64,
                &doc.name,
                &m.msg_id,
                EventKind::Send,
                &m.from,
                &m.to,
            ));
            out.push(trace_event(
                2 * i as u64 + 1,
                &doc.name,
                &m.msg_id,
                EventKind::Recv,
                &m.from,
                &m.to,
            ));
        }
        out
    }

    #[test]
    fn canonical_trace_is_conformant() {
        let doc = doc_chain();
        let report = check_trace(&doc, &full_trace(&doc)).unwrap();
        assert_eq!(report.verdict, Verdict::Conformant);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn empty_trace_reports_missing_message() {
        let doc = doc_chain();
        let report = check_trace(&doc, &[]).unwrap();
        assert_eq!(report.verdict, Verdict::Nonconformant);
        assert_eq!(report.violations[0].kind, ViolationKind::MissingMessage);
        assert_eq!(report.violations[0].msg_id, "1");
    }

    #[test]
    fn prefix_mode_accepts_in_progress_trace() {
        let doc = doc_chain();
        let mut trace = full_trace(&doc);
        trace.truncate(2);
        assert_eq!(
            check_trace(&doc, &trace).unwrap().verdict,
            Verdict::Nonconformant
        );
        assert_eq!(
            check_trace_mode(&doc, &trace, CheckMode::Prefix)
                .unwrap()
                .verdict,
            Verdict::Conformant
        );
    }

    #[test]
    fn unknown_message_and_lifeline_mismatch_are_localized() {
        let doc = doc_chain();
        let mut trace = full_trace(&doc);
        trace.push(trace_event(10, "p", "9", EventKind::Send, "A", "B"));
        let report = check_trace(&doc, &trace).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::UnknownMessage && v.at == ViolationAt::Seq(10)));

        let mut trace = full_trace(&doc);
        trace[0].from = "C".into();
        let report = check_trace(&doc, &trace).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::LifelineMismatch && v.at == ViolationAt::Seq(0)));
    }

    #[test]
    fn recv_before_send_is_reported() {
        let doc = doc_chain();
        let mut trace = full_trace(&doc);
        trace.swap(0, 1);
        for (i, e) in trace.iter_mut().enumerate() {
            e.seq = i as u64;
        }
        let report = check_trace(&doc, &trace).unwrap();
        assert_eq!(report.verdict, Verdict::Nonconformant);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::RecvBeforeSend && v.at == ViolationAt::Seq(0)));
    }

    #[test]
    fn order_violation_when_later_message_jumps_ahead() {
        let doc = doc_chain();
        let t = full_trace(&doc);
        // send 2, recv 2, send 1, recv 1
        let trace = vec![t[2].clone(), t[3].clone(), t[0].clone(), t[1].clone()];
        let mut trace: Vec<TraceEvent> = trace;
        for (i, e) in trace.iter_mut().enumerate() {
            e.seq = i as u64;
        }
        let report = check_trace(&doc, &trace).unwrap();
        assert_eq!(report.verdict, Verdict::Nonconformant);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::OrderViolation && v.at == ViolationAt::Seq(0)));
    }

    #[test]
    fn loop_bound_exceeded_is_reported() {
        let mut doc = MscDocument::new("p");
        doc.lifelines = vec![Lifeline::new("A"), Lifeline::new("B")];
        doc.body = vec![Item::Fragment(Fragment::repeated(
            1,
            LoopBound::Finite(2),
            vec![Item::Message(MessageSpec::new("1", "A", "B", "q"))],
        ))];
        let mut trace = Vec::new();
        for i in 0..3u64 {
            trace.push(trace_event(2 * i, "p", "1", EventKind::Send, "A", "B"));
            trace.push(trace_event(2 * i + 1, "p", "1", EventKind::Recv, "A", "B"));
        }
        let report = check_trace(&doc, &trace).unwrap();
        assert_eq!(report.verdict, Verdict::Nonconformant);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::LoopBoundExceeded && v.at == ViolationAt::Seq(4)));
    }

    #[test]
    fn loop_counts_are_searched_not_guessed() {
        let mut doc = MscDocument::new("p");
        doc.lifelines = vec![Lifeline::new("A"), Lifeline::new("B")];
        doc.body = vec![Item::Fragment(Fragment::repeated(
            1,
            LoopBound::Unbounded,
            vec![
                Item::Message(MessageSpec::new("1", "A", "B", "q")),
                Item::Message(MessageSpec::new("2", "B", "A", "a")),
            ],
        ))];
        let mut trace = Vec::new();
        let mut seq = 0;
        for _ in 0..3 {
            for (m, from, to) in [("1", "A", "B"), ("2", "B", "A")] {
                trace.push(trace_event(seq, "p", m, EventKind::Send, from, to));
                seq += 1;
                trace.push(trace_event(seq, "p", m, EventKind::Recv, from, to));
                seq += 1;
            }
        }
        assert_eq!(
            check_trace(&doc, &trace).unwrap().verdict,
            Verdict::Conformant
        );
    }

    #[test]
    fn protocol_mismatch_is_an_error() {
        let doc = doc_chain();
        let trace = vec![trace_event(0, "other", "1", EventKind::Send, "A", "B")];
        assert!(matches!(
            check_trace(&doc, &trace),
            Err(ConformanceError::ProtocolMismatch { .. })
        ));
    }

    #[test]
    fn reports_are_deterministic() {
        let doc = doc_chain();
        let mut trace = full_trace(&doc);
        trace.swap(0, 1);
        for (i, e) in trace.iter_mut().enumerate() {
            e.seq = i as u64;
        }
        let a = serde_json::to_string(&check_trace(&doc, &trace).unwrap()).unwrap();
        let b = serde_json::to_string(&check_trace(&doc, &trace).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
