//! Brute-force conformance oracle.
//!
//! Independent of the incremental checker: it enumerates every fragment
//! expansion and every linearization of each, and declares a trace
//! conformant when its `(msg_id, kind)` sequence appears in that union.
//! Only usable on small documents with bounded loops; the incremental
//! checker must agree with it everywhere the oracle is defined.

use crate::conformance::{ConformanceError, Verdict};
use crate::graph::{
    compile, expand, Choice, ChoiceKind, EventGraph, EventKind, FragmentExpansion, ModelError,
};
use crate::linearize::for_each_linearization;
use crate::model::{LoopBound, MscDocument};
use crate::trace::TraceEvent;

/// Most linearizations enumerated per expansion before giving up.
pub const ORACLE_CAP: usize = 250_000;

pub fn oracle_check(doc: &MscDocument, trace: &[TraceEvent]) -> Result<Verdict, ConformanceError> {
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

    let candidates: Vec<Vec<Choice>> = graph
        .choice_points()
        .iter()
        .map(|cp| match cp.kind {
            ChoiceKind::Opt | ChoiceKind::OptionalMessage => Ok(vec![Choice::Take, Choice::Skip]),
            ChoiceKind::Loop { min_iter, max_iter } => match max_iter {
                LoopBound::Finite(max) => Ok((min_iter..=max).map(Choice::Iterations).collect()),
                LoopBound::Unbounded => Err(ConformanceError::Model(ModelError::CapExceeded {
                    cap: ORACLE_CAP,
                })),
            },
        })
        .collect::<Result<_, _>>()?;

    let target: Vec<(&str, EventKind)> =
        trace.iter().map(|e| (e.msg_id.as_str(), e.kind)).collect();

    let mut assignment = FragmentExpansion::default();
    let found = visit(&graph, &candidates, 0, &mut assignment, &target)?;
    Ok(if found {
        Verdict::Conformant
    } else {
        Verdict::Nonconformant
    })
}

fn visit(
    graph: &EventGraph,
    candidates: &[Vec<Choice>],
    depth: usize,
    assignment: &mut FragmentExpansion,
    target: &[(&str, EventKind)],
) -> Result<bool, ConformanceError> {
    if depth == candidates.len() {
        let expanded = expand(graph, assignment).map_err(ConformanceError::Model)?;
        if expanded.events.len() != target.len() {
            return Ok(false);
        }
        let mut found = false;
        for_each_linearization(&expanded, ORACLE_CAP, |seq| {
            if found {
                return;
            }
            let matches = seq.iter().zip(target.iter()).all(|(&idx, want)| {
                let ev = &expanded.events[idx];
                graph.occurrences()[ev.occurrence].msg_id == want.0 && ev.kind == want.1
            });
            if matches {
                found = true;
            }
        })
        .map_err(ConformanceError::Model)?;
        return Ok(found);
    }
    let id = graph.choice_points()[depth].id;
    for &choice in &candidates[depth] {
        assignment.set(id, choice);
        if visit(graph, candidates, depth + 1, assignment, target)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Item, Lifeline, MessageSpec};
    use std::collections::BTreeMap;

    fn ev(seq: u64, msg: &str, kind: EventKind, from: &str, to: &str) -> TraceEvent {
        TraceEvent {
            seq,
            ts: "2026-01-01T00:00:00Z".into(),
            protocol: "p".into(),
            msg_id: msg.into(),
            kind,
            from: from.into(),
            to: to.into(),
            payload_digest: "0".repeat(64),
            meta: BTreeMap::new(),
        }
    }

    fn one_message_doc() -> MscDocument {
        let mut doc = MscDocument::new("p");
        doc.lifelines = vec![Lifeline::new("A"), Lifeline::new("B")];
        doc.body = vec![Item::Message(MessageSpec::new("1", "A", "B", "m"))];
        doc
    }

    #[test]
    fn accepts_the_single_linearization() {
        let doc = one_message_doc();
        let trace = vec![
            ev(0, "1", EventKind::Send, "A", "B"),
            ev(1, "1", EventKind::Recv, "A", "B"),
        ];
        assert_eq!(oracle_check(&doc, &trace).unwrap(), Verdict::Conformant);
    }

    #[test]
    fn rejects_receive_before_send() {
        let doc = one_message_doc();
        let trace = vec![
            ev(0, "1", EventKind::Recv, "A", "B"),
            ev(1, "1", EventKind::Send, "A", "B"),
        ];
        assert_eq!(oracle_check(&doc, &trace).unwrap(), Verdict::Nonconformant);
    }

    #[test]
    fn accepts_any_interleaving_of_independent_messages() {
        let mut doc = MscDocument::new("p");
        doc.lifelines = vec![
            Lifeline::new("A"),
            Lifeline::new("B"),
            Lifeline::new("C"),
            Lifeline::new("D"),
        ];
        doc.body = vec![
            Item::Message(MessageSpec::new("1", "A", "B", "m")),
            Item::Message(MessageSpec::new("2", "C", "D", "m")),
        ];
        let trace = vec![
            ev(0, "1", EventKind::Send, "A", "B"),
            ev(1, "2", EventKind::Send, "C", "D"),
            ev(2, "2", EventKind::Recv, "C", "D"),
            ev(3, "1", EventKind::Recv, "A", "B"),
        ];
        assert_eq!(oracle_check(&doc, &trace).unwrap(), Verdict::Conformant);
    }
}
