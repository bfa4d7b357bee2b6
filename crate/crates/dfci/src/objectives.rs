//! Functional-objective evaluation over recorded traces.
//!
//! `eventually(m)` is satisfied when some receive of `m` exists in the
//! trace; its witness is the first such sequence number. `answered(q, a)`
//! is the delivery obligation for a request: vacuously satisfied when `q`
//! was never sent, otherwise it requires a receive of `a`. `conformant`
//! delegates to [`check_trace`] and is the only atom sensitive to event
//! order.

use serde::Serialize;

use crate::conformance::{check_trace, ConformanceError, Verdict};
use crate::graph::EventKind;
use crate::model::{MscDocument, Predicate};
use crate::trace::TraceEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveStatus {
    Satisfied,
    Violated,
}

impl std::fmt::Display for ObjectiveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectiveStatus::Satisfied => f.write_str("satisfied"),
            ObjectiveStatus::Violated => f.write_str("violated"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectiveResult {
    pub id: String,
    pub status: ObjectiveStatus,
    /// Sequence number at which the predicate first became satisfied;
    /// absent for vacuous satisfaction (for example an `answered` whose
    /// request never went out).
    pub witness: Option<u64>,
    /// Message ids whose delivery would have been needed, for violated
    /// objectives.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectiveReport {
    pub objectives: Vec<ObjectiveResult>,
}

impl ObjectiveReport {
    pub fn all_satisfied(&self) -> bool {
        self.objectives
            .iter()
            .all(|o| o.status == ObjectiveStatus::Satisfied)
    }

    pub fn result(&self, id: &str) -> Option<&ObjectiveResult> {
        self.objectives.iter().find(|o| o.id == id)
    }
}

enum Eval {
    Satisfied(Option<u64>),
    Violated(Vec<String>),
}

struct Ctx<'a> {
    doc: &'a MscDocument,
    trace: &'a [TraceEvent],
    conformant: Option<bool>,
}

impl Ctx<'_> {
    fn first_recv(&self, msg_id: &str) -> Option<u64> {
        self.trace
            .iter()
            .find(|e| e.kind == EventKind::Recv && e.msg_id == msg_id)
            .map(|e| e.seq)
    }

    fn was_sent(&self, msg_id: &str) -> bool {
        self.trace
            .iter()
            .any(|e| e.kind == EventKind::Send && e.msg_id == msg_id)
    }

    fn conformant(&mut self) -> Result<bool, ConformanceError> {
        if let Some(v) = self.conformant {
            return Ok(v);
        }
        let v = check_trace(self.doc, self.trace)?.verdict == Verdict::Conformant;
        self.conformant = Some(v);
        Ok(v)
    }
}

/// Evaluate every objective of the document over the trace. Objectives
/// are judged independently of each other and of the conformance verdict
/// (except where a predicate names `conformant` explicitly).
pub fn check_objectives(
    doc: &MscDocument,
    trace: &[TraceEvent],
) -> Result<ObjectiveReport, ConformanceError> {
    for event in trace {
        if event.protocol != doc.name {
            return Err(ConformanceError::ProtocolMismatch {
                expected: doc.name.clone(),
                found: event.protocol.clone(),
                seq: event.seq,
            });
        }
    }
    let mut ctx = Ctx {
        doc,
        trace,
        conformant: None,
    };
    let mut objectives = Vec::new();
    for spec in &doc.objectives {
        let result = match eval(&spec.predicate, &mut ctx)? {
            Eval::Satisfied(witness) => ObjectiveResult {
                id: spec.id.clone(),
                status: ObjectiveStatus::Satisfied,
                witness,
                missing: Vec::new(),
            },
            Eval::Violated(mut missing) => {
                missing.sort();
                missing.dedup();
                ObjectiveResult {
                    id: spec.id.clone(),
                    status: ObjectiveStatus::Violated,
                    witness: None,
                    missing,
                }
            }
        };
        objectives.push(result);
    }
    Ok(ObjectiveReport { objectives })
}

fn eval(pred: &Predicate, ctx: &mut Ctx<'_>) -> Result<Eval, ConformanceError> {
    Ok(match pred {
        Predicate::Eventually(m) => match ctx.first_recv(m) {
            Some(seq) => Eval::Satisfied(Some(seq)),
            None => Eval::Violated(vec![m.clone()]),
        },
        Predicate::Conformant => {
            if ctx.conformant()? {
                Eval::Satisfied(None)
            } else {
                Eval::Violated(Vec::new())
            }
        }
        Predicate::Answered { request, answer } => {
            if !ctx.was_sent(request) {
                Eval::Satisfied(None)
            } else {
                match ctx.first_recv(answer) {
                    Some(seq) => Eval::Satisfied(Some(seq)),
                    None => Eval::Violated(vec![answer.clone()]),
                }
            }
        }
        Predicate::And(l, r) => match (eval(l, ctx)?, eval(r, ctx)?) {
            (Eval::Satisfied(a), Eval::Satisfied(b)) => Eval::Satisfied(max_witness(a, b)),
            (Eval::Violated(mut a), Eval::Violated(b)) => {
                a.extend(b);
                Eval::Violated(a)
            }
            (Eval::Violated(a), Eval::Satisfied(_)) | (Eval::Satisfied(_), Eval::Violated(a)) => {
                Eval::Violated(a)
            }
        },
        Predicate::Or(l, r) => match (eval(l, ctx)?, eval(r, ctx)?) {
            (Eval::Satisfied(a), Eval::Satisfied(b)) => Eval::Satisfied(min_witness(a, b)),
            (Eval::Satisfied(a), _) | (_, Eval::Satisfied(a)) => Eval::Satisfied(a),
            (Eval::Violated(mut a), Eval::Violated(b)) => {
                a.extend(b);
                Eval::Violated(a)
            }
        },
    })
}

/// Seq at which a conjunction becomes true: the latest of the parts.
fn max_witness(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (some, None) | (None, some) => some,
    }
}

/// Seq at which a disjunction becomes true: the earliest of the parts;
/// a vacuously-true part makes the whole vacuous.
fn min_witness(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        _ => None,
    }
}
