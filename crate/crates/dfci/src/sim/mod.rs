//! Deterministic actor simulator with configurable fault injection.
//!
//! The scheduler is single-threaded and canonical: among enabled events
//! it always emits the one with the lowest unrolled document position
//! (then lexicographic message id), so identical `(document, config)`
//! inputs produce byte-identical traces and ledgers. All randomness —
//! `random` opt policies, fault probabilities, delay distances, tampered
//! digests — comes from one [`SplitMix64`] stream seeded by the config.
//!
//! Faults are applied as post-hoc trace surgery on the cleanly generated
//! run; the custody ledger is always built from the clean run, which is
//! exactly what lets a tampered trace digest diverge from the ledger.

mod adversary;
pub mod rng;

pub use adversary::{
    adversary_matrix, digest_cross_check, DetectionCell, DetectionReport, Detector, DigestMismatch,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Duration, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::custody::{open_chain, CustodyAction, CustodyChain, EntryDraft};
use crate::graph::{
    compile, expand, Choice, ChoiceKind, EventGraph, EventKind, ExpandedGraph, FragmentExpansion,
    ModelError,
};
use crate::model::{LoopBound, Modality, MscDocument, Phase};
use crate::trace::TraceEvent;
use rng::SplitMix64;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config out of bounds: {0}")]
    ConfigOutOfBounds(String),
    #[error("fault target '{0}' does not resolve to a message")]
    UnknownFaultTarget(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("checker failed during detection: {0}")]
    Check(String),
}

/// How an optional region is resolved during simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptPolicy {
    Take,
    Skip,
    Random,
}

/// Exact probability as a fraction; parsed from `1`, `0.25`, or `3/4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub const ONE: Rational = Rational { num: 1, den: 1 };
    pub const ZERO: Rational = Rational { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Rational, String> {
        if den == 0 {
            return Err("probability denominator must be nonzero".to_string());
        }
        if num > den {
            return Err(format!("probability {num}/{den} exceeds 1"));
        }
        Ok(Rational { num, den })
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((num, den)) = s.split_once('/') {
            let num: u64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator '{num}'"))?;
            let den: u64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator '{den}'"))?;
            return Rational::new(num, den);
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if !frac.is_empty() && frac.chars().all(|c| c.is_ascii_digit()) {
                let whole: u64 = if whole.is_empty() {
                    0
                } else {
                    whole
                        .parse()
                        .map_err(|_| format!("bad probability '{s}'"))?
                };
                let den = 10u64
                    .checked_pow(frac.len() as u32)
                    .ok_or_else(|| format!("probability '{s}' has too many digits"))?;
                let num: u64 = frac.parse().map_err(|_| format!("bad probability '{s}'"))?;
                return Rational::new(whole.saturating_mul(den).saturating_add(num), den);
            }
            return Err(format!("bad probability '{s}'"));
        }
        let whole: u64 = s.parse().map_err(|_| format!("bad probability '{s}'"))?;
        Rational::new(whole, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultKind {
    Drop,
    Tamper,
    Duplicate,
    Delay,
}

impl FaultKind {
    pub const ALL: [FaultKind; 4] = [
        FaultKind::Drop,
        FaultKind::Tamper,
        FaultKind::Duplicate,
        FaultKind::Delay,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FaultKind::Drop => "drop",
            FaultKind::Tamper => "tamper",
            FaultKind::Duplicate => "duplicate",
            FaultKind::Delay => "delay",
        }
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FaultKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop" => Ok(FaultKind::Drop),
            "tamper" => Ok(FaultKind::Tamper),
            "duplicate" => Ok(FaultKind::Duplicate),
            "delay" => Ok(FaultKind::Delay),
            other => Err(format!(
                "unknown fault kind '{other}' (expected drop, tamper, duplicate, or delay)"
            )),
        }
    }
}

/// One fault to inject, applied independently to each instance of the
/// target message with the given probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultRule {
    pub target: String,
    pub kind: FaultKind,
    pub probability: Rational,
}

impl FaultRule {
    pub fn certain(target: impl Into<String>, kind: FaultKind) -> Self {
        FaultRule {
            target: target.into(),
            kind,
            probability: Rational::ONE,
        }
    }
}

/// Simulation parameters. Maps are keyed by choice-point index in
/// document order (see [`EventGraph::choice_points`]); anything not
/// named falls back to the defaults: one loop iteration and the
/// `default_opt` policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub loop_iterations: BTreeMap<usize, u32>,
    pub opt_policy: BTreeMap<usize, OptPolicy>,
    pub default_opt: OptPolicy,
    /// Iteration ceiling for loops with no declared upper bound.
    pub loop_cap: u32,
    pub faults: Vec<FaultRule>,
}

impl SimConfig {
    pub fn new(seed: u64) -> Self {
        SimConfig {
            seed,
            loop_iterations: BTreeMap::new(),
            opt_policy: BTreeMap::new(),
            default_opt: OptPolicy::Take,
            loop_cap: 3,
            faults: Vec::new(),
        }
    }

    pub fn with_fault(mut self, fault: FaultRule) -> Self {
        self.faults.push(fault);
        self
    }
}

/// First timestamp of a simulated run; event `seq` adds that many seconds.
const TS_EPOCH: (i32, u32, u32) = (2026, 1, 1);

fn ts_for(seq: u64) -> String {
    let base = Utc
        .with_ymd_and_hms(TS_EPOCH.0, TS_EPOCH.1, TS_EPOCH.2, 0, 0, 0)
        .unwrap();
    (base + Duration::seconds(seq as i64))
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

/// Content digest of one message instance: SHA-256 over protocol,
/// message id, label, and iteration vector.
fn payload_digest(protocol: &str, msg_id: &str, label: &str, instance: &[u32]) -> String {
    let iter = instance
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(".");
    let preimage = format!("{protocol}\n{msg_id}\n{label}\n{iter}");
    hex::encode(Sha256::digest(preimage.as_bytes()))
}

/// Execute one run of the document's protocol.
///
/// With no faults the produced trace is conformant, and when the
/// document declares a custody span (and the run exercised both of its
/// endpoint messages) the produced chain verifies and covers the span.
pub fn simulate(
    doc: &MscDocument,
    config: &SimConfig,
) -> Result<(Vec<TraceEvent>, Option<CustodyChain>), SimError> {
    let graph = compile(doc)?;
    for fault in &config.faults {
        if doc.message(&fault.target).is_none() {
            return Err(SimError::UnknownFaultTarget(fault.target.clone()));
        }
        if fault.probability.den == 0 || fault.probability.num > fault.probability.den {
            return Err(SimError::ConfigOutOfBounds(format!(
                "fault probability {} is not in [0, 1]",
                fault.probability
            )));
        }
    }

    let mut rng = SplitMix64::new(config.seed);
    let expansion = resolve_choices(&graph, config, &mut rng)?;
    let expanded = expand(&graph, &expansion)?;

    let clean = schedule(doc, &graph, &expanded);
    let chain = build_chain(doc, &graph, &expanded, &clean);
    let mut trace = clean;
    apply_faults(&mut trace, &config.faults, &mut rng);
    renumber(&mut trace);
    Ok((trace, chain))
}

fn resolve_choices(
    graph: &EventGraph,
    config: &SimConfig,
    rng: &mut SplitMix64,
) -> Result<FragmentExpansion, SimError> {
    for key in config.loop_iterations.keys() {
        match graph.choice_points().get(*key) {
            Some(cp) if matches!(cp.kind, ChoiceKind::Loop { .. }) => {}
            _ => {
                return Err(SimError::ConfigOutOfBounds(format!(
                    "loop_iterations names choice point {key}, which is not a loop"
                )))
            }
        }
    }
    for key in config.opt_policy.keys() {
        match graph.choice_points().get(*key) {
            Some(cp) if !matches!(cp.kind, ChoiceKind::Loop { .. }) => {}
            _ => {
                return Err(SimError::ConfigOutOfBounds(format!(
                    "opt_policy names choice point {key}, which is not an optional region"
                )))
            }
        }
    }

    let mut expansion = FragmentExpansion::default();
    for cp in graph.choice_points() {
        let choice = match cp.kind {
            ChoiceKind::Loop { min_iter, max_iter } => {
                let requested = config
                    .loop_iterations
                    .get(&cp.id.0)
                    .copied()
                    .unwrap_or_else(|| min_iter.max(1));
                let cap = match max_iter {
                    LoopBound::Finite(max) => max,
                    LoopBound::Unbounded => config.loop_cap.max(min_iter),
                };
                if requested < min_iter || requested > cap {
                    return Err(SimError::ConfigOutOfBounds(format!(
                        "{} requested {requested} iterations, allowed {min_iter}..{cap}",
                        cp.label
                    )));
                }
                Choice::Iterations(requested)
            }
            ChoiceKind::Opt | ChoiceKind::OptionalMessage => {
                let policy = config
                    .opt_policy
                    .get(&cp.id.0)
                    .copied()
                    .unwrap_or(config.default_opt);
                match policy {
                    OptPolicy::Take => Choice::Take,
                    OptPolicy::Skip => Choice::Skip,
                    OptPolicy::Random => {
                        if rng.next_bool() {
                            Choice::Take
                        } else {
                            Choice::Skip
                        }
                    }
                }
            }
        };
        expansion.set(cp.id, choice);
    }
    Ok(expansion)
}

/// Emit events one at a time: of all enabled events, the one with the
/// lowest (unrolled position, message id) goes next.
fn schedule(doc: &MscDocument, graph: &EventGraph, expanded: &ExpandedGraph) -> Vec<TraceEvent> {
    let n = expanded.events.len();
    let mut consumed = vec![false; n];
    let lanes: Vec<&Vec<usize>> = expanded.lanes.values().collect();
    let mut next = vec![0usize; lanes.len()];
    let mut out = Vec::with_capacity(n);

    for seq in 0..n as u64 {
        let mut best: Option<usize> = None;
        for (lane_idx, lane) in lanes.iter().enumerate() {
            let Some(&candidate) = lane.get(next[lane_idx]) else {
                continue;
            };
            if let Some(send) = expanded.send_of[candidate] {
                if !consumed[send] {
                    continue;
                }
            }
            let better = match best {
                None => true,
                Some(cur) => {
                    let (cp, cm) = key(graph, expanded, candidate);
                    let (bp, bm) = key(graph, expanded, cur);
                    (cp, cm) < (bp, bm)
                }
            };
            if better {
                best = Some(candidate);
            }
        }
        let chosen = best.expect("acyclic order always has an enabled event");
        consumed[chosen] = true;
        let lane_name = match expanded.events[chosen].kind {
            EventKind::Send => {
                &graph.occurrences()[expanded.events[chosen].occurrence].canonical_from
            }
            EventKind::Recv => {
                &graph.occurrences()[expanded.events[chosen].occurrence].canonical_to
            }
        };
        let lane_idx = expanded
            .lanes
            .keys()
            .position(|k| k == lane_name)
            .expect("lane exists");
        next[lane_idx] += 1;

        let ev = &expanded.events[chosen];
        let occ = &graph.occurrences()[ev.occurrence];
        out.push(TraceEvent {
            seq,
            ts: ts_for(seq),
            protocol: doc.name.clone(),
            msg_id: occ.msg_id.clone(),
            kind: ev.kind,
            from: occ.from.clone(),
            to: occ.to.clone(),
            payload_digest: payload_digest(&doc.name, &occ.msg_id, &occ.label, &ev.instance),
            meta: BTreeMap::new(),
        });
    }
    out
}

fn key(graph: &EventGraph, expanded: &ExpandedGraph, idx: usize) -> (usize, String) {
    (
        expanded.events[idx].unrolled_pos,
        graph.occurrences()[expanded.events[idx].occurrence]
            .msg_id
            .clone(),
    )
}

/// Custody entries along the clean run, for documents with a custody span:
///
/// - seize at the send of the first instance of the span-start message;
/// - inside the window, further Collection-phase messages become seal
///   (optional ones) or transfer (mandatory ones) entries at their recv;
/// - the first Examination-phase message becomes an examine entry;
/// - the first Presentation-phase message sent by the seizing party
///   becomes a present entry;
/// - the recv of the last instance of the span-end message closes the
///   chain with a present entry.
///
/// No chain is produced when the run skipped either span endpoint.
fn build_chain(
    doc: &MscDocument,
    graph: &EventGraph,
    _expanded: &ExpandedGraph,
    clean: &[TraceEvent],
) -> Option<CustodyChain> {
    let span = doc.custody_span.as_ref()?;
    let start_pos = doc.doc_position(&span.start)?;
    let end_pos = doc.doc_position(&span.end)?;
    let seizer = doc.message(&span.start)?.from.clone();

    let first_start_send = clean
        .iter()
        .find(|e| e.msg_id == span.start && e.kind == EventKind::Send)?;
    let last_end_recv = clean
        .iter()
        .rfind(|e| e.msg_id == span.end && e.kind == EventKind::Recv)?;

    let occ_pos: BTreeMap<&str, (usize, Option<Phase>, Modality)> = graph
        .occurrences()
        .iter()
        .map(|o| {
            let msg = doc.message(&o.msg_id).expect("compiled");
            (o.msg_id.as_str(), (o.doc_pos, msg.phase, o.modality))
        })
        .collect();

    let mut chain = open_chain(
        doc.name.clone(),
        EntryDraft::new(
            first_start_send.ts.clone(),
            first_start_send.from.clone(),
            CustodyAction::Seize,
            "device_set",
            first_start_send.payload_digest.clone(),
        ),
    )
    .ok()?;

    let mut examined = false;
    let mut presented = false;
    for event in clean {
        if event.kind != EventKind::Recv {
            continue;
        }
        let Some(&(pos, phase, modality)) = occ_pos.get(event.msg_id.as_str()) else {
            continue;
        };
        if pos < start_pos || pos > end_pos {
            continue;
        }
        let is_final = event.msg_id == span.end && event.seq == last_end_recv.seq;
        let draft = if is_final {
            Some(EntryDraft::new(
                event.ts.clone(),
                event.from.clone(),
                CustodyAction::Present,
                "device_set",
                event.payload_digest.clone(),
            ))
        } else {
            match phase {
                Some(Phase::Collection) if pos != start_pos => {
                    let (action, actor) = if modality == Modality::Optional {
                        (CustodyAction::Seal, event.from.clone())
                    } else {
                        (CustodyAction::Transfer, event.to.clone())
                    };
                    Some(EntryDraft::new(
                        event.ts.clone(),
                        actor,
                        action,
                        "device_set",
                        event.payload_digest.clone(),
                    ))
                }
                Some(Phase::Examination) if !examined => {
                    examined = true;
                    Some(EntryDraft::new(
                        event.ts.clone(),
                        event.from.clone(),
                        CustodyAction::Examine,
                        "device_set",
                        event.payload_digest.clone(),
                    ))
                }
                Some(Phase::Presentation) if !presented && event.from == seizer => {
                    presented = true;
                    Some(EntryDraft::new(
                        event.ts.clone(),
                        event.from.clone(),
                        CustodyAction::Present,
                        "device_set",
                        event.payload_digest.clone(),
                    ))
                }
                _ => None,
            }
        };
        if let Some(draft) = draft {
            chain = chain.append_entry(draft).expect("clean chain stays valid");
        }
    }
    Some(chain)
}

/// Post-generation trace surgery. Rules apply in config order; within a
/// rule, instances of the target are visited in trace order and each
/// instance draws its own probability.
fn apply_faults(trace: &mut Vec<TraceEvent>, faults: &[FaultRule], rng: &mut SplitMix64) {
    for rule in faults {
        let hit =
            |rng: &mut SplitMix64| rng.next_below(rule.probability.den) < rule.probability.num;
        match rule.kind {
            FaultKind::Drop => {
                let mut remove = Vec::new();
                for (send, recv) in instances(trace, &rule.target) {
                    if hit(rng) {
                        remove.push(send);
                        remove.extend(recv);
                    }
                }
                remove.sort_unstable();
                for idx in remove.into_iter().rev() {
                    trace.remove(idx);
                }
            }
            FaultKind::Tamper => {
                for (send, recv) in instances(trace, &rule.target) {
                    if hit(rng) {
                        let digest = rng.next_digest();
                        trace[send].payload_digest = digest.clone();
                        if let Some(recv) = recv {
                            trace[recv].payload_digest = digest;
                        }
                    }
                }
            }
            FaultKind::Duplicate => {
                let mut inserts = Vec::new();
                for (_, recv) in instances(trace, &rule.target) {
                    if hit(rng) {
                        if let Some(recv) = recv {
                            inserts.push(recv);
                        }
                    }
                }
                for idx in inserts.into_iter().rev() {
                    let dup = trace[idx].clone();
                    trace.insert(idx + 1, dup);
                }
            }
            FaultKind::Delay => {
                // Re-locate each instance as the trace shifts under us.
                let count = instances(trace, &rule.target).len();
                for i in 0..count {
                    if !hit(rng) {
                        continue;
                    }
                    let k = 1 + rng.next_below(3) as usize;
                    let Some((_, Some(recv))) = instances(trace, &rule.target).get(i).copied()
                    else {
                        continue;
                    };
                    let event = trace.remove(recv);
                    trace.insert((recv + k).min(trace.len()), event);
                }
            }
        }
    }
}

/// Positional send/recv pairing of every instance of a message.
fn instances(trace: &[TraceEvent], msg_id: &str) -> Vec<(usize, Option<usize>)> {
    let sends: Vec<usize> = trace
        .iter()
        .enumerate()
        .filter(|(_, e)| e.msg_id == msg_id && e.kind == EventKind::Send)
        .map(|(i, _)| i)
        .collect();
    let recvs: Vec<usize> = trace
        .iter()
        .enumerate()
        .filter(|(_, e)| e.msg_id == msg_id && e.kind == EventKind::Recv)
        .map(|(i, _)| i)
        .collect();
    sends
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, recvs.get(i).copied()))
        .collect()
}

/// Reassign contiguous seq numbers after surgery. Timestamps keep their
/// generation-time values: a delayed receive is observed late but was
/// produced on time, and ledger entries stay anchored to their source
/// events by ts.
fn renumber(trace: &mut [TraceEvent]) {
    for (i, event) in trace.iter_mut().enumerate() {
        event.seq = i as u64;
    }
}
