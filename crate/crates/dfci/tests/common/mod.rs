//! Shared seeded generators for documents and traces. Everything is
//! driven by `SplitMix64` so failures reproduce from a single seed.

#![allow(dead_code)]

use std::collections::BTreeMap;

use dfci::graph::{compile, Choice, ChoiceKind, EventGraph, FragmentExpansion};
use dfci::linearize::{linearizations, LinStep};
use dfci::model::{
    CustodySpan, Fragment, Item, Lifeline, LoopBound, MessageSpec, MscDocument, ObjectiveSpec,
    Phase, Predicate, Scene,
};
use dfci::sim::rng::SplitMix64;
use dfci::trace::TraceEvent;
use dfci::validate::validate_document;

pub struct GenProfile {
    pub max_lifelines: usize,
    pub max_messages: usize,
    pub allow_unbounded_loops: bool,
    pub max_loop_iter: u32,
    /// Display names, roles, scenes, notes, objectives, custody spans,
    /// aliases, phases — everything that exercises the surface syntax.
    pub decorations: bool,
}

impl GenProfile {
    /// Syntax-heavy documents for parse/serialize round-trips.
    pub fn roundtrip() -> Self {
        GenProfile {
            max_lifelines: 4,
            max_messages: 8,
            allow_unbounded_loops: true,
            max_loop_iter: 3,
            decorations: true,
        }
    }

    /// Small bounded documents the brute-force oracle can exhaust.
    pub fn oracle() -> Self {
        GenProfile {
            max_lifelines: 4,
            max_messages: 4,
            allow_unbounded_loops: false,
            max_loop_iter: 2,
            decorations: false,
        }
    }
}

const LIFELINE_IDS: [&str; 4] = ["A", "B", "C", "D"];
const STRING_POOL: [&str; 8] = [
    "hi",
    "seize devices",
    "two \\ one",
    "say \"no\"",
    "report #7",
    "café",
    "x",
    "",
];

fn pick<'a>(rng: &mut SplitMix64, pool: &[&'a str]) -> &'a str {
    pool[rng.next_below(pool.len() as u64) as usize]
}

pub fn gen_doc(rng: &mut SplitMix64, profile: &GenProfile) -> MscDocument {
    let n_lifelines = 2 + rng.next_below(profile.max_lifelines as u64 - 1) as usize;
    let mut doc = MscDocument::new(format!("p{}", rng.next_below(1000)));
    for id in LIFELINE_IDS.iter().take(n_lifelines) {
        let mut lifeline = Lifeline::new(*id);
        if profile.decorations && rng.next_below(3) == 0 {
            lifeline.display_name = format!("{id} {}", pick(rng, &STRING_POOL));
        }
        if profile.decorations && rng.next_below(3) == 0 {
            lifeline.role = pick(rng, &["lead", "clerk", "team \"b\"", "x\\y"]).to_string();
        }
        doc.lifelines.push(lifeline);
    }

    let n_msgs = 1 + rng.next_below(profile.max_messages as u64) as usize;
    let mut next_msg = 1usize;
    let mut last_to: Option<String> = None;
    let mut body: Vec<Item> = Vec::new();
    while next_msg <= n_msgs {
        if profile.decorations && rng.next_below(6) == 0 {
            body.push(Item::Scene(Scene::new(format!(
                "scene {}",
                rng.next_below(10)
            ))));
        }
        if profile.decorations && rng.next_below(8) == 0 {
            body.push(Item::Note(pick(rng, &STRING_POOL).to_string()));
        }
        let roll = rng.next_below(10);
        if roll < 2 && next_msg < n_msgs {
            // Loop fragment with one or two messages, maybe a nested opt.
            let min_iter = rng.next_below(2) as u32;
            let max_iter = if profile.allow_unbounded_loops && rng.next_below(2) == 0 {
                LoopBound::Unbounded
            } else {
                let lo = min_iter.max(1);
                let hi = profile.max_loop_iter.max(lo);
                LoopBound::Finite(lo + rng.next_below((hi - lo + 1) as u64) as u32)
            };
            let mut inner = vec![Item::Message(gen_msg(
                rng,
                &doc,
                &mut next_msg,
                &mut last_to,
                profile,
            ))];
            if next_msg <= n_msgs && rng.next_below(2) == 0 {
                let msg = gen_msg(rng, &doc, &mut next_msg, &mut last_to, profile);
                if rng.next_below(3) == 0 {
                    inner.push(Item::Fragment(Fragment::opt(vec![Item::Message(msg)])));
                } else {
                    inner.push(Item::Message(msg));
                }
            }
            body.push(Item::Fragment(Fragment::repeated(
                min_iter, max_iter, inner,
            )));
        } else if roll < 4 && next_msg < n_msgs {
            let inner = vec![Item::Message(gen_msg(
                rng,
                &doc,
                &mut next_msg,
                &mut last_to,
                profile,
            ))];
            body.push(Item::Fragment(Fragment::opt(inner)));
        } else {
            body.push(Item::Message(gen_msg(
                rng,
                &doc,
                &mut next_msg,
                &mut last_to,
                profile,
            )));
        }
    }
    doc.body = body;

    if profile.decorations {
        // An alias for one declared lifeline, used on sender slots where
        // resolution keeps the message non-reflexive.
        if rng.next_below(3) == 0 {
            let canonical = doc.lifelines[rng.next_below(doc.lifelines.len() as u64) as usize]
                .id
                .clone();
            doc.aliases.push(dfci::model::LifelineAlias {
                alias: "X".to_string(),
                canonical: canonical.clone(),
            });
            let mut body = std::mem::take(&mut doc.body);
            rename_some_senders(rng, &mut body, &canonical);
            doc.body = body;
        }

        let msg_ids: Vec<String> = collect_ids(&doc);
        for i in 0..rng.next_below(3) {
            doc.objectives.push(ObjectiveSpec {
                id: format!("obj{i}"),
                description: if rng.next_below(2) == 0 {
                    String::new()
                } else {
                    pick(rng, &STRING_POOL).to_string()
                },
                predicate: gen_pred(rng, &msg_ids, 2),
            });
        }
        if msg_ids.len() >= 2 && rng.next_below(2) == 0 {
            let i = rng.next_below(msg_ids.len() as u64 - 1) as usize;
            let j = i + 1 + rng.next_below((msg_ids.len() - i - 1) as u64) as usize;
            doc.custody_span = Some(CustodySpan {
                start: msg_ids[i].clone(),
                end: msg_ids[j].clone(),
            });
        }
    }

    doc.stamp_scenes();
    let issues = validate_document(&doc);
    assert!(
        issues.is_empty(),
        "generator made an invalid doc: {issues:?}\n{doc:#?}"
    );
    doc
}

fn gen_msg(
    rng: &mut SplitMix64,
    doc: &MscDocument,
    next_msg: &mut usize,
    last_to: &mut Option<String>,
    profile: &GenProfile,
) -> MessageSpec {
    let suffix = if profile.decorations && rng.next_below(5) == 0 {
        "a"
    } else {
        ""
    };
    let msg_id = format!("{}{}", *next_msg, suffix);
    *next_msg += 1;

    let ids: Vec<&str> = doc.lifelines.iter().map(|l| l.id.as_str()).collect();
    let from = match last_to.take() {
        Some(prev) if rng.next_below(2) == 0 => prev,
        _ => ids[rng.next_below(ids.len() as u64) as usize].to_string(),
    };
    let to = loop {
        let candidate = ids[rng.next_below(ids.len() as u64) as usize];
        if candidate != from {
            break candidate.to_string();
        }
    };
    *last_to = Some(to.clone());

    let mut msg = MessageSpec::new(msg_id, from, to, pick(rng, &STRING_POOL));
    if rng.next_below(5) == 0 {
        msg = msg.optional();
    }
    if profile.decorations && rng.next_below(3) == 0 {
        msg = msg.with_phase(Phase::ALL[rng.next_below(7) as usize]);
    }
    msg
}

fn rename_some_senders(rng: &mut SplitMix64, items: &mut [Item], canonical: &str) {
    for item in items {
        match item {
            Item::Message(m) => {
                if m.from == canonical && rng.next_below(2) == 0 {
                    m.from = "X".to_string();
                }
            }
            Item::Fragment(f) => rename_some_senders(rng, &mut f.body, canonical),
            _ => {}
        }
    }
}

fn collect_ids(doc: &MscDocument) -> Vec<String> {
    doc.messages().iter().map(|m| m.msg_id.clone()).collect()
}

fn gen_pred(rng: &mut SplitMix64, msg_ids: &[String], depth: u32) -> Predicate {
    let any = |rng: &mut SplitMix64| msg_ids[rng.next_below(msg_ids.len() as u64) as usize].clone();
    if depth == 0 || rng.next_below(3) == 0 {
        match rng.next_below(6) {
            0..=3 => Predicate::Eventually(any(rng)),
            4 => Predicate::Answered {
                request: any(rng),
                answer: any(rng),
            },
            _ => Predicate::Conformant,
        }
    } else {
        let l = gen_pred(rng, msg_ids, depth - 1);
        let r = gen_pred(rng, msg_ids, depth - 1);
        if rng.next_bool() {
            l.and(r)
        } else {
            l.or(r)
        }
    }
}

/// Random valid expansion with loop counts capped at `max_iter`.
pub fn gen_expansion(rng: &mut SplitMix64, graph: &EventGraph, max_iter: u32) -> FragmentExpansion {
    let mut expansion = FragmentExpansion::default();
    for cp in graph.choice_points() {
        let choice = match cp.kind {
            ChoiceKind::Opt | ChoiceKind::OptionalMessage => {
                if rng.next_bool() {
                    Choice::Take
                } else {
                    Choice::Skip
                }
            }
            ChoiceKind::Loop {
                min_iter,
                max_iter: declared,
            } => {
                let hi = match declared {
                    LoopBound::Finite(max) => max.min(max_iter).max(min_iter),
                    LoopBound::Unbounded => max_iter.max(min_iter),
                };
                Choice::Iterations(min_iter + rng.next_below((hi - min_iter + 1) as u64) as u32)
            }
        };
        expansion.set(cp.id, choice);
    }
    expansion
}

pub fn lin_to_trace(doc: &MscDocument, steps: &[LinStep]) -> Vec<TraceEvent> {
    steps
        .iter()
        .enumerate()
        .map(|(i, step)| TraceEvent {
            seq: i as u64,
            ts: format!("2026-01-01T00:{:02}:{:02}Z", i / 60, i % 60),
            protocol: doc.name.clone(),
            msg_id: step.msg_id.clone(),
            kind: step.kind,
            from: step.from.clone(),
            to: step.to.clone(),
            payload_digest: "0".repeat(64),
            meta: BTreeMap::new(),
        })
        .collect()
}

fn renumber(trace: &mut [TraceEvent]) {
    for (i, e) in trace.iter_mut().enumerate() {
        e.seq = i as u64;
    }
}

/// A trace to test against `doc`: a linearization of a random expansion,
/// possibly mutated. `None` when the document is too wide to enumerate.
pub fn gen_trace(
    rng: &mut SplitMix64,
    doc: &MscDocument,
    max_iter: u32,
) -> Option<Vec<TraceEvent>> {
    let graph = compile(doc).expect("generated docs compile");
    let expansion = gen_expansion(rng, &graph, max_iter);
    let all = linearizations(&graph, &expansion, 2_000).ok()?;
    let mut trace = if all.is_empty() {
        Vec::new()
    } else {
        lin_to_trace(doc, &all[rng.next_below(all.len() as u64) as usize])
    };

    match rng.next_below(6) {
        0 | 1 => {}
        2 if trace.len() >= 2 => {
            let i = rng.next_below(trace.len() as u64) as usize;
            let j = rng.next_below(trace.len() as u64) as usize;
            trace.swap(i, j);
        }
        3 if !trace.is_empty() => {
            trace.remove(rng.next_below(trace.len() as u64) as usize);
        }
        4 if !trace.is_empty() => {
            let i = rng.next_below(trace.len() as u64) as usize;
            let dup = trace[i].clone();
            trace.insert(i, dup);
        }
        5 => {
            let mut alien = lin_to_trace(
                doc,
                &[LinStep {
                    msg_id: "99".to_string(),
                    kind: dfci::EventKind::Send,
                    from: doc.lifelines[0].id.clone(),
                    to: doc.lifelines[1].id.clone(),
                }],
            );
            let at = rng.next_below(trace.len() as u64 + 1) as usize;
            trace.insert(at, alien.remove(0));
        }
        _ => {}
    }
    trace.truncate(10);
    renumber(&mut trace);
    Some(trace)
}
