//! Partial-order semantics for charts.
//!
//! A compiled [`EventGraph`] holds one send and one receive event per
//! message occurrence, ordered by (a) send-before-receive for each message
//! and (b) document order projected onto each lifeline. No ordering is
//! imposed across lifelines beyond what those two rules imply, so
//! delivery is asynchronous. Fragments stay unexpanded in the template;
//! a [`FragmentExpansion`] fixes every choice point (opt taken or
//! skipped, loop iteration count) and induces the expanded partial
//! order used for linearization, conformance, and simulation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FragmentKind, Item, LoopBound, Modality, MscDocument};
use crate::validate::{validate_document, IssueCategory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("document order is self-inconsistent: the event order contains a cycle")]
    CyclicOrder,
    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("linearization count would exceed cap {cap}")]
    CapExceeded { cap: usize },
    #[error("expansion out of bounds: {0}")]
    ExpansionOutOfBounds(String),
    #[error("expanded event count {count} exceeds the supported limit {limit}")]
    TooManyEvents { count: usize, limit: usize },
}

/// Most events a single expansion may contain for exhaustive enumeration.
pub const MAX_ORACLE_EVENTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Send,
    Recv,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::Send => f.write_str("send"),
            EventKind::Recv => f.write_str("recv"),
        }
    }
}

/// Index of a message occurrence in document order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct OccurrenceId(pub usize);

/// Index of a choice point (opt fragment, optional message, or loop).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChoiceId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChoiceKind {
    /// An `opt` fragment: taken or skipped as a whole.
    Opt,
    /// A message with optional modality, treated as its own one-message
    /// optional region.
    OptionalMessage,
    Loop {
        min_iter: u32,
        max_iter: LoopBound,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoicePoint {
    pub id: ChoiceId,
    pub kind: ChoiceKind,
    /// Human handle for configs and diagnostics (`opt#1`, `msg 6`, `loop#0`).
    pub label: String,
}

/// One message occurrence with resolved endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub msg_id: String,
    pub from: String,
    pub to: String,
    pub canonical_from: String,
    pub canonical_to: String,
    pub label: String,
    pub modality: Modality,
    /// Position among messages in document order.
    pub doc_pos: usize,
    /// Governing choice points, outermost first.
    pub choice_path: Vec<ChoiceId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EventId(pub usize);

/// One template event. The template carries each occurrence once;
/// loop instances only exist after expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub msg_id: String,
    pub kind: EventKind,
    /// Canonical lifeline the event occurs on.
    pub lifeline: String,
    pub occurrence: OccurrenceId,
}

#[derive(Debug, Clone)]
enum Node {
    Msg(usize),
    Frag { choice: ChoiceId, body: Vec<Node> },
}

/// Compiled form of a document: events, order, and choice structure.
#[derive(Debug, Clone)]
pub struct EventGraph {
    doc_name: String,
    occurrences: Vec<Occurrence>,
    choice_points: Vec<ChoicePoint>,
    events: Vec<Event>,
    /// Covering order edges: per-lifeline successor chains plus
    /// send-to-receive edges.
    covering: Vec<(usize, usize)>,
    tree: Vec<Node>,
}

impl EventGraph {
    pub fn doc_name(&self) -> &str {
        &self.doc_name
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn occurrence(&self, id: OccurrenceId) -> &Occurrence {
        &self.occurrences[id.0]
    }

    pub fn choice_points(&self) -> &[ChoicePoint] {
        &self.choice_points
    }

    /// Choice points governing an event, outermost first.
    pub fn optionality(&self, event: EventId) -> &[ChoiceId] {
        &self.occurrences[self.events[event.0].occurrence.0].choice_path
    }

    /// The strict order relation as explicit pairs (transitive closure
    /// of the covering edges).
    pub fn order_pairs(&self) -> BTreeSet<(EventId, EventId)> {
        let n = self.events.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &self.covering {
            succ[a].push(b);
        }
        let mut pairs = BTreeSet::new();
        for start in 0..n {
            let mut stack = succ[start].clone();
            let mut seen = vec![false; n];
            while let Some(v) = stack.pop() {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                pairs.insert((EventId(start), EventId(v)));
                stack.extend(succ[v].iter().copied());
            }
        }
        pairs
    }

    pub fn precedes(&self, a: EventId, b: EventId) -> bool {
        self.order_pairs().contains(&(a, b))
    }

    /// Minimum and maximum number of instances an occurrence can have
    /// across all valid expansions. `None` max means unbounded.
    pub fn instance_bounds(&self, occ: OccurrenceId) -> (u64, Option<u64>) {
        let mut min: u64 = 1;
        let mut max: Option<u64> = Some(1);
        for choice in &self.occurrences[occ.0].choice_path {
            match &self.choice_points[choice.0].kind {
                ChoiceKind::Opt | ChoiceKind::OptionalMessage => min = 0,
                ChoiceKind::Loop { min_iter, max_iter } => {
                    min = min.saturating_mul(u64::from(*min_iter));
                    max = match (max, max_iter) {
                        (Some(m), LoopBound::Finite(k)) => Some(m.saturating_mul(u64::from(*k))),
                        _ => None,
                    };
                }
            }
        }
        (min, max)
    }

    /// Whether any governing choice point is a loop.
    pub fn in_loop(&self, occ: OccurrenceId) -> bool {
        self.occurrences[occ.0]
            .choice_path
            .iter()
            .any(|c| matches!(self.choice_points[c.0].kind, ChoiceKind::Loop { .. }))
    }

    fn toposort_ok(&self) -> bool {
        let n = self.events.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &self.covering {
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut emitted = 0;
        while let Some(v) = queue.pop() {
            emitted += 1;
            for &u in &succ[v] {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    queue.push(u);
                }
            }
        }
        emitted == n
    }
}

/// Compile a document into its event graph.
///
/// The document must pass [`validate_document`]; reference problems come
/// back as [`ModelError::UnresolvedReference`], everything else as
/// [`ModelError::InvalidDocument`].
pub fn compile(doc: &MscDocument) -> Result<EventGraph, ModelError> {
    let issues = validate_document(doc);
    if let Some(issue) = issues.first() {
        return Err(match issue.category {
            IssueCategory::UnknownLifeline | IssueCategory::UnresolvedReference => {
                ModelError::UnresolvedReference(issue.to_string())
            }
            _ => ModelError::InvalidDocument(issue.to_string()),
        });
    }

    let mut builder = Builder {
        doc,
        occurrences: Vec::new(),
        choice_points: Vec::new(),
    };
    let tree = builder.build(&doc.body, &mut Vec::new());

    let occurrences = builder.occurrences;
    let choice_points = builder.choice_points;

    let mut events = Vec::with_capacity(occurrences.len() * 2);
    let mut lanes: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, occ) in occurrences.iter().enumerate() {
        events.push(Event {
            msg_id: occ.msg_id.clone(),
            kind: EventKind::Send,
            lifeline: occ.canonical_from.clone(),
            occurrence: OccurrenceId(i),
        });
        events.push(Event {
            msg_id: occ.msg_id.clone(),
            kind: EventKind::Recv,
            lifeline: occ.canonical_to.clone(),
            occurrence: OccurrenceId(i),
        });
        lanes.entry(&occ.canonical_from).or_default().push(2 * i);
        lanes.entry(&occ.canonical_to).or_default().push(2 * i + 1);
    }

    let mut covering = Vec::new();
    for lane in lanes.values() {
        for pair in lane.windows(2) {
            covering.push((pair[0], pair[1]));
        }
    }
    for i in 0..occurrences.len() {
        covering.push((2 * i, 2 * i + 1));
    }

    let graph = EventGraph {
        doc_name: doc.name.clone(),
        occurrences,
        choice_points,
        events,
        covering,
        tree,
    };
    if !graph.toposort_ok() {
        return Err(ModelError::CyclicOrder);
    }
    Ok(graph)
}

struct Builder<'d> {
    doc: &'d MscDocument,
    occurrences: Vec<Occurrence>,
    choice_points: Vec<ChoicePoint>,
}

impl Builder<'_> {
    fn build(&mut self, items: &[Item], path: &mut Vec<ChoiceId>) -> Vec<Node> {
        let mut nodes = Vec::new();
        for item in items {
            match item {
                Item::Message(m) => {
                    let optional = m.modality == Modality::Optional;
                    let choice = optional.then(|| {
                        self.push_choice(ChoiceKind::OptionalMessage, format!("msg {}", m.msg_id))
                    });
                    if let Some(c) = choice {
                        path.push(c);
                    }
                    let occ_idx = self.occurrences.len();
                    self.occurrences.push(Occurrence {
                        msg_id: m.msg_id.clone(),
                        from: m.from.clone(),
                        to: m.to.clone(),
                        canonical_from: self
                            .doc
                            .resolve_lifeline(&m.from)
                            .expect("validated")
                            .to_string(),
                        canonical_to: self
                            .doc
                            .resolve_lifeline(&m.to)
                            .expect("validated")
                            .to_string(),
                        label: m.label.clone(),
                        modality: m.modality,
                        doc_pos: occ_idx,
                        choice_path: path.clone(),
                    });
                    let msg_node = Node::Msg(occ_idx);
                    if let Some(c) = choice {
                        path.pop();
                        nodes.push(Node::Frag {
                            choice: c,
                            body: vec![msg_node],
                        });
                    } else {
                        nodes.push(msg_node);
                    }
                }
                Item::Fragment(f) => {
                    let kind = match f.kind {
                        FragmentKind::Opt => ChoiceKind::Opt,
                        FragmentKind::Loop { min_iter, max_iter } => {
                            ChoiceKind::Loop { min_iter, max_iter }
                        }
                    };
                    let tag = match f.kind {
                        FragmentKind::Opt => "opt",
                        FragmentKind::Loop { .. } => "loop",
                    };
                    let choice =
                        self.push_choice(kind, format!("{tag}#{}", self.choice_points.len()));
                    path.push(choice);
                    let body = self.build(&f.body, path);
                    path.pop();
                    nodes.push(Node::Frag { choice, body });
                }
                Item::Scene(_) | Item::Note(_) => {}
            }
        }
        nodes
    }

    fn push_choice(&mut self, kind: ChoiceKind, label: String) -> ChoiceId {
        let id = ChoiceId(self.choice_points.len());
        self.choice_points.push(ChoicePoint { id, kind, label });
        id
    }
}

/// One resolved decision for a choice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Take,
    Skip,
    Iterations(u32),
}

/// A complete assignment of choices: every opt taken or skipped, every
/// loop given an iteration count within its declared bounds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FragmentExpansion {
    pub choices: BTreeMap<usize, Choice>,
}

impl FragmentExpansion {
    pub fn set(&mut self, id: ChoiceId, choice: Choice) {
        self.choices.insert(id.0, choice);
    }

    pub fn get(&self, id: ChoiceId) -> Option<Choice> {
        self.choices.get(&id.0).copied()
    }

    /// Every opt taken and every loop run `iterations` times (clamped to
    /// the declared bounds).
    pub fn take_all(graph: &EventGraph, iterations: u32) -> FragmentExpansion {
        let mut expansion = FragmentExpansion::default();
        for cp in graph.choice_points() {
            let choice = match cp.kind {
                ChoiceKind::Opt | ChoiceKind::OptionalMessage => Choice::Take,
                ChoiceKind::Loop { min_iter, max_iter } => {
                    let mut n = iterations.max(min_iter).max(1);
                    if let LoopBound::Finite(max) = max_iter {
                        n = n.min(max);
                    }
                    Choice::Iterations(n)
                }
            };
            expansion.set(cp.id, choice);
        }
        expansion
    }
}

/// One event of an expanded graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpEvent {
    pub occurrence: usize,
    /// Iteration indices of the enclosing loops, outermost first; empty
    /// outside loops.
    pub instance: Vec<u32>,
    pub kind: EventKind,
    /// Position in the fully unrolled document text.
    pub unrolled_pos: usize,
}

/// A fragment expansion applied to a graph: concrete events, per-lifeline
/// lanes (each a total order), and the send pairing for receives.
#[derive(Debug, Clone)]
pub struct ExpandedGraph {
    pub events: Vec<ExpEvent>,
    /// Canonical lifeline -> event indices, in lane order.
    pub lanes: BTreeMap<String, Vec<usize>>,
    /// For each event index: the index of the paired send (receives only).
    pub send_of: Vec<Option<usize>>,
}

impl ExpandedGraph {
    /// Events sorted by unrolled position, i.e. the canonical linearization.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.events.len()).collect();
        idx.sort_by_key(|&i| self.events[i].unrolled_pos);
        idx
    }
}

/// Apply an expansion, validating it against the graph's choice points.
pub fn expand(
    graph: &EventGraph,
    expansion: &FragmentExpansion,
) -> Result<ExpandedGraph, ModelError> {
    for cp in graph.choice_points() {
        let choice = expansion.get(cp.id).ok_or_else(|| {
            ModelError::ExpansionOutOfBounds(format!("no choice given for {}", cp.label))
        })?;
        match (&cp.kind, choice) {
            (ChoiceKind::Opt | ChoiceKind::OptionalMessage, Choice::Take | Choice::Skip) => {}
            (ChoiceKind::Loop { min_iter, max_iter }, Choice::Iterations(n)) => {
                let below_max = match max_iter {
                    LoopBound::Finite(max) => n <= *max,
                    LoopBound::Unbounded => true,
                };
                if n < *min_iter || !below_max {
                    return Err(ModelError::ExpansionOutOfBounds(format!(
                        "{} given {} iterations, declared bounds are {}..{}",
                        cp.label, n, min_iter, max_iter
                    )));
                }
            }
            (_, other) => {
                return Err(ModelError::ExpansionOutOfBounds(format!(
                    "{} given incompatible choice {:?}",
                    cp.label, other
                )));
            }
        }
    }

    let mut out = ExpandedGraph {
        events: Vec::new(),
        lanes: BTreeMap::new(),
        send_of: Vec::new(),
    };
    let mut pos = 0usize;
    unroll(
        graph,
        &graph.tree,
        expansion,
        &mut Vec::new(),
        &mut out,
        &mut pos,
    );
    Ok(out)
}

fn unroll(
    graph: &EventGraph,
    nodes: &[Node],
    expansion: &FragmentExpansion,
    instance: &mut Vec<u32>,
    out: &mut ExpandedGraph,
    pos: &mut usize,
) {
    for node in nodes {
        match node {
            Node::Msg(occ_idx) => {
                let occ = &graph.occurrences[*occ_idx];
                let send_idx = out.events.len();
                out.events.push(ExpEvent {
                    occurrence: *occ_idx,
                    instance: instance.clone(),
                    kind: EventKind::Send,
                    unrolled_pos: *pos,
                });
                out.send_of.push(None);
                *pos += 1;
                let recv_idx = out.events.len();
                out.events.push(ExpEvent {
                    occurrence: *occ_idx,
                    instance: instance.clone(),
                    kind: EventKind::Recv,
                    unrolled_pos: *pos,
                });
                out.send_of.push(Some(send_idx));
                *pos += 1;
                out.lanes
                    .entry(occ.canonical_from.clone())
                    .or_default()
                    .push(send_idx);
                out.lanes
                    .entry(occ.canonical_to.clone())
                    .or_default()
                    .push(recv_idx);
            }
            Node::Frag { choice, body } => match expansion.get(*choice).expect("validated") {
                Choice::Skip => {}
                Choice::Take => unroll(graph, body, expansion, instance, out, pos),
                Choice::Iterations(n) => {
                    for i in 1..=n {
                        instance.push(i);
                        unroll(graph, body, expansion, instance, out, pos);
                        instance.pop();
                    }
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Fragment, Lifeline, MessageSpec, Scene};

    fn doc_with(body: Vec<Item>) -> MscDocument {
        let mut doc = MscDocument::new("p");
        doc.lifelines = vec![
            Lifeline::new("A"),
            Lifeline::new("B"),
            Lifeline::new("C"),
            Lifeline::new("D"),
        ];
        doc.body = body;
        doc
    }

    #[test]
    fn single_message_yields_two_events_one_pair() {
        let doc = doc_with(vec![Item::Message(MessageSpec::new("1", "A", "B", "m1"))]);
        let graph = compile(&doc).unwrap();
        assert_eq!(graph.events().len(), 2);
        let pairs = graph.order_pairs();
        assert_eq!(pairs.len(), 1);
        assert!(pairs.contains(&(EventId(0), EventId(1))));
    }

    #[test]
    fn chained_messages_are_totally_ordered() {
        let doc = doc_with(vec![
            Item::Message(MessageSpec::new("1", "A", "B", "m1")),
            Item::Message(MessageSpec::new("2", "B", "C", "m2")),
        ]);
        let graph = compile(&doc).unwrap();
        // send m1 < recv m1 < send m2 < recv m2
        assert!(graph.precedes(EventId(0), EventId(1)));
        assert!(graph.precedes(EventId(1), EventId(2)));
        assert!(graph.precedes(EventId(2), EventId(3)));
        assert!(graph.precedes(EventId(0), EventId(3)));
    }

    #[test]
    fn independent_messages_are_unordered() {
        let doc = doc_with(vec![
            Item::Message(MessageSpec::new("1", "A", "B", "m1")),
            Item::Message(MessageSpec::new("2", "C", "D", "m2")),
        ]);
        let graph = compile(&doc).unwrap();
        assert!(!graph.precedes(EventId(0), EventId(2)));
        assert!(!graph.precedes(EventId(2), EventId(0)));
        assert!(graph.precedes(EventId(0), EventId(1)));
        assert!(graph.precedes(EventId(2), EventId(3)));
    }

    #[test]
    fn compile_rejects_unresolved_references() {
        let doc = doc_with(vec![Item::Message(MessageSpec::new("1", "A", "Z", "m1"))]);
        match compile(&doc) {
            Err(ModelError::UnresolvedReference(_)) => {}
            other => panic!("expected UnresolvedReference, got {other:?}"),
        }
    }

    #[test]
    fn optional_message_gets_its_own_choice_point() {
        let doc = doc_with(vec![
            Item::Message(MessageSpec::new("1", "A", "B", "m1")),
            Item::Message(MessageSpec::new("2", "A", "B", "m2").optional()),
        ]);
        let graph = compile(&doc).unwrap();
        assert_eq!(graph.choice_points().len(), 1);
        assert_eq!(graph.choice_points()[0].kind, ChoiceKind::OptionalMessage);
        assert_eq!(graph.optionality(EventId(2)), &[ChoiceId(0)]);
        assert!(graph.optionality(EventId(0)).is_empty());
    }

    #[test]
    fn loop_expansion_replicates_instances_in_order() {
        let doc = doc_with(vec![
            Item::Fragment(Fragment::repeated(
                1,
                LoopBound::Unbounded,
                vec![
                    Item::Message(MessageSpec::new("1", "A", "B", "q")),
                    Item::Message(MessageSpec::new("2", "B", "A", "a")),
                ],
            )),
            Item::Scene(Scene::new("x")),
            Item::Message(MessageSpec::new("3", "A", "C", "done")),
        ]);
        let graph = compile(&doc).unwrap();
        let mut expansion = FragmentExpansion::take_all(&graph, 2);
        expansion.set(ChoiceId(0), Choice::Iterations(2));
        let expanded = expand(&graph, &expansion).unwrap();
        assert_eq!(expanded.events.len(), 10);
        let order = expanded.canonical_order();
        let ids: Vec<(String, EventKind, Vec<u32>)> = order
            .iter()
            .map(|&i| {
                let e = &expanded.events[i];
                (
                    graph.occurrences()[e.occurrence].msg_id.clone(),
                    e.kind,
                    e.instance.clone(),
                )
            })
            .collect();
        assert_eq!(ids[0], ("1".to_string(), EventKind::Send, vec![1]));
        assert_eq!(ids[4], ("1".to_string(), EventKind::Send, vec![2]));
        assert_eq!(ids[8], ("3".to_string(), EventKind::Send, vec![]));
    }

    #[test]
    fn expansion_bounds_are_enforced() {
        let doc = doc_with(vec![Item::Fragment(Fragment::repeated(
            2,
            LoopBound::Finite(3),
            vec![Item::Message(MessageSpec::new("1", "A", "B", "q"))],
        ))]);
        let graph = compile(&doc).unwrap();
        let mut expansion = FragmentExpansion::default();
        expansion.set(ChoiceId(0), Choice::Iterations(1));
        match expand(&graph, &expansion) {
            Err(ModelError::ExpansionOutOfBounds(_)) => {}
            other => panic!("expected ExpansionOutOfBounds, got {other:?}"),
        }
    }

    #[test]
    fn instance_bounds_multiply_through_nesting() {
        let doc = doc_with(vec![Item::Fragment(Fragment::repeated(
            1,
            LoopBound::Finite(2),
            vec![Item::Fragment(Fragment::opt(vec![Item::Message(
                MessageSpec::new("1", "A", "B", "q"),
            )]))],
        ))]);
        let graph = compile(&doc).unwrap();
        let (min, max) = graph.instance_bounds(OccurrenceId(0));
        assert_eq!(min, 0);
        assert_eq!(max, Some(2));
        assert!(graph.in_loop(OccurrenceId(0)));
    }
}
