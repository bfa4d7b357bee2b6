//! Core object model for message sequence charts.
//!
//! A document is an ordered body of messages, structured fragments
//! (`loop` / `opt`), scene shifts, and notes over a declared set of
//! lifelines, plus declarative objectives and an optional custody span.
//! Values are immutable once built; every operation over them in this
//! crate is a pure function, so shared documents can be used from
//! multiple threads without coordination.

use std::fmt;

/// One actor timeline in a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifeline {
    /// Unique machine name, token syntax `[A-Za-z][A-Za-z0-9_]*`.
    pub id: String,
    /// Human label used by renderers; defaults to `id`.
    pub display_name: String,
    /// Free-form role tag; empty when unassigned.
    pub role: String,
}

impl Lifeline {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Lifeline {
            display_name: id.clone(),
            id,
            role: String::new(),
        }
    }

    pub fn named(id: impl Into<String>, display_name: impl Into<String>) -> Self {
        Lifeline {
            id: id.into(),
            display_name: display_name.into(),
            role: String::new(),
        }
    }

    pub fn with_role(mut self, role: impl Into<String>) -> Self {
        self.role = role.into();
        self
    }
}

/// Alternate name for a declared lifeline. Message specs and trace events
/// may use either the alias or the canonical id; ordering semantics treat
/// both as the same timeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LifelineAlias {
    pub alias: String,
    pub canonical: String,
}

/// Whether a message must occur in every completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    Mandatory,
    Optional,
}

/// Stages of the evidence-handling process a message can be tagged with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Identification,
    Preservation,
    Collection,
    Examination,
    Analysis,
    Presentation,
    Decision,
}

impl Phase {
    pub const ALL: [Phase; 7] = [
        Phase::Identification,
        Phase::Preservation,
        Phase::Collection,
        Phase::Examination,
        Phase::Analysis,
        Phase::Presentation,
        Phase::Decision,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Identification => "Identification",
            Phase::Preservation => "Preservation",
            Phase::Collection => "Collection",
            Phase::Examination => "Examination",
            Phase::Analysis => "Analysis",
            Phase::Presentation => "Presentation",
            Phase::Decision => "Decision",
        }
    }

    pub fn from_name(name: &str) -> Option<Phase> {
        Phase::ALL.iter().copied().find(|p| p.as_str() == name)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A location marker; applies to every later message until the next marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    pub name: String,
}

impl Scene {
    pub fn new(name: impl Into<String>) -> Self {
        Scene { name: name.into() }
    }
}

/// One arrow of the chart: a single message from one lifeline to another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageSpec {
    /// Numeric label, optionally qualified (`"1"`, `"2a"`, `"trial.9b"`).
    pub msg_id: String,
    pub from: String,
    pub to: String,
    /// Payload description.
    pub label: String,
    pub modality: Modality,
    pub phase: Option<Phase>,
    /// Prevailing scene, derived from the nearest preceding scene marker.
    pub scene: Option<Scene>,
}

impl MessageSpec {
    pub fn new(
        msg_id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        label: impl Into<String>,
    ) -> Self {
        MessageSpec {
            msg_id: msg_id.into(),
            from: from.into(),
            to: to.into(),
            label: label.into(),
            modality: Modality::Mandatory,
            phase: None,
            scene: None,
        }
    }

    pub fn optional(mut self) -> Self {
        self.modality = Modality::Optional;
        self
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = Some(phase);
        self
    }
}

/// Upper bound of a loop fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopBound {
    Finite(u32),
    Unbounded,
}

impl fmt::Display for LoopBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopBound::Finite(n) => write!(f, "{n}"),
            LoopBound::Unbounded => f.write_str("*"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentKind {
    Loop { min_iter: u32, max_iter: LoopBound },
    Opt,
}

/// A structured region of the chart: an optional block or a bounded loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub kind: FragmentKind,
    pub body: Vec<Item>,
}

impl Fragment {
    pub fn opt(body: Vec<Item>) -> Self {
        Fragment {
            kind: FragmentKind::Opt,
            body,
        }
    }

    pub fn repeated(min_iter: u32, max_iter: LoopBound, body: Vec<Item>) -> Self {
        Fragment {
            kind: FragmentKind::Loop { min_iter, max_iter },
            body,
        }
    }
}

/// One entry of a document body, in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Message(MessageSpec),
    Fragment(Fragment),
    Scene(Scene),
    Note(String),
}

/// Declarative pattern an objective is checked against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    /// Some delivery (receive) of the message exists in the trace.
    Eventually(String),
    /// The whole trace conforms to the chart.
    Conformant,
    /// If the request message was ever sent, the answer was delivered.
    Answered {
        request: String,
        answer: String,
    },
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
}

impl Predicate {
    pub fn and(self, other: Predicate) -> Predicate {
        Predicate::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Predicate) -> Predicate {
        Predicate::Or(Box::new(self), Box::new(other))
    }

    /// Message ids referenced anywhere in the predicate.
    pub fn referenced_msg_ids(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Predicate::Eventually(m) => out.push(m),
            Predicate::Conformant => {}
            Predicate::Answered { request, answer } => {
                out.push(request);
                out.push(answer);
            }
            Predicate::And(l, r) | Predicate::Or(l, r) => {
                l.collect_refs(out);
                r.collect_refs(out);
            }
        }
    }
}

/// A functional requirement a completed run must satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveSpec {
    pub id: String,
    /// Short human description; empty when unset.
    pub description: String,
    pub predicate: Predicate,
}

/// Evidence-custody window, from the first message at which custody must
/// start to the last message it must outlast.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustodySpan {
    pub start: String,
    pub end: String,
}

/// A parsed chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MscDocument {
    /// Document name, token syntax; traces reference it as `protocol`.
    pub name: String,
    pub lifelines: Vec<Lifeline>,
    pub aliases: Vec<LifelineAlias>,
    pub body: Vec<Item>,
    pub objectives: Vec<ObjectiveSpec>,
    pub custody_span: Option<CustodySpan>,
}

impl MscDocument {
    pub fn new(name: impl Into<String>) -> Self {
        MscDocument {
            name: name.into(),
            lifelines: Vec::new(),
            aliases: Vec::new(),
            body: Vec::new(),
            objectives: Vec::new(),
            custody_span: None,
        }
    }

    /// Canonical lifeline id for `name`: declared ids map to themselves,
    /// aliases to their target. `None` when the name is not declared.
    pub fn resolve_lifeline<'a>(&'a self, name: &'a str) -> Option<&'a str> {
        if self.lifelines.iter().any(|l| l.id == name) {
            return Some(name);
        }
        self.aliases
            .iter()
            .find(|a| a.alias == name)
            .map(|a| a.canonical.as_str())
    }

    pub fn lifeline(&self, id: &str) -> Option<&Lifeline> {
        self.lifelines.iter().find(|l| l.id == id)
    }

    /// All messages in document order, fragments flattened depth-first.
    pub fn messages(&self) -> Vec<&MessageSpec> {
        let mut out = Vec::new();
        collect_messages(&self.body, &mut out);
        out
    }

    pub fn message(&self, msg_id: &str) -> Option<&MessageSpec> {
        self.messages().into_iter().find(|m| m.msg_id == msg_id)
    }

    /// Position of a message in document order, if present.
    pub fn doc_position(&self, msg_id: &str) -> Option<usize> {
        self.messages().iter().position(|m| m.msg_id == msg_id)
    }

    /// Recompute every message's `scene` field from the scene markers in
    /// the body. Parsing and the built-in constructors both go through
    /// this, so the field is always derivable from the markers.
    pub fn stamp_scenes(&mut self) {
        let mut current: Option<Scene> = None;
        stamp_items(&mut self.body, &mut current);
    }
}

fn collect_messages<'a>(items: &'a [Item], out: &mut Vec<&'a MessageSpec>) {
    for item in items {
        match item {
            Item::Message(m) => out.push(m),
            Item::Fragment(f) => collect_messages(&f.body, out),
            Item::Scene(_) | Item::Note(_) => {}
        }
    }
}

fn stamp_items(items: &mut [Item], current: &mut Option<Scene>) {
    for item in items {
        match item {
            Item::Scene(s) => *current = Some(s.clone()),
            Item::Message(m) => m.scene = current.clone(),
            Item::Fragment(f) => stamp_items(&mut f.body, current),
            Item::Note(_) => {}
        }
    }
}
