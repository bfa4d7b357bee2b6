//! Executable message sequence charts for digital-forensics case protocols.
//!
//! The crate models charts as partial orders of send/receive events,
//! provides a textual surface language with canonical serialization and
//! renderers, checks recorded event traces for conformance and functional
//! objectives, maintains a hash-chained chain-of-custody ledger, ships the
//! built-in `init` / `investigation` / `trial` case protocols, and drives
//! everything from a deterministic simulator with fault injection.
//!
//! Start with the runnable examples (`cargo run --example ...`) or the
//! `dfci` command-line tool; the library surface mirrors both.

pub mod cli;
pub mod conformance;
pub mod coverage;
pub mod custody;
pub mod dsl;
pub mod graph;
pub mod linearize;
pub mod model;
pub mod objectives;
pub mod oracle;
pub mod protocols;
pub mod sim;
pub mod trace;
pub mod validate;

pub use conformance::{
    check_trace, check_trace_mode, CheckMode, ConformanceError, ConformanceReport, Verdict,
    Violation, ViolationAt, ViolationKind,
};
pub use coverage::{check_custody_coverage, CoverageGap, CoverageGapKind, CoverageReport};
pub use custody::{
    open_chain, CustodyAction, CustodyChain, CustodyEntry, CustodyError, EntryDraft, VerifyResult,
};
pub use dsl::{parse, render, serialize, ParseError, RenderFormat, SourceSpan};
pub use graph::{compile, EventGraph, EventKind, FragmentExpansion, ModelError};
pub use linearize::linearizations;
pub use model::{
    Fragment, FragmentKind, Item, Lifeline, LifelineAlias, LoopBound, MessageSpec, Modality,
    MscDocument, ObjectiveSpec, Phase, Predicate, Scene,
};
pub use objectives::{check_objectives, ObjectiveReport, ObjectiveResult, ObjectiveStatus};
pub use oracle::oracle_check;
pub use trace::TraceEvent;
pub use validate::{validate_document, Issue, IssueCategory};
