//! Structural validation of documents. Issues are data, not failures:
//! a well-formed document yields an empty list.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::{FragmentKind, Item, LoopBound, MscDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IssueCategory {
    InvalidName,
    InvalidLifelineId,
    DuplicateLifeline,
    InvalidAlias,
    UnknownLifeline,
    SelfMessage,
    InvalidMsgId,
    DuplicateMsgId,
    EmptyFragment,
    InvalidLoopBounds,
    EmptyScene,
    UnresolvedReference,
    DuplicateObjective,
    InvalidCustodySpan,
}

impl fmt::Display for IssueCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            IssueCategory::InvalidName => "InvalidName",
            IssueCategory::InvalidLifelineId => "InvalidLifelineId",
            IssueCategory::DuplicateLifeline => "DuplicateLifeline",
            IssueCategory::InvalidAlias => "InvalidAlias",
            IssueCategory::UnknownLifeline => "UnknownLifeline",
            IssueCategory::SelfMessage => "SelfMessage",
            IssueCategory::InvalidMsgId => "InvalidMsgId",
            IssueCategory::DuplicateMsgId => "DuplicateMsgId",
            IssueCategory::EmptyFragment => "EmptyFragment",
            IssueCategory::InvalidLoopBounds => "InvalidLoopBounds",
            IssueCategory::EmptyScene => "EmptyScene",
            IssueCategory::UnresolvedReference => "UnresolvedReference",
            IssueCategory::DuplicateObjective => "DuplicateObjective",
            IssueCategory::InvalidCustodySpan => "InvalidCustodySpan",
        };
        f.write_str(name)
    }
}

/// One validation finding, with a human-readable location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub category: IssueCategory,
    pub location: String,
    pub detail: String,
}

impl Issue {
    fn new(
        category: IssueCategory,
        location: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        Issue {
            category,
            location: location.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.category, self.location, self.detail)
    }
}

/// `[A-Za-z][A-Za-z0-9_]*`
pub fn is_token(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Message label: digits with an optional single lowercase suffix,
/// optionally qualified by a token prefix (`5`, `2a`, `trial.9b`).
pub fn is_msg_label(s: &str) -> bool {
    let unqualified = match s.split_once('.') {
        Some((prefix, rest)) => {
            if !is_token(prefix) {
                return false;
            }
            rest
        }
        None => s,
    };
    let digits: String = unqualified
        .chars()
        .take_while(|c| c.is_ascii_digit())
        .collect();
    if digits.is_empty() {
        return false;
    }
    let rest = &unqualified[digits.len()..];
    rest.is_empty() || (rest.len() == 1 && rest.chars().all(|c| c.is_ascii_lowercase()))
}

/// Check every document invariant; empty result means the document is valid.
pub fn validate_document(doc: &MscDocument) -> Vec<Issue> {
    let mut issues = Vec::new();

    if !is_token(&doc.name) {
        issues.push(Issue::new(
            IssueCategory::InvalidName,
            "document",
            format!("document name '{}' is not a token", doc.name),
        ));
    }

    let mut seen = BTreeSet::new();
    for lifeline in &doc.lifelines {
        let loc = format!("lifeline {}", lifeline.id);
        if !is_token(&lifeline.id) {
            issues.push(Issue::new(
                IssueCategory::InvalidLifelineId,
                loc.clone(),
                format!("lifeline id '{}' is not a token", lifeline.id),
            ));
        }
        if !seen.insert(lifeline.id.clone()) {
            issues.push(Issue::new(
                IssueCategory::DuplicateLifeline,
                loc,
                format!("lifeline id '{}' is declared more than once", lifeline.id),
            ));
        }
    }

    for alias in &doc.aliases {
        let loc = format!("alias {}", alias.alias);
        if !is_token(&alias.alias) {
            issues.push(Issue::new(
                IssueCategory::InvalidAlias,
                loc.clone(),
                format!("alias '{}' is not a token", alias.alias),
            ));
        } else if seen.contains(&alias.alias) {
            issues.push(Issue::new(
                IssueCategory::InvalidAlias,
                loc.clone(),
                format!("alias '{}' shadows a declared lifeline", alias.alias),
            ));
        }
        if !seen.contains(&alias.canonical) {
            issues.push(Issue::new(
                IssueCategory::InvalidAlias,
                loc,
                format!(
                    "alias target '{}' is not a declared lifeline",
                    alias.canonical
                ),
            ));
        }
    }

    let mut msg_ids = BTreeSet::new();
    check_items(doc, &doc.body, &mut msg_ids, &mut issues);

    for objective in &doc.objectives {
        let loc = format!("objective {}", objective.id);
        if !is_token(&objective.id) {
            issues.push(Issue::new(
                IssueCategory::UnresolvedReference,
                loc.clone(),
                format!("objective id '{}' is not a token", objective.id),
            ));
        }
        if doc
            .objectives
            .iter()
            .filter(|o| o.id == objective.id)
            .count()
            > 1
            && doc
                .objectives
                .iter()
                .position(|o| o.id == objective.id)
                .map(|first| !std::ptr::eq(&doc.objectives[first], objective))
                .unwrap_or(false)
        {
            issues.push(Issue::new(
                IssueCategory::DuplicateObjective,
                loc.clone(),
                format!("objective id '{}' is declared more than once", objective.id),
            ));
        }
        for msg_id in objective.predicate.referenced_msg_ids() {
            if !msg_ids.contains(msg_id) {
                issues.push(Issue::new(
                    IssueCategory::UnresolvedReference,
                    loc.clone(),
                    format!("objective references unknown message '{msg_id}'"),
                ));
            }
        }
    }

    if let Some(span) = &doc.custody_span {
        let start_pos = doc.doc_position(&span.start);
        let end_pos = doc.doc_position(&span.end);
        match (start_pos, end_pos) {
            (Some(s), Some(e)) if s >= e => issues.push(Issue::new(
                IssueCategory::InvalidCustodySpan,
                "custody span",
                format!(
                    "span start '{}' does not precede end '{}' in document order",
                    span.start, span.end
                ),
            )),
            (Some(_), Some(_)) => {}
            _ => {
                let missing = if start_pos.is_none() {
                    &span.start
                } else {
                    &span.end
                };
                issues.push(Issue::new(
                    IssueCategory::InvalidCustodySpan,
                    "custody span",
                    format!("span references unknown message '{missing}'"),
                ));
            }
        }
    }

    issues
}

fn check_items(
    doc: &MscDocument,
    items: &[Item],
    msg_ids: &mut BTreeSet<String>,
    issues: &mut Vec<Issue>,
) {
    for item in items {
        match item {
            Item::Message(m) => {
                let loc = format!("message {}", m.msg_id);
                if !is_msg_label(&m.msg_id) {
                    issues.push(Issue::new(
                        IssueCategory::InvalidMsgId,
                        loc.clone(),
                        format!("message id '{}' is not a message label", m.msg_id),
                    ));
                }
                if !msg_ids.insert(m.msg_id.clone()) {
                    issues.push(Issue::new(
                        IssueCategory::DuplicateMsgId,
                        loc.clone(),
                        format!("message id '{}' is used more than once", m.msg_id),
                    ));
                }
                let from = doc.resolve_lifeline(&m.from);
                let to = doc.resolve_lifeline(&m.to);
                if from.is_none() {
                    issues.push(Issue::new(
                        IssueCategory::UnknownLifeline,
                        loc.clone(),
                        format!("sender '{}' is not a declared lifeline", m.from),
                    ));
                }
                if to.is_none() {
                    issues.push(Issue::new(
                        IssueCategory::UnknownLifeline,
                        loc.clone(),
                        format!("receiver '{}' is not a declared lifeline", m.to),
                    ));
                }
                if let (Some(f), Some(t)) = (from, to) {
                    if f == t {
                        issues.push(Issue::new(
                            IssueCategory::SelfMessage,
                            loc,
                            format!("message '{}' has the same sender and receiver", m.msg_id),
                        ));
                    }
                }
            }
            Item::Fragment(f) => {
                if f.body
                    .iter()
                    .all(|i| matches!(i, Item::Scene(_) | Item::Note(_)))
                {
                    issues.push(Issue::new(
                        IssueCategory::EmptyFragment,
                        "fragment",
                        "fragment body contains no messages or fragments",
                    ));
                }
                if let FragmentKind::Loop {
                    min_iter,
                    max_iter: LoopBound::Finite(max),
                } = f.kind
                {
                    if max == 0 || min_iter > max {
                        issues.push(Issue::new(
                            IssueCategory::InvalidLoopBounds,
                            "fragment",
                            format!("loop bounds ({min_iter}..{max}) are not satisfiable"),
                        ));
                    }
                }
                check_items(doc, &f.body, msg_ids, issues);
            }
            Item::Scene(s) => {
                if s.name.is_empty() {
                    issues.push(Issue::new(
                        IssueCategory::EmptyScene,
                        "scene",
                        "scene name is empty",
                    ));
                }
            }
            Item::Note(_) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Lifeline, MessageSpec, ObjectiveSpec, Predicate};

    fn base_doc() -> MscDocument {
        let mut doc = MscDocument::new("p");
        doc.lifelines = vec![Lifeline::new("A"), Lifeline::new("B")];
        doc.body = vec![Item::Message(MessageSpec::new("1", "A", "B", "x"))];
        doc
    }

    #[test]
    fn valid_document_has_no_issues() {
        assert!(validate_document(&base_doc()).is_empty());
    }

    #[test]
    fn self_message_is_reported() {
        let mut doc = base_doc();
        doc.body = vec![Item::Message(MessageSpec::new("1", "A", "A", "x"))];
        let issues = validate_document(&doc);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].category, IssueCategory::SelfMessage);
    }

    #[test]
    fn objective_referencing_unknown_message_is_reported() {
        let mut doc = base_doc();
        doc.objectives.push(ObjectiveSpec {
            id: "obj".into(),
            description: String::new(),
            predicate: Predicate::Eventually("99".into()),
        });
        let issues = validate_document(&doc);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].category, IssueCategory::UnresolvedReference);
    }

    #[test]
    fn alias_shadowing_declared_lifeline_is_invalid() {
        let mut doc = base_doc();
        doc.aliases.push(crate::model::LifelineAlias {
            alias: "B".into(),
            canonical: "A".into(),
        });
        let issues = validate_document(&doc);
        assert!(issues
            .iter()
            .any(|i| i.category == IssueCategory::InvalidAlias));
    }

    #[test]
    fn msg_label_syntax() {
        assert!(is_msg_label("1"));
        assert!(is_msg_label("2a"));
        assert!(is_msg_label("10"));
        assert!(is_msg_label("trial.9b"));
        assert!(!is_msg_label(""));
        assert!(!is_msg_label("a1"));
        assert!(!is_msg_label("2A"));
        assert!(!is_msg_label("2ab"));
        assert!(!is_msg_label(".5"));
    }
}
