//! Canonical serializer: one item per line, two-space indent per fragment
//! depth, attributes sorted. `parse(serialize(doc))` reproduces `doc`
//! exactly, and serializing again yields the same text.

use std::fmt::Write;

use crate::model::{FragmentKind, Item, Lifeline, Modality, MscDocument, Predicate};

pub fn serialize(doc: &MscDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "protocol {} {{", doc.name);

    let actors: Vec<String> = doc.lifelines.iter().map(format_lifeline).collect();
    let _ = writeln!(out, "  actors {};", actors.join(", "));

    for alias in &doc.aliases {
        let _ = writeln!(out, "  alias {} = {};", alias.alias, alias.canonical);
    }
    for objective in &doc.objectives {
        let desc = if objective.description.is_empty() {
            String::new()
        } else {
            format!(" \"{}\"", escape(&objective.description))
        };
        let _ = writeln!(
            out,
            "  objective {}{}: {};",
            objective.id,
            desc,
            format_pred(&objective.predicate, 0)
        );
    }
    if let Some(span) = &doc.custody_span {
        let _ = writeln!(out, "  custody {} .. {};", span.start, span.end);
    }
    write_items(&mut out, &doc.body, 1);
    out.push_str("}\n");
    out
}

fn format_lifeline(lifeline: &Lifeline) -> String {
    let mut s = lifeline.id.clone();
    if lifeline.display_name != lifeline.id {
        let _ = write!(s, ": \"{}\"", escape(&lifeline.display_name));
    }
    if !lifeline.role.is_empty() {
        let _ = write!(s, " [role=\"{}\"]", escape(&lifeline.role));
    }
    s
}

fn write_items(out: &mut String, items: &[Item], depth: usize) {
    let indent = "  ".repeat(depth);
    for item in items {
        match item {
            Item::Message(m) => {
                let mut attrs: Vec<String> = Vec::new();
                if m.modality == Modality::Optional {
                    attrs.push("opt".to_string());
                }
                if let Some(phase) = m.phase {
                    attrs.push(format!("phase={phase}"));
                }
                attrs.sort();
                let attrs = if attrs.is_empty() {
                    String::new()
                } else {
                    format!(" [{}]", attrs.join(" "))
                };
                let _ = writeln!(
                    out,
                    "{indent}msg {} {} -> {}: \"{}\"{attrs};",
                    m.msg_id,
                    m.from,
                    m.to,
                    escape(&m.label)
                );
            }
            Item::Fragment(f) => {
                match f.kind {
                    FragmentKind::Loop { min_iter, max_iter } => {
                        let _ = writeln!(out, "{indent}loop ({min_iter}..{max_iter}) {{");
                    }
                    FragmentKind::Opt => {
                        let _ = writeln!(out, "{indent}opt {{");
                    }
                }
                write_items(out, &f.body, depth + 1);
                let _ = writeln!(out, "{indent}}}");
            }
            Item::Scene(s) => {
                let _ = writeln!(out, "{indent}scene \"{}\";", escape(&s.name));
            }
            Item::Note(text) => {
                let _ = writeln!(out, "{indent}note \"{}\";", escape(text));
            }
        }
    }
}

/// Precedence levels: `or` = 0, `and` = 1, atoms = 2. A subterm is
/// parenthesized exactly when its level is below what its position
/// requires, so the emitted text re-parses to the same tree.
fn format_pred(pred: &Predicate, min_level: u8) -> String {
    match pred {
        Predicate::Eventually(m) => format!("eventually({m})"),
        Predicate::Conformant => "conformant".to_string(),
        Predicate::Answered { request, answer } => format!("answered({request}, {answer})"),
        Predicate::Or(l, r) => {
            let s = format!("{} or {}", format_pred(l, 0), format_pred(r, 1));
            if min_level > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Predicate::And(l, r) => {
            let s = format!("{} and {}", format_pred(l, 1), format_pred(r, 2));
            if min_level > 1 {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::model::{Item, Lifeline, MessageSpec};

    #[test]
    fn minimal_document_is_four_lines() {
        let mut doc = MscDocument::new("P");
        doc.lifelines = vec![Lifeline::new("A"), Lifeline::new("B")];
        doc.body = vec![Item::Message(MessageSpec::new("1", "A", "B", "hi"))];
        assert_eq!(
            serialize(&doc),
            "protocol P {\n  actors A, B;\n  msg 1 A -> B: \"hi\";\n}\n"
        );
    }

    #[test]
    fn round_trips_escapes_and_attrs() {
        let src = "protocol p {\n  actors A: \"Ann \\\"A\\\"\" [role=\"first\"], B;\n  msg 1 A -> B: \"two \\\\ one\" [opt phase=Decision];\n}\n";
        let doc = parse(src).unwrap();
        assert_eq!(serialize(&doc), src);
        assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
    }

    #[test]
    fn predicate_parentheses_preserve_shape() {
        let src = "protocol p {\n  actors A, B;\n  objective o: (eventually(1) or conformant) and eventually(2);\n  msg 1 A -> B: \"x\";\n  msg 2 B -> A: \"y\";\n}\n";
        let doc = parse(src).unwrap();
        assert_eq!(serialize(&doc), src);
        let reparsed = parse(&serialize(&doc)).unwrap();
        assert_eq!(reparsed, doc);
    }
}
