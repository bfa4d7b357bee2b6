//! Renderers standing in for drawn charts: a plain-text layout and a DOT
//! graph description. Both are total over valid documents.

use std::fmt::Write;

use crate::model::{FragmentKind, Item, Modality, MscDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    Ascii,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(RenderFormat::Dot),
            "ascii" => Ok(RenderFormat::Ascii),
            other => Err(format!(
                "unknown render format '{other}' (expected dot or ascii)"
            )),
        }
    }
}

pub fn render(doc: &MscDocument, format: RenderFormat) -> String {
    match format {
        RenderFormat::Ascii => render_ascii(doc),
        RenderFormat::Dot => render_dot(doc),
    }
}

/// One row per message in document order: `From --id--> To : label`,
/// with a `?` suffix on optional message ids and `~` gutter rows bounding
/// fragments.
fn render_ascii(doc: &MscDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "msc {}", doc.name);
    let headers: Vec<&str> = doc
        .lifelines
        .iter()
        .map(|l| l.display_name.as_str())
        .collect();
    let header = headers.join("  ");
    let _ = writeln!(out, "{header}");
    let _ = writeln!(out, "{}", "=".repeat(header.chars().count().max(1)));
    ascii_items(&mut out, &doc.body, 0);
    out
}

fn ascii_items(out: &mut String, items: &[Item], depth: usize) {
    let indent = "  ".repeat(depth);
    for item in items {
        match item {
            Item::Message(m) => {
                let opt_mark = if m.modality == Modality::Optional {
                    "?"
                } else {
                    ""
                };
                let phase = m.phase.map(|p| format!("  [{p}]")).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{indent}{} --{}{}--> {} : {}{}",
                    m.from, m.msg_id, opt_mark, m.to, m.label, phase
                );
            }
            Item::Fragment(f) => {
                match f.kind {
                    FragmentKind::Loop { min_iter, max_iter } => {
                        let _ = writeln!(out, "{indent}~ loop ({min_iter}..{max_iter})");
                    }
                    FragmentKind::Opt => {
                        let _ = writeln!(out, "{indent}~ opt");
                    }
                }
                ascii_items(out, &f.body, depth + 1);
                let _ = writeln!(out, "{indent}~ end");
            }
            Item::Scene(s) => {
                let _ = writeln!(out, "{indent}scene: {}", s.name);
            }
            Item::Note(text) => {
                let _ = writeln!(out, "{indent}note: {text}");
            }
        }
    }
}

/// Plain digraph: each lifeline is a column of one node per message row,
/// chained by dotted edges; each message is a directed edge between its
/// row nodes labeled `msg_id: label`. Optional messages render dashed.
fn render_dot(doc: &MscDocument) -> String {
    let messages = doc.messages();
    let rows = messages.len();
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(&doc.name));
    let _ = writeln!(out, "  rankdir=TB;");
    let _ = writeln!(out, "  node [shape=plaintext];");
    for lifeline in &doc.lifelines {
        let id = &lifeline.id;
        let _ = writeln!(
            out,
            "  \"{id}_head\" [label=\"{}\"];",
            dot_escape(&lifeline.display_name)
        );
        for row in 0..rows {
            let _ = writeln!(out, "  \"{id}_{row}\" [label=\"\" shape=point width=0.03];");
        }
        let mut prev = format!("{id}_head");
        for row in 0..rows {
            let node = format!("{id}_{row}");
            let _ = writeln!(
                out,
                "  \"{prev}\" -> \"{node}\" [style=dotted arrowhead=none];"
            );
            prev = node;
        }
    }
    for (row, m) in messages.iter().enumerate() {
        let style = if m.modality == Modality::Optional {
            " style=dashed"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  \"{}_{row}\" -> \"{}_{row}\" [label=\"{}: {}\"{style}];",
            m.from,
            m.to,
            dot_escape(&m.msg_id),
            dot_escape(&m.label)
        );
        let mut rank = "  { rank=same;".to_string();
        for lifeline in &doc.lifelines {
            let _ = write!(rank, " \"{}_{row}\";", lifeline.id);
        }
        let _ = writeln!(out, "{rank} }}");
    }
    out.push_str("}\n");
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn ascii_single_message_row() {
        let doc = parse("protocol P { actors A, B; msg 1 A -> B: \"hi\"; }").unwrap();
        let text = render(&doc, RenderFormat::Ascii);
        assert!(text.contains("A --1--> B"), "{text}");
    }

    #[test]
    fn ascii_marks_optional_messages_and_loops() {
        let src = "protocol P { actors A, B; loop (1..*) { msg 1 A -> B: \"q\"; } msg 2 A -> B: \"s\" [opt]; }";
        let doc = parse(src).unwrap();
        let text = render(&doc, RenderFormat::Ascii);
        assert!(text.contains("~ loop (1..*)"), "{text}");
        assert!(text.contains("--2?-->"), "{text}");
    }

    #[test]
    fn dot_contains_labeled_edge() {
        let doc = parse("protocol P { actors A, B; msg 7 A -> B: \"notify of investigation\"; }")
            .unwrap();
        let text = render(&doc, RenderFormat::Dot);
        assert!(text.starts_with("digraph"), "{text}");
        assert!(text.contains("7: notify of investigation"), "{text}");
    }
}
