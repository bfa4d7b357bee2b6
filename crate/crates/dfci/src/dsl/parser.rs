//! Recursive-descent parser building an [`MscDocument`] from tokens.
//! Document validation runs as part of [`parse`]; every issue is promoted
//! to a [`ParseError`] carrying the span of the offending token.

use std::collections::BTreeMap;

use super::lexer::{lex, Tok, Token};
use super::{ParseError, SourceSpan};
use crate::model::{
    CustodySpan, Fragment, FragmentKind, Item, Lifeline, LifelineAlias, LoopBound, MessageSpec,
    MscDocument, ObjectiveSpec, Phase, Predicate, Scene,
};
use crate::validate::{validate_document, Issue, IssueCategory};

/// Parse source text into a validated document.
pub fn parse(source: &str) -> Result<MscDocument, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        spans: SpanIndex::default(),
    };
    let mut doc = parser.document()?;
    doc.stamp_scenes();
    let issues = validate_document(&doc);
    if let Some(issue) = issues.first() {
        return Err(parser.spans.promote(issue));
    }
    Ok(doc)
}

/// Spans recorded while parsing, used to localize promoted validation
/// issues.
#[derive(Default)]
struct SpanIndex {
    document: Option<SourceSpan>,
    lifelines: BTreeMap<String, Vec<SourceSpan>>,
    aliases: BTreeMap<String, Vec<SourceSpan>>,
    msg_ids: BTreeMap<String, Vec<SourceSpan>>,
    msg_from: BTreeMap<String, SourceSpan>,
    msg_to: BTreeMap<String, SourceSpan>,
    objectives: BTreeMap<String, SourceSpan>,
    custody: Option<SourceSpan>,
    fragments: Vec<SourceSpan>,
    scenes: Vec<SourceSpan>,
}

impl SpanIndex {
    fn promote(&self, issue: &Issue) -> ParseError {
        let span = self.span_for(issue);
        let found = issue
            .location
            .split_whitespace()
            .last()
            .unwrap_or("")
            .to_string();
        ParseError::at(span, Vec::new(), found, issue.to_string())
    }

    fn span_for(&self, issue: &Issue) -> SourceSpan {
        let fallback = self.document.unwrap_or(SourceSpan {
            line: 1,
            column: 1,
            length: 1,
        });
        let name = issue.location.split_whitespace().last().unwrap_or("");
        let pick_dup = |spans: &BTreeMap<String, Vec<SourceSpan>>| {
            spans
                .get(name)
                .and_then(|v| v.get(1).or_else(|| v.first()))
                .copied()
        };
        match issue.category {
            IssueCategory::InvalidName => self.document,
            IssueCategory::InvalidLifelineId => {
                self.lifelines.get(name).and_then(|v| v.first()).copied()
            }
            IssueCategory::DuplicateLifeline => pick_dup(&self.lifelines),
            IssueCategory::InvalidAlias => self.aliases.get(name).and_then(|v| v.first()).copied(),
            IssueCategory::SelfMessage => self.msg_to.get(name).copied(),
            IssueCategory::UnknownLifeline => {
                // The detail names the offending side.
                if issue.detail.starts_with("sender") {
                    self.msg_from.get(name).copied()
                } else {
                    self.msg_to.get(name).copied()
                }
            }
            IssueCategory::InvalidMsgId | IssueCategory::DuplicateMsgId => pick_dup(&self.msg_ids),
            IssueCategory::EmptyFragment | IssueCategory::InvalidLoopBounds => {
                self.fragments.first().copied()
            }
            IssueCategory::EmptyScene => self.scenes.first().copied(),
            IssueCategory::UnresolvedReference | IssueCategory::DuplicateObjective => {
                self.objectives.get(name).copied()
            }
            IssueCategory::InvalidCustodySpan => self.custody,
        }
        .unwrap_or(fallback)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    spans: SpanIndex,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str], message: String) -> ParseError {
        let t = self.peek();
        ParseError::at(
            t.span,
            expected.iter().map(|s| s.to_string()).collect(),
            t.tok.lexeme(),
            message,
        )
    }

    fn unexpected(&self, expected: &[&str], context: &str) -> ParseError {
        let t = self.peek();
        self.error(
            expected,
            format!(
                "expected {} {}, found '{}'",
                expected.join(" or "),
                context,
                t.tok.lexeme()
            ),
        )
    }

    fn expect_keyword(&mut self, word: &str, context: &str) -> Result<SourceSpan, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == word => Ok(self.advance().span),
            _ => Err(self.unexpected(&[&format!("'{word}'")], context)),
        }
    }

    fn expect_ident(&mut self, context: &str) -> Result<(String, SourceSpan), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let span = self.advance().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(&["identifier"], context)),
        }
    }

    fn expect_string(&mut self, context: &str) -> Result<(String, SourceSpan), ParseError> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                let span = self.advance().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(&["string"], context)),
        }
    }

    fn expect_tok(&mut self, tok: Tok, context: &str) -> Result<SourceSpan, ParseError> {
        if self.peek().tok == tok {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(&[tok.class()], context))
        }
    }

    /// `(ID ".")? MSGLABEL`
    fn msg_id(&mut self, context: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(prefix) => {
                let start = self.advance().span;
                self.expect_tok(Tok::Dot, "after message id qualifier")?;
                let (label, end) = match &self.peek().tok {
                    Tok::MsgLabel(l) => {
                        let l = l.clone();
                        let span = self.advance().span;
                        (l, span)
                    }
                    _ => return Err(self.unexpected(&["message id"], context)),
                };
                let span = SourceSpan {
                    line: start.line,
                    column: start.column,
                    length: end.column + end.length - start.column,
                };
                Ok((format!("{prefix}.{label}"), span))
            }
            Tok::MsgLabel(l) => {
                let span = self.advance().span;
                Ok((l, span))
            }
            _ => Err(self.unexpected(&["message id"], context)),
        }
    }

    fn document(&mut self) -> Result<MscDocument, ParseError> {
        let doc_span = self.expect_keyword("protocol", "at start of document")?;
        self.spans.document = Some(doc_span);
        let (name, _) = self.expect_ident("as document name")?;
        self.expect_tok(Tok::LBrace, "after document name")?;

        let mut doc = MscDocument::new(name);
        self.actors(&mut doc)?;
        while matches!(&self.peek().tok, Tok::Ident(s) if s == "alias") {
            self.alias(&mut doc)?;
        }
        while matches!(&self.peek().tok, Tok::Ident(s) if s == "objective") {
            self.objective(&mut doc)?;
        }
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "custody") {
            self.custody(&mut doc)?;
        }
        doc.body = self.items()?;
        self.expect_tok(Tok::RBrace, "to close the document")?;
        self.expect_tok(Tok::Eof, "after document")?;
        Ok(doc)
    }

    fn actors(&mut self, doc: &mut MscDocument) -> Result<(), ParseError> {
        self.expect_keyword("actors", "to declare lifelines")?;
        loop {
            let (id, span) = self.expect_ident("as lifeline id")?;
            self.spans
                .lifelines
                .entry(id.clone())
                .or_default()
                .push(span);
            let mut lifeline = Lifeline::new(id);
            if self.peek().tok == Tok::Colon {
                self.advance();
                let (display, _) = self.expect_string("as lifeline display name")?;
                lifeline.display_name = display;
            }
            if self.peek().tok == Tok::LBracket {
                self.advance();
                self.expect_keyword("role", "in lifeline attributes")?;
                self.expect_tok(Tok::Eq, "after 'role'")?;
                let (role, _) = self.expect_string("as role value")?;
                lifeline.role = role;
                self.expect_tok(Tok::RBracket, "to close lifeline attributes")?;
            }
            doc.lifelines.push(lifeline);
            match self.peek().tok {
                Tok::Comma => {
                    self.advance();
                }
                Tok::Semi => {
                    self.advance();
                    return Ok(());
                }
                _ => return Err(self.unexpected(&["','", "';'"], "after lifeline")),
            }
        }
    }

    fn alias(&mut self, doc: &mut MscDocument) -> Result<(), ParseError> {
        self.expect_keyword("alias", "")?;
        let (alias, span) = self.expect_ident("as alias name")?;
        self.spans
            .aliases
            .entry(alias.clone())
            .or_default()
            .push(span);
        self.expect_tok(Tok::Eq, "after alias name")?;
        let (canonical, _) = self.expect_ident("as alias target")?;
        self.expect_tok(Tok::Semi, "after alias declaration")?;
        doc.aliases.push(LifelineAlias { alias, canonical });
        Ok(())
    }

    fn objective(&mut self, doc: &mut MscDocument) -> Result<(), ParseError> {
        self.expect_keyword("objective", "")?;
        let (id, span) = self.expect_ident("as objective id")?;
        self.spans.objectives.insert(id.clone(), span);
        let description = if let Tok::Str(_) = self.peek().tok {
            self.expect_string("as objective description")?.0
        } else {
            String::new()
        };
        self.expect_tok(Tok::Colon, "after objective id")?;
        let predicate = self.pred_or()?;
        self.expect_tok(Tok::Semi, "after objective predicate")?;
        doc.objectives.push(ObjectiveSpec {
            id,
            description,
            predicate,
        });
        Ok(())
    }

    fn pred_or(&mut self) -> Result<Predicate, ParseError> {
        let mut left = self.pred_and()?;
        while matches!(&self.peek().tok, Tok::Ident(s) if s == "or") {
            self.advance();
            let right = self.pred_and()?;
            left = left.or(right);
        }
        Ok(left)
    }

    fn pred_and(&mut self) -> Result<Predicate, ParseError> {
        let mut left = self.pred_atom()?;
        while matches!(&self.peek().tok, Tok::Ident(s) if s == "and") {
            self.advance();
            let right = self.pred_atom()?;
            left = left.and(right);
        }
        Ok(left)
    }

    fn pred_atom(&mut self) -> Result<Predicate, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) if s == "eventually" => {
                self.advance();
                self.expect_tok(Tok::LParen, "after 'eventually'")?;
                let (msg, _) = self.msg_id("in eventually(...)")?;
                self.expect_tok(Tok::RParen, "to close eventually(...)")?;
                Ok(Predicate::Eventually(msg))
            }
            Tok::Ident(s) if s == "conformant" => {
                self.advance();
                Ok(Predicate::Conformant)
            }
            Tok::Ident(s) if s == "answered" => {
                self.advance();
                self.expect_tok(Tok::LParen, "after 'answered'")?;
                let (request, _) = self.msg_id("as request message")?;
                self.expect_tok(Tok::Comma, "between answered(...) arguments")?;
                let (answer, _) = self.msg_id("as answer message")?;
                self.expect_tok(Tok::RParen, "to close answered(...)")?;
                Ok(Predicate::Answered { request, answer })
            }
            Tok::LParen => {
                self.advance();
                let inner = self.pred_or()?;
                self.expect_tok(Tok::RParen, "to close predicate group")?;
                Ok(inner)
            }
            _ => Err(self.unexpected(
                &["'eventually'", "'conformant'", "'answered'", "'('"],
                "in objective predicate",
            )),
        }
    }

    fn custody(&mut self, doc: &mut MscDocument) -> Result<(), ParseError> {
        let span = self.expect_keyword("custody", "")?;
        self.spans.custody = Some(span);
        let (start, _) = self.msg_id("as custody span start")?;
        self.expect_tok(Tok::DotDot, "in custody span")?;
        let (end, _) = self.msg_id("as custody span end")?;
        self.expect_tok(Tok::Semi, "after custody span")?;
        doc.custody_span = Some(CustodySpan { start, end });
        Ok(())
    }

    fn items(&mut self) -> Result<Vec<Item>, ParseError> {
        let mut items = Vec::new();
        loop {
            match self.peek().tok.clone() {
                Tok::Ident(s) if s == "msg" => items.push(self.message()?),
                Tok::Ident(s) if s == "loop" => items.push(self.fragment(true)?),
                Tok::Ident(s) if s == "opt" => items.push(self.fragment(false)?),
                Tok::Ident(s) if s == "scene" => items.push(self.scene()?),
                Tok::Ident(s) if s == "note" => items.push(self.note()?),
                _ => return Ok(items),
            }
        }
    }

    fn message(&mut self) -> Result<Item, ParseError> {
        self.expect_keyword("msg", "")?;
        let (msg_id, id_span) = self.msg_id("after 'msg'")?;
        self.spans
            .msg_ids
            .entry(msg_id.clone())
            .or_default()
            .push(id_span);
        let (from, from_span) = self.expect_ident("as sender")?;
        self.spans.msg_from.insert(msg_id.clone(), from_span);
        self.expect_tok(Tok::Arrow, "between sender and receiver")?;
        let (to, to_span) = self.expect_ident("as receiver")?;
        self.spans.msg_to.insert(msg_id.clone(), to_span);
        self.expect_tok(Tok::Colon, "before message label")?;
        let (label, _) = self.expect_string("as message label")?;
        let mut spec = MessageSpec::new(msg_id, from, to, label);
        if self.peek().tok == Tok::LBracket {
            self.advance();
            while self.peek().tok != Tok::RBracket {
                match self.peek().tok.clone() {
                    Tok::Ident(s) if s == "opt" => {
                        self.advance();
                        spec = spec.optional();
                    }
                    Tok::Ident(s) if s == "phase" => {
                        self.advance();
                        self.expect_tok(Tok::Eq, "after 'phase'")?;
                        let (name, span) = self.expect_ident("as phase name")?;
                        match Phase::from_name(&name) {
                            Some(phase) => spec.phase = Some(phase),
                            None => {
                                return Err(ParseError::at(
                                    span,
                                    Phase::ALL.iter().map(|p| format!("'{p}'")).collect(),
                                    name.clone(),
                                    format!("unknown phase '{name}'"),
                                ));
                            }
                        }
                    }
                    _ => {
                        return Err(self.unexpected(&["'opt'", "'phase'"], "in message attributes"))
                    }
                }
            }
            self.expect_tok(Tok::RBracket, "to close message attributes")?;
        }
        self.expect_tok(Tok::Semi, "after message")?;
        Ok(Item::Message(spec))
    }

    fn fragment(&mut self, is_loop: bool) -> Result<Item, ParseError> {
        let kw = if is_loop { "loop" } else { "opt" };
        let span = self.expect_keyword(kw, "")?;
        self.spans.fragments.push(span);
        let kind = if is_loop {
            let (min_iter, max_iter) = if self.peek().tok == Tok::LParen {
                self.advance();
                let min = self.bound_int("as loop lower bound")?;
                self.expect_tok(Tok::DotDot, "in loop bounds")?;
                let max = match self.peek().tok.clone() {
                    Tok::Star => {
                        self.advance();
                        LoopBound::Unbounded
                    }
                    Tok::MsgLabel(_) => LoopBound::Finite(self.bound_int("as loop upper bound")?),
                    _ => return Err(self.unexpected(&["integer", "'*'"], "as loop upper bound")),
                };
                self.expect_tok(Tok::RParen, "to close loop bounds")?;
                (min, max)
            } else {
                (1, LoopBound::Unbounded)
            };
            FragmentKind::Loop { min_iter, max_iter }
        } else {
            FragmentKind::Opt
        };
        self.expect_tok(Tok::LBrace, "to open fragment body")?;
        let body = self.items()?;
        self.expect_tok(Tok::RBrace, "to close fragment body")?;
        Ok(Item::Fragment(Fragment { kind, body }))
    }

    fn bound_int(&mut self, context: &str) -> Result<u32, ParseError> {
        match self.peek().tok.clone() {
            Tok::MsgLabel(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                let span = self.advance().span;
                s.parse().map_err(|_| {
                    ParseError::at(
                        span,
                        vec!["integer".into()],
                        s.clone(),
                        format!("loop bound '{s}' is out of range"),
                    )
                })
            }
            _ => Err(self.unexpected(&["integer"], context)),
        }
    }

    fn scene(&mut self) -> Result<Item, ParseError> {
        self.expect_keyword("scene", "")?;
        let (name, span) = self.expect_string("as scene name")?;
        self.spans.scenes.push(span);
        self.expect_tok(Tok::Semi, "after scene")?;
        Ok(Item::Scene(Scene::new(name)))
    }

    fn note(&mut self) -> Result<Item, ParseError> {
        self.expect_keyword("note", "")?;
        let (text, _) = self.expect_string("as note text")?;
        self.expect_tok(Tok::Semi, "after note")?;
        Ok(Item::Note(text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Modality;

    #[test]
    fn minimal_program() {
        let doc = parse("protocol P { actors A, B; msg 1 A -> B: \"hi\"; }").unwrap();
        assert_eq!(doc.name, "P");
        assert_eq!(doc.lifelines.len(), 2);
        let msgs = doc.messages();
        assert_eq!(msgs.len(), 1);
        assert_eq!(msgs[0].modality, Modality::Mandatory);
        assert_eq!(msgs[0].label, "hi");
    }

    #[test]
    fn self_message_error_points_at_second_endpoint() {
        let err = parse("protocol P { actors A, B; msg 1 A -> A: \"x\"; }").unwrap_err();
        assert!(err.message.contains("same sender and receiver"), "{err}");
        // The receiver token 'A' is at column 38 of the single line.
        assert_eq!(err.span.line, 1);
        assert_eq!(err.span.column, 38);
        assert_eq!(err.found, "1"); // location is "message 1"
    }

    #[test]
    fn attrs_fragments_and_custody_parse() {
        let src = "protocol p {\n  actors A, B;\n  objective done: eventually(2);\n  custody 1 .. 2;\n  msg 1 A -> B: \"go\" [opt phase=Collection];\n  loop (1..3) {\n    msg 2 B -> A: \"back\";\n  }\n}\n";
        let doc = parse(src).unwrap();
        let msgs = doc.messages();
        assert_eq!(msgs[0].modality, Modality::Optional);
        assert_eq!(msgs[0].phase, Some(Phase::Collection));
        assert!(matches!(
            doc.body[1],
            Item::Fragment(Fragment {
                kind: FragmentKind::Loop {
                    min_iter: 1,
                    max_iter: LoopBound::Finite(3)
                },
                ..
            })
        ));
        assert_eq!(doc.custody_span.as_ref().unwrap().start, "1");
    }

    #[test]
    fn missing_semicolon_mentions_found_lexeme() {
        let err = parse("protocol P { actors A, B; msg 1 A -> B: \"x\" msg }").unwrap_err();
        assert!(err.message.contains("found 'msg'"), "{err}");
        assert!(err.expected.iter().any(|e| e.contains(';')));
    }

    #[test]
    fn predicates_nest_with_precedence() {
        let src = "protocol P { actors A, B; objective o: eventually(1) and (eventually(2) or conformant); msg 1 A -> B: \"x\"; msg 2 B -> A: \"y\"; }";
        let doc = parse(src).unwrap();
        match &doc.objectives[0].predicate {
            Predicate::And(l, r) => {
                assert!(matches!(**l, Predicate::Eventually(_)));
                assert!(matches!(**r, Predicate::Or(_, _)));
            }
            other => panic!("unexpected predicate {other:?}"),
        }
    }
}
