//! Tokenizer for the chart language. Line endings are normalized to LF
//! before lexing; `#` starts a comment that runs to end of line.

use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Digits with an optional single lowercase suffix (`1`, `2a`).
    MsgLabel(String),
    Str(String),
    Arrow,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Eq,
    DotDot,
    Dot,
    Star,
    Eof,
}

impl Tok {
    /// Short class name used in "expected ..." diagnostics.
    pub fn class(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::MsgLabel(_) => "message id",
            Tok::Str(_) => "string",
            Tok::Arrow => "'->'",
            Tok::LBrace => "'{'",
            Tok::RBrace => "'}'",
            Tok::LBracket => "'['",
            Tok::RBracket => "']'",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::Colon => "':'",
            Tok::Semi => "';'",
            Tok::Comma => "','",
            Tok::Eq => "'='",
            Tok::DotDot => "'..'",
            Tok::Dot => "'.'",
            Tok::Star => "'*'",
            Tok::Eof => "end of input",
        }
    }

    pub fn lexeme(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::MsgLabel(s) => s.clone(),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Arrow => "->".into(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
            Tok::LBracket => "[".into(),
            Tok::RBracket => "]".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Colon => ":".into(),
            Tok::Semi => ";".into(),
            Tok::Comma => ",".into(),
            Tok::Eq => "=".into(),
            Tok::DotDot => "..".into(),
            Tok::Dot => ".".into(),
            Tok::Star => "*".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let normalized = source.replace("\r\n", "\n").replace('\r', "\n");
    let chars: Vec<char> = normalized.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    let mut line = 1usize;
    let mut col = 1usize;

    macro_rules! push {
        ($tok:expr, $line:expr, $col:expr, $len:expr) => {
            tokens.push(Token {
                tok: $tok,
                span: SourceSpan {
                    line: $line,
                    column: $col,
                    length: $len,
                },
            })
        };
    }

    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' => {
                push!(Tok::LBrace, line, col, 1);
                i += 1;
                col += 1;
            }
            '}' => {
                push!(Tok::RBrace, line, col, 1);
                i += 1;
                col += 1;
            }
            '[' => {
                push!(Tok::LBracket, line, col, 1);
                i += 1;
                col += 1;
            }
            ']' => {
                push!(Tok::RBracket, line, col, 1);
                i += 1;
                col += 1;
            }
            '(' => {
                push!(Tok::LParen, line, col, 1);
                i += 1;
                col += 1;
            }
            ')' => {
                push!(Tok::RParen, line, col, 1);
                i += 1;
                col += 1;
            }
            ':' => {
                push!(Tok::Colon, line, col, 1);
                i += 1;
                col += 1;
            }
            ';' => {
                push!(Tok::Semi, line, col, 1);
                i += 1;
                col += 1;
            }
            ',' => {
                push!(Tok::Comma, line, col, 1);
                i += 1;
                col += 1;
            }
            '=' => {
                push!(Tok::Eq, line, col, 1);
                i += 1;
                col += 1;
            }
            '*' => {
                push!(Tok::Star, line, col, 1);
                i += 1;
                col += 1;
            }
            '.' => {
                if chars.get(i + 1) == Some(&'.') {
                    push!(Tok::DotDot, line, col, 2);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Dot, line, col, 1);
                    i += 1;
                    col += 1;
                }
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    push!(Tok::Arrow, line, col, 2);
                    i += 2;
                    col += 2;
                } else {
                    return Err(ParseError::at(
                        SourceSpan {
                            line,
                            column: col,
                            length: 1,
                        },
                        vec!["'->'".into()],
                        "-",
                        "stray '-': expected '->'",
                    ));
                }
            }
            '"' => {
                let start_col = col;
                let mut value = String::new();
                i += 1;
                col += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(ParseError::at(
                                SourceSpan {
                                    line,
                                    column: start_col,
                                    length: col - start_col,
                                },
                                vec!["'\"'".into()],
                                "end of line",
                                "unterminated string: no closing '\"' before end of line",
                            ));
                        }
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => match chars.get(i + 1) {
                            Some('"') => {
                                value.push('"');
                                i += 2;
                                col += 2;
                            }
                            Some('\\') => {
                                value.push('\\');
                                i += 2;
                                col += 2;
                            }
                            other => {
                                let found = other
                                    .map(|c| format!("\\{c}"))
                                    .unwrap_or_else(|| "\\".into());
                                return Err(ParseError::at(
                                    SourceSpan {
                                        line,
                                        column: col,
                                        length: 2,
                                    },
                                    vec!["'\\\"'".into(), "'\\\\'".into()],
                                    found.clone(),
                                    format!("unsupported escape '{found}' in string"),
                                ));
                            }
                        },
                        Some(&c) => {
                            value.push(c);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                push!(Tok::Str(value), line, start_col, col - start_col);
            }
            c if c.is_ascii_digit() => {
                let start_col = col;
                let mut value = String::new();
                while let Some(&d) = chars.get(i) {
                    if d.is_ascii_digit() {
                        value.push(d);
                        i += 1;
                        col += 1;
                    } else {
                        break;
                    }
                }
                if let Some(&suffix) = chars.get(i) {
                    if suffix.is_ascii_lowercase() {
                        value.push(suffix);
                        i += 1;
                        col += 1;
                    }
                }
                if let Some(&bad) = chars.get(i) {
                    if bad.is_ascii_alphanumeric() || bad == '_' {
                        return Err(ParseError::at(
                            SourceSpan { line, column: start_col, length: col - start_col + 1 },
                            vec!["message id".into()],
                            format!("{value}{bad}"),
                            format!(
                                "malformed message id '{value}{bad}': digits may carry at most one lowercase suffix"
                            ),
                        ));
                    }
                }
                push!(Tok::MsgLabel(value), line, start_col, col - start_col);
            }
            c if c.is_ascii_alphabetic() => {
                let start_col = col;
                let mut value = String::new();
                while let Some(&d) = chars.get(i) {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        value.push(d);
                        i += 1;
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(value), line, start_col, col - start_col);
            }
            other => {
                return Err(ParseError::at(
                    SourceSpan {
                        line,
                        column: col,
                        length: 1,
                    },
                    vec!["token".into()],
                    other.to_string(),
                    format!("unexpected character '{other}'"),
                ));
            }
        }
    }
    push!(Tok::Eof, line, col, 1);
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_message_line() {
        let toks = lex("msg 2a A -> B: \"x\\\"y\";").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("msg".into()),
                Tok::MsgLabel("2a".into()),
                Tok::Ident("A".into()),
                Tok::Arrow,
                Tok::Ident("B".into()),
                Tok::Colon,
                Tok::Str("x\"y".into()),
                Tok::Semi,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn lexes_qualified_ids_and_ranges() {
        let toks = lex("custody investigation.5 .. trial.9b;").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("custody".into()),
                Tok::Ident("investigation".into()),
                Tok::Dot,
                Tok::MsgLabel("5".into()),
                Tok::DotDot,
                Tok::Ident("trial".into()),
                Tok::Dot,
                Tok::MsgLabel("9b".into()),
                Tok::Semi,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn comments_and_crlf_are_handled() {
        let toks = lex("# intro\r\nscene \"lab\"; # trailing\n").unwrap();
        assert_eq!(toks.len(), 4); // scene, "lab", ;, eof
        assert_eq!(toks[0].span.line, 2);
    }

    #[test]
    fn unknown_character_is_a_localized_error() {
        let err = lex("actors A;\n@ bad\n").unwrap_err();
        assert_eq!(err.span.line, 2);
        assert_eq!(err.span.column, 1);
        assert!(err.message.contains('@'));
    }
}
