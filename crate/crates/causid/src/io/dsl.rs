//! A small text format for diagrams.
//!
//! ```text
//! # A confounded treatment
//! W -> X, W -> Z
//! X -> Z, Z -> Y
//! X <-> Y
//! ```
//!
//! Statements are separated by commas or newlines. A statement is a bare
//! node name, a directed edge `A -> B` or a bidirected edge `A <-> B`.
//! `#` starts a comment. Nodes are ordered by first mention.

use std::fmt::Write as _;

use causid_core::{CausalDiagram, GraphError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("the graph has no nodes")]
    EmptyGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Name(String),
    Arrow,
    BiArrow,
    Separator,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'')
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize, usize)>, DslError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let col = i + 1;
            let c = chars[i];
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
            } else if c == ',' {
                out.push((Token::Separator, ln + 1, col));
                i += 1;
            } else if chars[i..].starts_with(&['<', '-', '>']) {
                out.push((Token::BiArrow, ln + 1, col));
                i += 3;
            } else if chars[i..].starts_with(&['-', '>']) {
                out.push((Token::Arrow, ln + 1, col));
                i += 2;
            } else if is_name_char(c) {
                let start = i;
                while i < chars.len() && is_name_char(chars[i]) {
                    i += 1;
                }
                out.push((Token::Name(chars[start..i].iter().collect()), ln + 1, col));
            } else {
                return Err(DslError::Parse {
                    line: ln + 1,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        out.push((Token::Separator, ln + 1, chars.len() + 1));
    }
    Ok(out)
}

/// Parses the text format into a validated diagram.
pub fn parse_dsl(text: &str) -> Result<CausalDiagram, DslError> {
    let tokens = tokenize(text)?;
    let mut nodes: Vec<String> = Vec::new();
    let mut directed = Vec::new();
    let mut bidirected = Vec::new();
    let mention = |name: &str, nodes: &mut Vec<String>| {
        if !nodes.iter().any(|n| n == name) {
            nodes.push(name.to_string());
        }
    };

    for statement in tokens.split(|(t, _, _)| *t == Token::Separator) {
        match statement {
            [] => {}
            [(Token::Name(a), _, _)] => mention(a, &mut nodes),
            [(Token::Name(a), _, _), (op @ (Token::Arrow | Token::BiArrow), _, _), (Token::Name(b), _, _)] =>
            {
                mention(a, &mut nodes);
                mention(b, &mut nodes);
                if *op == Token::Arrow {
                    directed.push((a.clone(), b.clone()));
                } else {
                    bidirected.push((a.clone(), b.clone()));
                }
            }
            [(_, line, column), ..] => {
                return Err(DslError::Parse {
                    line: *line,
                    column: *column,
                    message: "expected `A`, `A -> B` or `A <-> B`".into(),
                })
            }
        }
    }
    if nodes.is_empty() {
        return Err(DslError::EmptyGraph);
    }
    Ok(CausalDiagram::build(
        &nodes,
        directed.iter().map(|(a, b)| (a, b)),
        bidirected.iter().map(|(a, b)| (a, b)),
    )?)
}

/// Prints a diagram in the text format. The first line lists every node so
/// that parsing the output reproduces the node order.
pub fn render_dsl(g: &CausalDiagram) -> String {
    let mut out = g.names(g.nodes()).join(", ");
    out.push('\n');
    for (a, b) in g.directed_edges() {
        let _ = writeln!(out, "{} -> {}", g.name(a), g.name(b));
    }
    for (a, b) in g.bidirected_edges() {
        let _ = writeln!(out, "{} <-> {}", g.name(a), g.name(b));
    }
    out
}
