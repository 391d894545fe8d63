//! Plain-text graph files: the vertex count on the first line, then one
//! `u v` line (0-indexed, `u < v`) per blue edge in lexicographic order.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use super::ColouredGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

pub fn write_graph<W: Write>(g: &ColouredGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", g.order())?;
    for (u, v) in g.blue_edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

impl ColouredGraph {
    /// The canonical file text for this graph.
    pub fn to_edge_list(&self) -> String {
        let mut buf = Vec::new();
        write_graph(self, &mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge lists are ASCII")
    }
}

pub fn parse_graph(text: &str) -> Result<ColouredGraph, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, "missing vertex count"))?;
    let order: usize = header
        .parse()
        .map_err(|_| ParseError::new(1, format!("bad vertex count {header:?}")))?;
    let mut g = ColouredGraph::all_red(order);
    let mut previous: Option<(usize, usize)> = None;
    for (line, body) in lines {
        if body.is_empty() {
            continue;
        }
        let mut fields = body.split_whitespace();
        let mut endpoint = || -> Result<usize, ParseError> {
            let field = fields
                .next()
                .ok_or_else(|| ParseError::new(line, "expected two vertices"))?;
            field
                .parse()
                .map_err(|_| ParseError::new(line, format!("bad vertex {field:?}")))
        };
        let (u, v) = (endpoint()?, endpoint()?);
        if fields.next().is_some() {
            return Err(ParseError::new(line, "trailing fields"));
        }
        if u >= v {
            return Err(ParseError::new(
                line,
                format!("edge {u} {v} must satisfy u < v"),
            ));
        }
        if v >= order {
            return Err(ParseError::new(
                line,
                format!("vertex {v} out of range for {order} vertices"),
            ));
        }
        if previous.is_some_and(|p| p >= (u, v)) {
            return Err(ParseError::new(
                line,
                format!("edge {u} {v} is duplicated or out of order"),
            ));
        }
        previous = Some((u, v));
        g.set_blue(u, v).expect("endpoints validated above");
    }
    Ok(g)
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<ColouredGraph, ReadError> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| ReadError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_graph(&text).map_err(|source| ReadError::Parse {
        path: shown,
        source,
    })
}
