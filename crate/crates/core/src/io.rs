//! Plain-text edge lists: a header line `n m` followed by `m` lines `u v`
//! (0-based, whitespace separated, LF line endings).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{GraphError, HostGraph};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("{file}: cannot read: {source}")]
    Read {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: cannot write: {source}")]
    Write {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("{file}: {source}")]
    Graph {
        file: String,
        #[source]
        source: GraphError,
    },
}

/// Parses edge-list text. `origin` names the source in error messages.
pub fn parse_edge_list(text: &str, origin: &str) -> Result<HostGraph, EdgeListError> {
    let parse_err = |line: usize, msg: String| EdgeListError::Parse { file: origin.to_string(), line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `n m`".into()))?;
    let nums = parse_pair(header).map_err(|msg| parse_err(hline, msg))?;
    let (n, m) = nums;
    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let e = parse_pair(line).map_err(|msg| parse_err(lineno, msg))?;
        if edges.len() == m {
            return Err(parse_err(lineno, format!("more than the declared {m} edges")));
        }
        edges.push(e);
    }
    if edges.len() != m {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("expected {m} edges, found {}", edges.len()),
        ));
    }
    HostGraph::from_edges(n, &edges).map_err(|source| EdgeListError::Graph { file: origin.to_string(), source })
}

fn parse_pair(line: &str) -> Result<(usize, usize), String> {
    let mut it = line.split_whitespace();
    let a = it.next().ok_or("expected two integers")?;
    let b = it.next().ok_or("expected two integers")?;
    if it.next().is_some() {
        return Err(format!("trailing tokens in `{line}`"));
    }
    let a = a.parse().map_err(|_| format!("not a non-negative integer: `{a}`"))?;
    let b = b.parse().map_err(|_| format!("not a non-negative integer: `{b}`"))?;
    Ok((a, b))
}

pub fn format_edge_list(g: &HostGraph) -> String {
    let mut out = String::with_capacity(16 * (g.m() + 1));
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn read_edge_list(path: &Path) -> Result<HostGraph, EdgeListError> {
    let text = std::fs::read_to_string(path).map_err(|source| EdgeListError::Read { file: path.to_path_buf(), source })?;
    parse_edge_list(&text, &path.display().to_string())
}

pub fn write_edge_list(g: &HostGraph, path: &Path) -> Result<(), EdgeListError> {
    std::fs::write(path, format_edge_list(g)).map_err(|source| EdgeListError::Write { file: path.to_path_buf(), source })
}
