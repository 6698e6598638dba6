//! Edge-list and Matrix Market readers and writers.
//!
//! Both readers deduplicate edges, symmetrize, and drop self-loops with a
//! warning.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    /// ASCII "u v" pairs, 0-based, with an optional `# n=<N>` header.
    EdgeList,
    /// Coordinate Matrix Market, 1-based.
    MatrixMarket,
}

impl GraphFormat {
    /// `.mtx` files are Matrix Market; everything else is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => GraphFormat::MatrixMarket,
            _ => GraphFormat::EdgeList,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::EdgeList => "txt",
            GraphFormat::MatrixMarket => "mtx",
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" | "edge-list" | "txt" => Ok(GraphFormat::EdgeList),
            "mtx" | "matrix-market" => Ok(GraphFormat::MatrixMarket),
            other => Err(Error::format(format!("unknown graph format '{other}'"))),
        }
    }
}

pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<Graph> {
    let text = fs::read_to_string(path.as_ref())?;
    match format {
        GraphFormat::EdgeList => parse_edge_list(&text),
        GraphFormat::MatrixMarket => parse_matrix_market(&text),
    }
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>, format: GraphFormat) -> Result<()> {
    let text = match format {
        GraphFormat::EdgeList => write_edge_list(g),
        GraphFormat::MatrixMarket => write_matrix_market(g),
    };
    fs::write(path, text)?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("'{token}' is not a node index")))
}

fn build(n: usize, edges: Vec<(usize, usize, usize)>) -> Result<Graph> {
    let mut g = Graph::empty(n);
    let mut loops = 0;
    for (u, v, line) in edges {
        if u >= n || v >= n {
            return Err(Error::Data(format!("line {line}: edge ({u}, {v}) out of range for n={n}")));
        }
        if u == v {
            loops += 1;
        } else {
            g.add_edge(u, v);
        }
    }
    if loops > 0 {
        warn!("dropped {loops} self-loop(s)");
    }
    Ok(g)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("n=") {
                let n = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad node count '{}'", value.trim())))?;
                declared = Some(n);
            }
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_err(line, format!("expected 'u v', found '{trimmed}'")));
        }
        edges.push((parse_index(tokens[0], line)?, parse_index(tokens[1], line)?, line));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0));
    build(n, edges)
}

pub fn parse_matrix_market(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let fields: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() < 4 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix coordinate ...' banner"));
    }
    let pattern = fields.get(3).map(String::as_str) == Some("pattern");

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| parse_index(t, size_line))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(parse_err(size_line, "size line must be 'rows cols entries'"));
    }
    if dims[0] != dims[1] {
        return Err(Error::Data(format!("adjacency matrix must be square, got {}x{}", dims[0], dims[1])));
    }
    let (n, nnz) = (dims[0], dims[2]);

    let mut edges = Vec::with_capacity(nnz);
    for (line, entry) in body {
        let tokens: Vec<&str> = entry.split_whitespace().collect();
        let expected = if pattern { 2 } else { 3 };
        if tokens.len() != expected {
            return Err(parse_err(line, format!("expected {expected} fields, found '{entry}'")));
        }
        let i = parse_index(tokens[0], line)?;
        let j = parse_index(tokens[1], line)?;
        if i == 0 || j == 0 {
            return Err(Error::Data(format!("line {line}: Matrix Market indices are 1-based")));
        }
        if !pattern {
            let value: f64 = tokens[2]
                .parse()
                .map_err(|_| parse_err(line, format!("bad value '{}'", tokens[2])))?;
            if value == 0.0 {
                continue;
            }
        }
        edges.push((i - 1, j - 1, line));
    }
    if edges.len() > nnz {
        return Err(parse_err(size_line, format!("size line announces {nnz} entries, found more")));
    }
    build(n, edges)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("# n={}\n", g.node_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn write_matrix_market(g: &Graph) -> String {
    let n = g.node_count();
    let mut out = String::from("%%MatrixMarket matrix coordinate pattern symmetric\n");
    writeln!(out, "{n} {n} {}", g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", v + 1, u + 1).unwrap();
    }
    out
}
