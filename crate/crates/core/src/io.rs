//! Plain-text formats.
//!
//! Graph files:
//!
//! ```text
//! # comment
//! p 3 2
//! e 1 2
//! e 2 3
//! ```
//!
//! Vertices are 1-based. `c` lines are comments too, and a DIMACS style
//! `p edge n m` header is accepted.
//!
//! Colouring files start with `meta key=value ...` lines, then `v id colour`,
//! `E u v colour` and optionally `w id sum`, all 1-based.

use std::fmt::Write as _;

use crate::colouring::TotalColouring;
use crate::distinguisher::{RunOutput, RunTrace};
use crate::error::ParseError;
use crate::graph::Graph;
use crate::ordering::{Condition, OrderingCertificate};
use crate::params::Colour;

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn number<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError::Malformed {
        line,
        message: format!("expected {what}, found `{token}`"),
    })
}

fn malformed(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Malformed {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        match tokens.as_slice() {
            [] | ["c", ..] => {}
            ["p", rest @ ..] => {
                if header.is_some() {
                    return Err(malformed(line, "second problem line"));
                }
                let rest = match rest {
                    ["edge", tail @ ..] => tail,
                    other => other,
                };
                let [n, m] = rest else {
                    return Err(malformed(line, "expected `p <n> <m>`"));
                };
                header = Some((
                    number(n, line, "vertex count")?,
                    number(m, line, "edge count")?,
                    line,
                ));
            }
            ["e", u, v] => {
                if header.is_none() {
                    return Err(malformed(line, "edge before problem line"));
                }
                edges.push((number(u, line, "vertex")?, number(v, line, "vertex")?));
                edge_lines.push(line);
            }
            ["e", ..] => return Err(malformed(line, "expected `e <u> <v>`")),
            [other, ..] => return Err(malformed(line, format!("unknown line type `{other}`"))),
        }
    }
    let (n, m, _) = header.ok_or(ParseError::MissingHeader)?;
    let graph = Graph::from_one_based(n, &edges).map_err(|error| ParseError::Graph {
        line: edge_lines[error.index()],
        error,
    })?;
    if edges.len() != m {
        return Err(ParseError::EdgeCountMismatch {
            declared: m,
            found: edges.len(),
        });
    }
    Ok(graph)
}

pub fn write_graph(graph: &Graph) -> String {
    let mut out = format!("p {} {}\n", graph.vertex_count(), graph.edge_count());
    for &(a, b) in graph.edges() {
        let _ = writeln!(out, "e {} {}", a + 1, b + 1);
    }
    out
}

/// Parsed colouring file, kept in file order so that writing it back
/// reproduces the input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ColouringDocument {
    pub meta: Vec<(String, String)>,
    pub vertices: Vec<(usize, Colour)>,
    pub edges: Vec<(usize, usize, Colour)>,
    pub sums: Vec<(usize, Colour)>,
}

impl ColouringDocument {
    /// Document for `colouring` with weighted degrees included.
    pub fn from_colouring(
        graph: &Graph,
        colouring: &TotalColouring,
        meta: Vec<(String, String)>,
    ) -> Self {
        let sums = colouring.weighted_degrees(graph);
        ColouringDocument {
            meta,
            vertices: colouring
                .vertex
                .iter()
                .enumerate()
                .map(|(v, &c)| (v + 1, c))
                .collect(),
            edges: graph
                .edges()
                .iter()
                .zip(&colouring.edge)
                .map(|(&(a, b), &c)| (a + 1, b + 1, c))
                .collect(),
            sums: sums
                .into_iter()
                .enumerate()
                .map(|(v, w)| (v + 1, w))
                .collect(),
        }
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = ColouringDocument::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
            match tokens.as_slice() {
                [] => {}
                ["meta", pairs @ ..] => {
                    for pair in pairs {
                        let (k, v) = pair.split_once('=').ok_or_else(|| {
                            malformed(line, format!("expected key=value, found `{pair}`"))
                        })?;
                        doc.meta.push((k.to_string(), v.to_string()));
                    }
                }
                ["v", id, c] => doc
                    .vertices
                    .push((number(id, line, "vertex")?, number(c, line, "colour")?)),
                ["E", u, v, c] => doc.edges.push((
                    number(u, line, "vertex")?,
                    number(v, line, "vertex")?,
                    number(c, line, "colour")?,
                )),
                ["w", id, s] => doc
                    .sums
                    .push((number(id, line, "vertex")?, number(s, line, "sum")?)),
                [other, ..] => return Err(malformed(line, format!("unknown line type `{other}`"))),
            }
        }
        Ok(doc)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.meta.is_empty() {
            out.push_str("meta");
            for (k, v) in &self.meta {
                let _ = write!(out, " {k}={v}");
            }
            out.push('\n');
        }
        for (v, c) in &self.vertices {
            let _ = writeln!(out, "v {v} {c}");
        }
        for (a, b, c) in &self.edges {
            let _ = writeln!(out, "E {a} {b} {c}");
        }
        for (v, w) in &self.sums {
            let _ = writeln!(out, "w {v} {w}");
        }
        out
    }

    /// Matches the listed colours against `graph`. Every vertex and edge must
    /// be listed exactly once; `w` lines are ignored.
    pub fn to_colouring(&self, graph: &Graph) -> Result<TotalColouring, ParseError> {
        let n = graph.vertex_count();
        let mut vertex: Vec<Option<Colour>> = vec![None; n];
        for &(v, c) in &self.vertices {
            if v == 0 || v > n {
                return Err(ParseError::Incomplete(format!(
                    "vertex {v} is not in the graph"
                )));
            }
            if vertex[v - 1].replace(c).is_some() {
                return Err(ParseError::Incomplete(format!("vertex {v} listed twice")));
            }
        }
        let mut edge: Vec<Option<Colour>> = vec![None; graph.edge_count()];
        for &(a, b, c) in &self.edges {
            let e = (a >= 1 && b >= 1 && a <= n && b <= n)
                .then(|| graph.edge_between(a - 1, b - 1))
                .flatten()
                .ok_or_else(|| ParseError::Incomplete(format!("{a}-{b} is not an edge")))?;
            if edge[e].replace(c).is_some() {
                return Err(ParseError::Incomplete(format!("edge {a}-{b} listed twice")));
            }
        }
        if let Some(v) = vertex.iter().position(Option::is_none) {
            return Err(ParseError::Incomplete(format!(
                "vertex {} has no colour",
                v + 1
            )));
        }
        if let Some(e) = edge.iter().position(Option::is_none) {
            let (a, b) = graph.endpoints(e);
            return Err(ParseError::Incomplete(format!(
                "edge {}-{} has no colour",
                a + 1,
                b + 1
            )));
        }
        Ok(TotalColouring::new(
            vertex.into_iter().flatten().collect(),
            edge.into_iter().flatten().collect(),
        ))
    }
}

/// Header entries for a colouring produced by a run.
pub fn run_metadata(graph: &Graph, r: u32, seed: u64, out: &RunOutput) -> Vec<(String, String)> {
    [
        ("n", graph.vertex_count().to_string()),
        ("m", graph.edge_count().to_string()),
        ("delta", graph.max_degree().to_string()),
        ("r", r.to_string()),
        ("seed", seed.to_string()),
        ("k", out.params.k.to_string()),
        ("K", out.params.modulus.to_string()),
        ("palette_max", out.params.palette_max.to_string()),
        ("fallbacks", out.fallback_count().to_string()),
        ("ordering_valid", out.certificate.valid.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn condition(name: &str, c: &Condition) -> String {
    format!(
        "{name}={}/{} {}",
        c.count,
        c.bound,
        if c.holds { "ok" } else { "FAIL" }
    )
}

pub fn render_certificate(cert: &OrderingCertificate) -> String {
    let th = &cert.thresholds;
    let mut out = format!(
        "meta seed={} r={} rounds={} valid={} tau={} floor={} checked={} failed={}\n",
        cert.seed,
        cert.r,
        cert.resample_rounds,
        cert.valid,
        th.tau,
        th.big_neighbour_floor,
        cert.checks.len(),
        cert.failed_checks()
    );
    for (pos, &v) in cert.ordering.iter().enumerate() {
        let _ = writeln!(
            out,
            "o {} {} {} {}",
            pos + 1,
            v + 1,
            cert.x[v],
            if cert.in_prefix[v] { "I" } else { "R" }
        );
    }
    for check in &cert.checks {
        let _ = write!(
            out,
            "check {} {}",
            check.vertex + 1,
            condition("i", &check.prefix_neighbours)
        );
        if let Some(c) = &check.backward_big {
            let _ = write!(out, " {}", condition("ii", c));
        }
        if let Some(c) = &check.backward_reach {
            let _ = write!(out, " {}", condition("iii", c));
        }
        out.push('\n');
    }
    out
}

fn pairs(list: &[(usize, Colour)]) -> String {
    if list.is_empty() {
        return "-".to_string();
    }
    list.iter()
        .map(|(i, d)| format!("{}:{d:+}", i + 1))
        .collect::<Vec<_>>()
        .join(",")
}

/// One line per processing step. Vertex and edge ids are 1-based.
pub fn render_trace(trace: &RunTrace) -> String {
    let mut out = format!(
        "meta delta={} r={} steps={} fallbacks={}\n",
        trace.params_delta,
        trace.params_r,
        trace.steps.len(),
        trace.fallback_count()
    );
    for (pos, s) in trace.steps.iter().enumerate() {
        let fallback = match s.fallback {
            None => "-".to_string(),
            Some(f) => format!(
                "relaxed={},multiple={}",
                f.relaxed_bases, f.palette_multiple
            ),
        };
        let _ = writeln!(
            out,
            "step {} v={} class={} set={} base={} anchor={} target={} dv={:+} edges={} comp={} admissible={} lattice={} sums={} back_r={} fallback={}",
            pos + 1,
            s.vertex + 1,
            s.class.label(),
            if s.in_prefix { "I" } else { "R" },
            s.base_colour,
            s.anchor,
            s.target,
            s.vertex_delta,
            pairs(&s.edge_deltas),
            pairs(&s.compensations),
            s.admissible_bases,
            s.lattice_size,
            s.available_sums.map_or("-".to_string(), |n| n.to_string()),
            s.backward_r_neighbours,
            fallback
        );
    }
    out
}
