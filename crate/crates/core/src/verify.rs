//! Checks a total colouring against the definitions directly: proper on
//! vertices, edges and incidences, and distinct weighted degrees for every
//! pair of vertices at distance at most `r`.
//!
//! Deliberately self-contained: distances come from a local BFS and sums are
//! recomputed here, so nothing is shared with the construction.

use std::collections::VecDeque;
use std::fmt;

use crate::colouring::TotalColouring;
use crate::error::ColouringError;
use crate::graph::Graph;
use crate::params::Colour;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    AdjacentVertices {
        u: usize,
        v: usize,
        colour: Colour,
    },
    AdjacentEdges {
        e: usize,
        f: usize,
        colour: Colour,
    },
    Incidence {
        vertex: usize,
        edge: usize,
        colour: Colour,
    },
    SumClash {
        u: usize,
        v: usize,
        distance: usize,
        sum: Colour,
    },
    BoundExceeded {
        colour: Colour,
        bound: Colour,
    },
    NonPositive {
        colour: Colour,
    },
}

impl fmt::Display for Violation {
    /// Vertices and edges are printed 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AdjacentVertices { u, v, colour } => {
                write!(
                    f,
                    "adjacent vertices {} and {} share colour {colour}",
                    u + 1,
                    v + 1
                )
            }
            Violation::AdjacentEdges { e, f: g, colour } => {
                write!(
                    f,
                    "adjacent edges #{} and #{} share colour {colour}",
                    e + 1,
                    g + 1
                )
            }
            Violation::Incidence {
                vertex,
                edge,
                colour,
            } => write!(
                f,
                "vertex {} and incident edge #{} share colour {colour}",
                vertex + 1,
                edge + 1
            ),
            Violation::SumClash {
                u,
                v,
                distance,
                sum,
            } => write!(
                f,
                "vertices {} and {} at distance {distance} both sum to {sum}",
                u + 1,
                v + 1
            ),
            Violation::BoundExceeded { colour, bound } => {
                write!(f, "colour {colour} exceeds bound {bound}")
            }
            Violation::NonPositive { colour } => write!(f, "colour {colour} is below 1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub proper_vertices: bool,
    pub proper_edges: bool,
    pub proper_incidence: bool,
    pub r_distant_ok: bool,
    pub max_colour: Colour,
    pub bound_ok: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify(
    graph: &Graph,
    colouring: &TotalColouring,
    r: u32,
    bound: Option<Colour>,
) -> Result<VerificationReport, ColouringError> {
    colouring.check_shape(graph)?;
    let n = graph.vertex_count();
    let edges = graph.edges();
    let vc = &colouring.vertex;
    let ec = &colouring.edge;
    let mut violations = Vec::new();

    let mut proper_vertices = true;
    let mut proper_incidence = true;
    let mut around: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(a, b)) in edges.iter().enumerate() {
        around[a].push(e);
        around[b].push(e);
        if vc[a] == vc[b] {
            proper_vertices = false;
            violations.push(Violation::AdjacentVertices {
                u: a,
                v: b,
                colour: vc[a],
            });
        }
        for x in [a, b] {
            if vc[x] == ec[e] {
                proper_incidence = false;
                violations.push(Violation::Incidence {
                    vertex: x,
                    edge: e,
                    colour: ec[e],
                });
            }
        }
    }

    let mut proper_edges = true;
    for list in &around {
        for (i, &e) in list.iter().enumerate() {
            for &f in &list[i + 1..] {
                if ec[e] == ec[f] {
                    proper_edges = false;
                    violations.push(Violation::AdjacentEdges {
                        e: e.min(f),
                        f: e.max(f),
                        colour: ec[e],
                    });
                }
            }
        }
    }

    let sums: Vec<Colour> = (0..n)
        .map(|v| vc[v] + around[v].iter().map(|&e| ec[e]).sum::<Colour>())
        .collect();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut r_distant_ok = true;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let mut seen = vec![s];
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            if dist[u] as u64 >= r as u64 {
                continue;
            }
            for &w in &adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    seen.push(w);
                    queue.push_back(w);
                }
            }
        }
        for &u in &seen {
            if u > s && sums[u] == sums[s] {
                r_distant_ok = false;
                violations.push(Violation::SumClash {
                    u: s,
                    v: u,
                    distance: dist[u],
                    sum: sums[s],
                });
            }
        }
        for &u in &seen {
            dist[u] = usize::MAX;
        }
    }

    let max_colour = vc.iter().chain(ec.iter()).copied().max().unwrap_or(0);
    for &c in vc.iter().chain(ec.iter()) {
        if c < 1 {
            violations.push(Violation::NonPositive { colour: c });
        }
    }
    let bound_ok = match bound {
        Some(b) if max_colour > b => {
            violations.push(Violation::BoundExceeded {
                colour: max_colour,
                bound: b,
            });
            false
        }
        _ => true,
    };

    Ok(VerificationReport {
        proper_vertices,
        proper_edges,
        proper_incidence,
        r_distant_ok,
        max_colour,
        bound_ok,
        violations,
    })
}
