//! Simple undirected graphs, bounded-depth neighbourhoods and the degree
//! statistics consumed by the ordering and recolouring stages.
//!
//! Vertices are `0..n` internally; file formats and the CLI use `1..=n`.

use std::collections::VecDeque;

use crate::error::GraphError;

/// Simple undirected graph with sorted adjacency lists.
///
/// Edges keep their input order and are stored with the smaller endpoint
/// first. `incident[v][i]` is the id of the edge joining `v` and
/// `adjacency[v][i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    max_degree: usize,
}

impl Graph {
    /// Builds and validates a graph from 0-based edge endpoints.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut pairs: Vec<(usize, usize, usize)> = Vec::with_capacity(edges.len() * 2);
        let mut normalized = Vec::with_capacity(edges.len());
        for (index, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::EndpointOutOfRange {
                        index,
                        vertex: w,
                        n,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { index, vertex: u });
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            normalized.push((a, b));
            pairs.push((a, b, index));
            pairs.push((b, a, index));
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                let (first, second) = (w[0].2.min(w[1].2), w[0].2.max(w[1].2));
                return Err(GraphError::DuplicateEdge {
                    index: second,
                    first,
                });
            }
        }

        let mut adjacency = vec![Vec::new(); n];
        let mut incident = vec![Vec::new(); n];
        for &(a, b, index) in &pairs {
            adjacency[a].push(b);
            incident[a].push(index);
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph {
            n,
            edges: normalized,
            adjacency,
            incident,
            max_degree,
        })
    }

    /// Builds a graph from 1-based endpoints, as used in the file format.
    /// Vertices in errors are reported 1-based as well.
    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut shifted = Vec::with_capacity(edges.len());
        for (index, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(GraphError::EndpointOutOfRange {
                        index,
                        vertex: w,
                        n,
                    });
                }
            }
            shifted.push((u - 1, v - 1));
        }
        Graph::new(n, &shifted).map_err(|e| match e {
            GraphError::SelfLoop { index, vertex } => GraphError::SelfLoop {
                index,
                vertex: vertex + 1,
            },
            other => other,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    /// Neighbours of `v` in ascending order.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// `(neighbour, edge id)` pairs around `v`, ascending by neighbour.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency[v]
            .iter()
            .copied()
            .zip(self.incident[v].iter().copied())
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let pos = self.adjacency[u].binary_search(&v).ok()?;
        Some(self.incident[u][pos])
    }

    pub fn other_end(&self, edge: usize, v: usize) -> usize {
        let (a, b) = self.edges[edge];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Distances from `source` to every vertex reachable within `depth`
    /// steps; unreachable or farther vertices are `None`.
    pub fn bfs_distances(&self, source: usize, depth: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            if du == depth {
                continue;
            }
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// N^r(v): all `u != v` with `1 <= dist(u, v) <= r`, ascending.
    pub fn r_neighbourhood(&self, v: usize, r: usize) -> Vec<usize> {
        self.bfs_distances(v, r)
            .iter()
            .enumerate()
            .filter(|&(u, d)| u != v && d.is_some())
            .map(|(u, _)| u)
            .collect()
    }

    /// Every vertex within distance `radius` of some source, sources included.
    pub fn ball_around(&self, sources: &[usize], radius: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            if dist[u] == radius {
                continue;
            }
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        (0..self.n).filter(|&u| dist[u] != usize::MAX).collect()
    }
}

/// Precomputed N^r(v) for every vertex at a fixed radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RNeighbourhoods {
    radius: usize,
    sets: Vec<Vec<usize>>,
}

impl RNeighbourhoods {
    pub fn compute(graph: &Graph, radius: usize) -> Self {
        let sets = (0..graph.vertex_count())
            .map(|v| graph.r_neighbourhood(v, radius))
            .collect();
        RNeighbourhoods { radius, sets }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn of(&self, v: usize) -> &[usize] {
        &self.sets[v]
    }
}

/// Small (d(v) <= Δ^{2/3}) versus big vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexClass {
    Small,
    Big,
}

impl VertexClass {
    pub fn label(self) -> &'static str {
        match self {
            VertexClass::Small => "S",
            VertexClass::Big => "B",
        }
    }
}

/// `d <= Δ^{2/3}` decided exactly as `d^3 <= Δ^2`.
pub fn is_small_degree(degree: usize, max_degree: usize) -> bool {
    let d = degree as u128;
    let m = max_degree as u128;
    d * d * d <= m * m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub degree: Vec<usize>,
    pub class: Vec<VertexClass>,
    /// s(v): neighbours in S.
    pub small_neighbours: Vec<usize>,
    /// b(v): neighbours in B.
    pub big_neighbours: Vec<usize>,
    /// D(v): sum of neighbour degrees.
    pub neighbour_degree_sum: Vec<usize>,
}

impl DegreeStats {
    pub fn compute(graph: &Graph) -> Self {
        let n = graph.vertex_count();
        let delta = graph.max_degree();
        let degree: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
        let class: Vec<VertexClass> = degree
            .iter()
            .map(|&d| {
                if is_small_degree(d, delta) {
                    VertexClass::Small
                } else {
                    VertexClass::Big
                }
            })
            .collect();
        let mut small_neighbours = vec![0; n];
        let mut big_neighbours = vec![0; n];
        let mut neighbour_degree_sum = vec![0; n];
        for v in 0..n {
            for &u in graph.neighbours(v) {
                match class[u] {
                    VertexClass::Small => small_neighbours[v] += 1,
                    VertexClass::Big => big_neighbours[v] += 1,
                }
                neighbour_degree_sum[v] += degree[u];
            }
        }
        DegreeStats {
            degree,
            class,
            small_neighbours,
            big_neighbours,
            neighbour_degree_sum,
        }
    }

    pub fn is_big(&self, v: usize) -> bool {
        self.class[v] == VertexClass::Big
    }
}

/// Quantities relative to a fixed linear ordering of the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardStats {
    /// N_-(v), ascending.
    pub backward_neighbours: Vec<Vec<usize>>,
    /// N^r_-(v), ascending.
    pub backward_r_neighbours: Vec<Vec<usize>>,
    /// b_-(v): backward neighbours lying in B.
    pub backward_big: Vec<usize>,
    /// d^r_I(v): r-neighbours inside the supplied mask.
    pub r_neighbours_in_mask: Vec<usize>,
}

impl BackwardStats {
    pub fn backward_r_count(&self, v: usize) -> usize {
        self.backward_r_neighbours[v].len()
    }
}

/// Position of every vertex in `ordering`. Panics if `ordering` is not a
/// permutation of `0..n`.
pub fn positions(ordering: &[usize]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; ordering.len()];
    for (i, &v) in ordering.iter().enumerate() {
        assert!(
            v < ordering.len() && pos[v] == usize::MAX,
            "ordering is not a permutation"
        );
        pos[v] = i;
    }
    pos
}

pub fn backward_stats(
    graph: &Graph,
    stats: &DegreeStats,
    neighbourhoods: &RNeighbourhoods,
    ordering: &[usize],
    mask: &[bool],
) -> BackwardStats {
    let n = graph.vertex_count();
    let pos = positions(ordering);
    let mut backward_neighbours = Vec::with_capacity(n);
    let mut backward_r_neighbours = Vec::with_capacity(n);
    let mut backward_big = Vec::with_capacity(n);
    let mut r_neighbours_in_mask = Vec::with_capacity(n);
    for v in 0..n {
        let back: Vec<usize> = graph
            .neighbours(v)
            .iter()
            .copied()
            .filter(|&u| pos[u] < pos[v])
            .collect();
        backward_big.push(back.iter().filter(|&&u| stats.is_big(u)).count());
        backward_neighbours.push(back);
        let ball = neighbourhoods.of(v);
        backward_r_neighbours.push(ball.iter().copied().filter(|&u| pos[u] < pos[v]).collect());
        r_neighbours_in_mask.push(ball.iter().filter(|&&u| mask[u]).count());
    }
    BackwardStats {
        backward_neighbours,
        backward_r_neighbours,
        backward_big,
        r_neighbours_in_mask,
    }
}
