//! Exhaustive search for the least palette admitting a proper total colouring
//! with distinct weighted degrees on every pair at distance at most `r`.
//!
//! Only meant for tiny graphs (a dozen elements or so).

use crate::colouring::TotalColouring;
use crate::graph::Graph;
use crate::params::Colour;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOutcome {
    Solved { chi: u32, witness: TotalColouring },
    ExceedsLimit { limit: u32 },
}

/// Elements are numbered vertices first (`0..n`), then edges (`n..n+m`).
struct Search<'g> {
    graph: &'g Graph,
    p: u32,
    /// Elements that must get a different colour.
    conflicts: Vec<Vec<usize>>,
    /// Vertices within distance r, excluding the vertex itself.
    r_hood: Vec<Vec<usize>>,
    colour: Vec<u32>,
    /// Elements (vertex + incident edges) of each vertex still uncoloured.
    pending: Vec<usize>,
    sum: Vec<Colour>,
}

impl<'g> Search<'g> {
    fn new(graph: &'g Graph, r: u32, p: u32) -> Self {
        let n = graph.vertex_count();
        let m = graph.edge_count();
        let mut conflicts = vec![Vec::new(); n + m];
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            conflicts[a].push(b);
            conflicts[b].push(a);
            for x in [a, b] {
                conflicts[x].push(n + e);
                conflicts[n + e].push(x);
                for (_, f) in graph.incident(x) {
                    if f != e && !conflicts[n + e].contains(&(n + f)) {
                        conflicts[n + e].push(n + f);
                    }
                }
            }
        }
        let r_hood = (0..n)
            .map(|v| {
                graph
                    .r_neighbourhood(v, r as usize)
                    .into_iter()
                    .filter(|&u| u != v)
                    .collect()
            })
            .collect();
        Search {
            graph,
            p,
            conflicts,
            r_hood,
            colour: vec![0; n + m],
            pending: (0..n).map(|v| graph.degree(v) + 1).collect(),
            sum: vec![0; n],
        }
    }

    fn owners(&self, element: usize) -> Vec<usize> {
        let n = self.graph.vertex_count();
        if element < n {
            vec![element]
        } else {
            let (a, b) = self.graph.endpoints(element - n);
            vec![a, b]
        }
    }

    fn allowed(&self, element: usize) -> Vec<u32> {
        let mut free = vec![true; self.p as usize + 1];
        for &o in &self.conflicts[element] {
            let c = self.colour[o];
            if c != 0 {
                free[c as usize] = false;
            }
        }
        (1..=self.p).filter(|&c| free[c as usize]).collect()
    }

    fn assign(&mut self, element: usize, c: u32) -> bool {
        self.colour[element] = c;
        let mut ok = true;
        for v in self.owners(element) {
            self.sum[v] += c as Colour;
            self.pending[v] -= 1;
            if self.pending[v] == 0 {
                ok &= self.r_hood[v]
                    .iter()
                    .all(|&u| self.pending[u] != 0 || self.sum[u] != self.sum[v]);
            }
        }
        ok
    }

    fn unassign(&mut self, element: usize) {
        let c = self.colour[element];
        for v in self.owners(element) {
            self.sum[v] -= c as Colour;
            self.pending[v] += 1;
        }
        self.colour[element] = 0;
    }

    fn solve(&mut self) -> bool {
        // Smallest remaining domain first, lowest element index on ties.
        let mut best: Option<(usize, Vec<u32>)> = None;
        for el in 0..self.colour.len() {
            if self.colour[el] != 0 {
                continue;
            }
            let dom = self.allowed(el);
            if dom.is_empty() {
                return false;
            }
            if best.as_ref().map_or(true, |(_, d)| dom.len() < d.len()) {
                best = Some((el, dom));
            }
        }
        let Some((el, dom)) = best else {
            return true;
        };
        for c in dom {
            if self.assign(el, c) && self.solve() {
                return true;
            }
            self.unassign(el);
        }
        false
    }

    fn witness(&self) -> TotalColouring {
        let n = self.graph.vertex_count();
        let c: Vec<Colour> = self.colour.iter().map(|&c| c as Colour).collect();
        TotalColouring::new(c[..n].to_vec(), c[n..].to_vec())
    }
}

/// Decides whether colours `1..=p` suffice; returns a witness when they do.
pub fn is_feasible(graph: &Graph, r: u32, p: u32) -> Option<TotalColouring> {
    if p == 0 {
        return (graph.vertex_count() == 0).then(|| TotalColouring::new(vec![], vec![]));
    }
    let mut search = Search::new(graph, r, p);
    search.solve().then(|| search.witness())
}

/// Tries p = 1, 2, ... up to `limit`.
pub fn exact_chi(graph: &Graph, r: u32, limit: u32) -> ExactOutcome {
    for p in 1..=limit {
        if let Some(witness) = is_feasible(graph, r, p) {
            return ExactOutcome::Solved { chi: p, witness };
        }
    }
    ExactOutcome::ExceedsLimit { limit }
}
