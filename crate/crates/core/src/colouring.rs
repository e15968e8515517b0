//! Total colourings and the starting colouring of the recolouring stage:
//! a Misra–Gries proper edge colouring mapped into `L`, then greedy vertex
//! colours in `[1, K]` that are proper modulo `K`.

use crate::error::ColouringError;
use crate::graph::Graph;
use crate::params::{residue, Colour, IntervalList, PaletteParams};

/// A colour for every vertex and every edge (indexed by edge id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalColouring {
    pub vertex: Vec<Colour>,
    pub edge: Vec<Colour>,
}

impl TotalColouring {
    pub fn new(vertex: Vec<Colour>, edge: Vec<Colour>) -> Self {
        TotalColouring { vertex, edge }
    }

    /// Checks that the colouring has exactly one colour per element of `graph`.
    pub fn check_shape(&self, graph: &Graph) -> Result<(), ColouringError> {
        if self.vertex.len() != graph.vertex_count() {
            return Err(ColouringError::VertexCountMismatch {
                expected: graph.vertex_count(),
                got: self.vertex.len(),
            });
        }
        if self.edge.len() != graph.edge_count() {
            return Err(ColouringError::EdgeCountMismatch {
                expected: graph.edge_count(),
                got: self.edge.len(),
            });
        }
        Ok(())
    }

    /// w(v) = c(v) + Σ_{e ∋ v} c(e).
    pub fn weighted_degree(&self, graph: &Graph, v: usize) -> Colour {
        self.vertex[v]
            + graph
                .incident_edges(v)
                .iter()
                .map(|&e| self.edge[e])
                .sum::<Colour>()
    }

    pub fn weighted_degrees(&self, graph: &Graph) -> Vec<Colour> {
        (0..graph.vertex_count())
            .map(|v| self.weighted_degree(graph, v))
            .collect()
    }

    pub fn max_colour(&self) -> Colour {
        self.vertex
            .iter()
            .chain(self.edge.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// Proper edge colouring with indices in `1..=Δ+1` by the Misra–Gries
/// fan-rotation procedure. Edges are coloured in id order; fans are grown by
/// the smallest colour free at the current fan tip.
pub fn misra_gries_edge_colouring(graph: &Graph) -> Vec<usize> {
    let palette = graph.max_degree() + 1;
    let mut mg = MisraGries {
        graph,
        palette,
        colour: vec![None; graph.edge_count()],
        at: vec![vec![None; palette]; graph.vertex_count()],
    };
    for e in 0..graph.edge_count() {
        mg.colour_edge(e);
    }
    mg.colour
        .into_iter()
        .map(|c| c.expect("every edge is coloured") + 1)
        .collect()
}

struct MisraGries<'g> {
    graph: &'g Graph,
    palette: usize,
    colour: Vec<Option<usize>>,
    /// `at[v][c]`: the edge of colour `c` at `v`, if any.
    at: Vec<Vec<Option<usize>>>,
}

impl MisraGries<'_> {
    fn is_free(&self, v: usize, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    fn first_free(&self, v: usize) -> usize {
        (0..self.palette)
            .find(|&c| self.is_free(v, c))
            .expect("a vertex of degree at most Δ misses a colour of Δ+1")
    }

    fn set(&mut self, e: usize, c: Option<usize>) {
        let (a, b) = self.graph.endpoints(e);
        if let Some(old) = self.colour[e] {
            self.at[a][old] = None;
            self.at[b][old] = None;
        }
        self.colour[e] = c;
        if let Some(new) = c {
            debug_assert!(self.is_free(a, new) && self.is_free(b, new));
            self.at[a][new] = Some(e);
            self.at[b][new] = Some(e);
        }
    }

    /// Maximal fan at `u` starting with the uncoloured edge to `v`:
    /// consecutive tips `f_i`, with colour(u f_{i+1}) free at `f_i`.
    fn maximal_fan(&self, u: usize, v: usize) -> Vec<usize> {
        let mut fan = vec![v];
        let mut in_fan = vec![false; self.graph.vertex_count()];
        in_fan[v] = true;
        loop {
            let tip = *fan.last().unwrap();
            let next = (0..self.palette).find_map(|c| {
                if !self.is_free(tip, c) {
                    return None;
                }
                let e = self.at[u][c]?;
                let w = self.graph.other_end(e, u);
                (!in_fan[w]).then_some(w)
            });
            match next {
                Some(w) => {
                    in_fan[w] = true;
                    fan.push(w);
                }
                None => return fan,
            }
        }
    }

    fn edge_colour(&self, u: usize, w: usize) -> Option<usize> {
        self.colour[self.graph.edge_between(u, w).unwrap()]
    }

    fn colour_edge(&mut self, e: usize) {
        let (u, v) = self.graph.endpoints(e);
        let fan = self.maximal_fan(u, v);
        let c = self.first_free(u);
        let d = self.first_free(*fan.last().unwrap());

        // Swap c and d along the maximal path from u whose edges alternate
        // d, c, d, ... (c is free at u, so the path starts with d).
        // u has c free, so it ends its component of the {c, d} subgraph and
        // the walk cannot cycle.
        if c != d {
            let swap = |x: usize| if x == d { c } else { d };
            let mut path = Vec::new();
            let mut cur = u;
            let mut want = d;
            while let Some(pe) = self.at[cur][want] {
                path.push((pe, want));
                cur = self.graph.other_end(pe, cur);
                want = swap(want);
            }
            for &(pe, _) in &path {
                self.set(pe, None);
            }
            for &(pe, was) in &path {
                self.set(pe, Some(swap(was)));
            }
        }

        // Longest prefix of the fan that is still a fan, and its first tip
        // where d is free.
        let mut w = None;
        for i in 0..fan.len() {
            if i > 0 {
                let ci = self.edge_colour(u, fan[i]);
                match ci {
                    Some(col) if self.is_free(fan[i - 1], col) => {}
                    _ => break,
                }
            }
            if self.is_free(fan[i], d) {
                w = Some(i);
                break;
            }
        }
        let w = w.expect("Misra–Gries guarantees a rotatable sub-fan");

        // Rotate: each fan edge takes the colour of its successor, the last
        // one takes d.
        let shifted: Vec<Option<usize>> = (0..w).map(|i| self.edge_colour(u, fan[i + 1])).collect();
        let fan_edges: Vec<usize> = fan[..=w]
            .iter()
            .map(|&f| self.graph.edge_between(u, f).unwrap())
            .collect();
        for &fe in &fan_edges {
            self.set(fe, None);
        }
        for i in 0..w {
            self.set(fan_edges[i], shifted[i]);
        }
        self.set(fan_edges[w], Some(d));
    }
}

/// Edge with index `j` gets the `j`-th smallest element of `palette`.
pub fn map_to_palette(indices: &[usize], palette: &IntervalList) -> Vec<Colour> {
    indices
        .iter()
        .map(|&j| {
            palette
                .nth(j as i128 - 1)
                .expect("edge colour index exceeds the palette size")
        })
        .collect()
}

/// Vertices in ascending id take the least colour in `[1, K]` whose residue
/// avoids earlier neighbours and all incident edges.
pub fn greedy_mod_k_vertex_colouring(
    graph: &Graph,
    edge_colour: &[Colour],
    params: &PaletteParams,
) -> Result<Vec<Colour>, ColouringError> {
    let modulus = params.modulus;
    let mut vertex: Vec<Colour> = Vec::with_capacity(graph.vertex_count());
    for v in 0..graph.vertex_count() {
        let mut forbidden: Vec<Colour> = graph
            .incident(v)
            .flat_map(|(u, e)| {
                let mut out = vec![residue(edge_colour[e], modulus)];
                if u < v {
                    out.push(residue(vertex[u], modulus));
                }
                out
            })
            .collect();
        forbidden.sort_unstable();
        let colour = (1..=modulus)
            .find(|&c| forbidden.binary_search(&residue(c, modulus)).is_err())
            .ok_or(ColouringError::GreedyInfeasible { vertex: v, modulus })?;
        vertex.push(colour);
    }
    Ok(vertex)
}

/// The starting colouring: edges from `L`, vertices greedy modulo `K`.
pub fn base_colouring(
    graph: &Graph,
    params: &PaletteParams,
) -> Result<TotalColouring, ColouringError> {
    let indices = misra_gries_edge_colouring(graph);
    let edge = map_to_palette(&indices, &params.edge_palette);
    let vertex = greedy_mod_k_vertex_colouring(graph, &edge, params)?;
    Ok(TotalColouring { vertex, edge })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::compute_params;

    fn proper_edge_colouring(g: &Graph, colours: &[usize]) -> bool {
        (0..g.vertex_count()).all(|v| {
            let mut seen: Vec<usize> = g.incident_edges(v).iter().map(|&e| colours[e]).collect();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        })
    }

    fn cycle(n: usize) -> Graph {
        Graph::new(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
    }

    /// An odd cycle has no proper 2-edge-colouring: enumerate all of them.
    fn two_edge_colourable(g: &Graph) -> bool {
        let m = g.edge_count();
        (0..1u32 << m).any(|mask| {
            let colours: Vec<usize> = (0..m).map(|e| ((mask >> e) & 1) as usize + 1).collect();
            proper_edge_colouring(g, &colours)
        })
    }

    #[test]
    fn small_edge_colourings() {
        let k2 = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(misra_gries_edge_colouring(&k2), vec![1]);

        let c5 = cycle(5);
        let col = misra_gries_edge_colouring(&c5);
        assert!(proper_edge_colouring(&c5, &col));
        assert!(!two_edge_colourable(&c5));
        let mut used = col.clone();
        used.sort_unstable();
        used.dedup();
        assert_eq!(used.len(), 3);

        let star = Graph::new(6, &(1..6).map(|i| (0, i)).collect::<Vec<_>>()).unwrap();
        let mut col = misra_gries_edge_colouring(&star);
        col.sort_unstable();
        assert_eq!(col, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn complete_graphs_use_at_most_delta_plus_one() {
        for n in 2..12 {
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    edges.push((a, b));
                }
            }
            let g = Graph::new(n, &edges).unwrap();
            let col = misra_gries_edge_colouring(&g);
            assert!(proper_edge_colouring(&g, &col));
            assert!(col.iter().all(|&c| (1..=g.max_degree() + 1).contains(&c)));
        }
    }

    #[test]
    fn mapping_into_palette() {
        let p = compute_params(100, 2).unwrap();
        assert_eq!(
            map_to_palette(&[1, 2, 3], &p.edge_palette),
            vec![1372, 1373, 1374]
        );
    }

    #[test]
    fn greedy_vertex_colours() {
        let p = compute_params(2, 2).unwrap();
        let isolated = Graph::new(1, &[]).unwrap();
        assert_eq!(
            greedy_mod_k_vertex_colouring(&isolated, &[], &p).unwrap(),
            vec![1]
        );

        // K_2 with edge colour K + j: vertex colours avoid j and each other.
        let k2 = Graph::new(2, &[(0, 1)]).unwrap();
        let edge = vec![p.modulus + 3];
        assert_eq!(
            greedy_mod_k_vertex_colouring(&k2, &edge, &p).unwrap(),
            vec![1, 2]
        );
        let edge = vec![p.modulus + 1];
        assert_eq!(
            greedy_mod_k_vertex_colouring(&k2, &edge, &p).unwrap(),
            vec![2, 3]
        );
    }

    #[test]
    fn base_colouring_is_proper_mod_k() {
        let g = cycle(7);
        let p = compute_params(2, 2).unwrap();
        let col = base_colouring(&g, &p).unwrap();
        let m = p.modulus;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            assert_ne!(residue(col.vertex[a], m), residue(col.vertex[b], m));
            assert_ne!(residue(col.vertex[a], m), residue(col.edge[e], m));
            assert_ne!(residue(col.vertex[b], m), residue(col.edge[e], m));
        }
        assert!(col.vertex.iter().all(|&c| (1..=m).contains(&c)));
    }
}
