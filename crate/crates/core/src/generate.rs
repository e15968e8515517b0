//! Seeded graph generators.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GenerateError;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Path,
    Cycle,
    Complete,
    Star,
    Gnp,
    RegularIsh,
}

impl GraphKind {
    pub const ALL: [GraphKind; 6] = [
        GraphKind::Path,
        GraphKind::Cycle,
        GraphKind::Complete,
        GraphKind::Star,
        GraphKind::Gnp,
        GraphKind::RegularIsh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Path => "path",
            GraphKind::Cycle => "cycle",
            GraphKind::Complete => "complete",
            GraphKind::Star => "star",
            GraphKind::Gnp => "gnp",
            GraphKind::RegularIsh => "regular-ish",
        }
    }

    /// Whether the kind takes a numeric parameter (edge probability or degree).
    pub fn needs_param(self) -> bool {
        matches!(self, GraphKind::Gnp | GraphKind::RegularIsh)
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphKind {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GraphKind::ALL
            .into_iter()
            .find(|k| k.name() == s || (s == "regular" && *k == GraphKind::RegularIsh))
            .ok_or_else(|| GenerateError::InvalidParameters(format!("unknown graph kind `{s}`")))
    }
}

/// Generates a graph on `n` vertices. `param` is the edge probability for
/// `gnp` and the target degree for `regular-ish`; other kinds ignore it.
/// Stars have `n` vertices in total.
pub fn generate(
    kind: GraphKind,
    n: usize,
    param: Option<f64>,
    seed: u64,
) -> Result<Graph, GenerateError> {
    let invalid = |msg: String| Err(GenerateError::InvalidParameters(msg));
    let mut edges = Vec::new();
    match kind {
        GraphKind::Path => edges.extend((1..n).map(|i| (i - 1, i))),
        GraphKind::Cycle => {
            if n < 3 {
                return invalid(format!("a cycle needs at least 3 vertices, got {n}"));
            }
            edges.extend((1..n).map(|i| (i - 1, i)));
            edges.push((0, n - 1));
        }
        GraphKind::Complete => {
            for u in 0..n {
                edges.extend((u + 1..n).map(|v| (u, v)));
            }
        }
        GraphKind::Star => {
            if n == 0 {
                return invalid("a star needs at least one vertex".into());
            }
            edges.extend((1..n).map(|i| (0, i)));
        }
        GraphKind::Gnp => {
            let p = match param {
                Some(p) if (0.0..=1.0).contains(&p) => p,
                other => {
                    return invalid(format!("gnp needs a probability in [0, 1], got {other:?}"))
                }
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
        }
        GraphKind::RegularIsh => {
            let d = match param {
                Some(d) if d >= 0.0 && d.fract() == 0.0 && (d as usize) < n.max(1) => d as usize,
                other => {
                    return invalid(format!(
                        "regular-ish needs an integer degree below n={n}, got {other:?}"
                    ))
                }
            };
            // Pair shuffled stubs; loops and repeated pairs are dropped.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
            stubs.shuffle(&mut rng);
            let mut seen = std::collections::HashSet::new();
            for pair in stubs.chunks_exact(2) {
                let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if a != b && seen.insert((a, b)) {
                    edges.push((a, b));
                }
            }
        }
    }
    Ok(Graph::new(n, &edges)?)
}
