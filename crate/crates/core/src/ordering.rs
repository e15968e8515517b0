//! Random vertex ordering with local resampling.
//!
//! Every vertex draws `x_v` uniformly from `[0, 1)`; vertices are processed
//! in ascending `x_v`. The prefix `I = {x_v < ln Δ / Δ^{1/3}}` and, for every
//! vertex with many big neighbours, three counting conditions are checked.
//! Violations are repaired by redrawing every `x_u` within distance `2r` of a
//! violated vertex until all conditions hold or the round budget runs out.
//!
//! Thresholds use `max(Δ, 2)` so that `ln Δ` stays positive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::AlgorithmError;
use crate::graph::{backward_stats, DegreeStats, Graph, RNeighbourhoods};

pub const DEFAULT_MAX_ROUNDS: usize = 1000;

/// Real-valued thresholds derived from Δ and r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub delta: f64,
    pub r: u32,
    pub ln_delta: f64,
    /// τ = ln Δ / Δ^{1/3}; `x_v < τ` puts v in I.
    pub tau: f64,
    /// Δ^{1/3} ln Δ; only vertices with b(v) at least this are checked.
    pub big_neighbour_floor: f64,
}

impl Thresholds {
    pub fn new(max_degree: usize, r: u32) -> Self {
        let delta = max_degree.max(2) as f64;
        let ln_delta = delta.ln();
        Thresholds {
            delta,
            r,
            ln_delta,
            tau: ln_delta / delta.cbrt(),
            big_neighbour_floor: delta.cbrt() * ln_delta,
        }
    }
}

/// One inequality of the ordering conditions: `count` against `bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub count: usize,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexCheck {
    pub vertex: usize,
    pub in_prefix: bool,
    /// (i): d^r_I(v) <= 2 d(v) Δ^{r-4/3} ln Δ.
    pub prefix_neighbours: Condition,
    /// (ii), only for v in R: b_-(v) >= x_v b(v) - sqrt(x_v b(v)) ln Δ.
    pub backward_big: Option<Condition>,
    /// (iii), only for v in R:
    /// d^r_-(v) <= x_v D(v) Δ^{r-2} + sqrt(x_v D(v) Δ^{r-2}) ln Δ.
    pub backward_reach: Option<Condition>,
}

impl VertexCheck {
    pub fn holds(&self) -> bool {
        self.prefix_neighbours.holds
            && self.backward_big.map_or(true, |c| c.holds)
            && self.backward_reach.map_or(true, |c| c.holds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingCertificate {
    pub seed: u64,
    pub r: u32,
    pub x: Vec<f64>,
    pub ordering: Vec<usize>,
    pub in_prefix: Vec<bool>,
    pub thresholds: Thresholds,
    pub checks: Vec<VertexCheck>,
    pub resample_rounds: usize,
    pub valid: bool,
}

impl OrderingCertificate {
    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.holds()).count()
    }

    pub fn prefix_set(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&v| self.in_prefix[v]).collect()
    }

    pub fn rest_set(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&v| !self.in_prefix[v]).collect()
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent uniform draws in `[0, 1)`, one per vertex in id order.
pub fn sample_weights(graph: &Graph, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed);
    (0..graph.vertex_count())
        .map(|_| rng.gen::<f64>())
        .collect()
}

/// Vertices sorted by ascending weight, ties by id.
pub fn order_by_weight(x: &[f64]) -> Vec<usize> {
    let mut ordering: Vec<usize> = (0..x.len()).collect();
    ordering.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    ordering
}

pub fn check_conditions(graph: &Graph, x: &[f64], r: u32) -> Vec<VertexCheck> {
    let stats = DegreeStats::compute(graph);
    let hoods = RNeighbourhoods::compute(graph, r as usize);
    check_with(
        graph,
        &stats,
        &hoods,
        x,
        &Thresholds::new(graph.max_degree(), r),
    )
}

fn check_with(
    graph: &Graph,
    stats: &DegreeStats,
    hoods: &RNeighbourhoods,
    x: &[f64],
    th: &Thresholds,
) -> Vec<VertexCheck> {
    let ordering = order_by_weight(x);
    let in_prefix: Vec<bool> = x.iter().map(|&xv| xv < th.tau).collect();
    let back = backward_stats(graph, stats, hoods, &ordering, &in_prefix);
    let r = th.r as f64;
    let ln = th.ln_delta;
    let pow_i = th.delta.powf(r - 4.0 / 3.0);
    let pow_iii = th.delta.powf(r - 2.0);

    (0..graph.vertex_count())
        .filter(|&v| stats.big_neighbours[v] as f64 >= th.big_neighbour_floor)
        .map(|v| {
            let d = stats.degree[v] as f64;
            let count = back.r_neighbours_in_mask[v];
            let bound = 2.0 * d * pow_i * ln;
            let prefix_neighbours = Condition {
                count,
                bound,
                holds: count as f64 <= bound,
            };
            let (backward_big, backward_reach) = if in_prefix[v] {
                (None, None)
            } else {
                let xb = x[v] * stats.big_neighbours[v] as f64;
                let count = back.backward_big[v];
                let bound = xb - xb.sqrt() * ln;
                let ii = Condition {
                    count,
                    bound,
                    holds: count as f64 >= bound,
                };
                let xd = x[v] * stats.neighbour_degree_sum[v] as f64 * pow_iii;
                let count = back.backward_r_count(v);
                let bound = xd + xd.sqrt() * ln;
                let iii = Condition {
                    count,
                    bound,
                    holds: count as f64 <= bound,
                };
                (Some(ii), Some(iii))
            };
            VertexCheck {
                vertex: v,
                in_prefix: in_prefix[v],
                prefix_neighbours,
                backward_big,
                backward_reach,
            }
        })
        .collect()
}

/// Draws weights from `seed` and redraws, in ascending id order from the same
/// stream, every weight within distance `2r` of a violated vertex. Stops when
/// all checks hold or after `max_rounds` resampling rounds; the certificate
/// records which.
pub fn resample_until_valid(
    graph: &Graph,
    r: u32,
    seed: u64,
    max_rounds: usize,
) -> Result<OrderingCertificate, AlgorithmError> {
    if max_rounds == 0 {
        return Err(AlgorithmError::ZeroRounds);
    }
    if r == 0 {
        return Err(AlgorithmError::ZeroRadius);
    }
    let stats = DegreeStats::compute(graph);
    let hoods = RNeighbourhoods::compute(graph, r as usize);
    let th = Thresholds::new(graph.max_degree(), r);
    let mut rng = rng_for(seed);
    let mut x: Vec<f64> = (0..graph.vertex_count())
        .map(|_| rng.gen::<f64>())
        .collect();

    let mut rounds = 0;
    let mut checks = check_with(graph, &stats, &hoods, &x, &th);
    loop {
        let failed: Vec<usize> = checks
            .iter()
            .filter(|c| !c.holds())
            .map(|c| c.vertex)
            .collect();
        if failed.is_empty() || rounds == max_rounds {
            break;
        }
        for u in graph.ball_around(&failed, 2 * r as usize) {
            x[u] = rng.gen::<f64>();
        }
        rounds += 1;
        checks = check_with(graph, &stats, &hoods, &x, &th);
    }

    let valid = checks.iter().all(VertexCheck::holds);
    Ok(OrderingCertificate {
        seed,
        r,
        ordering: order_by_weight(&x),
        in_prefix: x.iter().map(|&xv| xv < th.tau).collect(),
        x,
        thresholds: th,
        checks,
        resample_rounds: rounds,
        valid,
    })
}
