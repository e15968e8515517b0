//! Sequential recolouring that fixes a distinct weighted degree for every
//! vertex against all earlier vertices within distance `r`.
//!
//! Vertices are processed in the certified order. When `v` is processed it
//! receives a base colour `c'(v)` in `[1, K]` and a target sum `w_f(v)`,
//! reached by adjusting its incident edges:
//!
//! * forward edge `uv`, `v` small and `u` big: add `0` or `K`;
//! * any other forward edge: add `0` or `k`;
//! * backward edge to a big `u`: add `0` or `±K`, with `u` moving by `∓K`;
//! * backward edge to a small `u`: add `0` or `±k`, with `u` moving by `∓k`.
//!
//! A processed vertex only ever takes colours in `{a, a+k, a+K, a+K+k}` with
//! `a = c'(v)`, which fixes the sign of every backward move. Every edge stays
//! inside the residue window `{ℓ-k, ℓ, ℓ+k, ℓ+2k}` of its base colour `ℓ`,
//! so edges remain proper modulo `K`; base colours are picked so that vertex
//! residues `{c', c'+k}` never meet a neighbour's or an incident edge's
//! present or future residues.

use std::collections::HashSet;
use std::fmt;

use crate::colouring::{base_colouring, TotalColouring};
use crate::error::AlgorithmError;
use crate::graph::{DegreeStats, Graph, RNeighbourhoods, VertexClass};
use crate::ordering::{resample_until_valid, OrderingCertificate, DEFAULT_MAX_ROUNDS};
use crate::params::{compute_params, residue, Colour, PaletteParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinguisherConfig {
    pub r: u32,
    pub seed: u64,
    pub max_rounds: usize,
    /// Exclude base-colour clashes with every earlier r-neighbour instead of
    /// only earlier adjacent vertices.
    pub exclude_r_neighbour_bases: bool,
    /// Audit every state invariant after each step and fail on a breach.
    pub check_every_step: bool,
}

impl DistinguisherConfig {
    pub fn new(r: u32, seed: u64) -> Self {
        DistinguisherConfig {
            r,
            seed,
            max_rounds: DEFAULT_MAX_ROUNDS,
            exclude_r_neighbour_bases: false,
            check_every_step: false,
        }
    }
}

/// Vertex or edge of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Element {
    Vertex(usize),
    Edge(usize),
}

/// A breached invariant of the recolouring state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateViolation {
    VertexOutsideWindow {
        vertex: usize,
        colour: Colour,
    },
    SumDrift {
        vertex: usize,
        target: Colour,
        actual: Colour,
    },
    EdgeOutsideWindow {
        edge: usize,
        colour: Colour,
    },
    EdgeOutOfRange {
        edge: usize,
        colour: Colour,
    },
    AlterationBudget {
        edge: usize,
        alterations: u8,
    },
    ResidueClash {
        first: Element,
        second: Element,
    },
}

impl fmt::Display for StateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateViolation::VertexOutsideWindow { vertex, colour } => {
                write!(f, "vertex {vertex} has colour {colour} outside its window")
            }
            StateViolation::SumDrift {
                vertex,
                target,
                actual,
            } => write!(f, "vertex {vertex} sums to {actual}, fixed at {target}"),
            StateViolation::EdgeOutsideWindow { edge, colour } => {
                write!(
                    f,
                    "edge {edge} has colour {colour} outside its residue window"
                )
            }
            StateViolation::EdgeOutOfRange { edge, colour } => {
                write!(f, "edge {edge} has colour {colour} outside the palette")
            }
            StateViolation::AlterationBudget { edge, alterations } => {
                write!(f, "edge {edge} altered {alterations} times")
            }
            StateViolation::ResidueClash { first, second } => {
                write!(f, "{first:?} and {second:?} agree modulo K")
            }
        }
    }
}

/// Departure from the constrained choice at one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fallback {
    /// Base colours were only kept apart from adjacent earlier vertices.
    pub relaxed_bases: bool,
    /// Vertex colour anchored at `c' + multiple·K` instead of `c'`.
    pub palette_multiple: i128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub vertex: usize,
    pub class: VertexClass,
    pub in_prefix: bool,
    pub base_colour: Colour,
    pub anchor: Colour,
    pub target: Colour,
    pub vertex_delta: Colour,
    /// `(edge, delta)` for every altered incident edge.
    pub edge_deltas: Vec<(usize, Colour)>,
    /// `(backward neighbour, delta)` compensating a backward edge delta.
    pub compensations: Vec<(usize, Colour)>,
    pub admissible_bases: usize,
    pub lattice_size: usize,
    /// Distinct sums reachable without fallback, when small enough to count.
    pub available_sums: Option<usize>,
    pub backward_r_neighbours: usize,
    pub fallback: Option<Fallback>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    /// Δ and r used for the palette arithmetic (at least 2 each).
    pub params_delta: u64,
    pub params_r: u32,
    pub steps: Vec<StepRecord>,
}

impl RunTrace {
    pub fn fallback_count(&self) -> usize {
        self.steps.iter().filter(|s| s.fallback.is_some()).count()
    }

    /// Applies every recorded delta to `base`.
    pub fn replay(&self, base: &TotalColouring) -> TotalColouring {
        let mut col = base.clone();
        for step in &self.steps {
            col.vertex[step.vertex] += step.vertex_delta;
            for &(e, d) in &step.edge_deltas {
                col.edge[e] += d;
            }
            for &(u, d) in &step.compensations {
                col.vertex[u] += d;
            }
        }
        col
    }
}

/// Colours in `[1, K]` whose residue avoids a short excluded list. Only the
/// exclusions are stored; `K` can be far larger than the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseColours {
    modulus: Colour,
    /// Sorted residues modulo `K`.
    excluded: Vec<Colour>,
}

impl BaseColours {
    pub fn len(&self) -> usize {
        (self.modulus - self.excluded.len() as Colour) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, c: Colour) -> bool {
        (1..=self.modulus).contains(&c)
            && self
                .excluded
                .binary_search(&residue(c, self.modulus))
                .is_err()
    }

    /// Ascending.
    pub fn iter(&self) -> impl Iterator<Item = Colour> + '_ {
        (1..=self.modulus).filter(|&c| self.contains(c))
    }
}

/// Reachable sums `origin + i·K + j·k` for `i` in `[-big_down, big_up]` and
/// `j` in `[-small_down, small_up]`. Each listed edge realises one unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumLattice {
    pub origin: Colour,
    pub modulus: Colour,
    pub k: Colour,
    pub big_up: Vec<usize>,
    pub big_down: Vec<usize>,
    pub small_up: Vec<usize>,
    pub small_down: Vec<usize>,
}

impl SumLattice {
    pub fn size(&self) -> usize {
        (self.big_up.len() + self.big_down.len() + 1)
            * (self.small_up.len() + self.small_down.len() + 1)
    }

    pub fn value(&self, i: i64, j: i64) -> Colour {
        self.origin + i as Colour * self.modulus + j as Colour * self.k
    }

    pub fn contains(&self, w: Colour) -> bool {
        self.offsets().iter().any(|&(i, j)| self.value(i, j) == w)
    }

    /// Offsets by ascending `|i| + |j|`, then by the sum they give, then `(i, j)`.
    pub fn offsets(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.size());
        for i in -(self.big_down.len() as i64)..=self.big_up.len() as i64 {
            for j in -(self.small_down.len() as i64)..=self.small_up.len() as i64 {
                out.push((i, j));
            }
        }
        out.sort_by_key(|&(i, j)| (i.abs() + j.abs(), self.value(i, j), i, j));
        out
    }

    /// Edge deltas realising the offset `(i, j)`, lowest neighbours first.
    fn realise(&self, i: i64, j: i64) -> Vec<(usize, Colour)> {
        let pick = |edges: &[usize], count: i64, delta: Colour| {
            edges
                .iter()
                .take(count.unsigned_abs() as usize)
                .map(move |&e| (e, delta))
                .collect::<Vec<_>>()
        };
        let mut out = if i >= 0 {
            pick(&self.big_up, i, self.modulus)
        } else {
            pick(&self.big_down, i, -self.modulus)
        };
        out.extend(if j >= 0 {
            pick(&self.small_up, j, self.k)
        } else {
            pick(&self.small_down, j, -self.k)
        });
        out
    }
}

/// Mutable state of the recolouring.
#[derive(Debug, Clone)]
pub struct AlgoState<'g> {
    graph: &'g Graph,
    stats: DegreeStats,
    params: PaletteParams,
    hoods: RNeighbourhoods,
    position: Vec<usize>,
    in_prefix: Vec<bool>,
    current: TotalColouring,
    base_colour: Vec<Option<Colour>>,
    anchor: Vec<Option<Colour>>,
    target: Vec<Option<Colour>>,
    edge_base: Vec<Colour>,
    edge_alterations: Vec<u8>,
    exclude_r_neighbour_bases: bool,
    processed_count: usize,
}

impl<'g> AlgoState<'g> {
    /// `base` must be the starting colouring built from `params`; `ordering`
    /// and `in_prefix` come from an ordering certificate.
    pub fn new(
        graph: &'g Graph,
        params: PaletteParams,
        base: TotalColouring,
        ordering: &[usize],
        in_prefix: Vec<bool>,
        r: u32,
        exclude_r_neighbour_bases: bool,
    ) -> Self {
        let n = graph.vertex_count();
        let mut position = vec![0; n];
        for (i, &v) in ordering.iter().enumerate() {
            position[v] = i;
        }
        AlgoState {
            graph,
            stats: DegreeStats::compute(graph),
            hoods: RNeighbourhoods::compute(graph, r as usize),
            position,
            in_prefix,
            edge_base: base.edge.clone(),
            edge_alterations: vec![0; graph.edge_count()],
            current: base,
            base_colour: vec![None; n],
            anchor: vec![None; n],
            target: vec![None; n],
            params,
            exclude_r_neighbour_bases,
            processed_count: 0,
        }
    }

    pub fn params(&self) -> &PaletteParams {
        &self.params
    }

    pub fn colouring(&self) -> &TotalColouring {
        &self.current
    }

    pub fn is_processed(&self, v: usize) -> bool {
        self.target[v].is_some()
    }

    pub fn target(&self, v: usize) -> Option<Colour> {
        self.target[v]
    }

    pub fn base_colour(&self, v: usize) -> Option<Colour> {
        self.base_colour[v]
    }

    pub fn edge_base(&self, e: usize) -> Colour {
        self.edge_base[e]
    }

    pub fn edge_alterations(&self, e: usize) -> u8 {
        self.edge_alterations[e]
    }

    pub fn into_colouring(self) -> TotalColouring {
        self.current
    }

    fn step_of(&self, v: usize) -> Colour {
        if self.stats.is_big(v) {
            self.params.modulus
        } else {
            self.params.k
        }
    }

    /// Delta a backward edge `v u` may take at `v`'s step: the processed
    /// neighbour `u` moves by the opposite amount and must stay in its
    /// window, which leaves exactly one non-zero option.
    pub fn backward_edge_delta(&self, u: usize) -> Colour {
        let a = self.anchor[u].expect("backward neighbour is processed");
        let c = self.current.vertex[u];
        let (k, big_k) = (self.params.k, self.params.modulus);
        let vertex_can_rise = if self.stats.is_big(u) {
            c == a || c == a + k
        } else {
            c == a || c == a + big_k
        };
        let step = self.step_of(u);
        if vertex_can_rise {
            -step
        } else {
            step
        }
    }

    /// Residues modulo `K` that the edge `e` at `v` can carry from `v`'s step
    /// onwards, as far as `v`'s own base colour is concerned.
    fn edge_residues_seen_by(&self, v: usize, u: usize, e: usize) -> Vec<Colour> {
        let (k, m) = (self.params.k, self.params.modulus);
        let c = self.current.edge[e];
        if !self.stats.is_big(v) {
            return [-1, 0, 1, 2]
                .iter()
                .map(|&j| residue(c + j * k, m))
                .collect();
        }
        if self.is_processed(u) {
            vec![residue(c, m), residue(c + self.backward_edge_delta(u), m)]
        } else {
            // Adds 0 or k now; the later step at u moves it by a multiple of K.
            vec![residue(c, m), residue(c + k, m)]
        }
    }

    fn blocked_residues(&self, v: usize, relaxed: bool) -> Vec<Colour> {
        let (k, m) = (self.params.k, self.params.modulus);
        let mut blocked = Vec::new();
        let mut block_vertex = |u: usize| {
            if let Some(b) = self.base_colour[u] {
                blocked.push(residue(b, m));
                blocked.push(residue(b + k, m));
            }
        };
        if self.exclude_r_neighbour_bases && !relaxed {
            self.hoods.of(v).iter().for_each(|&u| block_vertex(u));
        } else {
            self.graph
                .neighbours(v)
                .iter()
                .for_each(|&u| block_vertex(u));
        }
        for (u, e) in self.graph.incident(v) {
            blocked.extend(self.edge_residues_seen_by(v, u, e));
        }
        blocked
    }

    fn admissible_with(&self, v: usize, relaxed: bool) -> BaseColours {
        let (k, m) = (self.params.k, self.params.modulus);
        let blocked = self.blocked_residues(v, relaxed);
        let mut excluded: Vec<Colour> = blocked
            .iter()
            .flat_map(|&b| [b, residue(b - k, m)])
            .collect();
        excluded.sort_unstable();
        excluded.dedup();
        BaseColours {
            modulus: m,
            excluded,
        }
    }

    /// Base colours `c'` in `[1, K]` for `v` such that neither `c'` nor
    /// `c' + k` is congruent to a residue held now or later by an earlier
    /// neighbour (`c'(u)`, `c'(u) + k`) or by an incident edge.
    pub fn admissible_base_colours(&self, v: usize) -> BaseColours {
        self.admissible_with(v, false)
    }

    /// Sums reachable at `v` when its colour is set to `anchor`.
    pub fn achievable_sums(&self, v: usize, anchor: Colour) -> SumLattice {
        let mut lattice = SumLattice {
            origin: anchor,
            modulus: self.params.modulus,
            k: self.params.k,
            big_up: Vec::new(),
            big_down: Vec::new(),
            small_up: Vec::new(),
            small_down: Vec::new(),
        };
        let v_big = self.stats.is_big(v);
        for (u, e) in self.graph.incident(v) {
            lattice.origin += self.current.edge[e];
            if self.is_processed(u) {
                let delta = self.backward_edge_delta(u);
                let list = match (self.stats.is_big(u), delta > 0) {
                    (true, true) => &mut lattice.big_up,
                    (true, false) => &mut lattice.big_down,
                    (false, true) => &mut lattice.small_up,
                    (false, false) => &mut lattice.small_down,
                };
                list.push(e);
            } else if !v_big && self.stats.is_big(u) {
                lattice.big_up.push(e);
            } else {
                lattice.small_up.push(e);
            }
        }
        lattice
    }

    fn forbidden_sums(&self, v: usize) -> HashSet<Colour> {
        self.hoods
            .of(v)
            .iter()
            .filter_map(|&u| self.target[u])
            .collect()
    }

    /// Fixes `v`'s base colour and target sum and applies the edge deltas and
    /// neighbour compensations that reach it.
    pub fn process_vertex(&mut self, v: usize) -> Result<StepRecord, AlgorithmError> {
        if self.is_processed(v) {
            return Err(AlgorithmError::InvariantBreach {
                vertex: v,
                detail: "vertex processed twice".into(),
            });
        }
        if self.position[v] != self.processed_count {
            return Err(AlgorithmError::InvariantBreach {
                vertex: v,
                detail: "vertex processed out of order".into(),
            });
        }
        self.processed_count += 1;
        let backward_r = self
            .hoods
            .of(v)
            .iter()
            .filter(|&&u| self.is_processed(u))
            .count();
        let class = self.stats.class[v];
        if self.graph.degree(v) == 0 {
            let delta = 1 - self.current.vertex[v];
            self.current.vertex[v] = 1;
            self.base_colour[v] = Some(1);
            self.anchor[v] = Some(1);
            self.target[v] = Some(1);
            return Ok(StepRecord {
                vertex: v,
                class,
                in_prefix: self.in_prefix[v],
                base_colour: 1,
                anchor: 1,
                target: 1,
                vertex_delta: delta,
                edge_deltas: Vec::new(),
                compensations: Vec::new(),
                admissible_bases: self.params.modulus as usize,
                lattice_size: 1,
                available_sums: Some(1),
                backward_r_neighbours: backward_r,
                fallback: None,
            });
        }

        let forbidden = self.forbidden_sums(v);
        let mut relaxed = false;
        let mut admissible = self.admissible_base_colours(v);
        if admissible.is_empty() && self.exclude_r_neighbour_bases {
            relaxed = true;
            admissible = self.admissible_with(v, true);
        }
        if admissible.is_empty() {
            return Err(AlgorithmError::InvariantBreach {
                vertex: v,
                detail: "no admissible base colour".into(),
            });
        }
        let template = self.achievable_sums(v, 0);
        let offsets = template.offsets();
        let available = count_distinct_sums(&admissible, &template);

        // Multiples of K beyond 0 only enter when every constrained option
        // is taken; |forbidden| + 1 multiples always suffice.
        let mut choice = None;
        'search: for multiple in 0..=(forbidden.len() as i128 + 1) {
            for c in admissible.iter() {
                let anchor = c + multiple * self.params.modulus;
                for &(i, j) in &offsets {
                    let w = template.value(i, j) + anchor;
                    if !forbidden.contains(&w) {
                        choice = Some((c, anchor, multiple, i, j, w));
                        break 'search;
                    }
                }
            }
        }
        let (c, anchor, multiple, i, j, w) =
            choice.ok_or_else(|| AlgorithmError::InvariantBreach {
                vertex: v,
                detail: "no sum outside the forbidden set".into(),
            })?;

        let edge_deltas = template.realise(i, j);
        let mut compensations = Vec::new();
        for &(e, d) in &edge_deltas {
            self.current.edge[e] += d;
            self.edge_alterations[e] += 1;
            let u = self.graph.other_end(e, v);
            if self.is_processed(u) {
                self.current.vertex[u] -= d;
                compensations.push((u, -d));
            }
        }
        let vertex_delta = anchor - self.current.vertex[v];
        self.current.vertex[v] = anchor;
        self.base_colour[v] = Some(c);
        self.anchor[v] = Some(anchor);
        self.target[v] = Some(w);

        let fallback = (relaxed || multiple > 0).then_some(Fallback {
            relaxed_bases: relaxed,
            palette_multiple: multiple,
        });
        Ok(StepRecord {
            vertex: v,
            class,
            in_prefix: self.in_prefix[v],
            base_colour: c,
            anchor,
            target: w,
            vertex_delta,
            edge_deltas,
            compensations,
            admissible_bases: admissible.len(),
            lattice_size: template.size(),
            available_sums: available,
            backward_r_neighbours: backward_r,
            fallback,
        })
    }

    /// Every breached state invariant; empty when the state is sound.
    pub fn invariant_violations(&self) -> Vec<StateViolation> {
        let g = self.graph;
        let (k, m) = (self.params.k, self.params.modulus);
        let mut out = Vec::new();
        for v in 0..g.vertex_count() {
            let (Some(a), Some(t)) = (self.anchor[v], self.target[v]) else {
                continue;
            };
            let c = self.current.vertex[v];
            if ![a, a + k, a + m, a + m + k].contains(&c) {
                out.push(StateViolation::VertexOutsideWindow {
                    vertex: v,
                    colour: c,
                });
            }
            let actual = self.current.weighted_degree(g, v);
            if actual != t {
                out.push(StateViolation::SumDrift {
                    vertex: v,
                    target: t,
                    actual,
                });
            }
        }
        for e in 0..g.edge_count() {
            let c = self.current.edge[e];
            if !self
                .params
                .edge_residue_window(self.edge_base[e])
                .contains(&residue(c, m))
            {
                out.push(StateViolation::EdgeOutsideWindow { edge: e, colour: c });
            }
            if c < 1 || c > self.params.palette_max {
                out.push(StateViolation::EdgeOutOfRange { edge: e, colour: c });
            }
            if self.edge_alterations[e] > 2 {
                out.push(StateViolation::AlterationBudget {
                    edge: e,
                    alterations: self.edge_alterations[e],
                });
            }
        }
        // Proper modulo K, ignoring unprocessed vertices.
        let res = |x: Colour| residue(x, m);
        for v in 0..g.vertex_count() {
            let inc = g.incident_edges(v);
            for (x, &e) in inc.iter().enumerate() {
                for &f in &inc[x + 1..] {
                    if res(self.current.edge[e]) == res(self.current.edge[f]) {
                        out.push(StateViolation::ResidueClash {
                            first: Element::Edge(e),
                            second: Element::Edge(f),
                        });
                    }
                }
            }
            if !self.is_processed(v) {
                continue;
            }
            let rv = res(self.current.vertex[v]);
            for (u, e) in g.incident(v) {
                if res(self.current.edge[e]) == rv {
                    out.push(StateViolation::ResidueClash {
                        first: Element::Vertex(v),
                        second: Element::Edge(e),
                    });
                }
                if u > v && self.is_processed(u) && res(self.current.vertex[u]) == rv {
                    out.push(StateViolation::ResidueClash {
                        first: Element::Vertex(v),
                        second: Element::Vertex(u),
                    });
                }
            }
        }
        out
    }
}

const COUNT_LIMIT_BITS: i128 = 1 << 26;

/// `|{c + i·K + j·k}|` over admissible `c` and lattice offsets, by shifting
/// bitsets; `None` when the span is too wide to materialise.
fn count_distinct_sums(admissible: &BaseColours, lattice: &SumLattice) -> Option<usize> {
    let (m, k) = (lattice.modulus, lattice.k);
    let small_span = (lattice.small_up.len() + lattice.small_down.len()) as i128;
    let big_span = (lattice.big_up.len() + lattice.big_down.len()) as i128;
    let width = m + small_span * k + big_span * m;
    if width > COUNT_LIMIT_BITS {
        return None;
    }
    let words = (width as usize).div_ceil(64);
    let mut base = vec![0u64; words];
    // Bit c-1 for every c in [1, K], then drop the excluded residues.
    let m_bits = m as usize;
    for (w, word) in base.iter_mut().enumerate().take(m_bits.div_ceil(64)) {
        let filled = (m_bits - 64 * w).min(64);
        *word = if filled == 64 {
            u64::MAX
        } else {
            (1u64 << filled) - 1
        };
    }
    for &x in &admissible.excluded {
        let bit = (residue(x - 1, m)) as usize;
        base[bit / 64] &= !(1u64 << (bit % 64));
    }
    let mut small = vec![0u64; words];
    for j in 0..=small_span {
        or_shifted(&mut small, &base, (j * k) as usize);
    }
    let mut all = vec![0u64; words];
    for i in 0..=big_span {
        or_shifted(&mut all, &small, (i * m) as usize);
    }
    Some(all.iter().map(|w| w.count_ones() as usize).sum())
}

fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        if i + ws < dst.len() {
            dst[i + ws] |= w << bs;
        }
        if bs > 0 && i + ws + 1 < dst.len() {
            dst[i + ws + 1] |= w >> (64 - bs);
        }
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub params: PaletteParams,
    pub base: TotalColouring,
    pub colouring: TotalColouring,
    pub targets: Vec<Colour>,
    pub certificate: OrderingCertificate,
    pub trace: RunTrace,
}

impl RunOutput {
    pub fn fallback_count(&self) -> usize {
        self.trace.fallback_count()
    }
}

/// Palette arithmetic, starting colouring, ordering certificate and
/// sequential processing. Radius 1 reuses the radius-2 arithmetic and
/// ordering; maximum degree below 2 uses Δ = 2.
pub fn run(graph: &Graph, config: &DistinguisherConfig) -> Result<RunOutput, AlgorithmError> {
    if config.r == 0 {
        return Err(AlgorithmError::ZeroRadius);
    }
    let params_delta = graph.max_degree().max(2) as u64;
    let params_r = config.r.max(2);
    let params = compute_params(params_delta, params_r)?;
    let base = base_colouring(graph, &params)?;
    let certificate = resample_until_valid(graph, params_r, config.seed, config.max_rounds)?;

    let mut state = AlgoState::new(
        graph,
        params.clone(),
        base.clone(),
        &certificate.ordering,
        certificate.in_prefix.clone(),
        config.r,
        config.exclude_r_neighbour_bases,
    );
    let mut steps = Vec::with_capacity(graph.vertex_count());
    for &v in &certificate.ordering {
        steps.push(state.process_vertex(v)?);
        if config.check_every_step {
            if let Some(first) = state.invariant_violations().first() {
                return Err(AlgorithmError::InvariantBreach {
                    vertex: v,
                    detail: first.to_string(),
                });
            }
        }
    }
    let targets = (0..graph.vertex_count())
        .map(|v| state.target(v).expect("every vertex is processed"))
        .collect();
    Ok(RunOutput {
        params,
        base,
        colouring: state.into_colouring(),
        targets,
        certificate,
        trace: RunTrace {
            params_delta,
            params_r,
            steps,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges).unwrap()
    }

    fn state_for<'g>(g: &'g Graph, r: u32, ordering: &[usize]) -> AlgoState<'g> {
        let params = compute_params(g.max_degree().max(2) as u64, r.max(2)).unwrap();
        let base = base_colouring(g, &params).unwrap();
        AlgoState::new(
            g,
            params,
            base,
            ordering,
            vec![false; g.vertex_count()],
            r,
            false,
        )
    }

    #[test]
    fn isolated_vertex_takes_one() {
        let g = graph(1, &[]);
        let mut st = state_for(&g, 2, &[0]);
        assert_eq!(
            st.admissible_base_colours(0).len() as i128,
            st.params().modulus
        );
        let step = st.process_vertex(0).unwrap();
        assert_eq!((step.target, st.colouring().vertex[0]), (1, 1));
        let lattice = st.achievable_sums(0, 5);
        assert_eq!(lattice.size(), 1);
        assert_eq!(lattice.offsets(), vec![(0, 0)]);
    }

    #[test]
    fn k2_second_vertex_exclusions() {
        let g = graph(2, &[(0, 1)]);
        let mut st = state_for(&g, 2, &[0, 1]);
        st.process_vertex(0).unwrap();
        let m = st.params().modulus;
        let admissible = st.admissible_base_colours(1);
        // At most 3 values excluded by vertex 0 and 5 by the shared edge.
        assert!(admissible.len() as i128 >= m - 3 - 5);

        // Brute force over [1, K] with the exclusion rule written out.
        let k = st.params().k;
        let b0 = st.base_colour(0).unwrap();
        let e = st.colouring().edge[0];
        let mut blocked: Vec<Colour> = vec![b0, b0 + k];
        blocked.extend([-1, 0, 1, 2].map(|j| e + j * k));
        let blocked: Vec<Colour> = blocked.iter().map(|&x| residue(x, m)).collect();
        let brute: Vec<Colour> = (1..=m)
            .filter(|&c| !blocked.contains(&residue(c, m)) && !blocked.contains(&residue(c + k, m)))
            .collect();
        assert_eq!(admissible.iter().collect::<Vec<_>>(), brute);
        assert_eq!(admissible.len(), brute.len());

        let s1 = st.process_vertex(1).unwrap();
        assert_ne!(st.target(0), st.target(1));
        assert!(
            st.invariant_violations().is_empty(),
            "{:?}",
            st.invariant_violations()
        );
        assert!(s1.fallback.is_none());
    }

    #[test]
    fn forward_rule_one_adds_modulus() {
        // Δ = 8: the hub is big, each spoke end small.
        let edges: Vec<_> = (1..=8).map(|i| (0, i)).collect();
        let g = graph(9, &edges);
        let st = state_for(&g, 2, &(1..=8).chain([0]).collect::<Vec<_>>());
        let lattice = st.achievable_sums(1, 3);
        assert_eq!(lattice.big_up, vec![0]);
        assert!(lattice.small_up.is_empty());
        let l = st.colouring().edge[0];
        let sums: Vec<Colour> = lattice
            .offsets()
            .iter()
            .map(|&(i, j)| lattice.value(i, j))
            .collect();
        assert_eq!(sums, vec![3 + l, 3 + l + st.params().modulus]);
    }

    #[test]
    fn backward_sign_follows_neighbour_window() {
        let edges: Vec<_> = (1..=8).map(|i| (0, i)).collect();
        let g = graph(9, &edges);
        // Hub first: it is big and sits at its base colour.
        let mut st = state_for(&g, 2, &(0..9).collect::<Vec<_>>());
        st.process_vertex(0).unwrap();
        assert_eq!(st.colouring().vertex[0], st.base_colour(0).unwrap());
        assert_eq!(st.backward_edge_delta(0), -st.params().modulus);
        let lattice = st.achievable_sums(1, 1);
        assert_eq!(lattice.big_down, vec![0]);
    }

    #[test]
    fn distinct_sums_count_matches_enumeration() {
        let lattice = SumLattice {
            origin: 0,
            modulus: 12,
            k: 3,
            big_up: vec![0],
            big_down: vec![1],
            small_up: vec![2, 3],
            small_down: vec![],
        };
        let admissible = BaseColours {
            modulus: 12,
            excluded: vec![0, 2, 3, 4, 6, 7, 8, 10],
        };
        assert_eq!(admissible.iter().collect::<Vec<_>>(), vec![1, 5, 9, 11]);
        let mut all: Vec<Colour> = Vec::new();
        for c in admissible.iter() {
            for (i, j) in lattice.offsets() {
                all.push(c + lattice.value(i, j));
            }
        }
        all.sort_unstable();
        all.dedup();
        assert_eq!(count_distinct_sums(&admissible, &lattice), Some(all.len()));
    }

    #[test]
    fn small_runs_are_sound() {
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let mut cfg = DistinguisherConfig::new(2, 9);
        cfg.check_every_step = true;
        let out = run(&c5, &cfg).unwrap();
        let mut sums = out.colouring.weighted_degrees(&c5);
        assert_eq!(sums, out.targets);
        sums.sort_unstable();
        sums.dedup();
        assert_eq!(sums.len(), 5);
        assert_eq!(out.trace.replay(&out.base), out.colouring);

        let k2 = graph(2, &[(0, 1)]);
        let out = run(&k2, &cfg).unwrap();
        assert_ne!(out.targets[0], out.targets[1]);
    }

    #[test]
    fn zero_radius_is_rejected() {
        let g = graph(2, &[(0, 1)]);
        assert_eq!(
            run(&g, &DistinguisherConfig::new(0, 1)).unwrap_err(),
            AlgorithmError::ZeroRadius
        );
    }

    #[test]
    fn exhausted_r_neighbour_bases_fall_back() {
        // Radius-2 arithmetic (K = 15) while excluding bases over radius 4:
        // on C9 every vertex sees all others and the residues run out.
        let edges: Vec<_> = (0..9).map(|i| (i, (i + 1) % 9)).collect();
        let g = graph(9, &edges);
        let params = compute_params(2, 2).unwrap();
        assert_eq!(params.modulus, 15);
        let base = base_colouring(&g, &params).unwrap();
        let order: Vec<usize> = (0..9).collect();
        let mut st = AlgoState::new(&g, params, base, &order, vec![false; 9], 4, true);
        let mut fallbacks = Vec::new();
        for v in 0..9 {
            let step = st.process_vertex(v).unwrap();
            assert!(st.invariant_violations().is_empty());
            fallbacks.extend(step.fallback);
        }
        assert!(!fallbacks.is_empty());
        assert!(fallbacks.iter().all(|f| f.relaxed_bases));
        let mut targets: Vec<Colour> = (0..9).map(|v| st.target(v).unwrap()).collect();
        assert_eq!(st.colouring().weighted_degrees(&g), targets);
        targets.sort_unstable();
        targets.dedup();
        assert_eq!(targets.len(), 9);
    }
}
