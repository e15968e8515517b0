//! Batch runs over a grid of generated instances, reported as CSV.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::distinguisher::{run, DistinguisherConfig};
use crate::generate::{generate, GraphKind};
use crate::io::{run_metadata, write_graph, ColouringDocument};
use crate::ordering::DEFAULT_MAX_ROUNDS;
use crate::params::asymptotic_bound;
use crate::verify::verify;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instance {
    pub kind: GraphKind,
    pub n: usize,
    pub param: Option<f64>,
    pub r: u32,
    pub seed: u64,
}

impl Instance {
    fn stem(&self, index: usize) -> String {
        format!(
            "{:04}-{}-n{}-r{}-s{}",
            index + 1,
            self.kind,
            self.n,
            self.r,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentOptions {
    pub max_rounds: usize,
    /// Adds a wall_ms column; tables are then no longer reproducible.
    pub timing: bool,
    /// Audit the recolouring state after every step.
    pub audit: bool,
    /// Directory for per-instance graph and colouring files.
    pub save_dir: Option<PathBuf>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            max_rounds: DEFAULT_MAX_ROUNDS,
            timing: false,
            audit: false,
            save_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
        }
    }
}

/// Outcome of a finished run; absent when the instance errored.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub m: usize,
    pub delta: usize,
    pub k: i128,
    pub modulus: i128,
    pub palette_max: i128,
    pub max_colour: i128,
    pub bound: f64,
    pub fallbacks: usize,
    pub ordering_valid: bool,
    pub resample_rounds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub instance: Instance,
    pub summary: Option<RunSummary>,
    pub verdict: Verdict,
    pub note: String,
    pub wall_ms: Option<f64>,
}

pub const COLUMNS: [&str; 18] = [
    "kind",
    "n",
    "param",
    "m",
    "delta",
    "r",
    "seed",
    "k",
    "K",
    "palette_max",
    "max_colour",
    "bound",
    "within_palette",
    "fallbacks",
    "ordering_valid",
    "resample_rounds",
    "verify",
    "note",
];

fn run_instance(index: usize, inst: &Instance, opts: &ExperimentOptions) -> Row {
    let start = Instant::now();
    let (summary, verdict, note) = match evaluate(index, inst, opts) {
        Ok((summary, verdict, note)) => (Some(summary), verdict, note),
        Err(message) => (None, Verdict::Error, message),
    };
    Row {
        instance: *inst,
        summary,
        verdict,
        note,
        wall_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    }
}

fn evaluate(
    index: usize,
    inst: &Instance,
    opts: &ExperimentOptions,
) -> Result<(RunSummary, Verdict, String), String> {
    let graph = generate(inst.kind, inst.n, inst.param, inst.seed).map_err(|e| e.to_string())?;
    let config = DistinguisherConfig {
        max_rounds: opts.max_rounds,
        check_every_step: opts.audit,
        ..DistinguisherConfig::new(inst.r, inst.seed)
    };
    let out = run(&graph, &config).map_err(|e| e.to_string())?;
    let report = verify(&graph, &out.colouring, inst.r, None).map_err(|e| e.to_string())?;
    let (verdict, note) = match report.violations.first() {
        None => (Verdict::Pass, String::new()),
        Some(v) => (Verdict::Fail, v.to_string()),
    };

    if let Some(dir) = &opts.save_dir {
        let stem = inst.stem(index);
        let meta = run_metadata(&graph, inst.r, inst.seed, &out);
        let doc = ColouringDocument::from_colouring(&graph, &out.colouring, meta);
        save(dir, &stem, &write_graph(&graph), &doc.render())
            .map_err(|e| format!("saving {stem}: {e}"))?;
    }

    let summary = RunSummary {
        m: graph.edge_count(),
        delta: graph.max_degree(),
        k: out.params.k,
        modulus: out.params.modulus,
        palette_max: out.params.palette_max,
        max_colour: report.max_colour,
        bound: asymptotic_bound(out.trace.params_delta, out.trace.params_r),
        fallbacks: out.fallback_count(),
        ordering_valid: out.certificate.valid,
        resample_rounds: out.certificate.resample_rounds,
    };
    Ok((summary, verdict, note))
}

fn save(dir: &Path, stem: &str, graph: &str, colouring: &str) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{stem}.graph")), graph)?;
    fs::write(dir.join(format!("{stem}.col")), colouring)
}

/// Runs every instance, in parallel; rows come back in grid order.
pub fn run_experiment(grid: &[Instance], opts: &ExperimentOptions) -> Vec<Row> {
    grid.par_iter()
        .enumerate()
        .map(|(i, inst)| run_instance(i, inst, opts))
        .collect()
}

fn opt<T: ToString>(value: Option<T>) -> String {
    value.map_or_else(String::new, |v| v.to_string())
}

pub fn write_table<W: io::Write>(rows: &[Row], timing: bool, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if timing {
        header.push("wall_ms");
    }
    w.write_record(&header)?;
    for row in rows {
        let inst = &row.instance;
        let s = row.summary.as_ref();
        let mut record = vec![
            inst.kind.to_string(),
            inst.n.to_string(),
            opt(inst.param),
            opt(s.map(|s| s.m)),
            opt(s.map(|s| s.delta)),
            inst.r.to_string(),
            inst.seed.to_string(),
            opt(s.map(|s| s.k)),
            opt(s.map(|s| s.modulus)),
            opt(s.map(|s| s.palette_max)),
            opt(s.map(|s| s.max_colour)),
            opt(s.map(|s| format!("{:.6}", s.bound))),
            opt(s.map(|s| s.max_colour <= s.palette_max)),
            opt(s.map(|s| s.fallbacks)),
            opt(s.map(|s| s.ordering_valid)),
            opt(s.map(|s| s.resample_rounds)),
            row.verdict.label().to_string(),
            row.note.clone(),
        ];
        if timing {
            record.push(opt(row.wall_ms.map(|ms| format!("{ms:.3}"))));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn table_string(rows: &[Row], timing: bool) -> String {
    let mut buf = Vec::new();
    write_table(rows, timing, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Reads a grid file: CSV with header `kind,n,param,r,seed`; `param` may be
/// empty.
pub fn parse_grid(text: &str) -> Result<Vec<Instance>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    let expected = ["kind", "n", "param", "r", "seed"];
    if header.iter().ne(expected) {
        return Err(format!("grid header must be `{}`", expected.join(",")));
    }
    let mut grid = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let line = i + 2;
        let field = |j: usize| record.get(j).unwrap_or("");
        let bad = |j: usize| format!("grid row {line}: invalid {} `{}`", expected[j], field(j));
        let kind = field(0).parse().map_err(|_| bad(0))?;
        let n = field(1).parse().map_err(|_| bad(1))?;
        let param = match field(2) {
            "" => None,
            p => Some(p.parse().map_err(|_| bad(2))?),
        };
        let r = field(3).parse().map_err(|_| bad(3))?;
        let seed = field(4).parse().map_err(|_| bad(4))?;
        grid.push(Instance {
            kind,
            n,
            param,
            r,
            seed,
        });
    }
    Ok(grid)
}
