use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use distsum_core::distinguisher::{run, DistinguisherConfig};
use distsum_core::exact::{exact_chi, ExactOutcome};
use distsum_core::experiment::{
    parse_grid, run_experiment, write_table, ExperimentOptions, Instance, Verdict,
};
use distsum_core::generate::{generate, GraphKind};
use distsum_core::graph::Graph;
use distsum_core::io::{
    parse_graph, render_certificate, render_trace, run_metadata, write_graph, ColouringDocument,
};
use distsum_core::ordering::{resample_until_valid, DEFAULT_MAX_ROUNDS};
use distsum_core::params::{check_l_property, compute_params, asymptotic_bound, Colour};
use distsum_core::verify::verify;

/// Distance-r sum distinguishing total colourings.
#[derive(Parser, Debug)]
#[command(name = "distsum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Graph file (`p n m` header, `e u v` lines).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print k, K, L and the colour bounds for a maximum degree.
    Palette {
        /// Maximum degree; taken from --input when omitted.
        #[arg(long)]
        delta: Option<u64>,
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Sample a vertex ordering and print its certificate.
    Order {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Colour a graph and write the colouring file.
    Color {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
        /// Write the per-step trace to this file.
        #[arg(long)]
        emit_trace: Option<PathBuf>,
        /// Audit the state after every step; a breach is an error.
        #[arg(long)]
        check_invariants: bool,
        /// Keep base colours apart from every earlier r-neighbour.
        #[arg(long)]
        exclude_r_neighbours: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check a colouring file against a graph.
    Verify {
        #[arg(long)]
        colouring: PathBuf,
        /// Radius; defaults to the colouring's `r` meta entry.
        #[arg(long)]
        r: Option<u32>,
        /// Largest colour allowed.
        #[arg(long)]
        bound: Option<Colour>,
        #[command(flatten)]
        common: Common,
    },
    /// Least palette size by exhaustive search (tiny graphs only).
    Exact {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 8)]
        limit: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a graph file.
    Gen {
        #[arg(long)]
        kind: GraphKind,
        #[arg(long)]
        n: usize,
        /// Edge probability (gnp) or degree (regular-ish).
        #[arg(long)]
        param: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a grid of generated instances and print a CSV table.
    Experiment {
        /// CSV grid with header `kind,n,param,r,seed`.
        #[arg(long, conflicts_with_all = ["kind", "n", "param", "r"])]
        grid: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        kind: Vec<GraphKind>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        r: Vec<u32>,
        /// Seeds seed, seed+1, ..., seed+count-1 per combination.
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
        /// Add a wall-clock column (makes tables differ between runs).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        audit: bool,
        /// Save each instance's graph and colouring here.
        #[arg(long)]
        save_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Input problems exit with 2, failed checks with 1.
enum Failure {
    Input(anyhow::Error),
    Check(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(common: &Common) -> Result<Graph> {
    let path = common
        .input
        .as_ref()
        .ok_or_else(|| anyhow!("--input is required"))?;
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn meta(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Palette { delta, r, common } => {
            let delta = match delta {
                Some(d) => d,
                None => load_graph(&common)?.max_degree() as u64,
            };
            let p = compute_params(delta, r).map_err(anyhow::Error::from)?;
            let check = check_l_property(&p);
            let text = format!(
                "delta {}\nr {}\nk {}\nK {}\nL {}\n|L| {}\npalette_max {}\nbound {:.6}\nwindows_disjoint {}\n",
                p.delta,
                p.r,
                p.k,
                p.modulus,
                p.edge_palette,
                p.edge_palette.len(),
                p.palette_max,
                asymptotic_bound(delta, r),
                check.holds
            );
            emit(&common, &text)?;
        }
        Command::Order {
            r,
            max_rounds,
            common,
        } => {
            let graph = load_graph(&common)?;
            let cert = resample_until_valid(&graph, r, common.seed, max_rounds)
                .map_err(anyhow::Error::from)?;
            emit(&common, &render_certificate(&cert))?;
            if !cert.valid {
                return Err(Failure::Check(format!(
                    "{} checks still fail after {} rounds",
                    cert.failed_checks(),
                    cert.resample_rounds
                )));
            }
        }
        Command::Color {
            r,
            max_rounds,
            emit_trace,
            check_invariants,
            exclude_r_neighbours,
            common,
        } => {
            let graph = load_graph(&common)?;
            let config = DistinguisherConfig {
                max_rounds,
                exclude_r_neighbour_bases: exclude_r_neighbours,
                check_every_step: check_invariants,
                ..DistinguisherConfig::new(r, common.seed)
            };
            let out = match run(&graph, &config) {
                Ok(out) => out,
                Err(e @ distsum_core::error::AlgorithmError::InvariantBreach { .. }) => {
                    return Err(Failure::Check(e.to_string()))
                }
                Err(e) => return Err(anyhow::Error::from(e).into()),
            };
            let doc = ColouringDocument::from_colouring(
                &graph,
                &out.colouring,
                run_metadata(&graph, r, common.seed, &out),
            );
            emit(&common, &doc.render())?;
            if let Some(path) = emit_trace {
                fs::write(&path, render_trace(&out.trace))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let report = verify(&graph, &out.colouring, r, None).map_err(anyhow::Error::from)?;
            if let Some(v) = report.violations.first() {
                return Err(Failure::Check(v.to_string()));
            }
        }
        Command::Verify {
            colouring,
            r,
            bound,
            common,
        } => {
            let graph = load_graph(&common)?;
            let doc = ColouringDocument::parse(&read(&colouring)?)
                .with_context(|| format!("parsing {}", colouring.display()))?;
            let r = match (r, doc.meta_value("r")) {
                (Some(r), _) => r,
                (None, Some(v)) => v.parse().context("meta entry r is not a radius")?,
                (None, None) => return Err(anyhow!("--r is required").into()),
            };
            let col = doc.to_colouring(&graph).map_err(anyhow::Error::from)?;
            let report = verify(&graph, &col, r, bound).map_err(anyhow::Error::from)?;
            let mut text = format!(
                "proper_vertices {}\nproper_edges {}\nproper_incidence {}\nr_distant {}\nmax_colour {}\nbound_ok {}\n",
                report.proper_vertices,
                report.proper_edges,
                report.proper_incidence,
                report.r_distant_ok,
                report.max_colour,
                report.bound_ok
            );
            for v in &report.violations {
                text.push_str(&format!("violation {v}\n"));
            }
            text.push_str(if report.passed() { "PASS\n" } else { "FAIL\n" });
            emit(&common, &text)?;
            if !report.passed() {
                return Err(Failure::Check(format!(
                    "{} violations",
                    report.violations.len()
                )));
            }
        }
        Command::Exact { r, limit, common } => {
            let graph = load_graph(&common)?;
            match exact_chi(&graph, r, limit) {
                ExactOutcome::Solved { chi, witness } => {
                    let doc = ColouringDocument::from_colouring(
                        &graph,
                        &witness,
                        meta(&[("r", r.to_string()), ("chi", chi.to_string())]),
                    );
                    emit(&common, &doc.render())?;
                    eprintln!("chi {chi}");
                }
                ExactOutcome::ExceedsLimit { limit } => {
                    return Err(Failure::Check(format!("exceeds limit {limit}")))
                }
            }
        }
        Command::Gen {
            kind,
            n,
            param,
            common,
        } => {
            let graph = generate(kind, n, param, common.seed).map_err(anyhow::Error::from)?;
            emit(&common, &write_graph(&graph))?;
        }
        Command::Experiment {
            grid,
            kind,
            n,
            param,
            r,
            count,
            max_rounds,
            timing,
            audit,
            save_dir,
            common,
        } => {
            let grid = match grid {
                Some(path) => parse_grid(&read(&path)?).map_err(|e| anyhow!(e))?,
                None => {
                    let mut grid = Vec::new();
                    let radii = if r.is_empty() { vec![2] } else { r };
                    for &kind in &kind {
                        for &n in &n {
                            for &r in &radii {
                                for seed in common.seed..common.seed + count {
                                    grid.push(Instance {
                                        kind,
                                        n,
                                        param,
                                        r,
                                        seed,
                                    });
                                }
                            }
                        }
                    }
                    grid
                }
            };
            let opts = ExperimentOptions {
                max_rounds,
                timing,
                audit,
                save_dir,
            };
            let rows = run_experiment(&grid, &opts);
            let mut buf = Vec::new();
            write_table(&rows, timing, &mut buf).map_err(anyhow::Error::from)?;
            emit(
                &common,
                &String::from_utf8(buf).map_err(anyhow::Error::from)?,
            )?;
            let bad = rows
                .iter()
                .filter(|row| row.verdict != Verdict::Pass)
                .count();
            if bad > 0 {
                return Err(Failure::Check(format!(
                    "{bad} of {} rows did not pass",
                    rows.len()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("fail: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
