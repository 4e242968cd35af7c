//! `graphex` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numerical
//! failure. The default seed comes from `GRAPHEX_SEED` when set.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use graphex_core::error::{Error, Result};
use graphex_core::experiments::{ExperimentConfig, ExperimentKind, ResultTable};
use graphex_core::io::{
    parse_edge_list, parse_trace, write_bias_csv, write_edge_list, write_result_csv,
    write_result_json,
};
use graphex_core::{
    count_n_p, estimate_sigma_cr, estimate_sigma_nsvr, gamma_diagnostic, run_real_eval,
    run_risk_table, run_species_table, run_trace_eval, sample_unipartite, ModelSpec,
};

#[derive(Parser)]
#[command(
    name = "graphex",
    version,
    about = "Graphex-process simulation, tail-index estimation and edge prediction"
)]
struct Cli {
    /// Cap the Monte Carlo worker pool (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph from a model and write it as an edge list.
    Simulate {
        /// Model key: dense, almost-dense, sparse-sep, sparse-nonsep, ggp.
        #[arg(long)]
        model: String,
        /// Tail-index for the sparse families.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        size: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Expected number of edges lost to latent-domain truncation.
        #[arg(long, default_value_t = 1e-3)]
        budget: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the tail-index of an edge-list graph.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Thinning level of the degree-smoothing estimator.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// nsvr (degree smoothing) or cr (size based).
        #[arg(long, default_value = "nsvr")]
        estimator: String,
        /// Also report the estimate clipped to [0, 1].
        #[arg(long)]
        clamp: bool,
    },
    /// Monte Carlo risk table for the tail-index estimators.
    RiskTable {
        #[arg(long)]
        model: String,
        #[arg(long)]
        sigma: Option<f64>,
        /// Size grid: comma list (25,50,100) or geometric range (16..4096).
        #[arg(long)]
        sizes: String,
        /// Replicates per grid point (overrides --preset).
        #[arg(long)]
        reps: Option<u64>,
        /// paper (full-fidelity replicate counts) or ci (scaled down).
        #[arg(long, default_value = "ci")]
        preset: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-3)]
        budget: f64,
        /// CSV output path; a .json sidecar embeds the config. Stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo unseen-edges table on the generalized-gamma model.
    SpeciesTable {
        #[arg(long)]
        sigma: f64,
        /// Beta grid; the observed snapshot sits at beta / beta-factor.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 2.0)]
        beta_factor: f64,
        #[arg(long)]
        reps: Option<u64>,
        #[arg(long, default_value = "ci")]
        preset: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-3)]
        budget: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subsampling evaluation of edge prediction on a real graph.
    RealEval {
        #[arg(long)]
        input: PathBuf,
        /// Vertex retention probability of the train split.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 1000)]
        reps: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deterministic evaluation on a timestamped edge trace.
    TraceEval {
        #[arg(long)]
        input: PathBuf,
        /// Snapshot times, comma separated.
        #[arg(long)]
        times: String,
        /// Final time whose unique-edge count is the prediction target.
        #[arg(long = "final")]
        final_time: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regular-variation diagnostics (pure quadrature, no sampling).
    Theory {
        #[arg(long)]
        model: String,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Size grid, e.g. 16..4096 for geometric doubling.
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("GRAPHEX_SEED") {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("GRAPHEX_SEED must be a u64, got '{raw}'"))),
        Err(_) => Ok(0),
    }
}

/// `lo..hi` doubles geometrically; otherwise a comma list.
fn parse_sizes(spec: &str) -> Result<Vec<f64>> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: f64 = lo
            .parse()
            .map_err(|_| Error::domain(format!("bad size '{lo}'")))?;
        let hi: f64 = hi
            .parse()
            .map_err(|_| Error::domain(format!("bad size '{hi}'")))?;
        if !(lo > 0.0 && hi >= lo) {
            return Err(Error::domain(format!("bad size range {lo}..{hi}")));
        }
        let mut sizes = Vec::new();
        let mut x = lo;
        while x <= hi * (1.0 + 1e-12) {
            sizes.push(x);
            x *= 2.0;
        }
        Ok(sizes)
    } else {
        spec.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::domain(format!("bad size '{tok}'")))
            })
            .collect()
    }
}

fn parse_times(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("bad time '{tok}'")))
        })
        .collect()
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

/// CSV to `out` (or stdout) plus a `.json` sidecar with the full config.
fn emit_table(table: &ResultTable, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            write_result_csv(table, BufWriter::new(File::create(path)?))?;
            let json_path = path.with_extension("json");
            write_result_json(table, BufWriter::new(File::create(&json_path)?))?;
            println!(
                "{}",
                json!({"written": {"csv": path, "json": json_path}, "rows": table.rows.len()})
            );
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            write_result_csv(table, &mut stdout)?;
        }
    }
    for notice in &table.notices {
        eprintln!("notice: {notice}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        // only effective once; later calls keep the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match cli.command {
        Command::Simulate {
            model,
            sigma,
            size,
            seed,
            budget,
            out,
        } => {
            let spec = ModelSpec::from_key(&model, sigma)?;
            let seed = resolve_seed(seed)?;
            let graph = sample_unipartite(&spec, size, budget, seed)?;
            write_edge_list(&graph, BufWriter::new(File::create(&out)?))?;
            println!(
                "{}",
                json!({
                    "command": "simulate",
                    "model": model,
                    "sigma": sigma,
                    "size": size,
                    "seed": seed,
                    "budget": budget,
                    "out": out,
                    "vertices": graph.vertex_count(),
                    "edges": graph.edge_count(),
                    "self_loops": graph.count_self_loops(),
                })
            );
            Ok(())
        }
        Command::Estimate {
            input,
            p,
            estimator,
            clamp,
        } => {
            let parsed = parse_edge_list(open_input(&input)?)?;
            let g = parsed.graph;
            let sigma_hat = match estimator.as_str() {
                "nsvr" => estimate_sigma_nsvr(&g, p, false)?.sigma_hat,
                "cr" => estimate_sigma_cr(&g)?,
                other => {
                    return Err(Error::domain(format!(
                        "unknown estimator '{other}' (expected nsvr or cr)"
                    )))
                }
            };
            println!(
                "{}",
                json!({
                    "command": "estimate",
                    "input": input,
                    "estimator": estimator,
                    "p": p,
                    "clamp": clamp,
                    "sigma_hat": sigma_hat,
                    "sigma_hat_clamped": clamp.then(|| sigma_hat.clamp(0.0, 1.0)),
                    "n1": count_n_p(&g, 1.0)?,
                    "np": count_n_p(&g, p)?,
                    "v_count": g.vertex_count(),
                    "e_count": g.edge_count(),
                    "self_loop_count": g.count_self_loops(),
                })
            );
            Ok(())
        }
        Command::RiskTable {
            model,
            sigma,
            sizes,
            reps,
            preset,
            seed,
            budget,
            out,
        } => {
            let replicates = match reps {
                Some(n) => n,
                None => ExperimentConfig::preset_replicates(ExperimentKind::RiskTable, &preset)?,
            };
            let mut config = ExperimentConfig::risk_table(
                &model,
                sigma,
                parse_sizes(&sizes)?,
                replicates,
                resolve_seed(seed)?,
            );
            config.budget = budget;
            config.output = out.as_ref().map(|p| p.display().to_string());
            let table = run_risk_table(&config)?;
            emit_table(&table, out.as_deref())
        }
        Command::SpeciesTable {
            sigma,
            sizes,
            beta_factor,
            reps,
            preset,
            seed,
            budget,
            out,
        } => {
            let replicates = match reps {
                Some(n) => n,
                None => ExperimentConfig::preset_replicates(ExperimentKind::SpeciesTable, &preset)?,
            };
            let mut config = ExperimentConfig::species_table(
                sigma,
                parse_sizes(&sizes)?,
                replicates,
                resolve_seed(seed)?,
            );
            config.beta_factor = beta_factor;
            config.budget = budget;
            config.output = out.as_ref().map(|p| p.display().to_string());
            let table = run_species_table(&config)?;
            emit_table(&table, out.as_deref())
        }
        Command::RealEval {
            input,
            r,
            reps,
            seed,
            out,
        } => {
            let parsed = parse_edge_list(open_input(&input)?)?;
            let name = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".to_string());
            let table = run_real_eval(&parsed.graph, r, reps, resolve_seed(seed)?, &name)?;
            emit_table(&table, out.as_deref())
        }
        Command::TraceEval {
            input,
            times,
            final_time,
            out,
        } => {
            let trace = parse_trace(open_input(&input)?)?;
            let table = run_trace_eval(&trace, &parse_times(&times)?, final_time)?;
            emit_table(&table, out.as_deref())
        }
        Command::Theory {
            model,
            sigma,
            p,
            sizes,
            out,
        } => {
            let spec = ModelSpec::from_key(&model, sigma)?;
            let grid = parse_sizes(&sizes)?;
            let diag = gamma_diagnostic(&spec, p, &grid)?;
            match out {
                Some(path) => {
                    write_bias_csv(&diag, BufWriter::new(File::create(&path)?))?;
                    println!(
                        "{}",
                        json!({
                            "command": "theory",
                            "model": model,
                            "sigma": sigma,
                            "p": p,
                            "sizes": grid,
                            "out": path,
                            "loglog_slope": diag.loglog_slope,
                        })
                    );
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    write_bias_csv(&diag, &mut stdout)?;
                    stdout.flush()?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                0
            } else {
                1
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
