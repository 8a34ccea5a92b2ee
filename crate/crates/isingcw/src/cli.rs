//! The `isingcw` command line.
//!
//! Results go to the supplied writer, one `key=value` record per line.
//! Exit codes: 0 success, 2 input error, 3 enumeration cap exceeded,
//! 4 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use isingcw_core::partition::PerCliqueMethod;
use isingcw_core::simulation::{replication_rng, summarize};
use isingcw_core::{
    clique_product_partition, conditional_normalizer, hoeffding_check, inner_approximation, marginals,
    pairwise_product, rank_interventions, CliquePotentialAssignment, ImpactMetric, Inference, InferenceMethod,
    InterventionSpec, Method, NuRule, ParamFamily, PartitionEstimate, SimulationConfig, ThetaOneRule, DEFAULT_CAP,
};

use crate::error::AppError;
use crate::formats::{read_edge_list, read_model};
use crate::grid::{parse_real_grid, parse_size_grid};
use crate::output::{real, write_records, write_summary};
use crate::parallel;

#[derive(Debug, Parser)]
#[command(name = "isingcw", version, about = "Partition functions and interventions for binary Ising models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print log Z and Z of a model file.
    Partition {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        method: PartitionMethod,
        /// Largest node count the exact engines will enumerate.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Worker threads for exact enumeration (0: all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Clamp nodes and print the conditional normaliser.
    Intervene {
        model: PathBuf,
        /// Clamped values, e.g. `2=1,7=0`.
        #[arg(long, default_value = "")]
        set: InterventionSpec,
        /// `exact` or `cw` (Curie-Weiss clique product).
        #[arg(long, default_value = "exact")]
        method: InferenceMethod,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value = "free-edges")]
        theta1_rule: Theta1Rule,
        /// Also print P(x_i = 1) for every free node.
        #[arg(long)]
        marginals: bool,
    },
    /// Rank single-node interventions by their effect on the other nodes.
    Rank {
        model: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        value: u8,
        /// `l1` or `esum`.
        #[arg(long, default_value = "l1")]
        metric: ImpactMetric,
        #[arg(long, default_value = "exact")]
        method: InferenceMethod,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Monte Carlo error of the Curie-Weiss normaliser at averaged parameters.
    Simulate {
        #[arg(long, default_value = "10:100:10")]
        k_grid: String,
        #[arg(long, default_value = "1:10:1")]
        sigma_grid: String,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = SimulationConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta0: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        theta1: f64,
        /// Neighbour count in the Curie-Weiss sum: a number, or `clique` for k-1.
        #[arg(long, default_value = "2")]
        nu: String,
        /// `gaussian` or `bounded`.
        #[arg(long, default_value = "gaussian")]
        family: ParamFamily,
        /// Compare against exact enumeration of the sampled clique (k <= cap).
        #[arg(long)]
        exact_reference: bool,
        #[arg(long, default_value_t = 18)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// CSV destination; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-(k, sigma) summary CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Empirical coverage of the Hoeffding deviation for the mean interaction.
    Hoeffding {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = SimulationConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value = "bounded")]
        family: ParamFamily,
    },
    /// List the maximal cliques of an edge-list graph.
    Cliques { edgelist: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartitionMethod {
    Exact,
    Inner,
    Pairwise,
    /// Curie-Weiss normaliser per maximal clique, multiplied.
    CurieWeiss,
    /// Exact normaliser per maximal clique, multiplied.
    CliqueProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theta1Rule {
    FreeEdges,
    AllCliqueEdges,
}

impl From<Theta1Rule> for ThetaOneRule {
    fn from(r: Theta1Rule) -> Self {
        match r {
            Theta1Rule::FreeEdges => ThetaOneRule::FreeEdges,
            Theta1Rule::AllCliqueEdges => ThetaOneRule::AllCliqueEdges,
        }
    }
}

fn estimate_line(tag: &str, e: &PartitionEstimate) -> String {
    format!("method={tag} logZ={} Z={}", real(e.log_value), real(e.value()))
}

fn join(nodes: &[usize]) -> String {
    nodes.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn parse_nu(text: &str) -> Result<NuRule, AppError> {
    if text == "clique" {
        return Ok(NuRule::CliqueDegree);
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite() && *v >= 0.0)
        .map(NuRule::Fixed)
        .ok_or_else(|| AppError::Usage(format!("--nu {text:?}: expected a non-negative number or `clique`")))
}

fn create(path: &Path) -> Result<BufWriter<File>, AppError> {
    File::create(path).map(BufWriter::new).map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), AppError> {
    match command {
        Command::Partition { model, method, cap, threads } => {
            let m = read_model(&model)?;
            let line = match method {
                PartitionMethod::Exact => estimate_line("exact", &parallel::exact_partition(&m, cap, threads)?),
                PartitionMethod::Inner => estimate_line("inner", &inner_approximation(&m)),
                PartitionMethod::Pairwise => estimate_line("pairwise", &pairwise_product(&m)),
                PartitionMethod::CurieWeiss | PartitionMethod::CliqueProduct => {
                    let (per_clique, tag) = match method {
                        PartitionMethod::CurieWeiss => (PerCliqueMethod::CurieWeiss, Method::CurieWeiss.tag()),
                        _ => (PerCliqueMethod::Exact, Method::CliqueProduct.tag()),
                    };
                    let asg = CliquePotentialAssignment::new(m.graph());
                    let product = clique_product_partition(
                        &m,
                        &asg,
                        &InterventionSpec::new(),
                        per_clique,
                        ThetaOneRule::FreeEdges,
                        cap,
                    )?;
                    estimate_line(tag, &product.estimate)
                }
            };
            writeln!(out, "{line}")?;
        }
        Command::Intervene { model, set, method, cap, theta1_rule, marginals: show_marginals } => {
            let m = read_model(&model)?;
            set.validate(m.node_count())?;
            let inference = Inference { method, cap, rule: theta1_rule.into() };
            let normalizer = conditional_normalizer(&m, &set, inference)?;
            writeln!(out, "{}", estimate_line(method.tag(), &normalizer))?;
            if method == InferenceMethod::CurieWeiss {
                let asg = CliquePotentialAssignment::new(m.graph());
                let product =
                    clique_product_partition(&m, &asg, &set, PerCliqueMethod::CurieWeiss, inference.rule, cap)?;
                for f in &product.factors {
                    writeln!(
                        out,
                        "clique nodes={} free={} logZ={} Z={}",
                        join(&f.clique),
                        join(&f.free),
                        real(f.log_value),
                        real(f.log_value.exp())
                    )?;
                }
            }
            if show_marginals {
                for (node, p) in marginals(&m, &set, inference)?.entries {
                    writeln!(out, "marginal node={node} p={}", real(p))?;
                }
            }
        }
        Command::Rank { model, value, metric, method, cap } => {
            let m = read_model(&model)?;
            let ranking = rank_interventions(&m, value == 1, metric, Inference { cap, ..method.into() })?;
            for (r, e) in ranking.entries.iter().enumerate() {
                writeln!(out, "rank={} node={} value={} impact={}", r + 1, e.node, u8::from(e.value), real(e.impact))?;
            }
        }
        Command::Simulate {
            k_grid,
            sigma_grid,
            reps,
            seed,
            theta0,
            theta1,
            nu,
            family,
            exact_reference,
            cap,
            threads,
            out: out_path,
            summary,
        } => {
            let cfg = SimulationConfig {
                clique_sizes: parse_size_grid(&k_grid)?,
                sigmas: parse_real_grid(&sigma_grid)?,
                reps,
                theta0,
                theta1,
                seed,
                family,
                nu: parse_nu(&nu)?,
                ..SimulationConfig::default()
            };
            cfg.validate()?;
            // open outputs before the run so an unwritable path fails fast
            let mut record_sink = out_path.as_deref().map(create).transpose()?;
            let mut summary_sink = summary.as_deref().map(create).transpose()?;
            let records = if exact_reference {
                parallel::small_k_exact_comparison(&cfg, cap, threads)?
            } else {
                parallel::error_experiment(&cfg, threads)?
            };
            match record_sink.as_mut() {
                Some(w) => write_records(&records, w)?,
                None => write_records(&records, &mut *out)?,
            }
            if let Some(w) = summary_sink.as_mut() {
                write_summary(&summarize(&records), w)?;
            }
        }
        Command::Hoeffding { k, sigma, delta, reps, seed, family } => {
            if !(sigma.is_finite() && sigma >= 0.0) {
                return Err(AppError::Usage("--sigma must be finite and non-negative".into()));
            }
            let report = hoeffding_check(k, sigma, delta, reps, family, &mut replication_rng(seed, 0, 0, 0))?;
            writeln!(
                out,
                "k={} sigma={} delta={} family={} t={} violations={} reps={} rate={} limit={} pass={}",
                report.k,
                real(report.sigma),
                real(report.delta),
                family.tag(),
                real(report.t_bound),
                report.violations,
                report.n_reps,
                real(report.empirical_violation_rate),
                real(report.delta + report.slack()),
                report.passes()
            )?;
        }
        Command::Cliques { edgelist } => {
            let g = read_edge_list(&edgelist)?;
            for (c, nodes) in g.maximal_cliques().iter().enumerate() {
                writeln!(out, "clique={c} nodes={}", join(nodes))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
/// Diagnostics go to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(io::stderr(), "isingcw: {e}");
            e.exit_code()
        }
    }
}
