//! Command-line interface: parameter inference, ensemble sampling,
//! CPU-time benchmarking, metric reports, and the bias demonstration.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 solver
//! non-convergence.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fastcm::harness::{
    demo_bias, run_bench, run_infer, run_metrics, run_sample, write_bench_csv, BenchConfig,
    BenchMethod, DemoBiasConfig, ModelKind, RunConfig, SamplerKind,
};
use fastcm::inference::SolverOptions;
use fastcm::io::write_params;
use fastcm::Error;

#[derive(Parser)]
#[command(
    name = "fastcm",
    version,
    about = "Fast unbiased sampling of maximum-entropy configuration models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Convergence tolerance (max-norm relative residual)
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Iteration budget for the solver
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Update damping in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    damping: f64,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            max_iterations: self.max_iter,
            tolerance: self.tol,
            damping: self.damping,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit UBCM/UECM multipliers to a network or to target sequences
    Infer {
        /// Edge-list input; degrees (and strengths) are its realized values
        #[arg(long)]
        input: Option<PathBuf>,
        /// Treat the input edge list as weighted
        #[arg(long)]
        weighted: bool,
        /// Degree-sequence file (one value per line) instead of --input
        #[arg(long)]
        degrees: Option<PathBuf>,
        /// Strength-sequence file (with --degrees, for uecm)
        #[arg(long)]
        strengths: Option<PathBuf>,
        /// Model to fit: ubcm | uecm
        #[arg(long)]
        model: String,
        /// Output parameter file (node,alpha[,beta])
        #[arg(long)]
        output: PathBuf,
        /// Optional fit-report JSON
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Generate an ensemble of sampled networks
    Sample {
        /// Model: ubcm | uecm | chung-lu | chung-lu-stub
        #[arg(long)]
        model: String,
        /// Sampler: fast | bruteforce
        #[arg(long, default_value = "fast")]
        sampler: String,
        /// Number of samples
        #[arg(short = 'n', long, default_value_t = 1)]
        ensemble: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker pool size (0 = number of available processors)
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Fitted parameter file (node,alpha[,beta])
        #[arg(long)]
        params: Option<PathBuf>,
        /// Edge-list input; parameters are inferred on the fly
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        weighted: bool,
        /// Degree-sequence file
        #[arg(long)]
        degrees: Option<PathBuf>,
        /// Strength-sequence file
        #[arg(long)]
        strengths: Option<PathBuf>,
        /// Output directory (one file per sample plus manifest.json)
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Time fast vs. brute-force sampling on uniform fitted instances
    Bench {
        /// Comma-separated node counts, e.g. 1000,10000
        #[arg(long, value_delimiter = ',', default_value = "1000,10000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10.0)]
        mean_degree: f64,
        #[arg(long, default_value_t = 20.0)]
        mean_strength: f64,
        /// Timed runs per method per size
        #[arg(long, default_value_t = 40)]
        runs: usize,
        /// Comma-separated methods (default: all)
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV (method,n_nodes,n_edges,run_index,cpu_seconds,seed)
        #[arg(long)]
        output: PathBuf,
    },
    /// Compute per-sample metrics for a sample directory
    Metrics {
        /// Directory produced by `sample` (contains manifest.json)
        #[arg(long)]
        samples_dir: PathBuf,
        /// Reference edge list for degrees and rich-club groups
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        weighted: bool,
        /// Comma-separated rich-club levels in (0, 1]
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
        alphas: Vec<f64>,
        /// Output CSV
        #[arg(long)]
        output: PathBuf,
    },
    /// End-to-end bias demonstration: Holme-Kim -> UBCM fit -> Chung-Lu
    /// vs. UBCM ensembles -> rich-club and triangle CSVs
    DemoBias {
        #[arg(long, default_value_t = 5000)]
        nodes: usize,
        #[arg(long, default_value_t = 10)]
        edges_per_node: usize,
        #[arg(long, default_value_t = 0.1)]
        triad_prob: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.001,0.002,0.005,0.01,0.02,0.05,0.1"
        )]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Lib(e @ Error::NonConvergence { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Infer {
            input,
            weighted,
            degrees,
            strengths,
            model,
            output,
            report,
            solver,
        } => {
            let model: ModelKind = model.parse().map_err(|e: Error| usage(e.to_string()))?;
            if !matches!(model, ModelKind::Ubcm | ModelKind::Uecm) {
                return Err(usage("infer supports --model ubcm or uecm"));
            }
            if input.is_none() && degrees.is_none() {
                return Err(usage("pass --input or --degrees"));
            }
            let (params, fit) = run_infer(
                model,
                input.as_deref(),
                weighted,
                degrees.as_deref(),
                strengths.as_deref(),
                &solver.options(),
            )?;
            write_params(&params, &output)?;
            if let Some(rp) = &report {
                let out = BufWriter::new(File::create(rp).map_err(Error::from)?);
                serde_json::to_writer_pretty(out, &fit)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            }
            eprintln!(
                "fit: converged={} iterations={} residual={:.3e}",
                fit.converged, fit.iterations, fit.residual
            );
            if !fit.converged {
                return Err(CliError::Lib(Error::NonConvergence {
                    residual: fit.residual,
                    iterations: fit.iterations,
                }));
            }
            Ok(())
        }
        Cmd::Sample {
            model,
            sampler,
            ensemble,
            seed,
            threads,
            params,
            input,
            weighted,
            degrees,
            strengths,
            out_dir,
            solver,
        } => {
            let model: ModelKind = model.parse().map_err(|e: Error| usage(e.to_string()))?;
            let sampler: SamplerKind =
                sampler.parse().map_err(|e: Error| usage(e.to_string()))?;
            if params.is_none() && input.is_none() && degrees.is_none() {
                return Err(usage("pass --params, --input, or --degrees"));
            }
            if params.is_some() && !matches!(model, ModelKind::Ubcm | ModelKind::Uecm) {
                return Err(usage("--params applies to the ubcm and uecm models"));
            }
            if model == ModelKind::ChungLuStub && sampler == SamplerKind::Bruteforce {
                return Err(usage("chung-lu-stub has a single algorithm; use --sampler fast"));
            }
            let cfg = RunConfig {
                model,
                sampler,
                ensemble,
                seed,
                threads,
                params,
                input,
                weighted_input: weighted,
                degrees,
                strengths,
                out_dir,
                levels: vec![0.1],
                solver: solver.options(),
            };
            let manifest = run_sample(&cfg)?;
            eprintln!(
                "wrote {} sample(s) to {}",
                manifest.files.len(),
                cfg.out_dir.display()
            );
            Ok(())
        }
        Cmd::Bench {
            sizes,
            mean_degree,
            mean_strength,
            runs,
            methods,
            seed,
            output,
        } => {
            if sizes.is_empty() {
                return Err(usage("pass at least one size"));
            }
            let methods = if methods.is_empty() {
                BenchMethod::ALL.to_vec()
            } else {
                methods
                    .iter()
                    .map(|m| m.parse::<BenchMethod>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| usage(e.to_string()))?
            };
            let cfg = BenchConfig {
                sizes,
                mean_degree,
                mean_strength,
                runs,
                seed,
                methods,
            };
            let rows = run_bench(&cfg)?;
            write_bench_csv(&rows, &output)?;
            eprintln!("wrote {} bench rows to {}", rows.len(), output.display());
            Ok(())
        }
        Cmd::Metrics {
            samples_dir,
            reference,
            weighted,
            alphas,
            output,
        } => {
            run_metrics(&samples_dir, &reference, weighted, &alphas, &output)?;
            eprintln!("wrote metrics to {}", output.display());
            Ok(())
        }
        Cmd::DemoBias {
            nodes,
            edges_per_node,
            triad_prob,
            samples,
            seed,
            alphas,
            threads,
            out_dir,
            solver,
        } => {
            let cfg = DemoBiasConfig {
                nodes,
                edges_per_node,
                triad_prob,
                samples,
                seed,
                levels: alphas,
                threads,
                solver: solver.options(),
            };
            let result = demo_bias(&cfg, Some(&out_dir))?;
            eprintln!(
                "holme-kim: {} edges, {} triangles; ensembles written to {}",
                result.hk_edges,
                result.hk_triangles,
                out_dir.display()
            );
            Ok(())
        }
    }
}
