//! `sbvqe`: batch runner for variational ground-state experiments.
//!
//! Subcommands map one-to-one onto the drivers in [`sbvqe::runner`]; every
//! flag overrides the corresponding key of the optional `--config` file.
//! Exit codes: 0 when every requested run completed, 1 on structural errors
//! (bad flags, unreadable files, invalid checkpoints), 2 when the batch ran
//! but some replicas failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sbvqe::runner::{self, ExactMethod};
use sbvqe::{ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "sbvqe", version, about = "Variational ground-state experiments on spin chains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimize the model energy over an (n, depth) grid with replicas.
    Solve(RunArgs),
    /// Warm-start deeper circuits from a converged checkpoint.
    Transfer(TransferArgs),
    /// Cluster-model runs with parity penalties steering the ground-state
    /// sector.
    Penalty(PenaltyArgs),
    /// The 2x2 grid of Fisher variant x init strategy, each cell a full
    /// solve run.
    SweepSetups(RunArgs),
    /// Print the exact ground energy as JSON.
    Exact(ExactArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// TOML config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model: tfi, tfc, or cluster.
    #[arg(long)]
    model: Option<String>,
    /// System sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Transverse field strength.
    #[arg(long)]
    h: Option<f64>,
    /// Block repetition counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    depth: Option<Vec<usize>>,
    /// Ansatz family: qaoa, sb, or bare.
    #[arg(long)]
    ansatz: Option<String>,
    /// Init strategy, optionally with sigma: "normal", "sboffset:0.001".
    #[arg(long)]
    init: Option<String>,
    /// Fisher matrix variant: centered or uncentered.
    #[arg(long)]
    fisher: Option<String>,
    /// Learning rate.
    #[arg(long)]
    eta: Option<f64>,
    /// Epoch budget per replica.
    #[arg(long)]
    epochs: Option<usize>,
    /// Initial Fisher damping.
    #[arg(long)]
    lambda0: Option<f64>,
    /// Per-epoch damping decay factor.
    #[arg(long)]
    lambda_decay: Option<f64>,
    /// Damping floor.
    #[arg(long)]
    lambda_floor: Option<f64>,
    /// Independent replicas per cell (replica k uses seed + k).
    #[arg(long)]
    replicas: Option<usize>,
    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Concurrent replicas (0 = one per core).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print CSV column documentation and exit.
    #[arg(long)]
    gnuplot_hints: bool,
}

#[derive(Args)]
struct TransferArgs {
    /// Source checkpoint (defines model, size, and ansatz).
    #[arg(long)]
    from: PathBuf,
    /// Number of depth increments to chain.
    #[arg(long)]
    steps: Option<usize>,
    /// Std dev of the post-insertion perturbation on every angle.
    #[arg(long)]
    perturb: Option<f64>,
    /// Std dev of the fresh block's angles (0 = identity block).
    #[arg(long)]
    new_block_sigma: Option<f64>,
    /// Where to splice the block: floor or ceil (of the circuit middle).
    #[arg(long)]
    insert_position: Option<String>,
    #[command(flatten)]
    common: RunArgs,
}

#[derive(Args)]
struct PenaltyArgs {
    /// Parity penalty weights "alpha1,alpha2".
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[command(flatten)]
    common: RunArgs,
}

#[derive(Args)]
struct ExactArgs {
    /// Model: tfi, tfc, or cluster.
    #[arg(long, default_value = "tfi")]
    model: String,
    /// System size.
    #[arg(long)]
    n: usize,
    /// Transverse field strength.
    #[arg(long)]
    h: Option<f64>,
    /// Solver: auto, dense, or lanczos.
    #[arg(long, default_value = "auto")]
    method: String,
}

fn overrides_from(args: &RunArgs) -> Overrides {
    Overrides {
        model: args.model.clone(),
        n: args.n.clone(),
        h: args.h,
        ansatz: args.ansatz.clone(),
        depth: args.depth.clone(),
        init: args.init.clone(),
        fisher: args.fisher.clone(),
        eta: args.eta,
        lambda0: args.lambda0,
        lambda_decay: args.lambda_decay,
        lambda_floor: args.lambda_floor,
        epochs: args.epochs,
        replicas: args.replicas,
        seed: args.seed,
        jobs: args.jobs,
        out: args.out.clone(),
        ..Overrides::default()
    }
}

fn load_config(args: &RunArgs, extra: Overrides) -> sbvqe::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(args.config.as_deref(), &overrides_from(args))?;
    cfg.apply(&extra)?;
    Ok(cfg)
}

fn print_summaries(summaries: &[sbvqe::SummaryRow]) {
    for s in summaries {
        let best = match (s.best_e_tilde, s.best_seed) {
            (Some(e), Some(seed)) => format!("best normalized error {e:.3e} (seed {seed})"),
            _ => "no completed replica".to_string(),
        };
        println!(
            "{} {} n={} d={}: {}/{} completed, e_gs={:.12}, {}",
            s.model, s.ansatz, s.n, s.depth, s.completed, s.replicas, s.e_gs, best
        );
    }
}

fn batch_code(all_completed: bool) -> ExitCode {
    if all_completed {
        ExitCode::SUCCESS
    } else {
        eprintln!("some replicas failed; see summary.json");
        ExitCode::from(2)
    }
}

fn run(cli: Cli) -> sbvqe::Result<ExitCode> {
    match cli.cmd {
        Cmd::Solve(args) => {
            if args.gnuplot_hints {
                print!("{}", runner::gnuplot_hints());
                return Ok(ExitCode::SUCCESS);
            }
            let cfg = load_config(&args, Overrides::default())?;
            let report = runner::run_solve(&cfg)?;
            print_summaries(&report.summaries);
            println!("artifacts in {}", report.out_dir.display());
            Ok(batch_code(report.all_completed()))
        }
        Cmd::Transfer(args) => {
            if args.common.gnuplot_hints {
                print!("{}", runner::gnuplot_hints());
                return Ok(ExitCode::SUCCESS);
            }
            let extra = Overrides {
                steps: args.steps,
                perturb: args.perturb,
                new_block_sigma: args.new_block_sigma,
                insert_position: args.insert_position.clone(),
                ..Overrides::default()
            };
            let cfg = load_config(&args.common, extra)?;
            let report = runner::run_transfer(&cfg, &args.from)?;
            for step in &report.steps {
                println!(
                    "step {} (depth {}): source {} at normalized error {:.3e}",
                    step.step, step.depth, step.source_id, step.source_e_tilde
                );
                print_summaries(std::slice::from_ref(&step.summary));
            }
            println!("artifacts in {}", report.out_dir.display());
            Ok(batch_code(report.all_completed()))
        }
        Cmd::Penalty(args) => {
            if args.common.gnuplot_hints {
                print!("{}", runner::gnuplot_hints());
                return Ok(ExitCode::SUCCESS);
            }
            let extra = Overrides {
                alpha: args.alpha.clone(),
                // Penalty runs are cluster-model runs; fill the model in
                // unless the user pinned one explicitly.
                model: args.common.model.clone().or(Some("cluster".into())),
                ..Overrides::default()
            };
            let cfg = load_config(&args.common, extra)?;
            let report = runner::run_penalty(&cfg)?;
            print_summaries(&report.summaries);
            println!("artifacts in {}", report.out_dir.display());
            Ok(batch_code(report.all_completed()))
        }
        Cmd::SweepSetups(args) => {
            if args.gnuplot_hints {
                print!("{}", runner::gnuplot_hints());
                return Ok(ExitCode::SUCCESS);
            }
            let cfg = load_config(&args, Overrides::default())?;
            let grid = runner::run_sweep_setups(&cfg)?;
            let mut ok = true;
            for cell in &grid {
                println!("--- fisher={} init={}", cell.fisher, cell.init);
                print_summaries(&cell.report.summaries);
                ok &= cell.report.all_completed();
            }
            println!("artifacts in {}", cfg.run.out.display());
            Ok(batch_code(ok))
        }
        Cmd::Exact(args) => {
            let mut cfg = ExperimentConfig::default();
            cfg.apply(&Overrides {
                model: Some(args.model.clone()),
                n: Some(vec![args.n]),
                h: args.h,
                ..Overrides::default()
            })?;
            let spec = cfg.model_spec(args.n)?;
            let method = match args.method.as_str() {
                "auto" => ExactMethod::Auto,
                "dense" => ExactMethod::Dense,
                "lanczos" => ExactMethod::Lanczos,
                other => {
                    return Err(sbvqe::Error::config(format!(
                        "unknown method {other:?} (expected auto, dense, or lanczos)"
                    )))
                }
            };
            let report = runner::run_exact(&spec, method)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
