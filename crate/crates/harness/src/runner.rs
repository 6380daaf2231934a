//! Batch drivers behind the CLI subcommands.
//!
//! Every driver follows the same shape: expand the configuration into cells
//! (one per system size and depth), run the cell's replicas concurrently on
//! a rayon pool, then join and write artifacts sequentially in a fixed
//! order. Replica k always uses seed `base_seed + k` and owns all of its
//! state, so results are independent of thread count and reruns are
//! byte-identical.
//!
//! Output layout under the configured directory:
//!
//! ```text
//! effective_config.toml        merged config actually used
//! summary.csv / summary.json   one row per cell (transfer: per step)
//! runs/<cell>/replica_XX.csv   learning curve per replica
//! runs/<cell>/replica_XX.checkpoint.json
//! ```
//!
//! A replica that stops by stagnation or by exhausting its epoch budget is
//! a completion; one that aborts on a non-finite evaluation or an internal
//! error is recorded and skipped by the summary, and the report's
//! `all_completed` turns false.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sbvqe_core::ansatz::{init_params, insert_block_at, AnsatzSpec};
use sbvqe_core::exact::{dense_ground, lanczos_ground, normalized_energy, GroundTruth, SolveMethod};
use sbvqe_core::hamiltonians::ModelSpec;
use sbvqe_core::optimizer::{minimize, penalty_objective, ExitReason, RunRecord};
use sbvqe_core::pauli::{PauliString, PauliSum};

use crate::checkpoint::Checkpoint;
use crate::config::{AnsatzFamily, ExperimentConfig};
use crate::error::{Error, Result};

/// Largest register solved densely when computing reference energies;
/// larger systems go through Lanczos.
pub const DENSE_REFERENCE_MAX_QUBITS: usize = 10;
const REFERENCE_LANCZOS_TOL: f64 = 1e-12;
const REFERENCE_LANCZOS_MAX_ITER: usize = 500;

/// Ground-state reference for normalizing energies: dense for small
/// registers (which also reports degeneracy), Lanczos beyond.
pub fn reference_ground(model: &ModelSpec) -> Result<GroundTruth> {
    let h = model.hamiltonian()?;
    if model.n_qubits() <= DENSE_REFERENCE_MAX_QUBITS {
        Ok(dense_ground(&h)?)
    } else {
        Ok(lanczos_ground(
            &h,
            REFERENCE_LANCZOS_TOL,
            REFERENCE_LANCZOS_MAX_ITER,
        )?)
    }
}

/// One finished (or failed) replica.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveRow {
    pub model: String,
    pub ansatz: String,
    pub n: usize,
    pub depth: usize,
    pub h: f64,
    pub replica: usize,
    pub seed: u64,
    pub epochs: usize,
    /// "stagnated", "epoch_budget", "aborted: ...", or "error: ...".
    pub exit: String,
    /// Stagnation and epoch-budget exits both count as completions.
    pub completed: bool,
    pub final_objective: f64,
    pub final_energy: f64,
    /// Relative error against the reference ground energy.
    pub e_tilde: f64,
    /// Final tracked parity expectations, in model order.
    pub final_parities: Vec<f64>,
    /// Checkpoint path relative to the output directory (completed runs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
    /// Id of the warm-start source checkpoint (transfer runs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Per-cell summary: the best completed replica and the reference it was
/// normalized against.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    pub ansatz: String,
    pub n: usize,
    pub depth: usize,
    pub h: f64,
    pub replicas: usize,
    pub completed: usize,
    pub e_gs: f64,
    pub gs_method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gs_degeneracy: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_e_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_replica: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub rows: Vec<SolveRow>,
    pub summaries: Vec<SummaryRow>,
    pub out_dir: PathBuf,
}

impl SolveReport {
    pub fn all_completed(&self) -> bool {
        self.rows.iter().all(|r| r.completed)
    }

    /// Rows belonging to one (n, depth) cell.
    pub fn cell_rows(&self, n: usize, depth: usize) -> Vec<&SolveRow> {
        self.rows.iter().filter(|r| r.n == n && r.depth == depth).collect()
    }

    pub fn summary_for(&self, n: usize, depth: usize) -> Option<&SummaryRow> {
        self.summaries.iter().find(|s| s.n == n && s.depth == depth)
    }
}

/// One depth increment of a transfer chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferStep {
    pub step: usize,
    pub depth: usize,
    pub source_id: String,
    pub source_energy: f64,
    pub source_e_tilde: f64,
    pub rows: Vec<SolveRow>,
    pub summary: SummaryRow,
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub steps: Vec<TransferStep>,
    pub out_dir: PathBuf,
}

impl TransferReport {
    pub fn all_completed(&self) -> bool {
        self.steps.iter().all(|s| s.rows.iter().all(|r| r.completed))
    }
}

/// One cell of the Fisher-variant x init-strategy grid.
#[derive(Debug)]
pub struct SetupCell {
    pub fisher: String,
    pub init: String,
    pub report: SolveReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactMethod {
    /// Dense up to [`DENSE_REFERENCE_MAX_QUBITS`], Lanczos beyond.
    Auto,
    Dense,
    Lanczos,
}

/// Ground-state query result, printed as JSON by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactReport {
    pub model: String,
    pub n: usize,
    pub h: f64,
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<usize>,
    pub method: String,
}

pub fn run_exact(model: &ModelSpec, method: ExactMethod) -> Result<ExactReport> {
    let truth = match method {
        ExactMethod::Auto => reference_ground(model)?,
        ExactMethod::Dense => dense_ground(&model.hamiltonian()?)?,
        ExactMethod::Lanczos => lanczos_ground(
            &model.hamiltonian()?,
            REFERENCE_LANCZOS_TOL,
            REFERENCE_LANCZOS_MAX_ITER,
        )?,
    };
    Ok(ExactReport {
        model: model.model().name().to_string(),
        n: model.n_qubits(),
        h: model.h(),
        energy: truth.energy,
        degeneracy: truth.degeneracy,
        method: method_name(truth.method).to_string(),
    })
}

/// Column documentation for plotting the CSV outputs externally.
pub fn gnuplot_hints() -> &'static str {
    "Learning curve CSV (runs/<cell>/replica_XX.csv), one row per epoch:\n\
     \x20 1 epoch       0-based optimization epoch\n\
     \x20 2 objective   expectation of the optimization objective\n\
     \x20 3 energy      bare model energy (equals objective unless penalized)\n\
     \x20 4 grad_norm   Euclidean norm of the objective gradient\n\
     \x20 5 p1          first tracked parity expectation (empty when untracked)\n\
     \x20 6 p2          second tracked parity expectation (empty when untracked)\n\
     Summary CSV (summary.csv), one row per cell:\n\
     \x20 model,ansatz,n,depth,h,replicas,completed,e_gs,best_energy,best_e_tilde,best_seed\n\
     \x20 best_* describe the completed replica with the lowest final energy.\n\
     Example: plot 'replica_00.csv' using 1:3 with lines\n"
}

/// Plain energy minimization over the configured (n, depth) grid.
pub fn run_solve(cfg: &ExperimentConfig) -> Result<SolveReport> {
    let cells = plan_cells(cfg, false)?;
    run_cells(cfg, "solve", cells)
}

/// Penalized minimization on the cluster model: the objective gains
/// `alpha1 P1 + alpha2 P2`, parities are tracked per epoch, and energies are
/// reported (and normalized) against the bare Hamiltonian.
pub fn run_penalty(cfg: &ExperimentConfig) -> Result<SolveReport> {
    if cfg.model()? != sbvqe_core::hamiltonians::Model::ClusterOpen {
        return Err(Error::config(format!(
            "penalty runs require the cluster model, got {}",
            cfg.model.name
        )));
    }
    let cells = plan_cells(cfg, true)?;
    run_cells(cfg, "penalty", cells)
}

/// The 2x2 grid {centered, uncentered} x {normal, sboffset} over the
/// configured (n, depth) cells; each grid cell is a full solve run in its
/// own subdirectory.
pub fn run_sweep_setups(cfg: &ExperimentConfig) -> Result<Vec<SetupCell>> {
    cfg.validate_common()?;
    let out = cfg.run.out.clone();
    ensure_dir(&out)?;
    write_text(&out.join("effective_config.toml"), &cfg.to_toml()?)?;

    let mut grid = Vec::new();
    for fisher in ["centered", "uncentered"] {
        for init in ["normal", "sboffset"] {
            let mut sub = cfg.clone();
            sub.optimizer.fisher = fisher.into();
            sub.init.strategy = init.into();
            sub.run.out = out.join("cells").join(format!("{fisher}_{init}"));
            let report = run_solve(&sub)?;
            grid.push(SetupCell {
                fisher: fisher.into(),
                init: init.into(),
                report,
            });
        }
    }

    let mut csv = String::from(
        "fisher,init,model,ansatz,n,depth,h,replicas,completed,e_gs,best_energy,best_e_tilde,best_seed\n",
    );
    for cell in &grid {
        for s in &cell.report.summaries {
            csv.push_str(&format!(
                "{},{},{}\n",
                cell.fisher,
                cell.init,
                summary_fields(s)
            ));
        }
    }
    write_text(&out.join("grid_summary.csv"), &csv)?;
    Ok(grid)
}

/// Warm-started depth increments. The target model, size, and ansatz come
/// from the source checkpoint; the configuration supplies the optimizer,
/// replica, and insertion settings. Each step inserts a fresh block into the
/// current source, optimizes `replicas` perturbed copies, and promotes the
/// best completed one to be the next source.
pub fn run_transfer(cfg: &ExperimentConfig, from: &Path) -> Result<TransferReport> {
    let opt = cfg.optimizer()?;
    let position = cfg.insert_position()?;
    if cfg.run.replicas == 0 {
        return Err(Error::config("run.replicas must be at least 1"));
    }

    let ckpt = Checkpoint::load(from)?;
    let model = ckpt.model_spec()?;
    let family = ckpt.family()?;
    let reevaluated = ckpt.reevaluate()?;
    if (reevaluated - ckpt.final_energy).abs() > 1e-8 {
        return Err(Error::Checkpoint {
            path: from.to_path_buf(),
            reason: format!(
                "stored final energy {} but parameters evaluate to {reevaluated}",
                ckpt.final_energy
            ),
        });
    }

    let out = cfg.run.out.clone();
    ensure_dir(&out)?;
    write_text(&out.join("effective_config.toml"), &cfg.to_toml()?)?;

    let h = model.hamiltonian()?;
    let tracked = model.parity_ops()?;
    let truth = reference_ground(&model)?;
    let jobs = cfg.run.jobs;

    let mut src_spec = ckpt.ansatz_spec()?;
    let mut src_params = ckpt.params.clone();
    let mut src_id = ckpt.id.clone();
    let mut src_energy = ckpt.final_energy;
    let mut steps = Vec::new();

    for step in 1..=cfg.transfer.steps {
        let src_depth = src_spec.depth();
        let target_depth = src_depth + 1;
        let insert_at = position.position(src_depth);
        let cell_dir = format!(
            "step{step}_{}_{}_n{}_d{target_depth}",
            model.model().name(),
            family.name(),
            model.n_qubits()
        );
        ensure_dir(&out.join(&cell_dir))?;

        let replicas: Vec<usize> = (0..cfg.run.replicas).collect();
        let results: Vec<(u64, std::result::Result<RunRecord, String>)> =
            on_pool(jobs, || {
                replicas
                    .par_iter()
                    .map(|&k| {
                        let seed = cfg.run.seed + k as u64;
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let run = insert_block_at(
                            &src_spec,
                            &src_params,
                            insert_at,
                            cfg.transfer.new_block_sigma,
                            cfg.transfer.perturb_sigma,
                            &mut rng,
                        )
                        .and_then(|(spec, init)| {
                            minimize(&h, &spec, &init, &opt, &tracked, None)
                        })
                        .map_err(|e| e.to_string());
                        (seed, run)
                    })
                    .collect()
            })?;

        let target_spec = family.build(model.model(), model.n_qubits(), target_depth)?;
        let mut rows = Vec::new();
        let mut records: Vec<Option<RunRecord>> = Vec::new();
        for (k, (seed, outcome)) in results.into_iter().enumerate() {
            let (row, record) = assemble_row(
                &model,
                family,
                target_depth,
                k,
                seed,
                outcome,
                truth.energy,
                Some(src_id.clone()),
            )?;
            rows.push(row);
            records.push(record);
        }
        write_replica_files(&out, &cell_dir, &mut rows, &records, &model, family, truth.energy)?;

        let summary = summarize_cell(&rows, &model, family, target_depth, &truth, Some(&src_id));
        let source_e_tilde = normalized_energy(src_energy, truth.energy)?;
        steps.push(TransferStep {
            step,
            depth: target_depth,
            source_id: src_id.clone(),
            source_energy: src_energy,
            source_e_tilde,
            rows,
            summary,
        });

        // Promote the best completed replica to source for the next step.
        let last = steps.last().expect("just pushed");
        let Some(best) = best_row(&last.rows) else {
            break;
        };
        let best_record = records[best.replica]
            .as_ref()
            .expect("completed row keeps its record");
        src_params = best_record.final_params.clone();
        src_spec = target_spec;
        src_id = Checkpoint::new(
            &model,
            family,
            target_depth,
            best.seed,
            best_record,
            truth.energy,
            None,
        )
        .id;
        src_energy = best.final_energy;
    }

    let mut csv = String::from(
        "step,model,ansatz,n,depth,h,replicas,completed,e_gs,best_energy,best_e_tilde,best_seed\n",
    );
    for s in &steps {
        csv.push_str(&format!("{},{}\n", s.step, summary_fields(&s.summary)));
    }
    write_text(&out.join("summary.csv"), &csv)?;

    #[derive(Serialize)]
    struct TransferFile<'a> {
        format_version: u32,
        command: &'a str,
        steps: &'a [TransferStep],
    }
    let json = serde_json::to_string_pretty(&TransferFile {
        format_version: crate::checkpoint::FORMAT_VERSION,
        command: "transfer",
        steps: &steps,
    })?;
    write_text(&out.join("summary.json"), &(json + "\n"))?;

    Ok(TransferReport { steps, out_dir: out })
}

struct CellPlan {
    model: ModelSpec,
    family: AnsatzFamily,
    spec: AnsatzSpec,
    truth: GroundTruth,
    objective: PauliSum,
    energy_obs: Option<PauliSum>,
    tracked: Vec<PauliString>,
    dir: String,
}

fn plan_cells(cfg: &ExperimentConfig, penalized: bool) -> Result<Vec<CellPlan>> {
    cfg.validate_common()?;
    let family = cfg.family()?;
    let mut cells = Vec::new();
    for &n in &cfg.model.n {
        let model = cfg.model_spec(n)?;
        let h = model.hamiltonian()?;
        let truth = reference_ground(&model)?;
        let tracked = model.parity_ops()?;
        let (objective, energy_obs) = if penalized {
            let (a1, a2) = cfg.alphas()?;
            if tracked.len() != 2 {
                return Err(Error::config(format!(
                    "penalty needs two parity operators, model {} has {}",
                    model.model().name(),
                    tracked.len()
                )));
            }
            let penalties = [(a1, tracked[0].clone()), (a2, tracked[1].clone())];
            (penalty_objective(&h, &penalties)?, Some(h))
        } else {
            (h, None)
        };
        for &depth in &cfg.ansatz.depth {
            let spec = cfg.ansatz_spec(n, depth)?;
            cells.push(CellPlan {
                model,
                family,
                spec,
                truth,
                objective: objective.clone(),
                energy_obs: energy_obs.clone(),
                tracked: tracked.clone(),
                dir: format!(
                    "{}_{}_n{n}_d{depth}",
                    model.model().name(),
                    family.name()
                ),
            });
        }
    }
    Ok(cells)
}

fn run_cells(cfg: &ExperimentConfig, command: &str, cells: Vec<CellPlan>) -> Result<SolveReport> {
    let strategy = cfg.init_strategy()?;
    let opt = cfg.optimizer()?;
    let out = cfg.run.out.clone();
    ensure_dir(&out)?;
    ensure_dir(&out.join("runs"))?;
    write_text(&out.join("effective_config.toml"), &cfg.to_toml()?)?;

    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|ci| (0..cfg.run.replicas).map(move |k| (ci, k)))
        .collect();
    let results: Vec<(u64, std::result::Result<RunRecord, String>)> =
        on_pool(cfg.run.jobs, || {
            tasks
                .par_iter()
                .map(|&(ci, k)| {
                    let cell = &cells[ci];
                    let seed = cfg.run.seed + k as u64;
                    let run = init_params(&cell.spec, strategy, seed)
                        .and_then(|init| {
                            minimize(
                                &cell.objective,
                                &cell.spec,
                                &init,
                                &opt,
                                &cell.tracked,
                                cell.energy_obs.as_ref(),
                            )
                        })
                        .map_err(|e| e.to_string());
                    (seed, run)
                })
                .collect()
        })?;

    let mut all_rows = Vec::new();
    let mut summaries = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        ensure_dir(&out.join("runs").join(&cell.dir))?;
        let mut rows = Vec::new();
        let mut records = Vec::new();
        for k in 0..cfg.run.replicas {
            let (seed, outcome) = results[ci * cfg.run.replicas + k].clone();
            let (row, record) = assemble_row(
                &cell.model,
                cell.family,
                cell.spec.depth(),
                k,
                seed,
                outcome,
                cell.truth.energy,
                None,
            )?;
            rows.push(row);
            records.push(record);
        }
        let cell_dir = format!("runs/{}", cell.dir);
        write_replica_files(
            &out,
            &cell_dir,
            &mut rows,
            &records,
            &cell.model,
            cell.family,
            cell.truth.energy,
        )?;
        summaries.push(summarize_cell(
            &rows,
            &cell.model,
            cell.family,
            cell.spec.depth(),
            &cell.truth,
            None,
        ));
        all_rows.extend(rows);
    }

    let mut csv = String::from(
        "model,ansatz,n,depth,h,replicas,completed,e_gs,best_energy,best_e_tilde,best_seed\n",
    );
    for s in &summaries {
        csv.push_str(&summary_fields(s));
        csv.push('\n');
    }
    write_text(&out.join("summary.csv"), &csv)?;

    #[derive(Serialize)]
    struct SummaryFile<'a> {
        format_version: u32,
        command: &'a str,
        summaries: &'a [SummaryRow],
        rows: &'a [SolveRow],
    }
    let json = serde_json::to_string_pretty(&SummaryFile {
        format_version: crate::checkpoint::FORMAT_VERSION,
        command,
        summaries: &summaries,
        rows: &all_rows,
    })?;
    write_text(&out.join("summary.json"), &(json + "\n"))?;

    Ok(SolveReport {
        rows: all_rows,
        summaries,
        out_dir: out,
    })
}

/// Runs `f` on a pool of `jobs` threads (0 = one per core).
fn on_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Folds one replica outcome into a row; completed runs keep their record
/// for checkpointing.
#[allow(clippy::too_many_arguments)]
fn assemble_row(
    model: &ModelSpec,
    family: AnsatzFamily,
    depth: usize,
    replica: usize,
    seed: u64,
    outcome: std::result::Result<RunRecord, String>,
    e_gs: f64,
    source: Option<String>,
) -> Result<(SolveRow, Option<RunRecord>)> {
    let base = SolveRow {
        model: model.model().name().to_string(),
        ansatz: family.name().to_string(),
        n: model.n_qubits(),
        depth,
        h: model.h(),
        replica,
        seed,
        epochs: 0,
        exit: String::new(),
        completed: false,
        final_objective: f64::NAN,
        final_energy: f64::NAN,
        e_tilde: f64::NAN,
        final_parities: Vec::new(),
        checkpoint: None,
        source,
    };
    match outcome {
        Ok(record) => {
            let completed = !matches!(record.exit, ExitReason::Aborted(_));
            let e_tilde = if record.final_energy.is_finite() {
                normalized_energy(record.final_energy, e_gs)?
            } else {
                f64::NAN
            };
            let row = SolveRow {
                epochs: record.n_epochs(),
                exit: exit_name(&record.exit),
                completed,
                final_objective: record.final_objective,
                final_energy: record.final_energy,
                e_tilde,
                final_parities: record
                    .epochs
                    .last()
                    .map(|r| r.parities.clone())
                    .unwrap_or_default(),
                ..base
            };
            Ok((row, Some(record)))
        }
        Err(msg) => {
            let row = SolveRow {
                exit: format!("error: {msg}"),
                ..base
            };
            Ok((row, None))
        }
    }
}

/// Writes curve CSVs for every replica and checkpoints for completed ones,
/// filling each row's `checkpoint` path.
fn write_replica_files(
    out: &Path,
    cell_dir: &str,
    rows: &mut [SolveRow],
    records: &[Option<RunRecord>],
    model: &ModelSpec,
    family: AnsatzFamily,
    e_gs: f64,
) -> Result<()> {
    for (row, record) in rows.iter_mut().zip(records) {
        let Some(record) = record else { continue };
        let curve_rel = format!("{cell_dir}/replica_{:02}.csv", row.replica);
        write_text(&out.join(&curve_rel), &curve_csv(record))?;
        if row.completed {
            let ckpt = Checkpoint::new(
                model,
                family,
                row.depth,
                row.seed,
                record,
                e_gs,
                row.source.clone(),
            );
            let ckpt_rel = format!("{cell_dir}/replica_{:02}.checkpoint.json", row.replica);
            ckpt.save(&out.join(&ckpt_rel))?;
            row.checkpoint = Some(ckpt_rel);
        }
    }
    Ok(())
}

fn summarize_cell(
    rows: &[SolveRow],
    model: &ModelSpec,
    family: AnsatzFamily,
    depth: usize,
    truth: &GroundTruth,
    source: Option<&str>,
) -> SummaryRow {
    let best = best_row(rows);
    SummaryRow {
        model: model.model().name().to_string(),
        ansatz: family.name().to_string(),
        n: model.n_qubits(),
        depth,
        h: model.h(),
        replicas: rows.len(),
        completed: rows.iter().filter(|r| r.completed).count(),
        e_gs: truth.energy,
        gs_method: method_name(truth.method).to_string(),
        gs_degeneracy: truth.degeneracy,
        best_energy: best.map(|r| r.final_energy),
        best_e_tilde: best.map(|r| r.e_tilde),
        best_seed: best.map(|r| r.seed),
        best_replica: best.map(|r| r.replica),
        source: source.map(str::to_string),
    }
}

/// Completed replica with the lowest final energy; ties keep the earliest.
fn best_row(rows: &[SolveRow]) -> Option<&SolveRow> {
    rows.iter()
        .filter(|r| r.completed && r.final_energy.is_finite())
        .min_by(|a, b| {
            a.final_energy
                .partial_cmp(&b.final_energy)
                .expect("finite energies compare")
        })
}

fn exit_name(exit: &ExitReason) -> String {
    match exit {
        ExitReason::Stagnated => "stagnated".into(),
        ExitReason::EpochBudget => "epoch_budget".into(),
        ExitReason::Aborted(msg) => format!("aborted: {msg}"),
    }
}

fn method_name(m: SolveMethod) -> &'static str {
    match m {
        SolveMethod::Dense => "dense",
        SolveMethod::Lanczos => "lanczos",
    }
}

fn curve_csv(record: &RunRecord) -> String {
    let mut out = String::from("epoch,objective,energy,grad_norm,p1,p2\n");
    for row in &record.epochs {
        let p1 = row.parities.first().map(|p| format!("{p}")).unwrap_or_default();
        let p2 = row.parities.get(1).map(|p| format!("{p}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{p1},{p2}\n",
            row.epoch, row.objective, row.energy, row.grad_norm
        ));
    }
    out
}

/// The summary CSV fields shared by every command, comma-joined. Optional
/// fields render as empty cells when the cell had no completed replica.
fn summary_fields(s: &SummaryRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        s.model,
        s.ansatz,
        s.n,
        s.depth,
        s.h,
        s.replicas,
        s.completed,
        s.e_gs,
        opt_field(s.best_energy),
        opt_field(s.best_e_tilde),
        opt_field(s.best_seed),
    )
}

fn opt_field<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn ensure_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
