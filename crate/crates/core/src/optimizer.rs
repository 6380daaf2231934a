//! Quantum natural gradient descent.
//!
//! Each epoch evaluates the objective, its exact gradient, and the Fisher
//! information at the current angles, then updates
//!
//! ```text
//! theta <- theta - eta * (F + lambda_t I)^{-1} grad
//! ```
//!
//! with the damping schedule `lambda_t = max(lambda0 * decay^t, floor)`.
//! Heavy damping early on turns the update into plain gradient descent
//! scaled by 1/lambda; as the damping decays the step approaches the true
//! natural gradient.
//!
//! The loop records one row per epoch and finishes in one of three ways:
//! the objective stagnates over a trailing window, the epoch budget runs
//! out, or a non-finite value aborts the run (kept as a completed-but-failed
//! record rather than an error, so sweeps can continue past a bad replica).
//! The reported final angles are the ones evaluated in the last recorded
//! row, never a stepped-but-unevaluated update, so re-preparing the state
//! from a record reproduces its final energy exactly.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::ansatz::AnsatzSpec;
use crate::derivatives::{evaluate_step, DerivativeMode, FisherMatrix, FisherVariant};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub eta: f64,
    pub lambda0: f64,
    pub lambda_decay: f64,
    pub lambda_floor: f64,
    pub max_epochs: usize,
    /// Trailing window length for the stagnation test.
    pub stop_window: usize,
    /// Stop once the objective's spread over the window drops below this.
    pub stop_tol: f64,
    pub fisher_variant: FisherVariant,
    pub derivative_mode: DerivativeMode,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            eta: 0.01,
            lambda0: 100.0,
            lambda_decay: 0.9,
            lambda_floor: 1e-3,
            max_epochs: 2000,
            stop_window: 50,
            stop_tol: 1e-12,
            fisher_variant: FisherVariant::Centered,
            derivative_mode: DerivativeMode::Auto,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        for (name, v, strict) in [
            ("eta", self.eta, true),
            ("lambda0", self.lambda0, true),
            ("lambda_decay", self.lambda_decay, true),
            ("lambda_floor", self.lambda_floor, true),
            ("stop_tol", self.stop_tol, false),
        ] {
            if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "optimizer parameter {name} = {v} out of range"
                )));
            }
        }
        if self.lambda_decay > 1.0 {
            return Err(Error::InvalidArgument(
                "lambda_decay above 1 would grow the damping".into(),
            ));
        }
        if self.max_epochs == 0 || self.stop_window < 2 {
            return Err(Error::InvalidArgument(
                "need max_epochs >= 1 and stop_window >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// `max(lambda0 * decay^t, floor)`.
pub fn lambda_schedule(cfg: &OptimizerConfig, epoch: usize) -> f64 {
    (cfg.lambda0 * cfg.lambda_decay.powi(epoch as i32)).max(cfg.lambda_floor)
}

/// One damped natural-gradient update. Solves `(F + lambda I) x = g` by
/// Cholesky with iterative refinement (SVD least squares as fallback) and
/// returns `theta - eta x`. A zero gradient short-circuits to unchanged
/// parameters.
pub fn natural_gradient_step(
    params: &[f64],
    gradient: &[f64],
    fisher: &FisherMatrix,
    eta: f64,
    lambda: f64,
) -> Result<Vec<f64>> {
    let p = params.len();
    if gradient.len() != p || fisher.dim() != p {
        return Err(Error::InvalidArgument(format!(
            "mismatched step dimensions: {} params, {} gradient, {} fisher",
            p,
            gradient.len(),
            fisher.dim()
        )));
    }
    if !(lambda > 0.0) || !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step needs positive eta and lambda, got eta={eta}, lambda={lambda}"
        )));
    }
    let gnorm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
    if gnorm == 0.0 {
        return Ok(params.to_vec());
    }
    let mut a = fisher.matrix().clone();
    for i in 0..p {
        a[(i, i)] += lambda;
    }
    let g = DVector::from_column_slice(gradient);
    let x = solve_spd(&a, &g, gnorm)?;
    Ok(params
        .iter()
        .zip(x.iter())
        .map(|(&th, &xi)| th - eta * xi)
        .collect())
}

/// Solve `A x = g` for symmetric positive definite `A`, refining until the
/// residual is far below the gradient scale. With `lambda > 0` the matrix
/// is definite and Cholesky succeeds; the SVD branch only exists to catch
/// pathological conditioning.
fn solve_spd(a: &DMatrix<f64>, g: &DVector<f64>, gnorm: f64) -> Result<DVector<f64>> {
    let target = 1e-10 * gnorm;
    let refine = |mut x: DVector<f64>, solve: &dyn Fn(&DVector<f64>) -> Option<DVector<f64>>| {
        for _ in 0..4 {
            let r = g - a * &x;
            if r.norm() <= target {
                break;
            }
            match solve(&r) {
                Some(dx) => x += dx,
                None => break,
            }
        }
        x
    };
    let mut best: Option<DVector<f64>> = None;
    if let Some(chol) = Cholesky::new(a.clone()) {
        let x = refine(chol.solve(g), &|r| Some(chol.solve(r)));
        best = Some(x);
    }
    let residual = |x: &DVector<f64>| (g - a * x).norm();
    if let Some(x) = &best {
        if residual(x) <= target {
            return Ok(best.unwrap());
        }
    }
    let svd = a.clone().svd(true, true);
    let eps = f64::EPSILON * a.nrows() as f64;
    if let Ok(x0) = svd.solve(g, eps) {
        let x = refine(x0, &|r| svd.solve(r, eps).ok());
        // accept the backward-stable optimum even if the fixed target was
        // out of reach for this conditioning
        let floor = 64.0 * f64::EPSILON * (a.norm() * x.norm() + gnorm);
        if residual(&x) <= target.max(floor) {
            return Ok(x);
        }
        return Err(Error::SolveFailed(format!(
            "residual {:.3e} above target {:.3e}",
            residual(&x),
            target
        )));
    }
    Err(Error::SolveFailed("SVD solve failed".into()))
}

/// `H + sum_k alpha_k P_k`: the optimization objective that steers the
/// search into the parity sector where each tracked `P_k` is opposite in
/// sign to its (positive) weight.
pub fn penalty_objective(h: &PauliSum, penalties: &[(f64, PauliString)]) -> Result<PauliSum> {
    let n = h.n_qubits();
    let terms = h
        .terms()
        .iter()
        .map(|(c, s)| (*c, s.clone()))
        .chain(penalties.iter().map(|(a, p)| (*a, p.clone())));
    PauliSum::new(n, terms)
}

/// Why a run stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum ExitReason {
    /// Objective spread over the trailing window fell below `stop_tol`.
    Stagnated,
    /// `max_epochs` evaluations were recorded.
    EpochBudget,
    /// A non-finite objective, energy, or gradient appeared.
    Aborted(String),
}

/// One evaluated epoch.
#[derive(Clone, Debug)]
pub struct EpochRow {
    pub epoch: usize,
    pub objective: f64,
    pub energy: f64,
    pub grad_norm: f64,
    /// Expectations of the tracked parity operators, in the order given to
    /// `minimize`.
    pub parities: Vec<f64>,
}

/// Completed optimization run. `final_params` are the angles behind the last
/// recorded row.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub epochs: Vec<EpochRow>,
    pub final_params: Vec<f64>,
    pub final_objective: f64,
    pub final_energy: f64,
    pub exit: ExitReason,
    pub converged: bool,
}

impl RunRecord {
    pub fn n_epochs(&self) -> usize {
        self.epochs.len()
    }
}

/// Minimizes `<psi|objective|psi>` by damped natural gradient descent.
///
/// `tracked_parities` are recorded per epoch. `energy_observable`, when
/// given, is reported alongside the objective (used when optimizing a
/// penalized objective while caring about the bare energy); otherwise the
/// energy column repeats the objective.
pub fn minimize(
    objective: &PauliSum,
    spec: &AnsatzSpec,
    init: &[f64],
    cfg: &OptimizerConfig,
    tracked_parities: &[PauliString],
    energy_observable: Option<&PauliSum>,
) -> Result<RunRecord> {
    cfg.validate()?;
    if init.len() != spec.n_params() {
        return Err(Error::ParamLength {
            got: init.len(),
            expected: spec.n_params(),
        });
    }
    if let Some(h) = energy_observable {
        if h.n_qubits() != spec.n_qubits() {
            return Err(Error::SizeMismatch {
                left: h.n_qubits(),
                right: spec.n_qubits(),
            });
        }
    }
    let mut params = init.to_vec();
    let mut rows: Vec<EpochRow> = Vec::new();
    let mut exit = ExitReason::EpochBudget;
    for t in 0..cfg.max_epochs {
        let eval = evaluate_step(
            objective,
            spec,
            &params,
            cfg.fisher_variant,
            cfg.derivative_mode,
        )?;
        let energy = match energy_observable {
            Some(h) => h.expectation(&eval.state)?,
            None => eval.objective,
        };
        let parities = tracked_parities
            .iter()
            .map(|p| p.expectation(&eval.state))
            .collect::<Result<Vec<f64>>>()?;
        let grad_norm = eval.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        rows.push(EpochRow {
            epoch: t,
            objective: eval.objective,
            energy,
            grad_norm,
            parities,
        });
        if !eval.objective.is_finite() || !energy.is_finite() || !grad_norm.is_finite() {
            exit = ExitReason::Aborted(format!(
                "non-finite evaluation at epoch {t}: objective {}, energy {energy}, |grad| {grad_norm}",
                eval.objective
            ));
            break;
        }
        if rows.len() >= cfg.stop_window {
            let tail = &rows[rows.len() - cfg.stop_window..];
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for r in tail {
                lo = lo.min(r.objective);
                hi = hi.max(r.objective);
            }
            if hi - lo < cfg.stop_tol {
                exit = ExitReason::Stagnated;
                break;
            }
        }
        if t + 1 == cfg.max_epochs {
            break;
        }
        params = natural_gradient_step(
            &params,
            &eval.gradient,
            &eval.fisher,
            cfg.eta,
            lambda_schedule(cfg, t),
        )?;
    }
    let last = rows.last().expect("at least one epoch evaluated");
    let converged = exit == ExitReason::Stagnated;
    Ok(RunRecord {
        final_objective: last.objective,
        final_energy: last.energy,
        final_params: params,
        epochs: rows,
        exit,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{init_params, sb_tfi, AnsatzSpec, InitStrategy};
    use crate::exact::{dense_ground, normalized_energy};
    use crate::hamiltonians::{build_tfi, global_flip};
    use crate::pauli::{Axis, PauliString};
    use crate::state::LayerSpec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lambda_schedule_examples() {
        let cfg = OptimizerConfig::default();
        assert_abs_diff_eq!(lambda_schedule(&cfg, 0), 100.0, epsilon = 0.0);
        assert_abs_diff_eq!(lambda_schedule(&cfg, 1), 90.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lambda_schedule(&cfg, 200), 1e-3, epsilon = 0.0);
    }

    fn toy() -> (PauliSum, AnsatzSpec) {
        let z = PauliSum::new(1, [(1.0, PauliString::single(1, 0, Axis::Z).unwrap())]).unwrap();
        let layer = LayerSpec::new("z", z, vec![], true).unwrap();
        let spec = AnsatzSpec::new(1, 1, vec![layer]).unwrap();
        let h = PauliSum::new(1, [(1.0, PauliString::single(1, 0, Axis::X).unwrap())]).unwrap();
        (h, spec)
    }

    #[test]
    fn step_solves_the_damped_system() {
        // Unit Fisher, gradient -sqrt(2) at theta = pi/8: the step moves by
        // +eta * sqrt(2) / (1 + lambda).
        let (h, spec) = toy();
        let theta = std::f64::consts::FRAC_PI_8;
        let eval = evaluate_step(
            &h,
            &spec,
            &[theta],
            FisherVariant::Centered,
            DerivativeMode::Auto,
        )
        .unwrap();
        let out = natural_gradient_step(&[theta], &eval.gradient, &eval.fisher, 0.01, 1e-3).unwrap();
        let expected = theta + 0.01 * std::f64::consts::SQRT_2 / 1.001;
        assert_abs_diff_eq!(out[0], expected, epsilon = 1e-12);
    }

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let (h, spec) = toy();
        // theta = 0 is a stationary point of cos(2 theta)... it is a
        // maximum, but the gradient vanishes either way
        let eval = evaluate_step(
            &h,
            &spec,
            &[0.0],
            FisherVariant::Centered,
            DerivativeMode::Auto,
        )
        .unwrap();
        assert_abs_diff_eq!(eval.gradient[0], 0.0, epsilon = 1e-15);
        let out = natural_gradient_step(&[0.0], &eval.gradient, &eval.fisher, 0.01, 1.0).unwrap();
        assert_eq!(out, vec![0.0]);
    }

    #[test]
    fn heavy_damping_shrinks_the_step() {
        let (h, spec) = toy();
        let theta = 0.4;
        let eval = evaluate_step(
            &h,
            &spec,
            &[theta],
            FisherVariant::Centered,
            DerivativeMode::Auto,
        )
        .unwrap();
        let out = natural_gradient_step(&[theta], &eval.gradient, &eval.fisher, 0.01, 1e6).unwrap();
        assert!((out[0] - theta).abs() < 1e-6);
    }

    #[test]
    fn minimize_toy_reaches_ground() {
        let (h, spec) = toy();
        let cfg = OptimizerConfig {
            max_epochs: 800,
            ..OptimizerConfig::default()
        };
        let rec = minimize(&h, &spec, &[0.3], &cfg, &[], None).unwrap();
        // ground of X is -1 at theta = pi/2 + k pi
        assert!(rec.final_energy < -1.0 + 1e-8, "got {}", rec.final_energy);
        assert!(rec.converged);
        assert_eq!(rec.exit, ExitReason::Stagnated);
        // final params reproduce the recorded energy exactly
        let psi = spec.prepare(&rec.final_params).unwrap();
        assert_eq!(h.expectation(&psi).unwrap(), rec.final_energy);
    }

    #[test]
    fn minimize_small_ising_run() {
        let n = 4;
        let h = build_tfi(n, 0.5).unwrap();
        let spec = sb_tfi(n, 2).unwrap();
        let init = init_params(&spec, InitStrategy::SbOffset { sigma: 0.001 }, 1).unwrap();
        let cfg = OptimizerConfig {
            max_epochs: 600,
            ..OptimizerConfig::default()
        };
        let flip = global_flip(n).unwrap();
        let rec = minimize(&h, &spec, &init, &cfg, &[flip], None).unwrap();
        let gs = dense_ground(&h).unwrap().energy;
        let rel = normalized_energy(rec.final_energy, gs).unwrap();
        assert!(rel < 1e-4, "relative error {rel}");
        assert_eq!(rec.epochs[0].parities.len(), 1);
        assert_eq!(rec.epochs.len(), rec.n_epochs());
    }

    #[test]
    fn restart_from_converged_record_stays_put() {
        let (h, spec) = toy();
        let cfg = OptimizerConfig {
            max_epochs: 800,
            ..OptimizerConfig::default()
        };
        let first = minimize(&h, &spec, &[0.3], &cfg, &[], None).unwrap();
        assert!(first.converged);
        let rerun_cfg = OptimizerConfig {
            max_epochs: 100,
            ..OptimizerConfig::default()
        };
        let second = minimize(&h, &spec, &first.final_params, &rerun_cfg, &[], None).unwrap();
        assert!(
            (second.final_energy - first.final_energy).abs() < 1e-9,
            "drift {} -> {}",
            first.final_energy,
            second.final_energy
        );
    }

    #[test]
    fn epoch_budget_exit() {
        let (h, spec) = toy();
        let cfg = OptimizerConfig {
            max_epochs: 5,
            ..OptimizerConfig::default()
        };
        let rec = minimize(&h, &spec, &[0.3], &cfg, &[], None).unwrap();
        assert_eq!(rec.n_epochs(), 5);
        assert_eq!(rec.exit, ExitReason::EpochBudget);
        assert!(!rec.converged);
    }

    #[test]
    fn penalty_objective_appends_terms() {
        let h = build_tfi(4, 0.5).unwrap();
        let p = global_flip(4).unwrap();
        let obj = penalty_objective(&h, &[(2.0, p.clone())]).unwrap();
        assert_eq!(obj.len(), h.len() + 1);
        // alpha = 0 collapses back to H
        let same = penalty_objective(&h, &[(0.0, p)]).unwrap();
        assert_eq!(same.len(), h.len());
    }

    #[test]
    fn config_validation() {
        let mut cfg = OptimizerConfig::default();
        cfg.eta = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = OptimizerConfig::default();
        cfg.lambda_decay = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = OptimizerConfig::default();
        cfg.stop_window = 1;
        assert!(cfg.validate().is_err());
    }
}
