//! Declarative experiment configuration.
//!
//! A run is described by a TOML file with sections mirroring
//! [`ExperimentConfig`]; every field has a default, so an empty file (or no
//! file at all) is valid. CLI flags override file values through
//! [`Overrides`], and the merged result is echoed into the output directory
//! as `effective_config.toml` so a finished run records exactly what it ran.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sbvqe_core::ansatz::{self, AnsatzSpec, InitStrategy};
use sbvqe_core::derivatives::FisherVariant;
use sbvqe_core::hamiltonians::{Model, ModelSpec};
use sbvqe_core::optimizer::OptimizerConfig;

use crate::error::{Error, Result};

/// Which layered circuit template to instantiate for a given model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnsatzFamily {
    /// Alternating Hamiltonian-term layers; inherits the model's symmetries.
    Qaoa,
    /// Symmetry-breaking variant: adds transverse Z layers to the block.
    Sb,
    /// Plain cluster-interaction block without symmetry-breaking layers.
    Bare,
}

impl AnsatzFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "qaoa" => Ok(AnsatzFamily::Qaoa),
            "sb" => Ok(AnsatzFamily::Sb),
            "bare" => Ok(AnsatzFamily::Bare),
            other => Err(Error::config(format!(
                "unknown ansatz family {other:?} (expected qaoa, sb, or bare)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AnsatzFamily::Qaoa => "qaoa",
            AnsatzFamily::Sb => "sb",
            AnsatzFamily::Bare => "bare",
        }
    }

    /// Instantiates the template for `model`. Not every pairing exists; the
    /// error lists the valid ones.
    pub fn build(self, model: Model, n_qubits: usize, depth: usize) -> Result<AnsatzSpec> {
        let spec = match (model, self) {
            (Model::Tfi, AnsatzFamily::Qaoa) => ansatz::qaoa_tfi(n_qubits, depth),
            (Model::Tfi, AnsatzFamily::Sb) => ansatz::sb_tfi(n_qubits, depth),
            (Model::Tfc, AnsatzFamily::Bare) => ansatz::tfc_bare(n_qubits, depth),
            (Model::Tfc, AnsatzFamily::Sb) => ansatz::sb_tfc(n_qubits, depth),
            (Model::ClusterOpen, AnsatzFamily::Sb) => ansatz::sb_cluster_open(n_qubits, depth),
            (m, f) => {
                return Err(Error::config(format!(
                    "no {} ansatz for model {} (valid: tfi+qaoa, tfi+sb, tfc+bare, tfc+sb, cluster+sb)",
                    f.name(),
                    m.name()
                )))
            }
        };
        Ok(spec?)
    }
}

/// Where a transfer step splices the fresh block into the existing circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertPosition {
    /// Before repetition `depth / 2` (middle, rounding down). The default.
    Floor,
    /// Before repetition `depth - depth / 2` (middle, rounding up).
    Ceil,
}

impl InsertPosition {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(InsertPosition::Floor),
            "ceil" => Ok(InsertPosition::Ceil),
            other => Err(Error::config(format!(
                "unknown insert position {other:?} (expected floor or ceil)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InsertPosition::Floor => "floor",
            InsertPosition::Ceil => "ceil",
        }
    }

    pub fn position(self, depth: usize) -> usize {
        match self {
            InsertPosition::Floor => depth / 2,
            InsertPosition::Ceil => depth - depth / 2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// "tfi", "tfc", or "cluster".
    pub name: String,
    /// System sizes to sweep.
    pub n: Vec<usize>,
    /// Transverse field. Defaults to 0.5 for tfi/tfc and 0 for cluster.
    pub h: Option<f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            name: "tfi".into(),
            n: vec![8],
            h: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzSection {
    /// "qaoa", "sb", or "bare".
    pub family: String,
    /// Block repetition counts to sweep.
    pub depth: Vec<usize>,
}

impl Default for AnsatzSection {
    fn default() -> Self {
        AnsatzSection {
            family: "sb".into(),
            depth: vec![3],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitSection {
    /// "normal" (all angles from N(0, sigma^2), the default) or "sboffset"
    /// (same draws plus a 2*pi/depth offset on symmetry-breaking angles,
    /// which helps shallow symmetry-breaking circuits but hurts deep ones).
    pub strategy: String,
    pub sigma: f64,
}

impl Default for InitSection {
    fn default() -> Self {
        InitSection {
            strategy: "normal".into(),
            sigma: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub eta: f64,
    pub lambda0: f64,
    pub lambda_decay: f64,
    pub lambda_floor: f64,
    pub max_epochs: usize,
    pub stop_window: usize,
    pub stop_tol: f64,
    /// "centered" or "uncentered".
    pub fisher: String,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        OptimizerSection {
            eta: d.eta,
            lambda0: d.lambda0,
            lambda_decay: d.lambda_decay,
            lambda_floor: d.lambda_floor,
            max_epochs: d.max_epochs,
            stop_window: d.stop_window,
            stop_tol: d.stop_tol,
            fisher: "centered".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub replicas: usize,
    /// Replica k runs with seed = seed + k.
    pub seed: u64,
    /// Concurrent replicas; 0 means one per available core.
    pub jobs: usize,
    pub out: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            replicas: 12,
            seed: 1000,
            jobs: 0,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferSection {
    /// Depth increments to chain (D -> D+1 -> ... -> D+steps).
    pub steps: usize,
    /// Std dev of the perturbation applied to every angle after insertion.
    pub perturb_sigma: f64,
    /// Std dev of the fresh block's angles (0 inserts an identity block).
    pub new_block_sigma: f64,
    /// "floor" or "ceil".
    pub insert_position: String,
}

impl Default for TransferSection {
    fn default() -> Self {
        TransferSection {
            steps: 1,
            perturb_sigma: 0.01,
            new_block_sigma: 1e-3,
            insert_position: "floor".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PenaltySection {
    /// Weights [alpha1, alpha2] on the two sublattice parity operators.
    pub alpha: Vec<f64>,
}

impl Default for PenaltySection {
    fn default() -> Self {
        PenaltySection { alpha: vec![2.0, 2.0] }
    }
}

/// Complete harness configuration. See the module docs for the merge rules.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub ansatz: AnsatzSection,
    pub init: InitSection,
    pub optimizer: OptimizerSection,
    pub run: RunSection,
    pub transfer: TransferSection,
    pub penalty: PenaltySection,
}

/// CLI-level overrides; `None` keeps the file (or default) value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub n: Option<Vec<usize>>,
    pub h: Option<f64>,
    pub ansatz: Option<String>,
    pub depth: Option<Vec<usize>>,
    /// "normal", "sboffset", or "name:sigma".
    pub init: Option<String>,
    pub fisher: Option<String>,
    pub eta: Option<f64>,
    pub lambda0: Option<f64>,
    pub lambda_decay: Option<f64>,
    pub lambda_floor: Option<f64>,
    pub epochs: Option<usize>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub steps: Option<usize>,
    pub perturb: Option<f64>,
    pub new_block_sigma: Option<f64>,
    pub insert_position: Option<String>,
    pub alpha: Option<Vec<f64>>,
}

impl ExperimentConfig {
    /// Reads `path` (when given) and applies `overrides` on top.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                toml::from_str(&text)?
            }
            None => ExperimentConfig::default(),
        };
        cfg.apply(overrides)?;
        Ok(cfg)
    }

    /// Applies CLI overrides in place.
    pub fn apply(&mut self, ov: &Overrides) -> Result<()> {
        if let Some(m) = &ov.model {
            self.model.name = m.clone();
        }
        if let Some(n) = &ov.n {
            self.model.n = n.clone();
        }
        if let Some(h) = ov.h {
            self.model.h = Some(h);
        }
        if let Some(a) = &ov.ansatz {
            self.ansatz.family = a.clone();
        }
        if let Some(d) = &ov.depth {
            self.ansatz.depth = d.clone();
        }
        if let Some(init) = &ov.init {
            match init.split_once(':') {
                Some((name, sigma)) => {
                    self.init.strategy = name.to_string();
                    self.init.sigma = sigma
                        .parse()
                        .map_err(|_| Error::config(format!("bad init sigma in {init:?}")))?;
                }
                None => self.init.strategy = init.clone(),
            }
        }
        if let Some(f) = &ov.fisher {
            self.optimizer.fisher = f.clone();
        }
        if let Some(v) = ov.eta {
            self.optimizer.eta = v;
        }
        if let Some(v) = ov.lambda0 {
            self.optimizer.lambda0 = v;
        }
        if let Some(v) = ov.lambda_decay {
            self.optimizer.lambda_decay = v;
        }
        if let Some(v) = ov.lambda_floor {
            self.optimizer.lambda_floor = v;
        }
        if let Some(v) = ov.epochs {
            self.optimizer.max_epochs = v;
        }
        if let Some(v) = ov.replicas {
            self.run.replicas = v;
        }
        if let Some(v) = ov.seed {
            self.run.seed = v;
        }
        if let Some(v) = ov.jobs {
            self.run.jobs = v;
        }
        if let Some(p) = &ov.out {
            self.run.out = p.clone();
        }
        if let Some(v) = ov.steps {
            self.transfer.steps = v;
        }
        if let Some(v) = ov.perturb {
            self.transfer.perturb_sigma = v;
        }
        if let Some(v) = ov.new_block_sigma {
            self.transfer.new_block_sigma = v;
        }
        if let Some(p) = &ov.insert_position {
            self.transfer.insert_position = p.clone();
        }
        if let Some(a) = &ov.alpha {
            self.penalty.alpha = a.clone();
        }
        Ok(())
    }

    pub fn model(&self) -> Result<Model> {
        match self.model.name.as_str() {
            "tfi" => Ok(Model::Tfi),
            "tfc" => Ok(Model::Tfc),
            "cluster" => Ok(Model::ClusterOpen),
            other => Err(Error::config(format!(
                "unknown model {other:?} (expected tfi, tfc, or cluster)"
            ))),
        }
    }

    /// Effective transverse field: explicit value if set, else the model's
    /// conventional default (0.5 for the field models, 0 for the cluster).
    pub fn field(&self) -> Result<f64> {
        let model = self.model()?;
        Ok(match self.model.h {
            Some(h) => h,
            None => match model {
                Model::ClusterOpen => 0.0,
                _ => 0.5,
            },
        })
    }

    pub fn model_spec(&self, n_qubits: usize) -> Result<ModelSpec> {
        Ok(ModelSpec::new(self.model()?, n_qubits, self.field()?)?)
    }

    pub fn family(&self) -> Result<AnsatzFamily> {
        AnsatzFamily::parse(&self.ansatz.family)
    }

    pub fn ansatz_spec(&self, n_qubits: usize, depth: usize) -> Result<AnsatzSpec> {
        self.family()?.build(self.model()?, n_qubits, depth)
    }

    pub fn init_strategy(&self) -> Result<InitStrategy> {
        let sigma = self.init.sigma;
        match self.init.strategy.as_str() {
            "normal" => Ok(InitStrategy::NormalZero { sigma }),
            "sboffset" => Ok(InitStrategy::SbOffset { sigma }),
            other => Err(Error::config(format!(
                "unknown init strategy {other:?} (expected normal or sboffset)"
            ))),
        }
    }

    pub fn fisher_variant(&self) -> Result<FisherVariant> {
        match self.optimizer.fisher.as_str() {
            "centered" => Ok(FisherVariant::Centered),
            "uncentered" => Ok(FisherVariant::Uncentered),
            other => Err(Error::config(format!(
                "unknown fisher variant {other:?} (expected centered or uncentered)"
            ))),
        }
    }

    pub fn optimizer(&self) -> Result<OptimizerConfig> {
        Ok(OptimizerConfig {
            eta: self.optimizer.eta,
            lambda0: self.optimizer.lambda0,
            lambda_decay: self.optimizer.lambda_decay,
            lambda_floor: self.optimizer.lambda_floor,
            max_epochs: self.optimizer.max_epochs,
            stop_window: self.optimizer.stop_window,
            stop_tol: self.optimizer.stop_tol,
            fisher_variant: self.fisher_variant()?,
            ..OptimizerConfig::default()
        })
    }

    pub fn insert_position(&self) -> Result<InsertPosition> {
        InsertPosition::parse(&self.transfer.insert_position)
    }

    /// Penalty weights as a pair; exactly two are required.
    pub fn alphas(&self) -> Result<(f64, f64)> {
        match self.penalty.alpha.as_slice() {
            &[a1, a2] if a1.is_finite() && a2.is_finite() && a1 >= 0.0 && a2 >= 0.0 => {
                Ok((a1, a2))
            }
            other => Err(Error::config(format!(
                "penalty.alpha must be two nonnegative weights, got {other:?}"
            ))),
        }
    }

    /// Sanity checks shared by every batch command.
    pub fn validate_common(&self) -> Result<()> {
        if self.model.n.is_empty() {
            return Err(Error::config("model.n is empty; nothing to run"));
        }
        if self.ansatz.depth.is_empty() {
            return Err(Error::config("ansatz.depth is empty; nothing to run"));
        }
        if self.run.replicas == 0 {
            return Err(Error::config("run.replicas must be at least 1"));
        }
        if self.ansatz.depth.iter().any(|&d| d == 0) {
            return Err(Error::config("ansatz.depth entries must be at least 1"));
        }
        self.model()?;
        self.family()?;
        self.init_strategy()?;
        self.fisher_variant()?;
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let cfg = ExperimentConfig::default();
        cfg.validate_common().unwrap();
        assert_eq!(cfg.model().unwrap(), Model::Tfi);
        assert_eq!(cfg.field().unwrap(), 0.5);
        let text = cfg.to_toml().unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.run.seed, cfg.run.seed);
        assert_eq!(back.optimizer.stop_tol, cfg.optimizer.stop_tol);
        assert_eq!(back.model.h, cfg.model.h);
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut cfg = ExperimentConfig::default();
        let ov = Overrides {
            model: Some("tfc".into()),
            n: Some(vec![4, 6]),
            h: Some(1.5),
            ansatz: Some("bare".into()),
            depth: Some(vec![2]),
            init: Some("normal:0.05".into()),
            fisher: Some("uncentered".into()),
            eta: Some(0.025),
            epochs: Some(77),
            replicas: Some(3),
            seed: Some(42),
            out: Some(PathBuf::from("elsewhere")),
            ..Overrides::default()
        };
        cfg.apply(&ov).unwrap();
        assert_eq!(cfg.model().unwrap(), Model::Tfc);
        assert_eq!(cfg.model.n, vec![4, 6]);
        assert_eq!(cfg.field().unwrap(), 1.5);
        assert_eq!(cfg.family().unwrap(), AnsatzFamily::Bare);
        assert_eq!(
            cfg.init_strategy().unwrap(),
            InitStrategy::NormalZero { sigma: 0.05 }
        );
        assert_eq!(
            cfg.fisher_variant().unwrap(),
            FisherVariant::Uncentered
        );
        assert_eq!(cfg.optimizer().unwrap().eta, 0.025);
        assert_eq!(cfg.optimizer().unwrap().max_epochs, 77);
        assert_eq!(cfg.run.replicas, 3);
        assert_eq!(cfg.run.seed, 42);
        assert_eq!(cfg.run.out, PathBuf::from("elsewhere"));
    }

    #[test]
    fn cluster_field_defaults_to_zero() {
        let mut cfg = ExperimentConfig::default();
        cfg.model.name = "cluster".into();
        assert_eq!(cfg.field().unwrap(), 0.0);
        cfg.model_spec(6).unwrap();
    }

    #[test]
    fn invalid_names_are_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.model.name = "xy".into();
        assert!(cfg.model().is_err());
        cfg.model.name = "tfi".into();
        cfg.ansatz.family = "brick".into();
        assert!(cfg.family().is_err());
        cfg.ansatz.family = "bare".into();
        assert!(cfg.ansatz_spec(8, 2).is_err(), "tfi has no bare template");
    }

    #[test]
    fn unknown_keys_fail_parsing() {
        let err = toml::from_str::<ExperimentConfig>("[model]\nnname = \"tfi\"\n");
        assert!(err.is_err());
    }

    #[test]
    fn insert_positions() {
        assert_eq!(InsertPosition::Floor.position(3), 1);
        assert_eq!(InsertPosition::Ceil.position(3), 2);
        assert_eq!(InsertPosition::Floor.position(4), 2);
        assert_eq!(InsertPosition::Ceil.position(4), 2);
    }

    #[test]
    fn family_dispatch_builds_every_valid_pair() {
        for (model, family, n) in [
            (Model::Tfi, AnsatzFamily::Qaoa, 6),
            (Model::Tfi, AnsatzFamily::Sb, 6),
            (Model::Tfc, AnsatzFamily::Bare, 6),
            (Model::Tfc, AnsatzFamily::Sb, 6),
            (Model::ClusterOpen, AnsatzFamily::Sb, 6),
        ] {
            let spec = family.build(model, n, 2).unwrap();
            assert_eq!(spec.depth(), 2);
        }
        assert!(AnsatzFamily::Qaoa.build(Model::ClusterOpen, 6, 2).is_err());
    }
}
