//! Converged-run checkpoints.
//!
//! A checkpoint is a self-contained JSON record of one optimized replica:
//! enough to rebuild the circuit, re-evaluate its energy, or warm-start a
//! deeper run. Loading validates the format version, the parameter layout
//! id, and the parameter count against the rebuilt circuit, so a stale or
//! hand-edited file fails loudly instead of silently preparing the wrong
//! state.

use std::path::Path;

use serde::{Deserialize, Serialize};

use sbvqe_core::ansatz::AnsatzSpec;
use sbvqe_core::hamiltonians::ModelSpec;
use sbvqe_core::optimizer::RunRecord;

use crate::config::AnsatzFamily;
use crate::error::{Error, Result};

/// Flat parameter vector ordered block by block: entry `r * block_len + j`
/// is layer `j` of repetition `r`.
pub const PARAM_LAYOUT: &str = "block-major/v1";

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    /// "{model}-{family}-n{N}-d{D}-seed{S}"; unique within one experiment.
    pub id: String,
    pub model: String,
    pub n_qubits: usize,
    pub h: f64,
    pub ansatz: String,
    pub depth: usize,
    pub param_layout: String,
    pub params: Vec<f64>,
    pub final_energy: f64,
    pub final_objective: f64,
    pub e_gs: f64,
    pub seed: u64,
    pub epochs: usize,
    pub converged: bool,
    /// Id of the checkpoint this run was warm-started from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Checkpoint {
    pub fn new(
        model: &ModelSpec,
        family: AnsatzFamily,
        depth: usize,
        seed: u64,
        record: &RunRecord,
        e_gs: f64,
        source: Option<String>,
    ) -> Self {
        let id = format!(
            "{}-{}-n{}-d{}-seed{}",
            model.model().name(),
            family.name(),
            model.n_qubits(),
            depth,
            seed
        );
        Checkpoint {
            format_version: FORMAT_VERSION,
            id,
            model: model.model().name().to_string(),
            n_qubits: model.n_qubits(),
            h: model.h(),
            ansatz: family.name().to_string(),
            depth,
            param_layout: PARAM_LAYOUT.to_string(),
            params: record.final_params.clone(),
            final_energy: record.final_energy,
            final_objective: record.final_objective,
            e_gs,
            seed,
            epochs: record.n_epochs(),
            converged: record.converged,
            source,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bail = |reason: String| Error::Checkpoint {
            path: path.to_path_buf(),
            reason,
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)?;
        if ckpt.format_version != FORMAT_VERSION {
            return Err(bail(format!(
                "format version {} (this build reads {FORMAT_VERSION})",
                ckpt.format_version
            )));
        }
        if ckpt.param_layout != PARAM_LAYOUT {
            return Err(bail(format!(
                "parameter layout {:?} (this build reads {PARAM_LAYOUT:?})",
                ckpt.param_layout
            )));
        }
        if ckpt.params.iter().any(|p| !p.is_finite()) {
            return Err(bail("non-finite parameter".into()));
        }
        let spec = ckpt.ansatz_spec()?;
        if ckpt.params.len() != spec.n_params() {
            return Err(bail(format!(
                "{} parameters but the circuit has {}",
                ckpt.params.len(),
                spec.n_params()
            )));
        }
        Ok(ckpt)
    }

    pub fn family(&self) -> Result<AnsatzFamily> {
        AnsatzFamily::parse(&self.ansatz)
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        let model = match self.model.as_str() {
            "tfi" => sbvqe_core::hamiltonians::Model::Tfi,
            "tfc" => sbvqe_core::hamiltonians::Model::Tfc,
            "cluster" => sbvqe_core::hamiltonians::Model::ClusterOpen,
            other => {
                return Err(Error::Checkpoint {
                    path: Path::new(&self.id).to_path_buf(),
                    reason: format!("unknown model {other:?}"),
                })
            }
        };
        Ok(ModelSpec::new(model, self.n_qubits, self.h)?)
    }

    pub fn ansatz_spec(&self) -> Result<AnsatzSpec> {
        self.family()?
            .build(self.model_spec()?.model(), self.n_qubits, self.depth)
    }

    /// Rebuilds the circuit and measures the model energy of the stored
    /// parameters. Matches `final_energy` to well below 1e-10 on an intact
    /// checkpoint.
    pub fn reevaluate(&self) -> Result<f64> {
        let spec = self.ansatz_spec()?;
        let state = spec.prepare(&self.params)?;
        let h = self.model_spec()?.hamiltonian()?;
        Ok(h.expectation(&state)?)
    }
}
