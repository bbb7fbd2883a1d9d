//! JSON experiment configuration. Every field has a default, and the fully
//! resolved config is echoed next to the results.

use std::f64::consts::PI;
use std::path::PathBuf;

use qsurrogate_core::dataprep::VarianceEstimator;
use qsurrogate_core::optim::{BatchSize, TrainConfig};
use qsurrogate_core::targets::TargetName;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Sweep1d,
    Patch2dDemo,
    Sweep2dSuite,
    QsvmDemo,
    WdbcLimits,
}

impl ExperimentId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Sweep1d => "sweep1d",
            ExperimentId::Patch2dDemo => "patch2d_demo",
            ExperimentId::Sweep2dSuite => "sweep2d_suite",
            ExperimentId::QsvmDemo => "qsvm_demo",
            ExperimentId::WdbcLimits => "wdbc_limits",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    /// Master seed; every sweep cell derives its own seed from it and the
    /// cell index.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Fill the `wall_ms` CSV column. Off by default so reruns produce
    /// byte-identical CSVs; total wall time always goes to the summary.
    #[serde(default)]
    pub record_timing: bool,
    /// Required by `wdbc_limits`.
    #[serde(default)]
    pub wdbc_path: Option<PathBuf>,
    #[serde(default)]
    pub sweep1d: Sweep1dConfig,
    #[serde(default)]
    pub patch2d: Patch2dConfig,
    #[serde(default)]
    pub sweep2d: Sweep2dConfig,
    #[serde(default)]
    pub qsvm: QsvmConfig,
    #[serde(default)]
    pub wdbc: WdbcConfig,
}

fn default_seed() -> u64 {
    2024
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        ExperimentConfig {
            experiment,
            seed: default_seed(),
            record_timing: false,
            wdbc_path: None,
            sweep1d: Sweep1dConfig::default(),
            patch2d: Patch2dConfig::default(),
            sweep2d: Sweep2dConfig::default(),
            qsvm: QsvmConfig::default(),
            wdbc: WdbcConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("config JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let cfg_err = |e: qsurrogate_core::Error| HarnessError::Config(e.to_string());
        match self.experiment {
            ExperimentId::Sweep1d => {
                let c = &self.sweep1d;
                c.train.validate().map_err(cfg_err)?;
                if c.qubit_counts.is_empty() || c.qubit_counts.iter().any(|&q| q == 0 || q > 12) {
                    return Err(HarnessError::Config("sweep1d.qubit_counts must be in 1..=12".into()));
                }
                if !(c.domain_hi > c.domain_lo) || !(c.sample_rate > 0.0) {
                    return Err(HarnessError::Config("sweep1d domain/sample_rate invalid".into()));
                }
            }
            ExperimentId::Patch2dDemo => {
                let c = &self.patch2d;
                c.train.validate().map_err(cfg_err)?;
                if c.target.dim() != 2 {
                    return Err(HarnessError::Config("patch2d.target must be a 2D target".into()));
                }
                for p in [&c.quantum_patch, &c.classical_patch] {
                    if p.edge < 2 || p.anchor_row + p.edge > c.grid_points || p.anchor_col + p.edge > c.grid_points {
                        return Err(HarnessError::Config(format!(
                            "patch {p:?} does not fit a {}-point grid",
                            c.grid_points
                        )));
                    }
                }
            }
            ExperimentId::Sweep2dSuite => {
                let c = &self.sweep2d;
                c.train.validate().map_err(cfg_err)?;
                if c.targets.iter().any(|t| t.dim() != 2) {
                    return Err(HarnessError::Config("sweep2d.targets must be 2D targets".into()));
                }
                if c.min_edge < 2 || c.min_edge > c.max_edge || c.anchor_row.max(c.anchor_col) + c.max_edge > c.grid_points {
                    return Err(HarnessError::Config("sweep2d edges do not fit the grid".into()));
                }
            }
            ExperimentId::QsvmDemo => {
                let c = &self.qsvm;
                c.train.validate().map_err(cfg_err)?;
                if !(c.c > 0.0) || c.mesh_points < 2 || c.center.len() != 2 {
                    return Err(HarnessError::Config("qsvm: need c > 0, mesh_points >= 2, 2D center".into()));
                }
            }
            ExperimentId::WdbcLimits => {
                let c = &self.wdbc;
                c.train.validate().map_err(cfg_err)?;
                if self.wdbc_path.is_none() {
                    return Err(HarnessError::Config("wdbc_limits needs a WDBC file (--wdbc or wdbc_path)".into()));
                }
                if c.components == 0 || c.qubits == 0 || c.layers == 0 {
                    return Err(HarnessError::Config("wdbc: components, qubits, layers must be >= 1".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep1dConfig {
    pub domain_lo: f64,
    pub domain_hi: f64,
    /// Samples per unit on `[domain_lo, domain_hi)`.
    pub sample_rate: f64,
    pub initial_width: f64,
    pub increment: f64,
    pub qubit_counts: Vec<usize>,
    pub layers: usize,
    /// `train.seed` is replaced by the per-cell seed.
    pub train: TrainConfig,
    pub init_std: f64,
}

impl Default for Sweep1dConfig {
    fn default() -> Self {
        Sweep1dConfig {
            domain_lo: -6.0,
            domain_hi: 6.0,
            sample_rate: 10.0,
            initial_width: 0.5,
            increment: 0.2,
            qubit_counts: vec![1, 2, 3],
            layers: 1,
            train: TrainConfig::adam(60, 0.3, BatchSize::Size(25), 0),
            init_std: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub anchor_row: usize,
    pub anchor_col: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Patch2dConfig {
    pub target: TargetName,
    pub target_seed: u64,
    pub domain_lo: f64,
    pub domain_hi: f64,
    pub grid_points: usize,
    pub quantum_patch: PatchSpec,
    pub classical_patch: PatchSpec,
    pub layers: usize,
    pub train: TrainConfig,
    pub init_std: f64,
    /// Points per axis of the dense evaluation grid. 39² = 1521 stands in
    /// for the "1500 test points", whose layout is not specified.
    pub eval_grid_points: usize,
}

impl Default for Patch2dConfig {
    fn default() -> Self {
        Patch2dConfig {
            target: TargetName::CombinedOscillator,
            target_seed: 0,
            domain_lo: -PI,
            domain_hi: PI,
            grid_points: 22,
            quantum_patch: PatchSpec {
                anchor_row: 6,
                anchor_col: 6,
                edge: 10,
            },
            classical_patch: PatchSpec {
                anchor_row: 7,
                anchor_col: 7,
                edge: 8,
            },
            layers: 2,
            train: TrainConfig::nelder_mead(500),
            init_std: 0.01,
            eval_grid_points: 39,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep2dConfig {
    pub targets: Vec<TargetName>,
    /// Seed for the randomly drawn targets.
    pub target_seed: u64,
    pub domain_lo: f64,
    pub domain_hi: f64,
    pub grid_points: usize,
    pub anchor_row: usize,
    pub anchor_col: usize,
    pub min_edge: usize,
    pub max_edge: usize,
    pub layers: usize,
    pub train: TrainConfig,
    pub init_std: f64,
}

impl Default for Sweep2dConfig {
    fn default() -> Self {
        Sweep2dConfig {
            targets: TargetName::SUITE_2D.to_vec(),
            target_seed: 0,
            domain_lo: -PI,
            domain_hi: PI,
            grid_points: 22,
            anchor_row: 2,
            anchor_col: 2,
            min_edge: 2,
            max_edge: 20,
            layers: 2,
            train: TrainConfig::nelder_mead(500),
            init_std: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QsvmConfig {
    pub c: f64,
    pub estimator: VarianceEstimator,
    pub center: Vec<f64>,
    /// Radius of the headline patch with the mesh output.
    pub demo_radius: f64,
    pub radius_start: f64,
    /// Not stated for the original sweep; 0.2 gives 12 radii.
    pub radius_step: f64,
    pub radius_end: f64,
    pub layers: usize,
    pub train: TrainConfig,
    pub init_std: f64,
    pub mesh_points: usize,
}

impl Default for QsvmConfig {
    fn default() -> Self {
        QsvmConfig {
            c: 1.0,
            estimator: VarianceEstimator::Population,
            center: vec![0.0, 0.0],
            demo_radius: 1.0,
            radius_start: 0.3,
            radius_step: 0.2,
            radius_end: 2.5,
            layers: 2,
            train: TrainConfig::nesterov(100, 0.5, 0.9, BatchSize::Full, 0),
            init_std: 0.01,
            mesh_points: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WdbcConfig {
    pub components: usize,
    pub estimator: VarianceEstimator,
    pub radius_start: f64,
    pub radius_step: f64,
    pub radius_end: f64,
    pub qubits: usize,
    pub layers: usize,
    pub k_max: usize,
    pub train: TrainConfig,
    pub init_std: f64,
    /// Accuracy and failure probability plugged into the invocation bound.
    pub bound_epsilon: f64,
    pub bound_delta: f64,
}

impl Default for WdbcConfig {
    fn default() -> Self {
        WdbcConfig {
            components: 6,
            estimator: VarianceEstimator::Population,
            radius_start: 0.5,
            radius_step: 0.05,
            radius_end: 3.45,
            qubits: 2,
            layers: 3,
            k_max: 3,
            train: TrainConfig::adam(40, 0.1, BatchSize::Full, 0),
            init_std: 0.01,
            bound_epsilon: 0.1,
            bound_delta: 0.05,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip() {
        for id in [
            ExperimentId::Sweep1d,
            ExperimentId::Patch2dDemo,
            ExperimentId::Sweep2dSuite,
            ExperimentId::QsvmDemo,
            ExperimentId::WdbcLimits,
        ] {
            let c = ExperimentConfig::new(id);
            assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
        }
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"sweep1d"}"#).unwrap();
        assert_eq!(c, ExperimentConfig::new(ExperimentId::Sweep1d));
        let c = ExperimentConfig::from_json(r#"{"experiment":"qsvm_demo","qsvm":{"radius_step":0.1}}"#).unwrap();
        assert_eq!(c.qsvm.radius_step, 0.1);
        assert_eq!(c.qsvm.c, 1.0);
    }

    #[test]
    fn bad_configs() {
        assert!(ExperimentConfig::from_json(r#"{"experiment":"nope"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"sweep1d","typo":1}"#).is_err());
        let c = ExperimentConfig::new(ExperimentId::WdbcLimits);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(ExperimentId::Sweep1d);
        c.sweep1d.train.steps = 0;
        assert!(c.validate().is_err());
    }
}
