//! Breast-cancer hypercube sweep: a 6-feature reuploading surrogate per patch
//! and a separable classical surrogate fitted to its predictions. The full
//! lattice is far out of reach, which the summary records next to the bound.

use qsurrogate_core::dataprep::{load_wdbc, PcaPipeline};
use qsurrogate_core::optim::train;
use qsurrogate_core::regions::{progression, select, Region};
use qsurrogate_core::reupload::{AnsatzKind, ReuploadModel};
use qsurrogate_core::surrogate::{fit_separable, full_lattice, invocation_bound, separable_columns};
use rayon::prelude::*;
use serde_json::json;

use super::{gather, r2_opt, Stopwatch};
use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::output::{LossTrace, RunOutput, SweepRecord};
use crate::seeds::cell_seed;

const TARGET: &str = "wdbc_labels";

enum Outcome {
    Solved(Box<(SweepRecord, LossTrace)>, usize),
    Underdetermined(usize),
    Failed(usize, String),
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let c = &config.wdbc;
    let path = config
        .wdbc_path
        .as_ref()
        .ok_or_else(|| HarnessError::Config("wdbc_limits needs a WDBC file".into()))?;
    let data = load_wdbc(path)?;
    let (pipeline, prepared) = PcaPipeline::fit_transform(&data.x, c.components, c.estimator)?;
    let labels = data.signed_labels();
    let columns = separable_columns(c.k_max, c.components);
    let radii = progression(c.radius_start, c.radius_step, c.radius_end)?;

    let outcomes: Vec<Outcome> = radii
        .par_iter()
        .enumerate()
        .map(|(index, &half_width)| -> Result<Outcome, HarnessError> {
            let watch = Stopwatch::start(config.record_timing);
            let seed = cell_seed(config.seed, index);
            let region = Region::HyperCube {
                half_width,
                dim: c.components,
            };
            // membership in standardised PCA coordinates, model inputs in angles
            let idx = select(&prepared.standardized, &region)?;
            if idx.len() < columns {
                return Ok(Outcome::Underdetermined(idx.len()));
            }
            let (lx, ly) = (gather(&prepared.angles, &idx), gather(&labels, &idx));
            let model = ReuploadModel::init_normal(
                AnsatzKind::LineAnsatz,
                c.qubits,
                c.layers,
                c.components,
                c.init_std,
                seed,
            )?;
            let mut train_cfg = c.train.clone();
            train_cfg.seed = seed;
            let report = train(&model, &lx, &ly, &train_cfg)?;
            let quantum = model.with_theta(report.final_theta.clone())?;
            let q_pred = quantum.forward_many(&lx)?;
            let fit = match fit_separable(&q_pred, &lx, c.k_max) {
                Ok(fit) => fit,
                Err(e) => return Ok(Outcome::Failed(idx.len(), e.to_string())),
            };
            let c_pred = fit.surrogate.evaluate_many(&lx)?;
            let mut losses = vec![report.initial_loss];
            losses.extend(&report.loss_trace);
            let record = SweepRecord {
                experiment: config.experiment.as_str().into(),
                target: TARGET.into(),
                qubits: c.qubits,
                layers: c.layers,
                region_kind: region.kind_str().into(),
                region_size: half_width,
                r2_q_t: r2_opt(&ly, &q_pred)?,
                r2_c_t: r2_opt(&ly, &c_pred)?,
                r2_c_q: r2_opt(&q_pred, &c_pred)?,
                mse: Some(report.final_loss()),
                quantum_calls: Some(fit.quantum_calls),
                seed,
                wall_ms: watch.wall_ms(),
            };
            let trace = LossTrace {
                target: TARGET.into(),
                qubits: c.qubits,
                region_size: half_width,
                losses,
            };
            Ok(Outcome::Solved(Box::new((record, trace)), idx.len()))
        })
        .collect::<Result<_, _>>()?;

    let mut records = Vec::new();
    let mut traces = Vec::new();
    let mut underdetermined = Vec::new();
    let mut failed = Vec::new();
    let mut per_radius = Vec::new();
    for (&radius, outcome) in radii.iter().zip(outcomes) {
        match outcome {
            Outcome::Solved(solved, n_local) => {
                let (record, trace) = *solved;
                per_radius.push(json!({
                    "radius": radius,
                    "n_local": n_local,
                    "quantum_calls": record.quantum_calls,
                    "r2_q_t": record.r2_q_t,
                    "r2_c_q": record.r2_c_q,
                }));
                records.push(record);
                traces.push(trace);
            }
            Outcome::Underdetermined(n_local) => {
                underdetermined.push(json!({ "radius": radius, "n_local": n_local }))
            }
            Outcome::Failed(n_local, error) => {
                failed.push(json!({ "radius": radius, "n_local": n_local, "error": error }))
            }
        }
    }

    let full_floor = full_lattice(c.layers, c.components)?.len();
    let summary = json!({
        "n_samples": data.len(),
        "pca_explained_variance_ratio": pipeline.pca.explained_variance_ratio,
        "pca_cumulative_variance": pipeline.pca.explained_variance_ratio.iter().sum::<f64>(),
        "separable_columns": columns,
        "full_lattice_sample_floor": full_floor,
        "full_lattice_invocation_bound": invocation_bound(full_floor as u64, 1.0, c.bound_epsilon, c.bound_delta),
        "separable_invocation_bound": invocation_bound(columns as u64, 1.0, c.bound_epsilon, c.bound_delta),
        "bound_epsilon": c.bound_epsilon,
        "bound_delta": c.bound_delta,
        "per_radius": per_radius,
        "underdetermined": underdetermined,
        "failed": failed,
    });
    Ok(RunOutput {
        records,
        traces,
        tables: Vec::new(),
        documents: Vec::new(),
        summary,
    })
}
