//! Growing 1D windows over the truncated-Fourier target, one Basic1D model
//! per (qubit count, window).

use qsurrogate_core::optim::train;
use qsurrogate_core::regions::{select, sweep, SweepSpec};
use qsurrogate_core::reupload::{AnsatzKind, ReuploadModel};
use qsurrogate_core::targets::{fourier1d_target, SampleGrid, TargetName};
use rayon::prelude::*;
use serde_json::json;

use super::{gather, median, r2_opt, Stopwatch};
use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::output::{LossTrace, RunOutput, SweepRecord};
use crate::seeds::cell_seed;

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let c = &config.sweep1d;
    let grid = SampleGrid::with_rate(c.domain_lo, c.domain_hi, c.sample_rate)?;
    let xs = grid.points();
    let ys: Vec<f64> = xs.iter().map(|x| fourier1d_target(x[0])).collect();
    let windows = sweep(&SweepSpec::Intervals {
        start: c.domain_lo,
        initial_width: c.initial_width,
        increment: c.increment,
        max_width: c.domain_hi - c.domain_lo,
    })?;
    let cells: Vec<(usize, usize)> = (0..c.qubit_counts.len())
        .flat_map(|q| (0..windows.len()).map(move |w| (q, w)))
        .collect();

    let results: Vec<(SweepRecord, LossTrace, usize)> = cells
        .par_iter()
        .enumerate()
        .map(|(index, &(qi, wi))| -> Result<_, HarnessError> {
            let watch = Stopwatch::start(config.record_timing);
            let qubits = c.qubit_counts[qi];
            let region = &windows[wi];
            let seed = cell_seed(config.seed, index);
            let idx = select(&xs, region)?;
            let (lx, ly) = (gather(&xs, &idx), gather(&ys, &idx));
            let model = ReuploadModel::init_normal(AnsatzKind::Basic1D, qubits, c.layers, 1, c.init_std, seed)?;
            let mut train_cfg = c.train.clone();
            train_cfg.seed = seed;
            let report = train(&model, &lx, &ly, &train_cfg)?;
            let trained = model.with_theta(report.final_theta.clone())?;
            let pred = trained.forward_many(&lx)?;
            let record = SweepRecord {
                experiment: config.experiment.as_str().into(),
                target: TargetName::Fourier1d.as_str().into(),
                qubits,
                layers: c.layers,
                region_kind: region.kind_str().into(),
                region_size: region.size(),
                r2_q_t: r2_opt(&ly, &pred)?,
                r2_c_t: None,
                r2_c_q: None,
                mse: Some(report.final_loss()),
                quantum_calls: None,
                seed,
                wall_ms: watch.wall_ms(),
            };
            let mut losses = vec![report.initial_loss];
            losses.extend(&report.loss_trace);
            let trace = LossTrace {
                target: record.target.clone(),
                qubits,
                region_size: record.region_size,
                losses,
            };
            Ok((record, trace, idx.len()))
        })
        .collect::<Result<_, _>>()?;

    let mut per_qubits = Vec::new();
    for (qi, &qubits) in c.qubit_counts.iter().enumerate() {
        let r2: Vec<f64> = results[qi * windows.len()..(qi + 1) * windows.len()]
            .iter()
            .map(|(r, _, _)| r.r2_q_t.unwrap_or(f64::NAN))
            .collect();
        let quarter = r2.len().div_ceil(4);
        let first = median(&r2[..quarter]);
        let last = median(&r2[r2.len() - quarter..]);
        let (smallest, largest) = (r2[0], r2[r2.len() - 1]);
        per_qubits.push(json!({
            "qubits": qubits,
            "r2_smallest_window": smallest,
            "r2_largest_window": largest,
            "median_r2_first_quartile": first,
            "median_r2_last_quartile": last,
            "trend_holds": smallest > largest && first > last,
        }));
    }
    let summary = json!({
        "n_samples": xs.len(),
        "n_windows": windows.len(),
        "first_window_samples": results.first().map(|r| r.2),
        "per_qubits": per_qubits,
    });
    let (records, traces) = results.into_iter().map(|(r, t, _)| (r, t)).unzip();
    Ok(RunOutput {
        records,
        traces,
        tables: Vec::new(),
        documents: Vec::new(),
        summary,
    })
}
