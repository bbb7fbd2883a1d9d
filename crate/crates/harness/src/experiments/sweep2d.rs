//! Anchored grid-square sweep over the 2D target suite. Each cell trains a
//! quantum surrogate, fits the white-box exact classical surrogate to it, and
//! fits a direct separable surrogate to the target samples.

use qsurrogate_core::optim::train;
use qsurrogate_core::regions::{select, sweep, Region, SweepSpec};
use qsurrogate_core::reupload::{AnsatzKind, ReuploadModel};
use qsurrogate_core::surrogate::{fit_exact, fit_separable_with, nodes_in_region, RankPolicy};
use qsurrogate_core::targets::{grid_sample, SampleGrid, TargetFunction, TargetName};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{gather, r2_opt, Stopwatch};
use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::output::{LossTrace, RunOutput, SweepRecord};
use crate::seeds::cell_seed;

#[derive(Debug, Clone, Serialize)]
struct Failure {
    target: &'static str,
    edge: usize,
    stage: &'static str,
    error: String,
}

struct Cell {
    record: SweepRecord,
    trace: Option<LossTrace>,
    failures: Vec<Failure>,
}

fn edge_of(region: &Region) -> usize {
    match region {
        Region::GridSquare { edge, .. } => *edge,
        _ => unreachable!("sweep2d only builds grid squares"),
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let c = &config.sweep2d;
    let grid = SampleGrid::square(c.domain_lo, c.domain_hi, c.grid_points, 2)?;
    let windows = sweep(&SweepSpec::GridSquares {
        grid: grid.clone(),
        anchor_row: c.anchor_row,
        anchor_col: c.anchor_col,
        min_edge: c.min_edge,
        max_edge: c.max_edge,
    })?;
    let samples: Vec<(Vec<Vec<f64>>, Vec<f64>)> = c
        .targets
        .iter()
        .map(|&t| grid_sample(&TargetFunction::new(t, c.target_seed), &grid))
        .collect::<Result<_, _>>()?;
    let n_cells = c.targets.len() * windows.len();

    let cells: Vec<Cell> = (0..n_cells)
        .into_par_iter()
        .map(|index| {
            let (ti, wi) = (index / windows.len(), index % windows.len());
            run_cell(config, c.targets[ti], &samples[ti], &windows[wi], cell_seed(config.seed, index))
        })
        .collect::<Result<_, _>>()?;

    let mut per_target = Vec::new();
    let mut trend_count = 0;
    for (ti, t) in c.targets.iter().enumerate() {
        let rows = &cells[ti * windows.len()..(ti + 1) * windows.len()];
        let first = rows.first().and_then(|r| r.record.r2_q_t);
        let last = rows.last().and_then(|r| r.record.r2_q_t);
        let decreasing = matches!((first, last), (Some(a), Some(b)) if a > b);
        trend_count += usize::from(decreasing);
        let min_c_q = rows
            .iter()
            .filter_map(|r| r.record.r2_c_q)
            .fold(f64::INFINITY, f64::min);
        per_target.push(json!({
            "target": t.as_str(),
            "r2_q_t_first_window": first,
            "r2_q_t_last_window": last,
            "decreasing": decreasing,
            "exact_fits": rows.iter().filter(|r| r.record.r2_c_q.is_some()).count(),
            "min_r2_c_q": if min_c_q.is_finite() { Some(min_c_q) } else { None },
        }));
    }
    let failures: Vec<&Failure> = cells.iter().flat_map(|cell| &cell.failures).collect();
    let exact_r2: Vec<f64> = cells.iter().filter_map(|cell| cell.record.r2_c_q).collect();
    let summary = json!({
        "n_targets": c.targets.len(),
        "n_windows": windows.len(),
        "exact_fits": exact_r2.len(),
        "min_r2_c_q": exact_r2.iter().cloned().fold(f64::INFINITY, f64::min),
        "targets_with_decreasing_r2_q_t": trend_count,
        "per_target": per_target,
        "failures": failures,
    });
    let mut records = Vec::with_capacity(cells.len());
    let mut traces = Vec::new();
    for cell in cells {
        records.push(cell.record);
        traces.extend(cell.trace);
    }
    Ok(RunOutput {
        records,
        traces,
        tables: Vec::new(),
        documents: Vec::new(),
        summary,
    })
}

fn run_cell(
    config: &ExperimentConfig,
    target: TargetName,
    (xs, ys): &(Vec<Vec<f64>>, Vec<f64>),
    region: &Region,
    seed: u64,
) -> Result<Cell, HarnessError> {
    let c = &config.sweep2d;
    let watch = Stopwatch::start(config.record_timing);
    let edge = edge_of(region);
    let fail = |stage, e: qsurrogate_core::Error| Failure {
        target: target.as_str(),
        edge,
        stage,
        error: e.to_string(),
    };
    let mut failures = Vec::new();
    let idx = select(xs, region)?;
    let (lx, ly) = (gather(xs, &idx), gather(ys, &idx));

    let model = ReuploadModel::init_normal(AnsatzKind::LineAnsatz, 1, c.layers, 2, c.init_std, seed)?;
    let mut train_cfg = c.train.clone();
    train_cfg.seed = seed;
    let (mut r2_q_t, mut r2_c_q, mut mse, mut calls, mut trace) = (None, None, None, None, None);
    match train(&model, &lx, &ly, &train_cfg) {
        Ok(report) => {
            let quantum = model.with_theta(report.final_theta.clone())?;
            let q_pred = quantum.forward_many(&lx)?;
            r2_q_t = r2_opt(&ly, &q_pred)?;
            mse = Some(report.final_loss());
            let mut losses = vec![report.initial_loss];
            losses.extend(&report.loss_trace);
            trace = Some(LossTrace {
                target: target.as_str().into(),
                qubits: 1,
                region_size: region.size(),
                losses,
            });
            let exact = nodes_in_region(region, c.layers, 2).and_then(|nodes| {
                let values = quantum.forward_many(&nodes)?;
                fit_exact(&values, &quantum.spectrum(), &nodes)
            });
            match exact {
                Ok(fit) => {
                    r2_c_q = r2_opt(&q_pred, &fit.surrogate.evaluate_many(&lx)?)?;
                    calls = Some(fit.quantum_calls);
                }
                Err(e) => failures.push(fail("exact_fit", e)),
            }
        }
        Err(e) => failures.push(fail("train", e)),
    }

    let k_max = edge.div_ceil(2);
    let r2_c_t = match fit_separable_with(&ly, &lx, k_max, RankPolicy::MinimumNorm) {
        Ok(fit) => r2_opt(&ly, &fit.surrogate.evaluate_many(&lx)?)?,
        Err(e) => {
            failures.push(fail("direct_separable", e));
            None
        }
    };

    Ok(Cell {
        record: SweepRecord {
            experiment: config.experiment.as_str().into(),
            target: target.as_str().into(),
            qubits: 1,
            layers: c.layers,
            region_kind: region.kind_str().into(),
            region_size: region.size(),
            r2_q_t,
            r2_c_t,
            r2_c_q,
            mse,
            quantum_calls: calls,
            seed,
            wall_ms: watch.wall_ms(),
        },
        trace,
        failures,
    })
}
