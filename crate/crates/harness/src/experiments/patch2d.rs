//! Fixed 2D patches: a quantum surrogate trained on one grid square, then a
//! classical surrogate solved from its node queries on a second square.

use qsurrogate_core::optim::train;
use qsurrogate_core::regions::{select, Region};
use qsurrogate_core::reupload::{AnsatzKind, ReuploadModel};
use qsurrogate_core::surrogate::{fit_exact, nodes_in_region};
use qsurrogate_core::targets::{grid_sample, SampleGrid, TargetFunction};
use serde_json::json;

use super::{gather, r2_opt, Stopwatch};
use crate::config::{ExperimentConfig, PatchSpec};
use crate::error::HarnessError;
use crate::output::{LossTrace, RunOutput, SweepRecord, Table};
use crate::seeds::cell_seed;

fn grid_square(p: &PatchSpec, grid: &SampleGrid) -> Region {
    Region::GridSquare {
        anchor_row: p.anchor_row,
        anchor_col: p.anchor_col,
        edge: p.edge,
        grid: grid.clone(),
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let c = &config.patch2d;
    let target = TargetFunction::new(c.target, c.target_seed);
    let grid = SampleGrid::square(c.domain_lo, c.domain_hi, c.grid_points, 2)?;
    let (xs, ys) = grid_sample(&target, &grid)?;
    let quantum_region = grid_square(&c.quantum_patch, &grid);
    let classical_region = grid_square(&c.classical_patch, &grid);

    let watch = Stopwatch::start(config.record_timing);
    let seed = cell_seed(config.seed, 0);
    let q_idx = select(&xs, &quantum_region)?;
    let (qx, qy) = (gather(&xs, &q_idx), gather(&ys, &q_idx));
    let model = ReuploadModel::init_normal(AnsatzKind::LineAnsatz, 1, c.layers, 2, c.init_std, seed)?;
    let mut train_cfg = c.train.clone();
    train_cfg.seed = seed;
    let report = train(&model, &qx, &qy, &train_cfg)?;
    let quantum = model.with_theta(report.final_theta.clone())?;
    let r2_q_t = r2_opt(&qy, &quantum.forward_many(&qx)?)?;
    let quantum_ms = watch.wall_ms();

    // the quantum surrogate is only queried at the nodes
    let watch = Stopwatch::start(config.record_timing);
    let nodes = nodes_in_region(&classical_region, c.layers, 2)?;
    let node_values = quantum.forward_many(&nodes)?;
    let fit = fit_exact(&node_values, &quantum.spectrum(), &nodes)?;
    let classical = &fit.surrogate;
    let c_idx = select(&xs, &classical_region)?;
    let (cx, cy) = (gather(&xs, &c_idx), gather(&ys, &c_idx));
    let q_on_c = quantum.forward_many(&cx)?;
    let c_on_c = classical.evaluate_many(&cx)?;
    let r2_c_q = r2_opt(&q_on_c, &c_on_c)?;
    let r2_c_t = r2_opt(&cy, &c_on_c)?;
    let r2_q_t_classical_patch = r2_opt(&cy, &q_on_c)?;
    let classical_ms = watch.wall_ms();

    let record = |region: &Region, q_t, c_t, c_q, mse, calls, wall_ms| SweepRecord {
        experiment: config.experiment.as_str().into(),
        target: c.target.as_str().into(),
        qubits: 1,
        layers: c.layers,
        region_kind: region.kind_str().into(),
        region_size: region.size(),
        r2_q_t: q_t,
        r2_c_t: c_t,
        r2_c_q: c_q,
        mse,
        quantum_calls: calls,
        seed,
        wall_ms,
    };
    let records = vec![
        record(&quantum_region, r2_q_t, None, None, Some(report.final_loss()), None, quantum_ms),
        record(
            &classical_region,
            r2_q_t_classical_patch,
            r2_c_t,
            r2_c_q,
            None,
            Some(fit.quantum_calls),
            classical_ms,
        ),
    ];
    let mut losses = vec![report.initial_loss];
    losses.extend(&report.loss_trace);
    let traces = vec![LossTrace {
        target: c.target.as_str().into(),
        qubits: 1,
        region_size: quantum_region.size(),
        losses,
    }];

    let eval_grid = SampleGrid::square(c.domain_lo, c.domain_hi, c.eval_grid_points, 2)?;
    let mut rows = Vec::with_capacity(eval_grid.len());
    for x in eval_grid.points() {
        rows.push(vec![
            x[0],
            x[1],
            target.eval(&x)?,
            quantum.forward(&x)?,
            classical.evaluate(&x)?,
            f64::from(u8::from(quantum_region.contains(&x)?)),
            f64::from(u8::from(classical_region.contains(&x)?)),
        ]);
    }
    let header = ["x1", "x2", "target", "quantum", "classical", "in_quantum_patch", "in_classical_patch"];
    let tables = vec![Table {
        file_name: "eval_grid.csv".into(),
        header: header.iter().map(|s| s.to_string()).collect(),
        rows,
    }];

    let summary = json!({
        "target": c.target.as_str(),
        "grid_points": xs.len(),
        "quantum_patch_samples": q_idx.len(),
        "classical_patch_samples": c_idx.len(),
        "eval_grid_points": eval_grid.len(),
        "r2_q_t_quantum_patch": r2_q_t,
        "r2_q_t_classical_patch": r2_q_t_classical_patch,
        "r2_c_t": r2_c_t,
        "r2_c_q": r2_c_q,
        "quantum_calls": fit.quantum_calls,
        "expected_quantum_calls": (2 * c.layers + 1).pow(2),
        "condition": fit.condition,
        "max_node_residual": fit.max_residual,
        "final_train_mse": report.final_loss(),
        "optimizer_steps": report.steps_run,
    });
    Ok(RunOutput {
        records,
        traces,
        tables,
        documents: vec![
            ("quantum_surrogate.json".into(), quantum.to_json()),
            ("classical_surrogate.json".into(), classical.to_json()),
        ],
        summary,
    })
}
