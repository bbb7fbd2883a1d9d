//! Quantum-kernel SVM on the Iris subset as the black-box model, local
//! quantum surrogates on circular patches, and exact classical surrogates of
//! those.

use qsurrogate_core::dataprep::{load_iris_2c2f, Standardizer, VarianceEstimator};
use qsurrogate_core::metrics::{accuracy, relative_error};
use qsurrogate_core::optim::train;
use qsurrogate_core::qsvm::{QuantumKernel, QuantumSvm};
use qsurrogate_core::regions::{progression, select, Region};
use qsurrogate_core::reupload::{AnsatzKind, ReuploadModel};
use qsurrogate_core::surrogate::{fit_exact, nodes_in_region, FourierSurrogate};
use qsurrogate_core::targets::{GridAxis, SampleGrid};
use rayon::prelude::*;
use serde_json::json;

use super::{gather, r2_opt, Stopwatch};
use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::output::{LossTrace, RunOutput, SweepRecord, Table};
use crate::seeds::cell_seed;

const TARGET: &str = "qsvm_iris";
const N_FEATURES: usize = 2;

struct Patch {
    record: SweepRecord,
    trace: LossTrace,
    quantum: ReuploadModel,
    classical: FourierSurrogate,
    n_local: usize,
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let c = &config.qsvm;
    let data = load_iris_2c2f()?;
    let (_, xs) = Standardizer::fit_transform(&data.x, c.estimator)?;
    let y = data.signed_labels();
    let svm = QuantumSvm::fit(QuantumKernel::default(), &xs, &y, c.c)?;
    let predicted = xs.iter().map(|x| svm.predict(x)).collect::<Result<Vec<_>, _>>()?;
    let train_accuracy = accuracy(&y, &predicted)?;
    let z = xs.iter().map(|x| svm.z(x)).collect::<Result<Vec<_>, _>>()?;

    let mut radii = progression(c.radius_start, c.radius_step, c.radius_end)?;
    if !radii.iter().any(|r| (r - c.demo_radius).abs() < 1e-12) {
        radii.push(c.demo_radius);
        radii.sort_by(f64::total_cmp);
    }
    let patches: Vec<Result<Patch, String>> = radii
        .par_iter()
        .enumerate()
        .map(|(index, &radius)| fit_patch(config, &xs, &z, radius, cell_seed(config.seed, index)))
        .collect::<Result<_, _>>()?;

    let mut records = Vec::new();
    let mut traces = Vec::new();
    let mut skipped = Vec::new();
    let mut per_radius = Vec::new();
    let mut demo = None;
    for (radius, patch) in radii.iter().zip(patches) {
        match patch {
            Ok(p) => {
                per_radius.push(json!({
                    "radius": radius,
                    "n_local": p.n_local,
                    "r2_q_t": p.record.r2_q_t,
                    "r2_c_q": p.record.r2_c_q,
                    "r2_c_t": p.record.r2_c_t,
                    "initial_loss": p.trace.losses[0],
                    "final_loss": p.record.mse,
                }));
                records.push(p.record.clone());
                traces.push(p.trace.clone());
                if (radius - c.demo_radius).abs() < 1e-12 {
                    demo = Some(p);
                }
            }
            Err(reason) => skipped.push(json!({ "radius": radius, "reason": reason })),
        }
    }
    let demo = demo.ok_or_else(|| {
        HarnessError::Core(qsurrogate_core::Error::InvalidRegion(format!(
            "demo patch r = {} could not be fitted",
            c.demo_radius
        )))
    })?;

    // global view of the demo surrogates over all data points
    let q_all = demo.quantum.forward_many(&xs)?;
    let r2_global_data = r2_opt(&z, &q_all)?;

    let lo: Vec<f64> = (0..N_FEATURES).map(|j| xs.iter().map(|x| x[j]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..N_FEATURES).map(|j| xs.iter().map(|x| x[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let mesh = SampleGrid::new(
        (0..N_FEATURES)
            .map(|j| GridAxis {
                lo: lo[j],
                hi: hi[j],
                count: c.mesh_points,
                include_end: true,
            })
            .collect(),
    )?;
    let mesh_x = mesh.points();
    let demo_region = Region::Ball {
        center: c.center.clone(),
        radius: c.demo_radius,
    };
    let mesh_z = mesh_x.par_iter().map(|x| svm.z(x)).collect::<Result<Vec<_>, _>>()?;
    let mesh_q = demo.quantum.forward_many(&mesh_x)?;
    let mesh_c = demo.classical.evaluate_many(&mesh_x)?;
    let rel_q = relative_error(&mesh_z, &mesh_q)?;
    let rel_c = relative_error(&mesh_z, &mesh_c)?;
    let inside = select(&mesh_x, &demo_region)?;
    let r2_mesh_local = r2_opt(&gather(&mesh_z, &inside), &gather(&mesh_q, &inside))?;
    let r2_mesh_global = r2_opt(&mesh_z, &mesh_q)?;
    let mut in_patch = vec![0.0; mesh_x.len()];
    for &i in &inside {
        in_patch[i] = 1.0;
    }
    let rows = (0..mesh_x.len())
        .map(|i| vec![mesh_x[i][0], mesh_x[i][1], mesh_z[i], mesh_q[i], mesh_c[i], rel_q[i], rel_c[i], in_patch[i]])
        .collect();
    let header = ["x1", "x2", "z_qsvm", "quantum", "classical", "rel_err_quantum", "rel_err_classical", "in_patch"];
    let tables = vec![
        Table {
            file_name: "mesh.csv".into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        },
        Table {
            file_name: "data.csv".into(),
            header: ["x1", "x2", "label", "z_qsvm", "quantum"].iter().map(|s| s.to_string()).collect(),
            rows: (0..xs.len()).map(|i| vec![xs[i][0], xs[i][1], y[i], z[i], q_all[i]]).collect(),
        },
    ];

    let count_in_demo = |estimator: VarianceEstimator| -> Result<usize, HarnessError> {
        let (_, s) = Standardizer::fit_transform(&data.x, estimator)?;
        Ok(select(&s, &demo_region)?.len())
    };
    let summary = json!({
        "n_train": xs.len(),
        "train_accuracy": train_accuracy,
        "n_support": svm.model.support.len(),
        "smo_iterations": svm.model.iterations,
        "platt": svm.model.platt,
        "demo_radius": c.demo_radius,
        "demo_patch_points": demo.n_local,
        "demo_patch_points_population_std": count_in_demo(VarianceEstimator::Population)?,
        "demo_patch_points_sample_std": count_in_demo(VarianceEstimator::Sample)?,
        "demo_r2_q_t_local": demo.record.r2_q_t,
        "demo_r2_q_t_mesh_local": r2_mesh_local,
        "demo_r2_q_t_mesh_global": r2_mesh_global,
        "demo_r2_q_t_global_data": r2_global_data,
        "demo_r2_c_q": demo.record.r2_c_q,
        "mesh_points": mesh_x.len(),
        "per_radius": per_radius,
        "skipped": skipped,
    });
    let documents = vec![
        ("qsvm_model.json".into(), svm.model.to_json()),
        ("quantum_surrogate.json".into(), demo.quantum.to_json()),
        ("classical_surrogate.json".into(), demo.classical.to_json()),
    ];
    Ok(RunOutput {
        records,
        traces,
        tables,
        documents,
        summary,
    })
}

/// `Ok(Err(reason))` marks a patch with too few points to score.
fn fit_patch(
    config: &ExperimentConfig,
    xs: &[Vec<f64>],
    z: &[f64],
    radius: f64,
    seed: u64,
) -> Result<Result<Patch, String>, HarnessError> {
    let c = &config.qsvm;
    let watch = Stopwatch::start(config.record_timing);
    let region = Region::Ball {
        center: c.center.clone(),
        radius,
    };
    let idx = select(xs, &region)?;
    if idx.len() < 2 {
        return Ok(Err(format!("{} points in patch", idx.len())));
    }
    let (lx, lz) = (gather(xs, &idx), gather(z, &idx));
    let model = ReuploadModel::init_normal(
        AnsatzKind::StronglyEntanglingReupload,
        N_FEATURES,
        c.layers,
        N_FEATURES,
        c.init_std,
        seed,
    )?;
    let mut train_cfg = c.train.clone();
    train_cfg.seed = seed;
    let report = train(&model, &lx, &lz, &train_cfg)?;
    let quantum = model.with_theta(report.final_theta.clone())?;
    let q_pred = quantum.forward_many(&lx)?;

    let nodes = nodes_in_region(&region, c.layers, N_FEATURES)?;
    let fit = fit_exact(&quantum.forward_many(&nodes)?, &quantum.spectrum(), &nodes)?;
    let c_pred = fit.surrogate.evaluate_many(&lx)?;

    let mut losses = vec![report.initial_loss];
    losses.extend(&report.loss_trace);
    Ok(Ok(Patch {
        record: SweepRecord {
            experiment: config.experiment.as_str().into(),
            target: TARGET.into(),
            qubits: N_FEATURES,
            layers: c.layers,
            region_kind: region.kind_str().into(),
            region_size: region.size(),
            r2_q_t: r2_opt(&lz, &q_pred)?,
            r2_c_t: r2_opt(&lz, &c_pred)?,
            r2_c_q: r2_opt(&q_pred, &c_pred)?,
            mse: Some(report.final_loss()),
            quantum_calls: Some(fit.quantum_calls),
            seed,
            wall_ms: watch.wall_ms(),
        },
        trace: LossTrace {
            target: TARGET.into(),
            qubits: N_FEATURES,
            region_size: radius,
            losses,
        },
        quantum,
        classical: fit.surrogate,
        n_local: idx.len(),
    }))
}
