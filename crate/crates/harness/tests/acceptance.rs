//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line. Run with `cargo test -p qsurrogate-harness --test
//! acceptance -- --nocapture --test-threads 1` to see the lines in order.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use qsurrogate_core::dataprep::{load_iris_2c2f, Standardizer, VarianceEstimator};
use qsurrogate_core::optim::{mse_loss, parameter_shift_grad};
use qsurrogate_core::qsvm::QuantumKernel;
use qsurrogate_core::regions::Region;
use qsurrogate_core::reupload::{AnsatzKind, ReuploadModel};
use qsurrogate_core::surrogate::{fit_exact, nodes_in_region};
use qsurrogate_harness::experiments;
use qsurrogate_harness::{run_to_dir, ExperimentConfig, ExperimentId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

fn verdict(id: &str, pass: bool, detail: String) {
    println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn random_model(rng: &mut ChaCha8Rng, kind: AnsatzKind, layers: usize, d: usize) -> ReuploadModel {
    let qubits = match kind {
        AnsatzKind::Basic1D => rng.random_range(1..=3),
        AnsatzKind::LineAnsatz => rng.random_range(1..=2),
        AnsatzKind::StronglyEntanglingReupload => d,
    };
    ReuploadModel::init_normal(kind, qubits, layers, d, 1.0, rng.random()).unwrap()
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.random_range(-PI..PI)).collect()).collect()
}

#[test]
fn ac1_fourier_exactness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let kinds = [
        AnsatzKind::Basic1D,
        AnsatzKind::LineAnsatz,
        AnsatzKind::StronglyEntanglingReupload,
    ];
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let kind = kinds[i % 3];
        let layers = rng.random_range(1..=3);
        let d = match kind {
            AnsatzKind::Basic1D => 1,
            _ => rng.random_range(1..=2),
        };
        let model = random_model(&mut rng, kind, layers, d);
        let lattice = model.spectrum();
        let degree = lattice.axis_bounds().into_iter().max().unwrap() as usize;
        let region = Region::HyperCube { half_width: PI, dim: d };
        let nodes = nodes_in_region(&region, degree, d).unwrap();
        let fit = fit_exact(&model.forward_many(&nodes).unwrap(), &lattice, &nodes).unwrap();
        for x in random_points(&mut rng, 100, d) {
            let dev = (fit.surrogate.evaluate(&x).unwrap() - model.forward(&x).unwrap()).abs();
            worst = worst.max(dev);
        }
    }
    let elapsed = started.elapsed();
    verdict(
        "AC1 fourier exactness",
        worst < 1e-8 && elapsed < Duration::from_secs(30),
        format!("50 models, max deviation {worst:.2e} (< 1e-8), {} (< 30s)", secs(elapsed)),
    );
}

#[test]
fn ac2_spectrum_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut planner = FftPlanner::<f64>::new();
    let mut worst: f64 = 0.0;
    for qubits in 1..=3 {
        for layers in 1..=3 {
            let model =
                ReuploadModel::init_normal(AnsatzKind::Basic1D, qubits, layers, 1, 1.0, rng.random()).unwrap();
            let band = qubits * layers;
            let n = 2 * band + 2;
            let mut buf: Vec<Complex<f64>> = (0..n)
                .map(|i| Complex::new(model.forward(&[2.0 * PI * i as f64 / n as f64]).unwrap(), 0.0))
                .collect();
            planner.plan_fft_forward(n).process(&mut buf);
            // bins band+1 ..= n-band-1 lie outside {-band..band}
            for c in &buf[band + 1..n - band] {
                worst = worst.max(c.norm() / n as f64);
            }
        }
    }
    verdict(
        "AC2 spectrum law",
        worst < 1e-9,
        format!("q, L in 1..3, max out-of-band magnitude {worst:.2e} (< 1e-9)"),
    );
}

#[test]
fn ac3_sweep1d_trend() {
    let started = Instant::now();
    let run = experiments::run(&ExperimentConfig::new(ExperimentId::Sweep1d)).unwrap();
    let elapsed = started.elapsed();
    let mut pass = elapsed < Duration::from_secs(300);
    let mut parts = Vec::new();
    for entry in run.summary["per_qubits"].as_array().unwrap() {
        let get = |k: &str| entry[k].as_f64().unwrap_or(f64::NAN);
        let (small, large) = (get("r2_smallest_window"), get("r2_largest_window"));
        let (first, last) = (get("median_r2_first_quartile"), get("median_r2_last_quartile"));
        pass &= small > large && first > last;
        parts.push(format!(
            "q={}: ends {small:.3} vs {large:.3}, quartile medians {first:.3} vs {last:.3}",
            entry["qubits"]
        ));
    }
    verdict(
        "AC3 sweep1d trend",
        pass,
        format!("{}; {} (< 300s)", parts.join("; "), secs(elapsed)),
    );
}

#[test]
fn ac4_sweep2d_suite() {
    let started = Instant::now();
    let run = experiments::run(&ExperimentConfig::new(ExperimentId::Sweep2dSuite)).unwrap();
    let elapsed = started.elapsed();
    let exact: Vec<f64> = run.records.iter().filter_map(|r| r.r2_c_q).collect();
    let min_c_q = exact.iter().cloned().fold(f64::INFINITY, f64::min);
    let trend = run.summary["targets_with_decreasing_r2_q_t"].as_u64().unwrap();
    let pass = run.records.len() == 247
        && !exact.is_empty()
        && min_c_q >= 0.999
        && trend >= 9
        && elapsed < Duration::from_secs(1800);
    verdict(
        "AC4 sweep2d suite",
        pass,
        format!(
            "{} rows, {} exact fits with min R2_CQ {min_c_q:.6} (>= 0.999), decreasing R2_QT on {trend}/13 targets (>= 9), {} (< 1800s)",
            run.records.len(),
            exact.len(),
            secs(elapsed)
        ),
    );
}

#[test]
fn ac5_qsvm_pipeline() {
    let started = Instant::now();
    let config = ExperimentConfig::new(ExperimentId::QsvmDemo);
    let run = experiments::run(&config).unwrap();
    let elapsed = started.elapsed();
    let s = &run.summary;
    let accuracy = s["train_accuracy"].as_f64().unwrap();
    let local = s["demo_r2_q_t_local"].as_f64().unwrap_or(f64::NAN);
    let min_c_q = run
        .records
        .iter()
        .map(|r| r.r2_c_q.unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    let patch = s["demo_patch_points"].as_u64().unwrap();
    let checks = [
        (0.80..=0.90).contains(&accuracy),
        local >= 0.90,
        min_c_q >= 0.999,
        (28..=32).contains(&patch),
        elapsed < Duration::from_secs(300),
    ];
    verdict(
        "AC5 qsvm pipeline",
        checks.iter().all(|&c| c),
        format!(
            "accuracy {accuracy:.3} [{}] (in [0.80, 0.90]), local R2 at r=1.0 {local:.3} [{}] (>= 0.90), min R2_CQ over {} radii {min_c_q:.6} [{}] (>= 0.999), |P(1.0)| = {patch} [{}] (30 +- 2), {} [{}] (< 300s)",
            ok(checks[0]),
            ok(checks[1]),
            run.records.len(),
            ok(checks[2]),
            ok(checks[3]),
            secs(elapsed),
            ok(checks[4]),
        ),
    );
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "miss"
    }
}

fn wdbc_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/wdbc.data")
}

#[test]
fn ac6_wdbc_limits() {
    let started = Instant::now();
    let mut config = ExperimentConfig::new(ExperimentId::WdbcLimits);
    config.wdbc_path = Some(wdbc_path());
    let run = experiments::run(&config).unwrap();
    let elapsed = started.elapsed();
    let s = &run.summary;
    let floor = s["full_lattice_sample_floor"].as_u64().unwrap();
    let columns = s["separable_columns"].as_u64().unwrap();
    let per_radius = s["per_radius"].as_array().unwrap();
    let calls_match = per_radius.len() == run.records.len()
        && per_radius
            .iter()
            .all(|p| p["quantum_calls"].as_u64().is_some() && p["quantum_calls"] == p["n_local"]);
    let min_c_q = run
        .records
        .iter()
        .map(|r| r.r2_c_q.unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    let underdetermined = s["underdetermined"].as_array().unwrap().len();
    let pass = !run.records.is_empty()
        && min_c_q > 0.7
        && floor == 117_649
        && columns == 37
        && calls_match
        && elapsed < Duration::from_secs(1200);
    verdict(
        "AC6 wdbc limits",
        pass,
        format!(
            "{} solvable radii ({underdetermined} underdetermined), min R2_CQ {min_c_q:.3} (> 0.7), floor {floor} (117649), {columns} columns (37), calls == n_local: {calls_match}, {} (< 1200s)",
            run.records.len(),
            secs(elapsed)
        ),
    );
}

#[test]
fn ac7_gradient_check() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kinds = [
        AnsatzKind::Basic1D,
        AnsatzKind::LineAnsatz,
        AnsatzKind::StronglyEntanglingReupload,
    ];
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let kind = kinds[i % 3];
        let d = if kind == AnsatzKind::Basic1D { 1 } else { 2 };
        let layers = rng.random_range(1..=2);
        let model = random_model(&mut rng, kind, layers, d);
        let xs = random_points(&mut rng, 8, d);
        let ys: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let grad = parameter_shift_grad(&model, &xs, &ys).unwrap();
        for (j, g) in grad.iter().enumerate() {
            let mut plus = model.theta.clone();
            let mut minus = model.theta.clone();
            plus[j] += h;
            minus[j] -= h;
            let fp = mse_loss(&model.with_theta(plus).unwrap(), &xs, &ys).unwrap();
            let fm = mse_loss(&model.with_theta(minus).unwrap(), &xs, &ys).unwrap();
            worst = worst.max((g - (fp - fm) / (2.0 * h)).abs());
        }
    }
    let elapsed = started.elapsed();
    verdict(
        "AC7 gradient check",
        worst < 1e-6 && elapsed < Duration::from_secs(10),
        format!("20 models, max |shift - FD| {worst:.2e} (< 1e-6), {} (< 10s)", secs(elapsed)),
    );
}

#[test]
fn ac8_kernel_properties() {
    let data = load_iris_2c2f().unwrap();
    let (_, xs) = Standardizer::fit_transform(&data.x, VarianceEstimator::Population).unwrap();
    let k = QuantumKernel::default().matrix(&xs).unwrap();
    let n = k.len();
    let gram = DMatrix::from_fn(n, n, |i, j| k[i][j]);
    let asym = (&gram - gram.transpose()).amax();
    let diag = (0..n).map(|i| (gram[(i, i)] - 1.0).abs()).fold(0.0, f64::max);
    let sym = (&gram + gram.transpose()) * 0.5;
    let min_eig = sym.symmetric_eigenvalues().min();
    verdict(
        "AC8 kernel properties",
        n == 100 && asym <= 1e-12 && diag <= 1e-10 && min_eig >= -1e-10,
        format!("{n}x{n} Gram, asymmetry {asym:.1e} (<= 1e-12), diagonal error {diag:.1e} (<= 1e-10), min eigenvalue {min_eig:.2e} (>= -1e-10)"),
    );
}

#[test]
fn ac9_determinism() {
    let mut identical = Vec::new();
    for id in [ExperimentId::Sweep1d, ExperimentId::Patch2dDemo, ExperimentId::QsvmDemo] {
        let config = ExperimentConfig::new(id);
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for dir in &dirs {
            run_to_dir(&config, dir.path()).unwrap();
        }
        let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|n| n.to_string_lossy().ends_with(".csv"))
            .collect();
        names.sort();
        let same = !names.is_empty()
            && names.iter().all(|n| {
                std::fs::read(dirs[0].path().join(n)).unwrap() == std::fs::read(dirs[1].path().join(n)).unwrap()
            });
        identical.push((id.as_str(), names.len(), same));
    }
    verdict(
        "AC9 determinism",
        identical.iter().all(|t| t.2),
        identical
            .iter()
            .map(|(id, n, same)| format!("{id}: {n} CSVs {}", if *same { "identical" } else { "DIFFER" }))
            .collect::<Vec<_>>()
            .join(", "),
    );
}
