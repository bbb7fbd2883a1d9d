use qsurrogate_core::optim::{train, TrainConfig};
use qsurrogate_core::regions::Region;
use qsurrogate_core::reupload::{AnsatzKind, ReuploadModel};
use qsurrogate_core::surrogate::{fit_exact, fit_least_squares, fit_separable, nodes_in_region};
use qsurrogate_core::targets::{grid_sample, SampleGrid, TargetFunction, TargetName};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

#[test]
fn trained_line_ansatz_is_reproduced_on_its_patch() {
    let target = TargetFunction::new(TargetName::CombinedOscillator, 0);
    let (xs, ys) = grid_sample(&target, &SampleGrid::square(-1.0, 1.0, 8, 2).unwrap()).unwrap();
    let init = ReuploadModel::init_normal(AnsatzKind::LineAnsatz, 1, 2, 2, 0.01, 3).unwrap();
    let report = train(&init, &xs, &ys, &TrainConfig::nelder_mead(200)).unwrap();
    let model = init.with_theta(report.final_theta).unwrap();

    let patch = Region::HyperCube { half_width: 1.0, dim: 2 };
    let nodes = nodes_in_region(&patch, 2, 2).unwrap();
    let fit = fit_exact(&model.forward_many(&nodes).unwrap(), &model.spectrum(), &nodes).unwrap();
    assert_eq!(fit.quantum_calls, 25);
    assert!(fit.max_residual < 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let diff = (fit.surrogate.evaluate(&x).unwrap() - model.forward(&x).unwrap()).abs();
        assert!(diff < 1e-8, "{diff}");
    }
}

#[test]
fn basic1d_spectrum_has_no_mass_beyond_its_band() {
    let mut planner = FftPlanner::<f64>::new();
    for q in 1..=3 {
        for l in 1..=3 {
            let m = ReuploadModel::init_normal(AnsatzKind::Basic1D, q, l, 1, 1.0, (10 * q + l) as u64).unwrap();
            let band = q * l;
            // 2·band + 2 points: bins 0..=band plus the Nyquist bin band + 1
            let n = 2 * band + 2;
            let mut buf: Vec<Complex<f64>> = (0..n)
                .map(|i| {
                    let x = std::f64::consts::TAU * i as f64 / n as f64;
                    Complex::new(m.forward(&[x]).unwrap(), 0.0)
                })
                .collect();
            planner.plan_fft_forward(n).process(&mut buf);
            let nyquist = buf[band + 1].norm() / n as f64;
            assert!(nyquist < 1e-9, "q={q} L={l}: {nyquist}");
        }
    }
}

#[test]
fn separable_fit_never_beats_full_lattice_on_model_data() {
    let model = ReuploadModel::init_normal(AnsatzKind::LineAnsatz, 1, 2, 2, 1.0, 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let xs: Vec<Vec<f64>> = (0..80)
        .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
        .collect();
    let ys = model.forward_many(&xs).unwrap();
    let sep = fit_separable(&ys, &xs, 2).unwrap();
    let full = fit_least_squares(&ys, &model.spectrum(), &xs).unwrap();
    let g = full.surrogate.evaluate_many(&xs).unwrap();
    let full_mse = g.iter().zip(&ys).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 80.0;
    assert!(full_mse < 1e-20);
    assert!(sep.mse >= full_mse);
}
