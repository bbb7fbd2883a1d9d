//! Training of reuploading models: parameter-shift gradients, Adam,
//! Nesterov momentum and Nelder–Mead.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reupload::ReuploadModel;

/// Losses above this (or non-finite) abort training.
pub const DIVERGENCE_LOSS: f64 = 1e6;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

pub const NM_PERTURBATION: f64 = 0.1;
pub const NM_DIAMETER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Adam,
    Nesterov,
    NelderMead,
}

/// `"full"` or a positive integer in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchSize {
    Full,
    Size(usize),
}

impl Serialize for BatchSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BatchSize::Full => s.serialize_str("full"),
            BatchSize::Size(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for BatchSize {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Count(u64),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "full" => Ok(BatchSize::Full),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "batch_size must be \"full\" or an integer, got \"{w}\""
            ))),
            Raw::Count(n) => Ok(BatchSize::Size(n as usize)),
        }
    }
}

fn default_momentum() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    /// Update steps for Adam/Nesterov; iteration cap for Nelder–Mead.
    pub steps: usize,
    /// Unused by Nelder–Mead.
    #[serde(default)]
    pub learning_rate: f64,
    pub batch_size: BatchSize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_momentum")]
    pub momentum: f64,
}

impl TrainConfig {
    pub fn adam(steps: usize, learning_rate: f64, batch_size: BatchSize, seed: u64) -> Self {
        TrainConfig {
            optimizer: OptimizerKind::Adam,
            steps,
            learning_rate,
            batch_size,
            seed,
            momentum: default_momentum(),
        }
    }

    pub fn nesterov(steps: usize, learning_rate: f64, momentum: f64, batch_size: BatchSize, seed: u64) -> Self {
        TrainConfig {
            optimizer: OptimizerKind::Nesterov,
            steps,
            learning_rate,
            batch_size,
            seed,
            momentum,
        }
    }

    pub fn nelder_mead(max_iterations: usize) -> Self {
        TrainConfig {
            optimizer: OptimizerKind::NelderMead,
            steps: max_iterations,
            learning_rate: 0.0,
            batch_size: BatchSize::Full,
            seed: 0,
            momentum: default_momentum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be > 0".into()));
        }
        if self.batch_size == BatchSize::Size(0) {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        match self.optimizer {
            OptimizerKind::Adam | OptimizerKind::Nesterov => {
                if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "learning_rate must be > 0, got {}",
                        self.learning_rate
                    )));
                }
                if self.optimizer == OptimizerKind::Nesterov && !(0.0..1.0).contains(&self.momentum) {
                    return Err(Error::InvalidConfig(format!(
                        "momentum must be in [0, 1), got {}",
                        self.momentum
                    )));
                }
            }
            OptimizerKind::NelderMead => {
                if self.batch_size != BatchSize::Full {
                    return Err(Error::InvalidConfig("Nelder-Mead requires batch_size \"full\"".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Full-sample MSE after the model before any update.
    pub initial_loss: f64,
    /// Full-sample MSE after each step (best vertex for Nelder–Mead).
    pub loss_trace: Vec<f64>,
    pub final_theta: Vec<f64>,
    pub steps_run: usize,
}

impl TrainReport {
    pub fn final_loss(&self) -> f64 {
        self.loss_trace.last().copied().unwrap_or(self.initial_loss)
    }

    /// `step,mse` rows; step 0 is the initial loss.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,mse")?;
        writeln!(out, "0,{}", self.initial_loss)?;
        for (i, l) in self.loss_trace.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, l)?;
        }
        Ok(())
    }
}

fn check_samples(xs: &[Vec<f64>], ys: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::EmptySamples);
    }
    if xs.len() != ys.len() {
        return Err(Error::Dimension {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    Ok(())
}

pub fn mse_loss(model: &ReuploadModel, xs: &[Vec<f64>], ys: &[f64]) -> Result<f64> {
    mse_with(model, &model.theta, xs, ys)
}

fn mse_with(model: &ReuploadModel, theta: &[f64], xs: &[Vec<f64>], ys: &[f64]) -> Result<f64> {
    check_samples(xs, ys)?;
    let mut total = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = model.forward_with(theta, x)? - y;
        total += r * r;
    }
    Ok(total / xs.len() as f64)
}

/// Exact gradient of [`mse_loss`] from `±π/2` shifts of each angle.
///
/// Every angle drives exactly one Pauli rotation (Rot is `RZ·RY·RZ`), so
/// `∂f/∂θ_p = [f(θ + π/2 e_p) − f(θ − π/2 e_p)] / 2`.
pub fn parameter_shift_grad(model: &ReuploadModel, xs: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
    grad_with(model, &model.theta, xs, ys)
}

fn grad_with(model: &ReuploadModel, theta: &[f64], xs: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
    check_samples(xs, ys)?;
    let residuals = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| Ok(model.forward_with(theta, x)? - y))
        .collect::<Result<Vec<f64>>>()?;
    let scale = 2.0 / xs.len() as f64;
    (0..theta.len())
        .into_par_iter()
        .map(|p| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[p] += FRAC_PI_2;
            minus[p] -= FRAC_PI_2;
            let mut acc = 0.0;
            for (x, r) in xs.iter().zip(&residuals) {
                let df = 0.5 * (model.forward_with(&plus, x)? - model.forward_with(&minus, x)?);
                acc += r * df;
            }
            Ok(scale * acc)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(learning_rate: f64, n: usize) -> Self {
        Adam {
            learning_rate,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn step(&mut self, theta: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.t);
        let c2 = 1.0 - ADAM_BETA2.powi(self.t);
        for i in 0..theta.len() {
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * grad[i];
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            theta[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

/// Nesterov momentum with the gradient taken at the look-ahead point:
/// `a ← μa + η∇f(θ − μa)`, `θ ← θ − a`.
#[derive(Debug, Clone)]
pub struct Nesterov {
    pub learning_rate: f64,
    pub momentum: f64,
    accumulation: Vec<f64>,
}

impl Nesterov {
    pub fn new(learning_rate: f64, momentum: f64, n: usize) -> Self {
        Nesterov {
            learning_rate,
            momentum,
            accumulation: vec![0.0; n],
        }
    }

    pub fn step<F>(&mut self, theta: &mut [f64], grad_at: F) -> Result<()>
    where
        F: FnOnce(&[f64]) -> Result<Vec<f64>>,
    {
        let lookahead: Vec<f64> = theta
            .iter()
            .zip(&self.accumulation)
            .map(|(t, a)| t - self.momentum * a)
            .collect();
        let g = grad_at(&lookahead)?;
        for i in 0..theta.len() {
            self.accumulation[i] = self.momentum * self.accumulation[i] + self.learning_rate * g[i];
            theta[i] -= self.accumulation[i];
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Downhill simplex with coefficients (reflection 1, expansion 2,
/// contraction ½, shrink ½). The initial simplex is `x0` plus `perturbation`
/// along each axis. Stops after `max_iterations` or once every vertex lies
/// within `diameter_tol` (Euclidean) of the best one.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    max_iterations: usize,
    perturbation: f64,
    diameter_tol: f64,
) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)?));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += perturbation;
        let fv = eval(&v)?;
        simplex.push((v, fv));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    let mut trace = Vec::new();
    let mut iterations = 0;
    while iterations < max_iterations {
        let best = &simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(best).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if diameter < diameter_tol {
            break;
        }
        iterations += 1;

        let worst = simplex[n].clone();
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(v, _)| v[j]).sum::<f64>() / n as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = toward(1.0);
        let f_r = eval(&reflected)?;
        if f_r < simplex[0].1 {
            let expanded = toward(2.0);
            let f_e = eval(&expanded)?;
            simplex[n] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
        } else if f_r < simplex[n - 1].1 {
            simplex[n] = (reflected, f_r);
        } else {
            let (candidate, threshold) = if f_r < worst.1 {
                (toward(0.5), f_r)
            } else {
                (toward(-0.5), worst.1)
            };
            let f_c = eval(&candidate)?;
            if f_c < threshold {
                simplex[n] = (candidate, f_c);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = anchor
                        .iter()
                        .zip(&vertex.0)
                        .map(|(a, x)| a + 0.5 * (x - a))
                        .collect();
                    let fv = eval(&v)?;
                    *vertex = (v, fv);
                }
            }
        }
        order(&mut simplex);
        trace.push(simplex[0].1);
    }
    let (x, fx) = simplex.swap_remove(0);
    Ok(NelderMeadResult {
        x,
        fx,
        trace,
        iterations,
        evaluations,
    })
}

fn check_loss(step: usize, loss: f64) -> Result<f64> {
    if !loss.is_finite() || loss > DIVERGENCE_LOSS {
        return Err(Error::Diverged { step, loss });
    }
    Ok(loss)
}

/// Trains `model` on `(xs, ys)`. Gradient methods always run the full step
/// budget; the only early exit is divergence.
pub fn train(model: &ReuploadModel, xs: &[Vec<f64>], ys: &[f64], config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    model.validate()?;
    check_samples(xs, ys)?;
    let initial_loss = check_loss(0, mse_loss(model, xs, ys)?)?;

    if config.optimizer == OptimizerKind::NelderMead {
        let mut step = 0;
        let result = nelder_mead(
            |theta| {
                let loss = mse_with(model, theta, xs, ys)?;
                check_loss(step, loss)?;
                step += 1;
                Ok(loss)
            },
            &model.theta,
            config.steps,
            NM_PERTURBATION,
            NM_DIAMETER_TOL,
        )?;
        return Ok(TrainReport {
            initial_loss,
            steps_run: result.trace.len(),
            loss_trace: result.trace,
            final_theta: result.x,
        });
    }

    let mut theta = model.theta.clone();
    let mut batches = Batcher::new(xs.len(), config.batch_size, config.seed);
    let mut adam = Adam::new(config.learning_rate, theta.len());
    let mut nesterov = Nesterov::new(config.learning_rate, config.momentum, theta.len());
    let mut trace = Vec::with_capacity(config.steps);
    let mut bx = Vec::new();
    let mut by = Vec::new();
    for step in 1..=config.steps {
        let batch = batches.next_batch();
        bx.clear();
        by.clear();
        for &i in batch {
            bx.push(xs[i].clone());
            by.push(ys[i]);
        }
        match config.optimizer {
            OptimizerKind::Adam => {
                let g = grad_with(model, &theta, &bx, &by)?;
                adam.step(&mut theta, &g);
            }
            OptimizerKind::Nesterov => {
                nesterov.step(&mut theta, |at| grad_with(model, at, &bx, &by))?;
            }
            OptimizerKind::NelderMead => unreachable!(),
        }
        trace.push(check_loss(step, mse_with(model, &theta, xs, ys)?)?);
    }
    Ok(TrainReport {
        initial_loss,
        steps_run: trace.len(),
        loss_trace: trace,
        final_theta: theta,
    })
}

/// Index batches drawn without replacement, reshuffled at every epoch.
struct Batcher {
    order: Vec<usize>,
    size: usize,
    cursor: usize,
    rng: Option<ChaCha8Rng>,
}

impl Batcher {
    fn new(n: usize, batch: BatchSize, seed: u64) -> Self {
        match batch {
            BatchSize::Size(b) if b < n => Batcher {
                order: (0..n).collect(),
                size: b,
                cursor: n,
                rng: Some(ChaCha8Rng::seed_from_u64(seed)),
            },
            _ => Batcher {
                order: (0..n).collect(),
                size: n,
                cursor: 0,
                rng: None,
            },
        }
    }

    fn next_batch(&mut self) -> &[usize] {
        let n = self.order.len();
        match &mut self.rng {
            None => &self.order,
            Some(rng) => {
                if self.cursor >= n {
                    self.order.sort_unstable();
                    self.order.shuffle(rng);
                    self.cursor = 0;
                }
                let start = self.cursor;
                self.cursor = (start + self.size).min(n);
                &self.order[start..self.cursor]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reupload::AnsatzKind;
    use rand::Rng;

    fn basic(layers: usize, seed: u64) -> ReuploadModel {
        ReuploadModel::init_normal(AnsatzKind::Basic1D, 1, layers, 1, 1.0, seed).unwrap()
    }

    #[test]
    fn mse_examples() {
        let m = basic(2, 3);
        let xs: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64 * 0.4]).collect();
        let ys = m.forward_many(&xs).unwrap();
        assert_eq!(mse_loss(&m, &xs, &ys).unwrap(), 0.0);

        // zero angles and x = 0 give forward = cos(0) = 1
        let one = ReuploadModel::zeros(AnsatzKind::Basic1D, 1, 1, 1).unwrap();
        let zeros = vec![vec![0.0]; 4];
        assert!((mse_loss(&one, &zeros, &[-1.0; 4]).unwrap() - 4.0).abs() < 1e-15);

        // x = π/3 gives forward = 0.5
        let x = vec![vec![std::f64::consts::FRAC_PI_3]];
        assert!((mse_loss(&one, &x, &[0.0]).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(mse_loss(&one, &[], &[]), Err(Error::EmptySamples));
    }

    #[test]
    fn gradient_vanishes_at_minimum() {
        let m = ReuploadModel::init_normal(AnsatzKind::LineAnsatz, 1, 2, 2, 1.0, 4).unwrap();
        let xs: Vec<Vec<f64>> = (0..9).map(|i| vec![0.3 * i as f64, 1.0 - 0.2 * i as f64]).collect();
        let ys = m.forward_many(&xs).unwrap();
        let g = parameter_shift_grad(&m, &xs, &ys).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (kind, q, l, d) in [
            (AnsatzKind::Basic1D, 2, 2, 1),
            (AnsatzKind::LineAnsatz, 1, 2, 2),
            (AnsatzKind::LineAnsatz, 2, 2, 3),
            (AnsatzKind::StronglyEntanglingReupload, 2, 2, 2),
        ] {
            let m = ReuploadModel::init_normal(kind, q, l, d, 1.0, 1).unwrap();
            let xs: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect();
            let ys: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g = parameter_shift_grad(&m, &xs, &ys).unwrap();
            let h = 1e-5;
            for p in 0..m.theta.len() {
                let mut tp = m.theta.clone();
                let mut tm = m.theta.clone();
                tp[p] += h;
                tm[p] -= h;
                let fd = (mse_with(&m, &tp, &xs, &ys).unwrap() - mse_with(&m, &tm, &xs, &ys).unwrap()) / (2.0 * h);
                assert!((fd - g[p]).abs() < 1e-6, "{kind:?} p={p}: {fd} vs {}", g[p]);
            }
        }
    }

    #[test]
    fn duplicated_samples_keep_gradient() {
        let m = basic(2, 8);
        let xs: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = (0..5).map(|i| 0.1 * i as f64).collect();
        let g = parameter_shift_grad(&m, &xs, &ys).unwrap();
        let xs2: Vec<Vec<f64>> = xs.iter().chain(&xs).cloned().collect();
        let ys2: Vec<f64> = ys.iter().chain(&ys).cloned().collect();
        let g2 = parameter_shift_grad(&m, &xs2, &ys2).unwrap();
        for (a, b) in g.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn adam_on_parabola() {
        let mut theta = [1.0];
        let mut adam = Adam::new(0.1, 1);
        for _ in 0..500 {
            let g = [2.0 * theta[0]];
            adam.step(&mut theta, &g);
        }
        assert!(theta[0].abs() < 1e-2, "{}", theta[0]);
    }

    #[test]
    fn nesterov_on_parabola() {
        let mut theta = [1.0, -2.0];
        let mut opt = Nesterov::new(0.1, 0.9, 2);
        for _ in 0..200 {
            opt.step(&mut theta, |t| Ok(t.iter().map(|v| 2.0 * v).collect())).unwrap();
        }
        assert!(theta.iter().all(|v| v.abs() < 1e-3));
    }

    #[test]
    fn nelder_mead_on_rosenbrock() {
        let r = nelder_mead(
            |x| Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)),
            &[-1.2, 1.0],
            2000,
            0.1,
            1e-10,
        )
        .unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.trace.len(), r.iterations);
    }

    #[test]
    fn adam_fits_cosine() {
        let m = ReuploadModel::init_normal(AnsatzKind::Basic1D, 1, 1, 1, 0.01, 0).unwrap();
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![-3.0 + 6.0 * i as f64 / 19.0]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0].cos()).collect();
        let report = train(&m, &xs, &ys, &TrainConfig::adam(60, 0.3, BatchSize::Full, 0)).unwrap();
        assert_eq!(report.loss_trace.len(), 60);
        assert!(report.final_loss() < 1e-3, "{}", report.final_loss());
    }

    #[test]
    fn zero_steps_rejected() {
        let m = basic(1, 0);
        let cfg = TrainConfig::adam(0, 0.3, BatchSize::Full, 0);
        assert!(matches!(train(&m, &[vec![0.0]], &[0.0], &cfg), Err(Error::InvalidConfig(_))));
        let mut nm = TrainConfig::nelder_mead(10);
        nm.batch_size = BatchSize::Size(4);
        assert!(nm.validate().is_err());
    }

    #[test]
    fn training_is_deterministic() {
        let m = ReuploadModel::init_normal(AnsatzKind::LineAnsatz, 1, 2, 2, 0.01, 2).unwrap();
        let xs: Vec<Vec<f64>> = (0..30).map(|i| vec![0.1 * i as f64, (0.37 * i as f64).sin()]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x[0] - x[1]).sin() * 0.5).collect();
        let cfg = TrainConfig::adam(15, 0.2, BatchSize::Size(8), 42);
        let a = train(&m, &xs, &ys, &cfg).unwrap();
        let b = train(&m, &xs, &ys, &cfg).unwrap();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed = 43;
        assert_ne!(train(&m, &xs, &ys, &other).unwrap().loss_trace, a.loss_trace);

        let full_a = train(&m, &xs, &ys, &TrainConfig::nesterov(10, 0.3, 0.9, BatchSize::Full, 1)).unwrap();
        let full_b = train(&m, &xs, &ys, &TrainConfig::nesterov(10, 0.3, 0.9, BatchSize::Full, 2)).unwrap();
        assert_eq!(full_a.loss_trace, full_b.loss_trace);

        let nm_a = train(&m, &xs, &ys, &TrainConfig::nelder_mead(50)).unwrap();
        let nm_b = train(&m, &xs, &ys, &TrainConfig::nelder_mead(50)).unwrap();
        assert_eq!(nm_a, nm_b);
        assert!(nm_a.final_loss() <= nm_a.initial_loss);
    }

    #[test]
    fn divergence_reported() {
        let m = basic(1, 0);
        let cfg = TrainConfig::adam(3, 0.1, BatchSize::Full, 0);
        let err = train(&m, &[vec![0.0]], &[1e4], &cfg).unwrap_err();
        assert!(matches!(err, Error::Diverged { step: 0, .. }));
    }

    #[test]
    fn minibatches_cover_each_epoch() {
        let mut b = Batcher::new(10, BatchSize::Size(4), 3);
        let mut seen: Vec<usize> = Vec::new();
        for _ in 0..3 {
            seen.extend_from_slice(b.next_batch());
        }
        seen.sort_unstable();
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn config_json() {
        let cfg: TrainConfig = serde_json::from_str(
            r#"{"optimizer":"adam","steps":60,"learning_rate":0.3,"batch_size":25,"seed":7}"#,
        )
        .unwrap();
        assert_eq!(cfg, TrainConfig::adam(60, 0.3, BatchSize::Size(25), 7));
        let nm: TrainConfig = serde_json::from_str(r#"{"optimizer":"nelder_mead","steps":500,"batch_size":"full"}"#).unwrap();
        assert!(nm.validate().is_ok());
        assert!(serde_json::from_str::<TrainConfig>(r#"{"optimizer":"adam","steps":1,"batch_size":"half"}"#).is_err());
    }

    #[test]
    fn csv_trace() {
        let r = TrainReport {
            initial_loss: 1.0,
            loss_trace: vec![0.5, 0.25],
            final_theta: vec![],
            steps_run: 2,
        };
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "step,mse\n0,1\n1,0.5\n2,0.25\n");
    }
}
