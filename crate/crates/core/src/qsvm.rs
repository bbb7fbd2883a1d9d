//! Quantum-kernel SVM with a Platt-scaled posterior.
//!
//! The kernel is the state fidelity `|⟨φ(x)|φ(x')⟩|²` of an angle embedding
//! (RY(x_m) on qubit m, then CNOTs between neighbouring qubits). The dual is
//! solved by SMO with maximal-violating-pair selection; bias and update rules
//! follow libsvm's C-SVC solver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{init_zero, overlap_probability, Gate, StateVector};

pub const DEFAULT_C: f64 = 1.0;
pub const SMO_TOLERANCE: f64 = 1e-3;
const SMO_MAX_ITER: usize = 10_000_000;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumKernel {
    pub n_qubits: usize,
}

impl Default for QuantumKernel {
    fn default() -> Self {
        QuantumKernel { n_qubits: 2 }
    }
}

impl QuantumKernel {
    pub fn embed(&self, x: &[f64]) -> Result<StateVector> {
        if x.len() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: x.len(),
            });
        }
        let mut psi = init_zero(self.n_qubits)?;
        for (q, &angle) in x.iter().enumerate() {
            psi.apply_in_place(&Gate::Ry { qubit: q, angle })?;
        }
        for q in 0..self.n_qubits.saturating_sub(1) {
            psi.apply_in_place(&Gate::Cnot {
                control: q,
                target: q + 1,
            })?;
        }
        Ok(psi)
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        overlap_probability(&self.embed(x)?, &self.embed(y)?)
    }

    /// Gram matrix, row-major. The upper triangle is computed and mirrored,
    /// so the result is exactly symmetric.
    pub fn matrix(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let states = xs.iter().map(|x| self.embed(x)).collect::<Result<Vec<_>>>()?;
        let n = states.len();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i..n)
                    .map(|j| overlap_probability(&states[i], &states[j]))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let mut k = vec![vec![0.0; n]; n];
        for i in 0..n {
            for (off, &v) in upper[i].iter().enumerate() {
                k[i][i + off] = v;
                k[i + off][i] = v;
            }
        }
        Ok(k)
    }

    /// Kernel values between `x` and every row of `train`.
    pub fn row(&self, x: &[f64], train: &[Vec<f64>]) -> Result<Vec<f64>> {
        let psi = self.embed(x)?;
        train
            .iter()
            .map(|t| overlap_probability(&psi, &self.embed(t)?))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlattParams {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub alpha: Vec<f64>,
    /// `α_i y_i` for every training point (zero off the support).
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub support: Vec<usize>,
    pub c: f64,
    pub iterations: usize,
    pub platt: Option<PlattParams>,
}

fn check_labels(y: &[f64]) -> Result<()> {
    if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidLabel(bad));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Solves the C-SVC dual for a precomputed kernel.
pub fn smo_train(k: &[Vec<f64>], y: &[f64], c: f64) -> Result<SvmModel> {
    let n = y.len();
    if k.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: k.len(),
        });
    }
    if let Some(row) = k.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: row.len(),
        });
    }
    check_labels(y)?;
    if !(c > 0.0) {
        return Err(Error::InvalidConfig(format!("C must be > 0, got {c}")));
    }
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;
    let mut iterations = 0;
    while iterations < SMO_MAX_ITER {
        // maximal violating pair, lowest index on ties
        let mut i = None;
        let mut g_max = f64::NEG_INFINITY;
        let mut j = None;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = (y[t] > 0.0 && !upper(alpha[t])) || (y[t] < 0.0 && !lower(alpha[t]));
            let in_low = (y[t] > 0.0 && !lower(alpha[t])) || (y[t] < 0.0 && !upper(alpha[t]));
            if in_up && v > g_max {
                g_max = v;
                i = Some(t);
            }
            if in_low && v < g_min {
                g_min = v;
                j = Some(t);
            }
        }
        let (Some(i), Some(j)) = (i, j) else { break };
        if g_max - g_min < SMO_TOLERANCE {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(i, t) * di + q(j, t) * dj;
        }
    }

    // bias: mean over free vectors, else midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 { sum_free / free as f64 } else { (ub + lb) / 2.0 };

    Ok(SvmModel {
        dual_coef: alpha.iter().zip(y).map(|(a, y)| a * y).collect(),
        support: (0..n).filter(|&t| alpha[t] > 0.0).collect(),
        alpha,
        bias: -rho,
        c,
        iterations,
        platt: None,
    })
}

impl SvmModel {
    /// `Σ α_i y_i K(x_i, x) + b` from the kernel row against the training set.
    pub fn decision(&self, k_row: &[f64]) -> Result<f64> {
        if k_row.len() != self.dual_coef.len() {
            return Err(Error::Dimension {
                expected: self.dual_coef.len(),
                got: k_row.len(),
            });
        }
        Ok(self.dual_coef.iter().zip(k_row).map(|(a, k)| a * k).sum::<f64>() + self.bias)
    }

    pub fn predict(&self, k_row: &[f64]) -> Result<f64> {
        Ok(if self.decision(k_row)? > 0.0 { 1.0 } else { -1.0 })
    }

    /// `P(y = +1 | f) = 1 / (1 + exp(A f + B))`; a fitted `A` is negative
    /// whenever positive decisions mark the positive class.
    pub fn posterior(&self, k_row: &[f64]) -> Result<f64> {
        let p = self.platt.as_ref().ok_or(Error::PlattNotFitted)?;
        Ok(platt_probability(p.a * self.decision(k_row)? + p.b))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidConfig(format!("SVM JSON: {e}")))
    }

    /// Fits the sigmoid on decision values of the training set.
    pub fn fit_platt(&mut self, k: &[Vec<f64>], y: &[f64]) -> Result<()> {
        let decisions = k.iter().map(|row| self.decision(row)).collect::<Result<Vec<_>>>()?;
        self.platt = Some(platt_fit(&decisions, y)?);
        Ok(())
    }
}

/// Rescales a probability to `[-1, 1]`.
pub fn z_from_probability(p: f64) -> f64 {
    2.0 * p - 1.0
}

fn platt_probability(fapb: f64) -> f64 {
    if fapb >= 0.0 {
        (-fapb).exp() / (1.0 + (-fapb).exp())
    } else {
        1.0 / (1.0 + fapb.exp())
    }
}

/// Newton iteration with backtracking for the regularised sigmoid
/// likelihood (targets `(N₊+1)/(N₊+2)` and `1/(N₋+2)`).
pub fn platt_fit(decisions: &[f64], y: &[f64]) -> Result<PlattParams> {
    if decisions.len() != y.len() {
        return Err(Error::Dimension {
            expected: decisions.len(),
            got: y.len(),
        });
    }
    check_labels(y)?;
    const MAX_ITER: usize = 100;
    const MIN_STEP: f64 = 1e-10;
    const SIGMA: f64 = 1e-12;
    const EPS: f64 = 1e-5;

    let prior1 = y.iter().filter(|&&v| v > 0.0).count() as f64;
    let prior0 = y.len() as f64 - prior1;
    let hi = (prior1 + 1.0) / (prior1 + 2.0);
    let lo = 1.0 / (prior0 + 2.0);
    let t: Vec<f64> = y.iter().map(|&v| if v > 0.0 { hi } else { lo }).collect();

    let objective = |a: f64, b: f64| -> f64 {
        decisions
            .iter()
            .zip(&t)
            .map(|(f, t)| {
                let fapb = f * a + b;
                if fapb >= 0.0 {
                    t * fapb + (1.0 + (-fapb).exp()).ln()
                } else {
                    (t - 1.0) * fapb + (1.0 + fapb.exp()).ln()
                }
            })
            .sum()
    };

    let mut a = 0.0;
    let mut b = ((prior0 + 1.0) / (prior1 + 1.0)).ln();
    let mut fval = objective(a, b);
    for _ in 0..MAX_ITER {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (SIGMA, SIGMA, 0.0, 0.0, 0.0);
        for (f, t) in decisions.iter().zip(&t) {
            let fapb = f * a + b;
            let (p, q) = if fapb >= 0.0 {
                let e = (-fapb).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = fapb.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = t - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < EPS && g2.abs() < EPS {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < MIN_STEP {
            break;
        }
    }
    Ok(PlattParams { a, b })
}

/// Kernel, training inputs and fitted model bundled for prediction on new
/// points.
#[derive(Debug, Clone)]
pub struct QuantumSvm {
    pub kernel: QuantumKernel,
    pub train_x: Vec<Vec<f64>>,
    pub model: SvmModel,
}

impl QuantumSvm {
    /// Builds the Gram matrix, runs SMO and fits Platt scaling.
    pub fn fit(kernel: QuantumKernel, xs: &[Vec<f64>], y: &[f64], c: f64) -> Result<Self> {
        let k = kernel.matrix(xs)?;
        let mut model = smo_train(&k, y, c)?;
        model.fit_platt(&k, y)?;
        Ok(QuantumSvm {
            kernel,
            train_x: xs.to_vec(),
            model,
        })
    }

    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        self.model.decision(&self.kernel.row(x, &self.train_x)?)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(if self.decision(x)? > 0.0 { 1.0 } else { -1.0 })
    }

    pub fn posterior(&self, x: &[f64]) -> Result<f64> {
        self.model.posterior(&self.kernel.row(x, &self.train_x)?)
    }

    /// `2 p(x) − 1`, the regression target handed to local surrogates.
    pub fn z(&self, x: &[f64]) -> Result<f64> {
        Ok(z_from_probability(self.posterior(x)?))
    }
}
