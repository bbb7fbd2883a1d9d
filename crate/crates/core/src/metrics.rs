//! Scores: R², MSE, accuracy and relative error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominator floor for [`relative_error`].
pub const RELATIVE_ERROR_GUARD: f64 = 1e-8;

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

/// `1 − Σ(y−ŷ)² / Σ(y−ȳ)²`. Negative when worse than the mean predictor.
pub fn r_squared(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    if y_true.len() < 2 {
        return Err(Error::UndefinedR2);
    }
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let ss_tot: f64 = y_true.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedR2);
    }
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    if y_true.is_empty() {
        return Err(Error::EmptySamples);
    }
    Ok(y_true.iter().zip(y_pred).map(|(y, p)| (y - p) * (y - p)).sum::<f64>() / y_true.len() as f64)
}

/// `|y − ŷ| / max(|y|, 1e-8)` elementwise.
pub fn relative_error(y_true: &[f64], y_pred: &[f64]) -> Result<Vec<f64>> {
    check_lengths(y_true, y_pred)?;
    Ok(y_true
        .iter()
        .zip(y_pred)
        .map(|(y, p)| (y - p).abs() / y.abs().max(RELATIVE_ERROR_GUARD))
        .collect())
}

pub fn accuracy(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    if y_true.is_empty() {
        return Err(Error::EmptySamples);
    }
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / y_true.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    /// `None` when the truth is constant.
    pub r2: Option<f64>,
    pub mse: f64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy: Option<f64>,
}

impl ScoreReport {
    pub fn regression(y_true: &[f64], y_pred: &[f64]) -> Result<Self> {
        let mse = mse(y_true, y_pred)?;
        let r2 = match r_squared(y_true, y_pred) {
            Ok(v) => Some(v),
            Err(Error::UndefinedR2) => None,
            Err(e) => return Err(e),
        };
        Ok(ScoreReport {
            r2,
            mse,
            n: y_true.len(),
            accuracy: None,
        })
    }
}
