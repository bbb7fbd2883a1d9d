//! One runner per experiment id. Each returns a [`RunOutput`] and never
//! touches the filesystem.

use std::time::Instant;

use qsurrogate_core::metrics::r_squared;
use qsurrogate_core::Error;

use crate::config::{ExperimentConfig, ExperimentId};
use crate::error::HarnessError;
use crate::output::RunOutput;

pub mod patch2d;
pub mod qsvm;
pub mod sweep1d;
pub mod sweep2d;
pub mod wdbc;

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    config.validate()?;
    let started = Instant::now();
    let mut out = match config.experiment {
        ExperimentId::Sweep1d => sweep1d::run(config)?,
        ExperimentId::Patch2dDemo => patch2d::run(config)?,
        ExperimentId::Sweep2dSuite => sweep2d::run(config)?,
        ExperimentId::QsvmDemo => qsvm::run(config)?,
        ExperimentId::WdbcLimits => wdbc::run(config)?,
    };
    if let Some(obj) = out.summary.as_object_mut() {
        obj.insert("experiment".into(), config.experiment.as_str().into());
        obj.insert("seed".into(), config.seed.into());
        obj.insert("wall_ms_total".into(), (started.elapsed().as_millis() as u64).into());
    }
    Ok(out)
}

/// R² that maps the undefined case (constant truth, < 2 points) to `None`.
pub(crate) fn r2_opt(y_true: &[f64], y_pred: &[f64]) -> Result<Option<f64>, HarnessError> {
    match r_squared(y_true, y_pred) {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedR2) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn gather<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

pub(crate) struct Stopwatch {
    start: Instant,
    enabled: bool,
}

impl Stopwatch {
    pub fn start(enabled: bool) -> Self {
        Stopwatch {
            start: Instant::now(),
            enabled,
        }
    }

    pub fn wall_ms(&self) -> Option<u64> {
        self.enabled.then(|| self.start.elapsed().as_millis() as u64)
    }
}

/// Median of a non-empty slice.
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn undefined_r2_is_none() {
        assert_eq!(r2_opt(&[1.0, 1.0], &[1.0, 2.0]).unwrap(), None);
        assert_eq!(r2_opt(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), Some(1.0));
    }
}
