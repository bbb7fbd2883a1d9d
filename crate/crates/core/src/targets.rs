//! Analytic target functions and the regular grids they are sampled on.
//!
//! The 2D suite is thirteen closed-form functions on `[-π, π]²`; three of them
//! carry coefficients drawn from a seeded ChaCha8 stream. Draw order is
//! amplitudes, then frequencies, then phases/signs, each row-major over the
//! term index.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard added to the radius of `Sinc`.
pub const SINC_EPS: f64 = 1e-9;

/// Number of harmonics per axis in `RandomFourier`.
pub const RANDOM_FOURIER_K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetName {
    Fourier1d,
    DefaultFunction,
    Polynomial,
    Sinc,
    RandomTrig,
    BigTrig,
    CombinedOscillator,
    RandomTrig2,
    FreqSoup,
    PeaksTrig,
    SpiralMix,
    RandomFourier,
    LargeAmplitudeMix,
    CrossTerms,
}

impl TargetName {
    /// The thirteen 2D functions, in table order.
    pub const SUITE_2D: [TargetName; 13] = [
        TargetName::DefaultFunction,
        TargetName::Polynomial,
        TargetName::Sinc,
        TargetName::RandomTrig,
        TargetName::BigTrig,
        TargetName::CombinedOscillator,
        TargetName::RandomTrig2,
        TargetName::FreqSoup,
        TargetName::PeaksTrig,
        TargetName::SpiralMix,
        TargetName::RandomFourier,
        TargetName::LargeAmplitudeMix,
        TargetName::CrossTerms,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TargetName::Fourier1d => "fourier1d",
            TargetName::DefaultFunction => "default_function",
            TargetName::Polynomial => "polynomial",
            TargetName::Sinc => "sinc",
            TargetName::RandomTrig => "random_trig",
            TargetName::BigTrig => "big_trig",
            TargetName::CombinedOscillator => "combined_oscillator",
            TargetName::RandomTrig2 => "random_trig2",
            TargetName::FreqSoup => "freq_soup",
            TargetName::PeaksTrig => "peaks_trig",
            TargetName::SpiralMix => "spiral_mix",
            TargetName::RandomFourier => "random_fourier",
            TargetName::LargeAmplitudeMix => "large_amplitude_mix",
            TargetName::CrossTerms => "cross_terms",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TargetName::Fourier1d => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Params {
    Fixed,
    RandomTrig { a: [f64; 3], b: [f64; 3] },
    RandomTrig2 {
        alpha: [f64; 3],
        beta: [f64; 3],
        /// (ω_x, ω_y, ω̃_x, ω̃_y) per term
        freq: [[f64; 4]; 3],
        /// the ± in the cosine term
        sign: [f64; 3],
    },
    RandomFourier {
        a: [[f64; RANDOM_FOURIER_K]; RANDOM_FOURIER_K],
        b: [[f64; RANDOM_FOURIER_K]; RANDOM_FOURIER_K],
        phase: [[f64; RANDOM_FOURIER_K]; RANDOM_FOURIER_K],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetFunction {
    name: TargetName,
    seed: u64,
    params: Params,
}

impl TargetFunction {
    /// `seed` only matters for the randomised functions.
    pub fn new(name: TargetName, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = match name {
            TargetName::RandomTrig => {
                let mut draw = || rng.random_range(-1.0..1.0);
                let a = [draw(), draw(), draw()];
                let b = [draw(), draw(), draw()];
                Params::RandomTrig { a, b }
            }
            TargetName::RandomTrig2 => {
                let mut alpha = [0.0; 3];
                let mut beta = [0.0; 3];
                for v in alpha.iter_mut().chain(beta.iter_mut()) {
                    *v = rng.random_range(-1.0..1.0);
                }
                let mut freq = [[0.0; 4]; 3];
                for row in freq.iter_mut() {
                    for w in row.iter_mut() {
                        *w = rng.random_range(0.5..=2.5);
                    }
                }
                let mut sign = [1.0; 3];
                for s in sign.iter_mut() {
                    *s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                }
                Params::RandomTrig2 {
                    alpha,
                    beta,
                    freq,
                    sign,
                }
            }
            TargetName::RandomFourier => {
                let mut a = [[0.0; RANDOM_FOURIER_K]; RANDOM_FOURIER_K];
                let mut b = a;
                let mut phase = a;
                for m in [&mut a, &mut b] {
                    for row in m.iter_mut() {
                        for v in row.iter_mut() {
                            *v = rng.random_range(-0.5..0.5);
                        }
                    }
                }
                for row in phase.iter_mut() {
                    for v in row.iter_mut() {
                        *v = rng.random_range(0.0..TAU);
                    }
                }
                Params::RandomFourier { a, b, phase }
            }
            _ => Params::Fixed,
        };
        TargetFunction { name, seed, params }
    }

    pub fn name(&self) -> TargetName {
        self.name
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.name.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if self.name == TargetName::Fourier1d {
            return Ok(fourier1d_target(x[0]));
        }
        let (x, y) = (x[0], x[1]);
        let v = match (&self.name, &self.params) {
            (TargetName::DefaultFunction, _) => {
                -0.02 + 0.04 * (2.0 * x + y).cos() + 0.25 * x.sin() - 0.30 * (2.0 * y).cos()
                    - 0.10 * (x - y).sin()
            }
            (TargetName::Polynomial, _) => 0.10 * x * x - 0.20 * y + 0.30 * x * y - 0.40 * x + 2.0,
            (TargetName::Sinc, _) => {
                let r = (x * x + y * y).sqrt() + SINC_EPS;
                r.sin() / r
            }
            (TargetName::RandomTrig, Params::RandomTrig { a, b }) => {
                a[0] * x.sin()
                    + a[1] * y.cos()
                    + b[0] * (2.0 * x + 0.5 * y).sin()
                    + b[1] * (2.0 * y - 0.3 * x).cos()
                    + a[2] * x
                    + b[2] * y
            }
            (TargetName::BigTrig, _) => {
                0.70 * (0.5 * x).sin() + 0.40 * (2.2 * y).sin() - 0.30 * (2.0 * x + 1.3 * y).cos()
                    + 0.25 * (1.5 * x - 0.8 * y).sin()
                    + 0.15 * (0.9 * x + 2.1 * y).cos()
                    + 0.05 * (3.0 * x + 0.2 * y).sin()
            }
            (TargetName::CombinedOscillator, _) => {
                0.05 * x * x - 0.10 * y + 0.60 * (1.2 * x + 0.5 * y).cos()
                    - 0.40 * (0.8 * x - 1.3 * y).sin()
                    + 0.35 * (2.0 * x).cos()
                    + 0.20 * (2.0 * y).sin()
            }
            (
                TargetName::RandomTrig2,
                Params::RandomTrig2 {
                    alpha,
                    beta,
                    freq,
                    sign,
                },
            ) => (0..3)
                .map(|i| {
                    let [wx, wy, vx, vy] = freq[i];
                    alpha[i] * (wx * x + wy * y).sin() + beta[i] * (vx * x + sign[i] * vy * y).cos()
                })
                .sum(),
            (TargetName::FreqSoup, _) => {
                0.30 * (x + 2.0 * y).sin() + 0.20 * (2.0 * x + y).cos() + 0.15 * (3.0 * x + 3.0 * y).sin()
                    + 0.10 * (x - 3.0 * y).cos()
                    + 0.05 * (2.0 * x - 2.0 * y).sin()
            }
            (TargetName::PeaksTrig, _) => {
                0.50 * (1.3 * x - 0.5 * y).cos() + 0.40 * (2.1 * x + 0.7 * y).sin()
                    - 0.30 * (3.0 * x - 2.2 * y).cos()
                    + 0.20 * (1.1 * x - 3.0 * y).sin()
                    + 0.10 * (0.6 * x + 0.3 * y).cos()
            }
            (TargetName::SpiralMix, _) => {
                let r = (x * x + y * y).sqrt();
                // atan2 lands in (-π, π]
                let theta = y.atan2(x);
                0.10 * r + 0.50 * (2.0 * theta).sin() + 0.25 * (3.0 * theta).cos()
                    - 0.20 * (0.5 * x - 0.8 * y).sin()
                    + 0.05 * r * (5.0 * theta).cos()
            }
            (TargetName::RandomFourier, Params::RandomFourier { a, b, phase }) => {
                let mut total = 0.0;
                for i in 0..RANDOM_FOURIER_K {
                    for j in 0..RANDOM_FOURIER_K {
                        let arg = (i + 1) as f64 * x + (j + 1) as f64 * y;
                        total += a[i][j] * (arg + phase[i][j]).cos() + b[i][j] * (arg - phase[i][j]).sin();
                    }
                }
                total
            }
            (TargetName::LargeAmplitudeMix, _) => {
                2.5 * (1.2 * x + 0.7 * y).sin() - 2.0 * (0.6 * x - 1.1 * y).cos()
                    + 1.5 * (2.0 * x - 2.5 * y).sin()
                    + 0.8 * (3.0 * x + 2.0 * y).cos()
                    - 0.3 * (4.0 * x - 0.2 * y).sin()
            }
            (TargetName::CrossTerms, _) => {
                (x + y).sin() + 0.5 * (2.0 * x - y).cos() - 0.4 * (3.0 * y + 2.1 * x).sin()
                    + 0.3 * (1.2 * x - 2.5 * y).cos()
                    + 0.2 * x * y.sin()
            }
            _ => unreachable!("parameters always match the target name"),
        };
        Ok(v)
    }
}

/// `Σ_{n=-5}^{5} c_n e^{2inx}` with `c_0 = 0.1`, `c_{1,2,3} = 0.15 + 0.15i`,
/// `c_{±4} = c_{±5} = 0` and `c_{-n} = conj(c_n)`.
pub fn fourier1d_target(x: f64) -> f64 {
    0.1 + (1..=3)
        .map(|n| {
            let arg = 2.0 * n as f64 * x;
            0.3 * (arg.cos() - arg.sin())
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Whether `hi` itself is a grid point (linspace) or excluded (fixed rate).
    pub include_end: bool,
}

impl GridAxis {
    pub fn coord(&self, i: usize) -> f64 {
        let span = self.hi - self.lo;
        let denom = if self.include_end {
            self.count - 1
        } else {
            self.count
        };
        if self.include_end && i + 1 == self.count {
            return self.hi;
        }
        self.lo + span * i as f64 / denom as f64
    }
}

/// Regular Cartesian grid; points are listed row-major with axis 0 outermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub axes: Vec<GridAxis>,
}

impl SampleGrid {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidConfig("grid needs at least one axis".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.count < 2 || !(a.hi > a.lo) {
                return Err(Error::InvalidConfig(format!(
                    "grid axis {i} needs count >= 2 and hi > lo"
                )));
            }
        }
        Ok(SampleGrid { axes })
    }

    /// `n` points per axis on `[lo, hi]^d`, endpoints included.
    pub fn square(lo: f64, hi: f64, n: usize, d: usize) -> Result<Self> {
        SampleGrid::new(vec![
            GridAxis {
                lo,
                hi,
                count: n,
                include_end: true
            };
            d
        ])
    }

    /// One axis sampled at `rate` points per unit on `[lo, hi)`.
    pub fn with_rate(lo: f64, hi: f64, rate: f64) -> Result<Self> {
        let count = ((hi - lo) * rate).round() as usize;
        SampleGrid::new(vec![GridAxis {
            lo,
            hi,
            count,
            include_end: false,
        }])
    }

    /// The `[-π, π]²` grid with 22 points per axis.
    pub fn suite_2d() -> Self {
        SampleGrid::square(-PI, PI, 22, 2).expect("valid constant grid")
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.axes[axis].coord(i)
    }

    /// Multi-index of the flat row-major position `flat`.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (axis, a) in self.axes.iter().enumerate().rev() {
            idx[axis] = flat % a.count;
            flat /= a.count;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .enumerate()
            .map(|(axis, i)| self.coord(axis, i))
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

pub fn grid_sample(target: &TargetFunction, grid: &SampleGrid) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let xs = grid.points();
    let ys = xs.iter().map(|x| target.eval(x)).collect::<Result<Vec<_>>>()?;
    Ok((xs, ys))
}

/// Writes `x1[,x2,...],y` rows with a header.
pub fn write_samples_csv<W: Write>(mut out: W, xs: &[Vec<f64>], ys: &[f64]) -> std::io::Result<()> {
    let d = xs.first().map_or(0, |x| x.len());
    let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).chain(["y".to_string()]).collect();
    writeln!(out, "{}", header.join(","))?;
    for (x, y) in xs.iter().zip(ys) {
        let row: Vec<String> = x.iter().chain(std::iter::once(y)).map(|v| v.to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct complex summation of the degree-3 series, independent of the
    /// closed form used by `fourier1d_target`.
    fn fourier1d_by_summation(x: f64) -> f64 {
        let coeff = |n: i32| -> (f64, f64) {
            match n.abs() {
                0 => (0.1, 0.0),
                1..=3 => (0.15, if n > 0 { 0.15 } else { -0.15 }),
                _ => (0.0, 0.0),
            }
        };
        (-5..=5)
            .map(|n| {
                let (re, im) = coeff(n);
                let arg = 2.0 * n as f64 * x;
                re * arg.cos() - im * arg.sin()
            })
            .sum()
    }

    #[test]
    fn fourier1d_matches_series() {
        assert!((fourier1d_target(0.0) - 1.0).abs() < 1e-15);
        for i in 0..50 {
            let x = -6.0 + 0.25 * i as f64;
            assert!((fourier1d_target(x) - fourier1d_by_summation(x)).abs() < 1e-13);
            assert!((fourier1d_target(x + PI) - fourier1d_target(x)).abs() < 1e-12);
        }
        let n = 1000;
        let mean = (0..n).map(|i| fourier1d_target(PI * i as f64 / n as f64)).sum::<f64>() / n as f64;
        assert!((mean - 0.1).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let co = TargetFunction::new(TargetName::CombinedOscillator, 0);
        assert!((co.eval(&[0.0, 0.0]).unwrap() - 0.95).abs() < 1e-15);
        let poly = TargetFunction::new(TargetName::Polynomial, 0);
        assert!((poly.eval(&[1.0, 1.0]).unwrap() - 1.8).abs() < 1e-14);
        let sinc = TargetFunction::new(TargetName::Sinc, 0);
        assert!((sinc.eval(&[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(sinc.eval(&[0.0]).is_err());
    }

    #[test]
    fn random_targets_are_seeded() {
        for name in [TargetName::RandomTrig, TargetName::RandomTrig2, TargetName::RandomFourier] {
            let a = TargetFunction::new(name, 7);
            let b = TargetFunction::new(name, 7);
            let c = TargetFunction::new(name, 8);
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert_eq!(a.eval(&[0.3, -1.2]).unwrap(), b.eval(&[0.3, -1.2]).unwrap());
        }
    }

    #[test]
    fn suite_is_finite_on_grid() {
        let grid = SampleGrid::suite_2d();
        for name in TargetName::SUITE_2D {
            let t = TargetFunction::new(name, 0);
            let (_, ys) = grid_sample(&t, &grid).unwrap();
            assert_eq!(ys.len(), 484);
            assert!(ys.iter().all(|v| v.is_finite() && v.abs() < 100.0), "{name:?}");
        }
    }

    #[test]
    fn grid_counts() {
        let g = SampleGrid::with_rate(-6.0, 6.0, 10.0).unwrap();
        assert_eq!(g.len(), 120);
        assert_eq!(g.coord(0, 0), -6.0);
        assert!(g.points().iter().all(|p| p[0] >= -6.0 && p[0] < 6.0));
        let g = SampleGrid::square(0.0, 1.0, 2, 2).unwrap();
        assert_eq!(
            g.points(),
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]
        );
        assert!(SampleGrid::square(0.0, 1.0, 1, 2).is_err());
        assert_eq!(SampleGrid::suite_2d().coord(0, 21), PI);
    }

    #[test]
    fn csv_export() {
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &[vec![0.5, 1.0]], &[2.0]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x1,x2,y\n0.5,1,2\n");
    }
}
