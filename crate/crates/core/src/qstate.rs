//! Dense statevector simulation for the handful of qubits used by
//! reuploading circuits and the quantum kernel.
//!
//! Qubit 0 is the most significant bit of the basis index, so `|10⟩` is the
//! basis state with index 2. Rotations follow `R_P(θ) = exp(-iθP/2)`.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const MAX_QUBITS: usize = 12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

type Mat2 = [[C64; 2]; 2];

/// A single gate of the supported set.
///
/// `Rot { phi, theta, omega }` is the matrix `RZ(φ)·RY(θ)·RZ(ω)`, i.e. `RZ(ω)`
/// acts first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Rot { qubit: usize, phi: f64, theta: f64, omega: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx { qubit, angle } => Gate::Rx { qubit, angle: -angle },
            Gate::Ry { qubit, angle } => Gate::Ry { qubit, angle: -angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: -angle },
            // (RZ(φ)RY(θ)RZ(ω))† = RZ(-ω)RY(-θ)RZ(-φ)
            Gate::Rot { qubit, phi, theta, omega } => Gate::Rot {
                qubit,
                phi: -omega,
                theta: -theta,
                omega: -phi,
            },
            Gate::Cnot { .. } => *self,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |index: usize| {
            if index < n_qubits {
                Ok(())
            } else {
                Err(Error::QubitIndex { index, n_qubits })
            }
        };
        match *self {
            Gate::Rx { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::Rot { qubit, .. } => check(qubit),
            Gate::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::ControlIsTarget(control));
                }
                Ok(())
            }
        }
    }

    /// 2×2 matrix and target qubit for single-qubit gates; `None` for CNOT.
    pub fn single_qubit_matrix(&self) -> Option<(usize, Mat2)> {
        match *self {
            Gate::Rx { qubit, angle } => Some((qubit, rx(angle))),
            Gate::Ry { qubit, angle } => Some((qubit, ry(angle))),
            Gate::Rz { qubit, angle } => Some((qubit, rz(angle))),
            Gate::Rot { qubit, phi, theta, omega } => Some((qubit, rot(phi, theta, omega))),
            Gate::Cnot { .. } => None,
        }
    }
}

fn rx(angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    let mis = C64::new(0.0, -s);
    [[C64::new(c, 0.0), mis], [mis, C64::new(c, 0.0)]]
}

fn ry(angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

fn rz(angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    [[C64::new(c, -s), ZERO], [ZERO, C64::new(c, s)]]
}

fn rot(phi: f64, theta: f64, omega: f64) -> Mat2 {
    // RZ(φ)·RY(θ)·RZ(ω) in closed form
    let (s, c) = (theta / 2.0).sin_cos();
    let e = |a: f64| C64::from_polar(1.0, a);
    [
        [e(-(phi + omega) / 2.0) * c, -e(-(phi - omega) / 2.0) * s],
        [e((phi - omega) / 2.0) * s, e((phi + omega) / 2.0) * c],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

/// `|0…0⟩` on `n_qubits` qubits.
pub fn init_zero(n_qubits: usize) -> Result<StateVector> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(n_qubits));
    }
    let mut amplitudes = vec![ZERO; 1 << n_qubits];
    amplitudes[0] = ONE;
    Ok(StateVector {
        n_qubits,
        amplitudes,
    })
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalising them.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len > (1 << MAX_QUBITS) {
            return Err(Error::InvalidConfig(format!(
                "amplitude vector length {len} is not 2^n for 1 <= n <= {MAX_QUBITS}"
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidConfig("amplitudes have zero or non-finite norm".into()));
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate.single_qubit_matrix() {
            Some((qubit, m)) => self.apply_single(qubit, &m),
            None => {
                if let Gate::Cnot { control, target } = *gate {
                    self.apply_cnot(control, target);
                }
            }
        }
        Ok(())
    }

    fn bit_mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn apply_single(&mut self, qubit: usize, m: &Mat2) {
        let stride = self.bit_mask(qubit);
        let dim = self.amplitudes.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                let j = i + stride;
                let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
            }
            base += 2 * stride;
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = self.bit_mask(control);
        let tmask = self.bit_mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    /// `⟨Z_qubit⟩`.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let mask = self.bit_mask(qubit);
        let value = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| if b & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum::<f64>();
        Ok(value.clamp(-1.0, 1.0))
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// `|⟨a|b⟩|²`.
pub fn overlap_probability(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}
