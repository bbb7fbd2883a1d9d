//! Data-reuploading circuit families.
//!
//! Parameter layouts (flat `theta`, three Euler angles per `Rot`):
//!
//! * `Basic1D` on `q` qubits: `L` layers of [Rot on every qubit, CNOT ring,
//!   RX(x) on every qubit], then a closing block of Rot on every qubit plus
//!   CNOT ring. `3q(L+1)` angles. The ring is skipped for one qubit.
//! * `LineAnsatz`: per layer, for each feature `m`, RX(x_m) then Rot on qubit
//!   `m mod q`; a CNOT ring closes each layer when `q > 1`. `3dL` angles.
//! * `StronglyEntanglingReupload` (`q = d`): per upload, RY(x_m) on qubit
//!   `m`, CNOT ring, Rot on every qubit, CNOT ring. `3qL` angles.
//!
//! The observable is always `Z` on qubit 0.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{init_zero, Gate, StateVector, MAX_QUBITS};
use crate::surrogate::{full_lattice, FrequencyLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzKind {
    Basic1D,
    LineAnsatz,
    StronglyEntanglingReupload,
}

impl AnsatzKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AnsatzKind::Basic1D => "Basic1D",
            AnsatzKind::LineAnsatz => "LineAnsatz",
            AnsatzKind::StronglyEntanglingReupload => "StronglyEntanglingReupload",
        }
    }
}

/// Per-feature frequency bounds of a model's spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumDescriptor {
    pub bounds: Vec<usize>,
    /// The accessible set is the full product `∏_m {-D_m, …, D_m}`.
    pub full_lattice: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReuploadModel {
    pub ansatz_kind: AnsatzKind,
    pub n_qubits: usize,
    pub layers: usize,
    pub n_features: usize,
    pub theta: Vec<f64>,
    /// Seed used to draw the initial parameters, if any.
    #[serde(default)]
    pub seed: Option<u64>,
}

pub fn parameter_count(kind: AnsatzKind, n_qubits: usize, layers: usize, n_features: usize) -> usize {
    match kind {
        AnsatzKind::Basic1D => 3 * n_qubits * (layers + 1),
        AnsatzKind::LineAnsatz => 3 * n_features * layers,
        AnsatzKind::StronglyEntanglingReupload => 3 * n_qubits * layers,
    }
}

fn check_shape(kind: AnsatzKind, n_qubits: usize, layers: usize, n_features: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(n_qubits));
    }
    if layers == 0 {
        return Err(Error::InvalidModel("layers must be >= 1".into()));
    }
    if n_features == 0 {
        return Err(Error::InvalidModel("n_features must be >= 1".into()));
    }
    match kind {
        AnsatzKind::Basic1D if n_features != 1 => Err(Error::InvalidModel(format!(
            "Basic1D takes one feature, got {n_features}"
        ))),
        AnsatzKind::StronglyEntanglingReupload if n_qubits != n_features => {
            Err(Error::InvalidModel(format!(
                "StronglyEntanglingReupload needs one qubit per feature ({n_qubits} qubits, {n_features} features)"
            )))
        }
        _ => Ok(()),
    }
}

impl ReuploadModel {
    pub fn new(
        ansatz_kind: AnsatzKind,
        n_qubits: usize,
        layers: usize,
        n_features: usize,
        theta: Vec<f64>,
    ) -> Result<Self> {
        let model = ReuploadModel {
            ansatz_kind,
            n_qubits,
            layers,
            n_features,
            theta,
            seed: None,
        };
        model.validate()?;
        Ok(model)
    }

    /// Parameters drawn i.i.d. from `N(0, std²)` with a seeded ChaCha8 stream.
    pub fn init_normal(
        ansatz_kind: AnsatzKind,
        n_qubits: usize,
        layers: usize,
        n_features: usize,
        std: f64,
        seed: u64,
    ) -> Result<Self> {
        check_shape(ansatz_kind, n_qubits, layers, n_features)?;
        let normal = Normal::new(0.0, std)
            .map_err(|e| Error::InvalidModel(format!("bad init std {std}: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = parameter_count(ansatz_kind, n_qubits, layers, n_features);
        let theta = (0..count).map(|_| normal.sample(&mut rng)).collect();
        let mut model = ReuploadModel::new(ansatz_kind, n_qubits, layers, n_features, theta)?;
        model.seed = Some(seed);
        Ok(model)
    }

    pub fn zeros(ansatz_kind: AnsatzKind, n_qubits: usize, layers: usize, n_features: usize) -> Result<Self> {
        let count = parameter_count(ansatz_kind, n_qubits, layers, n_features);
        ReuploadModel::new(ansatz_kind, n_qubits, layers, n_features, vec![0.0; count])
    }

    pub fn validate(&self) -> Result<()> {
        check_shape(self.ansatz_kind, self.n_qubits, self.layers, self.n_features)?;
        let want = self.parameter_count();
        if self.theta.len() != want {
            return Err(Error::InvalidModel(format!(
                "{} with {} qubits, {} layers, {} features needs {want} parameters, got {}",
                self.ansatz_kind.as_str(),
                self.n_qubits,
                self.layers,
                self.n_features,
                self.theta.len()
            )));
        }
        if let Some(i) = self.theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidModel(format!("parameter {i} is not finite")));
        }
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        parameter_count(self.ansatz_kind, self.n_qubits, self.layers, self.n_features)
    }

    /// Same architecture, new parameters.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        let mut m = self.clone();
        m.theta = theta;
        m.validate()?;
        Ok(m)
    }

    pub fn circuit(&self, x: &[f64]) -> Result<Vec<Gate>> {
        self.circuit_with(&self.theta, x)
    }

    fn circuit_with(&self, theta: &[f64], x: &[f64]) -> Result<Vec<Gate>> {
        if x.len() != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let n = self.n_qubits;
        let mut gates = Vec::new();
        let mut angles = theta.chunks_exact(3);
        let mut rot = |gates: &mut Vec<Gate>, qubit: usize| {
            let a = angles.next().expect("theta length checked by validate");
            gates.push(Gate::Rot {
                qubit,
                phi: a[0],
                theta: a[1],
                omega: a[2],
            });
        };
        let ring = |gates: &mut Vec<Gate>| {
            if n > 1 {
                for i in 0..n {
                    gates.push(Gate::Cnot {
                        control: i,
                        target: (i + 1) % n,
                    });
                }
            }
        };
        match self.ansatz_kind {
            AnsatzKind::Basic1D => {
                for _ in 0..self.layers {
                    for q in 0..n {
                        rot(&mut gates, q);
                    }
                    ring(&mut gates);
                    for q in 0..n {
                        gates.push(Gate::Rx { qubit: q, angle: x[0] });
                    }
                }
                for q in 0..n {
                    rot(&mut gates, q);
                }
                ring(&mut gates);
            }
            AnsatzKind::LineAnsatz => {
                for _ in 0..self.layers {
                    for (m, &xm) in x.iter().enumerate() {
                        let q = m % n;
                        gates.push(Gate::Rx { qubit: q, angle: xm });
                        rot(&mut gates, q);
                    }
                    ring(&mut gates);
                }
            }
            AnsatzKind::StronglyEntanglingReupload => {
                for _ in 0..self.layers {
                    for (q, &xm) in x.iter().enumerate() {
                        gates.push(Gate::Ry { qubit: q, angle: xm });
                    }
                    ring(&mut gates);
                    for q in 0..n {
                        rot(&mut gates, q);
                    }
                    ring(&mut gates);
                }
            }
        }
        Ok(gates)
    }

    pub fn state(&self, x: &[f64]) -> Result<StateVector> {
        self.state_with(&self.theta, x)
    }

    fn state_with(&self, theta: &[f64], x: &[f64]) -> Result<StateVector> {
        let mut psi = init_zero(self.n_qubits)?;
        for g in self.circuit_with(theta, x)? {
            psi.apply_in_place(&g)?;
        }
        Ok(psi)
    }

    /// `⟨Z_0⟩` after the circuit on `|0…0⟩`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.state(x)?.expectation_z(0)
    }

    /// Forward pass with a substitute parameter vector of the same length.
    pub fn forward_with(&self, theta: &[f64], x: &[f64]) -> Result<f64> {
        if theta.len() != self.theta.len() {
            return Err(Error::Dimension {
                expected: self.theta.len(),
                got: theta.len(),
            });
        }
        self.state_with(theta, x)?.expectation_z(0)
    }

    pub fn forward_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.forward(x)).collect()
    }

    pub fn spectrum_descriptor(&self) -> SpectrumDescriptor {
        let bounds = match self.ansatz_kind {
            AnsatzKind::Basic1D => vec![self.n_qubits * self.layers],
            AnsatzKind::LineAnsatz | AnsatzKind::StronglyEntanglingReupload => {
                vec![self.layers; self.n_features]
            }
        };
        SpectrumDescriptor {
            bounds,
            full_lattice: true,
        }
    }

    /// The integer frequency lattice the model's Fourier series lives on.
    pub fn spectrum(&self) -> FrequencyLattice {
        let d = self.spectrum_descriptor();
        full_lattice(d.bounds[0], self.n_features).expect("validated model has a non-empty lattice")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: ReuploadModel =
            serde_json::from_str(s).map_err(|e| Error::InvalidModel(format!("model JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }
}
