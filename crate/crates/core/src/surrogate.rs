//! Classical Fourier surrogates.
//!
//! A surrogate is a truncated Fourier series `g(x) = Re Σ_k α_k e^{ik·x}` over
//! an integer frequency lattice. Coefficients come from one of:
//!
//! * [`fit_exact`]: square interpolation on `(2L+1)^d` nodes of the full
//!   lattice, the white-box route used once the layer count is known;
//! * [`fit_least_squares`]: the general over-determined version;
//! * [`fit_separable`]: a real `{1, cos(k x_j), sin(k x_j)}` basis fitted by
//!   least squares, stored as one-sided complex coefficients.
//!
//! All solves go through an SVD of the design matrix; the reported condition
//! number is `σ_max / σ_min`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Svd;
use crate::qstate::C64;
use crate::regions::Region;

/// Design matrices with a larger condition estimate are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeKind {
    /// `{-L, …, L}^d`
    FullSquare { degree: usize },
    /// `{0} ∪ {k e_j : 1 ≤ k ≤ k_max}`, one-sided; negative partners are
    /// implied by taking the real part.
    Separable { k_max: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyLattice {
    d: usize,
    vectors: Vec<Vec<i32>>,
    kind: LatticeKind,
}

impl FrequencyLattice {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vectors(&self) -> &[Vec<i32>] {
        &self.vectors
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn position(&self, k: &[i32]) -> Option<usize> {
        self.vectors.binary_search_by(|v| v.as_slice().cmp(k)).ok()
    }

    /// Largest absolute frequency along each axis.
    pub fn axis_bounds(&self) -> Vec<i32> {
        (0..self.d)
            .map(|j| self.vectors.iter().map(|v| v[j].abs()).max().unwrap_or(0))
            .collect()
    }

    /// True when every vector of `other` is also in `self`.
    pub fn contains_lattice(&self, other: &FrequencyLattice) -> bool {
        self.d == other.d && other.vectors.iter().all(|k| self.position(k).is_some())
    }

    pub fn from_kind(kind: LatticeKind, d: usize) -> Result<Self> {
        match kind {
            LatticeKind::FullSquare { degree } => full_lattice(degree, d),
            LatticeKind::Separable { k_max } => separable_lattice(k_max, d),
        }
    }
}

/// `{-degree, …, degree}^d` in lexicographic order.
pub fn full_lattice(degree: usize, d: usize) -> Result<FrequencyLattice> {
    if d == 0 {
        return Err(Error::InvalidConfig("lattice dimension must be >= 1".into()));
    }
    let l = degree as i32;
    let side = 2 * degree + 1;
    let count = side
        .checked_pow(d as u32)
        .ok_or_else(|| Error::InvalidConfig("lattice too large".into()))?;
    let mut vectors = Vec::with_capacity(count);
    let mut current = vec![-l; d];
    loop {
        vectors.push(current.clone());
        // odometer increment, last axis fastest
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(FrequencyLattice {
                    d,
                    vectors,
                    kind: LatticeKind::FullSquare { degree },
                });
            }
            axis -= 1;
            if current[axis] < l {
                current[axis] += 1;
                break;
            }
            current[axis] = -l;
        }
    }
}

pub fn separable_lattice(k_max: usize, d: usize) -> Result<FrequencyLattice> {
    if d == 0 {
        return Err(Error::InvalidConfig("lattice dimension must be >= 1".into()));
    }
    let mut vectors = vec![vec![0; d]];
    for j in 0..d {
        for k in 1..=k_max as i32 {
            let mut v = vec![0; d];
            v[j] = k;
            vectors.push(v);
        }
    }
    vectors.sort();
    Ok(FrequencyLattice {
        d,
        vectors,
        kind: LatticeKind::Separable { k_max },
    })
}

/// Independent real coefficients of a real degree-`degree` series in
/// `dims` variables: `((2D+1)^M − 1)/2 + 1`. `None` on overflow.
pub fn coefficient_count(degree: u32, dims: u32) -> Option<u128> {
    let full = (2 * degree as u128 + 1).checked_pow(dims)?;
    Some((full - 1) / 2 + 1)
}

/// The canonical `(2L+1)^d` lattice on `[0, 2π)^d`, mapped affinely into the
/// region's node box (row-major, axis 0 outermost).
///
/// When the lower face of the box is part of the region the lattice starts on
/// it; otherwise every node is shifted by half a step so none touches the
/// boundary. Balls use their inscribed cube.
pub fn nodes_in_region(region: &Region, degree: usize, d: usize) -> Result<Vec<Vec<f64>>> {
    region.validate()?;
    if region.dim() != d {
        return Err(Error::Dimension {
            expected: region.dim(),
            got: d,
        });
    }
    let b = region.node_box();
    let n = 2 * degree + 1;
    let offset = if b.lower_closed { 0.0 } else { 0.5 };
    let mut axes = Vec::with_capacity(d);
    for axis in 0..d {
        let extent = b.hi[axis] - b.lo[axis];
        if !(extent > 0.0) {
            return Err(Error::DegenerateRegion { axis });
        }
        axes.push(
            (0..n)
                .map(|i| b.lo[axis] + (i as f64 + offset) * extent / n as f64)
                .collect::<Vec<_>>(),
        );
    }
    let total = n.pow(d as u32);
    Ok((0..total)
        .map(|mut flat| {
            let mut node = vec![0.0; d];
            for axis in (0..d).rev() {
                node[axis] = axes[axis][flat % n];
                flat /= n;
            }
            node
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSurrogate {
    lattice: FrequencyLattice,
    coefficients: Vec<C64>,
}

impl FourierSurrogate {
    pub fn new(lattice: FrequencyLattice, coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.len() != lattice.len() {
            return Err(Error::Dimension {
                expected: lattice.len(),
                got: coefficients.len(),
            });
        }
        Ok(FourierSurrogate {
            lattice,
            coefficients,
        })
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: &[i32]) -> Option<C64> {
        self.lattice.position(k).map(|i| self.coefficients[i])
    }

    /// `Σ_k α_k e^{ik·x}` before taking the real part.
    pub fn evaluate_complex(&self, x: &[f64]) -> Result<C64> {
        if x.len() != self.lattice.d {
            return Err(Error::Dimension {
                expected: self.lattice.d,
                got: x.len(),
            });
        }
        Ok(self
            .lattice
            .vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(k, a)| a * C64::from_polar(1.0, phase(k, x)))
            .sum())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate_complex(x)?.re)
    }

    pub fn evaluate_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.evaluate(x)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SurrogateDoc::from(self)).expect("surrogate serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: SurrogateDoc =
            serde_json::from_str(s).map_err(|e| Error::InvalidConfig(format!("surrogate JSON: {e}")))?;
        doc.try_into()
    }
}

/// On-disk form: lattice description plus interleaved `re, im` pairs.
#[derive(Debug, Serialize, Deserialize)]
struct SurrogateDoc {
    lattice: LatticeKind,
    d: usize,
    coefficients: Vec<f64>,
}

impl From<&FourierSurrogate> for SurrogateDoc {
    fn from(s: &FourierSurrogate) -> Self {
        SurrogateDoc {
            lattice: s.lattice.kind,
            d: s.lattice.d,
            coefficients: s.coefficients.iter().flat_map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<SurrogateDoc> for FourierSurrogate {
    type Error = Error;

    fn try_from(doc: SurrogateDoc) -> Result<Self> {
        let lattice = FrequencyLattice::from_kind(doc.lattice, doc.d)?;
        if doc.coefficients.len() != 2 * lattice.len() {
            return Err(Error::Dimension {
                expected: 2 * lattice.len(),
                got: doc.coefficients.len(),
            });
        }
        let coefficients = doc
            .coefficients
            .chunks_exact(2)
            .map(|p| C64::new(p[0], p[1]))
            .collect();
        FourierSurrogate::new(lattice, coefficients)
    }
}

fn phase(k: &[i32], x: &[f64]) -> f64 {
    k.iter().zip(x).map(|(&k, &x)| k as f64 * x).sum()
}

/// Result of a complex least-squares or exact fit.
#[derive(Debug, Clone)]
pub struct FourierFit {
    pub surrogate: FourierSurrogate,
    /// Model evaluations consumed (one per node).
    pub quantum_calls: usize,
    pub condition: f64,
    /// `max_i |Φα − y|_i`
    pub max_residual: f64,
}

pub fn design_matrix(lattice: &FrequencyLattice, nodes: &[Vec<f64>]) -> Result<DMatrix<C64>> {
    for x in nodes {
        if x.len() != lattice.d {
            return Err(Error::Dimension {
                expected: lattice.d,
                got: x.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(nodes.len(), lattice.len(), |i, j| {
        C64::from_polar(1.0, phase(&lattice.vectors[j], &nodes[i]))
    }))
}

/// Least-squares coefficients on an arbitrary node set with at least as many
/// nodes as lattice vectors.
pub fn fit_least_squares(
    values: &[f64],
    lattice: &FrequencyLattice,
    nodes: &[Vec<f64>],
) -> Result<FourierFit> {
    if values.len() != nodes.len() {
        return Err(Error::Dimension {
            expected: nodes.len(),
            got: values.len(),
        });
    }
    if nodes.len() < lattice.len() {
        return Err(Error::Underdetermined {
            rows: nodes.len(),
            columns: lattice.len(),
        });
    }
    let phi = design_matrix(lattice, nodes)?;
    let y = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
    // Solve the real embedding [Re Φ, −Im Φ; Im Φ, Re Φ]; its singular values
    // are those of Φ, each repeated twice.
    let (m, n) = phi.shape();
    let embedded = DMatrix::from_fn(2 * m, 2 * n, |i, j| {
        let z = phi[(i % m, j % n)];
        match (i < m, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut rhs = DVector::zeros(2 * m);
    rhs.rows_mut(0, m).copy_from(&DVector::from_column_slice(values));
    let svd = Svd::new(&embedded);
    let condition = svd.condition();
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition });
    }
    let packed = svd.solve(&rhs, 0.0);
    let alpha = DVector::from_fn(n, |j, _| C64::new(packed[j], packed[n + j]));
    let residual = &phi * &alpha - &y;
    let max_residual = residual.iter().map(|r| r.norm()).fold(0.0, f64::max);
    Ok(FourierFit {
        surrogate: FourierSurrogate::new(lattice.clone(), alpha.iter().cloned().collect())?,
        quantum_calls: nodes.len(),
        condition,
        max_residual,
    })
}

/// Solves the square system `Φα = y` on exactly `|lattice|` nodes.
pub fn fit_exact(values: &[f64], lattice: &FrequencyLattice, nodes: &[Vec<f64>]) -> Result<FourierFit> {
    if nodes.len() != lattice.len() {
        return Err(Error::Dimension {
            expected: lattice.len(),
            got: nodes.len(),
        });
    }
    fit_least_squares(values, lattice, nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankPolicy {
    /// Reject designs whose condition estimate exceeds [`CONDITION_LIMIT`].
    Strict,
    /// Minimum-norm least squares, discarding singular values below
    /// `σ_max / CONDITION_LIMIT`.
    MinimumNorm,
}

#[derive(Debug, Clone)]
pub struct SeparableFit {
    pub surrogate: FourierSurrogate,
    pub quantum_calls: usize,
    pub columns: usize,
    pub condition: f64,
    /// Mean squared residual on the fitted samples.
    pub mse: f64,
}

pub fn separable_columns(k_max: usize, d: usize) -> usize {
    1 + 2 * k_max * d
}

/// Real basis row `[1, cos(x_1), sin(x_1), …, cos(k_max x_1), sin(k_max x_1), cos(x_2), …]`.
pub fn separable_basis(x: &[f64], k_max: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(separable_columns(k_max, x.len()));
    row.push(1.0);
    for &xj in x {
        for k in 1..=k_max {
            let (s, c) = (k as f64 * xj).sin_cos();
            row.push(c);
            row.push(s);
        }
    }
    row
}

pub fn fit_separable(values: &[f64], xs: &[Vec<f64>], k_max: usize) -> Result<SeparableFit> {
    fit_separable_with(values, xs, k_max, RankPolicy::Strict)
}

pub fn fit_separable_with(
    values: &[f64],
    xs: &[Vec<f64>],
    k_max: usize,
    policy: RankPolicy,
) -> Result<SeparableFit> {
    if values.len() != xs.len() {
        return Err(Error::Dimension {
            expected: xs.len(),
            got: values.len(),
        });
    }
    let d = xs.first().map(|x| x.len()).ok_or(Error::EmptySamples)?;
    if let Some(bad) = xs.iter().find(|x| x.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            got: bad.len(),
        });
    }
    let columns = separable_columns(k_max, d);
    if xs.len() < columns {
        return Err(Error::Underdetermined {
            rows: xs.len(),
            columns,
        });
    }
    let rows: Vec<Vec<f64>> = xs.iter().map(|x| separable_basis(x, k_max)).collect();
    let psi = DMatrix::from_fn(xs.len(), columns, |i, j| rows[i][j]);
    let y = DVector::from_column_slice(values);
    let svd = Svd::new(&psi);
    let condition = svd.condition();
    let sigma_max = svd.singular[0];
    let cutoff = match policy {
        RankPolicy::Strict => {
            if !(condition <= CONDITION_LIMIT) {
                return Err(Error::RankDeficient { condition });
            }
            0.0
        }
        RankPolicy::MinimumNorm => sigma_max / CONDITION_LIMIT,
    };
    let beta = svd.solve(&y, cutoff);
    let fitted = &psi * &beta;
    let mse = fitted
        .iter()
        .zip(values)
        .map(|(f, v)| (f - v) * (f - v))
        .sum::<f64>()
        / values.len() as f64;

    // a cos(kx) + b sin(kx) = Re[(a − ib) e^{ikx}]
    let lattice = separable_lattice(k_max, d)?;
    let mut by_vector: HashMap<Vec<i32>, C64> = HashMap::new();
    by_vector.insert(vec![0; d], C64::new(beta[0], 0.0));
    let mut col = 1;
    for j in 0..d {
        for k in 1..=k_max as i32 {
            let mut v = vec![0; d];
            v[j] = k;
            by_vector.insert(v, C64::new(beta[col], -beta[col + 1]));
            col += 2;
        }
    }
    let coefficients = lattice.vectors.iter().map(|v| by_vector[v]).collect();
    Ok(SeparableFit {
        surrogate: FourierSurrogate::new(lattice, coefficients)?,
        quantum_calls: xs.len(),
        columns,
        condition,
        mse,
    })
}

/// Total model invocations `2 T ‖M‖² / ε² · (ln(1/δ) + T ln 2)` needed to
/// estimate `T` coefficients to accuracy `ε` with failure probability `δ`.
pub fn invocation_bound(t: u64, m_norm: f64, epsilon: f64, delta: f64) -> f64 {
    let t = t as f64;
    2.0 * t * m_norm * m_norm / (epsilon * epsilon) * ((1.0 / delta).ln() + t * std::f64::consts::LN_2)
}
