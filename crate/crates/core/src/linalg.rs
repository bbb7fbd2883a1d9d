//! Thin SVD by one-sided Jacobi rotations.
//!
//! nalgebra's implicit-shift SVD proved unreliable on small Fourier design
//! matrices: depending on the convergence threshold, reconstruction errors
//! ranged from 1e-15 to 1e-4 on the same well-conditioned input. One-sided
//! Jacobi is slower but accurate to working precision, and every matrix here
//! is at most a few hundred rows by ~100 columns.

use nalgebra::{DMatrix, DVector};

const MAX_SWEEPS: usize = 80;
const ORTHOGONALITY_TOL: f64 = 1e-15;

/// `A = U diag(σ) Vᵀ` with `σ` sorted in decreasing order; `U` is `m × k`,
/// `V` is `n × k`, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub singular: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn new(a: &DMatrix<f64>) -> Svd {
        if a.nrows() < a.ncols() {
            let t = Svd::new(&a.transpose());
            return Svd {
                u: t.v,
                singular: t.singular,
                v: t.u,
            };
        }
        let (m, n) = a.shape();
        let mut u = a.clone();
        let mut v = DMatrix::<f64>::identity(n, n);
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                    for i in 0..m {
                        let (x, y) = (u[(i, p)], u[(i, q)]);
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                    if gamma == 0.0 || gamma.abs() <= ORTHOGONALITY_TOL * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let (x, y) = (u[(i, p)], u[(i, q)]);
                        u[(i, p)] = c * x - s * y;
                        u[(i, q)] = s * x + c * y;
                    }
                    for i in 0..n {
                        let (x, y) = (v[(i, p)], v[(i, q)]);
                        v[(i, p)] = c * x - s * y;
                        v[(i, q)] = s * x + c * y;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut norms: Vec<(usize, f64)> = (0..n).map(|j| (j, u.column(j).norm())).collect();
        norms.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut su = DMatrix::zeros(m, n);
        let mut sv = DMatrix::zeros(n, n);
        let mut singular = DVector::zeros(n);
        for (dst, &(src, sigma)) in norms.iter().enumerate() {
            singular[dst] = sigma;
            if sigma > 0.0 {
                su.set_column(dst, &(u.column(src) / sigma));
            }
            sv.set_column(dst, &v.column(src));
        }
        Svd { u: su, singular, v: sv }
    }

    /// `σ_max / σ_min`, infinite when singular.
    pub fn condition(&self) -> f64 {
        let max = self.singular.iter().cloned().fold(0.0, f64::max);
        let min = self.singular.iter().cloned().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }

    /// Pseudo-inverse solution, discarding singular values `≤ cutoff`.
    pub fn solve(&self, b: &DVector<f64>, cutoff: f64) -> DVector<f64> {
        let mut coeffs = self.u.transpose() * b;
        for (c, s) in coeffs.iter_mut().zip(self.singular.iter()) {
            *c = if *s > cutoff { *c / s } else { 0.0 };
        }
        &self.v * coeffs
    }
}
