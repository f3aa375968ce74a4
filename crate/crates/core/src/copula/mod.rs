//! Gaussian copula structure: the unit lower triangular Λ(λ), the scaled factor
//! Ω = Λ·diag(Λ⁻¹Λ⁻ᵀ)^{1/2}, and the implied correlation Σ = Ω⁻¹Ω⁻ᵀ.
//!
//! λ is stored row-major over the strict lower triangle: (λ₂₁, λ₃₁, λ₃₂, …).

mod mvn;

pub use mvn::{mvn_rectangle, mvn_rectangle_with, RectangleOptions};

use crate::error::{Error, Result};
use crate::normal;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopulaStructure {
    dim: usize,
    lambda: Vec<f64>,
}

/// Position of λ_{ij} (0-based, i > j) in the packed vector.
pub fn packed_index(i: usize, j: usize) -> usize {
    debug_assert!(i > j);
    i * (i - 1) / 2 + j
}

pub fn packed_len(dim: usize) -> usize {
    dim * dim.saturating_sub(1) / 2
}

impl CopulaStructure {
    pub fn new(dim: usize, lambda: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("copula dimension must be positive".into()));
        }
        if lambda.len() != packed_len(dim) {
            return Err(Error::DimensionMismatch { expected: packed_len(dim), got: lambda.len() });
        }
        Ok(Self { dim, lambda })
    }

    pub fn independent(dim: usize) -> Self {
        Self { dim, lambda: vec![0.0; packed_len(dim)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::identity(self.dim, self.dim);
        for i in 1..self.dim {
            for j in 0..i {
                m[(i, j)] = self.lambda[packed_index(i, j)];
            }
        }
        m
    }

    pub fn factors(&self) -> Factors {
        Factors::new(&self.lambda_matrix())
    }

    pub fn omega(&self) -> DMatrix<f64> {
        self.factors().omega
    }

    pub fn correlation(&self) -> DMatrix<f64> {
        self.factors().sigma()
    }

    pub fn precision(&self) -> DMatrix<f64> {
        let o = self.omega();
        o.transpose() * o
    }
}

/// Λ, L = Λ⁻¹, the column scales d and Ω = Λ·diag(d).
#[derive(Debug, Clone)]
pub struct Factors {
    pub lambda: DMatrix<f64>,
    pub linv: DMatrix<f64>,
    pub d: Vec<f64>,
    pub omega: DMatrix<f64>,
}

impl Factors {
    pub fn new(lambda: &DMatrix<f64>) -> Self {
        let n = lambda.nrows();
        let linv = unit_lower_inverse(lambda);
        // d_b = ‖row b of Λ⁻¹‖ so that Σ = diag(d)⁻¹ L Lᵀ diag(d)⁻¹ has unit diagonal
        let d: Vec<f64> = (0..n).map(|b| (0..=b).map(|k| linv[(b, k)].powi(2)).sum::<f64>().sqrt()).collect();
        let mut omega = lambda.clone();
        for b in 0..n {
            for a in b..n {
                omega[(a, b)] *= d[b];
            }
        }
        Self { lambda: lambda.clone(), linv, d, omega }
    }

    /// Σ = Ω⁻¹Ω⁻ᵀ, computed as diag(d)⁻¹ L Lᵀ diag(d)⁻¹.
    pub fn sigma(&self) -> DMatrix<f64> {
        let n = self.d.len();
        let mut s = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..=a {
                let v: f64 = (0..=b).map(|k| self.linv[(a, k)] * self.linv[(b, k)]).sum::<f64>() / (self.d[a] * self.d[b]);
                s[(a, b)] = v;
                s[(b, a)] = v;
            }
            s[(a, a)] = 1.0;
        }
        s
    }
}

fn unit_lower_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut inv = DMatrix::identity(n, n);
    for i in 1..n {
        for j in 0..i {
            let s: f64 = (j..i).map(|k| m[(i, k)] * inv[(k, j)]).sum();
            inv[(i, j)] = -s;
        }
    }
    inv
}

pub fn lambda_to_omega(c: &CopulaStructure) -> DMatrix<f64> {
    c.omega()
}

/// Last row of Σ without its diagonal: correlations of the outcome with each covariate.
pub fn outcome_correlations(c: &CopulaStructure) -> Vec<f64> {
    let s = c.correlation();
    let j = c.dim() - 1;
    (0..j).map(|k| s[(j, k)]).collect()
}

/// ρ = −λ/√(1+λ²) for a bivariate copula.
pub fn rho_from_lambda(lambda: f64) -> f64 {
    -lambda / (1.0 + lambda * lambda).sqrt()
}

/// λ = −exp(logit(ρ²)/2), the inverse of `rho_from_lambda` on ρ ∈ [0, 1).
pub fn lambda_from_rho(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho must lie in [0, 1), got {rho}")));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let r2 = rho * rho;
    Ok(-((r2 / (1.0 - r2)).ln() / 2.0).exp())
}

/// Principal submatrix of Σ on `keep`.
pub fn marginalize(c: &CopulaStructure, keep: &[usize]) -> Result<DMatrix<f64>> {
    if keep.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= c.dim()) {
        return Err(Error::Domain(format!("index {bad} outside dimension {}", c.dim())));
    }
    let s = c.correlation();
    Ok(DMatrix::from_fn(keep.len(), keep.len(), |a, b| s[(keep[a], keep[b])]))
}

/// Mean and sd of the last coordinate given the others, read off the last row of Ω.
pub fn conditional_params(c: &CopulaStructure, z: &[f64]) -> Result<(f64, f64)> {
    let j = c.dim() - 1;
    if z.len() != j {
        return Err(Error::DimensionMismatch { expected: j, got: z.len() });
    }
    let o = c.omega();
    let w = o[(j, j)];
    let mean = -(0..j).map(|k| o[(j, k)] * z[k]).sum::<f64>() / w;
    Ok((mean, 1.0 / w))
}

/// 1 − ω_JJ⁻²
pub fn r_squared(c: &CopulaStructure) -> f64 {
    let o = c.omega();
    let w = o[(c.dim() - 1, c.dim() - 1)];
    1.0 - 1.0 / (w * w)
}

/// |ω_Jj| for every covariate j.
pub fn prognostic_strengths(c: &CopulaStructure) -> Vec<f64> {
    let o = c.omega();
    let j = c.dim() - 1;
    (0..j).map(|k| o[(j, k)].abs()).collect()
}

/// Σ_j log φ((Ωz)_j) + Σ_j log ω_jj.
pub fn mvn_logpdf(omega: &DMatrix<f64>, z: &[f64]) -> f64 {
    let n = omega.nrows();
    (0..n)
        .map(|a| {
            let e: f64 = (0..=a).map(|b| omega[(a, b)] * z[b]).sum();
            normal::log_pdf(e) + omega[(a, a)].ln()
        })
        .sum()
}

/// Log density of N(0, Σ) through a Cholesky factor; errors when Σ is not positive definite.
pub fn dense_mvn_logpdf(sigma: &DMatrix<f64>, z: &[f64]) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(sigma.clone()).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let n = z.len();
    let mut y = vec![0.0; n];
    let mut logdet = 0.0;
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[(i, k)] * y[k]).sum();
        y[i] = (z[i] - s) / l[(i, i)];
        logdet += l[(i, i)].ln();
    }
    Ok(y.iter().map(|v| normal::log_pdf(*v)).sum::<f64>() - logdet)
}
