//! Observed-information covariance and Wald inference.

use crate::normal;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mi,
    Nami,
    Ltm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mi => "mi",
            Method::Nami => "nami",
            Method::Ltm => "ltm",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mi" => Ok(Method::Mi),
            "nami" => Ok(Method::Nami),
            "ltm" => Ok(Method::Ltm),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// Central-difference Hessian of a function given through its gradient.
pub fn numeric_hessian<F>(mut grad: F, x: &[f64]) -> DMatrix<f64>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x.len();
    let base = f64::EPSILON.cbrt();
    let mut hess = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    let mut gp = vec![0.0; n];
    let mut gm = vec![0.0; n];
    for i in 0..n {
        let mut h = base * x[i].abs().max(1.0);
        for _ in 0..20 {
            xp[i] = x[i] + h;
            let fp = grad(&xp, &mut gp);
            xp[i] = x[i] - h;
            let fm = grad(&xp, &mut gm);
            if fp.is_finite() && fm.is_finite() && gp.iter().chain(&gm).all(|v| v.is_finite()) {
                break;
            }
            h *= 0.5;
        }
        xp[i] = x[i];
        for j in 0..n {
            hess[(i, j)] = (gp[j] - gm[j]) / (2.0 * h);
        }
    }
    let t = hess.transpose();
    (hess + t) * 0.5
}

#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    pub covariance: Option<DMatrix<f64>>,
    pub condition_number: f64,
    pub pseudo_inverse: bool,
    /// Coordinates held fixed, with zero variance, when forming the information.
    pub held_fixed: usize,
}

pub const MAX_CONDITION: f64 = 1e12;

/// Inverts an information matrix; ill-conditioned matrices get a pseudo-inverse,
/// indefinite or singular ones get no covariance.
pub fn invert_information(info: &DMatrix<f64>) -> CovarianceEstimate {
    let n = info.nrows();
    if n == 0 {
        return CovarianceEstimate { covariance: Some(DMatrix::zeros(0, 0)), condition_number: 1.0, pseudo_inverse: false, held_fixed: 0 };
    }
    if info.iter().any(|v| !v.is_finite()) {
        return CovarianceEstimate { covariance: None, condition_number: f64::INFINITY, pseudo_inverse: false, held_fixed: 0 };
    }
    let eig = SymmetricEigen::new(info.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let condition_number = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(max > 0.0) || min < -1e-8 * max || min == 0.0 {
        return CovarianceEstimate { covariance: None, condition_number, pseudo_inverse: false, held_fixed: 0 };
    }
    let pseudo = condition_number > MAX_CONDITION;
    let cutoff = if pseudo { max / MAX_CONDITION } else { 0.0 };
    let inv: Vec<f64> = eig.eigenvalues.iter().map(|&v| if v > cutoff { 1.0 / v } else { 0.0 }).collect();
    let q = &eig.eigenvectors;
    let scaled = q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(inv));
    let cov = &scaled * q.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    CovarianceEstimate { covariance: Some(cov), condition_number, pseudo_inverse: pseudo, held_fixed: 0 }
}

/// Inverse numeric Hessian over the coordinates in `free`, the others held at
/// `x`; fixed coordinates get zero rows and columns.
pub(crate) fn restricted_covariance<F>(mut objective: F, x: &[f64], free: &[usize]) -> CovarianceEstimate
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x.len();
    let mut full = x.to_vec();
    let mut gf = vec![0.0; n];
    let sub_x: Vec<f64> = free.iter().map(|&i| x[i]).collect();
    let info = numeric_hessian(
        |p: &[f64], g: &mut [f64]| {
            for (k, &i) in free.iter().enumerate() {
                full[i] = p[k];
            }
            let v = objective(&full, &mut gf);
            for (k, &i) in free.iter().enumerate() {
                g[k] = gf[i];
            }
            v
        },
        &sub_x,
    );
    let c = invert_information(&info);
    let covariance = c.covariance.map(|sub| {
        let mut out = DMatrix::zeros(n, n);
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                out[(i, j)] = sub[(a, b)];
            }
        }
        out
    });
    CovarianceEstimate { covariance, held_fixed: n - free.len(), ..c }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wald {
    pub estimate: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub p_value: f64,
}

pub fn wald(estimate: f64, se: f64, level: f64) -> Wald {
    let z = if (level - 0.95).abs() < 1e-12 { normal::Z_975 } else { normal::quantile(0.5 + 0.5 * level) };
    Wald { estimate, se, lower: estimate - z * se, upper: estimate + z * se, p_value: 2.0 * normal::cdf(-(estimate / se).abs()) }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub condition_number: f64,
    pub pseudo_inverse: bool,
}

/// Estimates and inference from any of the three estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub method: Method,
    pub effect: String,
    pub parameter_names: Vec<String>,
    pub theta_hat: Vec<f64>,
    /// Inverse observed information on the scale of `theta_hat`.
    pub covariance: Option<Vec<Vec<f64>>>,
    pub loglik: f64,
    pub tau_hat: f64,
    pub se_tau: Option<f64>,
    pub lambda: Vec<f64>,
    pub r_squared: Option<f64>,
    pub prognostic_strengths: Vec<f64>,
    pub n_used: usize,
    pub convergence: Convergence,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn wald(&self, level: f64) -> Option<Wald> {
        self.se_tau.map(|se| wald(self.tau_hat, se, level))
    }

    pub fn wald_ci(&self, level: f64) -> Option<(f64, f64)> {
        self.wald(level).map(|w| (w.lower, w.upper))
    }

    pub fn p_value(&self) -> Option<f64> {
        self.wald(0.95).map(|w| w.p_value)
    }
}

/// Maps an unconstrained-scale covariance to the reported scale: J C Jᵀ.
pub(crate) fn transform_covariance(cov: &DMatrix<f64>, jac: &DMatrix<f64>) -> DMatrix<f64> {
    jac * cov * jac.transpose()
}

pub(crate) fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}
