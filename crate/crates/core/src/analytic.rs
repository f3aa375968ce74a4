//! Closed-form standard errors, expected information and sample sizes for the
//! normal shift model with and without one prognostic covariate.
//!
//! Quantiles follow z_p = Φ⁻¹(p), so z_β is negative for power above one half.

use crate::error::{Error, Result};
use crate::normal;
use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

/// SE(τ) = √((2/N)(τ²/4 + 2)).
pub fn se_unadjusted(tau: f64, n: f64) -> f64 {
    (2.0 / n * (tau * tau / 4.0 + 2.0)).sqrt()
}

/// SE(τ, λ) = √((2/N)((1+λ²)τ² + 8)/(4(1+λ²))).
pub fn se_adjusted(tau: f64, lambda: f64, n: f64) -> f64 {
    let l2 = 1.0 + lambda * lambda;
    (2.0 / n * (l2 * tau * tau + 8.0) / (4.0 * l2)).sqrt()
}

/// SE(τ, λ)²/SE(τ)² with λ = λ(ρ).
pub fn sample_size_fraction(tau: f64, rho: f64) -> Result<f64> {
    let lambda = crate::copula::lambda_from_rho(rho)?;
    Ok((se_adjusted(tau, lambda, 1.0) / se_unadjusted(tau, 1.0)).powi(2))
}

/// Expected information of one control plus one treated subject.
///
/// Without `lambda` the parameters are (ϑ₁, ϑ₂, τ) of Φ(ϑ₁ + ϑ₂y + τ(w − ½)).
/// With `lambda` they are (ϑ₁₁, ϑ₁₂, τ, ϑ₂₁, ϑ₂₂, λ) of the bivariate model
/// Λ(λ)⁻¹(ϑ₁₁ + ϑ₁₂y + τ(w − ½), ϑ₂₁ + ϑ₂₂x)ᵀ ~ N₂(0, I), passed as
/// `adjusted = (λ, [ϑ₂₁, ϑ₂₂])`.
pub fn expected_fisher_pair(theta: [f64; 2], tau: f64, adjusted: Option<(f64, [f64; 2])>) -> DMatrix<f64> {
    let [t1, t2] = theta;
    match adjusted {
        None => DMatrix::from_row_slice(
            3,
            3,
            &[
                2.0,
                -2.0 * t1 / t2,
                0.0,
                -2.0 * t1 / t2,
                (4.0 * t1 * t1 + tau * tau + 8.0) / (2.0 * t2 * t2),
                -tau / (2.0 * t2),
                0.0,
                -tau / (2.0 * t2),
                0.5,
            ],
        ),
        Some((l, [s1, s2])) => {
            let q = 1.0 + l * l;
            let mut h = DMatrix::zeros(6, 6);
            let upper = [
                (0, 0, 2.0 * q),
                (0, 1, -2.0 * q * t1 / t2),
                (0, 3, 2.0 * l),
                (0, 4, -2.0 * l * s1 / s2),
                (1, 1, (4.0 * q * t1 * t1 + q * tau * tau + 4.0 * l * l + 8.0) / (2.0 * t2 * t2)),
                (1, 2, -q * tau / (2.0 * t2)),
                (1, 3, -2.0 * l * t1 / t2),
                (1, 4, (2.0 * l * t1 * s1 - 2.0 * l * l) / (t2 * s2)),
                (1, 5, 2.0 * l / t2),
                (2, 2, q / 2.0),
                (3, 3, 2.0),
                (3, 4, -2.0 * s1 / s2),
                (4, 4, (2.0 * s1 * s1 + 2.0 * l * l + 4.0) / (s2 * s2)),
                (4, 5, -2.0 * l / s2),
                (5, 5, 2.0),
            ];
            for (i, j, v) in upper {
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
            h
        }
    }
}

/// Leading 3×3 block of the inverse of a 6×6 information, (A − B D⁻¹ Bᵀ)⁻¹.
pub fn schur_block(h: &DMatrix<f64>) -> Result<Matrix3<f64>> {
    let a: Matrix3<f64> = h.fixed_view::<3, 3>(0, 0).into();
    let b: Matrix3<f64> = h.fixed_view::<3, 3>(0, 3).into();
    let d: Matrix3<f64> = h.fixed_view::<3, 3>(3, 3).into();
    let dinv = d.try_inverse().ok_or(Error::SingularHessian { cond: f64::INFINITY })?;
    (a - b * dinv * b.transpose()).try_inverse().ok_or(Error::SingularHessian { cond: f64::INFINITY })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DesignOutcome {
    Continuous,
    /// `p_control`: P(Y = 1) among controls; `ratio`: treated per control.
    Binary {
        p_control: f64,
        ratio: f64,
    },
    /// Noncensoring probabilities per arm; `ratio`: treated per control.
    Survival {
        p_control: f64,
        p_treated: f64,
        ratio: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub alpha: f64,
    pub power: f64,
    pub tau: f64,
    /// Prognostic correlation; used by the continuous formula only.
    #[serde(default)]
    pub rho: Option<f64>,
    pub outcome: DesignOutcome,
}

impl DesignSpec {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.power > 0.0 && self.power < 1.0) {
            return Err(Error::Domain(format!("power must lie in (0, 1), got {}", self.power)));
        }
        if self.tau == 0.0 || !self.tau.is_finite() {
            return Err(Error::Domain("tau must be finite and nonzero for sample size calculation".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSize {
    /// Unrounded formula value.
    pub exact: f64,
    pub per_arm: u64,
    pub total: u64,
}

impl SampleSize {
    fn from_exact(exact: f64) -> Self {
        let per_arm = exact.ceil() as u64;
        Self { exact, per_arm, total: 2 * per_arm }
    }
}

pub fn sample_size(spec: &DesignSpec) -> Result<SampleSize> {
    match spec.outcome {
        DesignOutcome::Continuous => sample_size_continuous(spec),
        DesignOutcome::Binary { .. } => sample_size_binary(spec),
        DesignOutcome::Survival { .. } => sample_size_survival(spec),
    }
}

/// N₁ = (SE(τ)(z_β − z_{1−α/2})/τ)² with SE per pair of subjects; the
/// adjusted SE is used when `rho` is given.
pub fn sample_size_continuous(spec: &DesignSpec) -> Result<SampleSize> {
    spec.validate()?;
    let tau = spec.tau;
    let se = match spec.rho {
        Some(rho) => se_adjusted(tau, crate::copula::lambda_from_rho(rho)?, 2.0),
        None => se_unadjusted(tau, 2.0),
    };
    let z_beta = normal::quantile(1.0 - spec.power);
    let z_alpha = normal::quantile(1.0 - spec.alpha / 2.0);
    Ok(SampleSize::from_exact((se * (z_beta - z_alpha) / tau).powi(2)))
}

/// Treated-arm success probability implied by odds ratio e^τ.
pub fn binary_treated_probability(p_control: f64, tau: f64) -> f64 {
    let e = tau.exp();
    p_control * e / (1.0 + p_control * (e - 1.0))
}

pub fn sample_size_binary(spec: &DesignSpec) -> Result<SampleSize> {
    spec.validate()?;
    let DesignOutcome::Binary { p_control: p2, ratio: r } = spec.outcome else {
        return Err(Error::InvalidInput("binary design required".into()));
    };
    if !(p2 > 0.0 && p2 < 1.0) {
        return Err(Error::Domain(format!("control proportion must lie in (0, 1), got {p2}")));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("allocation ratio must be positive, got {r}")));
    }
    let p1 = binary_treated_probability(p2, spec.tau);
    let z_half = normal::quantile(spec.alpha / 2.0);
    let z_beta = normal::quantile(1.0 - spec.power);
    let s = p1 + p2;
    let num = z_half * (s * (1.0 - s / (r + 1.0))).sqrt() + z_beta * (r * p1 * (1.0 - p1) + p2 * (1.0 - p2)).sqrt();
    Ok(SampleSize::from_exact(num * num / (r * (p1 - p2).powi(2))))
}

pub fn sample_size_survival(spec: &DesignSpec) -> Result<SampleSize> {
    spec.validate()?;
    let DesignOutcome::Survival { p_control: p0, p_treated: p1, ratio: r } = spec.outcome else {
        return Err(Error::InvalidInput("survival design required".into()));
    };
    for p in [p0, p1] {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Domain(format!("event probability must lie in (0, 1], got {p}")));
        }
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("allocation ratio must be positive, got {r}")));
    }
    let z = normal::quantile(1.0 - spec.alpha / 2.0) + normal::quantile(spec.power);
    let tau = spec.tau;
    Ok(SampleSize::from_exact((r + 1.0).powi(2) / r * z * z / (tau * tau * (p0 + r * p1))))
}
