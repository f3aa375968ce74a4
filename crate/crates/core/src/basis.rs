//! Monotone transformation bases a(y) and the cumulative-exponential
//! parameterization of their coefficients.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisSpec {
    Linear,
    LogLinear,
    Bernstein {
        order: usize,
        lo: f64,
        hi: f64,
    },
    /// Bernstein polynomial in log y; `lo` and `hi` bound log y.
    LogBernstein {
        order: usize,
        lo: f64,
        hi: f64,
    },
    DiscreteStep {
        levels: usize,
    },
}

pub const DEFAULT_BERNSTEIN_ORDER: usize = 6;

/// Basis values at a point, with a flag set when a Bernstein argument was clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValue {
    pub values: Vec<f64>,
    pub clamped: bool,
}

impl BasisSpec {
    pub fn bernstein(order: usize, lo: f64, hi: f64) -> Result<Self> {
        let spec = BasisSpec::Bernstein { order, lo, hi };
        spec.validate()?;
        Ok(spec)
    }

    /// Bernstein basis on the data range widened by 5% on each side.
    pub fn bernstein_for(order: usize, data: &[f64]) -> Result<Self> {
        let finite = data.iter().copied().filter(|v| v.is_finite());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        if !(lo < hi) {
            return Err(Error::Degenerate("Bernstein support needs at least two distinct values".into()));
        }
        let pad = 0.05 * (hi - lo);
        Self::bernstein(order, lo - pad, hi + pad)
    }

    pub fn log_bernstein(order: usize, lo: f64, hi: f64) -> Result<Self> {
        let spec = BasisSpec::LogBernstein { order, lo, hi };
        spec.validate()?;
        Ok(spec)
    }

    /// Log-scale Bernstein basis on the range of log y over the positive
    /// data, widened by 5% on each side.
    pub fn log_bernstein_for(order: usize, data: &[f64]) -> Result<Self> {
        let logs: Vec<f64> = data.iter().filter(|&&v| v > 0.0).map(|v| v.ln()).collect();
        match Self::bernstein_for(order, &logs)? {
            BasisSpec::Bernstein { order, lo, hi } => Self::log_bernstein(order, lo, hi),
            _ => unreachable!(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BasisSpec::Bernstein { order, lo, hi } | BasisSpec::LogBernstein { order, lo, hi } => {
                if order < 1 {
                    return Err(Error::InvalidInput("Bernstein order must be at least 1".into()));
                }
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidInput(format!("invalid Bernstein support [{lo}, {hi}]")));
                }
            }
            BasisSpec::DiscreteStep { levels } if levels < 2 => {
                return Err(Error::InvalidInput("a discrete basis needs at least two levels".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match *self {
            BasisSpec::Linear | BasisSpec::LogLinear => 2,
            BasisSpec::Bernstein { order, .. } | BasisSpec::LogBernstein { order, .. } => order + 1,
            BasisSpec::DiscreteStep { levels } => levels - 1,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, BasisSpec::DiscreteStep { .. })
    }

    /// a(y). Discrete levels are 1-based; the top level yields the zero vector
    /// because its transformation is +∞ and is handled by the likelihood.
    pub fn evaluate(&self, y: f64) -> Result<BasisValue> {
        match *self {
            BasisSpec::Linear => Ok(BasisValue { values: vec![1.0, y], clamped: false }),
            BasisSpec::LogLinear => {
                if !(y > 0.0) {
                    return Err(Error::Domain(format!("log-linear basis needs y > 0, got {y}")));
                }
                Ok(BasisValue { values: vec![1.0, y.ln()], clamped: false })
            }
            BasisSpec::Bernstein { order, lo, hi } => {
                if y.is_nan() {
                    return Err(Error::Domain("NaN argument".into()));
                }
                let (t, clamped) = unit_scale(y, lo, hi);
                Ok(BasisValue { values: bernstein_values(order, t), clamped })
            }
            BasisSpec::LogBernstein { order, lo, hi } => {
                if !(y > 0.0) {
                    return Err(Error::Domain(format!("log-Bernstein basis needs y > 0, got {y}")));
                }
                let (t, clamped) = unit_scale(y.ln(), lo, hi);
                Ok(BasisValue { values: bernstein_values(order, t), clamped })
            }
            BasisSpec::DiscreteStep { levels } => {
                let k = level_index(y, levels)?;
                let mut values = vec![0.0; levels - 1];
                if k < levels {
                    values[k - 1] = 1.0;
                }
                Ok(BasisValue { values, clamped: false })
            }
        }
    }

    /// a′(y) for continuous bases.
    pub fn derivative(&self, y: f64) -> Result<Vec<f64>> {
        match *self {
            BasisSpec::Linear => Ok(vec![0.0, 1.0]),
            BasisSpec::LogLinear => {
                if !(y > 0.0) {
                    return Err(Error::Domain(format!("log-linear basis needs y > 0, got {y}")));
                }
                Ok(vec![0.0, 1.0 / y])
            }
            BasisSpec::Bernstein { order, lo, hi } | BasisSpec::LogBernstein { order, lo, hi } => {
                let log = matches!(self, BasisSpec::LogBernstein { .. });
                if log && !(y > 0.0) {
                    return Err(Error::Domain(format!("log-Bernstein basis needs y > 0, got {y}")));
                }
                let (t, _) = unit_scale(if log { y.ln() } else { y }, lo, hi);
                let lower = bernstein_values(order - 1, t);
                let scale = order as f64 / (hi - lo) / if log { y } else { 1.0 };
                let mut d = vec![0.0; order + 1];
                for (m, v) in lower.iter().enumerate() {
                    d[m] -= scale * v;
                    d[m + 1] += scale * v;
                }
                Ok(d)
            }
            BasisSpec::DiscreteStep { .. } => Err(Error::Unsupported("derivative of a discrete transformation".into())),
        }
    }

    /// Lower and upper latent bounds (h(y_{k−1}), h(y_k)] for discrete level k.
    pub fn discrete_bounds(&self, theta: &[f64], y: f64) -> Result<(f64, f64)> {
        match *self {
            BasisSpec::DiscreteStep { levels } => {
                check_dim(self, theta)?;
                let k = level_index(y, levels)?;
                let lo = if k == 1 { f64::NEG_INFINITY } else { theta[k - 2] };
                let hi = if k == levels { f64::INFINITY } else { theta[k - 1] };
                Ok((lo, hi))
            }
            _ => Err(Error::Unsupported("discrete bounds on a continuous basis".into())),
        }
    }
}

fn check_dim(spec: &BasisSpec, v: &[f64]) -> Result<()> {
    if v.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: v.len() });
    }
    Ok(())
}

fn level_index(y: f64, levels: usize) -> Result<usize> {
    if y.fract() != 0.0 || y < 1.0 || y > levels as f64 {
        return Err(Error::Domain(format!("level {y} outside 1..={levels}")));
    }
    Ok(y as usize)
}

fn unit_scale(y: f64, lo: f64, hi: f64) -> (f64, bool) {
    let t = (y - lo) / (hi - lo);
    if t < 0.0 {
        (0.0, true)
    } else if t > 1.0 {
        (1.0, true)
    } else {
        (t, false)
    }
}

/// Bernstein polynomials b_{m,M}(t), m = 0..=M.
fn bernstein_values(order: usize, t: f64) -> Vec<f64> {
    // de Casteljau style recursion, stable on [0, 1]
    let mut b = vec![0.0; order + 1];
    b[0] = 1.0;
    let s = 1.0 - t;
    for n in 1..=order {
        for m in (0..=n).rev() {
            let left = if m > 0 { b[m - 1] * t } else { 0.0 };
            let right = if m < n { b[m] * s } else { 0.0 };
            b[m] = left + right;
        }
    }
    b
}

pub fn evaluate_basis(spec: &BasisSpec, y: f64) -> Result<BasisValue> {
    spec.evaluate(y)
}

/// h(y) = a(y)ᵀϑ; +∞ at the top discrete level.
pub fn transformation(spec: &BasisSpec, theta: &MonotoneCoefficients, y: f64) -> Result<f64> {
    check_dim(spec, &theta.theta)?;
    if let BasisSpec::DiscreteStep { levels } = *spec {
        if level_index(y, levels)? == levels {
            return Ok(f64::INFINITY);
        }
    }
    Ok(dot(&spec.evaluate(y)?.values, &theta.theta))
}

pub fn transformation_derivative(spec: &BasisSpec, theta: &MonotoneCoefficients, y: f64) -> Result<f64> {
    check_dim(spec, &theta.theta)?;
    Ok(dot(&spec.derivative(y)?, &theta.theta))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coefficients ϑ together with the unconstrained γ that generates them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCoefficients {
    pub gamma: Vec<f64>,
    pub theta: Vec<f64>,
}

impl MonotoneCoefficients {
    pub fn from_theta(spec: &BasisSpec, theta: Vec<f64>) -> Result<Self> {
        let gamma = unconstrain(spec, &theta)?;
        Ok(Self { gamma, theta })
    }
}

pub(crate) fn is_cumulative(spec: &BasisSpec) -> bool {
    matches!(spec, BasisSpec::Bernstein { .. } | BasisSpec::LogBernstein { .. } | BasisSpec::DiscreteStep { .. })
}

/// Smallest increment ϑ_m − ϑ_{m−1}, relative to the total span, that is
/// treated as interior rather than at the monotonicity boundary.
pub const BOUNDARY_STEP: f64 = 1e-6;

/// Indices m of increments that have collapsed onto the boundary ϑ_m = ϑ_{m−1}.
/// The log-likelihood is flat in γ_m there, so these coordinates carry no
/// curvature and are treated as active constraints.
pub(crate) fn boundary_steps(spec: &BasisSpec, gamma: &[f64]) -> Vec<usize> {
    if !is_cumulative(spec) || gamma.len() < 2 {
        return vec![];
    }
    let steps: Vec<f64> = gamma[1..].iter().map(|g| g.exp()).collect();
    let span: f64 = steps.iter().sum();
    steps.iter().enumerate().filter(|(_, &s)| s <= BOUNDARY_STEP * span).map(|(k, _)| k + 1).collect()
}

pub fn constrain(spec: &BasisSpec, gamma: &[f64]) -> Result<MonotoneCoefficients> {
    check_dim(spec, gamma)?;
    let mut theta = vec![0.0; gamma.len()];
    constrain_into(spec, gamma, &mut theta);
    Ok(MonotoneCoefficients { gamma: gamma.to_vec(), theta })
}

pub(crate) fn constrain_into(spec: &BasisSpec, gamma: &[f64], theta: &mut [f64]) {
    theta[0] = gamma[0];
    if is_cumulative(spec) {
        for m in 1..gamma.len() {
            theta[m] = theta[m - 1] + gamma[m].exp();
        }
    } else {
        theta[1] = gamma[1].exp();
    }
}

pub fn unconstrain(spec: &BasisSpec, theta: &[f64]) -> Result<Vec<f64>> {
    check_dim(spec, theta)?;
    let mut gamma = vec![0.0; theta.len()];
    gamma[0] = theta[0];
    for m in 1..theta.len() {
        let step = if is_cumulative(spec) { theta[m] - theta[m - 1] } else { theta[m] };
        if !(step > 0.0) {
            return Err(Error::Domain("coefficients are not strictly increasing".into()));
        }
        gamma[m] = step.ln();
    }
    Ok(gamma)
}

/// Maps a gradient with respect to ϑ into one with respect to γ, in place.
pub(crate) fn chain_gradient(spec: &BasisSpec, gamma: &[f64], grad: &mut [f64]) {
    if is_cumulative(spec) {
        let mut tail = 0.0;
        for m in (0..grad.len()).rev() {
            tail += grad[m];
            grad[m] = if m == 0 { tail } else { tail * gamma[m].exp() };
        }
    } else {
        grad[1] *= gamma[1].exp();
    }
}

/// dϑ/dγ as a dense matrix (row = ϑ index).
pub(crate) fn constrain_jacobian(spec: &BasisSpec, gamma: &[f64]) -> Vec<Vec<f64>> {
    let d = gamma.len();
    let mut jac = vec![vec![0.0; d]; d];
    for (m, row) in jac.iter_mut().enumerate() {
        row[0] = 1.0;
        if is_cumulative(spec) {
            for (i, g) in gamma.iter().enumerate().take(m + 1).skip(1) {
                row[i] = g.exp();
            }
        } else if m == 1 {
            row[0] = 0.0;
            row[1] = gamma[1].exp();
        }
    }
    jac
}
