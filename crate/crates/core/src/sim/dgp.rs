use crate::copula::lambda_from_rho;
use crate::data::{Column, Dataset, Observation};
use crate::error::{Error, Result};
use crate::link::Link;
use crate::normal;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKind {
    Continuous,
    Binary,
    Survival,
}

fn default_noise_df() -> f64 {
    5.0
}

fn default_noise_corr() -> f64 {
    0.5
}

/// Balanced two-arm trial with one prognostic covariate X₁ ~ χ²₅ and P − 1
/// noise covariates. Outcome and X₁ are linked by a Gaussian copula with
/// latent correlation `rho`; the outcome marginal is Φ(y − τw),
/// logit⁻¹(−τw) for level 1 of a binary outcome, or cloglog⁻¹(log y − τw).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub outcome: OutcomeKind,
    pub tau: f64,
    pub rho: f64,
    /// Number of covariates P.
    pub p: usize,
    /// Total sample size.
    pub n: usize,
    /// Noncensoring probability logit⁻¹(γ) for survival outcomes.
    #[serde(default)]
    pub noncensoring: Option<f64>,
    #[serde(default = "default_noise_df")]
    pub noise_df: f64,
    /// Pairwise latent correlation among noise covariates.
    #[serde(default = "default_noise_corr")]
    pub noise_corr: f64,
}

impl DgpSpec {
    pub fn new(outcome: OutcomeKind, tau: f64, rho: f64, p: usize, n: usize) -> Self {
        Self { outcome, tau, rho, p, n, noncensoring: None, noise_df: default_noise_df(), noise_corr: default_noise_corr() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || self.n % 2 != 0 {
            return Err(Error::InvalidInput(format!("n must be even and at least 4, got {}", self.n)));
        }
        if self.p < 1 {
            return Err(Error::InvalidInput("at least one covariate required".into()));
        }
        lambda_from_rho(self.rho.abs())?;
        if let Some(p) = self.noncensoring {
            if self.outcome != OutcomeKind::Survival {
                return Err(Error::InvalidInput("censoring applies to survival outcomes only".into()));
            }
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!("noncensoring probability must lie in (0, 1), got {p}")));
            }
        }
        if !(self.noise_df > 0.0) || !(0.0..1.0).contains(&self.noise_corr) {
            return Err(Error::Domain("noise covariates need df > 0 and correlation in [0, 1)".into()));
        }
        Ok(())
    }
}

fn treatment(n: usize) -> Vec<u8> {
    (0..n).map(|i| u8::from(i >= n / 2)).collect()
}

fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn binary_column(level_one: Vec<bool>) -> Column {
    let mut c = Column::discrete("y", &level_one.iter().map(|&b| if b { 1 } else { 2 }).collect::<Vec<_>>());
    c.levels = Some(vec!["0".into(), "1".into()]);
    c
}

/// Equicorrelated t noise covariates through a Gaussian copula.
fn noise_columns<R: Rng + ?Sized>(spec: &DgpSpec, rng: &mut R) -> Result<Vec<Column>> {
    let k = spec.p - 1;
    if k == 0 {
        return Ok(vec![]);
    }
    let t = StudentsT::new(0.0, 1.0, spec.noise_df).map_err(|e| Error::Domain(e.to_string()))?;
    let c = spec.noise_corr;
    let mut cols = vec![Vec::with_capacity(spec.n); k];
    for _ in 0..spec.n {
        let shared = std_normal(rng);
        for col in cols.iter_mut() {
            let z = c.sqrt() * shared + (1.0 - c).sqrt() * std_normal(rng);
            col.push(t.inverse_cdf(normal::cdf(z)));
        }
    }
    Ok(cols.into_iter().enumerate().map(|(j, v)| Column::exact(format!("x{}", j + 2), &v)).collect())
}

pub fn sample_dataset<R: Rng + ?Sized>(spec: &DgpSpec, rng: &mut R) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n;
    let w = treatment(n);
    let chi = ChiSquared::new(5.0).map_err(|e| Error::Domain(e.to_string()))?;
    let rho = spec.rho;
    let resid = (1.0 - rho * rho).sqrt();
    let mut x1 = Vec::with_capacity(n);
    let mut outcome = Vec::with_capacity(n);
    let mut level_one = Vec::with_capacity(n);
    for &wi in &w {
        let tw = spec.tau * f64::from(wi);
        let z1 = std_normal(rng);
        let zy = rho * z1 + resid * std_normal(rng);
        x1.push(chi.inverse_cdf(normal::cdf(z1)));
        match spec.outcome {
            OutcomeKind::Continuous => outcome.push(Observation::Exact(zy + tw)),
            OutcomeKind::Binary => level_one.push(normal::cdf(zy) <= Link::Logit.cdf(-tw)),
            OutcomeKind::Survival => {
                let log_y = Link::Cloglog.to_latent(zy) + tw;
                let obs = match spec.noncensoring {
                    None => Observation::Exact(log_y.exp()),
                    Some(p) => {
                        let gamma = (p / (1.0 - p)).ln();
                        let zc = rho * z1 + resid * std_normal(rng);
                        let log_c = Link::Cloglog.to_latent(zc) + gamma + tw;
                        if log_y <= log_c {
                            Observation::Exact(log_y.exp())
                        } else {
                            Observation::RightCensored(log_c.exp())
                        }
                    }
                };
                outcome.push(obs);
            }
        }
    }
    let y = match spec.outcome {
        OutcomeKind::Binary => binary_column(level_one),
        _ => Column::new("y", outcome),
    };
    let mut covariates = vec![Column::exact("x1", &x1)];
    covariates.extend(noise_columns(spec, rng)?);
    Dataset::new(w, y, covariates)
}

/// Γ(η, η) frailty X₁ with conditionally Weibull survival
/// P(Y ≤ y | w, x₁) = cloglog⁻¹(1 + 4 log y + τ_x w + log x₁), uncensored.
pub fn sample_m1_frailty<R: Rng + ?Sized>(tau_x: f64, eta: f64, n: usize, rng: &mut R) -> Result<Dataset> {
    let gamma = Gamma::new(eta, 1.0 / eta).map_err(|e| Error::Domain(format!("frailty shape: {e}")))?;
    let (t1, t2) = (1.0, 4.0);
    let w = treatment(n);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for &wi in &w {
        let xi: f64 = gamma.sample(rng).max(f64::MIN_POSITIVE);
        let u: f64 = rng.random();
        let latent = Link::Cloglog.quantile(u.max(f64::MIN_POSITIVE));
        y.push(((latent - t1 - tau_x * f64::from(wi) - xi.ln()) / t2).exp());
        x.push(xi);
    }
    Dataset::new(w, Column::exact("y", &y), vec![Column::exact("x1", &x)])
}

/// Binary outcome with a quadratic prognostic effect:
/// P(Y = level 1 | w, x₁) = logit⁻¹(−τ_x w − x₁²), X₁ ~ N(0, 1).
pub fn sample_m2_quadratic<R: Rng + ?Sized>(tau_x: f64, n: usize, rng: &mut R) -> Result<Dataset> {
    let w = treatment(n);
    let mut x = Vec::with_capacity(n);
    let mut level_one = Vec::with_capacity(n);
    for &wi in &w {
        let xi = std_normal(rng);
        let u: f64 = rng.random();
        level_one.push(u < Link::Logit.cdf(-tau_x * f64::from(wi) - xi * xi));
        x.push(xi);
    }
    Dataset::new(w, binary_column(level_one), vec![Column::exact("x1", &x)])
}
