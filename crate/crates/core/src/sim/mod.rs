//! Simulation harness: data-generating processes, replicated fits of the
//! three estimators and operating-characteristic summaries.

mod dgp;
pub mod stats;

pub use dgp::{sample_dataset, sample_m1_frailty, sample_m2_quadratic, DgpSpec, OutcomeKind};

use crate::basis::BasisSpec;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::{FitResult, Method};
use crate::joint::{fit_ltm_with, fit_nami, NamiOptions, OutcomeSpec};
use crate::link::Link;
use crate::marginal::{fit_marginal_with, FitOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stats::KsResult;
use std::io::Write;

fn default_eta() -> f64 {
    1.0
}

fn default_m1_n() -> usize {
    262
}

fn default_m2_n() -> usize {
    322
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Dgp {
    Copula(DgpSpec),
    /// Γ-frailty survival; see [`sample_m1_frailty`].
    M1 {
        tau_x: f64,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_m1_n")]
        n: usize,
    },
    /// Quadratic prognostic effect on a binary outcome; see [`sample_m2_quadratic`].
    M2 {
        tau_x: f64,
        #[serde(default = "default_m2_n")]
        n: usize,
    },
}

impl Dgp {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Dataset> {
        match self {
            Dgp::Copula(spec) => sample_dataset(spec, rng),
            Dgp::M1 { tau_x, eta, n } => sample_m1_frailty(*tau_x, *eta, *n, rng),
            Dgp::M2 { tau_x, n } => sample_m2_quadratic(*tau_x, *n, rng),
        }
    }

    pub fn outcome_kind(&self) -> OutcomeKind {
        match self {
            Dgp::Copula(s) => s.outcome,
            Dgp::M1 { .. } => OutcomeKind::Survival,
            Dgp::M2 { .. } => OutcomeKind::Binary,
        }
    }

    fn n(&self) -> usize {
        match self {
            Dgp::Copula(s) => s.n,
            Dgp::M1 { n, .. } | Dgp::M2 { n, .. } => *n,
        }
    }

    fn covariate_count(&self) -> usize {
        match self {
            Dgp::Copula(s) => s.p,
            _ => 1,
        }
    }
}

/// Baseline transformation of the proportional hazards model for survival outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalBasis {
    /// Bernstein polynomial in log time; contains the Weibull baseline.
    #[default]
    LogBernstein,
    /// Bernstein polynomial in time.
    Bernstein,
    /// Weibull: ϑ₁ + ϑ₂ log y.
    LogLinear,
}

/// Outcome model shared by all methods: normal linear, logistic, and
/// proportional hazards with the configured baseline, whose Bernstein support
/// spans the observed times.
pub fn outcome_spec(kind: OutcomeKind, data: &Dataset, basis: SurvivalBasis, order: usize) -> Result<OutcomeSpec> {
    Ok(match kind {
        OutcomeKind::Continuous => OutcomeSpec { link: Link::Probit, basis: BasisSpec::Linear },
        OutcomeKind::Binary => OutcomeSpec { link: Link::Logit, basis: BasisSpec::DiscreteStep { levels: 2 } },
        OutcomeKind::Survival => {
            let times = data.outcome.finite_points();
            let basis = match basis {
                SurvivalBasis::LogBernstein => BasisSpec::log_bernstein_for(order, &times)?,
                SurvivalBasis::Bernstein => BasisSpec::bernstein_for(order, &times)?,
                SurvivalBasis::LogLinear => BasisSpec::LogLinear,
            };
            OutcomeSpec { link: Link::Cloglog, basis }
        }
    })
}

fn default_replications() -> usize {
    1000
}

fn default_methods() -> Vec<Method> {
    vec![Method::Mi, Method::Nami, Method::Ltm]
}

fn default_alpha() -> f64 {
    0.05
}

fn default_order() -> usize {
    crate::basis::DEFAULT_BERNSTEIN_ORDER
}

fn default_max_iter() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub dgp: Dgp,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Bernstein order of the covariate marginals.
    #[serde(default = "default_order")]
    pub covariate_order: usize,
    #[serde(default)]
    pub survival_basis: SurvivalBasis,
    /// Bernstein order of the survival baseline.
    #[serde(default = "default_order")]
    pub survival_order: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl ScenarioConfig {
    pub fn new(dgp: Dgp, replications: usize, seed: u64) -> Self {
        Self {
            dgp,
            replications,
            seed,
            methods: default_methods(),
            alpha: default_alpha(),
            covariate_order: default_order(),
            survival_basis: SurvivalBasis::default(),
            survival_order: default_order(),
            max_iter: default_max_iter(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidInput("replications must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("no methods requested".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if let Dgp::Copula(s) = &self.dgp {
            s.validate()?;
        }
        if self.covariate_order < 1 || self.survival_order < 1 {
            return Err(Error::InvalidInput("Bernstein orders must be at least 1".into()));
        }
        Ok(())
    }

    /// dim(Θ) of the NAMI model for this scenario.
    pub fn nami_dim(&self) -> usize {
        let p = self.dgp.covariate_count();
        let out = match (self.dgp.outcome_kind(), self.survival_basis) {
            (OutcomeKind::Survival, SurvivalBasis::LogBernstein | SurvivalBasis::Bernstein) => self.survival_order + 1,
            _ => 2,
        };
        p * (self.covariate_order + 1) + out + 1 + p * (p + 1) / 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub method: Method,
    pub tau_hat: Option<f64>,
    pub se: Option<f64>,
    pub p_value: Option<f64>,
    /// λ between the outcome and X₁ (NAMI only).
    pub lambda1: Option<f64>,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub successes: usize,
    pub failures: usize,
    pub mean_estimate: f64,
    pub empirical_sd: f64,
    pub mean_se: f64,
    pub rejection_rate: f64,
    /// Monte Carlo standard error of the rejection rate.
    pub rejection_mcse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub records: Vec<ReplicationRecord>,
    pub summaries: Vec<MethodSummary>,
    pub warnings: Vec<String>,
}

/// Fraction of failed replications above which a scenario is reported as failed.
pub const MAX_FAILURE_RATE: f64 = 0.05;

impl ScenarioResult {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// Successful estimates of one method in replication order.
    pub fn estimates(&self, method: Method) -> Vec<f64> {
        self.records.iter().filter(|r| r.method == method).filter_map(|r| r.tau_hat).collect()
    }

    pub fn p_values(&self, method: Method) -> Vec<f64> {
        self.records.iter().filter(|r| r.method == method).filter_map(|r| r.p_value).collect()
    }

    /// Errors when any method failed in more than 5% of the replications.
    pub fn check_failures(&self) -> Result<()> {
        for s in &self.summaries {
            let total = s.successes + s.failures;
            if s.failures as f64 > MAX_FAILURE_RATE * total as f64 {
                return Err(Error::ScenarioFailed { failed: s.failures, total });
            }
        }
        Ok(())
    }

    /// Per-replication records as CSV.
    pub fn write_records_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["replication", "method", "tau_hat", "se", "p_value", "lambda1", "converged", "error"])?;
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            wtr.write_record([
                r.replication.to_string(),
                r.method.name().to_string(),
                num(r.tau_hat),
                num(r.se),
                num(r.p_value),
                num(r.lambda1),
                r.converged.to_string(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Random stream of one replication: the scenario seed selects the key and
/// the replication index the stream, so results do not depend on scheduling.
pub fn replication_rng(seed: u64, replication: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication as u64);
    rng
}

fn fit_one(config: &ScenarioConfig, data: &Dataset, method: Method) -> Result<FitResult> {
    let outcome = outcome_spec(config.dgp.outcome_kind(), data, config.survival_basis, config.survival_order)?;
    let mut fit_opts = FitOptions::default();
    fit_opts.optim.max_iter = config.max_iter;
    match method {
        Method::Mi => fit_marginal_with(data, outcome.link, &outcome.basis, &fit_opts).map(|(_, r)| r),
        Method::Ltm => fit_ltm_with(data, &outcome, &fit_opts),
        Method::Nami => {
            let bases = data
                .covariates
                .iter()
                .map(|c| BasisSpec::bernstein_for(config.covariate_order, &c.finite_points()))
                .collect::<Result<Vec<_>>>()?;
            let opts = NamiOptions { fit: fit_opts, min_n_per_parameter: 0.0, ..Default::default() };
            fit_nami(data, &outcome, &bases, &opts)
        }
    }
}

fn replicate(config: &ScenarioConfig, replication: usize) -> Vec<ReplicationRecord> {
    let mut rng = replication_rng(config.seed, replication);
    let data = config.dgp.sample(&mut rng);
    config
        .methods
        .iter()
        .map(|&method| {
            let fit = data.as_ref().map_err(|e| Error::InvalidInput(e.to_string())).and_then(|d| fit_one(config, d, method));
            match fit {
                Ok(f) => ReplicationRecord {
                    replication,
                    method,
                    tau_hat: Some(f.tau_hat),
                    se: f.se_tau,
                    p_value: f.p_value(),
                    lambda1: (method == Method::Nami).then(|| f.lambda[crate::copula::packed_index(config.dgp.covariate_count(), 0)]),
                    converged: f.convergence.converged,
                    error: None,
                },
                Err(e) => ReplicationRecord {
                    replication,
                    method,
                    tau_hat: None,
                    se: None,
                    p_value: None,
                    lambda1: None,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn summarize(method: Method, records: &[ReplicationRecord], alpha: f64) -> MethodSummary {
    let mine: Vec<&ReplicationRecord> = records.iter().filter(|r| r.method == method).collect();
    let ok: Vec<&&ReplicationRecord> = mine.iter().filter(|r| r.tau_hat.is_some() && r.p_value.is_some()).collect();
    let est: Vec<f64> = ok.iter().filter_map(|r| r.tau_hat).collect();
    let se: Vec<f64> = ok.iter().filter_map(|r| r.se).collect();
    let n = ok.len() as f64;
    let rejection_rate = ok.iter().filter(|r| r.p_value.unwrap() < alpha).count() as f64 / n;
    MethodSummary {
        method,
        successes: ok.len(),
        failures: mine.len() - ok.len(),
        mean_estimate: stats::mean(&est),
        empirical_sd: stats::sd(&est),
        mean_se: stats::mean(&se),
        rejection_rate,
        rejection_mcse: (rejection_rate * (1.0 - rejection_rate) / n).sqrt(),
    }
}

/// Runs all replications without judging the failure rate.
pub fn simulate(config: &ScenarioConfig) -> Result<ScenarioResult> {
    config.validate()?;
    let mut warnings = Vec::new();
    let n = config.dgp.n();
    let dim = config.nami_dim();
    if config.methods.contains(&Method::Nami) && n < 2 * dim {
        warnings.push(format!("NAMI has {dim} parameters for N = {n}; Wald tests are expected to be liberal at this sample size"));
    }
    let records: Vec<ReplicationRecord> = (0..config.replications).into_par_iter().flat_map_iter(|r| replicate(config, r)).collect();
    let summaries = config.methods.iter().map(|&m| summarize(m, &records, config.alpha)).collect();
    Ok(ScenarioResult { config: config.clone(), records, summaries, warnings })
}

/// Runs a scenario and fails when more than 5% of the replications of any
/// method did not produce an estimate.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    let result = simulate(config)?;
    result.check_failures()?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueSummary {
    pub method: Method,
    pub count: usize,
    /// Counts over ten equal-width bins of [0, 1].
    pub histogram: Vec<usize>,
    /// Two-sided test of uniformity.
    pub uniform: KsResult,
    /// One-sided test against p-values stochastically larger than uniform.
    pub conservative: KsResult,
}

pub fn summarize_pvalues(result: &ScenarioResult, method: Method) -> PValueSummary {
    let p = result.p_values(method);
    let mut histogram = vec![0; 10];
    for &v in &p {
        histogram[((v * 10.0) as usize).min(9)] += 1;
    }
    PValueSummary {
        method,
        count: p.len(),
        histogram,
        uniform: stats::ks_one_sample(&p, |x| x.clamp(0.0, 1.0)),
        conservative: stats::ks_stochastically_larger(&p, |x| x.clamp(0.0, 1.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: OutcomeKind, seed: u64) -> ScenarioConfig {
        let mut spec = DgpSpec::new(kind, 0.5, 0.6, 1, 82);
        if kind == OutcomeKind::Survival {
            spec.noncensoring = Some(0.7);
        }
        ScenarioConfig::new(Dgp::Copula(spec), 6, seed)
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let cfg = small(OutcomeKind::Continuous, 42);
        let a = run_scenario(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_scenario(&cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 18);
        let mut ca = Vec::new();
        a.write_records_csv(&mut ca).unwrap();
        let mut cb = Vec::new();
        b.write_records_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
    }

    #[test]
    fn every_outcome_kind_runs() {
        for kind in [OutcomeKind::Binary, OutcomeKind::Survival] {
            let r = run_scenario(&small(kind, 7)).unwrap();
            for s in &r.summaries {
                assert_eq!(s.failures, 0, "{kind:?} {:?}", r.records.iter().find(|x| x.error.is_some()));
                assert!((0.0..=1.0).contains(&s.rejection_rate));
            }
        }
        for dgp in [Dgp::M1 { tau_x: 0.0, eta: 1.0, n: 100 }, Dgp::M2 { tau_x: 0.0, n: 100 }] {
            let r = run_scenario(&ScenarioConfig::new(dgp, 4, 3)).unwrap();
            assert!(r.records.iter().any(|x| x.lambda1.is_some()));
        }
    }

    #[test]
    fn liberality_warning() {
        let cfg = ScenarioConfig::new(Dgp::Copula(DgpSpec::new(OutcomeKind::Continuous, 0.0, 0.0, 15, 82)), 1, 1);
        let r = simulate(&ScenarioConfig { methods: vec![Method::Mi], ..cfg.clone() }).unwrap();
        assert!(r.warnings.is_empty());
        let r = simulate(&cfg).unwrap();
        assert!(r.warnings[0].contains("liberal"), "{:?}", r.warnings);
        assert_eq!(cfg.nami_dim(), 15 * 7 + 2 + 1 + 120);
        let small = ScenarioConfig::new(Dgp::Copula(DgpSpec::new(OutcomeKind::Continuous, 0.0, 0.0, 1, 82)), 1, 1);
        assert!(simulate(&small).unwrap().warnings.is_empty());
    }

    #[test]
    fn config_from_toml() {
        let text = r#"
            seed = 9
            replications = 20
            methods = ["mi", "nami"]
            [dgp]
            kind = "copula"
            outcome = "survival"
            tau = 0.5
            rho = 0.9
            p = 1
            n = 262
            noncensoring = 0.3
        "#;
        let cfg: ScenarioConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.methods, vec![Method::Mi, Method::Nami]);
        assert_eq!(cfg.alpha, 0.05);
        let Dgp::Copula(spec) = &cfg.dgp else { panic!() };
        assert_eq!(spec.noise_df, 5.0);
        let m1: ScenarioConfig = toml::from_str("seed = 1\n[dgp]\nkind = \"m1\"\ntau_x = 0.5\n").unwrap();
        assert_eq!(m1.dgp, Dgp::M1 { tau_x: 0.5, eta: 1.0, n: 262 });
    }
}
