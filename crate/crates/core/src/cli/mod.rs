//! Command-line front end: fitting on CSV data, simulation campaigns,
//! analytic design calculations and link diagnostics.
//!
//! Every command writes one JSON report carrying the schema version, the
//! library version and the fully resolved configuration.

use crate::analytic::{self, DesignOutcome, DesignSpec};
use crate::basis::{BasisSpec, DEFAULT_BERNSTEIN_ORDER};
use crate::copula::{lambda_from_rho, rho_from_lambda};
use crate::data::{read_csv, ColumnMap, Dataset};
use crate::error::{Error, Result};
use crate::inference::{FitResult, Method};
use crate::joint::{diagnostics_link_ecdf, fit_ltm_with, fit_nami, LinkEcdfPoint, NamiOptions, OutcomeSpec};
use crate::link::Link;
use crate::marginal::{fit_marginal_with, probabilistic_index, FitOptions};
use crate::sim::{simulate, summarize_pvalues, MethodSummary, PValueSummary, ScenarioConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nami", version, about = "Covariate-adjusted marginal treatment effects for two-arm trials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit MI, NAMI or LTM to a CSV file.
    Fit(FitArgs),
    /// Run a replicated simulation scenario from a TOML file.
    Simulate(SimulateArgs),
    /// Sample size per arm for a Wald test of the marginal effect.
    Samplesize(SampleSizeArgs),
    /// Standard errors of Cohen's d with and without adjustment.
    Se(SeArgs),
    /// Per-arm ECDFs on the scale of the inverse link.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKindArg {
    Continuous,
    Binary,
    Ordinal,
    Survival,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LinkArg {
    Probit,
    Logit,
    Cloglog,
}

impl From<LinkArg> for Link {
    fn from(l: LinkArg) -> Link {
        match l {
            LinkArg::Probit => Link::Probit,
            LinkArg::Logit => Link::Logit,
            LinkArg::Cloglog => Link::Cloglog,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mi,
    Nami,
    Ltm,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Mi => Method::Mi,
            MethodArg::Nami => Method::Nami,
            MethodArg::Ltm => Method::Ltm,
        }
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV with a header row; empty cells are missing.
    #[arg(long)]
    pub data: PathBuf,
    /// 0/1 treatment column.
    #[arg(long)]
    pub treatment: String,
    #[arg(long)]
    pub outcome: String,
    #[arg(long, value_enum, default_value = "continuous")]
    pub kind: OutcomeKindArg,
    /// Event indicator column of a survival outcome (1 = event, 0 = censored).
    /// Defaults to `<outcome>_status` when present.
    #[arg(long)]
    pub status: Option<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "nami")]
    pub method: MethodArg,
    /// Covariate as NAME, NAME:linear, NAME:loglinear, NAME:bernstein[:ORDER]
    /// or NAME:logbernstein[:ORDER]; the default is bernstein of order 6.
    #[arg(long = "covariate")]
    pub covariates: Vec<String>,
    /// Overrides the link implied by --kind.
    #[arg(long, value_enum)]
    pub link: Option<LinkArg>,
    /// Overrides the outcome basis implied by --kind: linear, loglinear,
    /// bernstein[:ORDER], logbernstein[:ORDER] or discrete.
    #[arg(long)]
    pub basis: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// NAMI only: keep the covariate marginals at their separate fits.
    #[arg(long)]
    pub freeze_covariate_marginals: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed of the scenario file. Without either, a seed is
    /// drawn from entropy and printed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Summary JSON (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Per-replication CSV.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignKindArg {
    Continuous,
    Binary,
    Survival,
}

#[derive(Debug, Args)]
pub struct SampleSizeArgs {
    #[arg(long, value_enum)]
    pub kind: DesignKindArg,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.8)]
    pub power: f64,
    /// Prognostic correlation (continuous outcomes).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Binary: P(Y = 1) in the control arm. Survival: noncensoring probability.
    #[arg(long)]
    pub p_control: Option<f64>,
    /// Survival: noncensoring probability in the treated arm (default: as control).
    #[arg(long)]
    pub p_treated: Option<f64>,
    /// Treated per control.
    #[arg(long, default_value_t = 1.0)]
    pub ratio: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long)]
    pub n: f64,
    /// Correlation between the outcome and its prognostic covariate.
    #[arg(long, conflicts_with = "lambda")]
    pub rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "probit")]
    pub link: LinkArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    nami_version: &'a str,
    command: &'a str,
    config: C,
    result: R,
}

fn emit<C: Serialize, R: Serialize>(command: &str, config: C, result: R, output: Option<&Path>) -> Result<()> {
    let report = Report { schema_version: SCHEMA_VERSION, nami_version: VERSION, command, config, result };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USER } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USER
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Samplesize(a) => cmd_samplesize(&a),
        Command::Se(a) => cmd_se(&a),
        Command::Diagnose(a) => cmd_diagnose(&a),
    }
}

/// A basis description; Bernstein supports are fitted to the data later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "basis", rename_all = "lowercase")]
enum BasisChoice {
    Linear,
    Loglinear,
    Bernstein { order: usize },
    Logbernstein { order: usize },
    Discrete,
}

fn parse_basis(s: &str) -> Result<BasisChoice> {
    let mut parts = s.split(':');
    let head = parts.next().unwrap_or("").trim().to_ascii_lowercase();
    let rest: Vec<&str> = parts.collect();
    let bad = || Error::InvalidInput(format!("unknown basis {s:?}"));
    let choice = match (head.as_str(), rest.as_slice()) {
        ("linear", []) => BasisChoice::Linear,
        ("loglinear", []) => BasisChoice::Loglinear,
        ("discrete", []) => BasisChoice::Discrete,
        ("bernstein", []) => BasisChoice::Bernstein { order: DEFAULT_BERNSTEIN_ORDER },
        ("bernstein", [o]) => BasisChoice::Bernstein { order: o.trim().parse().map_err(|_| bad())? },
        ("logbernstein", []) => BasisChoice::Logbernstein { order: DEFAULT_BERNSTEIN_ORDER },
        ("logbernstein", [o]) => BasisChoice::Logbernstein { order: o.trim().parse().map_err(|_| bad())? },
        _ => return Err(bad()),
    };
    Ok(choice)
}

fn resolve_basis(choice: BasisChoice, column: &crate::data::Column) -> Result<BasisSpec> {
    match choice {
        BasisChoice::Linear => Ok(BasisSpec::Linear),
        BasisChoice::Loglinear => Ok(BasisSpec::LogLinear),
        BasisChoice::Bernstein { order } => BasisSpec::bernstein_for(order, &column.finite_points()),
        BasisChoice::Logbernstein { order } => BasisSpec::log_bernstein_for(order, &column.finite_points()),
        BasisChoice::Discrete => match column.level_count() {
            Some(levels) => Ok(BasisSpec::DiscreteStep { levels }),
            None => Err(Error::InvalidInput(format!("column {} is not discrete", column.name))),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
struct CovariateConfig {
    name: String,
    #[serde(flatten)]
    basis: BasisChoice,
}

fn parse_covariate(s: &str) -> Result<CovariateConfig> {
    let (name, basis) = match s.split_once(':') {
        Some((n, b)) => (n.trim(), parse_basis(b)?),
        None => (s.trim(), BasisChoice::Bernstein { order: DEFAULT_BERNSTEIN_ORDER }),
    };
    if name.is_empty() {
        return Err(Error::InvalidInput(format!("empty covariate name in {s:?}")));
    }
    if basis == BasisChoice::Discrete {
        return Err(Error::InvalidInput("discrete covariates are not supported from CSV input".into()));
    }
    Ok(CovariateConfig { name: name.to_string(), basis })
}

fn default_model(kind: OutcomeKindArg) -> (Link, BasisChoice) {
    match kind {
        OutcomeKindArg::Continuous => (Link::Probit, BasisChoice::Linear),
        OutcomeKindArg::Binary | OutcomeKindArg::Ordinal => (Link::Logit, BasisChoice::Discrete),
        OutcomeKindArg::Survival => (Link::Cloglog, BasisChoice::Logbernstein { order: DEFAULT_BERNSTEIN_ORDER }),
    }
}

fn load(args: &DataArgs, covariates: &[CovariateConfig]) -> Result<Dataset> {
    let discrete = matches!(args.kind, OutcomeKindArg::Binary | OutcomeKindArg::Ordinal);
    if discrete && args.status.is_some() {
        return Err(Error::InvalidInput("a censoring status column requires --kind survival".into()));
    }
    let map = ColumnMap {
        treatment: args.treatment.clone(),
        outcome: args.outcome.clone(),
        covariates: covariates.iter().map(|c| c.name.clone()).collect(),
        discrete_outcome: discrete,
        outcome_status: args.status.clone(),
    };
    let file = std::fs::File::open(&args.data).map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", args.data.display())))?;
    let data = read_csv(std::io::BufReader::new(file), &map)?;
    if discrete && data.outcome.level_count() != Some(2) && args.kind == OutcomeKindArg::Binary {
        return Err(Error::InvalidInput(format!("binary outcome {} must have exactly two levels", args.outcome)));
    }
    Ok(data)
}

#[derive(Serialize)]
struct FitConfig<'a> {
    data: String,
    treatment: &'a str,
    outcome: &'a str,
    kind: OutcomeKindArg,
    status: Option<&'a str>,
    method: Method,
    link: Link,
    outcome_basis: BasisSpec,
    covariates: Vec<(CovariateConfig, BasisSpec)>,
    alpha: f64,
    freeze_covariate_marginals: bool,
}

#[derive(Serialize)]
struct FitReport {
    method: Method,
    effect: String,
    tau_hat: f64,
    se: Option<f64>,
    level: f64,
    ci: Option<[f64; 2]>,
    p_value: Option<f64>,
    r_squared: Option<f64>,
    prognostic_strengths: Option<Vec<f64>>,
    lambda: Option<Vec<f64>>,
    probabilistic_index: Option<f64>,
    probabilistic_index_ci: Option<[f64; 2]>,
    loglik: f64,
    n_used: usize,
    parameter_names: Vec<String>,
    theta_hat: Vec<f64>,
    convergence: crate::inference::Convergence,
    warnings: Vec<String>,
}

fn fit_report(r: FitResult, link: Link, alpha: f64) -> FitReport {
    let wald = r.wald(1.0 - alpha);
    let marginal = r.method != Method::Ltm;
    let nami = r.method == Method::Nami;
    let pi = (link == Link::Probit && marginal).then(|| probabilistic_index(r.tau_hat));
    FitReport {
        method: r.method,
        effect: r.effect,
        tau_hat: r.tau_hat,
        se: r.se_tau,
        level: 1.0 - alpha,
        ci: wald.map(|w| [w.lower, w.upper]),
        p_value: wald.map(|w| w.p_value),
        r_squared: if nami { r.r_squared } else { None },
        prognostic_strengths: nami.then_some(r.prognostic_strengths),
        lambda: nami.then_some(r.lambda),
        probabilistic_index: pi,
        probabilistic_index_ci: pi.and(wald).map(|w| [probabilistic_index(w.lower), probabilistic_index(w.upper)]),
        loglik: r.loglik,
        n_used: r.n_used,
        parameter_names: r.parameter_names,
        theta_hat: r.theta_hat,
        convergence: r.convergence,
        warnings: r.warnings,
    }
}

pub fn cmd_fit(a: &FitArgs) -> Result<i32> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {}", a.alpha)));
    }
    let method = Method::from(a.method);
    let covariates = a.covariates.iter().map(|s| parse_covariate(s)).collect::<Result<Vec<_>>>()?;
    if method == Method::Nami && covariates.is_empty() {
        return Err(Error::InvalidInput("nami requires ≥1 covariate".into()));
    }
    let (default_link, default_basis) = default_model(a.data.kind);
    let link = a.link.map(Link::from).unwrap_or(default_link);
    let basis_choice = a.basis.as_deref().map(parse_basis).transpose()?.unwrap_or(default_basis);

    let data = load(&a.data, &covariates)?;
    let outcome = OutcomeSpec { link, basis: resolve_basis(basis_choice, &data.outcome)? };
    let bases = covariates.iter().zip(&data.covariates).map(|(c, col)| resolve_basis(c.basis, col)).collect::<Result<Vec<_>>>()?;

    let fit_opts = FitOptions::default();
    let result = match method {
        Method::Mi => fit_marginal_with(&data.without_covariates(), link, &outcome.basis, &fit_opts)?.1,
        Method::Ltm => fit_ltm_with(&data, &outcome, &fit_opts)?,
        Method::Nami => {
            let opts = NamiOptions { fit: fit_opts, freeze_covariate_marginals: a.freeze_covariate_marginals, ..Default::default() };
            fit_nami(&data, &outcome, &bases, &opts)?
        }
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let config = FitConfig {
        data: a.data.data.display().to_string(),
        treatment: &a.data.treatment,
        outcome: &a.data.outcome,
        kind: a.data.kind,
        status: a.data.status.as_deref(),
        method,
        link,
        outcome_basis: outcome.basis.clone(),
        covariates: covariates.into_iter().zip(bases).collect(),
        alpha: a.alpha,
        freeze_covariate_marginals: a.freeze_covariate_marginals,
    };
    emit("fit", config, fit_report(result, link, a.alpha), a.output.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SimulationReport {
    warnings: Vec<String>,
    summaries: Vec<MethodSummary>,
    p_values: Vec<PValueSummary>,
    failures_exceeded: bool,
}

/// Reads a scenario file, applying command-line overrides and filling in
/// a seed when none is given.
pub fn resolve_scenario(path: &Path, seed: Option<u64>, replications: Option<usize>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let seed = match (seed, table.get("seed")) {
        (Some(s), _) => Some(s),
        (None, Some(_)) => None,
        (None, None) => {
            let s = rand::random::<u64>() >> 1;
            eprintln!("seed: {s}");
            Some(s)
        }
    };
    if let Some(s) = seed {
        let v = i64::try_from(s).map_err(|_| Error::InvalidInput("seed must be below 2^63".into()))?;
        table.insert("seed".into(), toml::Value::Integer(v));
    }
    if let Some(r) = replications {
        table.insert("replications".into(), toml::Value::Integer(r as i64));
    }
    let config: ScenarioConfig = table.try_into().map_err(|e: toml::de::Error| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<i32> {
    let config = resolve_scenario(&a.config, a.seed, a.replications)?;
    let threads = a.threads.unwrap_or(0);
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let result = pool.install(|| simulate(&config))?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &a.records {
        result.write_records_csv(std::fs::File::create(p)?)?;
    }
    let check = result.check_failures();
    let report = SimulationReport {
        warnings: result.warnings.clone(),
        summaries: result.summaries.clone(),
        p_values: config.methods.iter().map(|&m| summarize_pvalues(&result, m)).collect(),
        failures_exceeded: check.is_err(),
    };
    emit("simulate", &config, report, a.output.as_deref())?;
    match check {
        Ok(()) => Ok(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_NUMERICAL)
        }
    }
}

pub fn cmd_samplesize(a: &SampleSizeArgs) -> Result<i32> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required for this outcome kind")));
    let outcome = match a.kind {
        DesignKindArg::Continuous => DesignOutcome::Continuous,
        DesignKindArg::Binary => DesignOutcome::Binary { p_control: need(a.p_control, "p-control")?, ratio: a.ratio },
        DesignKindArg::Survival => {
            let p = need(a.p_control, "p-control")?;
            DesignOutcome::Survival { p_control: p, p_treated: a.p_treated.unwrap_or(p), ratio: a.ratio }
        }
    };
    let spec = DesignSpec { alpha: a.alpha, power: a.power, tau: a.tau, rho: a.rho, outcome };
    let size = analytic::sample_size(&spec)?;
    emit("samplesize", spec, size, a.output.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SeConfig {
    tau: f64,
    n: f64,
    rho: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Serialize)]
struct SeReport {
    se_unadjusted: f64,
    se_adjusted: Option<f64>,
    /// Squared ratio of the two, the relative sample size needed after adjustment.
    sample_size_fraction: Option<f64>,
}

pub fn cmd_se(a: &SeArgs) -> Result<i32> {
    if !(a.n > 0.0 && a.n.is_finite()) || !a.tau.is_finite() {
        return Err(Error::InvalidInput("tau must be finite and n positive".into()));
    }
    let lambda = match (a.rho, a.lambda) {
        (Some(r), _) => Some(lambda_from_rho(r)?),
        (None, l) => l,
    };
    if lambda.is_some_and(|l| !l.is_finite()) {
        return Err(Error::InvalidInput("lambda must be finite".into()));
    }
    let unadjusted = analytic::se_unadjusted(a.tau, a.n);
    let adjusted = lambda.map(|l| analytic::se_adjusted(a.tau, l, a.n));
    let config = SeConfig { tau: a.tau, n: a.n, rho: a.rho.or(lambda.map(|l| rho_from_lambda(l).abs())), lambda };
    let report =
        SeReport { se_unadjusted: unadjusted, se_adjusted: adjusted, sample_size_fraction: adjusted.map(|s| (s / unadjusted).powi(2)) };
    emit("se", config, report, a.output.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DiagnoseConfig<'a> {
    data: String,
    treatment: &'a str,
    outcome: &'a str,
    kind: OutcomeKindArg,
    status: Option<&'a str>,
    link: Link,
}

pub fn cmd_diagnose(a: &DiagnoseArgs) -> Result<i32> {
    let data = load(&a.data, &[])?;
    let link = Link::from(a.link);
    let points: Vec<LinkEcdfPoint> = diagnostics_link_ecdf(&data, link)?;
    let config = DiagnoseConfig {
        data: a.data.data.display().to_string(),
        treatment: &a.data.treatment,
        outcome: &a.data.outcome,
        kind: a.data.kind,
        status: a.data.status.as_deref(),
        link,
    };
    emit("diagnose", config, points, a.output.as_deref())?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_syntax() {
        assert_eq!(parse_basis("linear").unwrap(), BasisChoice::Linear);
        assert_eq!(parse_basis("Bernstein:4").unwrap(), BasisChoice::Bernstein { order: 4 });
        assert_eq!(parse_basis("bernstein").unwrap(), BasisChoice::Bernstein { order: DEFAULT_BERNSTEIN_ORDER });
        assert_eq!(parse_basis("logbernstein:3").unwrap(), BasisChoice::Logbernstein { order: 3 });
        assert!(parse_basis("spline").is_err());
        assert!(parse_basis("bernstein:x").is_err());
        let c = parse_covariate("age:loglinear").unwrap();
        assert_eq!((c.name.as_str(), c.basis), ("age", BasisChoice::Loglinear));
        assert_eq!(parse_covariate("age").unwrap().basis, BasisChoice::Bernstein { order: DEFAULT_BERNSTEIN_ORDER });
        assert!(parse_covariate("sex:discrete").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
