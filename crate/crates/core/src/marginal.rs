//! Marginal transformation models F_w(y) = G(h(y) − τw) and their maximum
//! likelihood fit. The same univariate machinery serves the covariate
//! marginals and the conditional comparator model.

use crate::basis::{chain_gradient, constrain, constrain_into, constrain_jacobian, dot, transformation, BasisSpec, MonotoneCoefficients};
use crate::data::{Column, Dataset, Observation};
use crate::error::{Error, Result};
use crate::inference::{restricted_covariance, to_rows, transform_covariance, Convergence, CovarianceEstimate, FitResult, Method};
use crate::link::Link;
use crate::normal;
use crate::optim::{minimize, OptimOptions, OptimResult};
use crate::terms::{Prepared, Term};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalOutcomeModel {
    pub link: Link,
    pub basis: BasisSpec,
    pub theta: MonotoneCoefficients,
    pub tau: f64,
}

impl MarginalOutcomeModel {
    pub fn new(link: Link, basis: BasisSpec, theta: Vec<f64>, tau: f64) -> Result<Self> {
        basis.validate()?;
        let theta = MonotoneCoefficients::from_theta(&basis, theta)?;
        Ok(Self { link, basis, theta, tau })
    }

    /// h(y) − τw, with ±∞ beyond the discrete range.
    pub fn shifted(&self, y: f64, w: u8) -> Result<f64> {
        Ok(transformation(&self.basis, &self.theta, y)? - self.tau * f64::from(w))
    }
}

pub fn marginal_cdf(m: &MarginalOutcomeModel, y: f64, w: u8) -> Result<f64> {
    Ok(m.link.cdf(m.shifted(y, w)?))
}

/// Φ⁻¹(G(h(y) − τw)); exactly h(y) − τw under the probit link.
pub fn latent_normal_score(m: &MarginalOutcomeModel, y: f64, w: u8) -> Result<f64> {
    Ok(m.link.to_normal(m.shifted(y, w)?))
}

/// P(Y₀ < Y₁) = Φ(τ/√2) for a probit shift τ.
pub fn probabilistic_index(tau: f64) -> f64 {
    normal::cdf(tau / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectKind {
    CohensD,
    ProbitShift,
    LogOddsRatio,
    ProportionalOdds,
    LogHazardRatio,
}

impl EffectKind {
    pub fn label(self) -> &'static str {
        match self {
            EffectKind::CohensD => "Cohen's d",
            EffectKind::ProbitShift => "probit-scale shift",
            EffectKind::LogOddsRatio => "log-odds ratio",
            EffectKind::ProportionalOdds => "log-odds ratio (proportional odds)",
            EffectKind::LogHazardRatio => "log-hazard ratio",
        }
    }
}

impl std::fmt::Display for EffectKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

pub fn effect_label(link: Link, basis: &BasisSpec) -> EffectKind {
    match (link, basis) {
        (Link::Probit, BasisSpec::Linear) => EffectKind::CohensD,
        (Link::Probit, _) => EffectKind::ProbitShift,
        (Link::Logit, BasisSpec::DiscreteStep { levels }) if *levels > 2 => EffectKind::ProportionalOdds,
        (Link::Logit, _) => EffectKind::LogOddsRatio,
        (Link::Cloglog, _) => EffectKind::LogHazardRatio,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub optim: OptimOptions,
    /// |τ̂| beyond this is reported as separation.
    pub separation_bound: f64,
    pub compute_covariance: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { optim: OptimOptions::default(), separation_bound: 20.0, compute_covariance: true }
    }
}

/// Kaplan–Meier estimate of F at each distinct event time. Events precede
/// censorings at tied times; interval observations enter at their midpoint.
pub fn kaplan_meier(values: &[Observation]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, bool)> = values
        .iter()
        .filter_map(|o| match *o {
            Observation::Exact(v) => Some((v, true)),
            Observation::RightCensored(v) => Some((v, false)),
            Observation::Interval(..) => o.point().map(|v| (v, true)),
            Observation::Missing => None,
        })
        .filter(|p| p.0.is_finite())
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut at_risk = pts.len() as f64;
    let mut surv = 1.0;
    let mut out = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        let t = pts[i].0;
        let (mut events, mut total) = (0.0, 0.0);
        while i < pts.len() && pts[i].0 == t {
            total += 1.0;
            if pts[i].1 {
                events += 1.0;
            }
            i += 1;
        }
        if events > 0.0 {
            surv *= 1.0 - events / at_risk;
            out.push((t, 1.0 - surv));
        }
        at_risk -= total;
    }
    out
}

/// Right-continuous step lookup into a Kaplan–Meier table.
pub(crate) fn step_lookup(table: &[(f64, f64)], y: f64) -> f64 {
    match table.partition_point(|p| p.0 <= y) {
        0 => 0.0,
        k => table[k - 1].1,
    }
}

/// Negative log-likelihood of G(h(y) − ηᵢ) with ηᵢ = dᵢᵀc, over γ-parameters.
pub(crate) struct Univariate<'a> {
    pub link: Link,
    pub prep: &'a Prepared,
    /// One row of linear-predictor covariates per observation.
    pub design: Vec<Vec<f64>>,
}

impl Univariate<'_> {
    pub fn dim(&self) -> usize {
        self.prep.dim() + self.design.first().map_or(0, |r| r.len())
    }

    pub fn negloglik(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.prep.dim();
        let (gamma, coef) = params.split_at(d);
        let mut theta = vec![0.0; d];
        constrain_into(&self.prep.basis, gamma, &mut theta);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let (gt, gc) = grad.split_at_mut(d);
        let link = self.link;
        let mut ll = 0.0;
        for (term, row) in self.prep.terms.iter().zip(&self.design) {
            let eta = dot(row, coef);
            let geta = match term {
                Term::Exact { a, da } => {
                    let hp = dot(da, &theta);
                    if !(hp > 0.0) {
                        return f64::INFINITY;
                    }
                    let u = dot(a, &theta) - eta;
                    ll += link.log_density(u) + hp.ln();
                    let s = link.score(u);
                    for m in 0..d {
                        gt[m] += s * a[m] + da[m] / hp;
                    }
                    -s
                }
                Term::Bounds { lo, hi } => {
                    let (hl, hu) = term.bounds(&theta);
                    let (lo_u, hi_u) = (hl - eta, hu - eta);
                    let lp = link.log_interval(lo_u, hi_u);
                    ll += lp;
                    let p_lo = if lo_u.is_finite() { (link.log_density(lo_u) - lp).exp() } else { 0.0 };
                    let p_hi = if hi_u.is_finite() { (link.log_density(hi_u) - lp).exp() } else { 0.0 };
                    if let Some(a) = lo {
                        for m in 0..d {
                            gt[m] -= p_lo * a[m];
                        }
                    }
                    if let Some(a) = hi {
                        for m in 0..d {
                            gt[m] += p_hi * a[m];
                        }
                    }
                    p_lo - p_hi
                }
                Term::Missing => continue,
            };
            for (g, x) in gc.iter_mut().zip(row) {
                *g += geta * x;
            }
        }
        chain_gradient(&self.prep.basis, gamma, gt);
        grad.iter_mut().for_each(|g| *g = -*g);
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    }

    pub fn fit(&self, start: &[f64], opts: &FitOptions) -> UnivariateFit {
        let opt = minimize(|p: &[f64], g: &mut [f64]| self.negloglik(p, g), start, &opts.optim);
        let cov = opts.compute_covariance.then(|| {
            let fixed = crate::basis::boundary_steps(&self.prep.basis, &opt.x[..self.prep.dim()]);
            let free: Vec<usize> = (0..opt.x.len()).filter(|i| !fixed.contains(i)).collect();
            restricted_covariance(|p: &[f64], g: &mut [f64]| self.negloglik(p, g), &opt.x, &free)
        });
        UnivariateFit { opt, cov }
    }
}

pub(crate) struct UnivariateFit {
    pub opt: OptimResult,
    pub cov: Option<CovarianceEstimate>,
}

/// Checks that a column carries enough information to fit its marginal.
pub(crate) fn check_column(column: &Column, basis: &BasisSpec, treatment: Option<&[u8]>) -> Result<()> {
    if let BasisSpec::DiscreteStep { levels } = *basis {
        let mut seen = vec![0usize; levels];
        for o in &column.values {
            if let Observation::Exact(v) = o {
                if v.fract() == 0.0 && *v >= 1.0 && *v <= levels as f64 {
                    seen[*v as usize - 1] += 1;
                }
            }
        }
        if let Some(k) = seen.iter().position(|&c| c == 0) {
            return Err(Error::Degenerate(format!("column {}: level {} never observed", column.name, k + 1)));
        }
        return Ok(());
    }
    let pts = column.finite_points();
    let first = pts.first().copied().unwrap_or(f64::NAN);
    if pts.len() < 2 || pts.iter().all(|&v| v == first) {
        return Err(Error::Degenerate(format!("column {}: no variation in observed values", column.name)));
    }
    if let Some(w) = treatment {
        for arm in [0u8, 1] {
            let n = column.values.iter().zip(w).filter(|(o, &wi)| wi == arm && !o.is_missing()).count();
            if n < 2 {
                return Err(Error::Degenerate(format!("column {}: fewer than two observations in arm {arm}", column.name)));
            }
        }
    }
    Ok(())
}

fn make_increasing(theta: &mut [f64], gap: f64) {
    for m in 1..theta.len() {
        if !(theta[m] >= theta[m - 1] + gap) {
            theta[m] = theta[m - 1] + gap;
        }
    }
}

/// Starting coefficients γ from arm-pooled moments or the link-transformed ECDF.
pub(crate) fn start_gamma(link: Link, basis: &BasisSpec, column: &Column) -> Result<Vec<f64>> {
    let n = column.values.iter().filter(|o| !o.is_missing()).count().max(1) as f64;
    let clip = |p: f64| p.clamp(0.5 / n, 1.0 - 0.5 / n);
    let theta = match basis {
        BasisSpec::DiscreteStep { levels } => {
            let mut counts = vec![0.0; *levels];
            for o in &column.values {
                if let Observation::Exact(v) = o {
                    counts[*v as usize - 1] += 1.0;
                }
            }
            let total: f64 = counts.iter().sum();
            let mut cum = 0.0;
            let mut theta: Vec<f64> = counts[..levels - 1]
                .iter()
                .map(|c| {
                    cum += c;
                    link.quantile(clip(cum / total))
                })
                .collect();
            make_increasing(&mut theta, 1e-2);
            theta
        }
        BasisSpec::Linear | BasisSpec::LogLinear => {
            let all_exact = column.values.iter().all(|o| o.is_exact() || o.is_missing());
            let tx = |v: f64| if matches!(basis, BasisSpec::LogLinear) { v.ln() } else { v };
            let pts: Vec<f64> =
                column.finite_points().into_iter().filter(|&v| v > 0.0 || matches!(basis, BasisSpec::Linear)).map(tx).collect();
            let mean = pts.iter().sum::<f64>() / pts.len() as f64;
            let sd = (pts.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / pts.len() as f64).sqrt();
            if !(sd > 0.0) {
                return Err(Error::Degenerate(format!("column {}: zero variance", column.name)));
            }
            if link == Link::Probit && all_exact {
                vec![-mean / sd, 1.0 / sd]
            } else {
                let km = kaplan_meier(&column.values);
                let (mut sx, mut sy, mut sxx, mut sxy, mut k) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for &(t, f) in &km {
                    if matches!(basis, BasisSpec::LogLinear) && t <= 0.0 {
                        continue;
                    }
                    let (x, y) = (tx(t), link.quantile(clip(f * n / (n + 1.0))));
                    sx += x;
                    sy += y;
                    sxx += x * x;
                    sxy += x * y;
                    k += 1.0;
                }
                let var = sxx / k - (sx / k).powi(2);
                let slope = if var > 0.0 { (sxy / k - sx / k * sy / k) / var } else { f64::NAN };
                if slope > 0.0 && slope.is_finite() {
                    vec![sy / k - slope * sx / k, slope]
                } else {
                    vec![-mean / sd, 1.0 / sd]
                }
            }
        }
        BasisSpec::Bernstein { order, lo, hi } | BasisSpec::LogBernstein { order, lo, hi } => {
            let km = kaplan_meier(&column.values);
            let log = matches!(basis, BasisSpec::LogBernstein { .. });
            let mut theta: Vec<f64> = (0..=*order)
                .map(|m| {
                    let node = lo + (hi - lo) * m as f64 / *order as f64;
                    let y = if log { node.exp() } else { node };
                    link.quantile(clip(step_lookup(&km, y) * n / (n + 1.0)))
                })
                .collect();
            let span = (theta[*order] - theta[0]).abs().max(1.0);
            make_increasing(&mut theta, span / (10.0 * *order as f64));
            theta
        }
    };
    crate::basis::unconstrain(basis, &theta)
}

fn parameter_names(prefix: &str, basis: &BasisSpec) -> Vec<String> {
    (1..=basis.dim()).map(|m| format!("{prefix}theta{m}")).collect()
}

/// Block-diagonal dϑ/dγ with identity for the trailing linear coefficients.
pub(crate) fn reporting_jacobian(blocks: &[(&BasisSpec, &[f64])], extra: usize) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|(b, _)| b.dim()).sum::<usize>() + extra;
    let mut jac = DMatrix::zeros(n, n);
    let mut off = 0;
    for (basis, gamma) in blocks {
        let j = constrain_jacobian(basis, gamma);
        for (r, row) in j.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                jac[(off + r, off + c)] = *v;
            }
        }
        off += basis.dim();
    }
    for i in off..n {
        jac[(i, i)] = 1.0;
    }
    jac
}

pub fn fit_marginal(data: &Dataset, link: Link, basis: &BasisSpec) -> Result<(MarginalOutcomeModel, FitResult)> {
    fit_marginal_with(data, link, basis, &FitOptions::default())
}

pub fn fit_marginal_with(data: &Dataset, link: Link, basis: &BasisSpec, opts: &FitOptions) -> Result<(MarginalOutcomeModel, FitResult)> {
    data.validate()?;
    check_column(&data.outcome, basis, Some(&data.treatment))?;
    let prep = Prepared::new(basis, &data.outcome)?;
    let design: Vec<Vec<f64>> = data.treatment.iter().map(|&w| vec![f64::from(w)]).collect();
    let problem = Univariate { link, prep: &prep, design };
    let mut start = start_gamma(link, basis, &data.outcome)?;
    start.push(0.0);
    let fit = problem.fit(&start, opts);
    let d = basis.dim();
    let mut warnings = Vec::new();
    if prep.clamped > 0 {
        warnings.push(format!("{} outcome values clamped to the Bernstein support", prep.clamped));
    }
    let n_used = prep.terms.iter().filter(|t| !matches!(t, Term::Missing)).count();
    let result = assemble(
        Method::Mi,
        effect_label(link, basis).label().to_string(),
        &[(basis, &fit.opt.x[..d])],
        parameter_names("", basis).into_iter().chain(["tau".to_string()]).collect(),
        d,
        &fit,
        n_used,
        warnings,
        opts,
    )?;
    let theta = constrain(basis, &fit.opt.x[..d])?;
    let model = MarginalOutcomeModel { link, basis: basis.clone(), theta, tau: fit.opt.x[d] };
    Ok((model, result))
}

/// Turns an unconstrained univariate fit into a reported `FitResult`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    method: Method,
    effect: String,
    blocks: &[(&BasisSpec, &[f64])],
    names: Vec<String>,
    tau_index: usize,
    fit: &UnivariateFit,
    n_used: usize,
    mut warnings: Vec<String>,
    opts: &FitOptions,
) -> Result<FitResult> {
    let opt = &fit.opt;
    if !opt.converged {
        return Err(Error::NonConvergence { iterations: opt.iterations, grad_norm: opt.grad_norm });
    }
    let tau = opt.x[tau_index];
    if tau.abs() > opts.separation_bound {
        return Err(Error::Separation { tau, bound: opts.separation_bound });
    }
    let extra = opt.x.len() - blocks.iter().map(|(b, _)| b.dim()).sum::<usize>();
    let jac = reporting_jacobian(blocks, extra);
    let mut theta_hat = opt.x.clone();
    let mut off = 0;
    for (basis, gamma) in blocks {
        let mut th = vec![0.0; basis.dim()];
        constrain_into(basis, gamma, &mut th);
        theta_hat[off..off + basis.dim()].copy_from_slice(&th);
        off += basis.dim();
    }
    let mut convergence = Convergence {
        iterations: opt.iterations,
        grad_norm: opt.grad_norm,
        converged: true,
        condition_number: f64::NAN,
        pseudo_inverse: false,
    };
    let (covariance, se_tau) = match &fit.cov {
        Some(c) => {
            convergence.condition_number = c.condition_number;
            convergence.pseudo_inverse = c.pseudo_inverse;
            if c.held_fixed > 0 {
                warnings.push(format!(
                    "{} transformation coefficients at the monotonicity boundary held fixed for the covariance",
                    c.held_fixed
                ));
            }
            if c.pseudo_inverse {
                warnings.push(format!("ill-conditioned information (condition number {:.2e}); pseudo-inverse used", c.condition_number));
            }
            match &c.covariance {
                Some(cov) => {
                    let se = cov[(tau_index, tau_index)].max(0.0).sqrt();
                    let reported = transform_covariance(cov, &jac);
                    (Some(to_rows(&reported)), Some(se).filter(|s| *s > 0.0))
                }
                None => {
                    warnings.push(format!("singular information (condition number {:.2e}); no covariance", c.condition_number));
                    (None, None)
                }
            }
        }
        None => (None, None),
    };
    Ok(FitResult {
        method,
        effect,
        parameter_names: names,
        theta_hat,
        covariance,
        loglik: -opt.value,
        tau_hat: tau,
        se_tau,
        lambda: vec![],
        r_squared: None,
        prognostic_strengths: vec![],
        n_used,
        convergence,
        warnings,
    })
}
