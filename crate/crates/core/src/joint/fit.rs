use super::{JointModel, JointProblem, OutcomeSpec, Route};
use crate::basis::{boundary_steps, constrain, BasisSpec};
use crate::copula::{self, CopulaStructure};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::{restricted_covariance, FitResult, Method};
use crate::link::Link;
use crate::marginal::{assemble, check_column, effect_label, start_gamma, FitOptions, MarginalOutcomeModel, Univariate, UnivariateFit};
use crate::optim::{minimize, OptimResult};
use crate::terms::Prepared;

#[derive(Debug, Clone)]
pub struct NamiOptions {
    pub fit: FitOptions,
    pub route: Route,
    /// Keep the covariate marginals at their separate fits and estimate only
    /// the outcome marginal, τ and λ jointly.
    pub freeze_covariate_marginals: bool,
    /// Warn when N falls below this multiple of dim(Θ).
    pub min_n_per_parameter: f64,
}

impl Default for NamiOptions {
    fn default() -> Self {
        Self { fit: FitOptions::default(), route: Route::Auto, freeze_covariate_marginals: false, min_n_per_parameter: 10.0 }
    }
}

pub fn fit_nami(data: &Dataset, outcome: &OutcomeSpec, covariates: &[BasisSpec], opts: &NamiOptions) -> Result<FitResult> {
    fit_nami_model(data, outcome, covariates, opts).map(|(_, r)| r)
}

/// As [`fit_nami`], also returning the fitted model.
pub fn fit_nami_model(
    data: &Dataset,
    outcome: &OutcomeSpec,
    covariates: &[BasisSpec],
    opts: &NamiOptions,
) -> Result<(JointModel, FitResult)> {
    data.validate()?;
    if data.covariates.is_empty() {
        return Err(Error::InvalidInput("nami requires ≥1 covariate".into()));
    }
    if covariates.len() != data.covariates.len() {
        return Err(Error::DimensionMismatch { expected: data.covariates.len(), got: covariates.len() });
    }
    check_column(&data.outcome, &outcome.basis, Some(&data.treatment))?;
    for (b, c) in covariates.iter().zip(&data.covariates) {
        check_column(c, b, None)?;
    }
    let problem = JointProblem::new(data, outcome, covariates, opts.route)?;
    let layout = problem.layout().clone();
    let n = layout.len();

    // separate marginal fits as starting values
    let mut start = vec![0.0; n];
    let quiet = FitOptions { compute_covariance: false, ..opts.fit };
    for ((b, c), r) in covariates.iter().zip(&data.covariates).zip(&layout.covariates) {
        let prep = Prepared::new(b, c)?;
        let u = Univariate { link: Link::Probit, prep: &prep, design: vec![vec![]; data.len()] };
        let fit = u.fit(&start_gamma(Link::Probit, b, c)?, &quiet);
        start[r.clone()].copy_from_slice(&fit.opt.x);
    }
    {
        let prep = Prepared::new(&outcome.basis, &data.outcome)?;
        let design = data.treatment.iter().map(|&w| vec![f64::from(w)]).collect();
        let u = Univariate { link: outcome.link, prep: &prep, design };
        let mut s = start_gamma(outcome.link, &outcome.basis, &data.outcome)?;
        s.push(0.0);
        let fit = u.fit(&s, &quiet);
        start[layout.outcome.clone()].copy_from_slice(&fit.opt.x[..outcome.basis.dim()]);
        start[layout.tau] = fit.opt.x[outcome.basis.dim()];
    }

    // λ alone with the marginals held at their separate fits
    let lambda_idx: Vec<usize> = layout.lambda.clone().collect();
    let stage1 = optimize_subset(&problem, &start, &lambda_idx, &opts.fit);
    for (k, &i) in lambda_idx.iter().enumerate() {
        start[i] = stage1.x[k];
    }

    let free: Vec<usize> = if opts.freeze_covariate_marginals { (layout.outcome.start..n).collect() } else { (0..n).collect() };
    let stage2 = optimize_subset(&problem, &start, &free, &opts.fit);
    let mut gamma = start.clone();
    for (k, &i) in free.iter().enumerate() {
        gamma[i] = stage2.x[k];
    }

    let cov = opts.fit.compute_covariance.then(|| {
        let mut fixed = Vec::new();
        for (b, r) in covariates.iter().zip(&layout.covariates).chain([(&outcome.basis, &layout.outcome)]) {
            fixed.extend(boundary_steps(b, &gamma[r.clone()]).into_iter().map(|k| r.start + k));
        }
        let free: Vec<usize> = free.iter().copied().filter(|i| !fixed.contains(i)).collect();
        let mut c = restricted_covariance(|x: &[f64], g: &mut [f64]| problem.negloglik(x, g), &gamma, &free);
        // frozen covariate marginals are not reported as boundary coefficients
        c.held_fixed = fixed.len();
        c
    });

    let opt = OptimResult { x: gamma.clone(), ..stage2 };
    let fit = UnivariateFit { opt, cov };
    let names = layout.names(&data.covariates.iter().map(|c| c.name.clone()).collect::<Vec<_>>());
    let mut warnings = Vec::new();
    if problem.skipped_rows > 0 {
        warnings.push(format!("{} rows with outcome and all covariates missing were skipped", problem.skipped_rows));
    }
    let retained = data.missing_cells().saturating_sub(problem.skipped_rows * (data.covariates.len() + 1));
    if retained > 0 {
        warnings.push(format!("{retained} missing values retained by marginalization, no rows excluded for them"));
    }
    if problem.clamped > 0 {
        warnings.push(format!("{} values clamped to a Bernstein support", problem.clamped));
    }
    let n_used = problem.rows_used();
    if (n_used as f64) < opts.min_n_per_parameter * n as f64 {
        warnings.push(format!("N = {n_used} is small for {n} parameters"));
    }
    let mut blocks: Vec<(&BasisSpec, &[f64])> = covariates.iter().zip(&layout.covariates).map(|(b, r)| (b, &gamma[r.clone()])).collect();
    blocks.push((&outcome.basis, &gamma[layout.outcome.clone()]));
    let mut result = assemble(
        Method::Nami,
        effect_label(outcome.link, &outcome.basis).label().to_string(),
        &blocks,
        names,
        layout.tau,
        &fit,
        n_used,
        warnings,
        &opts.fit,
    )?;

    let covariate_marginals = covariates
        .iter()
        .zip(&layout.covariates)
        .map(|(b, r)| Ok((b.clone(), constrain(b, &gamma[r.clone()])?)))
        .collect::<Result<Vec<_>>>()?;
    let outcome_model = MarginalOutcomeModel {
        link: outcome.link,
        basis: outcome.basis.clone(),
        theta: constrain(&outcome.basis, &gamma[layout.outcome.clone()])?,
        tau: gamma[layout.tau],
    };
    let structure = CopulaStructure::new(covariates.len() + 1, gamma[layout.lambda.clone()].to_vec())?;
    result.lambda = structure.lambda().to_vec();
    result.r_squared = Some(copula::r_squared(&structure));
    result.prognostic_strengths = copula::prognostic_strengths(&structure);
    let model = JointModel::new(covariate_marginals, outcome_model, structure)?;
    Ok((model, result))
}

/// Minimizes −ℓ over the coordinates in `idx`, the rest held at `base`.
fn optimize_subset(problem: &JointProblem, base: &[f64], idx: &[usize], opts: &FitOptions) -> OptimResult {
    let mut full = base.to_vec();
    let mut gf = vec![0.0; base.len()];
    let x0: Vec<f64> = idx.iter().map(|&i| base[i]).collect();
    minimize(
        |x: &[f64], g: &mut [f64]| {
            for (k, &i) in idx.iter().enumerate() {
                full[i] = x[k];
            }
            let v = problem.negloglik(&full, &mut gf);
            for (k, &i) in idx.iter().enumerate() {
                g[k] = gf[i];
            }
            v
        },
        &x0,
        &opts.optim,
    )
}
