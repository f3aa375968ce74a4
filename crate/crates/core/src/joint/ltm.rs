use super::OutcomeSpec;
use crate::data::{Dataset, Observation};
use crate::error::{Error, Result};
use crate::inference::{FitResult, Method};
use crate::marginal::{assemble, check_column, effect_label, start_gamma, FitOptions, Univariate};
use crate::terms::Prepared;

pub fn fit_ltm(data: &Dataset, outcome: &OutcomeSpec) -> Result<FitResult> {
    fit_ltm_with(data, outcome, &FitOptions::default())
}

/// Conditional model G(h(y) − τ_x w − x̃ᵀβ) on complete cases. Continuous
/// covariates enter as observed; discrete ones as dummies against level 1.
pub fn fit_ltm_with(data: &Dataset, outcome: &OutcomeSpec, opts: &FitOptions) -> Result<FitResult> {
    data.validate()?;
    let mut names = Vec::new();
    for c in &data.covariates {
        match &c.levels {
            Some(labels) => names.extend(labels.iter().skip(1).map(|l| format!("beta_{}_{l}", c.name))),
            None => names.push(format!("beta_{}", c.name)),
        }
    }
    let complete: Vec<usize> = (0..data.len()).filter(|&i| data.covariates.iter().all(|c| c.values[i].is_exact())).collect();
    let dropped = data.len() - complete.len();
    let design: Vec<Vec<f64>> = complete
        .iter()
        .map(|&i| {
            let mut row = vec![f64::from(data.treatment[i])];
            for c in &data.covariates {
                let Observation::Exact(v) = c.values[i] else { unreachable!() };
                match &c.levels {
                    Some(labels) => row.extend((2..=labels.len()).map(|k| if v as usize == k { 1.0 } else { 0.0 })),
                    None => row.push(v),
                }
            }
            row
        })
        .collect();
    let sub = Dataset {
        treatment: complete.iter().map(|&i| data.treatment[i]).collect(),
        outcome: crate::data::Column { values: complete.iter().map(|&i| data.outcome.values[i]).collect(), ..data.outcome.clone() },
        covariates: vec![],
    };
    if sub.is_empty() {
        return Err(Error::EmptySet);
    }
    check_column(&sub.outcome, &outcome.basis, Some(&sub.treatment))?;
    let prep = Prepared::new(&outcome.basis, &sub.outcome)?;
    let problem = Univariate { link: outcome.link, prep: &prep, design };
    let mut start = start_gamma(outcome.link, &outcome.basis, &sub.outcome)?;
    start.resize(problem.dim(), 0.0);
    let fit = problem.fit(&start, opts);
    let d = outcome.basis.dim();
    let mut warnings = Vec::new();
    if dropped > 0 {
        warnings.push(format!("{dropped} rows with incomplete covariates dropped"));
    }
    if prep.clamped > 0 {
        warnings.push(format!("{} outcome values clamped to the Bernstein support", prep.clamped));
    }
    let n_used = prep.terms.iter().filter(|t| !matches!(t, crate::terms::Term::Missing)).count();
    let all_names = (1..=d).map(|m| format!("theta{m}")).chain(["tau".to_string()]).chain(names).collect();
    assemble(
        Method::Ltm,
        format!("conditional {}", effect_label(outcome.link, &outcome.basis).label()),
        &[(&outcome.basis, &fit.opt.x[..d])],
        all_names,
        d,
        &fit,
        n_used,
        warnings,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use crate::data::Column;
    use crate::link::Link;
    use crate::marginal::fit_marginal;
    use nalgebra::{DMatrix, DVector};

    fn toy() -> Dataset {
        let x = [-1.2, 0.4, 0.9, -0.3, 1.5, -0.8, 0.1, 2.0, -1.7, 0.6, 0.0, -0.5];
        let w = [0u8, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let noise = [0.3, -0.5, 0.1, 0.8, -0.2, -1.0, 0.4, 0.2, -0.6, 0.9, -0.1, 0.05];
        let y: Vec<f64> = (0..12).map(|i| 1.0 + 0.7 * f64::from(w[i]) + 1.3 * x[i] + noise[i]).collect();
        Dataset::new(w.to_vec(), Column::exact("y", &y), vec![Column::exact("x", &x)]).unwrap()
    }

    #[test]
    fn no_covariates_matches_marginal() {
        let data = toy().without_covariates();
        let spec = OutcomeSpec { link: Link::Logit, basis: BasisSpec::Linear };
        let a = fit_ltm(&data, &spec).unwrap();
        let (_, b) = fit_marginal(&data, Link::Logit, &BasisSpec::Linear).unwrap();
        assert!((a.tau_hat - b.tau_hat).abs() < 1e-8);
        assert!((a.loglik - b.loglik).abs() < 1e-8);
        assert!(a.effect.starts_with("conditional "));
    }

    #[test]
    fn probit_linear_matches_least_squares() {
        let data = toy();
        let spec = OutcomeSpec { link: Link::Probit, basis: BasisSpec::Linear };
        let fit = fit_ltm(&data, &spec).unwrap();
        let n = data.len();
        let y: Vec<f64> = data.outcome.finite_points();
        let xm = DMatrix::from_fn(n, 3, |i, j| match j {
            0 => 1.0,
            1 => f64::from(data.treatment[i]),
            _ => data.covariates[0].values[i].point().unwrap(),
        });
        let yv = DVector::from_vec(y);
        let b = (xm.transpose() * &xm).try_inverse().unwrap() * xm.transpose() * &yv;
        let rss = (&yv - &xm * &b).norm_squared();
        let sigma = (rss / n as f64).sqrt();
        // h(y) = (y − b0)/σ, so τ_x = b_w/σ and β = b_x/σ
        assert!((fit.tau_hat - b[1] / sigma).abs() < 1e-6, "{} vs {}", fit.tau_hat, b[1] / sigma);
        assert!((fit.theta_hat[3] - b[2] / sigma).abs() < 1e-6);
        assert!((fit.theta_hat[1] - 1.0 / sigma).abs() < 1e-6);
    }

    #[test]
    fn discrete_covariate_dummies() {
        let mut data = toy();
        let mut c = Column::discrete("g", &[1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3]);
        c.levels = Some(vec!["a".into(), "b".into(), "c".into()]);
        data.covariates.push(c);
        data.covariates[0].values[4] = Observation::Missing;
        let fit = fit_ltm(&data, &OutcomeSpec { link: Link::Probit, basis: BasisSpec::Linear }).unwrap();
        assert_eq!(fit.parameter_names[3..], ["beta_x", "beta_g_b", "beta_g_c"]);
        assert_eq!(fit.n_used, 11);
        assert_eq!(fit.warnings.len(), 1);
    }
}
