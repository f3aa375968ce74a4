//! Marginal log-odds ratio of a binary outcome when some covariate values
//! are missing; those rows stay in the likelihood through marginalization.

use nami::basis::BasisSpec;
use nami::data::Observation;
use nami::joint::{fit_nami, NamiOptions, OutcomeSpec};
use nami::marginal::fit_marginal;
use nami::sim::{sample_dataset, DgpSpec, OutcomeKind};
use nami::Link;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut data = sample_dataset(&DgpSpec::new(OutcomeKind::Binary, 0.5, 0.6, 1, 322), &mut rng)?;
    for v in data.covariates[0].values.iter_mut() {
        if rng.random::<f64>() < 0.15 {
            *v = Observation::Missing;
        }
    }
    let outcome = OutcomeSpec { link: Link::Logit, basis: BasisSpec::DiscreteStep { levels: 2 } };
    let covariate = BasisSpec::bernstein_for(6, &data.covariates[0].finite_points())?;

    let (_, mi) = fit_marginal(&data.without_covariates(), outcome.link, &outcome.basis)?;
    let nami = fit_nami(&data, &outcome, &[covariate], &NamiOptions::default())?;
    for r in [&mi, &nami] {
        let (lo, hi) = r.wald_ci(0.95).unwrap();
        println!("{:<5} log-odds ratio {:.3} (se {:.3}) [{lo:.3}, {hi:.3}]", r.method.name(), r.tau_hat, r.se_tau.unwrap());
    }
    for w in &nami.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
