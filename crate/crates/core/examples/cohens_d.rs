//! Cohen's d from a simulated continuous trial, unadjusted and adjusted for
//! one prognostic covariate, with the probabilistic index P(Y₀ < Y₁).

use nami::basis::BasisSpec;
use nami::joint::{fit_ltm, fit_nami, NamiOptions, OutcomeSpec};
use nami::marginal::{fit_marginal, probabilistic_index};
use nami::sim::{sample_dataset, DgpSpec, OutcomeKind};
use nami::Link;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data = sample_dataset(&DgpSpec::new(OutcomeKind::Continuous, 0.5, 0.6, 1, 200), &mut rng)?;
    let outcome = OutcomeSpec { link: Link::Probit, basis: BasisSpec::Linear };
    let covariate = BasisSpec::bernstein_for(6, &data.covariates[0].finite_points())?;

    let (_, mi) = fit_marginal(&data.without_covariates(), outcome.link, &outcome.basis)?;
    let nami = fit_nami(&data, &outcome, &[covariate], &NamiOptions::default())?;
    let ltm = fit_ltm(&data, &outcome)?;
    for r in [&mi, &nami, &ltm] {
        let (lo, hi) = r.wald_ci(0.95).unwrap();
        println!("{:<5} {} {:.3} [{lo:.3}, {hi:.3}]", r.method.name(), r.effect, r.tau_hat);
    }
    println!("R² of the covariate: {:.3}", nami.r_squared.unwrap());
    let (lo, hi) = nami.wald_ci(0.95).unwrap();
    println!("P(Y0 < Y1) = {:.3} [{:.3}, {:.3}]", probabilistic_index(nami.tau_hat), probabilistic_index(lo), probabilistic_index(hi));
    Ok(())
}
