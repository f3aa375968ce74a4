//! Closed-form standard errors of Cohen's d and per-arm sample sizes, with
//! the reduction obtained by adjusting for a prognostic covariate.

use nami::analytic::{sample_size, sample_size_fraction, se_adjusted, se_unadjusted, DesignOutcome, DesignSpec};
use nami::copula::lambda_from_rho;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let design = |outcome| DesignSpec { alpha: 0.05, power: 0.8, tau: 0.5, rho: None, outcome };
    for (name, outcome) in [
        ("continuous", DesignOutcome::Continuous),
        ("binary", DesignOutcome::Binary { p_control: 0.5, ratio: 1.0 }),
        ("survival", DesignOutcome::Survival { p_control: 0.3, p_treated: 0.3, ratio: 1.0 }),
    ] {
        let n = sample_size(&design(outcome))?;
        println!("{name:<10} {} per arm ({:.2} exact)", n.per_arm, n.exact);
    }
    println!("{:>5} {:>8} {:>10} {:>10} {:>9}", "rho", "lambda", "se", "se adj", "fraction");
    for rho in [0.0, 0.3, 0.6, 0.9] {
        let lambda = lambda_from_rho(rho)?;
        println!(
            "{rho:>5.1} {lambda:>8.3} {:>10.4} {:>10.4} {:>9.3}",
            se_unadjusted(0.5, 100.0),
            se_adjusted(0.5, lambda, 100.0),
            sample_size_fraction(0.5, rho)?
        );
    }
    let n = sample_size(&DesignSpec { rho: Some(0.6), ..design(DesignOutcome::Continuous) })?;
    println!("continuous, adjusted for rho = 0.6: {} per arm", n.per_arm);
    Ok(())
}
