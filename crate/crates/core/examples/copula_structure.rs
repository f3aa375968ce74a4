//! The Gaussian copula parameterization: Λ, the scaled factor Ω, the implied
//! correlation Σ and the regression of the outcome on the covariates.

use nami::copula::{self, CopulaStructure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // two covariates and the outcome; λ = (λ₂₁, λ₃₁, λ₃₂)
    let c = CopulaStructure::new(3, vec![0.5, -0.8, -0.6])?;
    println!("Lambda = {:.3}", c.lambda_matrix());
    println!("Omega = {:.3}", c.omega());
    println!("Sigma = {:.3}", c.correlation());
    println!("outcome correlations {:.3?}", copula::outcome_correlations(&c));
    println!("prognostic strengths {:.3?}", copula::prognostic_strengths(&c));
    println!("R² = {:.3}", copula::r_squared(&c));
    let (mean, sd) = copula::conditional_params(&c, &[1.0, -0.5])?;
    println!("outcome latent | z = (1, -0.5): N({mean:.3}, {sd:.3}²)");
    for lambda in [0.0, -0.314, -0.75, -2.065] {
        println!("lambda {lambda:>7.3} -> rho {:.3}", copula::rho_from_lambda(lambda) + 0.0);
    }
    Ok(())
}
