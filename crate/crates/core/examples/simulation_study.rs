//! Replicated trial simulation comparing unadjusted, adjusted marginal and
//! conditional estimators.
//!
//! Usage: cargo run --release --example simulation_study -- [outcome] [tau] [rho] [p] [n] [reps] [survival order]

use nami::sim::{run_scenario, summarize_pvalues, Dgp, DgpSpec, OutcomeKind, ScenarioConfig};
use std::time::Instant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let outcome = match arg(0, "continuous").as_str() {
        "binary" => OutcomeKind::Binary,
        "survival" => OutcomeKind::Survival,
        _ => OutcomeKind::Continuous,
    };
    let mut spec = DgpSpec::new(outcome, arg(1, "0.5").parse()?, arg(2, "0.6").parse()?, arg(3, "1").parse()?, arg(4, "82").parse()?);
    if outcome == OutcomeKind::Survival {
        spec.noncensoring = Some(0.3);
    }
    let mut config = ScenarioConfig::new(Dgp::Copula(spec), arg(5, "200").parse()?, 2024);
    config.survival_order = arg(6, "6").parse()?;

    let start = Instant::now();
    let result = run_scenario(&config)?;
    println!("{} replications in {:.1?}", config.replications, start.elapsed());
    for w in &result.warnings {
        println!("warning: {w}");
    }
    println!("{:<6} {:>8} {:>8} {:>8} {:>9} {:>6}", "method", "mean", "sd", "mean se", "reject", "fail");
    for s in &result.summaries {
        println!(
            "{:<6} {:>8.4} {:>8.4} {:>8.4} {:>9.3} {:>6}",
            s.method.name(),
            s.mean_estimate,
            s.empirical_sd,
            s.mean_se,
            s.rejection_rate,
            s.failures
        );
    }
    for s in &result.summaries {
        let p = summarize_pvalues(&result, s.method);
        println!("{:<6} p-value histogram {:?}, KS p = {:.3}", s.method.name(), p.histogram, p.uniform.p_value);
    }
    Ok(())
}
