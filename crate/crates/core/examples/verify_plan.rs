//! Re-derive a plan with every independent oracle: dense grid, brute-force
//! enumeration of the error event, and Monte Carlo simulation.
//!
//! cargo run --release --example verify_plan

use poisson_ss::oracle::{verify, VerifyOptions};
use poisson_ss::{validate, ConfidenceSpec, ErrorCriterion, ParamInterval};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = validate(
        ErrorCriterion::Mixed { eps_a: 0.1, eps_r: 0.2 },
        ParamInterval::new(0.0, 3.0),
        ConfidenceSpec::new(0.05),
    )?;
    let report = verify(&config, &VerifyOptions::default())?;
    println!(
        "n_min = {}, worst coverage {:.8}",
        report.plan.n_min, report.plan.worst_coverage
    );
    for c in &report.checks {
        println!(
            "{:<28} {}  discrepancy {:+.3e} (tol {:.1e})  {}",
            c.name,
            if c.passed { "ok  " } else { "FAIL" },
            c.discrepancy,
            c.tolerance,
            c.detail
        );
    }
    std::process::exit(if report.all_passed() { 0 } else { 3 });
}
