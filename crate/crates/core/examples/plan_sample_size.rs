//! Smallest sample size for a ±0.1 absolute margin when λ ∈ [0, 2] at 95%.
//!
//! cargo run --release --example plan_sample_size

use poisson_ss::{min_sample_size, validate, ConfidenceSpec, ErrorCriterion, ParamInterval, SearchOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = validate(
        ErrorCriterion::Absolute { eps: 0.1 },
        ParamInterval::new(0.0, 2.0),
        ConfidenceSpec::new(0.05),
    )?;
    let plan = min_sample_size(&config, &SearchOptions::default())?;
    println!("n_min          {}", plan.n_min);
    println!("worst lambda   {:.6}", plan.worst_lambda);
    println!("worst coverage {:.6}", plan.worst_coverage);
    println!("evaluations    {}", plan.evaluations);
    Ok(())
}
