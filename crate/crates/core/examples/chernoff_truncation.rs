//! Chernoff tail bounds and the λ above which relative-error coverage needs
//! no exact evaluation. Compares searches with and without truncation.
//!
//! cargo run --release --example chernoff_truncation

use std::time::Instant;

use poisson_ss::{
    lambda_threshold, min_sample_size, tail_bounds, validate, ConfidenceSpec, ErrorCriterion, ParamInterval,
    SearchOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (eps, delta) = (0.1, 0.05);
    for n in [100, 1000, 10_000] {
        let t = lambda_threshold(n, eps, delta);
        let b = tail_bounds(n, t, eps);
        println!(
            "n = {n:>6}: threshold {t:.4}, tail bounds at threshold {:.3e} / {:.3e}",
            b.lower, b.upper
        );
    }

    let config = validate(
        ErrorCriterion::Relative { eps: 0.2 },
        ParamInterval::new(0.5, 50.0),
        ConfidenceSpec::new(delta),
    )?;
    for truncation in [true, false] {
        let opts = SearchOptions {
            chernoff_truncation: truncation,
            ..SearchOptions::default()
        };
        let start = Instant::now();
        let plan = min_sample_size(&config, &opts)?;
        println!(
            "truncation {truncation:>5}: n_min {}, evaluated up to {:.3}, {} evaluations, {:.2?}",
            plan.n_min,
            plan.truncated_b,
            plan.evaluations,
            start.elapsed()
        );
    }
    Ok(())
}
