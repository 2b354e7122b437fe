//! Required sample size across margins and confidence levels, searched in
//! parallel.
//!
//! cargo run --release --example margin_sweep

use poisson_ss::{min_sample_size, validate, ConfidenceSpec, ErrorCriterion, ParamInterval, SearchOptions};
use rayon::prelude::*;

fn main() {
    let interval = ParamInterval::new(0.5, 2.0);
    let margins = [0.3, 0.25, 0.2, 0.15];
    let deltas = [0.2, 0.1, 0.05];
    let jobs: Vec<(f64, f64)> = margins
        .iter()
        .flat_map(|&e| deltas.iter().map(move |&d| (e, d)))
        .collect();

    let rows: Vec<_> = jobs
        .par_iter()
        .map(|&(eps, delta)| {
            let sizes = [
                ErrorCriterion::Absolute { eps },
                ErrorCriterion::Relative { eps },
                ErrorCriterion::Mixed { eps_a: eps, eps_r: eps },
            ]
            .map(|c| {
                let config = validate(c, interval, ConfidenceSpec::new(delta)).expect("valid");
                min_sample_size(&config, &SearchOptions::default())
                    .map(|p| p.n_min)
                    .expect("within budget")
            });
            (eps, delta, sizes)
        })
        .collect();

    println!("{:>6} {:>6} {:>8} {:>8} {:>8}", "eps", "delta", "abs", "rel", "mixed");
    for (eps, delta, [abs, rel, mixed]) in rows {
        println!("{eps:>6} {delta:>6} {abs:>8} {rel:>8} {mixed:>8}");
    }
}
