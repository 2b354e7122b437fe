//! Coverage probability as a function of λ at a fixed sample size, printed
//! as CSV. The dips sit exactly on the candidate points.
//!
//! cargo run --release --example coverage_curve > curve.csv

use poisson_ss::oracle::uniform_grid;
use poisson_ss::{candidate_set, coverage_at, coverage_at_candidate, ErrorCriterion, ParamInterval};

fn main() {
    let criterion = ErrorCriterion::Relative { eps: 0.2 };
    let interval = ParamInterval::new(0.5, 3.0);
    let n = 40;

    println!("lambda,coverage,source");
    for lambda in uniform_grid(interval, 500) {
        println!("{lambda},{},grid", coverage_at(criterion, n, lambda).coverage);
    }
    for p in &candidate_set(criterion, n, interval).points {
        println!(
            "{},{},candidate",
            p.value,
            coverage_at_candidate(criterion, n, p).coverage
        );
    }
}
