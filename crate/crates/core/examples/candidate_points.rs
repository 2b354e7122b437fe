//! The finite set of λ values on which the minimum coverage is attained, for
//! each error criterion.
//!
//! cargo run --release --example candidate_points

use poisson_ss::{candidate_set, coverage_at_candidate, min_coverage, ErrorCriterion, ParamInterval};

fn main() {
    let interval = ParamInterval::new(0.0, 1.5);
    let n = 9;
    for criterion in [
        ErrorCriterion::Absolute { eps: 0.25 },
        ErrorCriterion::Mixed {
            eps_a: 0.25,
            eps_r: 0.5,
        },
    ] {
        let set = candidate_set(criterion, n, interval);
        println!(
            "{criterion:?}, n = {n}: {} points (bound {:.1})",
            set.len(),
            set.cardinality_bound()
        );
        for p in &set.points {
            let tags: Vec<String> = p
                .kinds()
                .map(|k| format!("{}{}", k.tag(), k.ell().map(|l| format!("({l})")).unwrap_or_default()))
                .collect();
            println!(
                "  {:>10.6}  C = {:.6}  {}",
                p.value,
                coverage_at_candidate(criterion, n, p).coverage,
                tags.join(" = ")
            );
        }
        let worst = min_coverage(criterion, n, interval);
        println!("  minimum {:.6} at λ = {:.6}\n", worst.coverage, worst.lambda);
    }
}
