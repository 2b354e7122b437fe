//! Exact minimum of the coverage probability over `[a, b]` for a fixed `n`.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::candidates::{candidate_set, CandidatePoint};
use crate::coverage::{coverage_at_candidate, CoverageResult};
use crate::types::{ErrorCriterion, ParamInterval};

// Candidates are evaluated in ascending blocks; each block may fan out, the
// fail-fast check happens between blocks so the evaluation count does not
// depend on the thread count.
const BLOCK: usize = 2048;
const PARALLEL_MIN: usize = 256;

/// Knobs for [`min_coverage_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MinimizeOptions {
    /// Stop once some candidate has coverage `≤` this value.
    pub fail_at_or_below: Option<f64>,
}

/// Outcome of a minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinCoverage {
    /// Smallest coverage found, ties resolved toward the smaller λ.
    pub worst: CoverageResult,
    /// Number of coverage evaluations performed.
    pub evaluations: u64,
    /// True when the fail-fast threshold cut the scan short.
    pub stopped_early: bool,
}

/// Orders by coverage, then by λ.
pub(crate) fn worse(x: &CoverageResult, y: &CoverageResult) -> Ordering {
    x.coverage
        .total_cmp(&y.coverage)
        .then_with(|| x.lambda.total_cmp(&y.lambda))
}

fn min_of(a: CoverageResult, b: CoverageResult) -> CoverageResult {
    if worse(&b, &a) == Ordering::Less {
        b
    } else {
        a
    }
}

fn eval_block(criterion: ErrorCriterion, n: u64, block: &[CandidatePoint]) -> CoverageResult {
    let eval = |p: &CandidatePoint| coverage_at_candidate(criterion, n, p);
    if block.len() >= PARALLEL_MIN {
        block.par_iter().map(eval).reduce_with(min_of).expect("non-empty block")
    } else {
        block.iter().map(eval).reduce(min_of).expect("non-empty block")
    }
}

/// Minimum coverage over the given candidate points.
pub fn min_over_points(
    criterion: ErrorCriterion,
    n: u64,
    points: &[CandidatePoint],
    opts: MinimizeOptions,
) -> MinCoverage {
    assert!(!points.is_empty(), "no points to evaluate");
    let mut worst: Option<CoverageResult> = None;
    let mut evaluations = 0u64;
    for block in points.chunks(BLOCK) {
        let block_min = eval_block(criterion, n, block);
        evaluations += block.len() as u64;
        let current = match worst {
            Some(w) => min_of(w, block_min),
            None => block_min,
        };
        worst = Some(current);
        if let Some(threshold) = opts.fail_at_or_below {
            if current.coverage <= threshold {
                return MinCoverage {
                    worst: current,
                    evaluations,
                    stopped_early: evaluations < points.len() as u64,
                };
            }
        }
    }
    MinCoverage {
        worst: worst.expect("at least one block"),
        evaluations,
        stopped_early: false,
    }
}

/// Minimum coverage over `[a, b]` with optional early exit.
pub fn min_coverage_with(
    criterion: ErrorCriterion,
    n: u64,
    interval: ParamInterval,
    opts: MinimizeOptions,
) -> MinCoverage {
    let set = candidate_set(criterion, n, interval);
    min_over_points(criterion, n, &set.points, opts)
}

/// Exact minimum of the coverage probability over `λ ∈ [a, b]`.
pub fn min_coverage(criterion: ErrorCriterion, n: u64, interval: ParamInterval) -> CoverageResult {
    min_coverage_with(criterion, n, interval, MinimizeOptions::default()).worst
}
