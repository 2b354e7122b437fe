//! Search for the smallest sample size whose worst-case coverage over
//! `[a, b]` exceeds `1 − δ`.
//!
//! Worst-case coverage is not known to be monotone in `n`, so the answer is
//! the *first* passing `n`; nothing is claimed about larger sample sizes.

use serde::{Deserialize, Serialize};

use crate::chernoff::lambda_threshold;
use crate::coverage::{coverage_at, CoverageResult};
use crate::error::SearchError;
use crate::minimizer::{min_coverage_with, MinimizeOptions};
use crate::types::{Config, ParamInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Try `start_n, start_n + 1, …` in order.
    #[default]
    Linear,
    /// Double `n` until some size passes, then check every smaller size
    /// downward and keep the smallest that passes.
    GallopAndVerify,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub start_n: u64,
    pub max_n: u64,
    pub strategy: Strategy,
    /// Stop evaluating a failing `n` at the first candidate below the level.
    pub fail_fast: bool,
    /// Shrink `b` to the Chernoff threshold for criteria with a relative
    /// margin. Has no effect on the absolute criterion.
    pub chernoff_truncation: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            start_n: 1,
            max_n: 1_000_000,
            strategy: Strategy::Linear,
            fail_fast: true,
            chernoff_truncation: true,
        }
    }
}

/// The answer to a sample-size question.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSizePlan {
    pub n_min: u64,
    /// λ at which the minimum coverage at `n_min` is attained.
    pub worst_lambda: f64,
    /// Minimum coverage over `[a, truncated_b]` at `n_min`.
    pub worst_coverage: f64,
    /// Coverage evaluations performed over the whole search.
    pub evaluations: u64,
    /// Upper end of the range that needed exact evaluation at `n_min`; `b`
    /// when no truncation applied.
    pub truncated_b: f64,
}

/// Result of checking one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeCheck {
    pub n: u64,
    pub passes: bool,
    pub worst: CoverageResult,
    pub evaluations: u64,
    pub truncated_b: f64,
}

/// Range that needs exact evaluation at sample size `n`.
///
/// Returns `(upper, truncated)`: for criteria with a relative margin every
/// λ above the Chernoff threshold already has coverage above the level.
pub fn effective_upper(config: &Config, n: u64, truncation: bool) -> (f64, bool) {
    let ParamInterval { b, .. } = config.interval();
    match config.effective_criterion().relative_eps() {
        Some(eps_r) if truncation => {
            let t = lambda_threshold(n, eps_r, config.confidence().delta);
            if t < b {
                (t, true)
            } else {
                (b, false)
            }
        }
        _ => (b, false),
    }
}

/// Decides whether `n` achieves coverage above `1 − δ` on all of `[a, b]`.
pub fn check_sample_size(config: &Config, n: u64, fail_fast: bool, truncation: bool) -> SizeCheck {
    let level = config.confidence().level();
    let criterion = config.effective_criterion();
    let a = config.interval().a;
    let (upper, _) = effective_upper(config, n, truncation);

    if upper <= a {
        // Everything above a is covered by the tail bound; only a itself
        // might sit exactly on the threshold.
        let worst = coverage_at(criterion, n, a);
        return SizeCheck {
            n,
            passes: worst.coverage > level,
            worst,
            evaluations: 1,
            truncated_b: a,
        };
    }

    let opts = MinimizeOptions {
        fail_at_or_below: fail_fast.then_some(level),
    };
    let m = min_coverage_with(criterion, n, ParamInterval::new(a, upper), opts);
    SizeCheck {
        n,
        passes: m.worst.coverage > level,
        worst: m.worst,
        evaluations: m.evaluations,
        truncated_b: upper,
    }
}

fn plan_from(check: &SizeCheck, evaluations: u64) -> SampleSizePlan {
    SampleSizePlan {
        n_min: check.n,
        worst_lambda: check.worst.lambda,
        worst_coverage: check.worst.coverage,
        evaluations,
        truncated_b: check.truncated_b,
    }
}

/// Smallest `n ≥ opts.start_n` whose minimum coverage exceeds `1 − δ`.
pub fn min_sample_size(config: &Config, opts: &SearchOptions) -> Result<SampleSizePlan, SearchError> {
    if opts.start_n == 0 {
        return Err(SearchError::InvalidOptions("start_n must be >= 1"));
    }
    if opts.max_n < opts.start_n {
        return Err(SearchError::InvalidOptions("max_n must be >= start_n"));
    }
    let exceeded = SearchError::MaxSampleSizeExceeded {
        start_n: opts.start_n,
        max_n: opts.max_n,
    };
    let check = |n: u64, fail_fast: bool| check_sample_size(config, n, fail_fast, opts.chernoff_truncation);
    let mut evaluations = 0u64;

    match opts.strategy {
        Strategy::Linear => {
            for n in opts.start_n..=opts.max_n {
                let c = check(n, opts.fail_fast);
                evaluations += c.evaluations;
                if c.passes {
                    return Ok(plan_from(&c, evaluations));
                }
            }
            Err(exceeded)
        }
        Strategy::GallopAndVerify => {
            let mut failed = Vec::new();
            let mut n = opts.start_n;
            let passing = loop {
                let c = check(n, opts.fail_fast);
                evaluations += c.evaluations;
                if c.passes {
                    break c;
                }
                failed.push(n);
                if n == opts.max_n {
                    return Err(exceeded);
                }
                n = n.saturating_mul(2).min(opts.max_n);
            };
            // Without monotonicity in n, every size below the galloped pass
            // has to be checked; keep the smallest that passes.
            let mut best = passing;
            for m in (opts.start_n..passing.n).rev() {
                if failed.contains(&m) {
                    continue;
                }
                let c = check(m, opts.fail_fast);
                evaluations += c.evaluations;
                if c.passes {
                    best = c;
                }
            }
            Ok(plan_from(&best, evaluations))
        }
    }
}
