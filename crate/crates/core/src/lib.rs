//! Exact minimum sample size for estimating a Poisson mean.
//!
//! Given that the mean λ lies in a known interval `[a, b]`, the crate finds
//! the smallest `n` such that the sample mean of `n` Poisson observations is
//! within a prescribed absolute, relative or mixed margin of λ with
//! probability above `1 − δ` for *every* λ in the interval.
//!
//! The coverage probability is a piecewise function of λ whose minimum over
//! `[a, b]` is attained on a finite candidate set (interval endpoints plus
//! lattice points such as `ℓ/n ± ε`), so each `n` is decided by finitely many
//! exact evaluations.
//!
//! ```
//! use poisson_ss::{validate, min_sample_size, ConfidenceSpec, ErrorCriterion, ParamInterval, SearchOptions};
//!
//! let cfg = validate(
//!     ErrorCriterion::Absolute { eps: 0.25 },
//!     ParamInterval::new(0.0, 1.0),
//!     ConfidenceSpec::new(0.1),
//! )?;
//! let plan = min_sample_size(&cfg, &SearchOptions::default())?;
//! assert!(plan.worst_coverage > 0.9);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod candidates;
pub mod chernoff;
pub mod cli;
pub mod coverage;
pub mod error;
pub mod kernel;
pub mod minimizer;
pub mod oracle;
pub mod search;
pub mod types;

pub use candidates::{candidate_set, CandidateKind, CandidatePoint, CandidateSet};
pub use chernoff::{lambda_threshold, tail_bounds, TailBounds};
pub use coverage::{
    acceptance_bounds, acceptance_bounds_at_candidate, coverage_at, coverage_at_candidate, AcceptanceBounds,
    CoverageResult,
};
pub use error::{ConfigError, SearchError};
pub use kernel::{interval_prob, pmf, PoissonMean};
pub use minimizer::{min_coverage, min_coverage_with, MinCoverage, MinimizeOptions};
pub use search::{min_sample_size, SampleSizePlan, SearchOptions, Strategy};
pub use types::{validate, ConfidenceSpec, Config, ErrorCriterion, ParamInterval, Reduction};
