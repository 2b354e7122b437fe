//! Independent verification paths for the candidate-set method: dense grid
//! scans, brute-force enumeration of the error event, and seeded Monte Carlo
//! simulation of the sample mean.
//!
//! None of these use the acceptance bounds `g`, `h` or the candidate set; the
//! error event is re-derived from its definition on the count scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::candidates::candidate_set;
use crate::coverage::{coverage_at, coverage_at_candidate, CoverageResult};
use crate::kernel::{ln_factorial, pmf, PoissonMean};
use crate::minimizer::worse;
use crate::search::{check_sample_size, min_sample_size, SampleSizePlan, SearchOptions};
use crate::types::{Config, ErrorCriterion, ParamInterval};

const BOUNDARY_TOL: f64 = 1e-9;

/// `|k − nλ| < margin` on the count scale, with counts sitting within float
/// noise of the boundary treated as on it (and so excluded).
fn strictly_within(k: u64, n_lambda: f64, margin: f64) -> bool {
    let dist = (k as f64 - n_lambda).abs();
    dist < margin - BOUNDARY_TOL * margin.max(1.0)
}

/// Whether the error event holds for `λ̂ = k/n` when the true mean is `lambda`.
pub fn error_event(criterion: ErrorCriterion, k: u64, n: u64, lambda: f64) -> bool {
    let nf = n as f64;
    let nl = nf * lambda;
    match criterion {
        ErrorCriterion::Absolute { eps } => strictly_within(k, nl, nf * eps),
        ErrorCriterion::Relative { eps } => strictly_within(k, nl, nl * eps),
        ErrorCriterion::Mixed { eps_a, eps_r } => {
            strictly_within(k, nl, nf * eps_a) || strictly_within(k, nl, nl * eps_r)
        }
    }
}

/// A summation bound past which the Poisson(`nλ`) tail is negligible.
pub fn default_k_max(n: u64, lambda: f64) -> u64 {
    let m = n as f64 * lambda;
    (m + 40.0 * (m + 1.0).sqrt()).ceil() as u64
}

/// `Σ_{k=0}^{k_max} pmf(k, nλ) · [error event holds at k/n]`.
pub fn brute_force_coverage(criterion: ErrorCriterion, n: u64, lambda: f64, k_max: u64) -> f64 {
    let mu = PoissonMean::of_sum(n, lambda);
    (0..=k_max)
        .filter(|&k| error_event(criterion, k, n, lambda))
        .map(|k| pmf(k, mu))
        .sum()
}

/// Uniform grid of `points ≥ 2` values on `[a, b]`, both endpoints included.
pub fn uniform_grid(interval: ParamInterval, points: usize) -> Vec<f64> {
    assert!(points >= 2, "a grid needs at least two points");
    let ParamInterval { a, b } = interval;
    let last = points - 1;
    (0..points)
        .map(|i| {
            if i == last {
                b
            } else {
                a + (b - a) * (i as f64 / last as f64)
            }
        })
        .collect()
}

/// Minimum of `coverage_at` over a uniform grid of `points` values.
pub fn grid_min_coverage(criterion: ErrorCriterion, n: u64, interval: ParamInterval, points: usize) -> CoverageResult {
    uniform_grid(interval, points)
        .into_par_iter()
        .map(|lambda| coverage_at(criterion, n, lambda))
        .reduce_with(|x, y| if worse(&y, &x).is_lt() { y } else { x })
        .expect("grid is non-empty")
}

/// Poisson random variates: sequential-search inversion for small means,
/// transformed rejection (PTRS) above.
#[derive(Debug, Clone, Copy)]
pub struct PoissonSampler {
    mean: f64,
    method: Method,
}

#[derive(Debug, Clone, Copy)]
enum Method {
    Zero,
    Inversion { p0: f64 },
    Ptrs(Ptrs),
}

#[derive(Debug, Clone, Copy)]
struct Ptrs {
    ln_mean: f64,
    b: f64,
    a: f64,
    inv_alpha: f64,
    v_r: f64,
}

impl PoissonSampler {
    pub const INVERSION_LIMIT: f64 = 30.0;

    /// # Panics
    /// If `mean` is negative or not finite.
    pub fn new(mean: f64) -> Self {
        assert!(mean.is_finite() && mean >= 0.0, "invalid Poisson mean {mean}");
        let method = if mean == 0.0 {
            Method::Zero
        } else if mean <= Self::INVERSION_LIMIT {
            Method::Inversion { p0: (-mean).exp() }
        } else {
            let b = 0.931 + 2.53 * mean.sqrt();
            Method::Ptrs(Ptrs {
                ln_mean: mean.ln(),
                b,
                a: -0.059 + 0.02483 * b,
                inv_alpha: 1.1239 + 1.1328 / (b - 3.4),
                v_r: 0.9277 - 3.6224 / (b - 2.0),
            })
        };
        PoissonSampler { mean, method }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.method {
            Method::Zero => 0,
            Method::Inversion { p0 } => {
                let u: f64 = rng.random();
                let mut k = 0u64;
                let mut p = p0;
                let mut cdf = p0;
                while u > cdf {
                    k += 1;
                    p *= self.mean / k as f64;
                    cdf += p;
                    if p < f64::MIN_POSITIVE {
                        break;
                    }
                }
                k
            }
            Method::Ptrs(c) => loop {
                let u: f64 = rng.random::<f64>() - 0.5;
                let v: f64 = rng.random();
                let us = 0.5 - u.abs();
                let k = ((2.0 * c.a / us + c.b) * u + self.mean + 0.43).floor();
                if us >= 0.07 && v <= c.v_r {
                    return k as u64;
                }
                if k < 0.0 || (us < 0.013 && v > us) {
                    continue;
                }
                let lhs = v.ln() + c.inv_alpha.ln() - (c.a / (us * us) + c.b).ln();
                let rhs = -self.mean + k * c.ln_mean - ln_factorial(k as u64);
                if lhs <= rhs {
                    return k as u64;
                }
            },
        }
    }
}

/// Empirical coverage from simulated batches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    /// Binomial standard error of `estimate`.
    pub stderr: f64,
    pub trials: u64,
    pub successes: u64,
}

const MC_CHUNK: u64 = 4096;

/// Simulates `trials` batches of `n` Poisson(`lambda`) draws and reports the
/// fraction of batches whose mean satisfies the error criterion.
///
/// Trials are split into fixed chunks; chunk `i` draws from the ChaCha8
/// stream `i` of `seed`, so the estimate is independent of the thread count.
pub fn monte_carlo_coverage(
    criterion: ErrorCriterion,
    n: u64,
    lambda: f64,
    trials: u64,
    seed: u64,
) -> MonteCarloEstimate {
    assert!(trials >= 1, "at least one trial is required");
    let sampler = PoissonSampler::new(lambda);
    let chunks = trials.div_ceil(MC_CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = MC_CHUNK.min(trials - chunk * MC_CHUNK);
            (0..len)
                .filter(|_| {
                    let k: u64 = (0..n).map(|_| sampler.sample(&mut rng)).sum();
                    error_event(criterion, k, n, lambda)
                })
                .count() as u64
        })
        .sum();
    let estimate = successes as f64 / trials as f64;
    MonteCarloEstimate {
        estimate,
        stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
        successes,
    }
}

/// Settings for [`verify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub search: SearchOptions,
    pub grid_points: usize,
    pub trials: u64,
    pub seed: u64,
    /// Allowed Monte Carlo deviation in binomial standard deviations.
    pub mc_sigmas: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            search: SearchOptions::default(),
            grid_points: 10_000,
            trials: 100_000,
            seed: 0x5eed,
            mc_sigmas: 4.0,
        }
    }
}

/// One oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub plan: SampleSizePlan,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Re-derives the plan's claims with every oracle path.
///
/// Checks, all at `n_min` unless stated: the grid minimum never undercuts the
/// candidate minimum; brute-force coverage at every candidate agrees with the
/// exact evaluation and gives the same pass/fail decision; brute force also
/// confirms that `n_min − 1` fails; Monte Carlo at the worst λ agrees with the
/// worst coverage.
pub fn verify(config: &Config, opts: &VerifyOptions) -> Result<VerificationReport, crate::SearchError> {
    let plan = min_sample_size(config, &opts.search)?;
    let criterion = config.effective_criterion();
    let level = config.confidence().level();
    let a = config.interval().a;
    let n = plan.n_min;
    let mut checks = Vec::new();

    // Region that was evaluated exactly at n_min.
    let upper = plan.truncated_b;
    let region = (upper > a).then(|| ParamInterval::new(a, upper));

    if let Some(region) = region {
        let grid = grid_min_coverage(criterion, n, region, opts.grid_points);
        let gap = grid.coverage - plan.worst_coverage;
        checks.push(Check {
            name: "grid_not_below_candidates",
            passed: gap >= -1e-12,
            discrepancy: gap,
            tolerance: 1e-12,
            detail: format!("grid min {:.17e} at lambda {:.17e}", grid.coverage, grid.lambda),
        });
        checks.push(Check {
            name: "grid_decision",
            passed: grid.coverage > level,
            discrepancy: grid.coverage - level,
            tolerance: 0.0,
            detail: format!("{} grid points", opts.grid_points),
        });
    }

    let brute_at = |n: u64, upper: f64| -> (f64, f64, usize) {
        // (largest |exact − brute|, smallest brute-force coverage, points)
        let pts = if upper > a {
            candidate_set(criterion, n, ParamInterval::new(a, upper)).points
        } else {
            vec![crate::CandidatePoint::new(crate::CandidateKind::EndpointA, a)]
        };
        let (dev, min) = pts
            .par_iter()
            .map(|p| {
                let exact = coverage_at_candidate(criterion, n, p).coverage;
                let brute = brute_force_coverage(criterion, n, p.value, default_k_max(n, p.value));
                ((exact - brute).abs(), brute)
            })
            .reduce(|| (0.0, f64::INFINITY), |x, y| (x.0.max(y.0), x.1.min(y.1)));
        (dev, min, pts.len())
    };

    let (dev, brute_min, count) = brute_at(n, upper);
    checks.push(Check {
        name: "brute_force_agreement",
        passed: dev <= 1e-12,
        discrepancy: dev,
        tolerance: 1e-12,
        detail: format!("{count} candidate points at n = {n}"),
    });
    checks.push(Check {
        name: "brute_force_decision",
        passed: brute_min > level,
        discrepancy: brute_min - level,
        tolerance: 0.0,
        detail: format!("brute-force minimum {brute_min:.17e}"),
    });

    if n > opts.search.start_n {
        let prev = check_sample_size(config, n - 1, false, opts.search.chernoff_truncation);
        let (_, brute_prev, _) = brute_at(n - 1, prev.truncated_b);
        checks.push(Check {
            name: "predecessor_fails",
            passed: !prev.passes && brute_prev <= level + 1e-12,
            discrepancy: brute_prev - level,
            tolerance: 1e-12,
            detail: format!("n = {} minimum coverage {:.17e}", n - 1, prev.worst.coverage),
        });
    }

    let mc = monte_carlo_coverage(criterion, n, plan.worst_lambda, opts.trials, opts.seed);
    let c = plan.worst_coverage;
    let sd = (c * (1.0 - c) / opts.trials as f64).sqrt();
    let dev = (mc.estimate - c).abs();
    checks.push(Check {
        name: "monte_carlo",
        passed: dev <= opts.mc_sigmas * sd + 1e-15,
        discrepancy: dev,
        tolerance: opts.mc_sigmas * sd,
        detail: format!(
            "{} of {} trials at lambda {:.17e} (seed {})",
            mc.successes, mc.trials, plan.worst_lambda, opts.seed
        ),
    });

    Ok(VerificationReport { plan, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABS: ErrorCriterion = ErrorCriterion::Absolute { eps: 0.1 };

    #[test]
    fn event_is_strict() {
        // λ = 0.5, n = 10, ε = 0.1: only k = 5 qualifies
        let hits: Vec<u64> = (0..12).filter(|&k| error_event(ABS, k, 10, 0.5)).collect();
        assert_eq!(hits, vec![5]);
    }

    #[test]
    fn mixed_event_is_union() {
        let mixed = ErrorCriterion::Mixed { eps_a: 0.3, eps_r: 0.2 };
        let a = ErrorCriterion::Absolute { eps: 0.3 };
        let r = ErrorCriterion::Relative { eps: 0.2 };
        for lambda in [0.2, 1.0, 1.5, 2.7, 6.0] {
            for k in 0..100 {
                assert_eq!(
                    error_event(mixed, k, 7, lambda),
                    error_event(a, k, 7, lambda) || error_event(r, k, 7, lambda)
                );
            }
        }
    }

    #[test]
    fn empty_event_gives_zero() {
        let c = ErrorCriterion::Absolute { eps: 0.5 };
        assert_eq!(brute_force_coverage(c, 1, 0.5, 50), 0.0);
    }

    #[test]
    fn brute_force_matches_small_case() {
        let b = brute_force_coverage(ABS, 10, 0.5, default_k_max(10, 0.5));
        assert!((b - 0.175_467_369_767_850_7).abs() < 1e-15);
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(ParamInterval::new(0.0, 1.0), 3);
        assert_eq!(g, vec![0.0, 0.5, 1.0]);
        let iv = ParamInterval::new(0.2, 0.9);
        let two = grid_min_coverage(ABS, 10, iv, 2);
        let expect = [coverage_at(ABS, 10, 0.2), coverage_at(ABS, 10, 0.9)]
            .into_iter()
            .min_by(worse)
            .unwrap();
        assert_eq!(two, expect);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let x = monte_carlo_coverage(ABS, 20, 0.7, 10_000, 42);
        let y = monte_carlo_coverage(ABS, 20, 0.7, 10_000, 42);
        assert_eq!(x, y);
        let z = monte_carlo_coverage(ABS, 20, 0.7, 10_000, 43);
        assert_ne!(x.successes, z.successes);
        let one = monte_carlo_coverage(ABS, 20, 0.7, 1, 7);
        assert!(one.estimate == 0.0 || one.estimate == 1.0);
    }

    #[test]
    fn sampler_moments() {
        for mean in [0.4, 3.0, 45.0, 1000.0] {
            let s = PoissonSampler::new(mean);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let draws: Vec<f64> = (0..200_000).map(|_| s.sample(&mut rng) as f64).collect();
            let m = draws.iter().sum::<f64>() / draws.len() as f64;
            let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
            let se = (mean / draws.len() as f64).sqrt();
            assert!((m - mean).abs() < 4.0 * se, "mean {mean}: got {m}");
            assert!((v / mean - 1.0).abs() < 0.05, "mean {mean}: var {v}");
        }
    }
}
