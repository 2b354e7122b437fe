//! Acceptance bounds `g(λ)`, `h(λ)` and the coverage probability
//! `C(λ) = Pr{g(λ) ≤ K ≤ h(λ)}` with `K ~ Poisson(nλ)` the sample sum.
//!
//! The error event is strict (`|K/n − λ| < ε`), so
//!
//! * absolute: `g = max(0, ⌊n(λ−ε)⌋ + 1)`, `h = ⌈n(λ+ε)⌉ − 1`
//! * relative: `g = ⌊nλ(1−ε)⌋ + 1`, `h = ⌈nλ(1+ε)⌉ − 1`
//! * mixed: absolute with `ε_a` for `λ ≤ ε_a/ε_r`, relative with `ε_r` above.

use serde::Serialize;

use crate::candidates::{CandidateKind, CandidatePoint};
use crate::kernel::{interval_prob, PoissonMean};
use crate::types::ErrorCriterion;

/// Integer acceptance range of the sample sum. Empty when `g > h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AcceptanceBounds {
    pub g: i64,
    pub h: i64,
}

impl AcceptanceBounds {
    pub fn is_empty(&self) -> bool {
        self.g > self.h
    }
}

/// One coverage evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageResult {
    pub lambda: f64,
    pub g: i64,
    pub h: i64,
    pub coverage: f64,
}

const SNAP_TOL: f64 = 1e-9;

/// Rounds `x` to the nearest integer when it is within float noise of one.
pub(crate) fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= SNAP_TOL * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

fn floor_snapped(x: f64) -> i64 {
    snap(x).floor() as i64
}

fn ceil_snapped(x: f64) -> i64 {
    snap(x).ceil() as i64
}

fn absolute_bounds(n: u64, eps: f64, lambda: f64) -> AcceptanceBounds {
    let n = n as f64;
    AcceptanceBounds {
        g: (floor_snapped(n * (lambda - eps)) + 1).max(0),
        h: ceil_snapped(n * (lambda + eps)) - 1,
    }
}

fn relative_bounds(n: u64, eps: f64, lambda: f64) -> AcceptanceBounds {
    let nl = n as f64 * lambda;
    AcceptanceBounds {
        g: floor_snapped(nl * (1.0 - eps)) + 1,
        h: ceil_snapped(nl * (1.0 + eps)) - 1,
    }
}

/// The margin that governs at `lambda`: mixed criteria resolve to their
/// absolute or relative branch, the others are returned as-is.
pub fn governing_branch(criterion: ErrorCriterion, lambda: f64) -> ErrorCriterion {
    match criterion {
        ErrorCriterion::Mixed { eps_a, eps_r } => {
            if lambda <= eps_a / eps_r {
                ErrorCriterion::Absolute { eps: eps_a }
            } else {
                ErrorCriterion::Relative { eps: eps_r }
            }
        }
        c => c,
    }
}

/// Acceptance bounds at an arbitrary `lambda ≥ 0`, with floor/ceil arguments
/// snapped to integers when they sit within float noise of one.
pub fn acceptance_bounds(criterion: ErrorCriterion, n: u64, lambda: f64) -> AcceptanceBounds {
    match governing_branch(criterion, lambda) {
        ErrorCriterion::Absolute { eps } => absolute_bounds(n, eps, lambda),
        ErrorCriterion::Relative { eps } => relative_bounds(n, eps, lambda),
        ErrorCriterion::Mixed { .. } => unreachable!("branch is resolved"),
    }
}

/// Acceptance bounds at a candidate point, using the integer `ℓ` the point
/// carries so that the bound that jumps at this point is exact.
///
/// At `ℓ/n + ε` the absolute `g` is `max(0, ℓ+1)`; at `ℓ/n − ε` the absolute
/// `h` is `ℓ − 1`; at `ℓ/(n(1+ε))` the relative `h` is `ℓ − 1`; at
/// `ℓ/(n(1−ε))` the relative `g` is `ℓ + 1`. The opposite bound is obtained
/// from the same `ℓ` and the (snapped) width of the acceptance window.
pub fn acceptance_bounds_at_candidate(criterion: ErrorCriterion, n: u64, point: &CandidatePoint) -> AcceptanceBounds {
    let branch = governing_branch(criterion, point.value);
    let mut g = None;
    let mut h = None;
    let nf = n as f64;
    for kind in point.kinds() {
        match (branch, kind) {
            (ErrorCriterion::Absolute { eps }, CandidateKind::AbsPlus(l)) => {
                let width = ceil_snapped(2.0 * nf * eps);
                g = Some((l + 1).max(0));
                h.get_or_insert(l + width - 1);
            }
            (ErrorCriterion::Absolute { eps }, CandidateKind::AbsMinus(l)) => {
                let width = ceil_snapped(2.0 * nf * eps);
                h = Some(l - 1);
                g.get_or_insert((l - width + 1).max(0));
            }
            (ErrorCriterion::Relative { eps }, CandidateKind::RelUpper(l)) => {
                h = Some(l - 1);
                g.get_or_insert(floor_snapped(l as f64 * (1.0 - eps) / (1.0 + eps)) + 1);
            }
            (ErrorCriterion::Relative { eps }, CandidateKind::RelLower(l)) => {
                g = Some(l + 1);
                h.get_or_insert(ceil_snapped(l as f64 * (1.0 + eps) / (1.0 - eps)) - 1);
            }
            _ => {}
        }
    }
    match (g, h) {
        (Some(g), Some(h)) => AcceptanceBounds { g, h },
        _ => acceptance_bounds(criterion, n, point.value),
    }
}

fn evaluate(n: u64, lambda: f64, bounds: AcceptanceBounds) -> CoverageResult {
    let coverage = if bounds.is_empty() {
        0.0
    } else {
        interval_prob(bounds.g, bounds.h, PoissonMean::of_sum(n, lambda))
    };
    CoverageResult {
        lambda,
        g: bounds.g,
        h: bounds.h,
        coverage,
    }
}

/// Coverage probability at `lambda`.
pub fn coverage_at(criterion: ErrorCriterion, n: u64, lambda: f64) -> CoverageResult {
    evaluate(n, lambda, acceptance_bounds(criterion, n, lambda))
}

/// Coverage probability at a candidate point, with exact bounds.
pub fn coverage_at_candidate(criterion: ErrorCriterion, n: u64, point: &CandidatePoint) -> CoverageResult {
    evaluate(n, point.value, acceptance_bounds_at_candidate(criterion, n, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::pmf;

    const fn abs(eps: f64) -> ErrorCriterion {
        ErrorCriterion::Absolute { eps }
    }

    const fn rel(eps: f64) -> ErrorCriterion {
        ErrorCriterion::Relative { eps }
    }

    fn b(g: i64, h: i64) -> AcceptanceBounds {
        AcceptanceBounds { g, h }
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(acceptance_bounds(abs(0.1), 10, 0.5), b(5, 5));
        assert_eq!(acceptance_bounds(abs(0.1), 10, 0.05), b(0, 1));
        assert_eq!(acceptance_bounds(rel(0.2), 10, 2.0), b(17, 23));
        let mixed = ErrorCriterion::Mixed { eps_a: 0.5, eps_r: 0.1 };
        assert_eq!(acceptance_bounds(mixed, 4, 3.0), b(11, 13));
        // above the crossover (5.0) the relative branch applies
        assert_eq!(acceptance_bounds(mixed, 4, 6.0), acceptance_bounds(rel(0.1), 4, 6.0));
    }

    #[test]
    fn lambda_zero_absolute_is_certain() {
        let r = coverage_at(abs(0.25), 7, 0.0);
        assert_eq!((r.g, r.h), (0, 1));
        assert_eq!(r.coverage, 1.0);
    }

    #[test]
    fn candidate_bounds_use_integer_tag() {
        let p = CandidatePoint::new(CandidateKind::AbsPlus(3), 3.0 / 10.0 + 0.1);
        assert_eq!(acceptance_bounds_at_candidate(abs(0.1), 10, &p).g, 4);
        let p = CandidatePoint::new(CandidateKind::AbsMinus(7), 7.0 / 10.0 - 0.1);
        assert_eq!(acceptance_bounds_at_candidate(abs(0.1), 10, &p).h, 6);
        let p = CandidatePoint::new(CandidateKind::RelLower(5), 5.0 / (10.0 * 0.8));
        assert_eq!(acceptance_bounds_at_candidate(rel(0.2), 10, &p).g, 6);
        let p = CandidatePoint::new(CandidateKind::RelUpper(12), 12.0 / (10.0 * 1.2));
        assert_eq!(acceptance_bounds_at_candidate(rel(0.2), 10, &p).h, 11);
    }

    #[test]
    fn candidate_bounds_match_snapped_formula() {
        // Both sides of the window at a tagged point agree with the snapped
        // general formula when the float value is unambiguous.
        let eps = 0.13;
        let n = 17;
        for l in -3..40i64 {
            for kind in [CandidateKind::AbsPlus(l), CandidateKind::AbsMinus(l)] {
                let v = match kind {
                    CandidateKind::AbsPlus(l) => l as f64 / n as f64 + eps,
                    _ => l as f64 / n as f64 - eps,
                };
                if v < 0.0 {
                    continue;
                }
                let p = CandidatePoint::new(kind, v);
                assert_eq!(
                    acceptance_bounds_at_candidate(abs(eps), n, &p),
                    acceptance_bounds(abs(eps), n, v),
                    "{kind:?}"
                );
            }
        }
        let eps = 0.3;
        for l in 1..40i64 {
            for (kind, v) in [
                (CandidateKind::RelUpper(l), l as f64 / (n as f64 * (1.0 + eps))),
                (CandidateKind::RelLower(l), l as f64 / (n as f64 * (1.0 - eps))),
            ] {
                let p = CandidatePoint::new(kind, v);
                assert_eq!(
                    acceptance_bounds_at_candidate(rel(eps), n, &p),
                    acceptance_bounds(rel(eps), n, v),
                    "{kind:?}"
                );
            }
        }
    }

    #[test]
    fn coverage_examples() {
        let r = coverage_at(abs(0.1), 10, 0.5);
        assert!((r.coverage - 0.175_467_369_767_850_7).abs() < 1e-15);

        let r = coverage_at(abs(0.9), 1, 0.05);
        assert_eq!((r.g, r.h), (0, 0));
        assert!((r.coverage - (-0.05f64).exp()).abs() < 1e-16);

        let r = coverage_at(rel(0.5), 20, 1.0);
        assert_eq!((r.g, r.h), (11, 29));
        let direct: f64 = (11..=29).map(|k| pmf(k, PoissonMean::new(20.0).unwrap())).sum();
        assert!((r.coverage - direct).abs() < 1e-14);
        assert!((r.coverage - 0.967_370_063_647_789_9).abs() < 1e-14);
    }

    #[test]
    fn empty_window_has_zero_coverage() {
        // n = 1, eps = 0.5 at lambda = 0.5: g = 1, h = 0
        let r = coverage_at(abs(0.5), 1, 0.5);
        assert!(r.g > r.h);
        assert_eq!(r.coverage, 0.0);
    }

    #[test]
    fn snapping_is_deterministic_near_integers() {
        // 0.3 / 0.1 style noise: n(λ+ε) = 10·(0.2+0.1) = 3.0000000000000004
        assert_eq!(acceptance_bounds(abs(0.1), 10, 0.2), b(2, 2));
        assert_eq!(snap(2.9999999999999996), 3.0);
        assert_eq!(snap(2.5), 2.5);
    }
}
