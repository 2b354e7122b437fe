use poisson_ss::oracle::{error_event, monte_carlo_coverage};
use poisson_ss::{
    acceptance_bounds, candidate_set, coverage_at, interval_prob, lambda_threshold, min_coverage, pmf, tail_bounds,
    ErrorCriterion, ParamInterval, PoissonMean,
};
use proptest::prelude::*;

fn mean(m: f64) -> PoissonMean {
    PoissonMean::new(m).unwrap()
}

fn any_criterion() -> impl Strategy<Value = ErrorCriterion> {
    prop_oneof![
        (0.02..0.95f64).prop_map(|eps| ErrorCriterion::Absolute { eps }),
        (0.02..0.95f64).prop_map(|eps| ErrorCriterion::Relative { eps }),
        (0.02..0.95f64, 0.02..0.95f64).prop_map(|(eps_a, eps_r)| ErrorCriterion::Mixed { eps_a, eps_r }),
    ]
}

fn with_eps(c: ErrorCriterion, scale: f64) -> ErrorCriterion {
    match c {
        ErrorCriterion::Absolute { eps } => ErrorCriterion::Absolute {
            eps: (eps * scale).min(0.99),
        },
        ErrorCriterion::Relative { eps } => ErrorCriterion::Relative {
            eps: (eps * scale).min(0.99),
        },
        ErrorCriterion::Mixed { eps_a, eps_r } => ErrorCriterion::Mixed {
            eps_a: (eps_a * scale).min(0.99),
            eps_r: (eps_r * scale).min(0.99),
        },
    }
}

fn interval() -> impl Strategy<Value = ParamInterval> {
    (0.01..5.0f64, 0.001..5.0f64).prop_map(|(a, w)| ParamInterval::new(a, a + w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn interval_prob_is_additive(m in 1e-6..1e4f64, lo in 0i64..400, w1 in 0i64..300, w2 in 1i64..300) {
        let mu = mean(m);
        let mid = lo + w1;
        let hi = mid + w2;
        let whole = interval_prob(lo, hi, mu);
        let parts = interval_prob(lo, mid, mu) + interval_prob(mid + 1, hi, mu);
        prop_assert!((whole - parts).abs() <= 1e-12, "{whole} vs {parts}");
    }

    #[test]
    fn interval_prob_grows_with_the_range(m in 1e-6..1e4f64, lo in 0i64..400, w in 0i64..300, extra in 1i64..50) {
        let mu = mean(m);
        let inner = interval_prob(lo, lo + w, mu);
        prop_assert!(interval_prob(lo, lo + w + extra, mu) >= inner - 1e-15);
        prop_assert!(interval_prob((lo - extra).max(0), lo + w, mu) >= inner - 1e-15);
        prop_assert!((0.0..=1.0).contains(&inner));
    }

    #[test]
    fn singleton_interval_is_the_pmf(m in 1e-6..1e4f64, k in 0u64..20_000) {
        let mu = mean(m);
        let p = pmf(k, mu);
        prop_assert!((interval_prob(k as i64, k as i64, mu) - p).abs() <= 1e-15 * p.max(1e-300) + 1e-300);
    }

    #[test]
    fn bounds_are_the_extreme_accepted_counts(c in any_criterion(), n in 1u64..60, lambda in 0.001..8.0f64) {
        let ab = acceptance_bounds(c, n, lambda);
        let accepted: Vec<u64> = (0..=(n as f64 * (lambda * 3.0 + 1.0)) as u64 + 10)
            .filter(|&k| error_event(c, k, n, lambda))
            .collect();
        match (accepted.first(), accepted.last()) {
            (Some(&lo), Some(&hi)) => {
                prop_assert_eq!(ab.g, lo as i64);
                prop_assert_eq!(ab.h, hi as i64);
                prop_assert_eq!(accepted.len() as i64, hi as i64 - lo as i64 + 1);
            }
            _ => prop_assert!(ab.is_empty()),
        }
    }

    #[test]
    fn wider_margins_never_lose_coverage(c in any_criterion(), n in 1u64..200, lambda in 0.0..10.0f64, s in 1.0..1.9f64) {
        let narrow = acceptance_bounds(c, n, lambda);
        let wide_c = with_eps(c, s);
        let wide = acceptance_bounds(wide_c, n, lambda);
        if !narrow.is_empty() {
            prop_assert!(wide.g <= narrow.g && wide.h >= narrow.h);
        }
        prop_assert!(coverage_at(wide_c, n, lambda).coverage >= coverage_at(c, n, lambda).coverage - 1e-15);
    }

    #[test]
    fn mixed_is_piecewise_abs_then_rel(eps_a in 0.02..0.95f64, eps_r in 0.02..0.95f64, n in 1u64..200, lambda in 0.0..10.0f64) {
        let mixed = ErrorCriterion::Mixed { eps_a, eps_r };
        let branch = if lambda <= eps_a / eps_r {
            ErrorCriterion::Absolute { eps: eps_a }
        } else {
            ErrorCriterion::Relative { eps: eps_r }
        };
        let m = coverage_at(mixed, n, lambda);
        let p = coverage_at(branch, n, lambda);
        prop_assert_eq!((m.g, m.h), (p.g, p.h));
        prop_assert_eq!(m.coverage.to_bits(), p.coverage.to_bits());
    }

    #[test]
    fn candidate_set_is_sorted_deduplicated_and_bounded(c in any_criterion(), n in 1u64..300, iv in interval()) {
        let set = candidate_set(c, n, iv);
        let v: Vec<f64> = set.values().collect();
        prop_assert_eq!(v.first().copied(), Some(iv.a));
        prop_assert_eq!(v.last().copied(), Some(iv.b));
        for w in v.windows(2) {
            prop_assert!(w[1] - w[0] > 1e-12 * iv.b.max(1.0));
        }
        prop_assert!((set.len() as f64) < set.cardinality_bound());
    }

    #[test]
    fn candidate_minimum_is_below_every_sample(c in any_criterion(), n in 1u64..100, iv in interval(), u in proptest::collection::vec(0.0..=1.0f64, 64)) {
        let m = min_coverage(c, n, iv);
        prop_assert!(iv.contains(m.lambda));
        for t in u {
            let lambda = iv.a + t * iv.width();
            prop_assert!(m.coverage <= coverage_at(c, n, lambda).coverage + 1e-12);
        }
    }

    #[test]
    fn shrinking_the_interval_never_lowers_the_minimum(c in any_criterion(), n in 1u64..100, iv in interval(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let (lo, hi) = if s < t { (s, t) } else { (t, s) };
        prop_assume!(hi - lo > 1e-6);
        let inner = ParamInterval::new(iv.a + lo * iv.width(), iv.a + hi * iv.width());
        prop_assert!(min_coverage(c, n, inner).coverage >= min_coverage(c, n, iv).coverage - 1e-12);
    }

    #[test]
    fn threshold_scales_inversely(n in 1u64..10_000, k in 2u64..20, eps in 0.01..0.99f64, delta in 1e-6..0.99f64) {
        let t1 = lambda_threshold(n, eps, delta);
        let tk = lambda_threshold(n * k, eps, delta);
        prop_assert!((t1 / k as f64 - tk).abs() <= 1e-12 * t1);
        prop_assert!(lambda_threshold(n, eps, delta / 2.0) > t1);
        prop_assert!(lambda_threshold(n, eps * 1.1, delta) < t1);
    }

    #[test]
    fn sharp_bounds_are_tighter(n in 1u64..500, lambda in 0.001..50.0f64, eps in 0.01..0.99f64) {
        let b = tail_bounds(n, lambda, eps);
        prop_assert!(b.lower_sharp <= b.lower * (1.0 + 1e-12));
        prop_assert!(b.upper_sharp <= b.upper * (1.0 + 1e-12));
    }

    #[test]
    fn single_trial_is_bernoulli(c in any_criterion(), n in 1u64..30, lambda in 0.0..5.0f64, seed in any::<u64>()) {
        let mc = monte_carlo_coverage(c, n, lambda, 1, seed);
        prop_assert!(mc.estimate == 0.0 || mc.estimate == 1.0);
    }
}

/// Every λ in (a, b) at which g or h jumps, found by walking the counts.
fn breakpoints(c: ErrorCriterion, n: u64, iv: ParamInterval) -> Vec<f64> {
    let nf = n as f64;
    let top = (nf * iv.b * 2.0 + nf + 4.0) as i64;
    let mut out = Vec::new();
    let crossover = c.crossover();
    let mut push = |x: f64, keep: bool| {
        if keep && x > iv.a && x < iv.b {
            out.push(x);
        }
    };
    for l in -2..=top {
        let l = l as f64;
        match c {
            ErrorCriterion::Absolute { eps } => {
                push(l / nf + eps, true);
                push(l / nf - eps, true);
            }
            ErrorCriterion::Relative { eps } => {
                push(l / (nf * (1.0 + eps)), true);
                push(l / (nf * (1.0 - eps)), true);
            }
            ErrorCriterion::Mixed { eps_a, eps_r } => {
                let cr = crossover.unwrap();
                for x in [l / nf + eps_a, l / nf - eps_a] {
                    push(x, x < cr);
                }
                for x in [l / (nf * (1.0 + eps_r)), l / (nf * (1.0 - eps_r))] {
                    push(x, x > cr);
                }
            }
        }
    }
    out
}

#[test]
fn candidate_set_contains_every_breakpoint() {
    let cases = [
        (ErrorCriterion::Absolute { eps: 0.13 }, 17, 0.0, 3.2),
        (ErrorCriterion::Absolute { eps: 0.25 }, 8, 0.1, 2.0),
        (ErrorCriterion::Relative { eps: 0.3 }, 11, 0.2, 4.0),
        (ErrorCriterion::Relative { eps: 0.05 }, 40, 1.0, 2.5),
        (ErrorCriterion::Mixed { eps_a: 0.1, eps_r: 0.2 }, 25, 0.0, 2.0),
        (
            ErrorCriterion::Mixed {
                eps_a: 0.25,
                eps_r: 0.5,
            },
            9,
            0.0,
            1.5,
        ),
        (ErrorCriterion::Mixed { eps_a: 0.3, eps_r: 0.1 }, 13, 1.0, 5.0),
    ];
    for (c, n, a, b) in cases {
        let iv = ParamInterval::new(a, b);
        let set: Vec<f64> = candidate_set(c, n, iv).values().collect();
        for x in breakpoints(c, n, iv) {
            let hit = set.iter().any(|&v| (v - x).abs() <= 1e-9 * x.max(1.0));
            assert!(hit, "{c:?} n={n}: breakpoint {x} missing");
        }
        if let Some(cr) = c.crossover().filter(|&cr| cr > a && cr < b) {
            assert!(set.contains(&cr));
        }
    }
}
