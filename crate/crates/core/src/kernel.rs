//! Poisson probabilities.
//!
//! The pmf uses the saddle-point form `exp(−stirlerr(k) − bd0(k, μ)) / √(2πk)`,
//! which equals `μ^k e^{−μ} / k!` but avoids the cancellation between
//! `k ln μ`, `μ` and `ln k!` that costs several digits when both are large.
//! Interval sums start at the in-range index nearest the mode and walk
//! outward with the ratio recurrence, re-anchoring periodically.

use std::f64::consts::PI;

/// Mean of a Poisson law. In coverage computations this is `n·λ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PoissonMean(f64);

impl PoissonMean {
    /// Returns `None` for negative or non-finite means.
    pub fn new(mu: f64) -> Option<Self> {
        (mu.is_finite() && mu >= 0.0).then_some(PoissonMean(mu))
    }

    /// Mean of the sum of `n` i.i.d. Poisson(`lambda`) observations.
    ///
    /// # Panics
    /// If `lambda` is negative or not finite.
    pub fn of_sum(n: u64, lambda: f64) -> Self {
        PoissonMean::new(n as f64 * lambda).expect("lambda must be finite and >= 0")
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

// lnΓ(k+1) − (k+½)ln k + k − ½ln(2π) for k = 0..=15.
#[allow(clippy::excessive_precision)]
const STIRLERR: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_22,
    0.041_340_695_955_409_294_09,
    0.027_677_925_684_998_339_15,
    0.020_790_672_103_765_093_11,
    0.016_644_691_189_821_192_16,
    0.013_876_128_823_070_747_99,
    0.011_896_709_945_891_770_10,
    0.010_411_265_261_972_096_50,
    0.009_255_462_182_712_732_918,
    0.008_330_563_433_362_871_256,
    0.007_573_675_487_951_840_795,
    0.006_942_840_107_209_529_866,
    0.006_408_994_188_004_207_068,
    0.005_951_370_112_758_847_736,
    0.005_554_733_551_962_801_371,
];

/// Error of Stirling's approximation to `ln k!`.
fn stirlerr(k: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if k <= 15 {
        return STIRLERR[k as usize];
    }
    let n = k as f64;
    let nn = n * n;
    if k > 500 {
        (S0 - S1 / nn) / n
    } else if k > 80 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if k > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// `x ln(x/m) + m − x`, accurate when `x ≈ m`.
fn bd0(x: f64, m: f64) -> f64 {
    let d = x - m;
    if d.abs() < 0.5 * (x + m) {
        let mut v = d / (x + m);
        let mut s = d * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1u32;
        loop {
            ej *= v;
            let next = s + ej / f64::from(2 * j + 1);
            if next == s {
                return next;
            }
            s = next;
            j += 1;
        }
    }
    x * (x / m).ln() + m - x
}

/// `ln k!`.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        return 0.0;
    }
    let x = k as f64;
    stirlerr(k) + (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln()
}

/// `Pr{X = k}` for `X ~ Poisson(mu)`.
pub fn pmf(k: u64, mu: PoissonMean) -> f64 {
    let mu = mu.0;
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if k == 0 {
        return (-mu).exp();
    }
    let x = k as f64;
    (-stirlerr(k) - bd0(x, mu)).exp() / (2.0 * PI * x).sqrt()
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

const CUTOFF: f64 = 1e-18;
const REANCHOR_EVERY: u64 = 64;

/// `Pr{k_lo ≤ X ≤ k_hi}` for `X ~ Poisson(mu)`. Empty ranges give 0 and
/// negative `k_lo` is treated as 0.
pub fn interval_prob(k_lo: i64, k_hi: i64, mu: PoissonMean) -> f64 {
    let lo = k_lo.max(0);
    if lo > k_hi {
        return 0.0;
    }
    let (lo, hi) = (lo as u64, k_hi as u64);
    let m = mu.0;
    if m == 0.0 {
        return if lo == 0 { 1.0 } else { 0.0 };
    }

    let mode = m.floor().min(u64::MAX as f64) as u64;
    let anchor = mode.clamp(lo, hi);
    let p_anchor = pmf(anchor, mu);
    let mut acc = CompensatedSum::default();
    acc.add(p_anchor);

    // Upward from the anchor; every step here moves away from the mode.
    let mut p = p_anchor;
    let mut k = anchor;
    while k < hi {
        k += 1;
        p = if (k - anchor) % REANCHOR_EVERY == 0 {
            pmf(k, mu)
        } else {
            p * m / k as f64
        };
        acc.add(p);
        if p <= CUTOFF * acc.value() {
            break;
        }
    }

    // Downward from the anchor.
    let mut p = p_anchor;
    let mut k = anchor;
    while k > lo {
        p = if (anchor - k + 1) % REANCHOR_EVERY == 0 {
            pmf(k - 1, mu)
        } else {
            p * k as f64 / m
        };
        k -= 1;
        acc.add(p);
        if p <= CUTOFF * acc.value() {
            break;
        }
    }

    acc.value().clamp(0.0, 1.0)
}
