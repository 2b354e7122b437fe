//! Chernoff tail bounds for the sample mean of Poisson observations and the
//! λ above which relative-error coverage is guaranteed without evaluation.

use serde::Serialize;

/// `2 ln 2 − 1`, the exponent constant of the closed-form upper-tail bound.
pub const UPPER_TAIL_CONSTANT: f64 = 2.0 * std::f64::consts::LN_2 - 1.0;

/// Bounds on `Pr{λ̂ ≤ (1−ε)λ}` (`lower`) and `Pr{λ̂ ≥ (1+ε)λ}` (`upper`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBounds {
    /// `exp(−λnε²/2)`.
    pub lower: f64,
    /// `exp(−(2ln2−1)λnε²)`.
    pub upper: f64,
    /// `[e^{−ε} / (1−ε)^{1−ε}]^{nλ}`, the sharper form `lower` relaxes.
    pub lower_sharp: f64,
    /// `[e^{ε} / (1+ε)^{1+ε}]^{nλ}`, the sharper form `upper` relaxes.
    pub upper_sharp: f64,
}

pub fn tail_bounds(n: u64, lambda: f64, eps: f64) -> TailBounds {
    let m = n as f64 * lambda;
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    TailBounds {
        lower: clamp((-m * eps * eps / 2.0).exp()),
        upper: clamp((-UPPER_TAIL_CONSTANT * m * eps * eps).exp()),
        lower_sharp: clamp((m * (-eps - (1.0 - eps) * (-eps).ln_1p())).exp()),
        upper_sharp: clamp((m * (eps - (1.0 + eps) * eps.ln_1p())).exp()),
    }
}

/// `ln(2/δ) / ((2ln2−1)·n·ε_r²)`. For every λ strictly above this value the
/// relative error exceeds `ε_r·λ` with probability below δ.
pub fn lambda_threshold(n: u64, eps_r: f64, delta: f64) -> f64 {
    (2.0 / delta).ln() / (UPPER_TAIL_CONSTANT * n as f64 * eps_r * eps_r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let t = tail_bounds(100, 1.0, 0.5);
        assert!((t.lower - (-12.5f64).exp()).abs() < 1e-20);
        assert!((t.lower - 3.726_653_172_078_671e-6).abs() < 1e-18);
        // (2 ln 2 − 1)·25 = 9.657359027997265
        assert!((t.upper - (-9.657_359_027_997_265f64).exp()).abs() < 1e-18);
        assert!((t.upper - 6.395_319_770_414_598e-5).abs() < 1e-18);
        assert!(t.lower_sharp <= t.lower && t.upper_sharp <= t.upper);
    }

    #[test]
    fn vanishing_mean_gives_trivial_bounds() {
        let t = tail_bounds(10, 1e-300, 0.3);
        assert_eq!((t.lower, t.upper), (1.0, 1.0));
        let t = tail_bounds(10, 0.0, 0.3);
        assert_eq!((t.lower_sharp, t.upper_sharp), (1.0, 1.0));
    }

    #[test]
    fn threshold_value_and_scaling() {
        let t = lambda_threshold(100, 0.1, 0.05);
        assert!((t - 9.549_400_212_365_649).abs() < 1e-9, "{t}");
        assert!((lambda_threshold(200, 0.1, 0.05) * 2.0 - t).abs() < 1e-12);
        assert!((lambda_threshold(100, 0.05, 0.05) / 4.0 - t).abs() < 1e-12);
    }
}
