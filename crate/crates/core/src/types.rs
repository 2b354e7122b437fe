//! Shared domain vocabulary: error criteria, the prior interval for the
//! Poisson mean, the confidence demand, and the validated configuration.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Margin of error controlled by the plan.
///
/// * `Absolute { eps }` asks for `|λ̂ − λ| < eps`.
/// * `Relative { eps }` asks for `|λ̂ − λ| < eps·λ`.
/// * `Mixed { eps_a, eps_r }` asks for either of the two to hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ErrorCriterion {
    Absolute { eps: f64 },
    Relative { eps: f64 },
    Mixed { eps_a: f64, eps_r: f64 },
}

impl ErrorCriterion {
    /// The λ at which the absolute and relative margins coincide
    /// (`eps_a / eps_r`). Only defined for the mixed criterion.
    pub fn crossover(&self) -> Option<f64> {
        match *self {
            ErrorCriterion::Mixed { eps_a, eps_r } => Some(eps_a / eps_r),
            _ => None,
        }
    }

    /// Relative margin used for Chernoff truncation, if the criterion has one.
    pub fn relative_eps(&self) -> Option<f64> {
        match *self {
            ErrorCriterion::Relative { eps } => Some(eps),
            ErrorCriterion::Mixed { eps_r, .. } => Some(eps_r),
            ErrorCriterion::Absolute { .. } => None,
        }
    }
}

/// Known range `[a, b]` of the Poisson mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamInterval {
    pub a: f64,
    pub b: f64,
}

impl ParamInterval {
    pub fn new(a: f64, b: f64) -> Self {
        ParamInterval { a, b }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.a <= lambda && lambda <= self.b
    }
}

/// Confidence parameter δ; the plan must achieve coverage above `1 − δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceSpec {
    pub delta: f64,
}

impl ConfidenceSpec {
    pub fn new(delta: f64) -> Self {
        ConfidenceSpec { delta }
    }

    /// Required coverage level `1 − δ`. Coverage must be strictly above it.
    pub fn level(&self) -> f64 {
        1.0 - self.delta
    }
}

/// How a mixed criterion collapses when its crossover lies outside `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// `eps_a / eps_r ≤ a`: the relative margin governs the whole interval.
    ToRelative,
    /// `eps_a / eps_r ≥ b`: the absolute margin governs the whole interval.
    ToAbsolute,
}

/// A configuration that passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    criterion: ErrorCriterion,
    interval: ParamInterval,
    confidence: ConfidenceSpec,
    reduction: Option<Reduction>,
}

impl Config {
    /// The criterion exactly as supplied.
    pub fn criterion(&self) -> ErrorCriterion {
        self.criterion
    }

    pub fn interval(&self) -> ParamInterval {
        self.interval
    }

    pub fn confidence(&self) -> ConfidenceSpec {
        self.confidence
    }

    pub fn reduction(&self) -> Option<Reduction> {
        self.reduction
    }

    /// The criterion after collapsing a mixed criterion whose crossover is
    /// outside `(a, b)`. Coverage is identical on `[a, b]` either way.
    pub fn effective_criterion(&self) -> ErrorCriterion {
        match (self.reduction, self.criterion) {
            (Some(Reduction::ToRelative), ErrorCriterion::Mixed { eps_r, .. }) => {
                ErrorCriterion::Relative { eps: eps_r }
            }
            (Some(Reduction::ToAbsolute), ErrorCriterion::Mixed { eps_a, .. }) => {
                ErrorCriterion::Absolute { eps: eps_a }
            }
            (_, c) => c,
        }
    }
}

fn check_eps(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::EpsilonOutOfRange { name, value })
    }
}

/// Checks every hypothesis the exact method relies on and returns the
/// configuration unchanged (plus a reduction flag for degenerate mixed
/// criteria).
pub fn validate(
    criterion: ErrorCriterion,
    interval: ParamInterval,
    confidence: ConfidenceSpec,
) -> Result<Config, ConfigError> {
    match criterion {
        ErrorCriterion::Absolute { eps } => check_eps("eps", eps)?,
        ErrorCriterion::Relative { eps } => check_eps("eps", eps)?,
        ErrorCriterion::Mixed { eps_a, eps_r } => {
            check_eps("eps_a", eps_a)?;
            check_eps("eps_r", eps_r)?;
        }
    }
    let delta = confidence.delta;
    if !(delta.is_finite() && delta > 0.0 && delta < 1.0) {
        return Err(ConfigError::DeltaOutOfRange(delta));
    }
    let ParamInterval { a, b } = interval;
    if !a.is_finite() || !b.is_finite() {
        return Err(ConfigError::NonFiniteBound { a, b });
    }
    if a >= b {
        return Err(ConfigError::EmptyInterval { a, b });
    }
    if a < 0.0 {
        return Err(ConfigError::NegativeLowerBound(a));
    }
    if let ErrorCriterion::Relative { .. } = criterion {
        if a <= 0.0 {
            return Err(ConfigError::RelativeWithZeroLowerBound(a));
        }
    }

    let reduction = match criterion.crossover() {
        Some(c) if c <= a => Some(Reduction::ToRelative),
        Some(c) if c >= b => Some(Reduction::ToAbsolute),
        _ => None,
    };

    Ok(Config {
        criterion,
        interval,
        confidence,
        reduction,
    })
}
