//! Finite candidate sets on which the coverage minimum over `[a, b]` is
//! attained.
//!
//! Between two consecutive candidates both acceptance bounds are constant, and
//! with `g`, `h` fixed the coverage is unimodal in λ, so the infimum over the
//! gap is at least the smaller endpoint value. The candidates are the points
//! where one of the bounds jumps:
//!
//! | family      | value            | bound that jumps |
//! |-------------|------------------|------------------|
//! | `AbsPlus`   | `ℓ/n + ε`        | `g = max(0, ℓ+1)` |
//! | `AbsMinus`  | `ℓ/n − ε`        | `h = ℓ − 1`       |
//! | `RelUpper`  | `ℓ/(n(1+ε))`     | `h = ℓ − 1`       |
//! | `RelLower`  | `ℓ/(n(1−ε))`     | `g = ℓ + 1`       |
//!
//! For the mixed criterion the absolute families are taken on
//! `(a, ε_a/ε_r)`, the relative families on `(ε_a/ε_r, b)`, and the crossover
//! itself is added.

use serde::Serialize;

use crate::types::{ErrorCriterion, ParamInterval};

/// Which formula produced a candidate. Grid families carry their integer `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "l")]
pub enum CandidateKind {
    EndpointA,
    EndpointB,
    Crossover,
    AbsPlus(i64),
    AbsMinus(i64),
    RelUpper(i64),
    RelLower(i64),
}

impl CandidateKind {
    pub fn ell(&self) -> Option<i64> {
        match *self {
            CandidateKind::AbsPlus(l)
            | CandidateKind::AbsMinus(l)
            | CandidateKind::RelUpper(l)
            | CandidateKind::RelLower(l) => Some(l),
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            CandidateKind::EndpointA => "endpoint_a",
            CandidateKind::EndpointB => "endpoint_b",
            CandidateKind::Crossover => "crossover",
            CandidateKind::AbsPlus(_) => "abs_plus",
            CandidateKind::AbsMinus(_) => "abs_minus",
            CandidateKind::RelUpper(_) => "rel_upper",
            CandidateKind::RelLower(_) => "rel_lower",
        }
    }

    fn is_grid(&self) -> bool {
        self.ell().is_some()
    }
}

/// A candidate λ together with the formula(s) that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidatePoint {
    pub kind: CandidateKind,
    pub value: f64,
    /// A second family that lands on the same value, e.g. `ℓ/n + ε = ℓ′/n − ε`.
    pub coincident: Option<CandidateKind>,
}

impl CandidatePoint {
    pub fn new(kind: CandidateKind, value: f64) -> Self {
        CandidatePoint {
            kind,
            value,
            coincident: None,
        }
    }

    /// The primary kind followed by the coincident one, if any.
    pub fn kinds(&self) -> impl Iterator<Item = CandidateKind> {
        std::iter::once(self.kind).chain(self.coincident)
    }
}

/// Sorted, deduplicated candidate set for one `(criterion, n, [a, b])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    pub points: Vec<CandidatePoint>,
    pub n: u64,
    pub criterion: ErrorCriterion,
    pub interval: ParamInterval,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }

    /// Strict upper bound on the size: `2n(b−a) + 4`, or `2n(b−a) + 7` for a
    /// mixed criterion.
    pub fn cardinality_bound(&self) -> f64 {
        cardinality_bound(self.criterion, self.n, self.interval)
    }
}

pub fn cardinality_bound(criterion: ErrorCriterion, n: u64, interval: ParamInterval) -> f64 {
    let extra = match criterion {
        ErrorCriterion::Mixed { .. } => 7.0,
        _ => 4.0,
    };
    2.0 * n as f64 * interval.width() + extra
}

#[derive(Debug, Clone, Copy)]
enum Family {
    AbsPlus,
    AbsMinus,
    RelUpper,
    RelLower,
}

impl Family {
    /// Candidate value for integer `l`.
    fn value(self, n: f64, eps: f64, l: i64) -> f64 {
        let l = l as f64;
        match self {
            Family::AbsPlus => l / n + eps,
            Family::AbsMinus => l / n - eps,
            Family::RelUpper => l / (n * (1.0 + eps)),
            Family::RelLower => l / (n * (1.0 - eps)),
        }
    }

    /// Real bounds on `l` for a value in `(lo, hi)`, before widening.
    fn ell_range(self, n: f64, eps: f64, lo: f64, hi: f64) -> (f64, f64) {
        match self {
            Family::AbsPlus => (n * (lo - eps), n * (hi - eps)),
            Family::AbsMinus => (n * (lo + eps), n * (hi + eps)),
            Family::RelUpper => (n * (1.0 + eps) * lo, n * (1.0 + eps) * hi),
            Family::RelLower => (n * (1.0 - eps) * lo, n * (1.0 - eps) * hi),
        }
    }

    fn kind(self, l: i64) -> CandidateKind {
        match self {
            Family::AbsPlus => CandidateKind::AbsPlus(l),
            Family::AbsMinus => CandidateKind::AbsMinus(l),
            Family::RelUpper => CandidateKind::RelUpper(l),
            Family::RelLower => CandidateKind::RelLower(l),
        }
    }
}

/// Pushes every member of `family` lying strictly inside `(lo, hi)`.
fn push_family(out: &mut Vec<CandidatePoint>, family: Family, n: u64, eps: f64, lo: f64, hi: f64) {
    if lo >= hi {
        return;
    }
    let nf = n as f64;
    let (l_lo, l_hi) = family.ell_range(nf, eps, lo, hi);
    let first = l_lo.floor() as i64 - 1;
    let last = l_hi.ceil() as i64 + 1;
    for l in first..=last {
        let v = family.value(nf, eps, l);
        if v > lo && v < hi {
            out.push(CandidatePoint::new(family.kind(l), v));
        }
    }
}

fn dedup_tolerance(interval: ParamInterval) -> f64 {
    1e-12 * interval.b.abs().max(1.0)
}

/// Endpoints and the crossover keep their value; grid families merge into
/// them as coincident tags.
fn merge_into(keep: &mut CandidatePoint, other: CandidatePoint) {
    if !keep.kind.is_grid() && !other.kind.is_grid() {
        return;
    }
    if keep.kind.is_grid() && !other.kind.is_grid() {
        let old = *keep;
        *keep = CandidatePoint {
            kind: other.kind,
            value: other.value,
            coincident: Some(old.kind),
        };
        return;
    }
    if keep.coincident.is_none() && other.kind != keep.kind {
        keep.coincident = Some(other.kind);
    }
}

/// The candidate set for `criterion` at sample size `n` on `interval`.
///
/// Expects a validated configuration (`0 ≤ a < b`, `ε ∈ (0, 1)`, `a > 0` for
/// the relative criterion).
pub fn candidate_set(criterion: ErrorCriterion, n: u64, interval: ParamInterval) -> CandidateSet {
    let ParamInterval { a, b } = interval;
    let mut raw = Vec::with_capacity((2.0 * n as f64 * interval.width()) as usize + 8);
    raw.push(CandidatePoint::new(CandidateKind::EndpointA, a));
    raw.push(CandidatePoint::new(CandidateKind::EndpointB, b));

    match criterion {
        ErrorCriterion::Absolute { eps } => {
            push_family(&mut raw, Family::AbsPlus, n, eps, a, b);
            push_family(&mut raw, Family::AbsMinus, n, eps, a, b);
        }
        ErrorCriterion::Relative { eps } => {
            push_family(&mut raw, Family::RelUpper, n, eps, a, b);
            push_family(&mut raw, Family::RelLower, n, eps, a, b);
        }
        ErrorCriterion::Mixed { eps_a, eps_r } => {
            let c = eps_a / eps_r;
            if a < c && c < b {
                raw.push(CandidatePoint::new(CandidateKind::Crossover, c));
            }
            let abs_hi = c.min(b);
            push_family(&mut raw, Family::AbsPlus, n, eps_a, a, abs_hi);
            push_family(&mut raw, Family::AbsMinus, n, eps_a, a, abs_hi);
            let rel_lo = c.max(a);
            push_family(&mut raw, Family::RelUpper, n, eps_r, rel_lo, b);
            push_family(&mut raw, Family::RelLower, n, eps_r, rel_lo, b);
        }
    }

    raw.sort_by(|x, y| x.value.total_cmp(&y.value));
    let tol = dedup_tolerance(interval);
    let mut points: Vec<CandidatePoint> = Vec::with_capacity(raw.len());
    for p in raw {
        match points.last_mut() {
            Some(last) if p.value - last.value <= tol => merge_into(last, p),
            _ => points.push(p),
        }
    }
    // Endpoints always sit at the extremes with their exact values.
    if let Some(first) = points.first_mut() {
        first.value = a;
    }
    if let Some(last) = points.last_mut() {
        last.value = b;
    }

    CandidateSet {
        points,
        n,
        criterion,
        interval,
    }
}
