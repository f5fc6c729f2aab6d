//! Fixed points, stability and regime classification of the reduced model.
//!
//! With `f(x) = k x` the growth function `g(x) = -k(1+r)x^2 + (1+r)x - r` has
//! up to two roots in `(0, 1)`, and the model falls into one of three regimes
//! separated by
//!
//! ```text
//! k1 = 1 / (1 + r)        (interior attractor leaves through x = 1)
//! k2 = (1 + r) / (4 r)    (the two interior roots merge and vanish)
//! ```
//!
//! For `f(x) = p` there is at most one interior root and the model is either
//! bistable (`p < 1/(1+r)`) or dominated by defectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{InteractionStrength, ModelInstance, ReducedGame, DEFAULT_TOLERANCE};

/// Offset used to probe the flow on either side of a degenerate fixed point.
pub const PROBE_OFFSET: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    Boundary,
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    /// Attracting from one side, repelling from the other.
    SemiStable,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::SemiStable => "semi-stable",
        }
    }

    /// Whether trajectories can settle here from at least one side.
    pub fn is_attracting(&self) -> bool {
        !matches!(self, Stability::Unstable)
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Stability {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "stable" => Ok(Stability::Stable),
            "unstable" => Ok(Stability::Unstable),
            "semi-stable" => Ok(Stability::SemiStable),
            other => Err(format!("unknown stability '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub location: f64,
    pub origin: Origin,
    pub stability: Stability,
}

/// Critical linear interaction strengths for a given `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub k1: f64,
    pub k2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `x = 0` and `x = 1` both attract, split by an unstable interior point.
    Bistable,
    /// `x = 0` and an interior point attract.
    Coexistence,
    /// `x = 0` is the only attractor.
    DefectorDominance,
    /// Parameter sits on the lower threshold `1/(1+r)`.
    CriticalLower,
    /// Parameter sits on the upper threshold `(1+r)/(4r)`.
    CriticalUpper,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Bistable => "bistable",
            Regime::Coexistence => "coexistence",
            Regime::DefectorDominance => "defector-dominance",
            Regime::CriticalLower => "critical-lower",
            Regime::CriticalUpper => "critical-upper",
        }
    }

    pub fn is_critical(&self) -> bool {
        matches!(self, Regime::CriticalLower | Regime::CriticalUpper)
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            Regime::Bistable,
            Regime::Coexistence,
            Regime::DefectorDominance,
            Regime::CriticalLower,
            Regime::CriticalUpper,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
        .ok_or_else(|| format!("unknown regime '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub r: f64,
    pub strength: InteractionStrength,
    pub regime: Regime,
    pub thresholds: Thresholds,
    /// Ascending by location.
    pub fixed_points: Vec<FixedPoint>,
}

impl RegimeReport {
    pub fn attractors(&self) -> impl Iterator<Item = &FixedPoint> {
        self.fixed_points
            .iter()
            .filter(|fp| fp.stability.is_attracting())
    }

    pub fn stable_count(&self) -> usize {
        self.fixed_points
            .iter()
            .filter(|fp| fp.stability == Stability::Stable)
            .count()
    }
}

/// Which family of interaction strength a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrengthKind {
    Constant,
    Linear,
}

impl StrengthKind {
    pub fn with_parameter(self, value: f64) -> Result<InteractionStrength> {
        match self {
            StrengthKind::Constant => InteractionStrength::constant(value),
            StrengthKind::Linear => InteractionStrength::linear(value),
        }
    }
}

/// One parameter value of a bifurcation diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRow {
    pub parameter: f64,
    pub regime: Regime,
    pub points: Vec<(f64, Stability)>,
}

impl From<&RegimeReport> for BifurcationRow {
    fn from(rep: &RegimeReport) -> Self {
        Self {
            parameter: rep.strength.parameter(),
            regime: rep.regime,
            points: rep
                .fixed_points
                .iter()
                .map(|fp| (fp.location, fp.stability))
                .collect(),
        }
    }
}

pub fn critical_thresholds(r: f64) -> Result<Thresholds> {
    let r = ReducedGame::new(r)?.r();
    Ok(Thresholds {
        k1: 1.0 / (1.0 + r),
        k2: (1.0 + r) / (4.0 * r),
    })
}

/// Interior fixed point `r / ((1+r)(1-p))` of the constant-strength model, if
/// it lies strictly inside `(0, 1)`.
pub fn internal_fixed_point_constant(p: f64, r: f64) -> Result<Option<f64>> {
    internal_fixed_point_constant_with(p, r, DEFAULT_TOLERANCE)
}

fn internal_fixed_point_constant_with(p: f64, r: f64, eps: f64) -> Result<Option<f64>> {
    let r = ReducedGame::new(r)?.r();
    InteractionStrength::constant(p)?;
    if p == 1.0 {
        return Err(invalid("p", p, "f(x) = 1 has no interior fixed point"));
    }
    let x = r / ((1.0 + r) * (1.0 - p));
    Ok(strictly_inside(x, eps).then_some(x))
}

/// Both real roots of `g(x) = -k(1+r)x^2 + (1+r)x - r`, ascending, or `None`
/// when the discriminant is negative beyond tolerance.
///
/// The larger root comes from the cancellation-free branch and the smaller
/// one from the product of roots `r / (k(1+r))`. A discriminant within `eps`
/// of zero yields the double root `1/(2k)` twice.
pub fn linear_growth_roots(k: f64, r: f64) -> Result<Option<(f64, f64)>> {
    linear_growth_roots_with(k, r, DEFAULT_TOLERANCE)
}

fn linear_growth_roots_with(k: f64, r: f64, eps: f64) -> Result<Option<(f64, f64)>> {
    let r = ReducedGame::new(r)?.r();
    InteractionStrength::linear(k)?;
    // Normalised discriminant 1 - k/k2.
    let disc = 1.0 - 4.0 * k * r / (1.0 + r);
    if disc < -eps {
        return Ok(None);
    }
    if disc <= eps {
        let x = 1.0 / (2.0 * k);
        return Ok(Some((x, x)));
    }
    let big = (1.0 + disc.sqrt()) / (2.0 * k);
    let small = r / (k * (1.0 + r)) / big;
    Ok(Some((small, big)))
}

/// Roots of `g` that lie strictly inside `(0, 1)`, ascending. A double root is
/// reported once.
pub fn internal_fixed_points_linear(k: f64, r: f64) -> Result<Vec<f64>> {
    internal_fixed_points_linear_with(k, r, DEFAULT_TOLERANCE)
}

fn internal_fixed_points_linear_with(k: f64, r: f64, eps: f64) -> Result<Vec<f64>> {
    let Some((lo, hi)) = linear_growth_roots_with(k, r, eps)? else {
        return Ok(Vec::new());
    };
    let mut out: Vec<f64> = [lo, hi]
        .into_iter()
        .filter(|&x| strictly_inside(x, eps))
        .collect();
    out.dedup_by(|a, b| (*a - *b).abs() <= eps);
    Ok(out)
}

fn strictly_inside(x: f64, eps: f64) -> bool {
    x > eps && x < 1.0 - eps
}

/// Classifies a fixed point by the sign of the field's derivative, falling back
/// to probing the flow at `x* +/- PROBE_OFFSET` when the derivative vanishes.
pub fn classify_fixed_point(model: &ModelInstance, x: f64) -> Result<FixedPoint> {
    let eps = model.tolerance();
    if !(x >= -eps && x <= 1.0 + eps) {
        return Err(invalid("x*", x, "fixed point must lie in [0, 1]"));
    }
    let x = x.clamp(0.0, 1.0);
    let velocity = model.replicator_velocity(x);
    if velocity.abs() > eps {
        return Err(Error::NotAFixedPoint { x, velocity });
    }
    let origin = if x <= eps || x >= 1.0 - eps {
        Origin::Boundary
    } else {
        Origin::Internal
    };
    let slope = model.velocity_derivative(x)?;
    let stability = if slope < -eps {
        Stability::Stable
    } else if slope > eps {
        Stability::Unstable
    } else {
        probe_stability(model, x, eps)
    };
    Ok(FixedPoint {
        location: x,
        origin,
        stability,
    })
}

fn probe_stability(model: &ModelInstance, x: f64, eps: f64) -> Stability {
    let from_below = (x > eps).then(|| model.replicator_velocity(x - PROBE_OFFSET) > 0.0);
    let from_above = (x < 1.0 - eps).then(|| model.replicator_velocity(x + PROBE_OFFSET) < 0.0);
    match (from_below, from_above) {
        (Some(true), Some(true)) => Stability::Stable,
        (Some(false), Some(false)) => Stability::Unstable,
        (Some(_), Some(_)) => Stability::SemiStable,
        (Some(a), None) | (None, Some(a)) => {
            if a {
                Stability::Stable
            } else {
                Stability::Unstable
            }
        }
        (None, None) => Stability::SemiStable,
    }
}

/// Full fixed-point structure and regime label for the reduced game with
/// parameter `r`.
pub fn classify_regime(strength: InteractionStrength, r: f64) -> Result<RegimeReport> {
    classify_model(&ModelInstance::reduced(r, strength)?)
}

/// As [`classify_regime`], honouring the model's tolerance.
pub fn classify_model(model: &ModelInstance) -> Result<RegimeReport> {
    let r = model.reduced_r()?;
    let eps = model.tolerance();
    let thresholds = critical_thresholds(r)?;
    let strength = model.strength();

    let (regime, interior) = match strength {
        InteractionStrength::Constant(p) => {
            // The interior point reaches x = 1 at p = 1/(1+r), which is k1.
            let pc = thresholds.k1;
            if (p - pc).abs() <= eps {
                (Regime::CriticalLower, Vec::new())
            } else if p < pc {
                let x = internal_fixed_point_constant_with(p, r, eps)?;
                (Regime::Bistable, x.into_iter().collect())
            } else {
                (Regime::DefectorDominance, Vec::new())
            }
        }
        InteractionStrength::LinearInFrequency(k) => {
            let interior = internal_fixed_points_linear_with(k, r, eps)?;
            let regime = if (k - thresholds.k1).abs() <= eps {
                Regime::CriticalLower
            } else if (k - thresholds.k2).abs() <= eps * thresholds.k2 {
                Regime::CriticalUpper
            } else if k < thresholds.k1 {
                Regime::Bistable
            } else if k < thresholds.k2 {
                Regime::Coexistence
            } else {
                Regime::DefectorDominance
            };
            (regime, interior)
        }
    };

    let mut locations = Vec::with_capacity(interior.len() + 2);
    locations.push(0.0);
    locations.extend(interior);
    locations.push(1.0);
    let fixed_points = locations
        .into_iter()
        .map(|x| classify_fixed_point(model, x))
        .collect::<Result<Vec<_>>>()?;

    Ok(RegimeReport {
        r,
        strength,
        regime,
        thresholds,
        fixed_points,
    })
}

/// Classifies every grid value independently. Rows keep grid order; a bad
/// parameter yields an error in its own slot without stopping the sweep.
pub fn bifurcation_sweep(r: f64, grid: &[f64], kind: StrengthKind) -> Vec<Result<BifurcationRow>> {
    grid.par_iter()
        .map(|&v| {
            let strength = kind.with_parameter(v)?;
            classify_regime(strength, r).map(|rep| BifurcationRow::from(&rep))
        })
        .collect()
}

/// `points` values evenly spaced over `[from, to]` inclusive.
pub fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        n => {
            let step = (to - from) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        to
                    } else {
                        from + step * i as f64
                    }
                })
                .collect()
        }
    }
}
