//! Trajectory integration and seeded ensembles.
//!
//! The default integrator is the explicit map `x(t) = x(t-1) + dx/dt * step`
//! with `step = 1`, clamped to `[0, 1]`. Classic RK4 at a small step serves as
//! the accuracy reference.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_model, RegimeReport, Stability};
use crate::error::{invalid, Error, Result};
use crate::game::{InteractionStrength, ModelInstance, PopulationState};

/// Minimum number of samples [`estimate_attractor`] needs.
pub const MIN_ESTIMATE_SAMPLES: usize = 10;

/// Per-unit-time gap ratio above which an approach counts as slow.
pub const SLOW_DECAY_RATIO: f64 = 0.99;

const RATIO_WINDOW: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Explicit Euler map, clamped to `[0, 1]`.
    PaperEuler,
    RungeKutta4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub step: f64,
    pub max_steps: usize,
    /// Converged once `|x(t) - x(t - step)| < tolerance * step`.
    pub tolerance: f64,
    /// Record every `sample_stride`-th step. The initial and terminal states
    /// are always recorded.
    pub sample_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::PaperEuler,
            step: 1.0,
            max_steps: 100_000,
            tolerance: 1e-8,
            sample_stride: 1,
        }
    }
}

impl IntegratorConfig {
    /// RK4 with step 0.01.
    pub fn rk4_reference() -> Self {
        Self {
            method: Method::RungeKutta4,
            step: 0.01,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(invalid("step", self.step, "must be positive"));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps", 0.0, "must be at least 1"));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(invalid("tolerance", self.tolerance, "must be non-negative"));
        }
        if self.sample_stride == 0 {
            return Err(invalid("sample_stride", 0.0, "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Converged(f64),
    MaxStepsReached,
    /// Reached `x = 0` or `x = 1` to within tolerance.
    AbsorbedAtBoundary(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub status: Termination,
}

impl Trajectory {
    pub fn initial_state(&self) -> f64 {
        self.samples[0].x
    }

    pub fn final_state(&self) -> f64 {
        self.samples[self.samples.len() - 1].x
    }
}

pub fn step_euler(model: &ModelInstance, x: f64, dt: f64) -> f64 {
    (x + dt * model.replicator_velocity(x)).clamp(0.0, 1.0)
}

pub fn step_rk4(model: &ModelInstance, x: f64, dt: f64) -> f64 {
    let f = |x: f64| model.replicator_velocity(x);
    let k1 = f(x);
    let k2 = f(x + 0.5 * dt * k1);
    let k3 = f(x + 0.5 * dt * k2);
    let k4 = f(x + dt * k3);
    (x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).clamp(0.0, 1.0)
}

pub fn integrate(model: &ModelInstance, x0: f64, config: &IntegratorConfig) -> Result<Trajectory> {
    config.validate()?;
    let eps = model.tolerance();
    let x0 = PopulationState::with_tolerance(x0, eps)?.cooperators();
    let step = match config.method {
        Method::PaperEuler => step_euler,
        Method::RungeKutta4 => step_rk4,
    };

    let mut samples = vec![Sample { t: 0.0, x: x0 }];
    if let Some(b) = boundary(x0, eps) {
        return Ok(Trajectory {
            samples,
            status: Termination::AbsorbedAtBoundary(b),
        });
    }

    let mut x = x0;
    for n in 1..=config.max_steps {
        let next = step(model, x, config.step);
        let sample = Sample {
            t: n as f64 * config.step,
            x: next,
        };
        let status = if (next - x).abs() < config.tolerance * config.step {
            Some(Termination::Converged(next))
        } else {
            boundary(next, eps).map(Termination::AbsorbedAtBoundary)
        };
        if status.is_some() || n % config.sample_stride == 0 || n == config.max_steps {
            samples.push(sample);
        }
        if let Some(status) = status {
            return Ok(Trajectory { samples, status });
        }
        x = next;
    }
    Ok(Trajectory {
        samples,
        status: Termination::MaxStepsReached,
    })
}

fn boundary(x: f64, eps: f64) -> Option<f64> {
    if x <= eps {
        Some(0.0)
    } else if x >= 1.0 - eps {
        Some(1.0)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorEstimate {
    pub location: f64,
    /// Approach is sub-exponential: the per-unit-time ratio of successive gaps
    /// tends to 1 instead of settling at a constant below 1.
    pub slow_decay: bool,
    /// Mean per-unit-time gap ratio over the tail, if the tail moves at all.
    pub tail_ratio: Option<f64>,
}

/// Per-unit-time ratios of successive step sizes over the last `window + 2`
/// samples. Stationary stretches are skipped.
pub fn gap_ratios(traj: &Trajectory, window: usize) -> Vec<f64> {
    let s = &traj.samples;
    let start = s.len().saturating_sub(window + 2);
    ratios(&s[start..])
}

fn ratios(s: &[Sample]) -> Vec<f64> {
    // Speeds over each recorded interval, tagged with the interval midpoint.
    let speeds: Vec<(f64, f64)> = s
        .windows(2)
        .map(|w| {
            let dt = w[1].t - w[0].t;
            (0.5 * (w[0].t + w[1].t), (w[1].x - w[0].x).abs() / dt)
        })
        .collect();
    speeds
        .windows(2)
        .filter(|w| w[0].1 > 0.0 && w[1].1 > 0.0)
        .map(|w| (w[1].1 / w[0].1).powf(1.0 / (w[1].0 - w[0].0)))
        .collect()
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Terminal location of a trajectory and whether it approaches it slowly.
///
/// Slow decay requires a tail ratio of at least [`SLOW_DECAY_RATIO`] and a
/// contraction rate `1 - ratio` that keeps shrinking between the middle and
/// the end of the trajectory, which an exponential approach does not do.
pub fn estimate_attractor(traj: &Trajectory) -> Result<AttractorEstimate> {
    let s = &traj.samples;
    if s.len() < MIN_ESTIMATE_SAMPLES {
        return Err(Error::TrajectoryTooShort {
            len: s.len(),
            min: MIN_ESTIMATE_SAMPLES,
        });
    }
    let window = RATIO_WINDOW.min(s.len() / 4).max(2);
    if traj.status == Termination::MaxStepsReached && !monotone(&s[s.len() - window..]) {
        return Err(Error::NoMonotoneTail);
    }

    let late = mean(&ratios(&s[s.len() - window..]));
    let mid_start = (s.len() / 2).saturating_sub(window / 2);
    let mid = mean(&ratios(&s[mid_start..mid_start + window]));
    let slow_decay = match (mid, late) {
        (Some(mid), Some(late)) => {
            (SLOW_DECAY_RATIO..=1.0).contains(&late) && (1.0 - late) < 0.75 * (1.0 - mid)
        }
        _ => false,
    };
    Ok(AttractorEstimate {
        location: traj.final_state(),
        slow_decay,
        tail_ratio: late,
    })
}

fn monotone(s: &[Sample]) -> bool {
    let up = s.windows(2).all(|w| w[1].x >= w[0].x);
    let down = s.windows(2).all(|w| w[1].x <= w[0].x);
    up || down
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub members: usize,
    /// Seed for ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
    pub seed: u64,
    pub r: f64,
    pub strength: InteractionStrength,
    /// Terminal states within this distance of a fixed point join its basin.
    pub bin_radius: f64,
}

impl EnsembleConfig {
    pub fn new(r: f64, strength: InteractionStrength, seed: u64) -> Self {
        Self {
            members: 50,
            seed,
            r,
            strength,
            bin_radius: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.members == 0 {
            return Err(invalid("members", 0.0, "must be at least 1"));
        }
        if !(self.bin_radius.is_finite() && self.bin_radius > 0.0) {
            return Err(invalid("bin_radius", self.bin_radius, "must be positive"));
        }
        Ok(())
    }

    /// Initial states, drawn up front in member order, uniform on `(0, 1)`.
    pub fn initial_states(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.members).map(|_| rng.sample(Open01)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Basin {
    pub location: f64,
    pub stability: Stability,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub report: RegimeReport,
    pub trajectories: Vec<Trajectory>,
    pub estimates: Vec<Option<AttractorEstimate>>,
    /// Index into `basins` for each member, `None` if no fixed point is in range.
    pub assignments: Vec<Option<usize>>,
    /// One entry per analytic fixed point, ascending.
    pub basins: Vec<Basin>,
    pub unresolved: usize,
}

impl EnsembleResult {
    /// Terminal location of the basin each member fell into.
    pub fn attractor_of(&self, member: usize) -> Option<f64> {
        self.assignments[member].map(|i| self.basins[i].location)
    }

    /// Basins that received at least one member.
    pub fn occupied(&self) -> impl Iterator<Item = &Basin> {
        self.basins.iter().filter(|b| b.count > 0)
    }
}

pub fn run_ensemble(
    config: &EnsembleConfig,
    integrator: &IntegratorConfig,
) -> Result<EnsembleResult> {
    config.validate()?;
    integrator.validate()?;
    let model = ModelInstance::reduced(config.r, config.strength)?;
    let report = classify_model(&model)?;

    let trajectories = config
        .initial_states()
        .par_iter()
        .map(|&x0| integrate(&model, x0, integrator))
        .collect::<Result<Vec<_>>>()?;

    let estimates = trajectories
        .iter()
        .map(|t| estimate_attractor(t).ok())
        .collect();

    let mut basins: Vec<Basin> = report
        .fixed_points
        .iter()
        .map(|fp| Basin {
            location: fp.location,
            stability: fp.stability,
            count: 0,
        })
        .collect();
    let assignments: Vec<Option<usize>> = trajectories
        .iter()
        .map(|t| nearest_within(&basins, t.final_state(), config.bin_radius))
        .collect();
    for i in assignments.iter().flatten() {
        basins[*i].count += 1;
    }
    let unresolved = assignments.iter().filter(|a| a.is_none()).count();

    Ok(EnsembleResult {
        report,
        trajectories,
        estimates,
        assignments,
        basins,
        unresolved,
    })
}

fn nearest_within(basins: &[Basin], x: f64, radius: f64) -> Option<usize> {
    basins
        .iter()
        .enumerate()
        .map(|(i, b)| (i, (b.location - x).abs()))
        .filter(|&(_, d)| d <= radius)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}
