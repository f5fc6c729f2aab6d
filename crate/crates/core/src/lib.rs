//! Replicator dynamics of the Prisoner's Dilemma when cooperators and
//! defectors interact with a frequency-dependent strength `f(x)`.
//!
//! - [`game`]: payoffs, interaction strength and the vector field.
//! - [`analysis`]: fixed points, stability, thresholds and regimes.
//! - [`simulation`]: Euler/RK4 trajectories and seeded ensembles.

pub mod analysis;
pub mod error;
pub mod game;
pub mod simulation;

pub use analysis::{
    bifurcation_sweep, classify_fixed_point, classify_model, classify_regime, critical_thresholds,
    internal_fixed_point_constant, internal_fixed_points_linear, linear_growth_roots, linspace,
    BifurcationRow, FixedPoint, Origin, Regime, RegimeReport, Stability, StrengthKind, Thresholds,
};
pub use error::{Error, Result};
pub use game::{
    donation_to_reduced, DonationGame, Game, InteractionStrength, ModelInstance, PayoffMatrix,
    PopulationState, ReducedGame, DEFAULT_TOLERANCE,
};
pub use simulation::{
    estimate_attractor, gap_ratios, integrate, run_ensemble, step_euler, step_rk4,
    AttractorEstimate, Basin, EnsembleConfig, EnsembleResult, IntegratorConfig, Method, Sample,
    Termination, Trajectory,
};
