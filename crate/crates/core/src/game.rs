//! Payoff structures, interaction strength and the replicator vector field.
//!
//! A population of cooperators (frequency `x`) and defectors (`1 - x`) plays a
//! symmetric 2x2 game. Cooperators meet defectors only with intensity `f(x)`,
//! so the fitness of each strategy is
//!
//! ```text
//! f_C = x R + (1 - x) f(x) S
//! f_D = x f(x) T + (1 - x) P
//! ```
//!
//! and the cooperator frequency follows `dx/dt = x (f_C - phi)` with
//! `phi = x f_C + (1 - x) f_D`. For the reduced payoffs `(1, 0, 1 + r, r)` the
//! field factors as `x (1 - x) g(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default tolerance for "is this zero / is this a fixed point" decisions.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Payoffs of a symmetric 2x2 game, from the row player's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    reward: f64,
    sucker: f64,
    temptation: f64,
    punishment: f64,
}

impl PayoffMatrix {
    /// Any finite payoffs.
    pub fn new(reward: f64, sucker: f64, temptation: f64, punishment: f64) -> Result<Self> {
        for (name, v) in [
            ("R", reward),
            ("S", sucker),
            ("T", temptation),
            ("P", punishment),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, v, "payoff must be finite"));
            }
        }
        Ok(Self {
            reward,
            sucker,
            temptation,
            punishment,
        })
    }

    /// Payoffs that must satisfy `T > R > P > S`.
    pub fn prisoners_dilemma(
        reward: f64,
        sucker: f64,
        temptation: f64,
        punishment: f64,
    ) -> Result<Self> {
        let m = Self::new(reward, sucker, temptation, punishment)?;
        if m.is_prisoners_dilemma() {
            Ok(m)
        } else {
            Err(Error::NotPrisonersDilemma)
        }
    }

    pub fn is_prisoners_dilemma(&self) -> bool {
        self.temptation > self.reward
            && self.reward > self.punishment
            && self.punishment > self.sucker
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }

    pub fn sucker(&self) -> f64 {
        self.sucker
    }

    pub fn temptation(&self) -> f64 {
        self.temptation
    }

    pub fn punishment(&self) -> f64 {
        self.punishment
    }
}

/// The single-parameter Prisoner's Dilemma `(R, S, T, P) = (1, 0, 1 + r, r)`.
///
/// `r` measures how profitable unilateral defection is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedGame {
    r: f64,
}

impl ReducedGame {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 0.0 && r < 1.0 {
            Ok(Self { r })
        } else {
            Err(invalid("r", r, "must lie in the open interval (0, 1)"))
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn payoff_matrix(&self) -> PayoffMatrix {
        PayoffMatrix {
            reward: 1.0,
            sucker: 0.0,
            temptation: 1.0 + self.r,
            punishment: self.r,
        }
    }
}

/// Donation game: a cooperator pays `cost` so that its partner receives `benefit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DonationGame {
    benefit: f64,
    cost: f64,
}

impl DonationGame {
    pub fn new(benefit: f64, cost: f64) -> Result<Self> {
        if !(cost.is_finite() && cost > 0.0) {
            return Err(invalid("c", cost, "cost must be positive"));
        }
        if !(benefit.is_finite() && benefit > cost) {
            return Err(invalid("b", benefit, "benefit must exceed the cost"));
        }
        Ok(Self { benefit, cost })
    }

    pub fn benefit(&self) -> f64 {
        self.benefit
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// `(b - c, -c, b, 0)`.
    pub fn payoff_matrix(&self) -> PayoffMatrix {
        PayoffMatrix {
            reward: self.benefit - self.cost,
            sucker: -self.cost,
            temptation: self.benefit,
            punishment: 0.0,
        }
    }

    /// Window of linear interaction strengths `b/(b+c) < k < (b+c)/(4c)` in
    /// which cooperators and defectors coexist, computed from `b` and `c`
    /// directly.
    pub fn coexistence_window(&self) -> (f64, f64) {
        let (b, c) = (self.benefit, self.cost);
        (b / (b + c), (b + c) / (4.0 * c))
    }
}

/// Maps a donation game onto the reduced game with `r = c / b`.
pub fn donation_to_reduced(d: &DonationGame) -> ReducedGame {
    ReducedGame {
        r: d.cost / d.benefit,
    }
}

impl From<DonationGame> for ReducedGame {
    fn from(d: DonationGame) -> Self {
        donation_to_reduced(&d)
    }
}

/// Interaction strength `f(x)` between cooperators and defectors.
///
/// `LinearInFrequency(k)` evaluates to `k x` without clamping, so it exceeds 1
/// whenever `k x > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InteractionStrength {
    /// `f(x) = p`, `0 <= p <= 1`.
    Constant(f64),
    /// `f(x) = k x`, `k > 0`.
    LinearInFrequency(f64),
}

impl InteractionStrength {
    pub fn constant(p: f64) -> Result<Self> {
        let s = Self::Constant(p);
        s.validate()?;
        Ok(s)
    }

    pub fn linear(k: f64) -> Result<Self> {
        let s = Self::LinearInFrequency(k);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant(p) if (0.0..=1.0).contains(&p) => Ok(()),
            Self::Constant(p) => Err(invalid("p", p, "must lie in [0, 1]")),
            Self::LinearInFrequency(k) if k.is_finite() && k > 0.0 => Ok(()),
            Self::LinearInFrequency(k) => Err(invalid("k", k, "must be positive and finite")),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Constant(p) => p,
            Self::LinearInFrequency(k) => k * x,
        }
    }

    /// The scalar parameter, `p` or `k`.
    pub fn parameter(&self) -> f64 {
        match *self {
            Self::Constant(p) | Self::LinearInFrequency(p) => p,
        }
    }
}

/// Cooperator frequency `x` in `[0, 1]`; defectors make up `1 - x`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PopulationState(f64);

impl PopulationState {
    pub fn new(x: f64) -> Result<Self> {
        Self::with_tolerance(x, DEFAULT_TOLERANCE)
    }

    /// Values within `eps` outside `[0, 1]` snap to the nearest boundary.
    pub fn with_tolerance(x: f64, eps: f64) -> Result<Self> {
        if !x.is_finite() || x < -eps || x > 1.0 + eps {
            return Err(invalid("x", x, "cooperator frequency must lie in [0, 1]"));
        }
        Ok(Self(x.clamp(0.0, 1.0)))
    }

    pub fn cooperators(&self) -> f64 {
        self.0
    }

    pub fn defectors(&self) -> f64 {
        1.0 - self.0
    }
}

/// Which payoff structure a model is built on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Game {
    Reduced(ReducedGame),
    General(PayoffMatrix),
}

impl Game {
    pub fn payoff_matrix(&self) -> PayoffMatrix {
        match self {
            Game::Reduced(g) => g.payoff_matrix(),
            Game::General(m) => *m,
        }
    }
}

impl From<ReducedGame> for Game {
    fn from(g: ReducedGame) -> Self {
        Game::Reduced(g)
    }
}

impl From<PayoffMatrix> for Game {
    fn from(m: PayoffMatrix) -> Self {
        Game::General(m)
    }
}

/// A game paired with an interaction strength. Owns the vector field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelInstance {
    game: Game,
    strength: InteractionStrength,
    tolerance: f64,
}

impl ModelInstance {
    pub fn new(game: impl Into<Game>, strength: InteractionStrength) -> Result<Self> {
        strength.validate()?;
        Ok(Self {
            game: game.into(),
            strength,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// Shorthand for the reduced game with parameter `r`.
    pub fn reduced(r: f64, strength: InteractionStrength) -> Result<Self> {
        Self::new(ReducedGame::new(r)?, strength)
    }

    pub fn with_tolerance(mut self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(invalid("tolerance", eps, "must be non-negative"));
        }
        self.tolerance = eps;
        Ok(self)
    }

    pub fn game(&self) -> Game {
        self.game
    }

    pub fn strength(&self) -> InteractionStrength {
        self.strength
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `r` of the reduced game, or an error for a general payoff matrix.
    pub fn reduced_r(&self) -> Result<f64> {
        match self.game {
            Game::Reduced(g) => Ok(g.r()),
            Game::General(_) => Err(Error::RequiresReducedGame),
        }
    }

    /// `(f_C, f_D)` at the given state.
    pub fn fitness_pair(&self, state: PopulationState) -> (f64, f64) {
        self.fitness_at(state.cooperators())
    }

    fn fitness_at(&self, x: f64) -> (f64, f64) {
        let m = self.game.payoff_matrix();
        let y = 1.0 - x;
        let f = self.strength.eval(x);
        let fc = x * m.reward + y * f * m.sucker;
        let fd = x * f * m.temptation + y * m.punishment;
        (fc, fd)
    }

    /// `phi = x f_C + (1 - x) f_D`.
    pub fn mean_fitness(&self, state: PopulationState) -> f64 {
        let x = state.cooperators();
        let (fc, fd) = self.fitness_at(x);
        x * fc + (1.0 - x) * fd
    }

    /// `g(x)` of the factored field `x (1 - x) g(x)`. Defined for any real `x`.
    pub fn growth_function(&self, x: f64) -> Result<f64> {
        let r = self.reduced_r()?;
        Ok(growth(self.strength, r, x))
    }

    /// `g'(x)`.
    pub fn growth_slope(&self, x: f64) -> Result<f64> {
        let r = self.reduced_r()?;
        Ok(growth_slope(self.strength, r, x))
    }

    /// `dx/dt`. Reduced games use the factored form, general matrices use
    /// `x (f_C - phi)`. Both vanish exactly at `x = 0` and `x = 1`.
    pub fn replicator_velocity(&self, x: f64) -> f64 {
        match self.game {
            Game::Reduced(g) => x * (1.0 - x) * growth(self.strength, g.r(), x),
            Game::General(_) => self.velocity_from_fitness(x),
        }
    }

    /// `x (f_C - phi)` evaluated from the fitness values, for any game.
    pub fn velocity_from_fitness(&self, x: f64) -> f64 {
        let (fc, fd) = self.fitness_at(x);
        let phi = x * fc + (1.0 - x) * fd;
        x * (fc - phi)
    }

    /// Exact derivative of `x (1 - x) g(x)`.
    pub fn velocity_derivative(&self, x: f64) -> Result<f64> {
        let r = self.reduced_r()?;
        let g = growth(self.strength, r, x);
        let dg = growth_slope(self.strength, r, x);
        Ok((1.0 - 2.0 * x) * g + x * (1.0 - x) * dg)
    }
}

fn growth(strength: InteractionStrength, r: f64, x: f64) -> f64 {
    let s = 1.0 + r;
    match strength {
        InteractionStrength::Constant(p) => s * (1.0 - p) * x - r,
        InteractionStrength::LinearInFrequency(k) => (-k * s * x + s) * x - r,
    }
}

fn growth_slope(strength: InteractionStrength, r: f64, x: f64) -> f64 {
    let s = 1.0 + r;
    match strength {
        InteractionStrength::Constant(p) => s * (1.0 - p),
        InteractionStrength::LinearInFrequency(k) => s * (1.0 - 2.0 * k * x),
    }
}
