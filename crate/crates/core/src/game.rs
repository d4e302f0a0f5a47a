//! The strategic-form NOMA-ALOHA game.
//!
//! Every user picks one of three actions per slot: transmit at high power,
//! transmit at low power, or stay silent. With successive interference
//! cancellation the receiver can decode one packet per power level, so a
//! packet sent at level `P` is recovered iff no other user chose `P` in the
//! same slot. A decoded packet earns the reward `W`; every transmission pays
//! the cost of its power level whether or not it gets through.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on probability constraints before a value is rejected.
pub const PROBABILITY_EPS: f64 = 1e-12;

pub const DEFAULT_COST_HIGH: f64 = 2.0;
pub const DEFAULT_COST_LOW: f64 = 1.0;

/// A pure action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "H")]
    High,
    #[serde(rename = "L")]
    Low,
    #[serde(rename = "0")]
    Silent,
}

impl Strategy {
    /// All actions in bimatrix order: H, L, 0.
    pub const ALL: [Strategy; 3] = [Strategy::High, Strategy::Low, Strategy::Silent];

    pub fn index(self) -> usize {
        match self {
            Strategy::High => 0,
            Strategy::Low => 1,
            Strategy::Silent => 2,
        }
    }

    pub fn transmits(self) -> bool {
        self != Strategy::Silent
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Strategy::High => "H",
            Strategy::Low => "L",
            Strategy::Silent => "0",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H" | "h" | "high" => Ok(Strategy::High),
            "L" | "l" | "low" => Ok(Strategy::Low),
            "0" | "silent" | "none" => Ok(Strategy::Silent),
            other => Err(Error::InvalidArgument(format!("unknown strategy '{other}'"))),
        }
    }
}

/// One game instance: `k` players, reward `w`, transmit costs `cost_high > cost_low > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGameConfig")]
pub struct GameConfig {
    pub k: usize,
    pub w: f64,
    pub cost_high: f64,
    pub cost_low: f64,
}

#[derive(Deserialize)]
struct RawGameConfig {
    k: usize,
    w: f64,
    cost_high: f64,
    cost_low: f64,
}

impl TryFrom<RawGameConfig> for GameConfig {
    type Error = Error;

    fn try_from(raw: RawGameConfig) -> Result<Self> {
        GameConfig::with_costs(raw.k, raw.w, raw.cost_high, raw.cost_low)
    }
}

impl GameConfig {
    /// Game with the default costs C(H) = 2, C(L) = 1.
    pub fn new(k: usize, w: f64) -> Result<Self> {
        Self::with_costs(k, w, DEFAULT_COST_HIGH, DEFAULT_COST_LOW)
    }

    pub fn with_costs(k: usize, w: f64, cost_high: f64, cost_low: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidConfig(format!("K must be at least 2, got {k}")));
        }
        if k > i32::MAX as usize {
            return Err(Error::InvalidConfig(format!("K = {k} is too large")));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "W must be finite and non-negative, got {w}"
            )));
        }
        if !(cost_low.is_finite() && cost_high.is_finite()) {
            return Err(Error::InvalidConfig("costs must be finite".into()));
        }
        if !(cost_low > 0.0 && cost_high > cost_low) {
            return Err(Error::InvalidConfig(format!(
                "costs must satisfy C(H) > C(L) > 0, got C(H) = {cost_high}, C(L) = {cost_low}"
            )));
        }
        Ok(Self {
            k,
            w,
            cost_high,
            cost_low,
        })
    }

    /// Same game with a different reward.
    pub fn with_reward(&self, w: f64) -> Result<Self> {
        Self::with_costs(self.k, w, self.cost_high, self.cost_low)
    }

    /// Same game with a different number of players.
    pub fn with_players(&self, k: usize) -> Result<Self> {
        Self::with_costs(k, self.w, self.cost_high, self.cost_low)
    }

    pub fn cost(&self, s: Strategy) -> f64 {
        match s {
            Strategy::High => self.cost_high,
            Strategy::Low => self.cost_low,
            Strategy::Silent => 0.0,
        }
    }

    /// Number of opponents, as a `powi` exponent.
    pub(crate) fn opponents(&self) -> i32 {
        (self.k - 1) as i32
    }
}

/// A symmetric mixed strategy `(a, b, 1 - a - b)` over (H, L, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixedStrategy")]
pub struct MixedStrategy {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawMixedStrategy {
    a: f64,
    b: f64,
}

impl TryFrom<RawMixedStrategy> for MixedStrategy {
    type Error = Error;

    fn try_from(raw: RawMixedStrategy) -> Result<Self> {
        MixedStrategy::new(raw.a, raw.b)
    }
}

impl MixedStrategy {
    /// Builds `(a, b, 1 - a - b)`. Round-off within [`PROBABILITY_EPS`] of the
    /// simplex is clamped back onto it; anything further out is rejected.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidProbability {
                a,
                b,
                reason: "probabilities must be finite",
            });
        }
        if a < -PROBABILITY_EPS || b < -PROBABILITY_EPS {
            return Err(Error::InvalidProbability {
                a,
                b,
                reason: "probabilities must be non-negative",
            });
        }
        if a + b > 1.0 + PROBABILITY_EPS {
            return Err(Error::InvalidProbability {
                a,
                b,
                reason: "a + b must not exceed 1",
            });
        }
        let a = a.clamp(0.0, 1.0);
        let mut b = b.clamp(0.0, 1.0);
        if a + b > 1.0 {
            b = 1.0 - a;
        }
        Ok(Self { a, b })
    }

    /// Degenerate mixed strategy that always plays `s`.
    pub fn pure(s: Strategy) -> Self {
        match s {
            Strategy::High => Self { a: 1.0, b: 0.0 },
            Strategy::Low => Self { a: 0.0, b: 1.0 },
            Strategy::Silent => Self { a: 0.0, b: 0.0 },
        }
    }

    pub fn silent() -> Self {
        Self::pure(Strategy::Silent)
    }

    /// Probability of H.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Probability of L.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Probability of not transmitting.
    pub fn p0(&self) -> f64 {
        (1.0 - self.a - self.b).max(0.0)
    }

    pub fn prob(&self, s: Strategy) -> f64 {
        match s {
            Strategy::High => self.a,
            Strategy::Low => self.b,
            Strategy::Silent => self.p0(),
        }
    }

    /// Actions played with probability above [`PROBABILITY_EPS`].
    pub fn support(&self) -> Vec<Strategy> {
        Strategy::ALL
            .into_iter()
            .filter(|&s| self.prob(s) > PROBABILITY_EPS)
            .collect()
    }

    /// Maps a uniform draw in `[0, 1)` to an action.
    pub fn sample_with(&self, u: f64) -> Strategy {
        if u < self.a {
            Strategy::High
        } else if u < self.a + self.b {
            Strategy::Low
        } else {
            Strategy::Silent
        }
    }
}

impl From<Strategy> for MixedStrategy {
    fn from(s: Strategy) -> Self {
        MixedStrategy::pure(s)
    }
}

/// Expected payoff of each pure action against a symmetric opponent profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurePayoffs {
    #[serde(rename = "H")]
    pub high: f64,
    #[serde(rename = "L")]
    pub low: f64,
    #[serde(rename = "0")]
    pub silent: f64,
}

impl PurePayoffs {
    pub fn get(&self, s: Strategy) -> f64 {
        match s {
            Strategy::High => self.high,
            Strategy::Low => self.low,
            Strategy::Silent => self.silent,
        }
    }
}

/// Two-player payoff table; entry `(i, j)` holds (row payoff, column payoff).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bimatrix {
    pub entries: [[(f64, f64); 3]; 3],
}

impl Bimatrix {
    pub fn get(&self, row: Strategy, col: Strategy) -> (f64, f64) {
        self.entries[row.index()][col.index()]
    }

    /// Row player's payoff matrix.
    pub fn row_payoffs(&self) -> [[f64; 3]; 3] {
        self.entries.map(|row| row.map(|(r, _)| r))
    }
}

fn check_arity(others: &[Strategy], config: &GameConfig) -> Result<()> {
    if others.len() != config.k - 1 {
        return Err(Error::ArityMismatch {
            expected: config.k - 1,
            got: others.len(),
        });
    }
    Ok(())
}

/// `W` if `s` transmits on a power level nobody else in `others` used, else 0.
pub fn reward(s: Strategy, others: &[Strategy], config: &GameConfig) -> Result<f64> {
    check_arity(others, config)?;
    if s.transmits() && !others.contains(&s) {
        Ok(config.w)
    } else {
        Ok(0.0)
    }
}

/// Reward minus transmit cost.
pub fn payoff(s: Strategy, others: &[Strategy], config: &GameConfig) -> Result<f64> {
    Ok(reward(s, others, config)? - config.cost(s))
}

pub fn bimatrix(config: &GameConfig) -> Result<Bimatrix> {
    if config.k != 2 {
        return Err(Error::UnsupportedDimension { k: config.k });
    }
    let mut entries = [[(0.0, 0.0); 3]; 3];
    for row in Strategy::ALL {
        for col in Strategy::ALL {
            entries[row.index()][col.index()] =
                (payoff(row, &[col], config)?, payoff(col, &[row], config)?);
        }
    }
    Ok(Bimatrix { entries })
}

/// Closed-form `U(H)`, `U(L)`, `U(0)` when all `K - 1` opponents play `others`.
pub fn pure_payoffs(others: &MixedStrategy, config: &GameConfig) -> PurePayoffs {
    let n = config.opponents();
    PurePayoffs {
        high: config.w * (1.0 - others.a()).powi(n) - config.cost_high,
        low: config.w * (1.0 - others.b()).powi(n) - config.cost_low,
        silent: 0.0,
    }
}

/// Exact expected payoff of `own` (pure or mixed) against `K - 1` opponents
/// all playing `others`.
pub fn expected_payoff(
    own: impl Into<MixedStrategy>,
    others: &MixedStrategy,
    config: &GameConfig,
) -> f64 {
    let own = own.into();
    let u = pure_payoffs(others, config);
    own.a() * u.high + own.b() * u.low
}

/// Mean number of packets decoded per slot when every user plays `profile`.
pub fn expected_throughput(profile: &MixedStrategy, config: &GameConfig) -> f64 {
    let n = config.opponents();
    let (a, b) = (profile.a(), profile.b());
    config.k as f64 * (a * (1.0 - a).powi(n) + b * (1.0 - b).powi(n))
}
