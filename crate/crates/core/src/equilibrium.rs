//! Pure and symmetric mixed Nash equilibria of the NOMA-ALOHA game.
//!
//! The symmetric mixed equilibrium is piecewise in the reward `W`:
//!
//! | regime         | range             | (a, b)                                            |
//! |----------------|-------------------|---------------------------------------------------|
//! | `NoTransmit`   | `W < c_L`         | `(0, 0)`                                          |
//! | `LowOnly`      | `c_L <= W < c_H`  | `(0, 1 - (c_L/W)^(1/(K-1)))`                      |
//! | `Interior`     | `c_H <= W < W*`   | `(1 - (c_H/W)^(1/(K-1)), 1 - (c_L/W)^(1/(K-1)))`  |
//! | `FullTransmit` | `W >= W*`         | `(1 - b, b)`, `W b^(K-1) - W (1-b)^(K-1) = c_H - c_L` |
//!
//! Every branch comes from indifference between the actions in its support;
//! `W*` is the reward at which the interior branch stops using the silent action.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{expected_payoff, pure_payoffs, GameConfig, MixedStrategy, PurePayoffs, Strategy};
use crate::numeric::Bisection;

/// Profiles with more than this many players are not enumerated (3^12 = 531441).
pub const MAX_ENUMERATION_PLAYERS: usize = 12;

/// Slack for weak inequalities between pure payoffs.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    NoTransmit,
    LowOnly,
    Interior,
    FullTransmit,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::NoTransmit => "NoTransmit",
            Regime::LowOnly => "LowOnly",
            Regime::Interior => "Interior",
            Regime::FullTransmit => "FullTransmit",
        }
    }

    /// Regime that owns reward `config.w`. Boundaries belong to the upper regime.
    pub fn of(config: &GameConfig) -> Regime {
        let w = config.w;
        if w < config.cost_low {
            Regime::NoTransmit
        } else if w < config.cost_high {
            Regime::LowOnly
        } else if w < w_star(config) {
            Regime::Interior
        } else {
            Regime::FullTransmit
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NESolution {
    pub strategy: MixedStrategy,
    pub regime: Regime,
    /// `U(H)`, `U(L)`, `U(0)` against `K - 1` copies of `strategy`.
    pub payoffs: PurePayoffs,
    pub equilibrium_payoff: f64,
    /// Largest indifference violation over the support, or advantage of an unused action.
    pub residual: f64,
}

/// A pure profile `(s_1, ..., s_K)`.
pub type PureProfile = Vec<Strategy>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureNEList {
    pub profiles: Vec<PureProfile>,
}

impl PureNEList {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn contains(&self, profile: &[Strategy]) -> bool {
        self.profiles.iter().any(|p| p == profile)
    }
}

/// Every pure Nash equilibrium, by checking all unilateral deviations over all
/// `3^K` profiles. Payoff ties count as equilibria.
pub fn pure_nash_equilibria(config: &GameConfig) -> Result<PureNEList> {
    let k = config.k;
    if k > MAX_ENUMERATION_PLAYERS {
        return Err(Error::EnumerationLimit {
            k,
            max: MAX_ENUMERATION_PLAYERS,
        });
    }
    let total = 3usize.pow(k as u32);
    let mut profiles = Vec::new();
    let mut profile = vec![Strategy::High; k];

    for code in 0..total {
        let mut rem = code;
        for slot in profile.iter_mut().rev() {
            *slot = Strategy::ALL[rem % 3];
            rem /= 3;
        }
        if is_pure_equilibrium(&profile, config) {
            profiles.push(profile.clone());
        }
    }
    Ok(PureNEList { profiles })
}

/// Whether no player can strictly gain by a unilateral deviation from `profile`.
pub fn is_pure_equilibrium(profile: &[Strategy], config: &GameConfig) -> bool {
    let mut count = [0usize; 3];
    for s in profile {
        count[s.index()] += 1;
    }
    // payoff of playing `s` when the others' action counts are `others`
    let value = |s: Strategy, others: &[usize; 3]| {
        let won = s.transmits() && others[s.index()] == 0;
        (if won { config.w } else { 0.0 }) - config.cost(s)
    };
    profile.iter().all(|&own| {
        let mut others = count;
        others[own.index()] -= 1;
        let current = value(own, &others);
        Strategy::ALL
            .into_iter()
            .all(|dev| value(dev, &others) <= current + TIE_TOL)
    })
}

/// Reward above which the symmetric equilibrium never stays silent: the `W`
/// solving `(c_H/W)^(1/(K-1)) + (c_L/W)^(1/(K-1)) = 1`.
pub fn w_star(config: &GameConfig) -> f64 {
    let n = (config.k - 1) as f64;
    let m = 1.0 / n;
    (config.cost_high.powf(m) + config.cost_low.powf(m)).powf(n)
}

/// Root `b` in `[1/2, 1]` of `W b^(K-1) - W (1-b)^(K-1) = c_H - c_L`, the
/// full-transmit indifference condition with `a = 1 - b`.
pub fn solve_full_transmit_root(config: &GameConfig) -> Result<f64> {
    let ws = w_star(config);
    if config.w < ws {
        return Err(Error::OutOfRegime { w: config.w, w_star: ws });
    }
    let n = config.opponents();
    let (w, gap) = (config.w, config.cost_high - config.cost_low);
    let h = |b: f64| w * b.powi(n) - w * (1.0 - b).powi(n) - gap;
    Ok(Bisection::default().solve(h, 0.5, 1.0)?.x)
}

fn level_probability(cost: f64, config: &GameConfig) -> f64 {
    if config.k == 2 {
        (config.w - cost) / config.w
    } else {
        1.0 - (cost / config.w).powf(1.0 / (config.k - 1) as f64)
    }
}

/// Evaluates one regime's formula at `config.w`, whether or not `w` lies in
/// that regime. Fails when the formula leaves the simplex there.
pub fn branch_strategy(regime: Regime, config: &GameConfig) -> Result<MixedStrategy> {
    match regime {
        Regime::NoTransmit => Ok(MixedStrategy::silent()),
        Regime::LowOnly => MixedStrategy::new(0.0, level_probability(config.cost_low, config)),
        Regime::Interior => MixedStrategy::new(
            level_probability(config.cost_high, config),
            level_probability(config.cost_low, config),
        ),
        Regime::FullTransmit => {
            let b = solve_full_transmit_root(config)?;
            MixedStrategy::new(1.0 - b, b)
        }
    }
}

/// The symmetric mixed equilibrium for any reward.
pub fn mixed_ne(config: &GameConfig) -> NESolution {
    let regime = Regime::of(config);
    let strategy = branch_strategy(regime, config)
        .expect("regime formulas stay on the simplex inside their own regime");
    solution_for(strategy, regime, config)
}

fn solution_for(strategy: MixedStrategy, regime: Regime, config: &GameConfig) -> NESolution {
    let report = verify_epsilon_ne(&strategy, config, f64::MIN_POSITIVE)
        .expect("positive epsilon");
    NESolution {
        strategy,
        regime,
        payoffs: report.payoffs,
        equilibrium_payoff: report.support_payoff,
        residual: report.support_spread.max(report.unused_advantage.max(0.0)),
    }
}

/// Outcome of checking a symmetric profile for the ε-Nash property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonNeReport {
    pub strategy: MixedStrategy,
    pub payoffs: PurePayoffs,
    pub support: Vec<Strategy>,
    /// Payoff earned by the profile itself; 0 exactly when silence is in the support.
    pub support_payoff: f64,
    /// Largest gap between two support actions' payoffs.
    pub support_spread: f64,
    /// Best unused action's payoff minus `support_payoff` (negative when none helps).
    pub unused_advantage: f64,
    pub epsilon: f64,
    pub pass: bool,
}

/// Checks whether `K` copies of `strategy` form an ε-Nash equilibrium.
pub fn verify_epsilon_ne(
    strategy: &MixedStrategy,
    config: &GameConfig,
    epsilon: f64,
) -> Result<EpsilonNeReport> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let payoffs = pure_payoffs(strategy, config);
    let support = strategy.support();

    let support_payoff = if support.contains(&Strategy::Silent) {
        payoffs.silent
    } else {
        expected_payoff(*strategy, strategy, config) / (strategy.a() + strategy.b())
    };

    let (lo, hi) = support
        .iter()
        .map(|&s| payoffs.get(s))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| {
            (lo.min(u), hi.max(u))
        });
    let support_spread = hi - lo;

    let unused_advantage = Strategy::ALL
        .into_iter()
        .filter(|s| !support.contains(s))
        .map(|s| payoffs.get(s) - support_payoff)
        .fold(f64::NEG_INFINITY, f64::max);

    let pass = support_spread <= epsilon && unused_advantage <= epsilon;
    Ok(EpsilonNeReport {
        strategy: *strategy,
        payoffs,
        support,
        support_payoff,
        support_spread,
        unused_advantage,
        epsilon,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Strategy::*;

    fn cfg(k: usize, w: f64) -> GameConfig {
        GameConfig::new(k, w).unwrap()
    }

    fn same_set(got: &PureNEList, want: &[&[Strategy]]) -> bool {
        got.len() == want.len() && want.iter().all(|p| got.contains(p))
    }

    #[test]
    fn pure_ne_examples() {
        let low = pure_nash_equilibria(&cfg(2, 0.5)).unwrap();
        assert!(same_set(&low, &[&[Silent, Silent]]));
        let mid = pure_nash_equilibria(&cfg(2, 1.5)).unwrap();
        assert!(same_set(&mid, &[&[Silent, Low], &[Low, Silent]]));
        let high = pure_nash_equilibria(&cfg(2, 5.0)).unwrap();
        assert!(same_set(&high, &[&[High, Low], &[Low, High]]));
    }

    #[test]
    fn pure_ne_limit() {
        assert!(pure_nash_equilibria(&cfg(12, 5.0)).is_ok());
        assert_eq!(
            pure_nash_equilibria(&cfg(13, 5.0)),
            Err(Error::EnumerationLimit { k: 13, max: 12 })
        );
    }

    #[test]
    fn pure_ne_k3_high_reward() {
        // one user per level, the rest silent
        let list = pure_nash_equilibria(&cfg(3, 5.0)).unwrap();
        assert_eq!(list.len(), 6);
        for p in &list.profiles {
            let mut sorted = p.clone();
            sorted.sort();
            assert_eq!(sorted, vec![High, Low, Silent]);
        }
    }

    #[test]
    fn w_star_examples() {
        assert_eq!(w_star(&cfg(2, 1.0)), 3.0);
        assert!((w_star(&cfg(5, 1.0)) - 22.969).abs() < 1e-3);
        let c = GameConfig::with_costs(2, 1.0, 4.0, 2.0).unwrap();
        assert!((w_star(&c) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_ne_examples() {
        let s = mixed_ne(&cfg(2, 2.5));
        assert_eq!(s.regime, Regime::Interior);
        assert!((s.strategy.a() - 0.2).abs() < 1e-12 && (s.strategy.b() - 0.6).abs() < 1e-12);

        let s = mixed_ne(&cfg(2, 5.0));
        assert_eq!(s.regime, Regime::FullTransmit);
        assert!((s.strategy.a() - 0.4).abs() < 1e-12 && (s.strategy.b() - 0.6).abs() < 1e-12);
        assert!((s.equilibrium_payoff - 1.0).abs() < 1e-12);

        let s = mixed_ne(&cfg(5, 10.0));
        assert_eq!(s.regime, Regime::Interior);
        assert!((s.strategy.a() - 0.331_259_695_023_578).abs() < 1e-12);
        assert!((s.strategy.b() - 0.437_658_674_809_651).abs() < 1e-12);
        assert!((s.strategy.p0() - 0.231_081_630_166_771).abs() < 1e-12);
        assert!(s.payoffs.high.abs() < 1e-9 && s.payoffs.low.abs() < 1e-9);
        assert_eq!(s.equilibrium_payoff, 0.0);

        for k in [2, 3, 7] {
            let s = mixed_ne(&cfg(k, 0.5));
            assert_eq!(s.regime, Regime::NoTransmit);
            assert_eq!(s.strategy, MixedStrategy::silent());
        }
    }

    #[test]
    fn boundaries_belong_to_upper_regime() {
        assert_eq!(Regime::of(&cfg(2, 1.0)), Regime::LowOnly);
        assert_eq!(Regime::of(&cfg(2, 2.0)), Regime::Interior);
        assert_eq!(Regime::of(&cfg(2, 3.0)), Regime::FullTransmit);
        assert_eq!(Regime::of(&cfg(2, 0.0)), Regime::NoTransmit);
    }

    #[test]
    fn root_examples() {
        assert!((solve_full_transmit_root(&cfg(2, 5.0)).unwrap() - 0.6).abs() < 1e-12);
        let b = solve_full_transmit_root(&cfg(5, 30.0)).unwrap();
        assert!((b - 0.533_187_126_077_144_6).abs() < 1e-10);
        let mut prev = 1.0;
        for w in [10.0, 100.0, 1e3, 1e5] {
            let b = solve_full_transmit_root(&cfg(2, w)).unwrap();
            assert!(b > 0.5 && b < prev);
            prev = b;
        }
        assert!(prev - 0.5 < 1e-4);
    }

    #[test]
    fn root_rejects_low_reward() {
        assert!(matches!(
            solve_full_transmit_root(&cfg(5, 10.0)),
            Err(Error::OutOfRegime { .. })
        ));
    }

    #[test]
    fn verify_examples() {
        let c = cfg(5, 10.0);
        assert!(verify_epsilon_ne(&mixed_ne(&c).strategy, &c, 1e-9).unwrap().pass);

        let half = MixedStrategy::new(0.5, 0.5).unwrap();
        let r = verify_epsilon_ne(&half, &cfg(2, 10.0), 1e-9).unwrap();
        assert!(!r.pass);
        assert!((r.payoffs.high - 3.0).abs() < 1e-15 && (r.payoffs.low - 4.0).abs() < 1e-15);
        assert!((r.support_spread - 1.0).abs() < 1e-15);

        let r = verify_epsilon_ne(&MixedStrategy::silent(), &cfg(2, 0.5), 1e-9).unwrap();
        assert!(r.pass);
        assert!(r.unused_advantage < 0.0);
    }

    #[test]
    fn verify_rejects_nonpositive_epsilon() {
        let c = cfg(2, 5.0);
        assert!(verify_epsilon_ne(&MixedStrategy::silent(), &c, 0.0).is_err());
        assert!(verify_epsilon_ne(&MixedStrategy::silent(), &c, f64::NAN).is_err());
    }

    #[test]
    fn residual_is_tiny_in_closed_form_regimes() {
        for (k, w) in [(2, 1.5), (2, 2.5), (3, 4.0), (5, 10.0), (10, 50.0)] {
            let s = mixed_ne(&cfg(k, w));
            assert!(s.residual < 1e-9, "k={k} w={w} residual={}", s.residual);
        }
    }
}
