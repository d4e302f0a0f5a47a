//! Social optimum: the symmetric strategy maximizing per-user average payoff,
//! and the price of anarchy of the mixed equilibrium against it.

use serde::{Deserialize, Serialize};

use crate::equilibrium::mixed_ne;
use crate::game::{GameConfig, MixedStrategy};
use crate::numeric::Bisection;

/// Grid resolution used to cross-check the ascent for `K > 2`.
pub const GRID_RESOLUTION: f64 = 1e-3;
pub const ASCENT_STEP_TOL: f64 = 1e-10;
const ASCENT_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocialOptimum {
    pub strategy: MixedStrategy,
    pub average_payoff: f64,
    pub ne_payoff: f64,
    /// `ne_payoff / average_payoff`; `None` when the optimum earns nothing.
    pub poa: Option<f64>,
    /// True for `K > 2`, where the optimum is an extension of the two-user model.
    pub extension: bool,
}

/// Per-user expected payoff when every user plays `strategy`:
/// `W [a (1-a)^(K-1) + b (1-b)^(K-1)] - c_H a - c_L b`.
pub fn average_payoff(strategy: &MixedStrategy, config: &GameConfig) -> f64 {
    level_value(strategy.a(), config.cost_high, config)
        + level_value(strategy.b(), config.cost_low, config)
}

/// Partial derivatives of [`average_payoff`] in `a` and `b`.
pub fn average_payoff_gradient(strategy: &MixedStrategy, config: &GameConfig) -> (f64, f64) {
    (
        level_slope(strategy.a(), config.cost_high, config),
        level_slope(strategy.b(), config.cost_low, config),
    )
}

// The objective splits into one term per power level: g(x) = W x (1-x)^(K-1) - c x.
fn level_value(x: f64, cost: f64, config: &GameConfig) -> f64 {
    config.w * x * (1.0 - x).powi(config.opponents()) - cost * x
}

// g'(x) = W (1-x)^(K-2) (1 - K x) - c
fn level_slope(x: f64, cost: f64, config: &GameConfig) -> f64 {
    let k = config.k as f64;
    config.w * (1.0 - x).powi(config.opponents() - 1) * (1.0 - k * x) - cost
}

/// Maximizer of g on `[0, upper]`.
///
/// g' is strictly decreasing on `[0, 1/K]` and negative beyond, so g is
/// unimodal and the constrained maximizer is its stationary point clipped to
/// the interval.
fn level_argmax(cost: f64, upper: f64, config: &GameConfig) -> f64 {
    if upper <= 0.0 || level_slope(0.0, cost, config) <= 0.0 {
        return 0.0;
    }
    let top = 1.0 / config.k as f64;
    let x = Bisection::default()
        .solve(|x| level_slope(x, cost, config), 0.0, top)
        .map(|r| r.x)
        .unwrap_or(0.0);
    x.min(upper)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentResult {
    pub strategy: MixedStrategy,
    pub value: f64,
    pub sweeps: usize,
}

/// Projected coordinate ascent on the simplex `{a, b >= 0, a + b <= 1}`.
///
/// Each sweep maximizes exactly over `a` with `b` fixed, then over `b` with
/// `a` fixed; it stops once neither coordinate moves by more than
/// [`ASCENT_STEP_TOL`].
pub fn projected_coordinate_ascent(config: &GameConfig, start: MixedStrategy) -> AscentResult {
    let (mut a, mut b) = (start.a(), start.b());
    let mut sweeps = 0;
    while sweeps < ASCENT_MAX_SWEEPS {
        sweeps += 1;
        let next_a = level_argmax(config.cost_high, 1.0 - b, config);
        let next_b = level_argmax(config.cost_low, 1.0 - next_a, config);
        let step = (next_a - a).abs().max((next_b - b).abs());
        a = next_a;
        b = next_b;
        if step <= ASCENT_STEP_TOL {
            break;
        }
    }
    let strategy = MixedStrategy::new(a, b).expect("ascent iterates stay feasible");
    AscentResult {
        strategy,
        value: average_payoff(&strategy, config),
        sweeps,
    }
}

/// Exhaustive search over the simplex on a lattice of spacing `resolution`.
pub fn grid_search(config: &GameConfig, resolution: f64) -> (MixedStrategy, f64) {
    let n = (1.0 / resolution).round().max(1.0) as usize;
    let mut best = (MixedStrategy::silent(), 0.0);
    for i in 0..=n {
        for j in 0..=(n - i) {
            let s = MixedStrategy::new(i as f64 / n as f64, j as f64 / n as f64)
                .expect("lattice point inside simplex");
            let v = average_payoff(&s, config);
            if v > best.1 {
                best = (s, v);
            }
        }
    }
    best
}

/// Stationary point of the two-user objective, clipped at zero.
fn two_user_closed_form(config: &GameConfig) -> MixedStrategy {
    if config.w == 0.0 {
        return MixedStrategy::silent();
    }
    let a = ((config.w - config.cost_high) / (2.0 * config.w)).max(0.0);
    let b = ((config.w - config.cost_low) / (2.0 * config.w)).max(0.0);
    MixedStrategy::new(a, b).expect("a + b < 1 for positive costs")
}

/// Global maximizer of the average payoff, with the equilibrium comparison.
pub fn maximize_average_payoff(config: &GameConfig) -> SocialOptimum {
    let strategy = if config.k == 2 {
        two_user_closed_form(config)
    } else {
        let start = MixedStrategy::new(0.25, 0.25).expect("feasible start");
        let mut best = projected_coordinate_ascent(config, start);
        let (grid_best, grid_value) = grid_search(config, GRID_RESOLUTION);
        if grid_value > best.value {
            let restarted = projected_coordinate_ascent(config, grid_best);
            if restarted.value > best.value {
                best = restarted;
            }
            if grid_value > best.value {
                best.strategy = grid_best;
                best.value = grid_value;
            }
        }
        best.strategy
    };

    let value = average_payoff(&strategy, config);
    let ne_payoff = mixed_ne(config).equilibrium_payoff;
    SocialOptimum {
        strategy,
        average_payoff: value,
        ne_payoff,
        poa: (value > 0.0).then(|| ne_payoff / value),
        extension: config.k > 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, w: f64) -> GameConfig {
        GameConfig::new(k, w).unwrap()
    }

    #[test]
    fn average_payoff_examples() {
        let s = MixedStrategy::new(0.3, 0.4).unwrap();
        assert!((average_payoff(&s, &cfg(2, 5.0)) - 1.25).abs() < 1e-14);
        assert_eq!(average_payoff(&MixedStrategy::silent(), &cfg(4, 7.0)), 0.0);
        let half = MixedStrategy::new(0.5, 0.5).unwrap();
        let w = 1e4;
        assert!((average_payoff(&half, &cfg(2, w)) - (w / 2.0 - 1.5)).abs() < 1e-9);
    }

    #[test]
    fn optimum_examples() {
        let opt = maximize_average_payoff(&cfg(2, 5.0));
        assert!((opt.strategy.a() - 0.3).abs() < 1e-12);
        assert!((opt.strategy.b() - 0.4).abs() < 1e-12);
        assert!((opt.average_payoff - 1.25).abs() < 1e-12);
        assert!((opt.poa.unwrap() - 0.8).abs() < 1e-12);
        assert!(!opt.extension);

        let opt = maximize_average_payoff(&cfg(2, 0.5));
        assert_eq!(opt.strategy, MixedStrategy::silent());
        assert_eq!(opt.average_payoff, 0.0);
        assert_eq!(opt.poa, None);
    }

    #[test]
    fn ascent_matches_closed_form_k2() {
        for w in [1.5, 2.5, 5.0, 12.0, 80.0] {
            let c = cfg(2, w);
            let ascent = projected_coordinate_ascent(&c, MixedStrategy::new(0.25, 0.25).unwrap());
            let closed = two_user_closed_form(&c);
            assert!((ascent.strategy.a() - closed.a()).abs() < 1e-8);
            assert!((ascent.strategy.b() - closed.b()).abs() < 1e-8);
        }
    }

    #[test]
    fn ascent_beats_grid_for_many_users() {
        for (k, w) in [(3, 4.0), (5, 10.0), (8, 30.0)] {
            let c = cfg(k, w);
            let opt = maximize_average_payoff(&c);
            let (_, grid_value) = grid_search(&c, GRID_RESOLUTION);
            assert!(opt.average_payoff >= grid_value - 1e-12);
            assert!(opt.extension);
        }
    }

    #[test]
    fn gradient_vanishes_at_interior_optimum() {
        let c = cfg(5, 10.0);
        let opt = maximize_average_payoff(&c);
        let (ga, gb) = average_payoff_gradient(&opt.strategy, &c);
        assert!(ga.abs() < 1e-8 && gb.abs() < 1e-8);
    }
}
