//! Seeded slotted-channel Monte Carlo simulation.
//!
//! In each slot every user independently draws H, L or 0 from its own mixed
//! strategy. The receiver decodes the H level iff exactly one user sent at
//! H, and likewise for L. Replications run on independent ChaCha streams
//! derived from one root seed, so a report depends only on `(config, seed)`
//! and never on how many worker threads executed it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{expected_payoff, GameConfig, MixedStrategy, Strategy};

pub const DEFAULT_REPLICATIONS: u32 = 30;
pub const DEFAULT_SLOTS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0x5EED;
/// Minimum slots for [`empirical_payoff_check`].
pub const MIN_CHECK_SLOTS: u64 = 10_000;

const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profiles {
    /// Every user plays the same strategy.
    Symmetric(MixedStrategy),
    /// One strategy per user.
    PerUser(Vec<MixedStrategy>),
}

impl Profiles {
    fn for_user(&self, user: usize) -> &MixedStrategy {
        match self {
            Profiles::Symmetric(s) => s,
            Profiles::PerUser(list) => &list[user],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub game: GameConfig,
    pub profiles: Profiles,
    /// Slots per replication.
    pub slots: u64,
    pub seed: u64,
    pub replications: u32,
}

impl SimConfig {
    pub fn symmetric(game: GameConfig, strategy: MixedStrategy) -> Self {
        Self {
            game,
            profiles: Profiles::Symmetric(strategy),
            slots: DEFAULT_SLOTS,
            seed: DEFAULT_SEED,
            replications: DEFAULT_REPLICATIONS,
        }
    }

    pub fn slots(mut self, slots: u64) -> Self {
        self.slots = slots;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn replications(mut self, replications: u32) -> Self {
        self.replications = replications;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots == 0 {
            return Err(Error::InvalidArgument("slots must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidArgument("replications must be at least 1".into()));
        }
        if let Profiles::PerUser(list) = &self.profiles {
            if list.len() != self.game.k {
                return Err(Error::InvalidArgument(format!(
                    "expected 1 or {} per-user profiles, got {}",
                    self.game.k,
                    list.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Decoded packets per slot.
    pub mean_throughput: f64,
    pub throughput_std_error: f64,
    pub throughput_ci95: f64,
    /// Decoded packets per slot on the (H, L) levels.
    pub per_level_success: (f64, f64),
    /// Fraction of slots where some power level carried two or more packets.
    pub collision_rate: f64,
    pub mean_payoff_per_user: Vec<f64>,
    pub payoff_ci95_per_user: Vec<f64>,
    /// Payoff averaged over users.
    pub mean_payoff: f64,
    pub mean_payoff_std_error: f64,
    pub seed_used: u64,
    pub slots: u64,
    pub replications: u32,
}

/// What the receiver makes of one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotOutcome {
    pub high_decoded: bool,
    pub low_decoded: bool,
    pub collision: bool,
    pub transmitters: usize,
}

impl SlotOutcome {
    pub fn decoded(&self) -> usize {
        self.high_decoded as usize + self.low_decoded as usize
    }
}

/// Resolves one slot given every user's action.
pub fn resolve_slot(actions: &[Strategy]) -> SlotOutcome {
    let (mut high, mut low) = (0usize, 0usize);
    for a in actions {
        match a {
            Strategy::High => high += 1,
            Strategy::Low => low += 1,
            Strategy::Silent => {}
        }
    }
    SlotOutcome {
        high_decoded: high == 1,
        low_decoded: low == 1,
        collision: high >= 2 || low >= 2,
        transmitters: high + low,
    }
}

/// Per-user action/outcome counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct UserTally {
    high_won: u64,
    high_lost: u64,
    low_won: u64,
    low_lost: u64,
}

impl UserTally {
    fn payoff_sum(&self, game: &GameConfig) -> f64 {
        let won = (self.high_won + self.low_won) as f64;
        let high = (self.high_won + self.high_lost) as f64;
        let low = (self.low_won + self.low_lost) as f64;
        game.w * won - game.cost_high * high - game.cost_low * low
    }

    fn payoff_sq_sum(&self, game: &GameConfig) -> f64 {
        let sq = |x: f64| x * x;
        self.high_won as f64 * sq(game.w - game.cost_high)
            + self.high_lost as f64 * sq(game.cost_high)
            + self.low_won as f64 * sq(game.w - game.cost_low)
            + self.low_lost as f64 * sq(game.cost_low)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ReplicationTally {
    high_successes: u64,
    low_successes: u64,
    collision_slots: u64,
    decoded_sq: u64,
    users: Vec<UserTally>,
}

fn run_replication(config: &SimConfig, index: u32) -> ReplicationTally {
    let k = config.game.k;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);

    let strategies: Vec<MixedStrategy> =
        (0..k).map(|u| *config.profiles.for_user(u)).collect();
    let mut actions = vec![Strategy::Silent; k];
    let mut tally = ReplicationTally {
        high_successes: 0,
        low_successes: 0,
        collision_slots: 0,
        decoded_sq: 0,
        users: vec![UserTally::default(); k],
    };

    for _ in 0..config.slots {
        for (action, strategy) in actions.iter_mut().zip(&strategies) {
            *action = strategy.sample_with(rng.random::<f64>());
        }
        let outcome = resolve_slot(&actions);
        tally.high_successes += outcome.high_decoded as u64;
        tally.low_successes += outcome.low_decoded as u64;
        tally.collision_slots += outcome.collision as u64;
        tally.decoded_sq += (outcome.decoded() * outcome.decoded()) as u64;

        for (user, action) in tally.users.iter_mut().zip(&actions) {
            match action {
                Strategy::High if outcome.high_decoded => user.high_won += 1,
                Strategy::High => user.high_lost += 1,
                Strategy::Low if outcome.low_decoded => user.low_won += 1,
                Strategy::Low => user.low_lost += 1,
                Strategy::Silent => {}
            }
        }
    }
    tally
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean of `xs`, treating each entry as one observation.
fn std_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Standard error of a per-slot mean from i.i.d. slot sums and squared sums.
fn slot_std_error(sum: f64, sq_sum: f64, n: f64) -> f64 {
    if n < 2.0 {
        return 0.0;
    }
    let m = sum / n;
    let var = ((sq_sum - n * m * m) / (n - 1.0)).max(0.0);
    (var / n).sqrt()
}

/// Runs the simulation. Replications execute in parallel on rayon's pool.
pub fn simulate(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let game = &config.game;
    let tallies: Vec<ReplicationTally> = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect();

    let slots = config.slots as f64;
    let k = game.k;
    let per_rep = |f: &dyn Fn(&ReplicationTally) -> f64| -> Vec<f64> {
        tallies.iter().map(|t| f(t) / slots).collect()
    };

    let high = per_rep(&|t| t.high_successes as f64);
    let low = per_rep(&|t| t.low_successes as f64);
    let throughput = per_rep(&|t| (t.high_successes + t.low_successes) as f64);
    let collisions = per_rep(&|t| t.collision_slots as f64);
    let user_payoffs: Vec<Vec<f64>> = (0..k)
        .map(|u| per_rep(&|t| t.users[u].payoff_sum(game)))
        .collect();
    let avg_payoff = per_rep(&|t| {
        t.users.iter().map(|u| u.payoff_sum(game)).sum::<f64>() / k as f64
    });

    let per_level_success = (mean(&high), mean(&low));
    let mean_throughput = per_level_success.0 + per_level_success.1;

    let (throughput_std_error, payoff_std_errors, mean_payoff_std_error) =
        if config.replications >= 2 {
            (
                std_error(&throughput),
                user_payoffs.iter().map(|p| std_error(p)).collect::<Vec<_>>(),
                std_error(&avg_payoff),
            )
        } else {
            let t = &tallies[0];
            let decoded = (t.high_successes + t.low_successes) as f64;
            let user_se: Vec<f64> = t
                .users
                .iter()
                .map(|u| slot_std_error(u.payoff_sum(game), u.payoff_sq_sum(game), slots))
                .collect();
            // users are not independent within a slot; use the largest single-user error
            let avg_se = user_se.iter().cloned().fold(0.0, f64::max);
            (
                slot_std_error(decoded, t.decoded_sq as f64, slots),
                user_se,
                avg_se,
            )
        };

    Ok(SimReport {
        mean_throughput,
        throughput_std_error,
        throughput_ci95: Z_95 * throughput_std_error,
        per_level_success,
        collision_rate: mean(&collisions),
        mean_payoff_per_user: user_payoffs.iter().map(|p| mean(p)).collect(),
        payoff_ci95_per_user: payoff_std_errors.iter().map(|se| Z_95 * se).collect(),
        mean_payoff: mean(&avg_payoff),
        mean_payoff_std_error,
        seed_used: config.seed,
        slots: config.slots,
        replications: config.replications,
    })
}

/// `|estimate - target| <= sigmas * std_error`, with round-off slack for
/// zero-variance estimates.
pub fn within_sigmas(estimate: f64, target: f64, std_error: f64, sigmas: f64) -> bool {
    (estimate - target).abs() <= sigmas * std_error + 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffCheck {
    pub simulated: f64,
    pub analytic: f64,
    pub gap: f64,
    pub std_error: f64,
    pub pass: bool,
}

/// Compares the simulated mean payoff of a symmetric profile with its exact
/// expectation, at a 3-sigma tolerance.
pub fn empirical_payoff_check(
    strategy: &MixedStrategy,
    config: &GameConfig,
    slots: u64,
    seed: u64,
) -> Result<PayoffCheck> {
    if slots < MIN_CHECK_SLOTS {
        return Err(Error::InvalidArgument(format!(
            "payoff check needs at least {MIN_CHECK_SLOTS} slots, got {slots}"
        )));
    }
    let report = simulate(&SimConfig::symmetric(*config, *strategy).slots(slots).seed(seed))?;
    let analytic = expected_payoff(*strategy, strategy, config);
    let simulated = report.mean_payoff;
    Ok(PayoffCheck {
        simulated,
        analytic,
        gap: (simulated - analytic).abs(),
        std_error: report.mean_payoff_std_error,
        pass: within_sigmas(simulated, analytic, report.mean_payoff_std_error, 3.0),
    })
}
