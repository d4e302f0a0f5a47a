//! Solver and simulator for the NOMA-ALOHA random access game.
//!
//! Users share one slotted channel with two power levels. Each slot a user
//! transmits at high power, at low power, or stays silent; a packet is decoded
//! iff it is the only one on its power level. This crate computes the game's
//! pure and symmetric mixed Nash equilibria, the symmetric social optimum and
//! price of anarchy, and checks the analytic predictions with a seeded
//! Monte Carlo simulation of the channel.

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod numeric;
pub mod sim;
pub mod social;
pub mod sweep;

pub use equilibrium::{
    mixed_ne, pure_nash_equilibria, solve_full_transmit_root, verify_epsilon_ne, w_star,
    EpsilonNeReport, NESolution, PureNEList, Regime,
};
pub use error::{Error, Result};
pub use game::{
    bimatrix, expected_payoff, expected_throughput, payoff, reward, Bimatrix, GameConfig,
    MixedStrategy, PurePayoffs, Strategy,
};
pub use sim::{empirical_payoff_check, simulate, PayoffCheck, Profiles, SimConfig, SimReport};
pub use social::{average_payoff, maximize_average_payoff, SocialOptimum};
pub use sweep::{Column, SweepRow, SweepSpec};
