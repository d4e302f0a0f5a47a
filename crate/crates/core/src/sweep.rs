//! Parameter sweeps over the reward `W` or the number of users `K`, producing
//! one CSV row per grid point.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::equilibrium::mixed_ne;
use crate::error::{Error, Result};
use crate::game::{expected_throughput, GameConfig};
use crate::social::maximize_average_payoff;

/// Upper bound on sweep length.
pub const MAX_SWEEP_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    W,
    K,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SweepRange {
    /// Rewards `start, start + step, ...` up to and including `stop`.
    Reward { start: f64, stop: f64, step: f64 },
    Players(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Column {
    W,
    K,
    ANe,
    BNe,
    P0Ne,
    Regime,
    NePayoff,
    AOpt,
    BOpt,
    OptPayoff,
    Poa,
    AnalyticThroughputAtNe,
}

impl Column {
    pub const ALL: [Column; 12] = [
        Column::W,
        Column::K,
        Column::ANe,
        Column::BNe,
        Column::P0Ne,
        Column::Regime,
        Column::NePayoff,
        Column::AOpt,
        Column::BOpt,
        Column::OptPayoff,
        Column::Poa,
        Column::AnalyticThroughputAtNe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::W => "W",
            Column::K => "K",
            Column::ANe => "a_ne",
            Column::BNe => "b_ne",
            Column::P0Ne => "p0_ne",
            Column::Regime => "regime",
            Column::NePayoff => "ne_payoff",
            Column::AOpt => "a_opt",
            Column::BOpt => "b_opt",
            Column::OptPayoff => "opt_payoff",
            Column::Poa => "poa",
            Column::AnalyticThroughputAtNe => "analytic_throughput_at_ne",
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Column::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown column '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub range: SweepRange,
    /// Supplies the parameters that are not swept.
    pub base: GameConfig,
    /// Emitted columns, always in canonical order.
    pub columns: Vec<Column>,
}

impl SweepSpec {
    pub fn over_reward(base: GameConfig, start: f64, stop: f64, step: f64) -> Self {
        Self {
            range: SweepRange::Reward { start, stop, step },
            base,
            columns: Column::ALL.to_vec(),
        }
    }

    pub fn over_players(base: GameConfig, ks: Vec<usize>) -> Self {
        Self {
            range: SweepRange::Players(ks),
            base,
            columns: Column::ALL.to_vec(),
        }
    }

    pub fn with_columns(mut self, mut columns: Vec<Column>) -> Self {
        columns.sort_by_key(|c| Column::ALL.iter().position(|x| x == c));
        columns.dedup();
        self.columns = columns;
        self
    }

    pub fn variable(&self) -> SweepVariable {
        match self.range {
            SweepRange::Reward { .. } => SweepVariable::W,
            SweepRange::Players(_) => SweepVariable::K,
        }
    }

    /// The game at every grid point.
    pub fn configs(&self) -> Result<Vec<GameConfig>> {
        if self.columns.is_empty() {
            return Err(Error::InvalidArgument("no output columns selected".into()));
        }
        match &self.range {
            SweepRange::Reward { start, stop, step } => {
                let (start, stop, step) = (*start, *stop, *step);
                if !(step > 0.0 && step.is_finite()) {
                    return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
                }
                if !(start.is_finite() && stop.is_finite() && start <= stop) {
                    return Err(Error::InvalidArgument(format!(
                        "empty reward range [{start}, {stop}]"
                    )));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > MAX_SWEEP_POINTS {
                    return Err(Error::InvalidArgument(format!(
                        "sweep has {count} points, limit is {MAX_SWEEP_POINTS}"
                    )));
                }
                (0..count)
                    .map(|i| self.base.with_reward(snap(start + i as f64 * step)))
                    .collect()
            }
            SweepRange::Players(ks) => {
                if ks.is_empty() {
                    return Err(Error::InvalidArgument("empty K list".into()));
                }
                ks.iter().map(|&k| self.base.with_players(k)).collect()
            }
        }
    }

    pub fn rows(&self) -> Result<Vec<SweepRow>> {
        Ok(self.configs()?.iter().map(SweepRow::compute).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows = self.rows()?;
        let mut writer = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(format!("csv write failed: {e}"));
        writer
            .write_record(self.columns.iter().map(|c| c.name()))
            .map_err(io)?;
        for row in &rows {
            writer.write_record(row.cells(&self.columns)).map_err(io)?;
        }
        writer.flush()?;
        Ok(())
    }
}

// Removes accumulated binary noise from `start + i * step`.
fn snap(x: f64) -> f64 {
    let scaled = (x * 1e12).round() / 1e12;
    if (scaled - x).abs() <= 1e-9 * x.abs().max(1.0) {
        scaled
    } else {
        x
    }
}

/// Everything the sweep can report for one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub w: f64,
    pub k: usize,
    pub a_ne: f64,
    pub b_ne: f64,
    pub p0_ne: f64,
    pub regime: String,
    pub ne_payoff: f64,
    pub a_opt: f64,
    pub b_opt: f64,
    pub opt_payoff: f64,
    pub poa: Option<f64>,
    pub analytic_throughput_at_ne: f64,
}

impl SweepRow {
    pub fn compute(config: &GameConfig) -> Self {
        let ne = mixed_ne(config);
        let opt = maximize_average_payoff(config);
        Self {
            w: config.w,
            k: config.k,
            a_ne: ne.strategy.a(),
            b_ne: ne.strategy.b(),
            p0_ne: ne.strategy.p0(),
            regime: ne.regime.name().to_string(),
            ne_payoff: ne.equilibrium_payoff,
            a_opt: opt.strategy.a(),
            b_opt: opt.strategy.b(),
            opt_payoff: opt.average_payoff,
            poa: opt.poa,
            analytic_throughput_at_ne: expected_throughput(&ne.strategy, config),
        }
    }

    pub fn cell(&self, column: Column) -> String {
        match column {
            Column::W => self.w.to_string(),
            Column::K => self.k.to_string(),
            Column::ANe => self.a_ne.to_string(),
            Column::BNe => self.b_ne.to_string(),
            Column::P0Ne => self.p0_ne.to_string(),
            Column::Regime => self.regime.clone(),
            Column::NePayoff => self.ne_payoff.to_string(),
            Column::AOpt => self.a_opt.to_string(),
            Column::BOpt => self.b_opt.to_string(),
            Column::OptPayoff => self.opt_payoff.to_string(),
            Column::Poa => self.poa.map(|p| p.to_string()).unwrap_or_default(),
            Column::AnalyticThroughputAtNe => self.analytic_throughput_at_ne.to_string(),
        }
    }

    pub fn cells(&self, columns: &[Column]) -> Vec<String> {
        columns.iter().map(|&c| self.cell(c)).collect()
    }
}
