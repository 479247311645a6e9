use serde::{Deserialize, Serialize};

use crate::machine::{LimitConvention, Program, RealTape};
use crate::ordinal::Ordinal;

use super::driver::{run, run_joint};
use super::{Budget, EngineError, RunOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RaceWinner {
    First,
    Second,
    /// Both halted at the same stage; the first program is reported as the
    /// winner.
    Tie,
    /// Neither halted within the lockstep run.
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaceResult {
    pub winner: RaceWinner,
    /// Stage at which the race stopped, if some program halted.
    pub stage: Option<Ordinal>,
    /// Outcome of the lockstep co-simulation.
    pub joint: RunOutcome,
    /// Standalone outcome of each program.
    pub each: [RunOutcome; 2],
}

impl RaceResult {
    /// Index of the winning program, ties going to the first.
    pub fn winner_index(&self) -> Option<usize> {
        match self.winner {
            RaceWinner::First | RaceWinner::Tie => Some(0),
            RaceWinner::Second => Some(1),
            RaceWinner::Neither => None,
        }
    }
}

/// Runs `p` and `q` in lockstep on `x` and stops as soon as one of them
/// halts.
pub fn race(p: &Program, q: &Program, x: &RealTape, b: &Budget) -> Result<RaceResult, EngineError> {
    race_with(p, q, x, b, LimitConvention::LiminfCells)
}

pub fn race_with(
    p: &Program,
    q: &Program,
    x: &RealTape,
    b: &Budget,
    conv: LimitConvention,
) -> Result<RaceResult, EngineError> {
    let (joint, _) = run_joint(&[p, q], x, b, conv)?;
    let (winner, stage) = match &joint.outcome {
        RunOutcome::Halted { stage, .. } => {
            let w = match (joint.halted[0], joint.halted[1]) {
                (true, true) => RaceWinner::Tie,
                (true, false) => RaceWinner::First,
                _ => RaceWinner::Second,
            };
            (w, Some(stage.clone()))
        }
        _ => (RaceWinner::Neither, None),
    };
    let each = [run(p, x, b, conv)?.0, run(q, x, b, conv)?.0];
    Ok(RaceResult {
        winner,
        stage,
        joint: joint.outcome,
        each,
    })
}
