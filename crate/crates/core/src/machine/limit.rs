//! Limit-stage rules.
//!
//! At a limit stage every cell takes the inferior limit of its earlier
//! values. For a run that is eventually periodic below the limit this only
//! depends on the repeating stretch: a cell is 1 at the limit iff it is 1 at
//! every stage of the cycle, and the head and state take their minima over
//! the cycle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::program::{Program, StateId};
use super::snapshot::{step, Config, Snapshot, StepEffect};
use super::tape::{Overlay, RealTape};
use crate::ordinal::Ordinal;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitConvention {
    /// liminf cells, liminf head, liminf state.
    #[default]
    LiminfCells,
    /// limsup cells, head back to 0, the program's limit state.
    HamkinsLewis,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LimitError {
    #[error("the cycle is empty")]
    EmptyCycle,
    #[error("snapshot {0} of the tail is not the successor of its predecessor")]
    NotPeriodic(usize),
}

/// Pointwise statistics over a stretch of stages: which cells held 1
/// throughout, which held 1 at some point, and the least head position and
/// state index seen.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TailSummary {
    pub work_all: Overlay,
    pub work_any: Overlay,
    pub out_all: Overlay,
    pub out_any: Overlay,
    pub min_head: usize,
    pub min_state: StateId,
}

impl TailSummary {
    /// Summary of the single stage holding `c`.
    pub fn of(c: &Config) -> Self {
        TailSummary {
            work_all: c.work.clone(),
            work_any: c.work.clone(),
            out_all: c.output.clone(),
            out_any: c.output.clone(),
            min_head: c.head,
            min_state: c.state,
        }
    }

    /// Extends the stretch by the stage reached after a step with `effect`.
    #[inline]
    pub fn observe(&mut self, effect: StepEffect, after: &Config) {
        if let Some(f) = effect.work {
            if f.now {
                self.work_any.set(f.cell, true);
            } else {
                self.work_all.set(f.cell, false);
            }
        }
        if let Some(f) = effect.out {
            if f.now {
                self.out_any.set(f.cell, true);
            } else {
                self.out_all.set(f.cell, false);
            }
        }
        self.min_head = self.min_head.min(after.head);
        self.min_state = self.min_state.min(after.state);
    }

    /// Extends the stretch by an arbitrary configuration.
    pub fn observe_config(&mut self, c: &Config) {
        self.merge(&TailSummary::of(c));
    }

    /// Concatenation of two stretches.
    pub fn merge(&mut self, other: &TailSummary) {
        self.work_all.intersect_with(&other.work_all);
        self.out_all.intersect_with(&other.out_all);
        self.work_any.union_with(&other.work_any);
        self.out_any.union_with(&other.out_any);
        self.min_head = self.min_head.min(other.min_head);
        self.min_state = self.min_state.min(other.min_state);
    }

    /// The configuration at a limit whose cofinal behaviour is this stretch
    /// repeated forever.
    pub fn limit_config(&self, conv: LimitConvention, program: &Program) -> Config {
        match conv {
            LimitConvention::LiminfCells => Config {
                state: self.min_state,
                head: self.min_head,
                work: self.work_all.clone(),
                output: self.out_all.clone(),
            },
            LimitConvention::HamkinsLewis => Config {
                state: program.limit_state(),
                head: 0,
                work: self.work_any.clone(),
                output: self.out_any.clone(),
            },
        }
    }

    /// True iff every cell holding 1 in `c` held 1 throughout the stretch.
    pub fn keeps_ones_of(&self, c: &Config) -> bool {
        c.work.is_subset(&self.work_all) && c.output.is_subset(&self.out_all)
    }
}

/// The snapshot at limit stage `stage`, given a tail of the run before it:
/// `pre` followed by `cycle`, where the successor of the last cycle element is
/// configuration-equal to the first.
///
/// Head positions in an exactly repeating cycle are always bounded, so the
/// liminf head is the cycle minimum.
pub fn limit_of_tail(
    program: &Program,
    input: &RealTape,
    pre: &[Snapshot],
    cycle: &[Snapshot],
    conv: LimitConvention,
    stage: Ordinal,
) -> Result<Snapshot, LimitError> {
    let first = cycle.first().ok_or(LimitError::EmptyCycle)?;
    let chain: Vec<&Snapshot> = pre.iter().chain(cycle).collect();
    for (i, pair) in chain.windows(2).enumerate() {
        let next = step(program, input, pair[0]).map_err(|_| LimitError::NotPeriodic(i + 1))?;
        if !next.config_eq(pair[1]) {
            return Err(LimitError::NotPeriodic(i + 1));
        }
    }
    let last = cycle.last().expect("nonempty");
    let closing = step(program, input, last).map_err(|_| LimitError::NotPeriodic(chain.len()))?;
    if !closing.config_eq(first) {
        return Err(LimitError::NotPeriodic(chain.len()));
    }
    let mut summary = TailSummary::of(&first.config);
    for s in &cycle[1..] {
        summary.observe_config(&s.config);
    }
    Ok(Snapshot {
        stage,
        config: summary.limit_config(conv, program),
    })
}
