//! Driving runs through successor steps and limit jumps.

mod driver;
mod final_loop;
mod race;
mod segment;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{Config, LimitConvention, Overlay, Snapshot, TailSummary};
use crate::ordinal::Ordinal;

pub use driver::{resume, run, run_joint, JointOutcome};
pub use final_loop::detect_final_loop;
pub use race::{race, race_with, RaceResult, RaceWinner};
pub use segment::{detect_cycle, joint_hash, SegmentStats};

/// Resource limits for one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// No stage beyond this one is entered.
    pub max_stage: Ordinal,
    /// Successor steps allowed between two consecutive limits.
    pub max_successor_steps_per_segment: u64,
    /// Largest `k` for which jumps of length `w^k` are taken.
    pub max_cycle_order: u32,
    /// Limits of one order kept before giving up on finding a repetition.
    pub max_limits_per_order: usize,
    /// Stage labels must stay strictly below this ordinal.
    pub ceiling: Ordinal,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_stage: Ordinal::omega_pow_n(4),
            max_successor_steps_per_segment: 1_000_000,
            max_cycle_order: 3,
            max_limits_per_order: 4096,
            ceiling: Ordinal::omega_pow(Ordinal::omega()),
        }
    }
}

impl Budget {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_successor_steps_per_segment == 0
            || self.max_cycle_order == 0
            || self.max_limits_per_order == 0
        {
            return Err(EngineError::InvalidBudget(
                "all bounds must be at least 1".into(),
            ));
        }
        if self.max_stage >= self.ceiling {
            return Err(EngineError::InvalidBudget(format!(
                "max stage {} is not below the ceiling {}",
                self.max_stage, self.ceiling
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetReason {
    StageLimit,
    SegmentSteps,
    CycleOrder,
    LimitCount,
}

impl std::fmt::Display for BudgetReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BudgetReason::StageLimit => "stage-limit",
            BudgetReason::SegmentSteps => "segment-steps",
            BudgetReason::CycleOrder => "cycle-order",
            BudgetReason::LimitCount => "limit-count",
        })
    }
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum RunOutcome {
    /// The first stage in a halting state, and the output tape there.
    Halted { stage: Ordinal, output: Overlay },
    /// Snapshots at `start + period * g` coincide for every ordinal `g`.
    FinalLoop { start: Ordinal, period: Ordinal },
    /// Some budget tripped; `stage_reached` is the last stage simulated.
    BudgetExceeded {
        stage_reached: Ordinal,
        reason: BudgetReason,
    },
}

impl RunOutcome {
    pub fn halting_stage(&self) -> Option<&Ordinal> {
        match self {
            RunOutcome::Halted { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("stage label {0} would reach the notation ceiling")]
    NotationOverflow(Ordinal),
    #[error("cannot resume: {0}")]
    BadResume(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MilestoneKind {
    Start,
    /// A limit reached by a jump of length `w^order`.
    Limit {
        order: u32,
    },
    Halt,
}

/// A recorded point of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Milestone {
    #[serde(flatten)]
    pub kind: MilestoneKind,
    pub stage: Ordinal,
    pub configs: Vec<Config>,
    /// For limits: summary of the stretch of the same order that this limit
    /// closes (from the previous entry of that order up to this stage).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub closing: Option<Vec<TailSummary>>,
    /// Number of segments completed before this milestone.
    pub segments_before: usize,
}

impl Milestone {
    /// Snapshot of machine `m` at this milestone.
    pub fn snapshot(&self, m: usize) -> Snapshot {
        Snapshot::new(self.stage.clone(), self.configs[m].clone())
    }
}

/// Milestones and per-segment statistics of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub convention: LimitConvention,
    pub milestones: Vec<Milestone>,
    pub segments: Vec<SegmentStats>,
}

impl Trace {
    /// Limit milestones in order.
    pub fn limits(&self) -> impl Iterator<Item = &Milestone> {
        self.milestones
            .iter()
            .filter(|m| matches!(m.kind, MilestoneKind::Limit { .. }))
    }

    /// Indices of milestones at or after stage `from` and at or before `to`.
    pub fn milestones_between(
        &self,
        from: &Ordinal,
        to: &Ordinal,
    ) -> impl Iterator<Item = &Milestone> {
        let (from, to) = (from.clone(), to.clone());
        self.milestones
            .iter()
            .filter(move |m| m.stage >= from && m.stage <= to)
    }
}
