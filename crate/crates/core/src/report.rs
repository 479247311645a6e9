//! Report formats.
//!
//! Machine mode is pretty-printed JSON with fields in declaration order and
//! no timestamps, so equal requests give byte-identical reports. Every
//! machine-mode report starts with the request that produced it.
//!
//! Text mode is line oriented. The first line of a run report is one of
//!
//! ```text
//! halted stage=<ord>
//! final-loop start=<ord> period=<ord>
//! budget-exceeded stage=<ord> reason=<reason>
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::{Budget, Milestone, MilestoneKind, RaceResult, RaceWinner, RunOutcome, Trace};
use crate::lab::{SpectrumReport, Verdict};
use crate::machine::{LimitConvention, Overlay};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Machine,
}

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRequest {
    pub command: String,
    pub programs: Vec<String>,
    pub input: String,
    pub seed: Option<u64>,
    pub budget: Budget,
    pub convention: LimitConvention,
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub request: RunRequest,
    #[serde(flatten)]
    pub outcome: RunOutcome,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Trace>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaceReport {
    pub request: RunRequest,
    pub race: RaceResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub request: RunRequest,
    pub spectrum: SpectrumReport,
}

pub fn to_machine<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn cells(o: &Overlay) -> String {
    let v: Vec<String> = o.ones().map(|c| c.to_string()).collect();
    format!("[{}]", v.join(","))
}

pub fn outcome_line(o: &RunOutcome) -> String {
    match o {
        RunOutcome::Halted { stage, .. } => format!("halted stage={stage}"),
        RunOutcome::FinalLoop { start, period } => {
            format!("final-loop start={start} period={period}")
        }
        RunOutcome::BudgetExceeded {
            stage_reached,
            reason,
        } => {
            format!("budget-exceeded stage={stage_reached} reason={reason}")
        }
    }
}

fn milestone_line(m: &Milestone) -> String {
    let kind = match m.kind {
        MilestoneKind::Start => "start".to_string(),
        MilestoneKind::Limit { order } => format!("limit order={order}"),
        MilestoneKind::Halt => "halt".to_string(),
    };
    let mut line = format!("milestone {kind} stage={}", m.stage);
    for (i, c) in m.configs.iter().enumerate() {
        let tag = if m.configs.len() > 1 {
            format!(" m{i}:")
        } else {
            String::new()
        };
        let _ = write!(
            line,
            "{tag} state={} head={} work={} output={}",
            c.state,
            c.head,
            cells(&c.work),
            cells(&c.output)
        );
    }
    line
}

pub fn run_text(r: &RunReport) -> String {
    let mut s = outcome_line(&r.outcome);
    s.push('\n');
    if let RunOutcome::Halted { output, .. } = &r.outcome {
        let _ = writeln!(s, "output={}", cells(output));
    }
    if let Some(t) = &r.trace {
        for m in &t.milestones {
            let _ = writeln!(s, "{}", milestone_line(m));
        }
        let steps: u64 = t.segments.iter().map(|g| g.steps).sum();
        let _ = writeln!(s, "segments={} successor-steps={steps}", t.segments.len());
    }
    s
}

pub fn race_text(r: &RaceReport) -> String {
    let winner = match r.race.winner {
        RaceWinner::First => "first",
        RaceWinner::Second => "second",
        RaceWinner::Tie => "tie",
        RaceWinner::Neither => "neither",
    };
    let mut s = match &r.race.stage {
        Some(stage) => format!("race winner={winner} stage={stage}\n"),
        None => format!("race winner={winner}\n"),
    };
    for (name, o) in r.request.programs.iter().zip(&r.race.each) {
        let _ = writeln!(s, "{name}: {}", outcome_line(o));
    }
    s
}

fn list(v: impl IntoIterator<Item = String>) -> String {
    v.into_iter().collect::<Vec<_>>().join(" ")
}

pub fn profile_text(r: &ProfileReport) -> String {
    let sp = &r.spectrum;
    let mut s = String::new();
    let _ = writeln!(s, "family {} ({} inputs)", sp.family, sp.inputs.len());
    let _ = writeln!(
        s,
        "stages {}",
        list(sp.stages.iter().map(|o| o.to_string()))
    );
    let _ = writeln!(
        s,
        "gaps {}",
        list(sp.gaps.iter().map(|(a, b)| format!("({a},{b})")))
    );
    for (name, v) in sp.programs.iter().zip(&sp.verdicts) {
        let v = match v {
            Verdict::Sup { stage, .. } => format!("sup={stage} (family-relative)"),
            Verdict::NotTotal { witness, outcome } => {
                format!(
                    "not-total input={} {}",
                    sp.inputs[*witness],
                    outcome_line(outcome)
                )
            }
            Verdict::Unknown { witness, outcome } => {
                format!(
                    "unknown input={} {}",
                    sp.inputs[*witness],
                    outcome_line(outcome)
                )
            }
        };
        let _ = writeln!(s, "{name}: {v}");
    }
    s
}
