use crate::machine::{InputReader, LimitConvention, Program, RealTape, Snapshot, TailSummary};
use crate::ordinal::Ordinal;

use super::final_loop::detect_final_loop;
use super::segment::{self, joint_hash, Joint, SegmentEnd};
use super::{Budget, BudgetReason, EngineError, Milestone, MilestoneKind, RunOutcome, Trace};

/// Outcome of a joint run, with the machines that were halting when it
/// stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointOutcome {
    pub outcome: RunOutcome,
    pub halted: Vec<bool>,
}

struct Entry {
    stage: Ordinal,
    joint: Joint,
    hash: u64,
    /// Summary of the stretch from this entry to the next one of its order.
    closing: Option<Vec<TailSummary>>,
}

impl Entry {
    fn new(stage: Ordinal, joint: Joint) -> Self {
        let hash = joint_hash(&joint);
        Entry {
            stage,
            joint,
            hash,
            closing: None,
        }
    }
}

enum Step {
    Continue(Joint, Ordinal),
    Done(RunOutcome),
}

struct Driver<'a> {
    programs: Vec<&'a Program>,
    reader: InputReader<'a>,
    budget: &'a Budget,
    conv: LimitConvention,
    /// `levels[k]` holds the start of the current stretch of order `k` and
    /// the limits of order `k` reached since. Index 0 is unused.
    levels: Vec<Vec<Entry>>,
    trace: Trace,
}

fn merge_all<'e>(mut it: impl Iterator<Item = &'e Vec<TailSummary>>) -> Vec<TailSummary> {
    let mut acc = it.next().expect("at least one stretch").clone();
    for s in it {
        for (a, b) in acc.iter_mut().zip(s) {
            a.merge(b);
        }
    }
    acc
}

impl<'a> Driver<'a> {
    fn new(
        programs: Vec<&'a Program>,
        input: &'a RealTape,
        budget: &'a Budget,
        conv: LimitConvention,
    ) -> Self {
        Driver {
            programs,
            reader: InputReader::new(input),
            budget,
            conv,
            levels: Vec::new(),
            trace: Trace {
                convention: conv,
                milestones: Vec::new(),
                segments: Vec::new(),
            },
        }
    }

    fn reset_levels(&mut self, upto: u32, stage: &Ordinal, joint: &Joint) {
        let top = self.budget.max_cycle_order as usize;
        if self.levels.len() != top + 1 {
            self.levels = (0..=top).map(|_| Vec::new()).collect();
        }
        for k in 1..=(upto as usize).min(top) {
            self.levels[k] = vec![Entry::new(stage.clone(), joint.clone())];
        }
    }

    fn halted_flags(&self, joint: &Joint) -> Vec<bool> {
        joint
            .iter()
            .zip(&self.programs)
            .map(|(c, p)| p.is_halting(c.state))
            .collect()
    }

    fn halted_outcome(&self, stage: Ordinal, joint: &Joint) -> RunOutcome {
        let flags = self.halted_flags(joint);
        let first = flags.iter().position(|&h| h).unwrap_or(0);
        RunOutcome::Halted {
            stage,
            output: joint[first].output.clone(),
        }
    }

    fn limit_joint(&self, tails: &[TailSummary]) -> Joint {
        tails
            .iter()
            .zip(&self.programs)
            .map(|(t, p)| t.limit_config(self.conv, p))
            .collect()
    }

    /// Finite steps available from `stage` before passing the stage budget.
    fn stage_room(&self, stage: &Ordinal) -> u64 {
        match self.budget.max_stage.sub_left(stage) {
            None => 0,
            Some(d) if d.is_finite() => d.to_u64().unwrap_or(u64::MAX),
            Some(_) => u64::MAX,
        }
    }

    fn check_stage(&self, stage: &Ordinal) -> Result<bool, EngineError> {
        if *stage >= self.budget.ceiling {
            return Err(EngineError::NotationOverflow(stage.clone()));
        }
        Ok(*stage <= self.budget.max_stage)
    }

    fn record(
        &mut self,
        kind: MilestoneKind,
        stage: &Ordinal,
        joint: &Joint,
        closing: Option<Vec<TailSummary>>,
    ) {
        self.trace.milestones.push(Milestone {
            kind,
            stage: stage.clone(),
            configs: joint.clone(),
            closing,
            segments_before: self.trace.segments.len(),
        });
    }

    /// Registers bookkeeping for a limit of order `k` without any detection.
    fn enter_limit(&mut self, k: u32, stage: &Ordinal, joint: &Joint, closing: &[TailSummary]) {
        let level = &mut self.levels[k as usize];
        level
            .last_mut()
            .expect("every level has a start entry")
            .closing = Some(closing.to_vec());
        level.push(Entry::new(stage.clone(), joint.clone()));
        self.reset_levels(k - 1, stage, joint);
    }

    fn push_limit(
        &mut self,
        k: u32,
        joint: Joint,
        stage: Ordinal,
        closing: Vec<TailSummary>,
    ) -> Result<Step, EngineError> {
        self.enter_limit(k, &stage, &joint, &closing);
        self.record(
            MilestoneKind::Limit { order: k },
            &stage,
            &joint,
            Some(closing),
        );
        if self.halted_flags(&joint).contains(&true) {
            return Ok(Step::Done(self.halted_outcome(stage, &joint)));
        }

        let level = &self.levels[k as usize];
        let j = level.len() - 1;
        let newest = &level[j];
        let Some(i) =
            (1..j).find(|&i| level[i].hash == newest.hash && level[i].joint == newest.joint)
        else {
            if level.len() > self.budget.max_limits_per_order {
                return Ok(Step::Done(RunOutcome::BudgetExceeded {
                    stage_reached: stage,
                    reason: BudgetReason::LimitCount,
                }));
            }
            return Ok(Step::Continue(joint, stage));
        };

        let tail = merge_all(
            level[i..j]
                .iter()
                .map(|e| e.closing.as_ref().expect("closed")),
        );
        let lim = self.limit_joint(&tail);
        let loop_start = &level[i];
        let certified = (0..self.programs.len()).all(|m| {
            let s1 = Snapshot::new(loop_start.stage.clone(), loop_start.joint[m].clone());
            let s2 = Snapshot::new(stage.clone(), joint[m].clone());
            let between: Vec<Snapshot> = level[i + 1..j]
                .iter()
                .map(|e| Snapshot::new(e.stage.clone(), e.joint[m].clone()))
                .collect();
            detect_final_loop(&s1, &s2, &between, std::slice::from_ref(&tail[m]))
        }) && lim == loop_start.joint;
        if certified {
            let period = stage.sub_left(&loop_start.stage).expect("limits increase");
            return Ok(Step::Done(RunOutcome::FinalLoop {
                start: loop_start.stage.clone(),
                period,
            }));
        }
        if k >= self.budget.max_cycle_order {
            return Ok(Step::Done(RunOutcome::BudgetExceeded {
                stage_reached: stage,
                reason: BudgetReason::CycleOrder,
            }));
        }
        let next_stage = level[0].stage.add(&Ordinal::omega_pow_n(u64::from(k) + 1));
        if !self.check_stage(&next_stage)? {
            return Ok(Step::Done(RunOutcome::BudgetExceeded {
                stage_reached: stage,
                reason: BudgetReason::StageLimit,
            }));
        }
        let whole = merge_all(
            level[..j]
                .iter()
                .map(|e| e.closing.as_ref().expect("closed")),
        );
        self.push_limit(k + 1, lim, next_stage, whole)
    }

    fn drive(
        mut self,
        mut stage: Ordinal,
        mut joint: Joint,
    ) -> Result<(JointOutcome, Trace), EngineError> {
        let outcome = loop {
            let room = self.stage_room(&stage);
            let max_steps = room.min(self.budget.max_successor_steps_per_segment);
            let scan = segment::scan(&self.programs, &mut self.reader, &joint, max_steps);
            self.trace.segments.push(scan.stats);
            match scan.end {
                SegmentEnd::Halted { steps } => {
                    let at = stage.add_finite(steps);
                    if steps > 0 {
                        self.record(MilestoneKind::Halt, &at, &scan.current, None);
                    }
                    let outcome = self.halted_outcome(at, &scan.current);
                    joint = scan.current;
                    break outcome;
                }
                SegmentEnd::OutOfSteps { steps } => {
                    let reason =
                        if steps == room && room < self.budget.max_successor_steps_per_segment {
                            BudgetReason::StageLimit
                        } else {
                            BudgetReason::SegmentSteps
                        };
                    joint = scan.current;
                    break RunOutcome::BudgetExceeded {
                        stage_reached: stage.add_finite(steps),
                        reason,
                    };
                }
                SegmentEnd::Cycle { period, mu } => {
                    let limit_stage = stage.add(&Ordinal::omega());
                    if !self.check_stage(&limit_stage)? {
                        joint = scan.current;
                        break RunOutcome::BudgetExceeded {
                            stage_reached: stage.add_finite(mu + period),
                            reason: BudgetReason::StageLimit,
                        };
                    }
                    let tails = segment::cycle_summary(
                        &self.programs,
                        &mut self.reader,
                        &scan.current,
                        period,
                    );
                    let lim = self.limit_joint(&tails);
                    match self.push_limit(1, lim, limit_stage, scan.whole)? {
                        Step::Continue(j, s) => {
                            joint = j;
                            stage = s;
                        }
                        Step::Done(outcome) => {
                            let last = self.trace.milestones.last().expect("limit recorded");
                            joint = last.configs.clone();
                            break outcome;
                        }
                    }
                }
            }
        };
        let halted = self.halted_flags(&joint);
        Ok((JointOutcome { outcome, halted }, self.trace))
    }
}

/// Runs several machines in lockstep on a shared input and stage clock,
/// stopping at the first stage where any of them halts.
pub fn run_joint(
    programs: &[&Program],
    input: &RealTape,
    budget: &Budget,
    conv: LimitConvention,
) -> Result<(JointOutcome, Trace), EngineError> {
    budget.validate()?;
    if programs.is_empty() {
        return Err(EngineError::InvalidProgram("no programs to run".into()));
    }
    let mut d = Driver::new(programs.to_vec(), input, budget, conv);
    let stage = Ordinal::zero();
    let joint: Joint = programs
        .iter()
        .map(|_| crate::machine::Config::initial())
        .collect();
    d.reset_levels(budget.max_cycle_order, &stage, &joint);
    d.record(MilestoneKind::Start, &stage, &joint, None);
    d.drive(stage, joint)
}

/// Runs `program` on `input` until it halts, provably loops forever, or a
/// budget trips.
pub fn run(
    program: &Program,
    input: &RealTape,
    budget: &Budget,
    conv: LimitConvention,
) -> Result<(RunOutcome, Trace), EngineError> {
    let (o, t) = run_joint(&[program], input, budget, conv)?;
    Ok((o.outcome, t))
}

/// Continues a run from milestone `index` of a trace it produced, using
/// only the trace's recorded data to rebuild the engine state.
pub fn resume(
    program: &Program,
    input: &RealTape,
    budget: &Budget,
    trace: &Trace,
    index: usize,
) -> Result<(RunOutcome, Trace), EngineError> {
    budget.validate()?;
    let at = trace
        .milestones
        .get(index)
        .ok_or_else(|| EngineError::BadResume(format!("no milestone {index}")))?;
    let mut d = Driver::new(vec![program], input, budget, trace.convention);
    let first = &trace.milestones[0];
    if first.kind != MilestoneKind::Start {
        return Err(EngineError::BadResume(
            "trace does not begin with a start milestone".into(),
        ));
    }
    d.reset_levels(budget.max_cycle_order, &first.stage, &first.configs);
    for m in trace.milestones.iter().take(index).skip(1) {
        match (m.kind, &m.closing) {
            (MilestoneKind::Limit { order }, Some(closing)) if order <= budget.max_cycle_order => {
                d.enter_limit(order, &m.stage, &m.configs, closing)
            }
            _ => {
                return Err(EngineError::BadResume(format!(
                    "milestone at {} cannot be replayed",
                    m.stage
                )))
            }
        }
    }
    d.trace.milestones = trace.milestones[..index].to_vec();
    d.trace.segments = trace.segments[..at.segments_before.min(trace.segments.len())].to_vec();
    match (at.kind, &at.closing) {
        (MilestoneKind::Start, _) => {
            d.record(MilestoneKind::Start, &at.stage, &at.configs, None);
            let (o, t) = d.drive(at.stage.clone(), at.configs.clone())?;
            Ok((o.outcome, t))
        }
        (MilestoneKind::Halt, _) => {
            d.trace.milestones.push(at.clone());
            let outcome = d.halted_outcome(at.stage.clone(), &at.configs);
            Ok((outcome, d.trace))
        }
        (MilestoneKind::Limit { order }, Some(closing)) => {
            match d.push_limit(order, at.configs.clone(), at.stage.clone(), closing.clone())? {
                Step::Continue(j, s) => {
                    let (o, t) = d.drive(s, j)?;
                    Ok((o.outcome, t))
                }
                Step::Done(outcome) => Ok((outcome, d.trace)),
            }
        }
        _ => Err(EngineError::BadResume(
            "limit milestone without a closing summary".into(),
        )),
    }
}
