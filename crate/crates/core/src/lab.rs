//! Halting times over finite input families.
//!
//! A family is a finite stand-in for "all inputs", so every supremum here is
//! an attained maximum over the family and is labelled family-relative.

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{run, Budget, EngineError, RunOutcome, Trace};
use crate::machine::{LimitConvention, Overlay, Program, RealTape};
use crate::ordinal::Ordinal;
use crate::stdlib::RelationCode;

/// One member of a family with a label saying where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledInput {
    pub label: String,
    pub tape: RealTape,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFamily {
    pub name: String,
    /// Seed the members were drawn from, if generated.
    pub seed: Option<u64>,
    pub members: Vec<LabeledInput>,
}

impl InputFamily {
    pub fn explicit(
        name: impl Into<String>,
        tapes: impl IntoIterator<Item = (String, RealTape)>,
    ) -> Self {
        InputFamily {
            name: name.into(),
            seed: None,
            members: tapes
                .into_iter()
                .map(|(label, tape)| LabeledInput { label, tape })
                .collect(),
        }
    }

    /// The family holding only the all-zero input.
    pub fn zero() -> Self {
        Self::explicit("zero", [("zero".to_string(), RealTape::zero())])
    }

    /// `count` inputs with finite support below `width`, each cell set with
    /// probability `density`.
    pub fn random_fin_support(seed: u64, count: usize, width: usize, density: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..count)
            .map(|i| {
                let cells: Vec<usize> = (0..width).filter(|_| rng.gen_bool(density)).collect();
                LabeledInput {
                    label: format!("fin#{i}"),
                    tape: RealTape::fin_support(cells),
                }
            })
            .collect();
        InputFamily {
            name: format!("random-fin(seed={seed},count={count},width={width})"),
            seed: Some(seed),
            members,
        }
    }

    /// `count` relation codes on supports of size at most `max_support`,
    /// with each pair present with probability `density`.
    pub fn random_relations(seed: u64, count: usize, max_support: usize, density: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..count)
            .map(|i| {
                let n = rng.gen_range(0..=max_support);
                let pairs: Vec<(usize, usize)> = (0..n)
                    .flat_map(|a| (0..n).map(move |b| (a, b)))
                    .filter(|_| rng.gen_bool(density))
                    .collect();
                LabeledInput {
                    label: format!("rel#{i}"),
                    tape: RelationCode::new(0..n, pairs).to_tape(),
                }
            })
            .collect();
        InputFamily {
            name: format!("random-relations(seed={seed},count={count},max={max_support})"),
            seed: Some(seed),
            members,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Decision time of a program over a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// Every input halts; `stage` is the largest halting stage.
    Sup { stage: Ordinal, scope: Scope },
    /// Input `witness` provably never halts.
    NotTotal { witness: usize, outcome: RunOutcome },
    /// A budget tripped on input `witness` and no input provably loops.
    Unknown { witness: usize, outcome: RunOutcome },
}

/// Marks a supremum as a maximum over the given family only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    FamilyRelative,
}

fn verdict_of(outcomes: &[RunOutcome]) -> Verdict {
    let find = |pred: fn(&RunOutcome) -> bool| outcomes.iter().position(pred);
    if let Some(w) = find(|o| matches!(o, RunOutcome::FinalLoop { .. })) {
        return Verdict::NotTotal {
            witness: w,
            outcome: outcomes[w].clone(),
        };
    }
    if let Some(w) = find(|o| matches!(o, RunOutcome::BudgetExceeded { .. })) {
        return Verdict::Unknown {
            witness: w,
            outcome: outcomes[w].clone(),
        };
    }
    let stage = outcomes
        .iter()
        .filter_map(RunOutcome::halting_stage)
        .max()
        .cloned()
        .unwrap_or_default();
    Verdict::Sup {
        stage,
        scope: Scope::FamilyRelative,
    }
}

/// Runs every `(program, input)` pair, spread over threads; the result does
/// not depend on scheduling.
fn outcome_matrix(
    ps: &[Program],
    f: &InputFamily,
    b: &Budget,
    conv: LimitConvention,
) -> Result<Vec<Vec<RunOutcome>>, EngineError> {
    let jobs: Vec<(usize, usize)> = (0..ps.len())
        .flat_map(|p| (0..f.len()).map(move |x| (p, x)))
        .collect();
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len())
        .max(1);
    let mut results: Vec<Option<Result<RunOutcome, EngineError>>> = vec![None; jobs.len()];
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let jobs = &jobs;
                s.spawn(move || {
                    jobs.iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, &(p, x))| {
                            (i, run(&ps[p], &f.members[x].tape, b, conv).map(|r| r.0))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    let mut flat = results.into_iter().map(|r| r.expect("every job ran"));
    let mut matrix = Vec::with_capacity(ps.len());
    for _ in ps {
        matrix.push(
            (0..f.len())
                .map(|_| flat.next().unwrap())
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(matrix)
}

fn check_family(f: &InputFamily) -> Result<(), EngineError> {
    if f.is_empty() {
        return Err(EngineError::InvalidProgram(format!(
            "input family {} is empty",
            f.name
        )));
    }
    Ok(())
}

/// Decision time of `p` over `f` under the liminf rule.
pub fn decision_time(p: &Program, f: &InputFamily, b: &Budget) -> Result<Verdict, EngineError> {
    decision_time_with(p, f, b, LimitConvention::LiminfCells)
}

pub fn decision_time_with(
    p: &Program,
    f: &InputFamily,
    b: &Budget,
    conv: LimitConvention,
) -> Result<Verdict, EngineError> {
    check_family(f)?;
    let m = outcome_matrix(std::slice::from_ref(p), f, b, conv)?;
    Ok(verdict_of(&m[0]))
}

/// All runs of several programs over a family, their halting stages and the
/// gaps between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub family: String,
    pub programs: Vec<String>,
    pub inputs: Vec<String>,
    pub convention: LimitConvention,
    /// `outcomes[p][x]` for program `p` on input `x`.
    pub outcomes: Vec<Vec<RunOutcome>>,
    pub verdicts: Vec<Verdict>,
    /// Distinct halting stages, ascending.
    pub stages: Vec<Ordinal>,
    /// Pairs of consecutive stages with at least one ordinal strictly
    /// between them, ascending.
    pub gaps: Vec<(Ordinal, Ordinal)>,
}

/// Consecutive pairs of the sorted stage set that leave room between them.
pub fn gaps_of(stages: &[Ordinal]) -> Vec<(Ordinal, Ordinal)> {
    stages
        .windows(2)
        .filter(|w| w[0].succ() < w[1])
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect()
}

pub fn halting_spectrum(
    ps: &[Program],
    f: &InputFamily,
    b: &Budget,
) -> Result<SpectrumReport, EngineError> {
    halting_spectrum_with(ps, f, b, LimitConvention::LiminfCells)
}

pub fn halting_spectrum_with(
    ps: &[Program],
    f: &InputFamily,
    b: &Budget,
    conv: LimitConvention,
) -> Result<SpectrumReport, EngineError> {
    if ps.is_empty() {
        return Err(EngineError::InvalidProgram("no programs to profile".into()));
    }
    check_family(f)?;
    let outcomes = outcome_matrix(ps, f, b, conv)?;
    let mut stages: Vec<Ordinal> = outcomes
        .iter()
        .flatten()
        .filter_map(RunOutcome::halting_stage)
        .cloned()
        .collect();
    stages.sort();
    stages.dedup();
    Ok(SpectrumReport {
        family: f.name.clone(),
        programs: (0..ps.len()).map(|i| format!("p{i}")).collect(),
        inputs: f.members.iter().map(|m| m.label.clone()).collect(),
        convention: conv,
        verdicts: outcomes.iter().map(|row| verdict_of(row)).collect(),
        gaps: gaps_of(&stages),
        stages,
        outcomes,
    })
}

/// Budgeted classification of a run's output tape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "output", rename_all = "kebab-case")]
pub enum OutputClass {
    /// The run halted with this output.
    HaltingOutput(Overlay),
    /// The run is in a certified final loop and the output never changes
    /// inside it.
    StabilizedOutput(Overlay),
    /// Distinct outputs observed, in order of first appearance (capped per
    /// segment).
    TransientOutputs(Vec<Overlay>),
}

fn push_distinct(seen: &mut Vec<Overlay>, o: &Overlay) {
    if !seen.contains(o) {
        seen.push(o.clone());
    }
}

/// Classifies the output behaviour of an already computed run.
pub fn classify_trace(outcome: &RunOutcome, trace: &Trace) -> OutputClass {
    if let RunOutcome::Halted { output, .. } = outcome {
        return OutputClass::HaltingOutput(output.clone());
    }
    if let RunOutcome::FinalLoop { start, .. } = outcome {
        if let Some(first) = trace.milestones.iter().find(|m| &m.stage == start) {
            let fixed = &first.configs[0].output;
            let milestones_agree = trace
                .milestones
                .iter()
                .filter(|m| &m.stage >= start)
                .all(|m| &m.configs[0].output == fixed);
            let segments_agree = trace.segments[first.segments_before.min(trace.segments.len())..]
                .iter()
                .all(|s| s.outputs_seen[0].iter().all(|o| o == fixed));
            if milestones_agree && segments_agree {
                return OutputClass::StabilizedOutput(fixed.clone());
            }
        }
    }
    let mut seen = Vec::new();
    let n = trace.segments.len();
    for (i, m) in trace.milestones.iter().enumerate() {
        push_distinct(&mut seen, &m.configs[0].output);
        let from = m.segments_before.min(n);
        let to = trace
            .milestones
            .get(i + 1)
            .map_or(n, |next| next.segments_before.min(n));
        for s in &trace.segments[from..to.max(from)] {
            for o in &s.outputs_seen[0] {
                push_distinct(&mut seen, o);
            }
        }
    }
    OutputClass::TransientOutputs(seen)
}

pub fn classify_outputs(p: &Program, x: &RealTape, b: &Budget) -> Result<OutputClass, EngineError> {
    let (o, t) = run(p, x, b, LimitConvention::LiminfCells)?;
    Ok(classify_trace(&o, &t))
}
