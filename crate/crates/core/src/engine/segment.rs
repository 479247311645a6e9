//! Successor-step segments and exact cycle detection.
//!
//! A segment starts at some snapshot (stage 0 or a limit) and runs
//! successor steps until a halting state is reached or a configuration
//! repeats exactly. Configurations are hashed incrementally (one key per
//! written cell); a hash hit is confirmed by rebuilding the earlier
//! configuration from the segment start and comparing in full.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::machine::{splitmix64, Config, InputReader, Overlay, Program, StepEffect, TailSummary};

/// A joint configuration of one or more machines sharing an input and a
/// stage clock.
pub type Joint = Vec<Config>;

#[inline]
fn cell_key(machine: usize, track: u64, cell: usize) -> u64 {
    splitmix64((cell as u64) << 10 ^ (machine as u64) << 1 ^ track)
}

fn tape_hash(machine: usize, c: &Config) -> u64 {
    let w = c
        .work
        .ones()
        .fold(0, |h, cell| h ^ cell_key(machine, 0, cell));
    c.output
        .ones()
        .fold(w, |h, cell| h ^ cell_key(machine, 1, cell))
}

#[inline]
fn position_hash(machine: usize, c: &Config) -> u64 {
    splitmix64((c.state as u64) << 32 ^ (c.head as u64) ^ (machine as u64) << 58 ^ 0x5bd1_e995)
}

/// Hash of a joint configuration (stage excluded).
pub fn joint_hash(joint: &[Config]) -> u64 {
    joint
        .iter()
        .enumerate()
        .fold(0x243f_6a88_85a3_08d3, |h, (m, c)| {
            splitmix64(h ^ tape_hash(m, c) ^ position_hash(m, c))
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum SegmentEnd {
    /// Some machine entered a halting state after `steps` steps.
    Halted { steps: u64 },
    /// The configuration after `mu + period` steps equals the one after `mu`.
    Cycle { mu: u64, period: u64 },
    /// `steps` steps were taken without halting or repeating.
    OutOfSteps { steps: u64 },
}

/// Statistics recorded for one segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub steps: u64,
    pub cycle_start: Option<u64>,
    pub period: Option<u64>,
    pub table_entries: usize,
    pub hash_collisions: u64,
    /// Distinct output tapes seen during the segment, per machine, capped.
    pub outputs_seen: Vec<Vec<Overlay>>,
}

pub(crate) const OUTPUTS_SEEN_CAP: usize = 16;

pub(crate) struct Scan {
    pub end: SegmentEnd,
    /// Joint configuration where the scan stopped.
    pub current: Joint,
    /// Summary over every stage of the segment up to `current`.
    pub whole: Vec<TailSummary>,
    pub stats: SegmentStats,
}

struct Stepper<'p, 'r, 'i> {
    programs: &'p [&'p Program],
    reader: &'r mut InputReader<'i>,
}

impl Stepper<'_, '_, '_> {
    /// One joint step; returns true if any machine is now halting.
    #[inline]
    fn step(
        &mut self,
        joint: &mut [Config],
        mut on_effect: impl FnMut(usize, StepEffect, &Config),
    ) -> bool {
        let mut halted = false;
        for (m, (c, p)) in joint.iter_mut().zip(self.programs).enumerate() {
            let bit = self.reader.read(c.head);
            let eff = c
                .apply(p, bit)
                .expect("segments never step a halted machine");
            on_effect(m, eff, c);
            halted |= p.is_halting(c.state);
        }
        halted
    }
}

fn any_halting(programs: &[&Program], joint: &[Config]) -> bool {
    joint
        .iter()
        .zip(programs)
        .any(|(c, p)| p.is_halting(c.state))
}

fn note_output(seen: &mut Vec<Overlay>, out: &Overlay) {
    if seen.len() < OUTPUTS_SEEN_CAP && !seen.contains(out) {
        seen.push(out.clone());
    }
}

/// Runs successor steps from `start` for at most `max_steps` steps.
pub(crate) fn scan(
    programs: &[&Program],
    reader: &mut InputReader<'_>,
    start: &[Config],
    max_steps: u64,
) -> Scan {
    let n_machines = start.len();
    let mut current: Joint = start.to_vec();
    let mut whole: Vec<TailSummary> = start.iter().map(TailSummary::of).collect();
    let mut outputs_seen: Vec<Vec<Overlay>> =
        start.iter().map(|c| vec![c.output.clone()]).collect();
    let mut tape_hashes: Vec<u64> = start
        .iter()
        .enumerate()
        .map(|(m, c)| tape_hash(m, c))
        .collect();
    let full_hash = |tapes: &[u64], joint: &[Config]| {
        joint
            .iter()
            .enumerate()
            .fold(0x243f_6a88_85a3_08d3, |h, (m, c)| {
                splitmix64(h ^ tapes[m] ^ position_hash(m, c))
            })
    };

    let mut stats = SegmentStats {
        steps: 0,
        cycle_start: None,
        period: None,
        table_entries: 0,
        hash_collisions: 0,
        outputs_seen: Vec::new(),
    };
    if any_halting(programs, &current) {
        stats.outputs_seen = outputs_seen;
        return Scan {
            end: SegmentEnd::Halted { steps: 0 },
            current,
            whole,
            stats,
        };
    }

    let mut table: HashMap<u64, Vec<u64>> = HashMap::new();
    table.insert(full_hash(&tape_hashes, &current), vec![0]);
    let mut stepper = Stepper { programs, reader };
    let mut steps = 0u64;
    let end = loop {
        if steps == max_steps {
            break SegmentEnd::OutOfSteps { steps };
        }
        let halted = stepper.step(&mut current, |m, eff, after| {
            whole[m].observe(eff, after);
            if let Some(f) = eff.work {
                tape_hashes[m] ^= cell_key(m, 0, f.cell);
            }
            if let Some(f) = eff.out {
                tape_hashes[m] ^= cell_key(m, 1, f.cell);
                note_output(&mut outputs_seen[m], &after.output);
            }
        });
        steps += 1;
        if halted {
            break SegmentEnd::Halted { steps };
        }
        let h = full_hash(&tape_hashes, &current);
        let candidates = table.entry(h).or_default();
        let mut hit = None;
        for &idx in candidates.iter() {
            let earlier = replay(stepper.programs, stepper.reader, start, idx);
            if earlier == current {
                hit = Some(idx);
                break;
            }
            stats.hash_collisions += 1;
        }
        if let Some(mu) = hit {
            break SegmentEnd::Cycle {
                mu,
                period: steps - mu,
            };
        }
        candidates.push(steps);
    };
    debug_assert_eq!(current.len(), n_machines);
    stats.steps = steps;
    stats.table_entries = table.values().map(Vec::len).sum();
    if let SegmentEnd::Cycle { mu, period } = end {
        stats.cycle_start = Some(mu);
        stats.period = Some(period);
    }
    stats.outputs_seen = outputs_seen;
    Scan {
        end,
        current,
        whole,
        stats,
    }
}

/// The joint configuration `n` steps after `start` (no halting inside).
pub(crate) fn replay(
    programs: &[&Program],
    reader: &mut InputReader<'_>,
    start: &[Config],
    n: u64,
) -> Joint {
    let mut joint = start.to_vec();
    let mut stepper = Stepper { programs, reader };
    for _ in 0..n {
        stepper.step(&mut joint, |_, _, _| {});
    }
    joint
}

/// Summary over one full period starting at `at`, which must lie on the
/// cycle.
pub(crate) fn cycle_summary(
    programs: &[&Program],
    reader: &mut InputReader<'_>,
    at: &[Config],
    period: u64,
) -> Vec<TailSummary> {
    let mut joint = at.to_vec();
    let mut tails: Vec<TailSummary> = at.iter().map(TailSummary::of).collect();
    let mut stepper = Stepper { programs, reader };
    for _ in 0..period {
        stepper.step(&mut joint, |m, eff, after| tails[m].observe(eff, after));
    }
    debug_assert_eq!(joint.as_slice(), at);
    tails
}

/// Earliest exact repetition within `max_steps` successor steps from
/// `start`: `(start_index, period)`, where index 0 is `start` itself.
/// Returns `None` when a halting state comes first or nothing repeats.
pub fn detect_cycle(
    program: &Program,
    input: &crate::machine::RealTape,
    start: &Config,
    max_steps: u64,
) -> Option<(u64, u64)> {
    let mut reader = InputReader::new(input);
    let s = scan(
        &[program],
        &mut reader,
        std::slice::from_ref(start),
        max_steps,
    );
    match s.end {
        SegmentEnd::Cycle { mu, period } => Some((mu, period)),
        _ => None,
    }
}
