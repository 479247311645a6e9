use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::program::{Move, Program, Reading, StateId};
use super::tape::{InputReader, Overlay, RealTape};
use crate::ordinal::Ordinal;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("state {0} is a halting state and has no transitions")]
    HaltedMachine(StateId),
}

/// Machine configuration without its stage label: state, head and the two
/// writable tapes. Two snapshots are configuration-equal iff their configs
/// are equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Config {
    pub state: StateId,
    pub head: usize,
    pub work: Overlay,
    pub output: Overlay,
}

/// A bit that flipped during one step.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Flip {
    pub cell: usize,
    pub now: bool,
}

/// Tape changes made by one step.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct StepEffect {
    pub work: Option<Flip>,
    pub out: Option<Flip>,
}

impl Config {
    pub fn initial() -> Self {
        Config::default()
    }

    #[inline]
    pub fn reading(&self, input: bool) -> Reading {
        Reading {
            input,
            work: self.work.get(self.head),
            out: self.output.get(self.head),
        }
    }

    /// Applies one transition in place.
    #[inline]
    pub fn apply(&mut self, program: &Program, input: bool) -> Result<StepEffect, MachineError> {
        let reading = self.reading(input);
        let action = program
            .action(self.state, reading)
            .ok_or(MachineError::HaltedMachine(self.state))?;
        let cell = self.head;
        let mut effect = StepEffect::default();
        if action.work != reading.work {
            self.work.set(cell, action.work);
            effect.work = Some(Flip {
                cell,
                now: action.work,
            });
        }
        if action.out != reading.out {
            self.output.set(cell, action.out);
            effect.out = Some(Flip {
                cell,
                now: action.out,
            });
        }
        self.head = match action.mv {
            Move::Left => cell.saturating_sub(1),
            Move::Right => cell + 1,
        };
        self.state = action.next;
        Ok(effect)
    }
}

/// A configuration together with the stage at which it occurs.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Snapshot {
    pub stage: Ordinal,
    #[serde(flatten)]
    pub config: Config,
}

impl Snapshot {
    pub fn initial() -> Self {
        Snapshot {
            stage: Ordinal::zero(),
            config: Config::initial(),
        }
    }

    pub fn new(stage: Ordinal, config: Config) -> Self {
        Snapshot { stage, config }
    }

    /// Equality ignoring the stage label.
    pub fn config_eq(&self, other: &Snapshot) -> bool {
        self.config == other.config
    }

    pub fn is_halted(&self, program: &Program) -> bool {
        program.is_halting(self.config.state)
    }
}

/// One successor step: the snapshot at stage `s.stage + 1`.
pub fn step(program: &Program, input: &RealTape, s: &Snapshot) -> Result<Snapshot, MachineError> {
    let mut config = s.config.clone();
    let bit = input.read(config.head);
    config.apply(program, bit)?;
    Ok(Snapshot {
        stage: s.stage.succ(),
        config,
    })
}

/// Runs `n` successor steps, stopping early at a halting state.
pub fn step_n(
    program: &Program,
    reader: &mut InputReader<'_>,
    config: &mut Config,
    n: u64,
) -> Result<u64, MachineError> {
    for done in 0..n {
        if program.is_halting(config.state) {
            return Ok(done);
        }
        let bit = reader.read(config.head);
        config.apply(program, bit)?;
    }
    Ok(n)
}
