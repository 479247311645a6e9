use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type StateId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Move {
    Left,
    Right,
}

/// What a transition does: the bits written under the head, the head move
/// and the next state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Action {
    pub work: bool,
    pub out: bool,
    pub mv: Move,
    pub next: StateId,
}

/// The three bits under the head.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Reading {
    pub input: bool,
    pub work: bool,
    pub out: bool,
}

impl Reading {
    pub const ALL: [Reading; 8] = {
        let mut all = [Reading {
            input: false,
            work: false,
            out: false,
        }; 8];
        let mut i = 0;
        while i < 8 {
            all[i] = Reading::from_index(i);
            i += 1;
        }
        all
    };

    #[inline]
    pub const fn index(self) -> usize {
        (self.input as usize) << 2 | (self.work as usize) << 1 | self.out as usize
    }

    pub const fn from_index(i: usize) -> Reading {
        Reading {
            input: i & 4 != 0,
            work: i & 2 != 0,
            out: i & 1 != 0,
        }
    }
}

/// One row of the transition table: a halting state or eight actions.
pub type Row = Option<[Action; 8]>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("a program needs at least one state")]
    NoStates,
    #[error("state {state} has a transition to {target}, but only {count} states exist")]
    DanglingTarget {
        state: StateId,
        target: StateId,
        count: usize,
    },
    #[error("{names} state names given for {rows} table rows")]
    NameCount { names: usize, rows: usize },
    #[error("limit state {0} is out of range")]
    BadLimitState(StateId),
}

/// A finite transition table over the three binary tapes.
///
/// State 0 is the start state. A row of `None` marks a halting state; every
/// other row is total over the eight possible readings.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Program {
    names: Vec<String>,
    rows: Vec<Row>,
    limit_state: Option<StateId>,
}

impl Program {
    pub fn new(
        names: Vec<String>,
        rows: Vec<Row>,
        limit_state: Option<StateId>,
    ) -> Result<Self, ProgramError> {
        if rows.is_empty() {
            return Err(ProgramError::NoStates);
        }
        if names.len() != rows.len() {
            return Err(ProgramError::NameCount {
                names: names.len(),
                rows: rows.len(),
            });
        }
        let count = rows.len();
        for (state, row) in rows.iter().enumerate() {
            for a in row.iter().flatten() {
                if a.next >= count {
                    return Err(ProgramError::DanglingTarget {
                        state,
                        target: a.next,
                        count,
                    });
                }
            }
        }
        if let Some(l) = limit_state {
            if l >= count {
                return Err(ProgramError::BadLimitState(l));
            }
        }
        Ok(Program {
            names,
            rows,
            limit_state,
        })
    }

    /// Builds a program with generated names `q0, q1, ...`.
    pub fn from_rows(rows: Vec<Row>) -> Result<Self, ProgramError> {
        let names = (0..rows.len()).map(|i| format!("q{i}")).collect();
        Self::new(names, rows, None)
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn is_halting(&self, state: StateId) -> bool {
        self.rows[state].is_none()
    }

    #[inline]
    pub fn action(&self, state: StateId, reading: Reading) -> Option<Action> {
        self.rows[state].as_ref().map(|r| r[reading.index()])
    }

    pub fn row(&self, state: StateId) -> &Row {
        &self.rows[state]
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn name(&self, state: StateId) -> &str {
        &self.names[state]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The state entered at limit stages under the Hamkins-Lewis rules.
    /// Defaults to the start state when the program declares none.
    pub fn limit_state(&self) -> StateId {
        self.limit_state.unwrap_or(0)
    }

    pub fn declared_limit_state(&self) -> Option<StateId> {
        self.limit_state
    }

    /// True iff no transition depends on the input bit.
    pub fn ignores_input(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(|r| (0..4).all(|i| r[i] == r[i | 4]))
    }
}
