//! Emits assembler source for generated programs.
//!
//! States are plain names. Two helpers cover head movement:
//! positional routes (the head position is known statically) and
//! residue-tracked states (only the position modulo a block stride is known).

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::asm::{assemble, HALT};
use crate::machine::{Move, Program, Reading};

/// What one state does on one reading. `None` writes keep the bit read.
#[derive(Clone, Debug)]
pub(crate) struct Act {
    pub work: Option<bool>,
    pub out: Option<bool>,
    pub mv: Move,
    pub next: String,
}

impl Act {
    pub fn keep(mv: Move, next: impl Into<String>) -> Act {
        Act {
            work: None,
            out: None,
            mv,
            next: next.into(),
        }
    }

    pub fn write(work: Option<bool>, out: Option<bool>, mv: Move, next: impl Into<String>) -> Act {
        Act {
            work,
            out,
            mv,
            next: next.into(),
        }
    }
}

/// A write followed by a trip to the placed state `dest` at cell `to`.
#[derive(Clone, Debug)]
pub(crate) struct Goto {
    pub work: Option<bool>,
    pub out: Option<bool>,
    pub dest: String,
    pub to: usize,
}

impl Goto {
    pub fn new(work: Option<bool>, out: Option<bool>, dest: &(String, usize)) -> Goto {
        Goto {
            work,
            out,
            dest: dest.0.clone(),
            to: dest.1,
        }
    }
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

fn wr(b: Option<bool>) -> char {
    b.map_or('_', bit)
}

#[derive(Default)]
pub(crate) struct Gen {
    header: Vec<String>,
    halts: Vec<String>,
    body: String,
    defined: HashSet<String>,
}

impl Gen {
    pub fn new(first_states: &[&str]) -> Gen {
        Gen {
            header: first_states.iter().map(|s| s.to_string()).collect(),
            ..Gen::default()
        }
    }

    /// Declares an extra halting state besides `HALT`.
    pub fn halting(&mut self, name: &str) -> String {
        if !self.halts.iter().any(|h| h == name) {
            self.halts.push(name.to_string());
        }
        name.to_string()
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.defined.contains(name)
    }

    /// Defines `name` by its action on each reading. Redefinitions are ignored.
    pub fn state(&mut self, name: &str, f: impl Fn(Reading) -> Act) {
        if !self.defined.insert(name.to_string()) {
            return;
        }
        for r in Reading::ALL {
            let a = f(r);
            let mv = if a.mv == Move::Left { 'L' } else { 'R' };
            let _ = writeln!(
                self.body,
                "{name} {}{}{} -> {}{} {mv} {}",
                bit(r.input),
                bit(r.work),
                bit(r.out),
                wr(a.work),
                wr(a.out),
                a.next
            );
        }
    }

    /// A state that does the same thing on every reading.
    pub fn uniform(&mut self, name: &str, act: Act) {
        self.state(name, |_| act.clone());
    }

    /// State to enter at cell `from` in order to reach `dest` at cell `to`
    /// by plain moves. Chains are shared between routes to the same target.
    pub fn route(&mut self, dest: &str, to: usize, from: usize) -> String {
        if from == to {
            return dest.to_string();
        }
        let name = format!("{dest}<{from}");
        if !self.is_defined(&name) {
            let (mv, nxt) = if to > from {
                (Move::Right, from + 1)
            } else {
                (Move::Left, from - 1)
            };
            let next = self.route(dest, to, nxt);
            self.uniform(&name, Act::keep(mv, next));
        }
        name
    }

    /// Move one cell from `at` toward `to`, then continue to `dest`.
    /// When already there, steps left (or right at cell 0) and comes back.
    pub fn toward(&mut self, at: usize, dest: &str, to: usize) -> (Move, String) {
        let (mv, landed) = if to > at {
            (Move::Right, at + 1)
        } else if at == 0 {
            (Move::Left, 0)
        } else {
            (Move::Left, at - 1)
        };
        (mv, self.route(dest, to, landed))
    }

    /// Defines `name` sitting at cell `at`; each reading writes and then
    /// heads for another placed state.
    pub fn placed(&mut self, name: &str, at: usize, f: impl Fn(Reading) -> Goto) {
        if self.is_defined(name) {
            return;
        }
        let mut acts = Vec::with_capacity(8);
        for r in Reading::ALL {
            let go = f(r);
            let (mv, next) = self.toward(at, &go.dest, go.to);
            acts.push(Act::write(go.work, go.out, mv, next));
        }
        self.state(name, |r| acts[r.index()].clone());
    }

    pub fn source(&self) -> String {
        let mut out = String::new();
        if !self.header.is_empty() {
            let _ = writeln!(out, ".states {}", self.header.join(" "));
        }
        if !self.halts.is_empty() {
            let _ = writeln!(out, ".halt {}", self.halts.join(" "));
        }
        out.push_str(&self.body);
        out
    }

    pub fn build(&self) -> Program {
        assemble(&self.source()).expect("generated source assembles")
    }
}

pub(crate) fn halt() -> String {
    HALT.to_string()
}
