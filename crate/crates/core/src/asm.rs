//! Text assembler for programs.
//!
//! ```text
//! source    := line*
//! line      := ws* (directive | rule)? ws* ('#' comment)? '\n'
//! directive := '.states' name+ | '.halt' name+ | '.limit' name
//! rule      := name ws pattern ws '->' ws writes ws move ws name
//! pattern   := bit3          (input, work, output; each '0', '1' or '*')
//! writes    := wbit wbit     (work, output; each '0', '1' or '_' = keep)
//! move      := 'L' | 'R'
//! ```
//!
//! A name is any run of non-blank characters without `#` that does not
//! start with `.` and is not `->`. States are numbered in order of first
//! appearance; `.states` lines (which may repeat) fix that order up front.
//! The first state is the start state. `HALT` is always a
//! halting state; `.halt` declares more. Every non-halting state must cover
//! all eight readings exactly once.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::machine::{Action, Move, Program, Reading, Row, StateId};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AsmError {
    #[error("line {line}: {msg}")]
    SyntaxError { line: usize, msg: String },
    #[error("state {state} has no transition for reading {bits}")]
    IncompleteTable { state: String, bits: String },
    #[error("line {line}: unknown state {name}")]
    UnknownState { line: usize, name: String },
}

pub const HALT: &str = "HALT";

#[derive(Default)]
struct Pending {
    cells: [Option<(Action, usize)>; 8],
    first_line: usize,
}

struct Assembler {
    order: Vec<String>,
    index: HashMap<String, StateId>,
    halting: Vec<bool>,
    pending: Vec<Pending>,
    first_use: Vec<usize>,
    limit: Option<(String, usize)>,
}

fn syntax(line: usize, msg: impl Into<String>) -> AsmError {
    AsmError::SyntaxError {
        line,
        msg: msg.into(),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.starts_with('.') && s != "->" && !s.contains('#')
}

impl Assembler {
    fn state(&mut self, name: &str, line: usize) -> Result<StateId, AsmError> {
        if !valid_name(name) {
            return Err(syntax(line, format!("bad state name {name:?}")));
        }
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        let i = self.order.len();
        self.order.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.halting.push(name == HALT);
        self.pending.push(Pending::default());
        self.first_use.push(line);
        Ok(i)
    }

    fn rule(&mut self, line: usize, parts: &[&str]) -> Result<(), AsmError> {
        let [name, pattern, arrow, writes, mv, next] = parts else {
            return Err(syntax(line, "expected `STATE IWO -> WO L|R NEXT`"));
        };
        if *arrow != "->" {
            return Err(syntax(line, "expected `->`"));
        }
        let pat: Vec<Option<bool>> = pattern
            .chars()
            .map(|c| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                _ => Err(syntax(line, format!("bad reading pattern {pattern:?}"))),
            })
            .collect::<Result<_, _>>()?;
        if pat.len() != 3 {
            return Err(syntax(
                line,
                format!("reading pattern {pattern:?} needs three bits"),
            ));
        }
        let wr: Vec<Option<bool>> = writes
            .chars()
            .map(|c| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '_' => Ok(None),
                _ => Err(syntax(line, format!("bad write spec {writes:?}"))),
            })
            .collect::<Result<_, _>>()?;
        if wr.len() != 2 {
            return Err(syntax(
                line,
                format!("write spec {writes:?} needs two symbols"),
            ));
        }
        let mv = match *mv {
            "L" => Move::Left,
            "R" => Move::Right,
            other => return Err(syntax(line, format!("bad move {other:?}"))),
        };
        let from = self.state(name, line)?;
        let to = self.state(next, line)?;
        let slot = &mut self.pending[from];
        if slot.first_line == 0 {
            slot.first_line = line;
        }
        for (i, r) in Reading::ALL.iter().enumerate() {
            let fits = [r.input, r.work, r.out]
                .iter()
                .zip(&pat)
                .all(|(bit, p)| p.is_none_or(|p| p == *bit));
            if !fits {
                continue;
            }
            let action = Action {
                work: wr[0].unwrap_or(r.work),
                out: wr[1].unwrap_or(r.out),
                mv,
                next: to,
            };
            match slot.cells[i] {
                Some((a, _)) if a == action => {}
                Some((_, prev)) => {
                    return Err(syntax(
                        line,
                        format!(
                            "reading {} of {name} already defined on line {prev}",
                            bits_text(i)
                        ),
                    ))
                }
                None => slot.cells[i] = Some((action, line)),
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<Program, AsmError> {
        if self.order.is_empty() {
            return Err(AsmError::IncompleteTable {
                state: "<start>".into(),
                bits: bits_text(0),
            });
        }
        let mut rows: Vec<Row> = Vec::with_capacity(self.order.len());
        for (i, p) in self.pending.iter().enumerate() {
            let defined = p.cells.iter().any(Option::is_some);
            if self.halting[i] {
                if defined {
                    return Err(syntax(
                        p.first_line,
                        format!("halting state {} has transitions", self.order[i]),
                    ));
                }
                rows.push(None);
                continue;
            }
            if !defined {
                return Err(AsmError::UnknownState {
                    line: self.first_use[i],
                    name: self.order[i].clone(),
                });
            }
            let mut row = [Action {
                work: false,
                out: false,
                mv: Move::Left,
                next: 0,
            }; 8];
            for (k, cell) in p.cells.iter().enumerate() {
                match cell {
                    Some((a, _)) => row[k] = *a,
                    None => {
                        return Err(AsmError::IncompleteTable {
                            state: self.order[i].clone(),
                            bits: bits_text(k),
                        })
                    }
                }
            }
            rows.push(Some(row));
        }
        let limit = match self.limit {
            None => None,
            Some((name, line)) => Some(
                *self
                    .index
                    .get(&name)
                    .ok_or(AsmError::UnknownState { line, name })?,
            ),
        };
        Program::new(self.order, rows, limit).map_err(|e| syntax(0, e.to_string()))
    }
}

fn bits_text(index: usize) -> String {
    let r = Reading::from_index(index);
    [r.input, r.work, r.out]
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect()
}

/// Assembles source text into a program.
pub fn assemble(src: &str) -> Result<Program, AsmError> {
    let mut asm = Assembler {
        order: Vec::new(),
        index: HashMap::new(),
        halting: Vec::new(),
        pending: Vec::new(),
        first_use: Vec::new(),
        limit: None,
    };
    for (n, raw) in src.lines().enumerate() {
        let line = n + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        match parts[0] {
            ".states" => {
                for name in &parts[1..] {
                    asm.state(name, line)?;
                }
            }
            ".halt" => {
                for name in &parts[1..] {
                    let i = asm.state(name, line)?;
                    asm.halting[i] = true;
                }
            }
            ".limit" => match parts.as_slice() {
                [_, name] => asm.limit = Some((name.to_string(), line)),
                _ => return Err(syntax(line, ".limit takes one state name")),
            },
            d if d.starts_with('.') => return Err(syntax(line, format!("unknown directive {d}"))),
            _ => asm.rule(line, &parts)?,
        }
    }
    asm.finish()
}

fn write_expr(written: bool, read: bool) -> char {
    match (written == read, written) {
        (true, _) => '_',
        (false, true) => '1',
        (false, false) => '0',
    }
}

/// All reading patterns, most general first.
fn patterns() -> Vec<[Option<bool>; 3]> {
    let opts = [None, Some(false), Some(true)];
    let mut out = Vec::with_capacity(27);
    for a in opts {
        for b in opts {
            for c in opts {
                out.push([a, b, c]);
            }
        }
    }
    out.sort_by_key(|p| std::cmp::Reverse(p.iter().filter(|x| x.is_none()).count()));
    out
}

/// Canonical source text for a program. `assemble(&disassemble(p)) == p`.
pub fn disassemble(program: &Program) -> String {
    let mut out = String::new();
    let names = program.names();
    for chunk in names.chunks(12) {
        let _ = writeln!(out, ".states {}", chunk.join(" "));
    }
    let halting: Vec<&str> = (0..program.state_count())
        .filter(|&s| program.is_halting(s) && names[s] != HALT)
        .map(|s| names[s].as_str())
        .collect();
    if !halting.is_empty() {
        let _ = writeln!(out, ".halt {}", halting.join(" "));
    }
    if let Some(l) = program.declared_limit_state() {
        let _ = writeln!(out, ".limit {}", names[l]);
    }
    let pats = patterns();
    for (s, row) in program.rows().iter().enumerate() {
        let Some(row) = row else { continue };
        let key = |i: usize| {
            let r = Reading::from_index(i);
            let a = row[i];
            (
                write_expr(a.work, r.work),
                write_expr(a.out, r.out),
                a.mv,
                a.next,
            )
        };
        let mut covered = [false; 8];
        for pat in &pats {
            let members: Vec<usize> = (0..8)
                .filter(|&i| {
                    let r = Reading::from_index(i);
                    [r.input, r.work, r.out]
                        .iter()
                        .zip(pat)
                        .all(|(b, p)| p.is_none_or(|p| p == *b))
                })
                .collect();
            if members.iter().any(|&i| covered[i]) {
                continue;
            }
            let k = key(members[0]);
            if members.iter().any(|&i| key(i) != k) {
                continue;
            }
            for &i in &members {
                covered[i] = true;
            }
            let pat_text: String = pat
                .iter()
                .map(|p| match p {
                    None => '*',
                    Some(true) => '1',
                    Some(false) => '0',
                })
                .collect();
            let mv = if k.2 == Move::Left { 'L' } else { 'R' };
            let _ = writeln!(
                out,
                "{} {} -> {}{} {} {}",
                names[s], pat_text, k.0, k.1, mv, names[k.3]
            );
        }
    }
    out
}
