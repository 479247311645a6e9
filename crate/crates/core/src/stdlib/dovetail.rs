//! Lockstep simulation of a finite table of programs by one program.
//!
//! # Tape layout
//!
//! The tape is cut into blocks of `stride = 3k + 2` cells for a table of
//! `k` members; block `j` stands for cell `j` of every member. Slots within
//! a block (work track / output track):
//!
//! | slot       | input      | work                  | output                 |
//! |------------|------------|-----------------------|------------------------|
//! | `0`        | input bit  | origin flag (block 0) | round flag (block 0)   |
//! | `1`        |            | block visited         | copy of the result     |
//! | `2 + 3i`   |            | member `i` work cell  | member `i` output cell |
//! | `3 + 3i`   |            | member `i` head here  | complement of that     |
//! | `4 + 3i`   |            | member `i` in state j | complement of that     |
//!
//! Slot `4 + 3i` of block `j` refers to state `j` of member `i`, so the
//! first `state_blocks` blocks are set up before the first round.
//!
//! The input of the simulating program is the members' input spread to
//! residue 0 (see [`Layout::input_for`]); its result is the output track at
//! residue 1 (see [`Layout::result`]).
//!
//! # Rounds and limits
//!
//! A round steps every non-halted member once, in table order. When the
//! designated member enters a halting state, its output cells are copied to
//! slot 1 of every visited block and the program halts.
//!
//! The start state sits at cell 0 at the start of every round with the round
//! flag up; the flag is down during the round. At a limit the start state
//! therefore reads the origin flag next to a lowered round flag. Member
//! cells already hold their limit values there. A complement flag holds 0 at
//! the limit iff its marker was present cofinally often, so the lowest such
//! flag restores the member's limit head and state.
//!
//! # Cost
//!
//! A round for `k` members whose heads stay within the first `v` visited
//! blocks takes at most [`Layout::round_bound`] steps. Setup and the final
//! copy are bounded by [`Layout::setup_bound`] and [`Layout::copy_bound`].

use serde::Serialize;
use thiserror::Error;

use crate::machine::{Move, Overlay, Reading, RealTape};
use crate::stdlib::gen::{halt, Act, Gen, Goto};
use crate::Program;

pub const MAX_MEMBERS: usize = 4;
pub const MAX_MEMBER_STATES: usize = 16;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DovetailError {
    #[error("the table is empty")]
    EmptyTable,
    #[error("table too large: {members} members, {states} states in the largest (limits {MAX_MEMBERS} and {MAX_MEMBER_STATES})")]
    TableTooLarge { members: usize, states: usize },
    #[error("designated member {0} is not in the table")]
    NoSuchMember(usize),
}

/// Geometry of the simulating tape for a given table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub members: usize,
    pub stride: usize,
    pub state_blocks: usize,
}

impl Layout {
    pub fn for_table(table: &[Program]) -> Layout {
        let members = table.len();
        Layout {
            members,
            stride: 3 * members + 2,
            state_blocks: table.iter().map(Program::state_count).max().unwrap_or(1),
        }
    }

    pub fn work_slot(&self, i: usize) -> usize {
        2 + 3 * i
    }

    pub fn head_slot(&self, i: usize) -> usize {
        3 + 3 * i
    }

    pub fn state_slot(&self, i: usize) -> usize {
        4 + 3 * i
    }

    pub fn cell(&self, block: usize, slot: usize) -> usize {
        block * self.stride + slot
    }

    /// The simulating program's input for member input `y`.
    pub fn input_for(&self, y: RealTape) -> RealTape {
        RealTape::strided(y, self.stride, 0).expect("stride is positive")
    }

    /// The copied result, as member cells.
    pub fn result(&self, output: &Overlay) -> Overlay {
        Overlay::from_cells(
            output
                .ones()
                .filter(|c| c % self.stride == 1)
                .map(|c| c / self.stride),
        )
    }

    /// Member `i`'s cells as stored on one track of the simulating tape.
    pub fn member_cells(&self, i: usize, track: &Overlay) -> Overlay {
        let slot = self.work_slot(i);
        Overlay::from_cells(
            track
                .ones()
                .filter(|c| c % self.stride == slot)
                .map(|c| c / self.stride),
        )
    }

    /// Steps of one round when every member head stays below block
    /// `visited`.
    pub fn round_bound(&self, visited: usize) -> u64 {
        let (k, s, q, v) = (
            self.members as u64,
            self.stride as u64,
            self.state_blocks as u64,
            visited.max(1) as u64,
        );
        k * s * (5 * q + 2 * v + 6) + 1
    }

    pub fn setup_bound(&self) -> u64 {
        2 * (self.state_blocks * self.stride) as u64 + 2
    }

    pub fn copy_bound(&self, visited: usize) -> u64 {
        3 * ((visited as u64) + 1) * self.stride as u64 + 2
    }
}

const START: &str = "start";
const END: &str = "end";

fn res(label: &str, r: usize) -> String {
    format!("{label}%{r}")
}

struct Dv<'t> {
    g: Gen,
    lay: Layout,
    table: &'t [Program],
    designated: usize,
}

type Place = (String, usize);

impl Dv<'_> {
    fn s(&self) -> usize {
        self.lay.stride
    }

    fn round_entry(&self, i: usize) -> Place {
        if i == self.lay.members {
            (END.into(), 0)
        } else {
            (format!("q{i}.0"), self.lay.cell(0, self.lay.state_slot(i)))
        }
    }

    fn limit_entry(&self, i: usize) -> Place {
        if i == self.lay.members {
            (END.into(), 0)
        } else {
            (
                format!("lq{i}.0.n"),
                self.lay.cell(0, self.lay.state_slot(i)),
            )
        }
    }

    fn copy_entry(&self) -> Place {
        (res("cp", 0), 0)
    }

    /// Walk left to cell 0, then on to `dest`.
    fn seek(&mut self, label: &str, dest: &Place) {
        let s = self.s();
        let found = self.g.route(&dest.0, dest.1, 1);
        for r in 0..s {
            let back = res(label, (r + s - 1) % s);
            if r == 0 {
                let found = found.clone();
                self.g.state(&res(label, 0), move |rd| {
                    if rd.work {
                        Act::keep(Move::Right, found.clone())
                    } else {
                        Act::keep(Move::Left, back.clone())
                    }
                });
            } else {
                self.g.uniform(&res(label, r), Act::keep(Move::Left, back));
            }
        }
    }

    fn setup(&mut self) -> Place {
        let lay = self.lay;
        let mut writes: Vec<(usize, Option<bool>, Option<bool>)> = Vec::new();
        for b in 0..lay.state_blocks {
            writes.push((lay.cell(b, 1), Some(true), None));
            for i in 0..lay.members {
                for slot in [lay.head_slot(i), lay.state_slot(i)] {
                    if b == 0 {
                        writes.push((lay.cell(b, slot), Some(true), None));
                    } else {
                        writes.push((lay.cell(b, slot), None, Some(true)));
                    }
                }
            }
        }
        writes.sort_by_key(|w| w.0);
        let mut next: Place = (END.into(), 0);
        for &(at, w, o) in writes.iter().rev() {
            let name = format!("init.{at}");
            let cont = next.clone();
            self.g.placed(&name, at, |_| Goto::new(w, o, &cont));
            next = (name, at);
        }
        next
    }

    fn member(&mut self, i: usize) {
        let lay = self.lay;
        let s = self.s();
        let table = self.table;
        let p = &table[i];
        let q_count = p.state_count();

        // locate the state marker
        for b in 0..lay.state_blocks {
            let found = if b >= q_count {
                (halt_stuck(&mut self.g), 0)
            } else if p.is_halting(b) {
                if i == self.designated {
                    self.copy_entry()
                } else {
                    self.round_entry(i + 1)
                }
            } else {
                (res(&format!("h{i}.{b}"), 0), 0)
            };
            let miss = if b + 1 < lay.state_blocks {
                (
                    format!("q{i}.{}", b + 1),
                    lay.cell(b + 1, lay.state_slot(i)),
                )
            } else {
                (halt_stuck(&mut self.g), 0)
            };
            self.g
                .placed(&format!("q{i}.{b}"), lay.cell(b, lay.state_slot(i)), |r| {
                    if r.work {
                        Goto::new(None, None, &found)
                    } else {
                        Goto::new(None, None, &miss)
                    }
                });
        }

        let (ws, hs) = (lay.work_slot(i), lay.head_slot(i));
        for q in (0..q_count).filter(|&q| !p.is_halting(q)) {
            // find the head marker, read the member cell, then the input
            let h = format!("h{i}.{q}");
            for r in 0..s {
                let right = res(&h, (r + 1) % s);
                let at_cell = res(&format!("c{i}.{q}"), ws);
                self.g.state(&res(&h, r), move |rd| {
                    if r == hs && rd.work {
                        Act::keep(Move::Left, at_cell.clone())
                    } else {
                        Act::keep(Move::Right, right.clone())
                    }
                });
            }
            let xl = |w: bool, o: bool| format!("x{i}.{q}.{}{}", w as u8, o as u8);
            self.g.state(&res(&format!("c{i}.{q}"), ws), |rd| {
                Act::keep(Move::Left, res(&xl(rd.work, rd.out), ws - 1))
            });
            for (w, o) in [(false, false), (false, true), (true, false), (true, true)] {
                let x = xl(w, o);
                for r in 1..ws {
                    self.g
                        .uniform(&res(&x, r), Act::keep(Move::Left, res(&x, r - 1)));
                }
                let mut acts = Vec::with_capacity(8);
                for rd in Reading::ALL {
                    let a = p
                        .action(
                            q,
                            Reading {
                                input: rd.input,
                                work: w,
                                out: o,
                            },
                        )
                        .expect("non-halting state");
                    let origin = rd.work;
                    let key = format!(
                        "{i}.{q}.{}{}{}{}.{}",
                        a.work as u8,
                        a.out as u8,
                        if a.mv == Move::Left { 'L' } else { 'R' },
                        a.next,
                        if origin { 'o' } else { 'n' }
                    );
                    self.write_back(i, q, a, origin, &key);
                    acts.push(Act::keep(Move::Right, res(&format!("w{key}"), 1)));
                }
                self.g.state(&res(&x, 0), |rd| acts[rd.index()].clone());
            }
        }
    }

    fn write_back(
        &mut self,
        i: usize,
        q: usize,
        a: crate::machine::Action,
        origin: bool,
        key: &str,
    ) {
        let lay = self.lay;
        let s = self.s();
        let (ws, hs) = (lay.work_slot(i), lay.head_slot(i));
        let w = format!("w{key}");
        if self.g.is_defined(&res(&w, 1)) {
            return;
        }
        for r in 1..ws {
            self.g
                .uniform(&res(&w, r), Act::keep(Move::Right, res(&w, r + 1)));
        }
        let m = format!("m{key}");
        self.g.uniform(
            &res(&w, ws),
            Act::write(Some(a.work), Some(a.out), Move::Right, res(&m, hs)),
        );

        let u = format!("{i}.{q}.{}", a.next);
        let seek = format!("s{u}");
        match (a.mv, origin) {
            (Move::Left, true) => self
                .g
                .uniform(&res(&m, hs), Act::keep(Move::Left, res(&seek, hs - 1))),
            (Move::Left, false) => {
                let l = format!("hl{u}");
                self.g.uniform(
                    &res(&m, hs),
                    Act::write(Some(false), Some(true), Move::Left, res(&l, hs - 1)),
                );
                for r in (0..s).filter(|&r| r != hs) {
                    let next = if (r + s - 1) % s == hs {
                        res(&format!("hls{u}"), hs)
                    } else {
                        res(&l, (r + s - 1) % s)
                    };
                    self.g.uniform(&res(&l, r), Act::keep(Move::Left, next));
                }
                self.g.uniform(
                    &res(&format!("hls{u}"), hs),
                    Act::write(Some(true), Some(false), Move::Left, res(&seek, hs - 1)),
                );
            }
            (Move::Right, _) => {
                let rr = format!("hr{u}");
                self.g.uniform(
                    &res(&m, hs),
                    Act::write(Some(false), Some(true), Move::Right, res(&rr, hs + 1)),
                );
                for r in (hs + 1..s).chain([0]) {
                    let nr = (r + 1) % s;
                    let next = if nr == 1 {
                        res(&format!("hrv{u}"), 1)
                    } else {
                        res(&rr, nr)
                    };
                    self.g.uniform(&res(&rr, r), Act::keep(Move::Right, next));
                }
                let (go, fresh) = (format!("hrg{u}"), format!("hri{u}"));
                let set = res(&format!("hrs{u}"), hs);
                let go2 = if hs == 2 { set.clone() } else { res(&go, 2) };
                let fresh2 = res(&fresh, 2);
                self.g.state(&res(&format!("hrv{u}"), 1), |rd| {
                    if rd.work {
                        Act::keep(Move::Right, go2.clone())
                    } else {
                        Act::write(Some(true), None, Move::Right, fresh2.clone())
                    }
                });
                for r in 2..hs {
                    let next = if r + 1 == hs {
                        set.clone()
                    } else {
                        res(&go, r + 1)
                    };
                    self.g.uniform(&res(&go, r), Act::keep(Move::Right, next));
                }
                self.g.uniform(
                    &set,
                    Act::write(Some(true), Some(false), Move::Left, res(&seek, hs - 1)),
                );
                for r in 2..s {
                    let (wk, ot) = if r == hs {
                        (Some(true), Some(false))
                    } else if (0..lay.members).any(|j| lay.head_slot(j) == r) {
                        (None, Some(true))
                    } else {
                        (None, None)
                    };
                    let act = if r + 1 == s {
                        Act::write(wk, ot, Move::Left, res(&seek, r - 1))
                    } else {
                        Act::write(wk, ot, Move::Right, res(&fresh, r + 1))
                    };
                    self.g.uniform(&res(&fresh, r), act);
                }
            }
        }
        if !self.g.is_defined(&res(&seek, 0)) {
            let dest = self.after_step(i, q, a.next);
            self.seek(&seek, &dest);
        }
    }

    /// Where to go once the member's tape is updated and the head is back at
    /// cell 0: move the state marker if needed, then the next member.
    fn after_step(&mut self, i: usize, q: usize, next: usize) -> Place {
        let lay = self.lay;
        let then = if self.table[i].is_halting(next) && i == self.designated {
            self.copy_entry()
        } else {
            self.round_entry(i + 1)
        };
        if next == q {
            return then;
        }
        let set = (format!("set{i}.{next}"), lay.cell(next, lay.state_slot(i)));
        self.g
            .placed(&set.0, set.1, |_| Goto::new(Some(true), Some(false), &then));
        let clr = (format!("clr{i}.{q}.{next}"), lay.cell(q, lay.state_slot(i)));
        self.g
            .placed(&clr.0, clr.1, |_| Goto::new(Some(false), Some(true), &set));
        clr
    }

    fn copy(&mut self) {
        let s = self.s();
        let ws = self.lay.work_slot(self.designated);
        self.g
            .uniform(&res("cp", 0), Act::keep(Move::Right, res("cp", 1)));
        let fwd = res("cf", 2);
        self.g.state(&res("cp", 1), |rd| {
            if rd.work {
                Act::keep(Move::Right, fwd.clone())
            } else {
                Act::keep(Move::Left, halt())
            }
        });
        for r in 2..ws {
            self.g
                .uniform(&res("cf", r), Act::keep(Move::Right, res("cf", r + 1)));
        }
        self.g.state(&res("cf", ws), |rd| {
            Act::keep(Move::Left, res(if rd.out { "cb1" } else { "cb0" }, ws - 1))
        });
        for (label, bit) in [("cb0", false), ("cb1", true)] {
            for r in 2..ws {
                self.g
                    .uniform(&res(label, r), Act::keep(Move::Left, res(label, r - 1)));
            }
            self.g.uniform(
                &res(label, 1),
                Act::write(None, Some(bit), Move::Right, res("cn", 2)),
            );
        }
        for r in (2..s).chain([0]) {
            let nr = (r + 1) % s;
            let next = if nr == 1 { res("cp", 1) } else { res("cn", nr) };
            self.g.uniform(&res("cn", r), Act::keep(Move::Right, next));
        }
    }

    fn limit(&mut self, i: usize) {
        let lay = self.lay;
        let s = self.s();
        let hs = lay.head_slot(i);
        let head_scan = (res(&format!("lh{i}.n"), 0), 0);

        // lowest state flag that dipped cofinally
        let fix_state = (format!("lqf{i}"), lay.cell(0, lay.state_slot(i)));
        self.g.placed(&fix_state.0, fix_state.1, |_| {
            Goto::new(Some(true), Some(false), &head_scan)
        });
        for b in 0..lay.state_blocks {
            for found in [false, true] {
                let tag = |f: bool| if f { 'y' } else { 'n' };
                let next = |f: bool| {
                    if b + 1 < lay.state_blocks {
                        (
                            format!("lq{i}.{}.{}", b + 1, tag(f)),
                            lay.cell(b + 1, lay.state_slot(i)),
                        )
                    } else if f {
                        head_scan.clone()
                    } else {
                        fix_state.clone()
                    }
                };
                self.g.placed(
                    &format!("lq{i}.{b}.{}", tag(found)),
                    lay.cell(b, lay.state_slot(i)),
                    |rd| {
                        if !found && !rd.out {
                            Goto::new(Some(true), Some(false), &next(true))
                        } else {
                            Goto::new(Some(false), Some(true), &next(found))
                        }
                    },
                );
            }
        }

        // lowest head flag that dipped cofinally, over visited blocks
        let after = self.limit_entry(i + 1);
        let fix_head = (format!("lhf{i}"), lay.cell(0, hs));
        self.g.placed(&fix_head.0, fix_head.1, |_| {
            Goto::new(Some(true), Some(false), &after)
        });
        for found in [false, true] {
            let label = format!("lh{i}.{}", if found { 'y' } else { 'n' });
            let seek = format!("ls{i}.{}", if found { 'y' } else { 'n' });
            let done = if found {
                after.clone()
            } else {
                fix_head.clone()
            };
            self.seek(&seek, &done);
            for r in 0..s {
                let right =
                    |f: bool| res(&format!("lh{i}.{}", if f { 'y' } else { 'n' }), (r + 1) % s);
                let back = res(&seek, 0);
                self.g.state(&res(&label, r), |rd| {
                    if r == 1 && !rd.work {
                        Act::keep(Move::Left, back.clone())
                    } else if r == hs && !found && !rd.out {
                        Act::write(Some(true), Some(false), Move::Right, right(true))
                    } else if r == hs {
                        Act::write(Some(false), Some(true), Move::Right, right(found))
                    } else {
                        Act::keep(Move::Right, right(found))
                    }
                });
            }
        }
    }
}

fn halt_stuck(g: &mut Gen) -> String {
    g.halting("stuck")
}

/// Builds the simulating program; it halts when member `designated` does.
pub fn dovetailer(table: &[Program], designated: usize) -> Result<Program, DovetailError> {
    if table.is_empty() {
        return Err(DovetailError::EmptyTable);
    }
    let lay = Layout::for_table(table);
    if lay.members > MAX_MEMBERS || lay.state_blocks > MAX_MEMBER_STATES {
        return Err(DovetailError::TableTooLarge {
            members: lay.members,
            states: lay.state_blocks,
        });
    }
    if designated >= table.len() {
        return Err(DovetailError::NoSuchMember(designated));
    }
    let mut dv = Dv {
        g: Gen::new(&[START]),
        lay,
        table,
        designated,
    };
    let init = dv.setup();
    let round = dv.round_entry(0);
    let lim = dv.limit_entry(0);
    dv.g.placed(START, 0, |rd| match (rd.work, rd.out) {
        (false, _) => Goto::new(Some(true), None, &init),
        (true, true) => Goto::new(None, Some(false), &round),
        (true, false) => Goto::new(None, None, &lim),
    });
    dv.g.uniform(END, Act::write(None, Some(true), Move::Left, START));
    for i in 0..lay.members {
        dv.member(i);
        dv.limit(i);
    }
    dv.copy();
    Ok(dv.g.build())
}
