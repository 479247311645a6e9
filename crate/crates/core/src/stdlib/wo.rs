//! Wellfoundedness test for relation codes on supports below `WO_BOUND`.
//!
//! Cell 0 carries a work marker and an output flag. The output flag is 1
//! between passes and 0 during a pass, so it reads 0 next to the marker
//! exactly at limit stages.
//!
//! The work track at a pair cell `(a, c)` is set once `a` is ruled out as a
//! predecessor: `a` is outside the support or already ranked. The work track
//! at a support cell marks the element as ranked.
//!
//! Each pass looks for an unranked support element `b` with no live
//! predecessor, ranks it and starts over. A pass without progress repeats
//! the previous one exactly, so the next stage reached is a limit. There the
//! machine checks whether every support element got ranked and halts with
//! output 1 if so, 0 otherwise. A support element at `WO_BOUND` or above
//! sets work cell 1 and yields output 0.

use crate::machine::Move;
use crate::stdlib::gen::{halt, Act, Gen, Goto};
use crate::stdlib::relation::{pair_cell, support_cell};
use crate::Program;

/// Supports must lie below this bound.
pub const WO_BOUND: usize = 8;

const START: &str = "start";
const PASS: &str = "pass";
const END: &str = "end";

fn node(
    g: &mut Gen,
    name: &str,
    at: usize,
    f: impl Fn(bool, bool) -> (Option<bool>, Option<bool>, String, usize),
) {
    g.placed(name, at, |r| {
        let (work, out, dest, to) = f(r.input, r.work);
        Goto {
            work,
            out,
            dest,
            to,
        }
    });
}

fn marks(g: &mut Gen, tag: &str, row: usize, then: (&str, usize)) -> (String, usize) {
    let mut next = (then.0.to_string(), then.1);
    for c in (0..WO_BOUND).rev() {
        let name = format!("{tag}.{row}.{c}");
        let cont = next.clone();
        node(g, &name, pair_cell(row, c), move |_, _| {
            (Some(true), None, cont.0.clone(), cont.1)
        });
        next = (name, pair_cell(row, c));
    }
    next
}

pub fn wo_check() -> Program {
    let mut g = Gen::new(&[START, PASS]);

    // end of a pass: raise the flag at cell 0 and wait in PASS
    g.uniform(END, Act::write(None, Some(true), Move::Left, PASS));

    // init: rule out every non-member as a predecessor
    let end = (END.to_string(), 0);
    for a in (0..WO_BOUND).rev() {
        let cont = if a + 1 == WO_BOUND {
            end.clone()
        } else {
            (format!("init.{}", a + 1), support_cell(a + 1))
        };
        let (mark0, mark0_at) = marks(&mut g, "dead", a, (&cont.0, cont.1));
        node(&mut g, &format!("init.{a}"), support_cell(a), |input, _| {
            if input {
                (None, None, cont.0.clone(), cont.1)
            } else {
                (None, None, mark0.clone(), mark0_at)
            }
        });
    }
    let first_init = ("init.0".to_string(), support_cell(0));
    g.placed(START, 0, |_| Goto::new(Some(true), Some(true), &first_init));

    // passes
    for b in (0..WO_BOUND).rev() {
        let skip = if b + 1 == WO_BOUND {
            end.clone()
        } else {
            (format!("try.{}", b + 1), support_cell(b + 1))
        };
        let (rank_marks, rank_marks_at) = marks(&mut g, "ranked", b, (END, 0));
        let rank = format!("rank.{b}");
        node(&mut g, &rank, support_cell(b), |_, _| {
            (Some(true), None, rank_marks.clone(), rank_marks_at)
        });
        let mut after = (rank.clone(), support_cell(b));
        for a in (0..WO_BOUND).rev() {
            let name = format!("pred.{b}.{a}");
            let cont = after.clone();
            let skip = skip.clone();
            node(&mut g, &name, pair_cell(a, b), move |input, work| {
                if input && !work {
                    (None, None, skip.0.clone(), skip.1)
                } else {
                    (None, None, cont.0.clone(), cont.1)
                }
            });
            after = (name, pair_cell(a, b));
        }
        let first_pred = after;
        node(
            &mut g,
            &format!("try.{b}"),
            support_cell(b),
            |input, work| {
                if input && !work {
                    (None, None, first_pred.0.clone(), first_pred.1)
                } else {
                    (None, None, skip.0.clone(), skip.1)
                }
            },
        );
    }

    // final check at a limit
    let accept = "accept";
    g.uniform(accept, Act::write(None, Some(true), Move::Left, halt()));
    let reject = "reject";
    g.uniform(reject, Act::write(None, Some(false), Move::Left, halt()));
    let flag = "overflow";
    g.uniform(flag, Act::write(Some(true), None, Move::Left, halt()));
    node(&mut g, "check.bound", support_cell(WO_BOUND), |input, _| {
        if input {
            (None, None, flag.to_string(), 1)
        } else {
            (None, None, accept.to_string(), 0)
        }
    });
    let mut after = ("check.bound".to_string(), support_cell(WO_BOUND));
    for k in (0..WO_BOUND).rev() {
        let name = format!("check.{k}");
        let cont = after.clone();
        node(&mut g, &name, support_cell(k), move |input, work| {
            if input && !work {
                (None, None, reject.to_string(), 0)
            } else {
                (None, None, cont.0.clone(), cont.1)
            }
        });
        after = (name, support_cell(k));
    }
    let first_check = after;
    let first_try = ("try.0".to_string(), support_cell(0));
    let mut acts = Vec::with_capacity(8);
    for r in crate::machine::Reading::ALL {
        acts.push(match (r.work, r.out) {
            (true, true) => {
                let (mv, n) = g.toward(0, &first_try.0, first_try.1);
                Act::write(None, Some(false), mv, n)
            }
            (true, false) => {
                let (mv, n) = g.toward(0, &first_check.0, first_check.1);
                Act::keep(mv, n)
            }
            (false, _) => Act::keep(Move::Left, halt()),
        });
    }
    g.state(PASS, |r| acts[r.index()].clone());
    g.build()
}
