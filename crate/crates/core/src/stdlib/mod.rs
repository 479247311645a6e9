//! Standard programs: clocks, a wellfoundedness test and a dovetailer.
//!
//! The small programs ship as assembler sources under `programs/`.

pub mod dovetail;
mod gen;
pub mod relation;
pub mod wo;

use crate::asm::assemble;
use crate::machine::Move;
use crate::Program;

pub use dovetail::{dovetailer, DovetailError, Layout, MAX_MEMBERS, MAX_MEMBER_STATES};
pub use relation::RelationCode;
pub use wo::{wo_check, WO_BOUND};

pub const IMMEDIATE_HALT_SRC: &str = include_str!("../../programs/immediate_halt.itm");
pub const FLASHER_SRC: &str = include_str!("../../programs/flasher.itm");
pub const OMEGA_CLOCK_SRC: &str = include_str!("../../programs/omega_clock.itm");

/// One step to `HALT`.
pub fn immediate_halt() -> Program {
    assemble(IMMEDIATE_HALT_SRC).expect("shipped source assembles")
}

/// Blinks output cell 0 forever.
pub fn flasher() -> Program {
    assemble(FLASHER_SRC).expect("shipped source assembles")
}

/// Halts at stage `w+1` on every input.
pub fn omega_clock() -> Program {
    assemble(OMEGA_CLOCK_SRC).expect("shipped source assembles")
}

/// Counts down `n` steps and halts, at stage `n`, on every input.
///
/// # Panics
/// If `n == 0`.
pub fn succ_clock(n: usize) -> Program {
    assert!(n >= 1, "a clock needs at least one step");
    let mut g = gen::Gen::new(&[]);
    for i in 0..n {
        let next = if i + 1 == n {
            gen::halt()
        } else {
            format!("t{}", i + 1)
        };
        g.uniform(&format!("t{i}"), gen::Act::keep(Move::Left, next));
    }
    g.build()
}

/// Names accepted by [`by_name`].
pub const CATALOG: &[&str] = &[
    "immediate_halt",
    "flasher",
    "omega_clock",
    "succ_clock:N",
    "wo_check",
];

/// Looks up a standard program by catalog name.
pub fn by_name(name: &str) -> Option<Program> {
    match name {
        "immediate_halt" => Some(immediate_halt()),
        "flasher" => Some(flasher()),
        "omega_clock" => Some(omega_clock()),
        "wo_check" => Some(wo_check()),
        _ => {
            let n: usize = name.strip_prefix("succ_clock:")?.parse().ok()?;
            (n >= 1).then(|| succ_clock(n))
        }
    }
}
