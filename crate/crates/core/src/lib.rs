//! Simulation of infinite-time Turing machines across transfinite stages.
//!
//! Runs proceed by successor steps until the configuration repeats exactly;
//! the repeating stretch then determines the next limit snapshot. Repetition
//! among limit snapshots yields higher-order jumps (`w^2`, `w^3`, ...) or a
//! certified final loop.

pub mod asm;
pub mod engine;
pub mod lab;
pub mod machine;
pub mod ordinal;
pub mod report;
pub mod stdlib;

pub use machine::{Config, LimitConvention, Overlay, Program, RealTape, Snapshot};
pub use ordinal::Ordinal;
