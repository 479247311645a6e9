//! The machine model: programs over three binary tapes sharing one head,
//! configurations, the successor step and the limit rules.

mod limit;
mod program;
mod snapshot;
mod tape;

pub use limit::{limit_of_tail, LimitConvention, LimitError, TailSummary};
pub use program::{Action, Move, Program, ProgramError, Reading, Row, StateId};
pub use snapshot::{step, step_n, Config, Flip, MachineError, Snapshot, StepEffect};
pub(crate) use tape::splitmix64;
pub use tape::{GeneratedRule, InputReader, Overlay, RealTape, TapeError};
