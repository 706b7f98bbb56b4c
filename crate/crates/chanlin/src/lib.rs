//! Consistency checking for message-passing executions over FIFO channels.
//!
//! Given per-thread sequences of send/receive events and channel capacities
//! (0 = synchronous), decide whether some interleaving is a valid execution,
//! optionally constrained by a reads-from relation pairing sends with receives.

pub mod fastpath;
pub mod format;
pub mod frontier;
pub mod generators;
pub mod model;
pub mod oracle;
pub mod saturation;
pub mod smt;
pub mod topology;
pub mod twosat;
pub mod verdict;
pub mod wellformed;

pub use format::{parse_instance, serialize_instance, ParseError};
pub use frontier::{solve_vch, solve_vch_saturated, solve_vchrf, solve_vchrf_saturated};
pub use model::{classify_channels, Capacity, Channel, ChannelClass, Instance, Kind, Op, RawEvent, ReadsFrom};
pub use verdict::{Outcome, SolveError, Verdict};
pub use wellformed::{check_well_formed, derive_abstract, verify_witness, Violation, ViolationKind};
