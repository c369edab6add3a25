//! Interval preference relations: interval arithmetic with a neutral element,
//! consistency checks, least-squares repair, interval value scales and a
//! Deck-of-Cards elicitation session, plus a canonical JSON document format.

pub mod bridges;
pub mod error;
pub mod format;
pub mod interval;
pub mod ipr;
pub mod matrix;
pub mod repair;
pub mod scale;
pub mod session;

pub use error::{Error, Result};
pub use interval::{Interval, NeutralElement, DEFAULT_TOL};
pub use matrix::IntervalMatrix;
pub use repair::{ChainRepairSolution, RepairSolution};
pub use scale::{ConsecutiveChain, ValueScale};
pub use session::{ElicitationSession, Phase};
