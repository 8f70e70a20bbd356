//! Simulator for a self-stabilizing ranking population protocol.
//!
//! Agents hold a rank in `[1, n]`. From any configuration the protocol
//! reaches one where the ranks form a permutation of `[1, n]` and then never
//! changes a rank again. The trade-off knob `rho` buys faster collision
//! detection with more states per agent.

pub mod accounting;
pub mod blocks;
pub mod detect;
pub mod error;
pub mod harness;
pub mod params;
pub mod protocol;
pub mod rank;
pub mod rng;
pub mod state;
pub mod target;

pub use error::{Error, ParamError, Result};
pub use params::{Constants, DetectWindowRule, ProtocolParams};
pub use protocol::{in_initialized_set, in_safe_set, interact};
pub use rng::RngStream;
pub use state::{AgentState, Configuration, Mode, RankList};
pub use target::{BaselineFinder, FinderRegistry, TargetFinder};
