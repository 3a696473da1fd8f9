//! Optimal power allocation for the fading decode-and-forward full-duplex
//! relay channel.
//!
//! The source sends to the relay and the destination; the relay decodes
//! and cooperates coherently with the source. Given average power budgets
//! and a sampled fading ensemble, the crate finds the allocation policy
//! maximising `min(E R1, E R2)` where `R1` is the destination rate and `R2`
//! the relay decoding rate.
//!
//! * [`channel`]: gains, noise, budgets and seeded Rayleigh ensembles
//! * [`rates`]: rate expressions in both power coordinate systems
//! * [`allocators`]: per-state closed forms of the three KKT cases
//! * [`dual`]: multiplier search and case classification
//! * [`oracle`]: independent optimisers and residual checks
//! * [`experiments`]: config-driven sweeps and curves

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocators;
pub mod channel;
pub mod dual;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod poly;
pub mod rates;

pub use allocators::{CaseLabel, Mode, Multipliers};
pub use channel::{ChannelState, FadingEnsemble, NoiseModel, PowerBudgets};
pub use dual::{classify_and_solve, SolveRequest, SolveResult};
pub use error::{Error, Result};
pub use rates::{Allocation, AllocationFixedRho, AllocationGeneral, EnsembleRates};
