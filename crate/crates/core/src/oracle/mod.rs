//! Independent optimisers and residual checks for validating the closed
//! forms and the dual search.
//!
//! The three optimisers share the [`Oracle`] interface so a test can swap
//! one for another:
//!
//! * [`GridOracle`]: exhaustive grid with zoom refinement, single state
//! * [`SubgradientOracle`]: projected supergradient ascent, any ensemble
//! * [`LambdaSweepOracle`]: weak-duality upper bound over a weight grid

use serde::{Deserialize, Serialize};

use crate::dual::SolveRequest;
use crate::error::Result;
use crate::rates::Allocation;

mod concavity;
mod grid;
mod kkt;
mod subgradient;
mod sweep;

pub use concavity::{concavity_probe, ConcavityReport, RateFunction, Witness};
pub use grid::{grid_oracle_single_state, GridOracle, GridSpec};
pub use kkt::{kkt_residuals, KktResiduals};
pub use subgradient::{subgradient_oracle, SubgradientConfig, SubgradientOracle};
pub use sweep::{lambda_sweep_oracle, LambdaSweepOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    GridSingleState,
    ProjectedSubgradient,
    LambdaSweep,
}

/// Best value found by an oracle and the policy achieving it.
///
/// `best_value` is recomputed from `best_point` before the report is
/// returned. For the lambda sweep it is the minimising weight's dual value
/// and `best_point` is the inner maximiser at that weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub best_value: f64,
    pub best_point: Vec<Allocation>,
    pub evaluations: usize,
    pub method: OracleMethod,
}

/// An independent estimate of the max-min rate of a request.
pub trait Oracle {
    fn method(&self) -> OracleMethod;
    fn run(&self, req: &SolveRequest) -> Result<OracleReport>;
}
