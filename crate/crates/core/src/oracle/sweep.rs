//! Weak-duality bound: `min over l of max_policy l E R1 + (1 - l) E R2`.

use crate::dual::{weighted_optimum, SolveRequest};
use crate::error::Result;
use crate::oracle::{Oracle, OracleMethod, OracleReport};

/// Evaluate the weighted optimum on `l in {0, 1/steps, ..., 1}` and return
/// the smallest value, an upper bound on the max-min rate.
pub fn lambda_sweep_oracle(req: &SolveRequest, steps: usize) -> Result<OracleReport> {
    let steps = steps.max(1);
    let mut best: Option<(f64, Vec<_>)> = None;
    let mut evaluations = 0;
    for i in 0..=steps {
        let l = i as f64 / steps as f64;
        let sol = weighted_optimum(req, 1.0 - l)?;
        evaluations += sol.diagnostics.sweeps;
        let rates = crate::rates::ensemble_rate(&sol.policy, &req.ensemble, &req.noise)?;
        let v = l * rates.r1 + (1.0 - l) * rates.r2;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, sol.policy));
        }
    }
    let (best_value, best_point) = best.expect("nonempty grid");
    Ok(OracleReport { best_value, best_point, evaluations, method: OracleMethod::LambdaSweep })
}

/// [`lambda_sweep_oracle`] behind the [`Oracle`] interface.
#[derive(Debug, Clone, Copy)]
pub struct LambdaSweepOracle {
    pub steps: usize,
}

impl Default for LambdaSweepOracle {
    fn default() -> Self {
        Self { steps: 100 }
    }
}

impl Oracle for LambdaSweepOracle {
    fn method(&self) -> OracleMethod {
        OracleMethod::LambdaSweep
    }

    fn run(&self, req: &SolveRequest) -> Result<OracleReport> {
        lambda_sweep_oracle(req, self.steps)
    }
}
