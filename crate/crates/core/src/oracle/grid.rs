//! Exhaustive grid search for a single fading state.

use serde::{Deserialize, Serialize};

use crate::allocators::Mode;
use crate::channel::{ChannelState, NoiseModel, PowerBudgets};
use crate::dual::SolveRequest;
use crate::error::{domain, Result};
use crate::oracle::{Oracle, OracleMethod, OracleReport};
use crate::rates::{
    r1_fixed_rho, r1_general, r2_fixed_rho, r2_general, Allocation, AllocationFixedRho, AllocationGeneral,
};

/// Grid resolution: the first pass uses `step_frac` of each axis range,
/// then `refine_levels` passes re-grid `+-2` steps around the incumbent
/// with `refine_points` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub step_frac: f64,
    pub refine_levels: usize,
    pub refine_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { step_frac: 0.02, refine_levels: 4, refine_points: 21 }
    }
}

fn axis(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if hi <= lo || points < 2 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| if i + 1 == points { hi } else { lo + step * i as f64 }).collect()
}

/// Maximise `f` over the box `[lo, hi]` by successive grids.
fn zoom_grid<const D: usize, F>(lo: [f64; D], hi: [f64; D], spec: &GridSpec, f: F) -> ([f64; D], f64, usize)
where
    F: Fn(&[f64; D]) -> f64,
{
    let first = (1.0 / spec.step_frac).round().max(1.0) as usize + 1;
    let (mut cur_lo, mut cur_hi) = (lo, hi);
    let mut best = (lo, f(&lo));
    let mut evals = 1;
    for level in 0..=spec.refine_levels {
        let points = if level == 0 { first } else { spec.refine_points };
        let axes: Vec<Vec<f64>> = (0..D).map(|d| axis(cur_lo[d], cur_hi[d], points)).collect();
        let mut idx = [0usize; D];
        'outer: loop {
            let mut x = [0.0; D];
            for d in 0..D {
                x[d] = axes[d][idx[d]];
            }
            let v = f(&x);
            evals += 1;
            if v > best.1 {
                best = (x, v);
            }
            for d in 0..D {
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
        for d in 0..D {
            let step = if axes[d].len() > 1 { axes[d][1] - axes[d][0] } else { 0.0 };
            cur_lo[d] = (best.0[d] - 2.0 * step).max(lo[d]);
            cur_hi[d] = (best.0[d] + 2.0 * step).min(hi[d]);
        }
    }
    (best.0, best.1, evals)
}

/// Grid maximum of `min(R1, R2)` for one state with instantaneous power
/// caps `P1 <= p1_bar`, `P2 <= p2_bar`. Correlation-optimised mode grids
/// `(P1, rho, P2)` with `rho in [0, 1]`; fixed-correlation mode grids
/// `(P1, P2)`.
pub fn grid_oracle_single_state(
    s: &ChannelState,
    n: &NoiseModel,
    budgets: &PowerBudgets,
    mode: Mode,
    spec: &GridSpec,
) -> OracleReport {
    let (point, value, evaluations) = match mode {
        Mode::Theorem1 => {
            let to_alloc =
                |x: &[f64; 3]| AllocationGeneral { p_r: (1.0 - x[1] * x[1]) * x[0], p_s: x[1] * x[1] * x[0], p2: x[2] };
            let (x, _, evals) = zoom_grid([0.0; 3], [budgets.p1_bar, 1.0, budgets.p2_bar], spec, |x| {
                let a = to_alloc(x);
                r1_general(&a, s, n).min(r2_general(&a, s, n))
            });
            let a = to_alloc(&x);
            (Allocation::General(a), r1_general(&a, s, n).min(r2_general(&a, s, n)), evals)
        }
        Mode::Theorem2 { rho } => {
            let to_alloc = |x: &[f64; 2]| AllocationFixedRho { p1: x[0], p2: x[1], rho };
            let (x, _, evals) = zoom_grid([0.0; 2], [budgets.p1_bar, budgets.p2_bar], spec, |x| {
                let a = to_alloc(x);
                r1_fixed_rho(&a, s, n).min(r2_fixed_rho(&a, s, n))
            });
            let a = to_alloc(&x);
            (Allocation::FixedRho(a), r1_fixed_rho(&a, s, n).min(r2_fixed_rho(&a, s, n)), evals)
        }
    };
    OracleReport { best_value: value, best_point: vec![point], evaluations, method: OracleMethod::GridSingleState }
}

/// [`grid_oracle_single_state`] behind the [`Oracle`] interface.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridOracle {
    pub spec: GridSpec,
}

impl Oracle for GridOracle {
    fn method(&self) -> OracleMethod {
        OracleMethod::GridSingleState
    }

    fn run(&self, req: &SolveRequest) -> Result<OracleReport> {
        if req.ensemble.len() != 1 {
            return Err(domain(format!("grid oracle needs one state, got {}", req.ensemble.len())));
        }
        let s = &req.ensemble.states()[0];
        Ok(grid_oracle_single_state(s, &req.noise, &req.budgets, req.mode, &self.spec))
    }
}
