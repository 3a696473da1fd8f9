// Multiplier search and case classification on a sampled ensemble.

use df_relay::channel::sample_ensemble;
use df_relay::{classify_and_solve, Mode, NoiseModel, PowerBudgets, SolveRequest};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let e = sample_ensemble(11, 200, 0.25)?;
    let n = NoiseModel::from_total(1.0, 1.6)?;
    for (p1, p2) in [(0.5, 1.0), (3.0, 1.0), (3.0, 0.2)] {
        for mode in [Mode::Theorem1, Mode::Theorem2 { rho: 0.3 }] {
            let req = SolveRequest::new(e.clone(), n, PowerBudgets::new(p1, p2)?, mode)?;
            let out = classify_and_solve(&req)?;
            let m = out.multipliers;
            println!(
                "{mode:?} P1_bar {p1} P2_bar {p2}: {} rate {:.5} (R1 {:.5}, R2 {:.5}) l = ({:.4}, {:.4}, {:.4}), {} sweeps",
                out.case,
                out.min_rate(),
                out.rates.r1,
                out.rates.r2,
                m.lambda1,
                m.lambda2,
                m.lambda3,
                out.diagnostics.sweeps
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
