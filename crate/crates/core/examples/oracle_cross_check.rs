// Closed forms and the dual search against the independent oracles.

use df_relay::channel::sample_ensemble;
use df_relay::oracle::{
    concavity_probe, grid_oracle_single_state, kkt_residuals, lambda_sweep_oracle, subgradient_oracle, GridSpec,
    RateFunction, SubgradientConfig,
};
use df_relay::{classify_and_solve, FadingEnsemble, Mode, NoiseModel, PowerBudgets, SolveRequest};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = NoiseModel::from_total(1.0, 2.0)?;
    let b = PowerBudgets::new(1.5, 0.8)?;

    let s = sample_ensemble(3, 1, 0.25)?.states()[0];
    for mode in [Mode::Theorem1, Mode::Theorem2 { rho: 0.4 }] {
        let out = classify_and_solve(&SolveRequest::new(FadingEnsemble::single(s), n, b, mode)?)?;
        let grid = grid_oracle_single_state(&s, &n, &b, mode, &GridSpec::default());
        println!("{mode:?} single state: solver {:.6}, grid {:.6}", out.min_rate(), grid.best_value);
    }

    let req = SolveRequest::new(sample_ensemble(4, 8, 0.25)?, n, b, Mode::Theorem1)?;
    let out = classify_and_solve(&req)?;
    let lower = subgradient_oracle(&req, &SubgradientConfig { restarts: 4, ..Default::default() })?;
    let upper = lambda_sweep_oracle(&req, 100)?;
    println!(
        "M = 8: subgradient {:.5} <= solver {:.5} <= sweep {:.5}",
        lower.best_value,
        out.min_rate(),
        upper.best_value
    );
    let worst = out
        .policy
        .iter()
        .zip(req.ensemble.states())
        .filter_map(|(a, s)| kkt_residuals(a, s, &n, &out.multipliers, out.case, req.mode).ok())
        .map(|k| k.max_stationarity())
        .fold(0.0, f64::max);
    println!("largest stationarity residual {worst:.2e}");

    let report = concavity_probe(RateFunction::R1General, 10_000, 9)?;
    println!("concavity probe of R1: {} violations in {} trials", report.violations, report.trials);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
