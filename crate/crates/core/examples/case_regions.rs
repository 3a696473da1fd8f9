// Case regions over a budget grid at fixed correlation, with the boundary
// scan along the relay budget.

use df_relay::experiments::{sweep_case_regions, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "mode": {"kind": "theorem2", "rho": 0.4472135954999579},
            "noise": {"n1": 1.0, "n_total": 9.0},
            "p1_bar": [0.5, 1.0, 2.0],
            "p2_bar": [0.05, 0.5, 1.0, 2.0, 5.0, 10.0],
            "ensemble": {"seed": 2024, "size": 100},
            "boundary_step": 0.1
        }"#,
    )?;
    let sweep = sweep_case_regions(&cfg, &cfg.build_ensemble()?)?;
    for p1 in cfg.p1_bar.values()? {
        let labels: Vec<String> = sweep.column(p1).iter().map(|c| c.outcome.label().to_string()).collect();
        println!("P1_bar {p1}: {}", labels.join(" "));
    }
    sweep.write_boundaries_csv(std::io::stdout().lock())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
