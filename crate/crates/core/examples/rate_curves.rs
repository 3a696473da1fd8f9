// Achievable rate against each budget with the other held at 1.

use df_relay::experiments::{rate_curve_vs_p1, rate_curve_vs_p2, saturates, ExperimentConfig, Grid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::from_json(
        r#"{
            "mode": {"kind": "theorem1"},
            "noise": {"n1": 1.0, "n_total": 1.6},
            "p1_bar": {"start": 0.25, "stop": 3.0, "step": 0.25},
            "p2_bar": [1.0],
            "ensemble": {"seed": 2024, "size": 300}
        }"#,
    )?;
    let e = cfg.build_ensemble()?;
    let curve = rate_curve_vs_p1(&cfg, &e)?;
    for p in &curve.points {
        println!("P1_bar {:5.2}  rate {:.5}  {}", p.abscissa, p.rate, p.case.map(|c| c.as_str()).unwrap_or("failed"));
    }
    println!("transitions: {:?}", curve.transitions());

    cfg.p1_bar = Grid::List(vec![1.0]);
    cfg.p2_bar = Grid::Range { start: 0.0, stop: 3.0, step: 0.25 };
    let curve = rate_curve_vs_p2(&cfg, &e)?;
    curve.write_csv(std::io::stdout().lock())?;
    println!("transitions: {:?}", curve.transitions());
    if let Some(&(at, _, _)) = curve.transitions().last() {
        println!("flat after {at}: {}", saturates(&curve, at, 1e-4));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
