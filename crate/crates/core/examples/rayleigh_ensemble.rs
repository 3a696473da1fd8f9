// Seeded Rayleigh ensemble: sample statistics and CSV persistence.

use df_relay::channel::{rayleigh_cdf, sample_ensemble, FadingEnsemble, DEFAULT_RAYLEIGH_SCALE};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let e = sample_ensemble(2024, 5000, DEFAULT_RAYLEIGH_SCALE)?;
    // E h^2 = 2 scale for this parametrisation
    let mean_sq = e.mean(|s| s.h31 * s.h31);
    println!("M = {}, E h31^2 = {mean_sq:.4} (expected {:.4})", e.len(), 2.0 * DEFAULT_RAYLEIGH_SCALE);

    let median = (2.0 * DEFAULT_RAYLEIGH_SCALE * std::f64::consts::LN_2).sqrt();
    let below = e.states().iter().filter(|s| s.h21 < median).count() as f64 / e.len() as f64;
    println!("P(h21 < median) = {below:.3}, cdf = {:.3}", rayleigh_cdf(median, DEFAULT_RAYLEIGH_SCALE)?);

    let mut buf = Vec::new();
    e.write_csv(&mut buf)?;
    let back = FadingEnsemble::read_csv(buf.as_slice())?;
    assert_eq!(back.states(), e.states());
    println!("csv round trip: {} bytes", buf.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
