//! Randomised midpoint-concavity checks of the rate functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{rayleigh_from_uniform, ChannelState, NoiseModel, DEFAULT_RAYLEIGH_SCALE};
use crate::error::{domain, Result};
use crate::rates::{r1_fixed_rho, r1_general, r2_fixed_rho, r2_general, AllocationFixedRho, AllocationGeneral};

/// Function under test. `ExpControl` replaces the capacity in the
/// destination rate by `exp`, which is convex, and must fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateFunction {
    R1General,
    R2General,
    R1FixedRho,
    R2FixedRho,
    ExpControl,
}

/// A violating pair: `alpha f(a) + (1 - alpha) f(b) - f(mix) = violation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub state: ChannelState,
    pub noise: NoiseModel,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub alpha: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub function: RateFunction,
    pub trials: usize,
    pub violations: usize,
    pub max_violation: f64,
    /// the first few violating pairs
    pub witnesses: Vec<Witness>,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Violations larger than this count.
pub const CONCAVITY_TOL: f64 = 1e-12;
const MAX_WITNESSES: usize = 10;

fn power(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.2) {
        0.0
    } else {
        10.0 * rng.gen::<f64>()
    }
}

/// Check `f(alpha a + (1 - alpha) b) >= alpha f(a) + (1 - alpha) f(b)` on
/// `trials` random states, noise levels, allocation pairs and weights.
/// Fixed-correlation functions use one random `rho` per trial.
pub fn concavity_probe(f: RateFunction, trials: usize, seed: u64) -> Result<ConcavityReport> {
    if trials == 0 {
        return Err(domain("at least one trial is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ConcavityReport { function: f, trials, violations: 0, max_violation: 0.0, witnesses: Vec::new() };
    for _ in 0..trials {
        let mut h = || rayleigh_from_uniform(1.0 - rng.gen::<f64>(), DEFAULT_RAYLEIGH_SCALE);
        let state = ChannelState { h21: h(), h31: h(), h32: h() };
        let noise = NoiseModel { n1: 0.5 + 1.5 * rng.gen::<f64>(), n2: 8.0 * rng.gen::<f64>() };
        let alpha = match rng.gen_range(0..50) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen::<f64>(),
        };
        let rho: f64 = 0.999 * rng.gen::<f64>();
        let a: Vec<f64> = (0..3).map(|_| power(&mut rng)).collect();
        let b: Vec<f64> = (0..3).map(|_| power(&mut rng)).collect();
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + (1.0 - alpha) * y).collect();
        let eval = |p: &[f64]| {
            let g = AllocationGeneral { p_r: p[0], p_s: p[1], p2: p[2] };
            let fr = AllocationFixedRho { p1: p[0], p2: p[2], rho };
            match f {
                RateFunction::R1General => r1_general(&g, &state, &noise),
                RateFunction::R2General => r2_general(&g, &state, &noise),
                RateFunction::R1FixedRho => r1_fixed_rho(&fr, &state, &noise),
                RateFunction::R2FixedRho => r2_fixed_rho(&fr, &state, &noise),
                RateFunction::ExpControl => g.destination_snr(&state, &noise).exp(),
            }
        };
        let violation = alpha * eval(&a) + (1.0 - alpha) * eval(&b) - eval(&mix);
        if violation > CONCAVITY_TOL {
            report.violations += 1;
            report.max_violation = report.max_violation.max(violation);
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(Witness { state, noise, a, b, alpha, violation });
            }
        }
    }
    Ok(report)
}
