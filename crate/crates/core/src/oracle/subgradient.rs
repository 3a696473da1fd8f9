//! Projected supergradient ascent on `min(E R1, E R2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocators::Mode;
use crate::dual::SolveRequest;
use crate::error::Result;
use crate::oracle::{Oracle, OracleMethod, OracleReport};
use crate::rates::{ensemble_rate, Allocation, AllocationFixedRho, AllocationGeneral};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubgradientConfig {
    pub iterations: usize,
    pub restarts: usize,
    /// step `a` of the `a / sqrt(t)` rule, in units of the larger budget
    pub step: f64,
    pub seed: u64,
}

impl Default for SubgradientConfig {
    fn default() -> Self {
        Self { iterations: 500, restarts: 20, step: 0.5, seed: 0 }
    }
}

/// Euclidean projection onto `{x >= 0, sum x <= cap}`.
pub(crate) fn project_capped(x: &mut [f64], cap: f64) {
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    let sum: f64 = x.iter().sum();
    if sum <= cap {
        return;
    }
    let mut u: Vec<f64> = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let (mut acc, mut theta) = (0.0, 0.0);
    for (j, &v) in u.iter().enumerate() {
        acc += v;
        let t = (acc - cap) / (j + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    x.iter_mut().for_each(|v| *v = (*v - theta).max(0.0));
}

/// Flattened policy: source components per state (`[P_r, P_s]` or `[P1]`)
/// and relay power per state.
struct Point {
    src: Vec<f64>,
    relay: Vec<f64>,
}

fn to_policy(p: &Point, mode: Mode) -> Vec<Allocation> {
    match mode {
        Mode::Theorem1 => p
            .src
            .chunks(2)
            .zip(&p.relay)
            .map(|(c, &p2)| Allocation::General(AllocationGeneral { p_r: c[0], p_s: c[1], p2 }))
            .collect(),
        Mode::Theorem2 { rho } => p
            .src
            .iter()
            .zip(&p.relay)
            .map(|(&p1, &p2)| Allocation::FixedRho(AllocationFixedRho { p1, p2, rho }))
            .collect(),
    }
}

const EPS: f64 = 1e-12;

/// Per-state gradients of `R1` and `R2` (bits) with respect to the
/// flattened coordinates, written into `g1 = (src, relay)` and `g2 = src`.
fn gradients(req: &SolveRequest, p: &Point, g1_src: &mut [f64], g1_rel: &mut [f64], g2_src: &mut [f64]) {
    let k = 0.5 / std::f64::consts::LN_2;
    let (n1, nt) = (req.noise.n1, req.noise.total());
    for (i, s) in req.ensemble.states().iter().enumerate() {
        let p2 = p.relay[i];
        let (h21sq, h31sq, h32sq) = (s.h21 * s.h21, s.h31 * s.h31, s.h32 * s.h32);
        match req.mode {
            Mode::Theorem1 => {
                let (pr, ps) = (p.src[2 * i], p.src[2 * i + 1]);
                let x = s.h31 * s.h32;
                let d = nt + h31sq * (pr + ps) + h32sq * p2 + 2.0 * x * (ps * p2).sqrt();
                g1_src[2 * i] = k * h31sq / d;
                g1_src[2 * i + 1] = k * (h31sq + x * (p2 / (ps + EPS)).sqrt()) / d;
                g1_rel[i] = k * (h32sq + x * (ps / (p2 + EPS)).sqrt()) / d;
                g2_src[2 * i] = k * h21sq / (n1 + h21sq * pr);
                g2_src[2 * i + 1] = 0.0;
            }
            Mode::Theorem2 { rho } => {
                let p1 = p.src[i];
                let c = rho * s.h31 * s.h32;
                let d = nt + h31sq * p1 + h32sq * p2 + 2.0 * c * (p1 * p2).sqrt();
                let ar = (1.0 - rho * rho) * h21sq;
                g1_src[i] = k * (h31sq + c * (p2 / (p1 + EPS)).sqrt()) / d;
                g1_rel[i] = k * (h32sq + c * (p1 / (p2 + EPS)).sqrt()) / d;
                g2_src[i] = k * ar / (n1 + ar * p1);
            }
        }
    }
}

fn norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().chain(b).map(|v| v * v).sum::<f64>().sqrt()
}

/// Best `min(E R1, E R2)` found by projected supergradient ascent from
/// `restarts` starting points (the first is the uniform full-budget
/// policy, the rest random). The supergradient is that of the smaller
/// rate, or the average of both at a tie.
pub fn subgradient_oracle(req: &SolveRequest, cfg: &SubgradientConfig) -> Result<OracleReport> {
    let m = req.ensemble.len();
    let per = if matches!(req.mode, Mode::Theorem1) { 2 } else { 1 };
    let (b1, b2) = (req.budgets.p1_bar, req.budgets.p2_bar);
    let (cap1, cap2) = (b1 * m as f64, b2 * m as f64);
    let scale = b1.max(b2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(f64, Vec<Allocation>)> = None;
    let mut evaluations = 0;
    let (mut g1s, mut g1r, mut g2s) = (vec![0.0; per * m], vec![0.0; m], vec![0.0; per * m]);

    for restart in 0..cfg.restarts.max(1) {
        let mut p = if restart == 0 {
            Point { src: vec![b1 / per as f64; per * m], relay: vec![b2; m] }
        } else {
            Point {
                src: (0..per * m).map(|_| rng.gen::<f64>() * 2.0 * b1 / per as f64).collect(),
                relay: (0..m).map(|_| rng.gen::<f64>() * 2.0 * b2).collect(),
            }
        };
        project_capped(&mut p.src, cap1);
        project_capped(&mut p.relay, cap2);
        for t in 1..=cfg.iterations {
            let policy = to_policy(&p, req.mode);
            let r = ensemble_rate(&policy, &req.ensemble, &req.noise)?;
            evaluations += 1;
            if best.as_ref().is_none_or(|(v, _)| r.min > *v) {
                best = Some((r.min, policy));
            }
            gradients(req, &p, &mut g1s, &mut g1r, &mut g2s);
            let (w1, w2) = if (r.r1 - r.r2).abs() <= 1e-12 {
                (0.5, 0.5)
            } else if r.r1 < r.r2 {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            };
            let ds: Vec<f64> = g1s.iter().zip(&g2s).map(|(a, b)| w1 * a + w2 * b).collect();
            let dr: Vec<f64> = g1r.iter().map(|a| w1 * a).collect();
            let nrm = norm(&ds, &dr);
            if !(nrm > 0.0) {
                break;
            }
            let alpha = cfg.step * scale * (m as f64).sqrt() / (t as f64).sqrt() / nrm;
            p.src.iter_mut().zip(&ds).for_each(|(x, d)| *x += alpha * d);
            p.relay.iter_mut().zip(&dr).for_each(|(x, d)| *x += alpha * d);
            project_capped(&mut p.src, cap1);
            project_capped(&mut p.relay, cap2);
        }
    }
    let (_, best_point) = best.expect("at least one iterate");
    let best_value = ensemble_rate(&best_point, &req.ensemble, &req.noise)?.min;
    Ok(OracleReport { best_value, best_point, evaluations, method: OracleMethod::ProjectedSubgradient })
}

/// [`subgradient_oracle`] behind the [`Oracle`] interface.
#[derive(Debug, Clone, Copy, Default)]
pub struct SubgradientOracle {
    pub config: SubgradientConfig,
}

impl Oracle for SubgradientOracle {
    fn method(&self) -> OracleMethod {
        OracleMethod::ProjectedSubgradient
    }

    fn run(&self, req: &SolveRequest) -> Result<OracleReport> {
        subgradient_oracle(req, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_onto_capped_simplex() {
        let mut x = vec![0.5, -1.0, 0.2];
        project_capped(&mut x, 1.0);
        assert_eq!(x, vec![0.5, 0.0, 0.2]);
        let mut x = vec![2.0, 1.0, 0.0];
        project_capped(&mut x, 1.0);
        assert!((x[0] - 1.0).abs() < 1e-15 && x[1] == 0.0 && x[2] == 0.0);
        let mut x = vec![1.0, 1.0];
        project_capped(&mut x, 1.0);
        assert_eq!(x, vec![0.5, 0.5]);
    }
}
