//! Fading states, noise levels, power budgets and fixed Rayleigh ensembles.
//!
//! Every expectation in the crate is a uniform average over a
//! [`FadingEnsemble`]. Ensembles are drawn with `ChaCha8Rng` seeded through
//! `SeedableRng::seed_from_u64`, so `(seed, size, scale)` pins the exact list
//! of states on every platform.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Default Rayleigh scale (variance parameter).
pub const DEFAULT_RAYLEIGH_SCALE: f64 = 0.25;

/// Ensembles at least this large are evaluated with rayon.
const PARALLEL_THRESHOLD: usize = 1024;

/// One fading draw of the three link amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelState {
    /// source -> relay
    pub h21: f64,
    /// source -> destination
    pub h31: f64,
    /// relay -> destination
    pub h32: f64,
}

impl ChannelState {
    pub fn new(h21: f64, h31: f64, h32: f64) -> Result<Self> {
        for (name, h) in [("h21", h21), ("h31", h31), ("h32", h32)] {
            if !h.is_finite() || h < 0.0 {
                return Err(domain(format!("{name} must be finite and >= 0, got {h}")));
            }
        }
        Ok(Self { h21, h31, h32 })
    }
}

/// Relay noise variance `n1` and the destination's excess variance `n2`.
/// The destination sees total variance `n1 + n2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub n1: f64,
    pub n2: f64,
}

impl NoiseModel {
    pub fn new(n1: f64, n2: f64) -> Result<Self> {
        if !(n1.is_finite() && n1 > 0.0) {
            return Err(domain(format!("n1 must be > 0, got {n1}")));
        }
        if !(n2.is_finite() && n2 >= 0.0) {
            return Err(domain(format!("n2 must be >= 0, got {n2}")));
        }
        Ok(Self { n1, n2 })
    }

    /// Build from the relay variance and the total destination variance.
    pub fn from_total(n1: f64, n_total: f64) -> Result<Self> {
        if n_total < n1 {
            return Err(domain(format!("destination noise {n_total} must be at least the relay noise {n1}")));
        }
        Self::new(n1, n_total - n1)
    }

    /// Destination noise variance `n1 + n2`.
    pub fn total(&self) -> f64 {
        self.n1 + self.n2
    }
}

/// Average power caps of the source and the relay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudgets {
    pub p1_bar: f64,
    pub p2_bar: f64,
}

impl PowerBudgets {
    pub fn new(p1_bar: f64, p2_bar: f64) -> Result<Self> {
        if !(p1_bar.is_finite() && p1_bar > 0.0) {
            return Err(domain(format!("source budget must be > 0, got {p1_bar}")));
        }
        if !(p2_bar.is_finite() && p2_bar >= 0.0) {
            return Err(domain(format!("relay budget must be >= 0, got {p2_bar}")));
        }
        Ok(Self { p1_bar, p2_bar })
    }
}

/// Distribution the ensemble was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingModel {
    pub distribution: String,
    pub scale: f64,
}

/// A fixed, uniformly weighted sample of fading states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingEnsemble {
    states: Vec<ChannelState>,
    pub seed: u64,
    pub model: FadingModel,
}

impl FadingEnsemble {
    /// Wrap an explicit list of states (seed 0, model "explicit").
    pub fn from_states(states: Vec<ChannelState>) -> Result<Self> {
        if states.is_empty() {
            return Err(domain("an ensemble needs at least one state"));
        }
        Ok(Self { states, seed: 0, model: FadingModel { distribution: "explicit".into(), scale: f64::NAN } })
    }

    pub fn single(state: ChannelState) -> Self {
        Self::from_states(vec![state]).expect("one state")
    }

    pub fn states(&self) -> &[ChannelState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Uniform weight of each state.
    pub fn weight(&self) -> f64 {
        1.0 / self.states.len() as f64
    }

    /// Evaluate `f` on every state, in state order.
    pub fn map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&ChannelState) -> T + Sync + Send,
    {
        if self.states.len() >= PARALLEL_THRESHOLD {
            self.states.par_iter().map(f).collect()
        } else {
            self.states.iter().map(f).collect()
        }
    }

    /// Uniform average of `f`; summation order is fixed so results are
    /// bit-identical regardless of thread count.
    pub fn mean<F>(&self, f: F) -> f64
    where
        F: Fn(&ChannelState) -> f64 + Sync + Send,
    {
        let values = self.map(f);
        values.iter().sum::<f64>() * self.weight()
    }

    /// Write as CSV with header `h21,h31,h32`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "h21,h31,h32")?;
        for s in &self.states {
            writeln!(w, "{},{},{}", s.h21, s.h31, s.h32)?;
        }
        Ok(())
    }

    /// Read the CSV produced by [`FadingEnsemble::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| domain("empty ensemble file"))??;
        if header.trim() != "h21,h31,h32" {
            return Err(domain(format!("unexpected header {header:?}")));
        }
        let mut states = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(domain(format!("row {}: expected 3 fields", i + 1)));
            }
            let mut h = [0.0; 3];
            for (slot, text) in h.iter_mut().zip(&fields) {
                *slot = text.trim().parse().map_err(|_| domain(format!("row {}: bad number {text:?}", i + 1)))?;
            }
            states.push(ChannelState::new(h[0], h[1], h[2])?);
        }
        Self::from_states(states)
    }
}

/// Rayleigh density `h/scale * exp(-h^2 / (2 scale))`.
pub fn rayleigh_pdf(h: f64, scale: f64) -> Result<f64> {
    check_rayleigh_args(h, scale)?;
    Ok(h / scale * (-h * h / (2.0 * scale)).exp())
}

/// Rayleigh CDF `1 - exp(-h^2 / (2 scale))`.
pub fn rayleigh_cdf(h: f64, scale: f64) -> Result<f64> {
    check_rayleigh_args(h, scale)?;
    Ok(-(-h * h / (2.0 * scale)).exp_m1())
}

fn check_rayleigh_args(h: f64, scale: f64) -> Result<()> {
    if !(h >= 0.0) {
        return Err(domain(format!("gain must be >= 0, got {h}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(domain(format!("scale must be > 0, got {scale}")));
    }
    Ok(())
}

/// Inverse-CDF Rayleigh draw from a uniform `u` in (0, 1].
pub fn rayleigh_from_uniform(u: f64, scale: f64) -> f64 {
    (-2.0 * scale * u.ln()).sqrt()
}

/// Draw `m` states with independent Rayleigh gains.
pub fn sample_ensemble(seed: u64, m: usize, scale: f64) -> Result<FadingEnsemble> {
    if m == 0 {
        return Err(domain("ensemble size must be >= 1"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(domain(format!("scale must be > 0, got {scale}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        // gen::<f64>() is in [0, 1); flip it into (0, 1]
        let u = 1.0 - rng.gen::<f64>();
        rayleigh_from_uniform(u, scale)
    };
    let states = (0..m)
        .map(|_| {
            let h21 = draw();
            let h31 = draw();
            let h32 = draw();
            ChannelState { h21, h31, h32 }
        })
        .collect();
    Ok(FadingEnsemble { states, seed, model: FadingModel { distribution: "rayleigh".into(), scale } })
}

impl std::str::FromStr for ChannelState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| domain(format!("bad gain {p:?}"))))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [a, b, c] => ChannelState::new(*a, *b, *c),
            _ => Err(domain("expected h21,h31,h32")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_values() {
        assert_eq!(rayleigh_pdf(0.0, 0.25).unwrap(), 0.0);
        let v = rayleigh_pdf(0.5, 0.25).unwrap();
        assert!((v - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 1.2131).abs() < 1e-4);
    }

    #[test]
    fn pdf_integrates_to_one() {
        // composite Simpson on [0, 10]
        let n = 20_000;
        let h = 10.0 / n as f64;
        let mut acc = rayleigh_pdf(0.0, 0.25).unwrap() + rayleigh_pdf(10.0, 0.25).unwrap();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * rayleigh_pdf(i as f64 * h, 0.25).unwrap();
        }
        assert!((acc * h / 3.0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pdf_rejects_bad_args() {
        assert!(rayleigh_pdf(-0.1, 0.25).is_err());
        assert!(rayleigh_pdf(0.1, 0.0).is_err());
        assert!(rayleigh_pdf(0.1, -1.0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_ensemble(7, 4, 0.25).unwrap();
        let b = sample_ensemble(7, 4, 0.25).unwrap();
        assert_eq!(a, b);
        let c = sample_ensemble(8, 4, 0.25).unwrap();
        assert_ne!(a.states(), c.states());
    }

    #[test]
    fn zero_size_rejected() {
        assert!(sample_ensemble(1, 0, 0.25).is_err());
    }

    #[test]
    fn second_moment_matches() {
        let e = sample_ensemble(11, 100_000, 0.25).unwrap();
        let m2 = e.mean(|s| s.h21 * s.h21);
        assert!((m2 - 0.5).abs() / 0.5 < 0.02, "E[h^2] = {m2}");
        assert!(e.states().iter().all(|s| s.h21 >= 0.0 && s.h31 >= 0.0 && s.h32 >= 0.0));
    }

    #[test]
    fn ks_distance_small() {
        let e = sample_ensemble(3, 100_000, 0.25).unwrap();
        let mut xs: Vec<f64> = e.states().iter().map(|s| s.h32).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = rayleigh_cdf(x, 0.25).unwrap();
            d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
        }
        assert!(d < 0.01, "KS distance {d}");
    }

    #[test]
    fn csv_round_trip() {
        let e = sample_ensemble(5, 17, 0.25).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let back = FadingEnsemble::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.states(), e.states());
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel::new(0.0, 1.0).is_err());
        assert!(NoiseModel::new(1.0, -0.5).is_err());
        let n = NoiseModel::from_total(1.0, 9.0).unwrap();
        assert_eq!(n.n2, 8.0);
        assert!(NoiseModel::from_total(2.0, 1.0).is_err());
    }
}
