//! Decode-and-forward rate expressions and ensemble averages.
//!
//! Rates are in bits per channel use: `C(x) = 0.5 * log2(1 + x)`.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelState, FadingEnsemble, NoiseModel};
use crate::error::{domain, Result};

/// `0.5 * log2(1 + x)`.
pub fn capacity(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("capacity argument must be >= 0, got {x}")));
    }
    Ok(cap(x))
}

/// Unchecked capacity; callers guarantee `x >= 0`.
#[inline]
pub(crate) fn cap(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

/// Source power split into an independent part `p_r` and a part `p_s`
/// sent coherently with the relay, plus the relay power `p2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AllocationGeneral {
    pub p_r: f64,
    pub p_s: f64,
    pub p2: f64,
}

/// Source power, relay power and a fixed correlation coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AllocationFixedRho {
    pub p1: f64,
    pub p2: f64,
    pub rho: f64,
}

impl AllocationGeneral {
    pub fn new(p_r: f64, p_s: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p_r", p_r), ("p_s", p_s), ("p2", p2)] {
            if !(p.is_finite() && p >= 0.0) {
                return Err(domain(format!("{name} must be finite and >= 0, got {p}")));
            }
        }
        Ok(Self { p_r, p_s, p2 })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn source_power(&self) -> f64 {
        self.p_r + self.p_s
    }

    /// Inverse of the coordinate change; `rho = 0` when no source power.
    pub fn to_fixed_rho(&self) -> AllocationFixedRho {
        let p1 = self.p_r + self.p_s;
        let rho = if p1 > 0.0 { (self.p_s / p1).sqrt() } else { 0.0 };
        AllocationFixedRho { p1, p2: self.p2, rho }
    }

    /// Received SNR at the destination.
    pub fn destination_snr(&self, s: &ChannelState, n: &NoiseModel) -> f64 {
        ((self.p_r + self.p_s) * s.h31 * s.h31
            + self.p2 * s.h32 * s.h32
            + 2.0 * (self.p_s * self.p2).sqrt() * s.h31 * s.h32)
            / n.total()
    }

    /// Received SNR at the relay.
    pub fn relay_snr(&self, s: &ChannelState, n: &NoiseModel) -> f64 {
        self.p_r * s.h21 * s.h21 / n.n1
    }
}

impl AllocationFixedRho {
    pub fn new(p1: f64, p2: f64, rho: f64) -> Result<Self> {
        if !(p1.is_finite() && p1 >= 0.0 && p2.is_finite() && p2 >= 0.0) {
            return Err(domain(format!("powers must be finite and >= 0, got ({p1}, {p2})")));
        }
        check_rho(rho)?;
        Ok(Self { p1, p2, rho })
    }

    /// `P_r = (1 - rho^2) P1`, `P_s = rho^2 P1`.
    pub fn to_general(&self) -> AllocationGeneral {
        let r2 = self.rho * self.rho;
        AllocationGeneral { p_r: (1.0 - r2) * self.p1, p_s: r2 * self.p1, p2: self.p2 }
    }

    pub fn destination_snr(&self, s: &ChannelState, n: &NoiseModel) -> f64 {
        (self.p1 * s.h31 * s.h31
            + self.p2 * s.h32 * s.h32
            + 2.0 * self.rho * (self.p1 * self.p2).sqrt() * s.h31 * s.h32)
            / n.total()
    }

    pub fn relay_snr(&self, s: &ChannelState, n: &NoiseModel) -> f64 {
        (1.0 - self.rho * self.rho) * self.p1 * s.h21 * s.h21 / n.n1
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(domain(format!("correlation must lie in [0, 1), got {rho}")));
    }
    Ok(())
}

/// Coordinate change from `(P1, P2, rho)` to `(P_r, P_s, P2)`.
pub fn to_general(a: &AllocationFixedRho) -> AllocationGeneral {
    a.to_general()
}

/// Coordinate change from `(P_r, P_s, P2)` to `(P1, P2, rho)`.
pub fn from_general(a: &AllocationGeneral) -> AllocationFixedRho {
    a.to_fixed_rho()
}

/// Destination-side rate.
pub fn r1_general(a: &AllocationGeneral, s: &ChannelState, n: &NoiseModel) -> f64 {
    cap(a.destination_snr(s, n))
}

/// Relay-side (decoding) rate; depends on `p_r` only.
pub fn r2_general(a: &AllocationGeneral, s: &ChannelState, n: &NoiseModel) -> f64 {
    cap(a.relay_snr(s, n))
}

pub fn r1_fixed_rho(a: &AllocationFixedRho, s: &ChannelState, n: &NoiseModel) -> f64 {
    cap(a.destination_snr(s, n))
}

pub fn r2_fixed_rho(a: &AllocationFixedRho, s: &ChannelState, n: &NoiseModel) -> f64 {
    cap(a.relay_snr(s, n))
}

/// A per-state allocation in either coordinate system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "coords", rename_all = "snake_case")]
pub enum Allocation {
    General(AllocationGeneral),
    FixedRho(AllocationFixedRho),
}

impl Allocation {
    pub fn general(&self) -> AllocationGeneral {
        match self {
            Allocation::General(a) => *a,
            Allocation::FixedRho(a) => a.to_general(),
        }
    }

    pub fn source_power(&self) -> f64 {
        match self {
            Allocation::General(a) => a.p_r + a.p_s,
            Allocation::FixedRho(a) => a.p1,
        }
    }

    pub fn relay_power(&self) -> f64 {
        match self {
            Allocation::General(a) => a.p2,
            Allocation::FixedRho(a) => a.p2,
        }
    }

    /// `theta * self + (1 - theta) * other`, componentwise. Mixing two
    /// fixed-correlation allocations with different `rho` goes through the
    /// general coordinates.
    pub fn mix(&self, other: &Allocation, theta: f64) -> Allocation {
        let lerp = |x: f64, y: f64| theta * x + (1.0 - theta) * y;
        match (self, other) {
            (Allocation::FixedRho(a), Allocation::FixedRho(b)) if a.rho == b.rho => {
                Allocation::FixedRho(AllocationFixedRho { p1: lerp(a.p1, b.p1), p2: lerp(a.p2, b.p2), rho: a.rho })
            }
            _ => {
                let (a, b) = (self.general(), other.general());
                Allocation::General(AllocationGeneral {
                    p_r: lerp(a.p_r, b.p_r),
                    p_s: lerp(a.p_s, b.p_s),
                    p2: lerp(a.p2, b.p2),
                })
            }
        }
    }

    pub fn r1(&self, s: &ChannelState, n: &NoiseModel) -> f64 {
        match self {
            Allocation::General(a) => r1_general(a, s, n),
            Allocation::FixedRho(a) => r1_fixed_rho(a, s, n),
        }
    }

    pub fn r2(&self, s: &ChannelState, n: &NoiseModel) -> f64 {
        match self {
            Allocation::General(a) => r2_general(a, s, n),
            Allocation::FixedRho(a) => r2_fixed_rho(a, s, n),
        }
    }
}

/// Ensemble-averaged rates of a policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRates {
    pub r1: f64,
    pub r2: f64,
    pub min: f64,
}

impl EnsembleRates {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2, min: r1.min(r2) }
    }
}

/// Uniform averages of both rates over the ensemble, and their minimum.
pub fn ensemble_rate(policy: &[Allocation], e: &FadingEnsemble, n: &NoiseModel) -> Result<EnsembleRates> {
    if policy.len() != e.len() {
        return Err(domain(format!("policy has {} entries for {} states", policy.len(), e.len())));
    }
    let w = e.weight();
    let (mut r1, mut r2) = (0.0, 0.0);
    for (a, s) in policy.iter().zip(e.states()) {
        r1 += a.r1(s, n);
        r2 += a.r2(s, n);
    }
    Ok(EnsembleRates::new(r1 * w, r2 * w))
}
