//! Per-state Lagrangian values in the multiplier convention of this module.

use crate::allocators::Multipliers;
use crate::channel::{ChannelState, NoiseModel};
use crate::rates::{AllocationFixedRho, AllocationGeneral};

/// `(1 - l3) ln(1 + snr_dest) + l3 ln(1 + snr_relay) - l1 (P_r + P_s) - l2 P2`
pub fn balanced_general(a: &AllocationGeneral, s: &ChannelState, n: &NoiseModel, m: &Multipliers) -> f64 {
    let dest = a.destination_snr(s, n).ln_1p();
    let relay = if m.lambda3 > 0.0 { a.relay_snr(s, n).ln_1p() } else { 0.0 };
    (1.0 - m.lambda3) * dest + m.lambda3 * relay - m.lambda1 * (a.p_r + a.p_s) - m.lambda2 * a.p2
}

/// Fixed-correlation counterpart of [`balanced_general`].
pub fn balanced_fixed(a: &AllocationFixedRho, s: &ChannelState, n: &NoiseModel, m: &Multipliers) -> f64 {
    let dest = a.destination_snr(s, n).ln_1p();
    let relay = if m.lambda3 > 0.0 { a.relay_snr(s, n).ln_1p() } else { 0.0 };
    (1.0 - m.lambda3) * dest + m.lambda3 * relay - m.lambda1 * a.p1 - m.lambda2 * a.p2
}

/// Source part of case 2: `0.5 ln(1 + snr_relay) - l * source`.
pub fn case2_source(snr_relay: f64, source: f64, lambda: f64) -> f64 {
    0.5 * snr_relay.ln_1p() - lambda * source
}

/// Relay comparison problem of case 2: `ln(1 + snr_dest) - mu * P2`.
pub fn case2_relay(snr_dest: f64, p2: f64, mu: f64) -> f64 {
    snr_dest.ln_1p() - mu * p2
}
