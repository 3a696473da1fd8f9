//! Allocations when the source/relay correlation is optimised per state.
//!
//! Coordinates are `(P_r, P_s, P2)`: independent source power, coherent
//! source power and relay power.

use crate::allocators::lagrangian::balanced_general;
use crate::allocators::{inv_gain, pos, two_link_waterfill, GammaRatio, Multipliers};
use crate::channel::{ChannelState, NoiseModel};
use crate::error::{domain, Error, Result};
use crate::rates::AllocationGeneral;

/// `Gamma = l1 h32 / (l2 h31)`, the ratio `sqrt(P2 / P_s)` at a coherent
/// optimum.
pub fn thm1_gamma(s: &ChannelState, m: &Multipliers) -> Result<GammaRatio> {
    if !(m.lambda2 > 0.0) {
        return Err(Error::SingularRatio("relay multiplier is zero"));
    }
    if !(s.h31 > 0.0) {
        return Err(Error::SingularRatio("source-destination gain is zero"));
    }
    Ok(GammaRatio(m.lambda1 * s.h32 / (m.lambda2 * s.h31)))
}

fn check_prices(m: &Multipliers) -> Result<()> {
    if !(m.lambda1 > 0.0 && m.lambda2 > 0.0) || !m.lambda1.is_finite() || !m.lambda2.is_finite() {
        return Err(domain(format!(
            "power multipliers must be positive and finite, got ({}, {})",
            m.lambda1, m.lambda2
        )));
    }
    if !(0.0..=1.0).contains(&m.lambda3) {
        return Err(domain(format!("lambda3 must lie in [0, 1], got {}", m.lambda3)));
    }
    Ok(())
}

/// Destination-limited allocation: all source power is coherent.
pub fn thm1_case1_alloc(s: &ChannelState, n: &NoiseModel, m: &Multipliers) -> Result<AllocationGeneral> {
    check_prices(m)?;
    Ok(coherent_alloc(s, n, m.lambda1, m.lambda2, 1.0))
}

/// Coherent allocation with destination weight `w`; `P_r = 0`.
fn coherent_alloc(s: &ChannelState, n: &NoiseModel, l1: f64, l2: f64, w: f64) -> AllocationGeneral {
    let nt = n.total();
    if s.h31 == 0.0 {
        let p2 = if s.h32 > 0.0 { pos(w / l2 - nt / (s.h32 * s.h32)) } else { 0.0 };
        return AllocationGeneral { p_r: 0.0, p_s: 0.0, p2 };
    }
    let gamma = l1 * s.h32 / (l2 * s.h31);
    let k = (s.h31 + gamma * s.h32).powi(2);
    let g = s.h31 * s.h31 + gamma * s.h31 * s.h32;
    let p_s = pos(w * g / l1 - nt) / k;
    AllocationGeneral { p_r: 0.0, p_s, p2: gamma * gamma * p_s }
}

/// Source water-filling on the relay link, `(1/(2 l) - N1/h21^2)+`.
pub fn thm1_case2_source(s: &ChannelState, n: &NoiseModel, lambda_src: f64) -> f64 {
    pos(0.5 / lambda_src - inv_gain(n.n1, s.h21))
}

/// Relay water-filling for the destination rate given `P_r`, `P_s = 0`.
pub fn thm1_case2_relay(s: &ChannelState, n: &NoiseModel, mu_relay: f64, p_r: f64) -> f64 {
    if s.h32 == 0.0 {
        return 0.0;
    }
    let h32sq = s.h32 * s.h32;
    pos(1.0 / mu_relay - n.total() / h32sq - p_r * s.h31 * s.h31 / h32sq)
}

/// Relay-limited allocation: `P_s = 0`, source water-fills the relay link,
/// relay water-fills the destination for the comparison rate.
pub fn thm1_case2_alloc(s: &ChannelState, n: &NoiseModel, lambda_src: f64, mu_relay: f64) -> Result<AllocationGeneral> {
    if !(lambda_src > 0.0 && mu_relay > 0.0) {
        return Err(domain(format!("case-2 multipliers must be positive, got ({lambda_src}, {mu_relay})")));
    }
    let p_r = thm1_case2_source(s, n, lambda_src);
    let p2 = thm1_case2_relay(s, n, mu_relay, p_r);
    Ok(AllocationGeneral { p_r, p_s: 0.0, p2 })
}

/// Balanced allocation for rate-equality multiplier `lambda3`.
///
/// The stationarity system admits one closed form per active set:
/// everything positive (independent power from inverting the two source
/// conditions, coherent power from the destination condition), `P_r = 0`
/// (the coherent form with weight `1 - l3`), or `P_s = P2 = 0` (a two-link
/// water-filling quadratic). The concave per-state Lagrangian is maximised
/// by whichever candidate scores highest.
pub fn thm1_case3_alloc(s: &ChannelState, n: &NoiseModel, m: &Multipliers) -> Result<AllocationGeneral> {
    check_prices(m)?;
    let (l1, l2, l3) = (m.lambda1, m.lambda2, m.lambda3);
    let w_dest = 1.0 - l3;
    let nt = n.total();
    let relay_inv = inv_gain(n.n1, s.h21);
    let dest_inv = inv_gain(nt, s.h31);

    let mut best = AllocationGeneral::zero();
    let mut best_val = balanced_general(&best, s, n, m);
    let mut consider = |a: AllocationGeneral| {
        let v = balanced_general(&a, s, n, m);
        if v > best_val {
            best_val = v;
            best = a;
        }
    };

    // relay silent
    let p_r = two_link_waterfill(l1, l3, relay_inv, w_dest, dest_inv);
    consider(AllocationGeneral { p_r, p_s: 0.0, p2: 0.0 });

    if s.h31 > 0.0 && s.h32 > 0.0 && w_dest > 0.0 {
        let gamma = l1 * s.h32 / (l2 * s.h31);
        let k = (s.h31 + gamma * s.h32).powi(2);
        let g = s.h31 * s.h31 + gamma * s.h31 * s.h32;
        let p_r = pos(l3 * g / (l1 * gamma * s.h31 * s.h32) - relay_inv);
        if p_r > 0.0 {
            let p_s = pos(w_dest * g / l1 - nt - p_r * s.h31 * s.h31) / k;
            if p_s > 0.0 {
                consider(AllocationGeneral { p_r, p_s, p2: gamma * gamma * p_s });
            }
        }
        consider(coherent_alloc(s, n, l1, l2, w_dest));
    } else if s.h31 == 0.0 && s.h32 > 0.0 {
        // destination sees only the relay; both links decouple
        let p_r = if l3 > 0.0 { pos(l3 / l1 - relay_inv) } else { 0.0 };
        let p2 = pos(w_dest / l2 - nt / (s.h32 * s.h32));
        consider(AllocationGeneral { p_r, p_s: 0.0, p2 });
    }
    Ok(best)
}
