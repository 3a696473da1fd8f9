//! Parallel relay channel: independent subchannels sharing the multipliers.

use crate::allocators::{thm1_case1_alloc, thm1_case2_alloc, thm1_case3_alloc, CaseLabel, Multipliers};
use crate::channel::{ChannelState, NoiseModel};
use crate::error::{domain, Result};
use crate::rates::AllocationGeneral;

/// Apply the single-channel allocation of `case` to every subchannel.
///
/// For case 2, `m.lambda1` is the source price and `m.lambda2` the relay
/// price of the comparison problem.
pub fn parallel_relay_alloc(
    states: &[ChannelState],
    noises: &[NoiseModel],
    m: &Multipliers,
    case: CaseLabel,
) -> Result<Vec<AllocationGeneral>> {
    if states.is_empty() {
        return Err(domain("at least one subchannel is required"));
    }
    if states.len() != noises.len() {
        return Err(domain(format!("{} subchannel states but {} noise models", states.len(), noises.len())));
    }
    states
        .iter()
        .zip(noises)
        .map(|(s, n)| match case {
            CaseLabel::Case1 => thm1_case1_alloc(s, n, m),
            CaseLabel::Case2 => thm1_case2_alloc(s, n, m.lambda1, m.lambda2),
            CaseLabel::Case3 => thm1_case3_alloc(s, n, m),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_subchannel_matches() {
        let s = ChannelState::new(0.8, 0.6, 1.2).unwrap();
        let n = NoiseModel::new(1.0, 0.5).unwrap();
        let m = Multipliers::new(0.3, 0.4, 0.3).unwrap();
        let out = parallel_relay_alloc(&[s], &[n], &m, CaseLabel::Case3).unwrap();
        assert_eq!(out, vec![thm1_case3_alloc(&s, &n, &m).unwrap()]);
    }

    #[test]
    fn mismatch_rejected() {
        let s = ChannelState::new(0.8, 0.6, 1.2).unwrap();
        let m = Multipliers::power(0.3, 0.4);
        assert!(parallel_relay_alloc(&[s], &[], &m, CaseLabel::Case1).is_err());
        assert!(parallel_relay_alloc(&[], &[], &m, CaseLabel::Case1).is_err());
    }
}
