// Parallel relay channel: the same prices applied to independent
// subchannels.

use df_relay::allocators::parallel_relay_alloc;
use df_relay::rates::{r1_general, r2_general};
use df_relay::{CaseLabel, ChannelState, Multipliers, NoiseModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let states =
        vec![ChannelState::new(1.0, 0.4, 0.8)?, ChannelState::new(0.3, 0.6, 0.5)?, ChannelState::new(0.7, 0.2, 0.9)?];
    let noises = vec![NoiseModel::new(1.0, 0.5)?, NoiseModel::new(0.8, 1.0)?, NoiseModel::new(1.2, 0.4)?];
    let m = Multipliers::new(0.3, 0.4, 0.5)?;
    for case in [CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3] {
        let alloc = parallel_relay_alloc(&states, &noises, &m, case)?;
        let (mut r1, mut r2, mut src, mut relay) = (0.0, 0.0, 0.0, 0.0);
        for ((a, s), n) in alloc.iter().zip(&states).zip(&noises) {
            r1 += r1_general(a, s, n);
            r2 += r2_general(a, s, n);
            src += a.p_r + a.p_s;
            relay += a.p2;
        }
        println!("{case}: source {src:.4} relay {relay:.4}  sum R1 {r1:.4} sum R2 {r2:.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
