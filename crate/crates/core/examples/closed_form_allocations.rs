// Per-state allocations of the three cases at fixed multipliers.

use df_relay::allocators::{
    thm1_case1_alloc, thm1_case2_alloc, thm1_case3_alloc, thm1_gamma, thm2_case1_alloc, thm2_case2_p1, thm2_case2_p2,
    thm2_case2_p2_cardano, thm2_case3_solve,
};
use df_relay::rates::{r1_fixed_rho, r1_general, r2_fixed_rho, r2_general};
use df_relay::{ChannelState, Multipliers, NoiseModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = ChannelState::new(0.9, 0.5, 0.7)?;
    let n = NoiseModel::from_total(1.0, 1.6)?;
    let m = Multipliers::new(0.15, 0.1, 0.35)?;

    println!("optimised correlation");
    println!("  gamma = {:.4}", thm1_gamma(&s, &m)?.value());
    for (name, a) in [
        ("case 1", thm1_case1_alloc(&s, &n, &m)?),
        ("case 2", thm1_case2_alloc(&s, &n, m.lambda1, m.lambda2)?),
        ("case 3", thm1_case3_alloc(&s, &n, &m)?),
    ] {
        println!(
            "  {name}: P_r {:.4} P_s {:.4} P2 {:.4}  R1 {:.4} R2 {:.4}",
            a.p_r,
            a.p_s,
            a.p2,
            r1_general(&a, &s, &n),
            r2_general(&a, &s, &n)
        );
    }

    let rho = 0.2f64.sqrt();
    println!("fixed correlation rho = {rho:.4}");
    let a = thm2_case1_alloc(&s, &n, &m, rho)?;
    println!("  case 1: P1 {:.4} P2 {:.4}  R1 {:.4}", a.p1, a.p2, r1_fixed_rho(&a, &s, &n));
    let p1 = thm2_case2_p1(&s, &n, m.lambda1, rho);
    let p2 = thm2_case2_p2(&s, &n, m.lambda2, rho, p1)?;
    let check = thm2_case2_p2_cardano(&s, &n, m.lambda2, rho, p1);
    println!("  case 2: P1 {p1:.4} P2 {p2:.4} (trigonometric form {check:.4})");
    let sol = thm2_case3_solve(&s, &n, &m, rho)?;
    println!(
        "  case 3: P1 {:.4} P2 {:.4} via {:?}  R1 {:.4} R2 {:.4}",
        sol.alloc.p1,
        sol.alloc.p2,
        sol.path,
        r1_fixed_rho(&sol.alloc, &s, &n),
        r2_fixed_rho(&sol.alloc, &s, &n)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
