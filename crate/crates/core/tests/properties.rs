use df_relay::allocators::lagrangian::{balanced_fixed, balanced_general};
use df_relay::allocators::{
    thm1_case1_alloc, thm1_case2_alloc, thm1_case2_relay, thm1_case2_source, thm1_case3_alloc, thm2_case1_alloc,
    thm2_case2_p1, thm2_case2_p2, thm2_case3_alloc,
};
use df_relay::channel::{rayleigh_cdf, sample_ensemble};
use df_relay::rates::{from_general, r1_fixed_rho, r1_general, r2_fixed_rho, r2_general, to_general};
use df_relay::{AllocationFixedRho, AllocationGeneral, ChannelState, Multipliers, NoiseModel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn state() -> impl Strategy<Value = ChannelState> {
    (0.0..2.0f64, 0.0..2.0f64, 0.0..2.0f64).prop_map(|(a, b, c)| ChannelState::new(a, b, c).unwrap())
}

fn noise() -> impl Strategy<Value = NoiseModel> {
    (0.1..3.0f64, 0.0..5.0f64).prop_map(|(a, b)| NoiseModel::new(a, b).unwrap())
}

fn general() -> impl Strategy<Value = AllocationGeneral> {
    (0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64).prop_map(|(a, b, c)| AllocationGeneral::new(a, b, c).unwrap())
}

fn fixed(rho: f64) -> impl Strategy<Value = AllocationFixedRho> {
    (0.0..10.0f64, 0.0..10.0f64).prop_map(move |(a, b)| AllocationFixedRho::new(a, b, rho).unwrap())
}

fn prices() -> impl Strategy<Value = Multipliers> {
    (0.01..3.0f64, 0.01..3.0f64, 0.0..1.0f64).prop_map(|(a, b, c)| Multipliers::new(a, b, c).unwrap())
}

fn lerp_general(a: &AllocationGeneral, b: &AllocationGeneral, t: f64) -> AllocationGeneral {
    AllocationGeneral {
        p_r: t * a.p_r + (1.0 - t) * b.p_r,
        p_s: t * a.p_s + (1.0 - t) * b.p_s,
        p2: t * a.p2 + (1.0 - t) * b.p2,
    }
}

proptest! {
    #[test]
    fn general_rates_concave(s in state(), n in noise(), a in general(), b in general(), t in 0.0..1.0f64) {
        let m = lerp_general(&a, &b, t);
        for f in [r1_general, r2_general] {
            prop_assert!(t * f(&a, &s, &n) + (1.0 - t) * f(&b, &s, &n) <= f(&m, &s, &n) + 1e-12);
        }
    }

    #[test]
    fn fixed_rates_concave(s in state(), n in noise(), rho in 0.0..0.99f64, p in (0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64), t in 0.0..1.0f64) {
        let a = AllocationFixedRho::new(p.0, p.1, rho).unwrap();
        let b = AllocationFixedRho::new(p.2, p.3, rho).unwrap();
        let m = AllocationFixedRho::new(t * a.p1 + (1.0 - t) * b.p1, t * a.p2 + (1.0 - t) * b.p2, rho).unwrap();
        for f in [r1_fixed_rho, r2_fixed_rho] {
            prop_assert!(t * f(&a, &s, &n) + (1.0 - t) * f(&b, &s, &n) <= f(&m, &s, &n) + 1e-12);
        }
    }

    #[test]
    fn coordinate_change_consistent(s in state(), n in noise(), rho in 0.0..0.99f64, a in fixed(0.5)) {
        let a = AllocationFixedRho { rho, ..a };
        let g = to_general(&a);
        let scale = 1.0 + r1_fixed_rho(&a, &s, &n);
        prop_assert!((r1_fixed_rho(&a, &s, &n) - r1_general(&g, &s, &n)).abs() <= 1e-14 * scale);
        prop_assert!((r2_fixed_rho(&a, &s, &n) - r2_general(&g, &s, &n)).abs() <= 1e-14 * scale);
        let back = from_general(&g);
        prop_assert!((back.p1 - a.p1).abs() <= 1e-12 * a.p1.max(1.0));
        if a.p1 > 1e-9 {
            prop_assert!((back.rho - rho).abs() <= 1e-9);
        }
    }

    #[test]
    fn rates_monotone_in_each_power(s in state(), n in noise(), a in general(), k in 0usize..3, d in 0.0..5.0f64) {
        let mut b = a;
        match k {
            0 => b.p_r += d,
            1 => b.p_s += d,
            _ => b.p2 += d,
        }
        prop_assert!(r1_general(&b, &s, &n) >= r1_general(&a, &s, &n) - 1e-15);
        prop_assert!(r2_general(&b, &s, &n) >= r2_general(&a, &s, &n) - 1e-15);
    }

    #[test]
    fn cauchy_schwarz_step(p in (0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64)) {
        let (s1, s2, q1, q2) = p;
        let lhs = (s1 * q1).sqrt() + (s2 * q2).sqrt();
        let rhs = ((s1 + s2) * (q1 + q2)).sqrt();
        prop_assert!(lhs <= rhs * (1.0 + 1e-15) + 1e-300);
    }

    #[test]
    fn allocations_nonnegative(s in state(), n in noise(), m in prices(), rho in 0.0..0.99f64) {
        for a in [
            thm1_case1_alloc(&s, &n, &m).unwrap(),
            thm1_case2_alloc(&s, &n, m.lambda1, m.lambda2).unwrap(),
            thm1_case3_alloc(&s, &n, &m).unwrap(),
        ] {
            prop_assert!(a.p_r >= 0.0 && a.p_s >= 0.0 && a.p2 >= 0.0, "{a:?}");
        }
        for a in [thm2_case1_alloc(&s, &n, &m, rho).unwrap(), thm2_case3_alloc(&s, &n, &m, rho).unwrap()] {
            prop_assert!(a.p1 >= 0.0 && a.p2 >= 0.0, "{a:?}");
        }
        let p1 = thm2_case2_p1(&s, &n, m.lambda1, rho);
        prop_assert!(p1 >= 0.0 && thm2_case2_p2(&s, &n, m.lambda2, rho, p1).unwrap() >= 0.0);
    }

    #[test]
    fn clamped_water_levels_are_below_water(s in state(), n in noise(), l in 0.01..3.0f64, rho in 0.0..0.99f64) {
        if s.h21 > 0.0 {
            let unclamped = 0.5 / l - n.n1 / (s.h21 * s.h21);
            let p = thm1_case2_source(&s, &n, l);
            let ok = if p == 0.0 { unclamped <= 0.0 } else { (p - unclamped).abs() < 1e-12 * p.max(1.0) };
            prop_assert!(ok);
            let unclamped = 0.5 / l - n.n1 / ((1.0 - rho * rho) * s.h21 * s.h21);
            let p = thm2_case2_p1(&s, &n, l, rho);
            let ok = if p == 0.0 { unclamped <= 0.0 } else { (p - unclamped).abs() < 1e-12 * p.max(1.0) };
            prop_assert!(ok);
        }
    }

    #[test]
    fn uncorrelated_case2_matches_independent_split(s in state(), n in noise(), l in 0.01..3.0f64, mu in 0.01..3.0f64) {
        // rho = 0 leaves only the independent source power
        let p1 = thm2_case2_p1(&s, &n, l, 0.0);
        prop_assert_eq!(p1, thm1_case2_source(&s, &n, l));
        let p2 = thm2_case2_p2(&s, &n, mu, 0.0, p1).unwrap();
        let q2 = thm1_case2_relay(&s, &n, mu, p1);
        prop_assert!((p2 - q2).abs() <= 1e-9 * q2.max(1.0), "{p2} vs {q2}");
    }
}

#[test]
fn rayleigh_sampler_matches_cdf() {
    let scale = 0.25;
    let e = sample_ensemble(77, 100_000, scale).unwrap();
    let mut h: Vec<f64> = e.states().iter().map(|s| s.h31).collect();
    h.sort_by(f64::total_cmp);
    let m = h.len() as f64;
    let ks = h
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = rayleigh_cdf(x, scale).unwrap();
            (f - i as f64 / m).abs().max((f - (i + 1) as f64 / m).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS distance {ks}");
    assert_eq!(sample_ensemble(77, 1000, scale).unwrap(), sample_ensemble(77, 1000, scale).unwrap());
}

/// Best per-state Lagrangian on a grid over `[0, 50]^2` (and a correlation
/// grid for the general coordinates).
fn grid_best_general(s: &ChannelState, n: &NoiseModel, m: &Multipliers) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..=250 {
        let p1 = i as f64 * 0.2;
        for k in 0..=20 {
            let r2 = k as f64 / 20.0;
            for j in 0..=250 {
                let a = AllocationGeneral { p_r: (1.0 - r2) * p1, p_s: r2 * p1, p2: j as f64 * 0.2 };
                best = best.max(balanced_general(&a, s, n, m));
            }
        }
    }
    best
}

fn grid_best_fixed(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..=1000 {
        for j in 0..=1000 {
            let a = AllocationFixedRho { p1: i as f64 * 0.05, p2: j as f64 * 0.05, rho };
            best = best.max(balanced_fixed(&a, s, n, m));
        }
    }
    best
}

#[test]
fn allocators_beat_dense_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..6 {
        let s = ChannelState::new(rng.gen_range(0.2..1.5), rng.gen_range(0.2..1.5), rng.gen_range(0.2..1.5)).unwrap();
        let n = NoiseModel::new(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0)).unwrap();
        let m1 = Multipliers::power(rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5));
        let m3 = Multipliers { lambda3: rng.gen_range(0.1..0.9), ..m1 };
        let rho = rng.gen_range(0.1..0.9);

        let a = thm1_case1_alloc(&s, &n, &m1).unwrap();
        let g = grid_best_general(&s, &n, &m1);
        assert!(balanced_general(&a, &s, &n, &m1) >= g - 1e-6 * g.abs(), "thm1 case1 {a:?}");
        let a = thm1_case3_alloc(&s, &n, &m3).unwrap();
        let g = grid_best_general(&s, &n, &m3);
        assert!(balanced_general(&a, &s, &n, &m3) >= g - 1e-6 * g.abs(), "thm1 case3 {a:?}");

        let a = thm2_case1_alloc(&s, &n, &m1, rho).unwrap();
        let g = grid_best_fixed(&s, &n, &m1, rho);
        assert!(balanced_fixed(&a, &s, &n, &m1) >= g - 1e-6 * g.abs(), "thm2 case1 {a:?}");
        let a = thm2_case3_alloc(&s, &n, &m3, rho).unwrap();
        let g = grid_best_fixed(&s, &n, &m3, rho);
        assert!(balanced_fixed(&a, &s, &n, &m3) >= g - 1e-6 * g.abs(), "thm2 case3 {a:?}");
    }
}
