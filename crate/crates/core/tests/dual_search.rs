use df_relay::channel::sample_ensemble;
use df_relay::dual::{weighted_optimum, LAMBDA_MIN};
use df_relay::rates::ensemble_rate;
use df_relay::{
    classify_and_solve, Allocation, AllocationFixedRho, AllocationGeneral, CaseLabel, Mode, NoiseModel, PowerBudgets,
    SolveRequest, SolveResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn request(seed: u64, m: usize, mode: Mode, p1: f64, p2: f64, n_total: f64) -> SolveRequest {
    SolveRequest::new(
        sample_ensemble(seed, m, 0.25).unwrap(),
        NoiseModel::from_total(1.0, n_total).unwrap(),
        PowerBudgets::new(p1, p2).unwrap(),
        mode,
    )
    .unwrap()
}

fn cases() -> Vec<SolveRequest> {
    let rho = 0.2f64.sqrt();
    vec![
        request(1, 60, Mode::Theorem1, 0.5, 1.0, 1.6),
        request(2, 60, Mode::Theorem1, 3.0, 1.0, 1.6),
        request(3, 60, Mode::Theorem1, 3.0, 0.3, 2.0),
        request(4, 60, Mode::Theorem2 { rho }, 1.0, 0.05, 9.0),
        request(5, 60, Mode::Theorem2 { rho }, 1.0, 1.0, 9.0),
        request(6, 60, Mode::Theorem2 { rho }, 0.5, 8.0, 9.0),
        request(7, 60, Mode::Theorem2 { rho: 0.0 }, 2.0, 1.0, 2.0),
    ]
}

fn usage(r: &SolveResult) -> (f64, f64) {
    let m = r.policy.len() as f64;
    (
        r.policy.iter().map(|a| a.source_power()).sum::<f64>() / m,
        r.policy.iter().map(|a| a.relay_power()).sum::<f64>() / m,
    )
}

#[test]
fn covers_all_three_cases() {
    let labels: Vec<CaseLabel> = cases().iter().map(|r| classify_and_solve(r).unwrap().case).collect();
    for c in [CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3] {
        assert!(labels.contains(&c), "{labels:?}");
    }
}

#[test]
fn feasibility_and_slackness() {
    for req in cases() {
        let out = classify_and_solve(&req).unwrap();
        let m = out.multipliers;
        assert!(m.lambda1 >= 0.0 && m.lambda2 >= 0.0 && (0.0..=1.0).contains(&m.lambda3));
        let (src, relay) = usage(&out);
        let b = req.budgets;
        assert!(src <= b.p1_bar * (1.0 + 1e-6), "{src} > {}", b.p1_bar);
        assert!(relay <= b.p2_bar * (1.0 + 1e-6), "{relay} > {}", b.p2_bar);
        // a price above the slack pin means the budget binds
        if m.lambda1 > 10.0 * LAMBDA_MIN {
            assert!(m.lambda1 * (b.p1_bar - src) < 1e-6 * b.p1_bar);
        }
        if m.lambda2 > 10.0 * LAMBDA_MIN && out.case != CaseLabel::Case2 {
            assert!(m.lambda2 * (b.p2_bar - relay) < 1e-6 * b.p2_bar);
        }
        let rates = ensemble_rate(&out.policy, &req.ensemble, &req.noise).unwrap();
        assert_eq!(rates.min, out.min_rate());
        if out.case == CaseLabel::Case3 {
            assert!((rates.r1 - rates.r2).abs() <= 1e-5);
        }
    }
}

fn scaled(req: &SolveRequest, f: impl Fn(usize) -> Allocation) -> Vec<Allocation> {
    (0..req.ensemble.len()).map(f).collect()
}

#[test]
fn beats_hand_built_policies() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for req in cases() {
        let out = classify_and_solve(&req).unwrap();
        let (p1, p2) = (req.budgets.p1_bar, req.budgets.p2_bar);
        let rho = match req.mode {
            Mode::Theorem1 => 0.5,
            Mode::Theorem2 { rho } => rho,
        };
        let mut policies = vec![
            scaled(&req, |_| Allocation::FixedRho(AllocationFixedRho { p1, p2, rho })),
            scaled(&req, |_| Allocation::FixedRho(AllocationFixedRho { p1, p2: 0.0, rho })),
        ];
        if req.mode == Mode::Theorem1 {
            policies.push(scaled(&req, |_| Allocation::General(AllocationGeneral { p_r: p1, p_s: 0.0, p2 })));
            policies
                .push(scaled(&req, |_| Allocation::General(AllocationGeneral { p_r: 0.5 * p1, p_s: 0.5 * p1, p2 })));
        }
        for _ in 0..20 {
            let w1: Vec<f64> = (0..req.ensemble.len()).map(|_| rng.gen::<f64>()).collect();
            let w2: Vec<f64> = (0..req.ensemble.len()).map(|_| rng.gen::<f64>()).collect();
            let (s1, s2) = (w1.iter().sum::<f64>(), w2.iter().sum::<f64>());
            let m = req.ensemble.len() as f64;
            let r = if req.mode == Mode::Theorem1 { rng.gen_range(0.0..0.99) } else { rho };
            policies.push(scaled(&req, |i| {
                Allocation::FixedRho(AllocationFixedRho { p1: w1[i] / s1 * m * p1, p2: w2[i] / s2 * m * p2, rho: r })
            }));
        }
        for p in policies {
            let v = ensemble_rate(&p, &req.ensemble, &req.noise).unwrap().min;
            assert!(out.min_rate() >= v - 1e-9, "{:?}: {} < {v}", req.mode, out.min_rate());
        }
    }
}

#[test]
fn balanced_weight_minimises_the_sweep() {
    for req in cases() {
        let out = classify_and_solve(&req).unwrap();
        if out.case != CaseLabel::Case3 {
            continue;
        }
        // g(l) = max l E R1 + (1 - l) E R2; the balanced weight on E R1 is 1 - lambda3
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=100 {
            let l = k as f64 / 100.0;
            let r = weighted_optimum(&req, 1.0 - l).unwrap_or_else(|e| panic!("l={l} {e:?}")).rates;
            let g = l * r.r1 + (1.0 - l) * r.r2;
            if g < best.0 {
                best = (g, l);
            }
        }
        let l_star = 1.0 - out.multipliers.lambda3;
        assert!((l_star - best.1).abs() <= 0.01 + 1e-9, "{l_star} vs grid {}", best.1);
        assert!(best.0 >= out.min_rate() - 1e-9);
    }
}

#[test]
fn more_budget_never_hurts() {
    let base = request(9, 40, Mode::Theorem1, 1.0, 1.0, 1.6);
    let v = classify_and_solve(&base).unwrap().min_rate();
    for (p1, p2) in [(1.5, 1.0), (1.0, 1.5), (2.0, 2.0)] {
        let mut r = base.clone();
        r.budgets = PowerBudgets::new(p1, p2).unwrap();
        assert!(classify_and_solve(&r).unwrap().min_rate() >= v - 1e-9);
    }
}

#[test]
fn zero_relay_budget_is_solved() {
    let req = request(10, 30, Mode::Theorem1, 1.0, 0.0, 1.6);
    let out = classify_and_solve(&req).unwrap();
    assert!(out.policy.iter().all(|a| a.relay_power() == 0.0));
    assert!(out.min_rate() > 0.0);
}

#[test]
fn sequential_and_parallel_sums_agree() {
    // above the size where ensemble passes go parallel
    let req = request(13, 1500, Mode::Theorem2 { rho: 0.3 }, 1.0, 1.0, 2.0);
    let a = classify_and_solve(&req).unwrap();
    let b = classify_and_solve(&req).unwrap();
    assert_eq!(a, b);
}
