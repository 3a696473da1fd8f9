//! Multiplier search over a sampled ensemble and case classification.
//!
//! Every multiplier comes from a one-dimensional root search on a monotone
//! ensemble average: the source price for the source budget, the relay
//! price (along the curve where the source budget binds) for the relay
//! budget, and the rate-equality weight for `E R1 = E R2`. Prices are
//! searched in log space inside an expanding bracket with Illinois
//! false-position steps, warm-started from the previous solution.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::allocators::{
    thm1_case1_alloc, thm1_case2_alloc, thm1_case2_source, thm1_case3_alloc, thm2_case1_alloc, thm2_case2_p1,
    thm2_case2_p2, thm2_case3_alloc, CaseLabel, Mode, Multipliers,
};
use crate::channel::{ChannelState, FadingEnsemble, NoiseModel, PowerBudgets};
use crate::error::{domain, Error, Result};
use crate::rates::{ensemble_rate, Allocation, AllocationFixedRho, EnsembleRates};

/// Lower end of every price bracket; a price pinned here means the
/// budget is slack.
pub const LAMBDA_MIN: f64 = 1e-9;
/// Upper end of every price bracket.
pub const LAMBDA_MAX: f64 = 1e6;

/// Accepted residuals of the dual search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// relative budget residual
    pub power_rel: f64,
    /// `|E R1 - E R2|` in case 3, bits
    pub rate_abs: f64,
    /// evaluation cap of each one-dimensional search
    pub max_evals: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { power_rel: 1e-6, rate_abs: 1e-5, max_evals: 200 }
    }
}

/// Problem instance: ensemble, noise, budgets and scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRequest {
    pub ensemble: FadingEnsemble,
    pub noise: NoiseModel,
    pub budgets: PowerBudgets,
    pub mode: Mode,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl SolveRequest {
    pub fn new(ensemble: FadingEnsemble, noise: NoiseModel, budgets: PowerBudgets, mode: Mode) -> Result<Self> {
        mode.validate()?;
        Ok(Self { ensemble, noise, budgets, mode, tolerances: Tolerances::default() })
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }
}

/// Residuals and effort of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `(E source - P1_bar) / P1_bar`
    pub source_residual: f64,
    /// `(E P2 - P2_bar) / P2_bar`, or `E P2` when the relay budget is zero
    pub relay_residual: f64,
    /// `E R1 - E R2` in bits
    pub rate_gap: f64,
    /// evaluations of the outermost search
    pub iterations: usize,
    /// allocator passes over the ensemble
    pub sweeps: usize,
}

/// Optimal policy with its multipliers.
///
/// In case 2, `multipliers.lambda1` prices the source power against
/// `0.5 ln(1 + snr_relay)`, `lambda2` is the relay price of the comparison
/// problem and `lambda3 = 1`. In cases 1 and 3 all three follow the
/// balanced Lagrangian convention of [`crate::allocators`]. For case 2,
/// `rates.r1` is the comparison rate `max E R1` over relay policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub case: CaseLabel,
    pub mode: Mode,
    pub budgets: PowerBudgets,
    pub multipliers: Multipliers,
    pub policy: Vec<Allocation>,
    pub rates: EnsembleRates,
    pub diagnostics: Diagnostics,
}

impl SolveResult {
    /// Achieved `min(E R1, E R2)`.
    pub fn min_rate(&self) -> f64 {
        self.rates.min
    }
}

/// Per-state allocation of `case` for `mode` at multipliers `m` (case 2
/// reads `m.lambda1` as the source price and `m.lambda2` as the relay
/// price).
pub fn allocate_state(
    mode: Mode,
    case: CaseLabel,
    s: &ChannelState,
    n: &NoiseModel,
    m: &Multipliers,
) -> Result<Allocation> {
    match (mode, case) {
        (Mode::Theorem1, CaseLabel::Case1) => thm1_case1_alloc(s, n, m).map(Allocation::General),
        (Mode::Theorem1, CaseLabel::Case2) => thm1_case2_alloc(s, n, m.lambda1, m.lambda2).map(Allocation::General),
        (Mode::Theorem1, CaseLabel::Case3) => thm1_case3_alloc(s, n, m).map(Allocation::General),
        (Mode::Theorem2 { rho }, CaseLabel::Case1) => thm2_case1_alloc(s, n, m, rho).map(Allocation::FixedRho),
        (Mode::Theorem2 { rho }, CaseLabel::Case2) => {
            let p1 = thm2_case2_p1(s, n, m.lambda1, rho);
            let p2 = thm2_case2_p2(s, n, m.lambda2, rho, p1)?;
            Ok(Allocation::FixedRho(AllocationFixedRho { p1, p2, rho }))
        }
        (Mode::Theorem2 { rho }, CaseLabel::Case3) => thm2_case3_alloc(s, n, m, rho).map(Allocation::FixedRho),
    }
}

/// Outcome of a one-dimensional search.
#[derive(Debug, Clone, Copy)]
struct Root {
    x: f64,
    fx: f64,
    converged: bool,
    evals: usize,
    /// `(a, f(a), b, f(b))` with `f(a) > 0 > f(b)` when unconverged
    bracket: Option<(f64, f64, f64, f64)>,
}

/// Illinois false position for a nonincreasing `f` with `f(a) > 0 > f(b)`.
fn illinois<F>(
    f: &mut F,
    (mut a, fa0): (f64, f64),
    (mut b, fb0): (f64, f64),
    tol: f64,
    max_evals: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut fa, mut fb) = (fa0, fb0);
    let (mut true_fa, mut true_fb) = (fa0, fb0);
    let mut side = 0i8;
    let mut evals = 0;
    let best = |a: f64, fa: f64, b: f64, fb: f64, evals| {
        let (x, fx) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
        Root { x, fx, converged: fx.abs() <= tol, evals, bracket: Some((a, fa, b, fb)) }
    };
    while evals < max_evals {
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        if !(x > a && x < b) || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        let fx = f(x)?;
        evals += 1;
        if fx.abs() <= tol {
            return Ok(Root { x, fx, converged: true, evals, bracket: None });
        }
        if fx > 0.0 {
            a = x;
            fa = fx;
            true_fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            true_fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    Ok(best(a, true_fa, b, true_fb, evals))
}

/// Root in `[LAMBDA_MIN, LAMBDA_MAX]` of a nonincreasing function of a
/// price, searched in log space outward from `guess`. When the function is
/// still negative at `LAMBDA_MIN` the constraint is slack and the price is
/// pinned there.
fn price_root<F>(mut f: F, guess: f64, tol: f64, max_evals: usize) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (t_lo, t_hi) = (LAMBDA_MIN.ln(), LAMBDA_MAX.ln());
    let mut g = |t: f64| f(t.exp());
    let t0 = guess.clamp(LAMBDA_MIN, LAMBDA_MAX).ln();
    let f0 = g(t0)?;
    let mut evals = 1;
    let done = |t: f64, ft: f64, evals| Ok(Root { x: t.exp(), fx: ft, converged: true, evals, bracket: None });
    if f0.abs() <= tol {
        return done(t0, f0, evals);
    }
    let mut step = 0.25;
    let (a, b);
    if f0 > 0.0 {
        let (mut ta, mut fa) = (t0, f0);
        loop {
            let tb = (ta + step).min(t_hi);
            let fb = g(tb)?;
            evals += 1;
            if fb.abs() <= tol {
                return done(tb, fb, evals);
            }
            if fb < 0.0 {
                a = (ta, fa);
                b = (tb, fb);
                break;
            }
            if tb >= t_hi || evals >= max_evals {
                return Ok(Root { x: tb.exp(), fx: fb, converged: false, evals, bracket: None });
            }
            ta = tb;
            fa = fb;
            step *= 2.0;
        }
    } else {
        let (mut tb, mut fb) = (t0, f0);
        loop {
            let ta = (tb - step).max(t_lo);
            let fa = g(ta)?;
            evals += 1;
            if fa.abs() <= tol {
                return done(ta, fa, evals);
            }
            if fa > 0.0 {
                a = (ta, fa);
                b = (tb, fb);
                break;
            }
            if ta <= t_lo {
                // slack constraint
                return done(ta, fa, evals);
            }
            if evals >= max_evals {
                return Ok(Root { x: ta.exp(), fx: fa, converged: false, evals, bracket: None });
            }
            tb = ta;
            fb = fa;
            step *= 2.0;
        }
    }
    let r = illinois(&mut g, a, b, tol, max_evals.saturating_sub(evals))?;
    Ok(Root {
        x: r.x.exp(),
        fx: r.fx,
        converged: r.converged,
        evals: evals + r.evals,
        bracket: r.bracket.map(|(a, fa, b, fb)| (a.exp(), fa, b.exp(), fb)),
    })
}

/// Mixing weight of the lower-price endpoint that zeroes a residual linear
/// in the policy, when the bracket has collapsed onto a jump.
fn collapsed_mix(r: &Root) -> Option<(f64, f64, f64)> {
    let (a, fa, b, fb) = r.bracket?;
    if r.converged || (b / a).ln() > 1e-12 {
        return None;
    }
    Some((a, b, fb / (fb - fa)))
}

fn mix_policies(pa: &[Allocation], pb: &[Allocation], theta: f64) -> Vec<Allocation> {
    pa.iter().zip(pb).map(|(x, y)| x.mix(y, theta)).collect()
}

/// Prices meeting both budgets for a fixed rate weight.
#[derive(Debug, Clone)]
struct BudgetSolution {
    multipliers: Multipliers,
    policy: Vec<Allocation>,
    source_residual: f64,
    relay_residual: f64,
}

struct Search<'a> {
    req: &'a SolveRequest,
    sweeps: Cell<usize>,
    /// warm start of the source price
    l1_warm: Cell<f64>,
}

const SOURCE_TOL: f64 = 1e-12;
const RELAY_TOL: f64 = 1e-10;

impl<'a> Search<'a> {
    fn new(req: &'a SolveRequest) -> Self {
        Self { req, sweeps: Cell::new(0), l1_warm: Cell::new(1.0) }
    }

    fn policy(&self, case: CaseLabel, m: &Multipliers) -> Result<Vec<Allocation>> {
        self.sweeps.set(self.sweeps.get() + 1);
        let (mode, n) = (self.req.mode, &self.req.noise);
        self.req.ensemble.map(|s| allocate_state(mode, case, s, n, m)).into_iter().collect()
    }

    fn usage(&self, policy: &[Allocation]) -> (f64, f64) {
        let w = self.req.ensemble.weight();
        let src: f64 = policy.iter().map(|a| a.source_power()).sum();
        let relay: f64 = policy.iter().map(|a| a.relay_power()).sum();
        (src * w, relay * w)
    }

    fn residuals(&self, policy: &[Allocation]) -> (f64, f64) {
        let b = &self.req.budgets;
        let (src, relay) = self.usage(policy);
        let relay_res = if b.p2_bar > 0.0 { relay / b.p2_bar - 1.0 } else { relay };
        (src / b.p1_bar - 1.0, relay_res)
    }

    fn failure(&self, what: &str, residuals: Vec<f64>, iterations: usize) -> Error {
        Error::SearchFailure { message: what.to_string(), residuals, iterations }
    }

    /// Source price meeting the source budget at fixed relay price. Where
    /// usage jumps across the solution price (allocators that are not
    /// strictly concave), the two policies on either side are mixed so the
    /// budget is met exactly.
    fn solve_source(&self, case: CaseLabel, l2: f64, l3: f64) -> Result<(Multipliers, Vec<Allocation>)> {
        let max = self.req.tolerances.max_evals;
        let at = |l1: f64| Multipliers { lambda1: l1, lambda2: l2, lambda3: l3 };
        let r =
            price_root(|l1| Ok(self.residuals(&self.policy(case, &at(l1))?).0), self.l1_warm.get(), SOURCE_TOL, max)?;
        self.l1_warm.set(r.x);
        if let Some((a, b, theta)) = collapsed_mix(&r) {
            let (pa, pb) = (self.policy(case, &at(a))?, self.policy(case, &at(b))?);
            return Ok((at(a), mix_policies(&pa, &pb, theta)));
        }
        Ok((at(r.x), self.policy(case, &at(r.x))?))
    }

    /// Both budgets at fixed rate weight `l3`, warm-started at `l2_guess`.
    fn solve_budgets(&self, case: CaseLabel, l2_guess: f64, l3: f64) -> Result<BudgetSolution> {
        let max = self.req.tolerances.max_evals;
        let (multipliers, policy) = if self.req.budgets.p2_bar == 0.0 {
            self.solve_source(case, LAMBDA_MAX, l3)?
        } else {
            // latest evaluation on each side of the root, and the latest overall
            let (mut above, mut below, mut last) = (None, None, None);
            let r = price_root(
                |l2| {
                    let sol = self.solve_source(case, l2, l3)?;
                    let res = self.residuals(&sol.1).1;
                    if res > 0.0 {
                        above = Some(sol.clone());
                    } else {
                        below = Some(sol.clone());
                    }
                    last = Some(sol);
                    Ok(res)
                },
                l2_guess,
                RELAY_TOL,
                max,
            )?;
            match (collapsed_mix(&r), above, below) {
                (Some((_, _, theta)), Some((ma, pa)), Some((_, pb))) => (ma, mix_policies(&pa, &pb, theta)),
                _ if r.converged => last.expect("at least one evaluation"),
                _ => self.solve_source(case, r.x, l3)?,
            }
        };
        let (source_residual, relay_residual) = self.residuals(&policy);
        Ok(BudgetSolution { multipliers, policy, source_residual, relay_residual })
    }

    fn rates(&self, policy: &[Allocation]) -> Result<EnsembleRates> {
        ensemble_rate(policy, &self.req.ensemble, &self.req.noise)
    }

    fn check_budgets(&self, sol: &BudgetSolution, iterations: usize) -> Result<()> {
        let tol = self.req.tolerances.power_rel;
        let slack_ok = |res: f64, price: f64| res.abs() <= tol || (res < 0.0 && price <= LAMBDA_MIN * 1.0001);
        let relay_ok = if self.req.budgets.p2_bar == 0.0 {
            sol.relay_residual <= tol
        } else {
            slack_ok(sol.relay_residual, sol.multipliers.lambda2)
        };
        if slack_ok(sol.source_residual, sol.multipliers.lambda1) && relay_ok {
            Ok(())
        } else {
            Err(self.failure(
                "budgets not met within tolerance",
                vec![sol.source_residual, sol.relay_residual],
                iterations,
            ))
        }
    }

    fn finish(&self, case: CaseLabel, sol: BudgetSolution, rates: EnsembleRates, iterations: usize) -> SolveResult {
        SolveResult {
            case,
            mode: self.req.mode,
            budgets: self.req.budgets,
            multipliers: sol.multipliers,
            policy: sol.policy,
            rates,
            diagnostics: Diagnostics {
                source_residual: sol.source_residual,
                relay_residual: sol.relay_residual,
                rate_gap: rates.r1 - rates.r2,
                iterations,
                sweeps: self.sweeps.get(),
            },
        }
    }

    fn case1(&self) -> Result<SolveResult> {
        let sol = self.solve_budgets(CaseLabel::Case1, 1.0, 0.0)?;
        self.check_budgets(&sol, 1)?;
        let rates = self.rates(&sol.policy)?;
        Ok(self.finish(CaseLabel::Case1, sol, rates, 1))
    }

    fn case2(&self) -> Result<SolveResult> {
        let (mode, n, b) = (self.req.mode, &self.req.noise, &self.req.budgets);
        let max = self.req.tolerances.max_evals;
        let source = |s: &ChannelState, l: f64| match mode {
            Mode::Theorem1 => thm1_case2_source(s, n, l),
            Mode::Theorem2 { rho } => thm2_case2_p1(s, n, l, rho),
        };
        let src = price_root(
            |l| {
                self.sweeps.set(self.sweeps.get() + 1);
                Ok(self.req.ensemble.mean(|s| source(s, l)) / b.p1_bar - 1.0)
            },
            1.0,
            SOURCE_TOL,
            max,
        )?;
        let mu = if b.p2_bar == 0.0 {
            LAMBDA_MAX
        } else {
            price_root(
                |mu| {
                    let m = Multipliers { lambda1: src.x, lambda2: mu, lambda3: 1.0 };
                    Ok(self.residuals(&self.policy(CaseLabel::Case2, &m)?).1)
                },
                1.0,
                RELAY_TOL,
                max,
            )?
            .x
        };
        let multipliers = Multipliers { lambda1: src.x, lambda2: mu, lambda3: 1.0 };
        let policy = self.policy(CaseLabel::Case2, &multipliers)?;
        let (source_residual, relay_residual) = self.residuals(&policy);
        let sol = BudgetSolution { multipliers, policy, source_residual, relay_residual };
        self.check_budgets(&sol, src.evals)?;
        let rates = self.rates(&sol.policy)?;
        Ok(self.finish(CaseLabel::Case2, sol, rates, src.evals))
    }

    /// Rate weight balancing both rates, given the gaps `E R1 - E R2` at the
    /// two ends of `[0, 1]`.
    fn case3(&self, warm: &Multipliers, gap0: f64, gap1: f64) -> Result<SolveResult> {
        let max = self.req.tolerances.max_evals;
        let tol = self.req.tolerances.rate_abs;
        self.l1_warm.set(warm.lambda1);
        let l2_warm = Cell::new(warm.lambda2);
        let mut last: Option<(f64, BudgetSolution, EnsembleRates)> = None;
        let mut evals = 0;
        let mut gap = |l3: f64| -> Result<f64> {
            let sol = self.solve_budgets(CaseLabel::Case3, l2_warm.get(), l3)?;
            l2_warm.set(sol.multipliers.lambda2);
            let rates = self.rates(&sol.policy)?;
            let g = rates.r1 - rates.r2;
            last = Some((l3, sol, rates));
            evals += 1;
            Ok(g)
        };
        let root = illinois(&mut gap, (0.0, gap0), (1.0, gap1), 0.01 * tol, max)?;
        let (sol, rates) = match last.take() {
            Some((l3, sol, rates)) if l3 == root.x => (sol, rates),
            _ => {
                let l3 = root.x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
                let sol = self.solve_budgets(CaseLabel::Case3, l2_warm.get(), l3)?;
                let rates = self.rates(&sol.policy)?;
                (sol, rates)
            }
        };
        self.check_budgets(&sol, evals)?;
        if (rates.r1 - rates.r2).abs() > tol {
            return Err(self.failure(
                "rate equality not met within tolerance",
                vec![sol.source_residual, sol.relay_residual, rates.r1 - rates.r2],
                evals,
            ));
        }
        Ok(self.finish(CaseLabel::Case3, sol, rates, evals))
    }
}

/// Destination-limited solve: source and relay budgets with `l3 = 0`.
pub fn solve_case1(req: &SolveRequest) -> Result<SolveResult> {
    Search::new(req).case1()
}

/// Relay-limited solve: source water-filling on the relay link, then the
/// relay policy maximising `E R1` for the comparison.
pub fn solve_case2(req: &SolveRequest) -> Result<SolveResult> {
    Search::new(req).case2()
}

/// Balanced solve. Runs the case 1 and case 2 solves for the endpoint gaps,
/// so it assumes neither of them is optimal.
pub fn solve_case3(req: &SolveRequest) -> Result<SolveResult> {
    let c1 = solve_case1(req)?;
    let c2 = solve_case2(req)?;
    solve_case3_from(req, &c1, &c2)
}

fn solve_case3_from(req: &SolveRequest, c1: &SolveResult, c2: &SolveResult) -> Result<SolveResult> {
    let gap0 = c1.rates.r1 - c1.rates.r2;
    let gap1 = c2.rates.r1 - c2.rates.r2;
    if !(gap0 > 0.0 && gap1 < 0.0) {
        return Err(domain(format!(
            "balanced case needs E R1 > E R2 at l3 = 0 and < at l3 = 1, got gaps {gap0}, {gap1}"
        )));
    }
    let s = Search::new(req);
    let mut out = s.case3(&c1.multipliers, gap0, gap1)?;
    out.diagnostics.sweeps += c1.diagnostics.sweeps + c2.diagnostics.sweeps;
    Ok(out)
}

/// Maximiser of `(1 - l3) E R1 + l3 E R2` under both budgets. At
/// `l3 = 1` this is the case 2 policy, whose relay part is irrelevant to
/// the objective.
pub fn weighted_optimum(req: &SolveRequest, l3: f64) -> Result<SolveResult> {
    if !(0.0..=1.0).contains(&l3) {
        return Err(domain(format!("rate weight must lie in [0, 1], got {l3}")));
    }
    if l3 == 1.0 {
        return solve_case2(req);
    }
    let s = Search::new(req);
    let case = if l3 == 0.0 { CaseLabel::Case1 } else { CaseLabel::Case3 };
    let sol = s.solve_budgets(case, 1.0, l3)?;
    s.check_budgets(&sol, 1)?;
    let rates = s.rates(&sol.policy)?;
    Ok(s.finish(case, sol, rates, 1))
}

/// Solve the max-min problem: case 1 if its policy has `E R2 >= E R1`,
/// else case 2 if its relay rate does not exceed the comparison rate,
/// else the balanced case.
pub fn classify_and_solve(req: &SolveRequest) -> Result<SolveResult> {
    req.mode.validate()?;
    let c1 = solve_case1(req)?;
    if c1.rates.r2 >= c1.rates.r1 {
        return Ok(c1);
    }
    let c2 = solve_case2(req)?;
    if c2.rates.r2 <= c2.rates.r1 {
        let mut c2 = c2;
        c2.diagnostics.sweeps += c1.diagnostics.sweeps;
        return Ok(c2);
    }
    solve_case3_from(req, &c1, &c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_ensemble;

    fn req(mode: Mode, p1: f64, p2: f64, n_total: f64, m: usize) -> SolveRequest {
        SolveRequest::new(
            sample_ensemble(7, m, 0.25).unwrap(),
            NoiseModel::from_total(1.0, n_total).unwrap(),
            PowerBudgets::new(p1, p2).unwrap(),
            mode,
        )
        .unwrap()
    }

    #[test]
    fn price_root_finds_water_level() {
        // E (1/l - a)+ over a = {0.5, 1, 2} equals 1
        let a = [0.5, 1.0, 2.0];
        let f = |l: f64| Ok(a.iter().map(|x| (1.0 / l - x).max(0.0)).sum::<f64>() / 3.0 - 1.0);
        let r = price_root(f, 1.0, 1e-14, 200).unwrap();
        assert!(r.converged);
        // all active: (3/l - 3.5) / 3 = 1 -> l = 3 / 6.5
        assert!((r.x - 3.0 / 6.5).abs() < 1e-12);
    }

    #[test]
    fn price_root_pins_slack() {
        let r = price_root(|_| Ok(-0.5), 1.0, 1e-12, 200).unwrap();
        assert!(r.converged && r.x <= LAMBDA_MIN * 1.0001);
    }

    #[test]
    fn case1_budgets_tight() {
        let r = req(Mode::Theorem2 { rho: 0.2f64.sqrt() }, 2.0, 0.5, 9.0, 50);
        let out = solve_case1(&r).unwrap();
        assert!(out.diagnostics.source_residual.abs() < 1e-6);
        assert!(out.diagnostics.relay_residual.abs() < 1e-6);
        assert_eq!(out.case, CaseLabel::Case1);
    }

    #[test]
    fn theorem1_case1_has_no_relay_rate() {
        let out = solve_case1(&req(Mode::Theorem1, 1.0, 1.0, 2.0, 30)).unwrap();
        assert_eq!(out.rates.r2, 0.0);
    }

    #[test]
    fn theorem1_small_source_is_case2() {
        for p1 in [0.3, 0.6, 0.9] {
            let out = classify_and_solve(&req(Mode::Theorem1, p1, 1.0, 1.6, 200)).unwrap();
            assert_eq!(out.case, CaseLabel::Case2, "p1 = {p1}");
        }
    }

    #[test]
    fn tiny_relay_budget_is_case1() {
        let out = classify_and_solve(&req(Mode::Theorem2 { rho: 0.2f64.sqrt() }, 1.0, 0.01, 9.0, 100)).unwrap();
        assert_eq!(out.case, CaseLabel::Case1);
    }

    #[test]
    fn balanced_case_equalises_rates() {
        let out = classify_and_solve(&req(Mode::Theorem1, 3.0, 1.0, 1.6, 100)).unwrap();
        assert_eq!(out.case, CaseLabel::Case3);
        assert!(out.diagnostics.rate_gap.abs() < 1e-5);
        assert!(out.multipliers.lambda3 > 0.0 && out.multipliers.lambda3 < 1.0);
    }
}
