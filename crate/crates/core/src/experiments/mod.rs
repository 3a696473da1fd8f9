//! Config-driven experiments: case-region sweeps, rate curves, the
//! correlation comparison and single solves, written as CSV or JSON.
//!
//! Grid points are solved independently on a pool of `workers` threads and
//! collected in grid order, so artifacts depend only on the config.

mod config;

pub use config::{EnsembleSpec, ExperimentConfig, Grid, NoiseSpec};

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocators::{CaseLabel, Mode, Multipliers};
use crate::channel::{FadingEnsemble, NoiseModel, PowerBudgets};
use crate::dual::{classify_and_solve, solve_case1, solve_case2, Diagnostics, SolveRequest, SolveResult};
use crate::error::{Error, Result};
use crate::oracle::kkt_residuals;

/// Version of the [`SolveDump`] layout.
pub const SCHEMA_VERSION: u32 = 1;

fn run_pool<T, R, F>(workers: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

fn request(
    cfg: &ExperimentConfig,
    ensemble: &FadingEnsemble,
    noise: NoiseModel,
    mode: Mode,
    p1_bar: f64,
    p2_bar: f64,
) -> Result<SolveRequest> {
    Ok(SolveRequest::new(ensemble.clone(), noise, PowerBudgets::new(p1_bar, p2_bar)?, mode)?
        .with_tolerances(cfg.tolerances))
}

fn single(grid: &Grid, name: &str) -> Result<f64> {
    match grid.values()?.as_slice() {
        [v] => Ok(*v),
        v => Err(Error::Config(format!("{name} must hold one value for this experiment, got {}", v.len()))),
    }
}

/// Case label of one grid cell, or the failure message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellOutcome {
    Solved(CaseLabel),
    Failed(String),
}

impl CellOutcome {
    pub fn label(&self) -> &str {
        match self {
            CellOutcome::Solved(c) => c.as_str(),
            CellOutcome::Failed(_) => "failed",
        }
    }

    pub fn case(&self) -> Option<CaseLabel> {
        match self {
            CellOutcome::Solved(c) => Some(*c),
            CellOutcome::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub p1_bar: f64,
    pub p2_bar: f64,
    pub outcome: CellOutcome,
}

/// Relay budgets where the increment scan leaves case 1 and the decrement
/// scan leaves case 2, for one source budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBoundary {
    pub p1_bar: f64,
    /// first scanned `P2_bar` whose case 1 policy has `E R2 < E R1`
    pub case1_case3: Option<f64>,
    /// smallest scanned `P2_bar` of the unbroken case 2 run at the top
    pub case3_case2: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSweep {
    /// row-major over `p1_bar`, then `p2_bar`
    pub cells: Vec<RegionCell>,
    pub boundaries: Vec<RegionBoundary>,
}

impl RegionSweep {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.case().is_none()).count()
            + self.boundaries.iter().map(|b| b.failures).sum::<usize>()
    }

    /// Case labels along increasing `P2_bar` for one source budget.
    pub fn column(&self, p1_bar: f64) -> Vec<&RegionCell> {
        self.cells.iter().filter(|c| c.p1_bar == p1_bar).collect()
    }

    pub fn write_cells_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "p1_bar,p2_bar,case")?;
        for c in &self.cells {
            writeln!(w, "{:?},{:?},{}", c.p1_bar, c.p2_bar, c.outcome.label())?;
        }
        Ok(())
    }

    pub fn write_boundaries_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "p1_bar,case1_case3_boundary,case3_case2_boundary")?;
        for b in &self.boundaries {
            writeln!(w, "{:?},{},{}", b.p1_bar, opt(b.case1_case3), opt(b.case3_case2))?;
        }
        Ok(())
    }
}

impl RegionCell {
    pub fn case(&self) -> Option<CaseLabel> {
        self.outcome.case()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

fn scan_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    Grid::Range { start: lo, stop: hi, step }.values().unwrap_or_else(|_| vec![lo])
}

fn boundary_scan(
    cfg: &ExperimentConfig,
    ensemble: &FadingEnsemble,
    noise: NoiseModel,
    p1_bar: f64,
    lo: f64,
    hi: f64,
) -> RegionBoundary {
    let points = scan_points(lo, hi, cfg.boundary_step);
    let mut failures = 0;
    let mut case1_case3 = None;
    for &p2 in &points {
        match request(cfg, ensemble, noise, cfg.mode, p1_bar, p2).and_then(|r| solve_case1(&r)) {
            Ok(out) if out.rates.r2 < out.rates.r1 => {
                case1_case3 = Some(p2);
                break;
            }
            Ok(_) => {}
            Err(_) => failures += 1,
        }
    }
    let mut case3_case2 = None;
    for &p2 in points.iter().rev() {
        match request(cfg, ensemble, noise, cfg.mode, p1_bar, p2).and_then(|r| solve_case2(&r)) {
            Ok(out) if out.rates.r2 <= out.rates.r1 => case3_case2 = Some(p2),
            Ok(_) => break,
            Err(_) => {
                failures += 1;
                break;
            }
        }
    }
    RegionBoundary { p1_bar, case1_case3, case3_case2, failures }
}

/// Classify every `(P1_bar, P2_bar)` cell, and scan each source budget for
/// the two boundaries over the span of the relay grid in steps of
/// `boundary_step`.
pub fn sweep_case_regions(cfg: &ExperimentConfig, ensemble: &FadingEnsemble) -> Result<RegionSweep> {
    let noise = cfg.noise_model()?;
    let p1s = cfg.p1_bar.values()?;
    let p2s = cfg.p2_bar.values()?;
    let points: Vec<(f64, f64)> = p1s.iter().flat_map(|&a| p2s.iter().map(move |&b| (a, b))).collect();
    let cells = run_pool(cfg.workers, &points, |&(p1_bar, p2_bar)| {
        let outcome = match request(cfg, ensemble, noise, cfg.mode, p1_bar, p2_bar).and_then(|r| classify_and_solve(&r))
        {
            Ok(out) => CellOutcome::Solved(out.case),
            Err(e) => CellOutcome::Failed(e.to_string()),
        };
        RegionCell { p1_bar, p2_bar, outcome }
    })?;
    let lo = p2s.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = p2s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let boundaries = run_pool(cfg.workers, &p1s, |&p1| boundary_scan(cfg, ensemble, noise, p1, lo, hi))?;
    Ok(RegionSweep { cells, boundaries })
}

/// One point of a rate curve. `case` is `None` and the numbers are NaN
/// when the solve failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub abscissa: f64,
    pub rate: f64,
    pub case: Option<CaseLabel>,
    pub multipliers: Multipliers,
    pub diagnostics: Option<Diagnostics>,
    pub error: Option<String>,
}

impl CurvePoint {
    fn from_result(abscissa: f64, r: Result<SolveResult>) -> Self {
        match r {
            Ok(out) => CurvePoint {
                abscissa,
                rate: out.min_rate(),
                case: Some(out.case),
                multipliers: out.multipliers,
                diagnostics: Some(out.diagnostics),
                error: None,
            },
            Err(e) => CurvePoint {
                abscissa,
                rate: f64::NAN,
                case: None,
                multipliers: Multipliers { lambda1: f64::NAN, lambda2: f64::NAN, lambda3: f64::NAN },
                diagnostics: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// Points of one rate curve in abscissa order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub points: Vec<CurvePoint>,
}

impl RateCurve {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.case.is_none()).count()
    }

    /// First abscissa whose case differs from the previous point's, with
    /// both labels.
    pub fn transitions(&self) -> Vec<(f64, CaseLabel, CaseLabel)> {
        self.points
            .windows(2)
            .filter_map(|w| match (w[0].case, w[1].case) {
                (Some(a), Some(b)) if a != b => Some((w[1].abscissa, a, b)),
                _ => None,
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "abscissa,rate,case,lambda1,lambda2,lambda3,source_residual,relay_residual,rate_gap")?;
        for p in &self.points {
            let case = p.case.map(|c| c.as_str()).unwrap_or("failed");
            let d = p.diagnostics.map(|d| (d.source_residual, d.relay_residual, d.rate_gap));
            let (a, b, c) = d.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            let m = &p.multipliers;
            writeln!(
                w,
                "{:?},{:?},{},{:?},{:?},{:?},{:?},{:?},{:?}",
                p.abscissa, p.rate, case, m.lambda1, m.lambda2, m.lambda3, a, b, c
            )?;
        }
        Ok(())
    }
}

/// Rate against the source budget at the single relay budget of
/// `cfg.p2_bar`.
pub fn rate_curve_vs_p1(cfg: &ExperimentConfig, ensemble: &FadingEnsemble) -> Result<RateCurve> {
    let noise = cfg.noise_model()?;
    let p2 = single(&cfg.p2_bar, "p2_bar")?;
    let xs = cfg.p1_bar.values()?;
    let points = run_pool(cfg.workers, &xs, |&p1| {
        CurvePoint::from_result(
            p1,
            request(cfg, ensemble, noise, cfg.mode, p1, p2).and_then(|r| classify_and_solve(&r)),
        )
    })?;
    Ok(RateCurve { points })
}

/// Rate against the relay budget at the single source budget of
/// `cfg.p1_bar`.
pub fn rate_curve_vs_p2(cfg: &ExperimentConfig, ensemble: &FadingEnsemble) -> Result<RateCurve> {
    let noise = cfg.noise_model()?;
    let p1 = single(&cfg.p1_bar, "p1_bar")?;
    let xs = cfg.p2_bar.values()?;
    let points = run_pool(cfg.workers, &xs, |&p2| {
        CurvePoint::from_result(
            p2,
            request(cfg, ensemble, noise, cfg.mode, p1, p2).and_then(|r| classify_and_solve(&r)),
        )
    })?;
    Ok(RateCurve { points })
}

/// Whether every step after the first abscissa at or above `from` changes
/// the rate by less than `tol`.
pub fn saturates(curve: &RateCurve, from: f64, tol: f64) -> bool {
    let tail: Vec<&CurvePoint> = curve.points.iter().filter(|p| p.abscissa >= from).collect();
    tail.windows(2).all(|w| (w[1].rate - w[0].rate).abs() < tol)
}

/// Average over states with positive source power of
/// `sqrt(P_s / (P_r + P_s))`; zero when no state transmits.
pub fn mean_optimal_rho(result: &SolveResult) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for a in &result.policy {
        let g = a.general();
        let p = g.p_r + g.p_s;
        if p > 0.0 {
            sum += (g.p_s / p).sqrt();
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Rates at one destination noise of the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n_total: f64,
    pub rate_thm1: f64,
    /// one entry per fixed correlation, in config order
    pub rate_fixed: Vec<f64>,
    pub rate_mean_rho: f64,
    pub mean_rho: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rhos: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "n,rate_thm1")?;
        for rho in &self.rhos {
            write!(w, ",rate_thm2_rho_{rho}")?;
        }
        writeln!(w, ",rate_thm2_mean_rho,mean_rho")?;
        for r in &self.rows {
            write!(w, "{:?},{:?}", r.n_total, r.rate_thm1)?;
            for x in &r.rate_fixed {
                write!(w, ",{x:?}")?;
            }
            writeln!(w, ",{:?},{:?}", r.rate_mean_rho, r.mean_rho)?;
        }
        Ok(())
    }
}

fn compare_row(
    cfg: &ExperimentConfig,
    ensemble: &FadingEnsemble,
    n_total: f64,
    p1: f64,
    p2: f64,
) -> Result<ComparisonRow> {
    let noise = NoiseModel::from_total(cfg.noise.n1, n_total)?;
    let solve = |mode| request(cfg, ensemble, noise, mode, p1, p2).and_then(|r| classify_and_solve(&r));
    let thm1 = solve(Mode::Theorem1)?;
    let mean_rho = mean_optimal_rho(&thm1);
    let rate_fixed = cfg
        .compare_rhos
        .iter()
        .map(|&rho| solve(Mode::Theorem2 { rho }).map(|r| r.min_rate()))
        .collect::<Result<_>>()?;
    let rate_mean_rho = solve(Mode::Theorem2 { rho: mean_rho })?.min_rate();
    Ok(ComparisonRow { n_total, rate_thm1: thm1.min_rate(), rate_fixed, rate_mean_rho, mean_rho, error: None })
}

/// Optimised correlation against fixed correlations over the destination
/// noise grid, at the single budgets of the config. The config mode is not
/// used.
pub fn compare_thm1_thm2(cfg: &ExperimentConfig, ensemble: &FadingEnsemble) -> Result<Comparison> {
    let grid = cfg.n_total_grid.as_ref().ok_or_else(|| Error::Config("compare needs n_total_grid".into()))?;
    let ns = grid.values()?;
    let p1 = single(&cfg.p1_bar, "p1_bar")?;
    let p2 = single(&cfg.p2_bar, "p2_bar")?;
    let rows = run_pool(cfg.workers, &ns, |&n| {
        compare_row(cfg, ensemble, n, p1, p2).unwrap_or_else(|e| ComparisonRow {
            n_total: n,
            rate_thm1: f64::NAN,
            rate_fixed: vec![f64::NAN; cfg.compare_rhos.len()],
            rate_mean_rho: f64::NAN,
            mean_rho: f64::NAN,
            error: Some(e.to_string()),
        })
    })?;
    Ok(Comparison { rhos: cfg.compare_rhos.clone(), rows })
}

/// Largest per-state KKT residuals of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktSummary {
    pub max_stationarity: f64,
    pub max_complementarity: f64,
}

/// Per-state KKT maxima of `result` on `ensemble`; `None` when a price is
/// pinned at its bracket end.
pub fn kkt_summary(result: &SolveResult, ensemble: &FadingEnsemble, noise: &NoiseModel) -> Option<KktSummary> {
    let mut out = KktSummary { max_stationarity: 0.0, max_complementarity: 0.0 };
    for (a, s) in result.policy.iter().zip(ensemble.states()) {
        let k = kkt_residuals(a, s, noise, &result.multipliers, result.case, result.mode).ok()?;
        out.max_stationarity = out.max_stationarity.max(k.max_stationarity());
        out.max_complementarity = out.max_complementarity.max(k.max_complementarity());
    }
    Some(out)
}

/// JSON artifact of a single solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDump {
    pub schema_version: u32,
    pub seed: u64,
    pub ensemble_size: usize,
    pub noise: NoiseModel,
    pub result: SolveResult,
    pub kkt: Option<KktSummary>,
}

impl SolveDump {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Solve at one budget pair with full diagnostics.
pub fn solve_once(cfg: &ExperimentConfig, ensemble: &FadingEnsemble, p1_bar: f64, p2_bar: f64) -> Result<SolveDump> {
    let noise = cfg.noise_model()?;
    let result = classify_and_solve(&request(cfg, ensemble, noise, cfg.mode, p1_bar, p2_bar)?)?;
    let kkt = kkt_summary(&result, ensemble, &noise);
    Ok(SolveDump {
        schema_version: SCHEMA_VERSION,
        seed: cfg.ensemble.seed,
        ensemble_size: ensemble.len(),
        noise,
        result,
        kkt,
    })
}
