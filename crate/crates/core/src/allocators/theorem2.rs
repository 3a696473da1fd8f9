//! Allocations for a fixed correlation coefficient `rho`.
//!
//! Coordinates are `(P1, P2)` with `P_r = (1 - rho^2) P1` and
//! `P_s = rho^2 P1`. Throughout, `c = rho h31 h32` is the coherent
//! cross-gain and `Gamma = sqrt(P2 / P1)`.

use crate::allocators::lagrangian::{balanced_fixed, case2_relay};
use crate::allocators::{inv_gain, pos, two_link_waterfill, GammaRatio, Multipliers};
use crate::channel::{ChannelState, NoiseModel};
use crate::error::{domain, Error, Result};
use crate::poly::{bracketed_newton, quadratic_roots, Poly};
use crate::rates::{check_rho, AllocationFixedRho};

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

/// Positive root of `Q(G) = -l2 c G^2 + (l1 h32^2 - l2 h31^2) G + l1 c`,
/// the ratio equation of the destination-limited case.
fn ratio_root(l1: f64, l2: f64, h31sq: f64, h32sq: f64, c: f64) -> f64 {
    let b = l1 * h32sq - l2 * h31sq;
    let disc = (b * b + 4.0 * l1 * l2 * c * c).sqrt();
    if b >= 0.0 {
        (b + disc) / (2.0 * l2 * c)
    } else {
        2.0 * l1 * c / (disc - b)
    }
}

/// Nonnegative root of the ratio quadratic for the destination-limited case.
pub fn thm2_gamma_case1(s: &ChannelState, m: &Multipliers, rho: f64) -> Result<GammaRatio> {
    check_rho(rho)?;
    if !(m.lambda2 > 0.0 && m.lambda1 > 0.0) {
        return Err(Error::SingularRatio("power multipliers must be positive"));
    }
    let c = rho * s.h31 * s.h32;
    if !(c > 0.0) {
        return Err(Error::SingularRatio("coherent term vanishes (rho = 0 or a dead link)"));
    }
    Ok(GammaRatio(ratio_root(m.lambda1, m.lambda2, s.h31 * s.h31, s.h32 * s.h32, c)))
}

/// Destination-limited allocation.
pub fn thm2_case1_alloc(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64) -> Result<AllocationFixedRho> {
    check_prices(m)?;
    check_rho(rho)?;
    Ok(weighted_coherent(s, n, m.lambda1, m.lambda2, 1.0, rho))
}

/// Maximiser of `w ln(1 + snr_dest) - l1 P1 - l2 P2`.
fn weighted_coherent(s: &ChannelState, n: &NoiseModel, l1: f64, l2: f64, w: f64, rho: f64) -> AllocationFixedRho {
    let nt = n.total();
    let (h31sq, h32sq) = (s.h31 * s.h31, s.h32 * s.h32);
    let c = rho * s.h31 * s.h32;
    if c > 0.0 {
        let gamma = ratio_root(l1, l2, h31sq, h32sq, c);
        let k = h31sq + gamma * gamma * h32sq + 2.0 * c * gamma;
        let p1 = pos(w * (h31sq + c * gamma) / l1 - nt) / k;
        return AllocationFixedRho { p1, p2: gamma * gamma * p1, rho };
    }
    // no coherent gain: the better single link takes everything
    let value = |a: &AllocationFixedRho| w * a.destination_snr(s, n).ln_1p() - l1 * a.p1 - l2 * a.p2;
    let mut best = AllocationFixedRho { p1: 0.0, p2: 0.0, rho };
    let mut best_val = 0.0;
    if s.h31 > 0.0 {
        let a = AllocationFixedRho { p1: pos(w / l1 - nt / h31sq), p2: 0.0, rho };
        if value(&a) > best_val {
            best_val = value(&a);
            best = a;
        }
    }
    if s.h32 > 0.0 {
        let a = AllocationFixedRho { p1: 0.0, p2: pos(w / l2 - nt / h32sq), rho };
        if value(&a) > best_val {
            best = a;
        }
    }
    best
}

/// Source water-filling on the relay link, `(1/(2 l1) - N1/((1-rho^2) h21^2))+`.
pub fn thm2_case2_p1(s: &ChannelState, n: &NoiseModel, lambda1: f64, rho: f64) -> f64 {
    if s.h21 == 0.0 {
        return 0.0;
    }
    pos(0.5 / lambda1 - n.n1 / ((1.0 - rho * rho) * s.h21 * s.h21))
}

/// Coefficients (ascending) of the cubic in `u = sqrt(P2)` obtained by
/// clearing denominators in the relay stationarity condition.
pub fn case2_cubic(s: &ChannelState, n: &NoiseModel, lambda2: f64, rho: f64, p1: f64) -> [f64; 4] {
    let k = rho * p1.sqrt() * s.h31 * s.h32;
    let h32sq = s.h32 * s.h32;
    [-k, lambda2 * (n.total() + p1 * s.h31 * s.h31) - h32sq, 2.0 * lambda2 * k, lambda2 * h32sq]
}

/// Relay power maximising `ln(1 + snr_dest) - l2 P2` for a given `P1`.
///
/// Real roots of the cubic are isolated on `[0, cauchy_bound]`; among the
/// nonnegative ones (and `u = 0`) the one with the largest Lagrangian wins,
/// ties going to the smaller power.
pub fn thm2_case2_p2(s: &ChannelState, n: &NoiseModel, lambda2: f64, rho: f64, p1: f64) -> Result<f64> {
    if !(lambda2 > 0.0) {
        return Err(domain(format!("relay multiplier must be > 0, got {lambda2}")));
    }
    if s.h32 == 0.0 {
        return Ok(0.0);
    }
    let h32sq = s.h32 * s.h32;
    let k = rho * p1.sqrt() * s.h31 * s.h32;
    if k == 0.0 {
        return Ok(pos(1.0 / lambda2 - (n.total() + p1 * s.h31 * s.h31) / h32sq));
    }
    let coeffs = case2_cubic(s, n, lambda2, rho, p1);
    let poly = Poly::new(coeffs.to_vec());
    let roots = poly.real_roots_in(0.0, poly.cauchy_bound());
    let value = |p2: f64| {
        let a = AllocationFixedRho { p1, p2, rho };
        case2_relay(a.destination_snr(s, n), p2, lambda2)
    };
    let mut best = (0.0, value(0.0));
    for u in roots.into_iter().filter(|&u| u >= 0.0) {
        let p2 = u * u;
        let v = value(p2);
        if v > best.1 || (v == best.1 && p2 < best.0) {
            best = (p2, v);
        }
    }
    Ok(best.0)
}

/// Cross-check of [`thm2_case2_p2`] through the radical form of the cubic
/// in `v = h32 sqrt(P2)`:
/// `v^3 + F v^2 + G v + H = 0`, `F = 2 rho h31 sqrt(P1)`,
/// `G = N1 + N2 + P1 h31^2 - h32^2 / l2`, `H = -rho h31 sqrt(P1) h32^2 / l2`,
/// with `A = 2F^3 - 9FG + 27H`. One real root (Cardano) when
/// `A^2 - 4(F^2 - 3G)^3 >= 0`, otherwise the trigonometric form.
pub fn thm2_case2_p2_cardano(s: &ChannelState, n: &NoiseModel, lambda2: f64, rho: f64, p1: f64) -> f64 {
    if s.h32 == 0.0 {
        return 0.0;
    }
    let h32sq = s.h32 * s.h32;
    let f = 2.0 * rho * s.h31 * p1.sqrt();
    let g = n.total() + p1 * s.h31 * s.h31 - h32sq / lambda2;
    let h = -rho * s.h31 * p1.sqrt() * h32sq / lambda2;
    let a = 2.0 * f.powi(3) - 9.0 * f * g + 27.0 * h;
    let d0 = f * f - 3.0 * g;
    let disc = a * a - 4.0 * d0.powi(3);
    let roots: Vec<f64> = if disc >= 0.0 {
        let sq = disc.sqrt();
        vec![-(f + (0.5 * (a + sq)).cbrt() + (0.5 * (a - sq)).cbrt()) / 3.0]
    } else {
        let phi = (a / (2.0 * d0.powf(1.5))).clamp(-1.0, 1.0).acos();
        (0..3)
            .map(|k| -(f + 2.0 * d0.sqrt() * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos()) / 3.0)
            .collect()
    };
    roots.into_iter().filter(|&v| v > 0.0).fold(0.0, f64::max).powi(2) / h32sq
}

/// Terms of the balanced-case system at one state.
struct Balanced {
    l1: f64,
    l2: f64,
    l3: f64,
    h31sq: f64,
    h32sq: f64,
    c: f64,
    /// `N1 / ((1 - rho^2) h21^2)`
    alpha: f64,
    nt: f64,
}

/// `a * b` for ascending coefficient slices into `out`.
fn conv(a: &[f64], b: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
}

impl Balanced {
    fn new(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64) -> Self {
        Self {
            l1: m.lambda1,
            l2: m.lambda2,
            l3: m.lambda3,
            h31sq: s.h31 * s.h31,
            h32sq: s.h32 * s.h32,
            c: rho * s.h31 * s.h32,
            alpha: inv_gain(n.n1, s.h21) / (1.0 - rho * rho),
            nt: n.total(),
        }
    }

    fn q(&self, g: f64) -> f64 {
        (-self.l2 * self.c * g + (self.l1 * self.h32sq - self.l2 * self.h31sq)) * g + self.l1 * self.c
    }

    fn k(&self, g: f64) -> f64 {
        self.h31sq + g * (self.h32sq * g + 2.0 * self.c)
    }

    fn l(&self, g: f64) -> f64 {
        self.h32sq * g + self.c
    }

    /// Source power implied by the ratio `g`, before clamping.
    fn p1_unclamped(&self, g: f64) -> f64 {
        self.l3 * self.l(g) / self.q(g) - self.alpha
    }

    /// Quintic whose roots are the admissible ratios (times spurious ones):
    /// `l2 G Q (N - alpha K) + l2 l3 G K L - (1 - l3) L Q`.
    fn quintic(&self) -> [f64; 6] {
        let q = [self.l1 * self.c, self.l1 * self.h32sq - self.l2 * self.h31sq, -self.l2 * self.c];
        let k = [self.h31sq, 2.0 * self.c, self.h32sq];
        let l = [self.c, self.h32sq];
        let r = [self.nt - self.alpha * self.h31sq, -2.0 * self.alpha * self.c, -self.alpha * self.h32sq];
        let mut qr = [0.0; 5];
        conv(&q, &r, &mut qr);
        let mut kl = [0.0; 4];
        conv(&k, &l, &mut kl);
        let mut lq = [0.0; 4];
        conv(&l, &q, &mut lq);
        let mut out = [0.0; 6];
        for i in 0..5 {
            out[i + 1] += self.l2 * qr[i];
        }
        for i in 0..4 {
            out[i + 1] += self.l2 * self.l3 * kl[i];
            out[i] -= (1.0 - self.l3) * lq[i];
        }
        out
    }

    /// Relative residual of
    /// `(1 - l3)(h32^2 + c/G)/l2 = N + K(G) P1(G)`, with `P1` unclamped.
    fn residual(&self, g: f64) -> f64 {
        let lhs = (1.0 - self.l3) * (self.h32sq + self.c / g) / self.l2;
        let rhs = self.nt + self.k(g) * self.p1_unclamped(g);
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
    }

    fn admissible(&self, g: f64) -> bool {
        g > 0.0 && self.q(g) > 0.0 && self.p1_unclamped(g) > 0.0
    }

    /// The admissible root, found inside `(g0, g_max)` where `g_max` zeroes
    /// `Q` and `g0` is where the implied source power turns positive. The
    /// implied condition is increasing on that interval, so the root is
    /// unique when it exists.
    fn admissible_root(&self) -> Option<f64> {
        if !(self.c > 0.0 && self.alpha.is_finite() && self.l3 > 0.0 && self.l3 < 1.0) {
            return None;
        }
        let g_max = ratio_root(self.l1, self.l2, self.h31sq, self.h32sq, self.c);
        let g0 = if self.l3 / self.l1 >= self.alpha {
            0.0
        } else {
            let a = self.alpha * self.l2 * self.c;
            let b = self.l3 * self.h32sq - self.alpha * (self.l1 * self.h32sq - self.l2 * self.h31sq);
            let c0 = (self.l3 - self.alpha * self.l1) * self.c;
            *quadratic_roots(a, b, c0).last()?
        };
        if !(g0 < g_max) {
            return None;
        }
        let coeffs = self.quintic();
        let f = |x: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        let df = |x: f64| coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, &c)| acc * x + i as f64 * c);
        let (f_lo, f_hi) = (f(g0), f(g_max));
        if !(f_lo < 0.0 && f_hi > 0.0) {
            return None;
        }
        let g = bracketed_newton(f, df, g0, g_max, f_lo, f_hi);
        self.admissible(g).then_some(g)
    }
}

/// Result of the full quintic root scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSolve {
    /// Selected ratio; negative means no admissible root and the relay
    /// stays silent.
    pub gamma: f64,
    /// Every real root of the quintic.
    pub roots: Vec<f64>,
}

/// Find every real root of the balanced-case quintic (all lie within its
/// Cauchy bound) and select the admissible one (positive,
/// positive implied source power) with the largest Lagrangian. With no
/// admissible root the negative root closest to zero is returned.
pub fn thm2_case3_gamma(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64) -> Result<GammaSolve> {
    check_prices(m)?;
    check_rho(rho)?;
    if !(rho > 0.0 && s.h31 > 0.0 && s.h32 > 0.0 && s.h21 > 0.0) {
        return Err(domain("ratio equation needs rho > 0 and all gains positive"));
    }
    let b = Balanced::new(s, n, m, rho);
    let poly = Poly::new(b.quintic().to_vec());
    let bound = poly.cauchy_bound();
    let roots = poly.real_roots_in(-bound, bound);
    let mut best: Option<(f64, f64)> = None;
    for &g in roots.iter().filter(|&&g| b.admissible(g)) {
        let p1 = b.p1_unclamped(g);
        let v = balanced_fixed(&AllocationFixedRho { p1, p2: g * g * p1, rho }, s, n, m);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((g, v));
        }
    }
    if let Some((gamma, _)) = best {
        return Ok(GammaSolve { gamma, roots });
    }
    match roots.iter().filter(|&&g| g < 0.0).copied().reduce(f64::max) {
        Some(gamma) => Ok(GammaSolve { gamma, roots }),
        None => Err(Error::RootNotFound("balanced-case quintic has no real root".into())),
    }
}

/// Relative residual of the balanced-case ratio equation at `gamma`.
pub fn thm2_case3_residual(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64, gamma: f64) -> f64 {
    Balanced::new(s, n, m, rho).residual(gamma)
}

/// Quintic coefficients (ascending) of the balanced-case ratio equation.
pub fn thm2_case3_quintic(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64) -> Poly {
    Poly::new(Balanced::new(s, n, m, rho).quintic().to_vec())
}

/// Which active set produced a balanced-case allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Case3Path {
    /// both powers positive with the given ratio
    Interior {
        gamma: f64,
    },
    /// relay silent, two-link water-filling for the source
    Fallback,
    /// source silent
    RelayOnly,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case3Solution {
    pub alloc: AllocationFixedRho,
    pub path: Case3Path,
}

/// Balanced allocation with its active set.
pub fn thm2_case3_solve(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64) -> Result<Case3Solution> {
    check_prices(m)?;
    check_rho(rho)?;
    let b = Balanced::new(s, n, m, rho);
    let w_dest = 1.0 - m.lambda3;

    let mut best = Case3Solution { alloc: AllocationFixedRho { p1: 0.0, p2: 0.0, rho }, path: Case3Path::Zero };
    let mut best_val = balanced_fixed(&best.alloc, s, n, m);
    let mut consider = |alloc: AllocationFixedRho, path: Case3Path| {
        let v = balanced_fixed(&alloc, s, n, m);
        if v > best_val {
            best_val = v;
            best = Case3Solution { alloc, path };
        }
    };

    let p1 = two_link_waterfill(m.lambda1, m.lambda3, b.alpha, w_dest, inv_gain(b.nt, s.h31));
    consider(AllocationFixedRho { p1, p2: 0.0, rho }, Case3Path::Fallback);
    if s.h32 > 0.0 {
        let p2 = pos(w_dest / m.lambda2 - b.nt / b.h32sq);
        consider(AllocationFixedRho { p1: 0.0, p2, rho }, Case3Path::RelayOnly);
    }

    if let Some(g) = b.admissible_root() {
        let p1 = pos(b.p1_unclamped(g));
        consider(AllocationFixedRho { p1, p2: g * g * p1, rho }, Case3Path::Interior { gamma: g });
    } else if b.c > 0.0 && (!b.alpha.is_finite() || m.lambda3 == 0.0) {
        // relay link dead or unweighted: destination-only problem
        let a = weighted_coherent(s, n, m.lambda1, m.lambda2, w_dest, rho);
        let g = if a.p1 > 0.0 { (a.p2 / a.p1).sqrt() } else { 0.0 };
        consider(a, Case3Path::Interior { gamma: g });
    } else if b.c == 0.0 && s.h31 > 0.0 && s.h32 > 0.0 && b.alpha.is_finite() {
        // no coherent gain: source and relay stationarity decouple
        let denom = m.lambda1 - m.lambda2 * b.h31sq / b.h32sq;
        if denom > 0.0 && w_dest > 0.0 {
            let p1 = m.lambda3 / denom - b.alpha;
            let d = w_dest * b.h32sq / m.lambda2;
            let p2 = (d - b.nt - p1 * b.h31sq) / b.h32sq;
            if p1 > 0.0 && p2 > 0.0 {
                consider(AllocationFixedRho { p1, p2, rho }, Case3Path::Interior { gamma: (p2 / p1).sqrt() });
            }
        }
    }
    Ok(best)
}

/// Balanced allocation.
pub fn thm2_case3_alloc(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64) -> Result<AllocationFixedRho> {
    thm2_case3_solve(s, n, m, rho).map(|x| x.alloc)
}

/// Relay-silent allocation: `P2 = 0` and the source solves the two-link
/// water-filling quadratic.
pub fn thm2_case3_fallback(s: &ChannelState, n: &NoiseModel, m: &Multipliers, rho: f64) -> AllocationFixedRho {
    let alpha = inv_gain(n.n1, s.h21) / (1.0 - rho * rho);
    let p1 = two_link_waterfill(m.lambda1, m.lambda3, alpha, 1.0 - m.lambda3, inv_gain(n.total(), s.h31));
    AllocationFixedRho { p1, p2: 0.0, rho }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(h21: f64, h31: f64, h32: f64) -> ChannelState {
        ChannelState::new(h21, h31, h32).unwrap()
    }

    #[test]
    fn gamma_case1_symmetric() {
        // l2 h31^2 = l1 h32^2 -> Gamma = sqrt(l1 / l2) = 0.5
        let s = st(1.0, 1.0, 2.0);
        let m = Multipliers::power(0.5, 2.0);
        let g = thm2_gamma_case1(&s, &m, 0.4).unwrap().value();
        assert!((g - 0.5).abs() < 1e-15);
        assert!(thm2_gamma_case1(&s, &m, 0.0).is_err());
    }

    #[test]
    fn gamma_case1_fixed_point() {
        let s = st(0.3, 0.8, 1.3);
        let (l1, l2, rho) = (0.2, 0.7, 0.45);
        let g = thm2_gamma_case1(&s, &Multipliers::power(l1, l2), rho).unwrap().value();
        let c = rho * s.h31 * s.h32;
        let ratio = (s.h31 * s.h31 + c * g) / (s.h32 * s.h32 + c / g);
        assert!(g >= 0.0 && (ratio - l1 / l2).abs() < 1e-12);
    }

    #[test]
    fn case1_stationary() {
        let n = NoiseModel::new(1.0, 0.4).unwrap();
        let s = st(0.5, 1.1, 1.0);
        let (l1, l2, rho) = (0.15, 0.2, 0.5);
        let a = thm2_case1_alloc(&s, &n, &Multipliers::power(l1, l2), rho).unwrap();
        assert!(a.p1 > 0.0 && a.p2 > 0.0);
        let d = n.total() * (1.0 + a.destination_snr(&s, &n));
        let c = rho * s.h31 * s.h32;
        let g1 = (s.h31 * s.h31 + c * (a.p2 / a.p1).sqrt()) / d;
        let g2 = (s.h32 * s.h32 + c * (a.p1 / a.p2).sqrt()) / d;
        assert!((g1 - l1).abs() / l1 < 1e-12 && (g2 - l2).abs() / l2 < 1e-12);
    }

    #[test]
    fn case1_below_water() {
        let n = NoiseModel::new(1.0, 8.0).unwrap();
        let a = thm2_case1_alloc(&st(1.0, 0.3, 0.3), &n, &Multipliers::power(1.0, 1.0), 0.4).unwrap();
        assert_eq!((a.p1, a.p2), (0.0, 0.0));
    }

    #[test]
    fn case2_p1_examples() {
        let n = NoiseModel::new(1.0, 0.0).unwrap();
        let v = thm2_case2_p1(&st(2.0, 1.0, 1.0), &n, 0.25, 0.5f64.sqrt());
        assert!((v - 1.5).abs() < 1e-12);
        assert_eq!(thm2_case2_p1(&st(2.0, 1.0, 1.0), &n, 1e9, 0.3), 0.0);
        let a = thm2_case2_p1(&st(1.3, 1.0, 1.0), &n, 0.2, 0.0);
        let b = crate::allocators::thm1_case2_source(&st(1.3, 1.0, 1.0), &n, 0.2);
        assert_eq!(a, b);
    }

    #[test]
    fn case2_p2_reduces_without_correlation() {
        let n = NoiseModel::new(0.5, 0.5).unwrap();
        let s = st(1.0, 0.9, 1.4);
        let p2 = thm2_case2_p2(&s, &n, 0.3, 0.0, 0.8).unwrap();
        let wf = crate::allocators::thm1_case2_relay(&s, &n, 0.3, 0.8);
        assert!((p2 - wf).abs() < 1e-15);
        let p2 = thm2_case2_p2(&s, &n, 0.3, 0.5, 0.0).unwrap();
        assert!((p2 - crate::allocators::thm1_case2_relay(&s, &n, 0.3, 0.0)).abs() < 1e-15);
        assert!(thm2_case2_p2(&s, &n, 0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn case2_p2_matches_bisection() {
        let n = NoiseModel::new(0.5, 0.5).unwrap();
        let s = st(1.0, 1.0, 1.0);
        let (l2, rho, p1) = (0.2, 0.5, 1.0);
        let p2 = thm2_case2_p2(&s, &n, l2, rho, p1).unwrap();
        let cubic = case2_cubic(&s, &n, l2, rho, p1);
        let f = |u: f64| cubic.iter().rev().fold(0.0, |acc, &c| acc * u + c);
        let u = crate::poly::bisect(f, 1e-12, 100.0, 1e-15);
        assert!((p2.sqrt() - u).abs() < 1e-9);
        let cardano = thm2_case2_p2_cardano(&s, &n, l2, rho, p1);
        assert!((cardano - p2).abs() < 1e-9);
    }

    #[test]
    fn case3_fallback_at_lambda3_one() {
        let n = NoiseModel::new(1.0, 1.0).unwrap();
        let s = st(0.9, 0.7, 1.1);
        let rho = 0.4;
        let m = Multipliers::new(0.2, 0.3, 1.0).unwrap();
        let sol = thm2_case3_solve(&s, &n, &m, rho).unwrap();
        assert_eq!(sol.path, Case3Path::Fallback);
        assert_eq!(sol.alloc.p2, 0.0);
        let expect = 1.0 / 0.2 - 1.0 / ((1.0 - rho * rho) * 0.81);
        assert!((sol.alloc.p1 - expect).abs() < 1e-12);
        // grid oracle for the same one-dimensional problem
        let a = (1.0 - rho * rho) * 0.81;
        let mut best = (0.0, f64::MIN);
        for i in 0..=100_000 {
            let p = i as f64 * 1e-4;
            let v = (a * p).ln_1p() - 0.2 * p;
            if v > best.1 {
                best = (p, v);
            }
        }
        assert!((best.0 - sol.alloc.p1).abs() < 2e-4);
    }

    #[test]
    fn case3_interior_stationary() {
        let n = NoiseModel::new(1.0, 0.5).unwrap();
        let s = st(1.2, 0.8, 1.1);
        let rho = 0.45;
        let m = Multipliers::new(0.25, 0.2, 0.35).unwrap();
        let sol = thm2_case3_solve(&s, &n, &m, rho).unwrap();
        let Case3Path::Interior { gamma } = sol.path else { panic!("{sol:?}") };
        let a = sol.alloc;
        assert!((a.p2 - gamma * gamma * a.p1).abs() <= 1e-15 * a.p2.max(1.0));
        let d = n.total() * (1.0 + a.destination_snr(&s, &n));
        let c = rho * s.h31 * s.h32;
        let ar = (1.0 - rho * rho) * s.h21 * s.h21;
        let g1 =
            m.lambda3 * ar / (n.n1 + ar * a.p1) + (1.0 - m.lambda3) * (s.h31 * s.h31 + c * (a.p2 / a.p1).sqrt()) / d;
        let g2 = (1.0 - m.lambda3) * (s.h32 * s.h32 + c * (a.p1 / a.p2).sqrt()) / d;
        assert!((g1 - m.lambda1).abs() / m.lambda1 < 1e-10, "{g1}");
        assert!((g2 - m.lambda2).abs() / m.lambda2 < 1e-10, "{g2}");
        assert!(thm2_case3_residual(&s, &n, &m, rho, gamma) < 1e-12);

        let full = thm2_case3_gamma(&s, &n, &m, rho).unwrap();
        assert!((full.gamma - gamma).abs() < 1e-10 * gamma);
    }

    #[test]
    fn root_scan_reaches_large_ratios() {
        // nearly dead direct link: the admissible ratio is far above 1e3
        let s = st(0.715890057417425, 0.05451826539202921, 1.467569777215023);
        let n = NoiseModel::new(2.1748971018238326, 0.6246504909798412).unwrap();
        let m = Multipliers::new(1.4289426987112748, 0.19752306376865908, 0.3344569883325221).unwrap();
        let rho = 0.09998388850515055;
        let Case3Path::Interior { gamma } = thm2_case3_solve(&s, &n, &m, rho).unwrap().path else { panic!() };
        assert!(gamma > 1e3);
        let full = thm2_case3_gamma(&s, &n, &m, rho).unwrap();
        assert!((full.gamma - gamma).abs() < 1e-9 * gamma, "{full:?}");
    }
}
