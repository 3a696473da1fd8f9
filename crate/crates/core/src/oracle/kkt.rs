//! Stationarity and complementarity residuals of per-state allocations.

use serde::{Deserialize, Serialize};

use crate::allocators::{CaseLabel, Mode, Multipliers};
use crate::channel::{ChannelState, NoiseModel};
use crate::error::{domain, Result};
use crate::rates::Allocation;

/// Residuals of the per-state KKT conditions.
///
/// `stationarity` holds `|marginal - price| / price` for every positive
/// component; `complementarity` holds `(marginal / price - 1)+` for every
/// component at zero (infinite when the marginal is). When both coherent
/// components are zero the supremum of the marginal over all directions
/// is used.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct KktResiduals {
    pub stationarity: Vec<(String, f64)>,
    pub complementarity: Vec<(String, f64)>,
}

impl KktResiduals {
    pub fn max_stationarity(&self) -> f64 {
        self.stationarity.iter().map(|x| x.1).fold(0.0, f64::max)
    }

    pub fn max_complementarity(&self) -> f64 {
        self.complementarity.iter().map(|x| x.1).fold(0.0, f64::max)
    }

    fn check(&mut self, name: &str, value: f64, marginal: f64, price: f64) {
        if value > 0.0 {
            self.stationarity.push((name.into(), (marginal - price).abs() / price));
        } else {
            self.complementarity.push((name.into(), (marginal / price - 1.0).max(0.0)));
        }
    }

    fn clamp(&mut self, name: &str, residual: f64) {
        self.complementarity.push((name.into(), residual.max(0.0)));
    }
}

/// Largest eigenvalue of the symmetric 2x2 matrix `[[a, b], [b, d]]`.
fn max_eig(a: f64, b: f64, d: f64) -> f64 {
    0.5 * (a + d) + (0.25 * (a - d).powi(2) + b * b).sqrt()
}

/// KKT residuals of `alloc` for `case` at multipliers `m`, in the
/// multiplier convention of [`crate::allocators`] (case 2: source price
/// `m.lambda1`, relay price `m.lambda2`).
pub fn kkt_residuals(
    alloc: &Allocation,
    s: &ChannelState,
    n: &NoiseModel,
    m: &Multipliers,
    case: CaseLabel,
    mode: Mode,
) -> Result<KktResiduals> {
    if !(m.lambda1 > 0.0 && m.lambda2 > 0.0) {
        return Err(domain("residuals need positive power multipliers"));
    }
    let (l1, l2) = (m.lambda1, m.lambda2);
    let l3 = if case == CaseLabel::Case1 { 0.0 } else { m.lambda3 };
    let w = 1.0 - l3;
    let (n1, nt) = (n.n1, n.total());
    let (h21sq, h31sq, h32sq) = (s.h21 * s.h21, s.h31 * s.h31, s.h32 * s.h32);
    let mut out = KktResiduals::default();
    match (mode, alloc) {
        (Mode::Theorem1, Allocation::General(a)) => {
            let x = s.h31 * s.h32;
            let d = nt + h31sq * (a.p_r + a.p_s) + h32sq * a.p2 + 2.0 * x * (a.p_s * a.p2).sqrt();
            if case == CaseLabel::Case2 {
                out.check("p_r", a.p_r, 0.5 * h21sq / (n1 + h21sq * a.p_r), l1);
                out.check("p2", a.p2, h32sq / d, l2);
                return Ok(out);
            }
            out.check("p_r", a.p_r, w * h31sq / d + l3 * h21sq / (n1 + h21sq * a.p_r), l1);
            match (a.p_s > 0.0, a.p2 > 0.0) {
                (true, true) => {
                    out.check("p_s", a.p_s, w * (h31sq + x * (a.p2 / a.p_s).sqrt()) / d, l1);
                    out.check("p2", a.p2, w * (h32sq + x * (a.p_s / a.p2).sqrt()) / d, l2);
                }
                (true, false) => {
                    out.check("p_s", a.p_s, w * h31sq / d, l1);
                    let g = if x > 0.0 && w > 0.0 { f64::INFINITY } else { w * h32sq / d };
                    out.check("p2", 0.0, g, l2);
                }
                (false, true) => {
                    out.check("p2", a.p2, w * h32sq / d, l2);
                    let g = if x > 0.0 && w > 0.0 { f64::INFINITY } else { w * h31sq / d };
                    out.check("p_s", 0.0, g, l1);
                }
                (false, false) => {
                    out.clamp("p_s,p2", w / d * (h31sq / l1 + h32sq / l2) - 1.0);
                }
            }
        }
        (Mode::Theorem2 { rho }, Allocation::FixedRho(a)) => {
            let c = rho * s.h31 * s.h32;
            let ar = (1.0 - rho * rho) * h21sq;
            let d = nt + h31sq * a.p1 + h32sq * a.p2 + 2.0 * c * (a.p1 * a.p2).sqrt();
            let relay_link = |p1: f64| ar / (n1 + ar * p1);
            if case == CaseLabel::Case2 {
                out.check("p1", a.p1, 0.5 * relay_link(a.p1), l1);
                let g = match (a.p2 > 0.0, a.p1 > 0.0 && c > 0.0) {
                    (true, _) => (h32sq + c * (a.p1 / a.p2).sqrt()) / d,
                    (false, true) => f64::INFINITY,
                    (false, false) => h32sq / d,
                };
                out.check("p2", a.p2, g, l2);
                return Ok(out);
            }
            match (a.p1 > 0.0, a.p2 > 0.0) {
                (true, true) => {
                    out.check("p1", a.p1, w * (h31sq + c * (a.p2 / a.p1).sqrt()) / d + l3 * relay_link(a.p1), l1);
                    out.check("p2", a.p2, w * (h32sq + c * (a.p1 / a.p2).sqrt()) / d, l2);
                }
                (true, false) => {
                    out.check("p1", a.p1, w * h31sq / d + l3 * relay_link(a.p1), l1);
                    let g = if c > 0.0 && w > 0.0 { f64::INFINITY } else { w * h32sq / d };
                    out.check("p2", 0.0, g, l2);
                }
                (false, true) => {
                    out.check("p2", a.p2, w * h32sq / d, l2);
                    let g = if c > 0.0 && w > 0.0 { f64::INFINITY } else { w * h31sq / d + l3 * ar / n1 };
                    out.check("p1", 0.0, g, l1);
                }
                (false, false) => {
                    let k = w / d;
                    let e = max_eig(k * h31sq + l3 * ar / n1 - l1, k * c, k * h32sq - l2);
                    out.clamp("p1,p2", e / l1.max(l2));
                }
            }
        }
        _ => return Err(domain("allocation coordinates do not match the mode")),
    }
    Ok(out)
}
