//! Per-state closed-form KKT allocations.
//!
//! Multipliers are prices against natural-log rates: the per-state
//! Lagrangian of the balanced problem is
//!
//! ```text
//! (1 - l3) ln(1 + snr_dest) + l3 ln(1 + snr_relay) - l1 * source - l2 * relay
//! ```
//!
//! so case 1 is `l3 = 0`. The exception is the source water-filling of
//! case 2, `(1/(2 l) - N1/h21^2)+`, whose multiplier prices `0.5 ln(..)`.
//! The scaling of a multiplier never changes the allocation the dual search
//! ends up with, only the number reported for it.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub mod lagrangian;
pub mod parallel;
pub mod theorem1;
pub mod theorem2;

pub use parallel::parallel_relay_alloc;
pub use theorem1::{
    thm1_case1_alloc, thm1_case2_alloc, thm1_case2_relay, thm1_case2_source, thm1_case3_alloc, thm1_gamma,
};
pub use theorem2::{
    case2_cubic, thm2_case1_alloc, thm2_case2_p1, thm2_case2_p2, thm2_case2_p2_cardano, thm2_case3_alloc,
    thm2_case3_fallback, thm2_case3_gamma, thm2_case3_quintic, thm2_case3_residual, thm2_case3_solve, thm2_gamma_case1,
    Case3Path, Case3Solution, GammaSolve,
};

/// Dual variables of the power constraints and of the rate equality.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Multipliers {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl Multipliers {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        if !(lambda1 >= 0.0 && lambda2 >= 0.0) || !lambda1.is_finite() || !lambda2.is_finite() {
            return Err(domain(format!("multipliers must be >= 0, got ({lambda1}, {lambda2})")));
        }
        if !(0.0..=1.0).contains(&lambda3) {
            return Err(domain(format!("lambda3 must lie in [0, 1], got {lambda3}")));
        }
        Ok(Self { lambda1, lambda2, lambda3 })
    }

    /// Multipliers of the two power constraints only.
    pub fn power(lambda1: f64, lambda2: f64) -> Self {
        Self { lambda1, lambda2, lambda3: 0.0 }
    }
}

/// Amplitude ratio between relay power and (coherent) source power.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GammaRatio(pub f64);

impl GammaRatio {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which regime of the max-min problem is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// destination rate is the bottleneck
    Case1,
    /// relay decoding rate is the bottleneck
    Case2,
    /// both rates balanced
    Case3,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::Case1 => "case1",
            CaseLabel::Case2 => "case2",
            CaseLabel::Case3 => "case3",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Optimisation scenario: correlation optimised per state, or held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Theorem1,
    Theorem2 { rho: f64 },
}

impl Mode {
    pub fn validate(&self) -> Result<()> {
        match self {
            Mode::Theorem1 => Ok(()),
            Mode::Theorem2 { rho } => crate::rates::check_rho(*rho),
        }
    }
}

/// `(x)+`
#[inline]
pub(crate) fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// `N / h^2`, infinite when the link is dead.
#[inline]
pub(crate) fn inv_gain(noise: f64, h: f64) -> f64 {
    if h > 0.0 {
        noise / (h * h)
    } else {
        f64::INFINITY
    }
}

/// Maximiser over `p >= 0` of
/// `w_a ln(1 + p/a) + w_b ln(1 + p/b) - price * p`
/// where `a`, `b` are inverse link gains (possibly infinite).
///
/// With `w_a = l3`, `w_b = 1 - l3`, `a = N1/h21^2`, `b = (N1+N2)/h31^2`
/// this is the relay-silent allocation of the balanced case.
pub(crate) fn two_link_waterfill(price: f64, w_a: f64, a: f64, w_b: f64, b: f64) -> f64 {
    let a_live = a.is_finite() && w_a > 0.0;
    let b_live = b.is_finite() && w_b > 0.0;
    match (a_live, b_live) {
        (false, false) => 0.0,
        (true, false) => pos(w_a / price - a),
        (false, true) => pos(w_b / price - b),
        (true, true) => {
            // price p^2 + (price (a + b) - w) p + price a b - w_a b - w_b a = 0
            let w = w_a + w_b;
            let lin = price * (a + b) - w;
            let cst = price * a * b - w_a * b - w_b * a;
            let roots = crate::poly::quadratic_roots(price, lin, cst);
            roots.last().copied().map(pos).unwrap_or(0.0)
        }
    }
}
