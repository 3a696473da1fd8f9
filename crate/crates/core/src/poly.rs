//! Real polynomials and the root finders used by the allocators.
//!
//! Real roots on an interval are isolated by recursing on the derivative:
//! between consecutive critical points a polynomial is monotone, so every
//! sign change brackets exactly one root, which is then found with a
//! safeguarded Newton iteration.

use std::f64::consts::PI;

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Sum of the magnitudes of the monomials at `x`; a natural scale for
    /// judging how close `eval(x)` is to zero.
    pub fn magnitude(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x.abs() + c.abs())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        Self::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `1 + max |c_i / c_n|`; every root has modulus below it.
    pub fn cauchy_bound(&self) -> f64 {
        let (lead, rest) = self.coeffs.split_last().expect("nonempty");
        1.0 + rest.iter().map(|c| (c / lead).abs()).fold(0.0, f64::max)
    }

    /// All real roots in `[lo, hi]`, ascending, each polished to near
    /// machine precision. Roots of even multiplicity are reported when the
    /// polynomial vanishes (relative to its magnitude) at a critical point.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut roots = Vec::new();
        if self.coeffs.iter().all(|&c| c == 0.0) || lo > hi {
            return roots;
        }
        match self.degree() {
            0 => {}
            1 => {
                let r = -self.coeffs[0] / self.coeffs[1];
                if (lo..=hi).contains(&r) {
                    roots.push(r);
                }
            }
            _ => {
                let deriv = self.derivative();
                let mut knots = vec![lo];
                knots.extend(deriv.real_roots_in(lo, hi));
                knots.push(hi);
                knots.dedup();
                let tiny = |x: f64| self.eval(x).abs() <= 1e-14 * self.magnitude(x).max(f64::MIN_POSITIVE);
                for w in knots.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (fa, fb) = (self.eval(a), self.eval(b));
                    if tiny(a) {
                        roots.push(a);
                    } else if fa * fb < 0.0 {
                        let r = bracketed_newton(|x| self.eval(x), |x| deriv.eval(x), a, b, fa, fb);
                        roots.push(r);
                    }
                }
                if tiny(hi) {
                    roots.push(hi);
                }
                roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * a.abs().max(1.0));
            }
        }
        roots
    }
}

fn different_signs(x: f64, y: f64) -> bool {
    (x < 0.0) != (y < 0.0)
}

/// Newton iteration kept inside a sign-change bracket; falls back to
/// bisection whenever the Newton step leaves the bracket. Runs until the
/// bracket collapses to adjacent floats or the step is below `4 eps |x|`.
pub fn bracketed_newton<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, f_lo: f64, f_hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    debug_assert!(different_signs(f_lo, f_hi));
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if different_signs(f_lo, fx) {
            hi = x;
        } else {
            lo = x;
        }
        let d = df(x);
        let mut next = x - fx / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
            if next <= lo || next >= hi {
                return x;
            }
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    x
}

/// Root of a function known to change sign on `[lo, hi]`, by bisection
/// alone. Used where no derivative is available.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if different_signs(f_lo, fm) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of `a x^2 + b x + c` without cancellation; ascending.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / a, c / q] };
    r.sort_by(f64::total_cmp);
    if disc == 0.0 {
        r.truncate(1);
    }
    r
}

/// Closed-form real roots of `a x^3 + b x^2 + c x + d` (Cardano for one
/// real root, trigonometric form for three), ascending.
pub fn cubic_roots_closed_form(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a == 0.0 {
        return quadratic_roots(b, c, d);
    }
    // depressed cubic t^3 + p t + q with x = t - b / 3a
    let (b, c, d) = (b / a, c / a, d / a);
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = if disc > 0.0 {
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        vec![u + v - shift]
    } else if p == 0.0 {
        vec![-shift]
    } else {
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3).map(|k| 2.0 * r * (theta - 2.0 * PI * k as f64 / 3.0).cos() - shift).collect()
    };
    roots.sort_by(f64::total_cmp);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(rs: &[f64]) -> Poly {
        rs.iter().fold(Poly::constant(1.0), |p, &r| p.mul(&Poly::new(vec![-r, 1.0])))
    }

    #[test]
    fn eval_and_derivative() {
        let p = Poly::new(vec![1.0, -3.0, 0.0, 2.0]);
        assert_eq!(p.eval(2.0), 1.0 - 6.0 + 16.0);
        assert_eq!(p.derivative().coeffs(), &[-3.0, 0.0, 6.0]);
        assert_eq!(Poly::new(vec![1.0, 0.0, 0.0]).degree(), 0);
    }

    #[test]
    fn quintic_roots_recovered() {
        let rs = [-3.5, -0.25, 0.1, 1.0, 7.0];
        let p = from_roots(&rs).scale(2.5);
        let found = p.real_roots_in(-10.0, 10.0);
        assert_eq!(found.len(), 5);
        for (a, b) in found.iter().zip(&rs) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(p.real_roots_in(0.5, 5.0), vec![1.0]);
    }

    #[test]
    fn double_root_reported_once() {
        let p = from_roots(&[1.0, 1.0, -2.0]);
        let found = p.real_roots_in(-5.0, 5.0);
        assert_eq!(found.len(), 2);
        assert!((found[0] + 2.0).abs() < 1e-12);
        assert!((found[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn no_real_roots() {
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        assert!(p.real_roots_in(-100.0, 100.0).is_empty());
    }

    #[test]
    fn quadratic_without_cancellation() {
        let r = quadratic_roots(1.0, 1e8, 1.0);
        assert!((r[1] + 1e-8).abs() < 1e-20);
        assert!((r[0] + 1e8).abs() < 1e-6);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_empty());
        assert_eq!(quadratic_roots(0.0, 2.0, -1.0), vec![0.5]);
    }

    #[test]
    fn cubic_closed_form_matches_isolation() {
        for rs in [[-1.0, 0.5, 2.0], [0.3, 0.3001, 4.0]] {
            let p = from_roots(&rs);
            let c = p.coeffs();
            let closed = cubic_roots_closed_form(c[3], c[2], c[1], c[0]);
            assert_eq!(closed.len(), 3);
            for (a, b) in closed.iter().zip(&rs) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        // one real root
        let p = Poly::new(vec![-2.0, 1.0, 0.0, 1.0]);
        let c = p.coeffs();
        let closed = cubic_roots_closed_form(c[3], c[2], c[1], c[0]);
        assert_eq!(closed.len(), 1);
        assert!((closed[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
