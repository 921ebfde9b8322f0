//! Adaptive quadrature and small smooth-optimization helpers.
//!
//! The integrands in this crate are smooth with exponential tails, so the
//! workhorse is adaptive Simpson on a window chosen large enough that the
//! discarded tail is certified below the requested tolerance via a known
//! exponential decay rate.

use crate::error::{Error, Result};

/// Result of a quadrature with an error estimate and the certified bound on
/// everything left outside the integration window.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub error_estimate: f64,
    pub truncation_bound: f64,
}

pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Quad> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Precondition(format!("bad interval [{a}, {b}]")));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut value = 0.0;
    let mut err_acc = 0.0;
    // explicit stack: (a, b, fa, fm, fb, previous Simpson value, tol, depth)
    let mut stack = vec![(a, b, fa, fm, fb, whole, tol, 0u32)];
    while let Some((a, b, fa, fm, fb, s, tol, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - s;
        // the second clause is a floating-point noise floor: once the
        // correction is at rounding level, refining cannot help
        if delta.abs() <= 15.0 * tol
            || delta.abs() <= 1e-14 * (left.abs() + right.abs() + s.abs())
            || (b - a) < 1e-14 * (1.0 + a.abs())
        {
            value += left + right + delta / 15.0;
            err_acc += delta.abs() / 15.0;
        } else if depth >= 48 {
            return Err(Error::QuadratureFailure(format!(
                "max refinement depth reached near [{a}, {b}]"
            )));
        } else {
            stack.push((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1));
            stack.push((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1));
        }
    }
    Ok(Quad { value, error_estimate: err_acc, truncation_bound: 0.0 })
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f >= 0` over the whole line. The window starts at
/// `[lo, hi]` and is widened until `f` at the edges falls below
/// `1e-16 * peak`; the discarded tails are bounded by `f(edge) / decay`
/// where `decay` is a certified lower bound on the exponential decay rate
/// of `f` outside the window.
pub fn integrate_line_exp_tails(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    decay: f64,
    rel_tol: f64,
) -> Result<Quad> {
    if decay <= 0.0 {
        return Err(Error::Divergent("nonpositive tail decay rate".into()));
    }
    let mut lo = lo;
    let mut hi = hi;
    let peak = f(0.5 * (lo + hi)).max(f(lo)).max(f(hi)).max(f64::MIN_POSITIVE);
    let cutoff = 1e-16 * peak;
    let mut guard = 0;
    while f(lo) > cutoff {
        lo -= (hi - lo).max(1.0) * 0.5;
        guard += 1;
        if guard > 200 {
            return Err(Error::QuadratureFailure("left tail would not decay".into()));
        }
    }
    guard = 0;
    while f(hi) > cutoff {
        hi += (hi - lo).max(1.0) * 0.5;
        guard += 1;
        if guard > 200 {
            return Err(Error::QuadratureFailure("right tail would not decay".into()));
        }
    }
    let scale = peak * (hi - lo);
    let mut q = adaptive_simpson(f, lo, hi, rel_tol * scale.max(f64::MIN_POSITIVE))?;
    q.truncation_bound = (f(lo) + f(hi)) / decay;
    Ok(q)
}

/// Integrates `f >= 0` over `[a, inf)` with exponential right tail.
pub fn integrate_right_exp_tail(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    hi: f64,
    decay: f64,
    rel_tol: f64,
) -> Result<Quad> {
    if decay <= 0.0 {
        return Err(Error::Divergent("nonpositive tail decay rate".into()));
    }
    let mut hi = hi.max(a + 1.0);
    let peak = f(a).max(f(0.5 * (a + hi))).max(f64::MIN_POSITIVE);
    let cutoff = 1e-16 * peak;
    let mut guard = 0;
    while f(hi) > cutoff {
        hi += (hi - a).max(1.0) * 0.5;
        guard += 1;
        if guard > 200 {
            return Err(Error::QuadratureFailure("right tail would not decay".into()));
        }
    }
    let scale = peak * (hi - a);
    let mut q = adaptive_simpson(f, a, hi, rel_tol * scale.max(f64::MIN_POSITIVE))?;
    q.truncation_bound = f(hi) / decay;
    Ok(q)
}

/// Golden-section maximizer for a concave function on `[lo, hi]`.
pub fn maximize_concave_1d(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, x_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Coordinate-ascent maximizer for a smooth concave function on a box.
/// Each sweep runs a golden section per coordinate; a handful of sweeps is
/// plenty for the well-conditioned objectives used here.
pub fn maximize_concave_box(
    f: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    start: &[f64],
    sweeps: usize,
    x_tol: f64,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    for _ in 0..sweeps {
        for k in 0..x.len() {
            let xk = x.clone();
            let line = |t: f64| {
                let mut p = xk.clone();
                p[k] = t;
                f(&p)
            };
            let (best, _) = maximize_concave_1d(&line, lo[k], hi[k], x_tol);
            x[k] = best;
        }
    }
    let val = f(&x);
    (x, val)
}

/// Bisection for the root of a monotone increasing function; `f(lo) < 0 < f(hi)`
/// is assumed (clamped answers returned otherwise).
pub fn bisect_increasing(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, x_tol: f64) -> f64 {
    let mut a = lo;
    let mut b = hi;
    if f(a) >= 0.0 {
        return a;
    }
    if f(b) <= 0.0 {
        return b;
    }
    while b - a > x_tol {
        let m = 0.5 * (a + b);
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_integrates_polynomials() {
        let q = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_over_line() {
        let q = integrate_line_exp_tails(&|x| (-x * x).exp(), -1.0, 1.0, 1.0, 1e-10).unwrap();
        assert!((q.value - PI.sqrt()).abs() < 1e-8, "got {}", q.value);
        assert!(q.truncation_bound < 1e-12);
    }

    #[test]
    fn logistic_density_integrates_to_one() {
        // e^y / (1 + e^y)^2 over the line
        let f = |y: f64| {
            let e = y.exp();
            e / (1.0 + e) / (1.0 + e)
        };
        let q = integrate_line_exp_tails(&f, -10.0, 10.0, 0.9, 1e-10).unwrap();
        assert!((q.value - 1.0).abs() < 1e-8, "got {}", q.value);
    }

    #[test]
    fn right_tail_integral() {
        let q = integrate_right_exp_tail(&|x| (-2.0 * x).exp(), 0.0, 5.0, 2.0, 1e-10).unwrap();
        assert!((q.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn golden_section_finds_the_peak() {
        let (x, v) = maximize_concave_1d(&|x| -(x - 1.3) * (x - 1.3) + 2.0, -4.0, 4.0, 1e-10);
        // location accuracy is limited by the flat float plateau around the
        // peak; the value is what downstream checks consume
        assert!((x - 1.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coordinate_ascent_on_a_quadratic_bowl() {
        let f = |p: &[f64]| -((p[0] - 0.5).powi(2) + 2.0 * (p[1] + 0.25).powi(2));
        let (x, v) = maximize_concave_box(&f, &[-2.0, -2.0], &[2.0, 2.0], &[0.0, 0.0], 6, 1e-11);
        assert!((x[0] - 0.5).abs() < 1e-8 && (x[1] + 0.25).abs() < 1e-8);
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn bisection_root() {
        let r = bisect_increasing(&|x| x * x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2.0_f64.powf(1.0 / 3.0)).abs() < 1e-10);
    }
}
