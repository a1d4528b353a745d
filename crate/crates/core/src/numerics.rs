//! Scalar numerical kernels: bracketed root finding, composite Simpson
//! quadrature with interval doubling, and central finite differences.
//!
//! These are the only iterative schemes in the crate. Everything built on
//! top of them is closed-form, so keeping the kernels small and strict
//! (hard iteration caps, explicit tolerances) keeps the whole artifact
//! reproducible.

use crate::error::{Error, Result};

/// Iteration cap for the root finder.
const ROOT_MAX_ITER: usize = 200;
/// Cap on interval doublings for the quadrature.
const QUAD_MAX_DOUBLINGS: usize = 20;

/// Tolerances for the scalar kernels, passed explicitly everywhere so that
/// identical inputs always produce identical outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative bracket width at which the root finder stops.
    pub root_rel: f64,
    /// Relative agreement between successive Simpson estimates.
    pub quad_rel: f64,
    /// Relative step for central differences (scaled by `max(1, |x|)`).
    pub fd_step: f64,
}

impl Tolerances {
    /// Validates the tolerance triple: all strictly positive,
    /// `root_rel <= 1e-6`, `quad_rel <= 1e-6`.
    pub fn new(root_rel: f64, quad_rel: f64, fd_step: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(root_rel) || root_rel > 1e-6 {
            return Err(Error::domain(format!(
                "root_rel must lie in (0, 1e-6], got {root_rel:e}"
            )));
        }
        if !ok(quad_rel) || quad_rel > 1e-6 {
            return Err(Error::domain(format!(
                "quad_rel must lie in (0, 1e-6], got {quad_rel:e}"
            )));
        }
        if !ok(fd_step) || fd_step > 0.1 {
            return Err(Error::domain(format!(
                "fd_step must lie in (0, 0.1], got {fd_step:e}"
            )));
        }
        Ok(Self {
            root_rel,
            quad_rel,
            fd_step,
        })
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_rel: 1e-12,
            quad_rel: 1e-9,
            fd_step: 1e-6,
        }
    }
}

/// Finds a root of `f` inside `[lo, hi]` by bisection refined with secant
/// steps; a secant candidate is accepted only while it stays strictly
/// inside the current bracket, otherwise the step falls back to bisection.
///
/// Requires a sign change: `f(lo) * f(hi) <= 0`. Stops once the bracket
/// width drops below `tol.root_rel * max(1, |x|)`.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: &Tolerances) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::domain(format!(
            "invalid bracket [{lo}, {hi}] for find_root"
        )));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }

    let mut a = lo;
    let mut b = hi;
    let mut fa = f_lo;
    let mut fb = f_hi;
    // previous iterate, used for the secant candidate
    let mut c = a;
    let mut fc = fa;

    for _ in 0..ROOT_MAX_ITER {
        let mid = 0.5 * (a + b);
        let width = b - a;
        if width <= tol.root_rel * mid.abs().max(1.0) {
            return Ok(mid);
        }

        // Secant proposal from the two freshest points with distinct values.
        let mut x = mid;
        if fb != fc && b != c {
            let s = b - fb * (b - c) / (fb - fc);
            let margin = 0.01 * width;
            if s > a + margin && s < b - margin {
                x = s;
            }
        }

        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        c = b;
        fc = fb;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::NoConvergence {
        what: "find_root",
        limit: ROOT_MAX_ITER,
        residual: (b - a).abs(),
    })
}

/// Signed integral of `f` over `[a, b]` by composite Simpson with interval
/// doubling until two successive estimates agree to `tol.quad_rel`.
///
/// `integrate(f, a, a)` is exactly zero; an inverted interval flips the sign.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: &Tolerances) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "non-finite quadrature interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, tol).map(|v| -v);
    }

    let h0 = b - a;
    // Trapezoid chain T(n); Simpson follows as (4 T(2n) - T(n)) / 3.
    let mut trap = 0.5 * h0 * (f(a) + f(b));
    let mut simpson_prev = f64::NAN;
    let mut n = 1usize; // current number of trapezoid panels

    for _ in 0..QUAD_MAX_DOUBLINGS {
        let h = h0 / n as f64;
        let mut mid_sum = 0.0;
        for k in 0..n {
            mid_sum += f(a + (k as f64 + 0.5) * h);
        }
        let trap_next = 0.5 * (trap + h * mid_sum);
        let simpson = (4.0 * trap_next - trap) / 3.0;

        if simpson_prev.is_finite() {
            let err = (simpson - simpson_prev).abs();
            if err <= tol.quad_rel * simpson.abs().max(1.0) {
                return Ok(simpson);
            }
        }
        simpson_prev = simpson;
        trap = trap_next;
        n *= 2;
    }
    Err(Error::NoConvergence {
        what: "integrate",
        limit: QUAD_MAX_DOUBLINGS,
        residual: simpson_prev,
    })
}

/// Central difference `(f(x+h) - f(x-h)) / 2h` with `h = fd_step * max(1, |x|)`.
///
/// Used only as a definitional oracle for closed-form derivatives.
pub fn central_diff<F>(f: F, x: f64, tol: &Tolerances) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !x.is_finite() {
        return Err(Error::domain(format!("central_diff at non-finite x = {x}")));
    }
    let h = tol.fd_step * x.abs().max(1.0);
    let fp = f(x + h);
    let fm = f(x - h);
    if !fp.is_finite() || !fm.is_finite() {
        return Err(Error::domain(format!(
            "function undefined at x ± h = {} ± {}",
            x, h
        )));
    }
    Ok((fp - fm) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn tolerances_validate_bounds() {
        assert!(Tolerances::new(1e-12, 1e-9, 1e-6).is_ok());
        assert!(Tolerances::new(0.0, 1e-9, 1e-6).is_err());
        assert!(Tolerances::new(1e-12, 1e-3, 1e-6).is_err()); // quad_rel too loose
        assert!(Tolerances::new(1e-3, 1e-9, 1e-6).is_err()); // root_rel too loose
        assert!(Tolerances::new(1e-12, 1e-9, -1.0).is_err());
    }

    #[test]
    fn root_of_linear_is_exact() {
        let x = find_root(|x| x - 2.0, 0.0, 5.0, &tol()).unwrap();
        assert_relative_eq!(x, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn root_of_tanh_matches_atanh_oracle() {
        // oracle: closed-form inverse
        let expected = 0.5_f64.atanh();
        let x = find_root(|x| x.tanh() - 0.5, 0.0, 5.0, &tol()).unwrap();
        assert_relative_eq!(x, expected, max_relative = 1e-11);
        assert!((x.tanh() - 0.5).abs() <= 1e-10 * (0.5 + (5.0_f64.tanh() - 0.5).abs()));
    }

    #[test]
    fn root_without_sign_change_is_bracket_error() {
        let err = find_root(|x| x * x, 1.0, 2.0, &tol()).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn root_at_endpoint_returns_endpoint() {
        let x = find_root(|x| x, 0.0, 1.0, &tol()).unwrap();
        assert_eq!(x, 0.0);
    }

    #[test]
    fn root_handles_flat_then_steep_curves() {
        // force-like profile: flat near zero, saturating at large x
        let f = |x: f64| (1.0 - (-x).exp()) - 0.999;
        let expected = -(0.001_f64).ln();
        let x = find_root(f, 0.0, 50.0, &tol()).unwrap();
        assert_relative_eq!(x, expected, max_relative = 1e-10);
    }

    #[test]
    fn integrate_constant_is_exact() {
        let v = integrate(|_| 1.0, 0.0, 3.0, &tol()).unwrap();
        assert_relative_eq!(v, 3.0, max_relative = 1e-13);
    }

    #[test]
    fn integrate_cosh_matches_sinh_oracle() {
        // oracle: antiderivative sinh evaluated at the endpoints
        let expected = 2.0_f64.sinh();
        let v = integrate(f64::cosh, 0.0, 2.0, &tol()).unwrap();
        assert_relative_eq!(v, expected, max_relative = 1e-9);
    }

    #[test]
    fn integrate_degenerate_interval_is_zero() {
        let v = integrate(|x| x, 1.0, 1.0, &tol()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn integrate_reversed_interval_flips_sign() {
        let fwd = integrate(|x| x * x, 0.0, 2.0, &tol()).unwrap();
        let rev = integrate(|x| x * x, 2.0, 0.0, &tol()).unwrap();
        assert_eq!(fwd, -rev);
    }

    #[test]
    fn central_diff_of_square_is_exact_to_truncation() {
        let d = central_diff(|x| x * x, 3.0, &tol()).unwrap();
        assert!((d - 6.0).abs() < 1e-8);
    }

    #[test]
    fn central_diff_of_sinh_matches_cosh_oracle() {
        let expected = 1.0_f64.cosh();
        let d = central_diff(f64::sinh, 1.0, &tol()).unwrap();
        assert!((d - expected).abs() < 1e-8);
    }

    #[test]
    fn central_diff_of_constant_is_zero() {
        let d = central_diff(|_| 42.0, -7.3, &tol()).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn central_diff_outside_domain_errors() {
        // ln is undefined left of zero; x - h crosses it
        let err = central_diff(f64::ln, 1e-9, &tol()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn derivative_oracle_grid() {
        // exp, cosh, tanh on a 100-point grid, 1e-7 relative
        let t = tol();
        for i in 0..100 {
            let x = -2.0 + 4.0 * (i as f64) / 99.0;
            let cases: [(fn(f64) -> f64, f64); 3] = [
                (f64::exp, x.exp()),
                (f64::cosh, x.sinh()),
                (f64::tanh, 1.0 / x.cosh().powi(2)),
            ];
            for (f, expected) in cases {
                let d = central_diff(f, x, &t).unwrap();
                assert!(
                    (d - expected).abs() <= 1e-7 * expected.abs().max(1.0),
                    "x = {x}, got {d}, expected {expected}"
                );
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // integrate is linear in the integrand on random cubics
            #[test]
            fn quadrature_linearity(
                c0 in -2.0..2.0f64, c1 in -2.0..2.0f64,
                d0 in -2.0..2.0f64, d1 in -2.0..2.0f64,
                alpha in -3.0..3.0f64, beta in -3.0..3.0f64,
            ) {
                let t = Tolerances::default();
                let f = move |x: f64| c0 + c1 * x * x * x;
                let g = move |x: f64| d0 * x + d1 * x * x;
                let lhs = integrate(move |x| alpha * f(x) + beta * g(x), -1.0, 2.0, &t).unwrap();
                let rhs = alpha * integrate(f, -1.0, 2.0, &t).unwrap()
                    + beta * integrate(g, -1.0, 2.0, &t).unwrap();
                prop_assert!((lhs - rhs).abs() <= 2.0 * t.quad_rel * lhs.abs().max(1.0));
            }

            // the returned root really is a root
            #[test]
            fn root_residual_is_small(shift in -0.9..0.9f64) {
                let t = Tolerances::default();
                let f = move |x: f64| x.tanh() - shift;
                let (lo, hi) = (-5.0, 5.0);
                let x = find_root(f, lo, hi, &t).unwrap();
                let scale = f(lo).abs() + f(hi).abs();
                prop_assert!(f(x).abs() <= 1e-10 * scale);
            }
        }
    }
}
