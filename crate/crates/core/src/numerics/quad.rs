//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    /// Absolute tolerance on the integral.
    pub abs_tol: T,
    /// Relative floor, so that large integrals do not chase an absolute
    /// tolerance below their rounding noise.
    pub rel_tol: T,
    pub max_depth: u32,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::tol(1e-10),
            rel_tol: T::tol(1e-14),
            max_depth: 48,
        }
    }
}

struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
}

/// Integrates `f` over `[a, b]`.
///
/// Panels are split until the Simpson estimates on the two halves agree
/// with the whole-panel estimate to within 15 times the panel tolerance.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(T::zero());
    }
    if b < a {
        return adaptive_simpson(f, b, a, opts).map(|v| -v);
    }
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let fifteen = T::lit(15.0);

    let eval = |x: T| -> Result<T> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::numerical(format!("integrand not finite at {x}")))
        }
    };

    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = (a + b) / two;
    let fm = eval(m)?;
    let whole = (b - a) / six * (fa + T::lit(4.0) * fm + fb);
    let floor = opts.rel_tol * whole.abs();

    let mut total = T::zero();
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        tol: opts.abs_tol.max(floor),
        depth: 0,
    }];

    while let Some(p) = stack.pop() {
        let m = (p.a + p.b) / two;
        let lm = (p.a + m) / two;
        let rm = (m + p.b) / two;
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        let left = (m - p.a) / six * (p.fa + T::lit(4.0) * flm + p.fm);
        let right = (p.b - m) / six * (p.fm + T::lit(4.0) * frm + p.fb);
        let delta = left + right - p.whole;
        let panel_floor = opts.rel_tol * (left.abs() + right.abs());
        if p.depth >= opts.max_depth || delta.abs() <= fifteen * p.tol.max(panel_floor) {
            total = total + left + right + delta / fifteen;
            continue;
        }
        let tol = p.tol / two;
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol,
            depth: p.depth + 1,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = adaptive_simpson(|x: f64| x * x * x - x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sinh_integral_matches_closed_form() {
        let v = adaptive_simpson(f64::sinh, 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((v - (1f64.cosh() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = adaptive_simpson(f64::cos, 1.0, 0.0, QuadOptions::default()).unwrap();
        assert!((v + 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn large_integrals_terminate() {
        let v = adaptive_simpson(f64::sinh, 0.0, 30.0, QuadOptions::default()).unwrap();
        let exact = 30f64.cosh() - 1.0;
        assert!(((v - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let v = adaptive_simpson(|x: f32| x.exp(), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((v - (1f32.exp() - 1.0)).abs() < 1e-5);
    }

    #[test]
    fn rejects_non_finite_integrand() {
        let r = adaptive_simpson(|x: f64| 1.0 / x, 0.0, 1.0, QuadOptions::default());
        assert!(r.is_err());
    }
}
