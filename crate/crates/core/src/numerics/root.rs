//! Bracketed root finding: bisection to shrink the bracket, then
//! safeguarded Newton steps to polish.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct RootOptions<T> {
    /// Stop once `|f(x)| <= f_tol`.
    pub f_tol: T,
    /// Stop once the bracket is narrower than `x_tol`.
    pub x_tol: T,
    /// Bisection steps performed before Newton polishing starts.
    pub bisect_steps: u32,
    pub max_iter: u32,
}

impl<T: Real> Default for RootOptions<T> {
    fn default() -> Self {
        Self {
            f_tol: T::tol(1e-10),
            x_tol: T::epsilon() * T::lit(4.0),
            bisect_steps: 8,
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs. `df`, when given, is the derivative of `f` and enables
/// Newton polishing; without it the iteration falls back to regula falsi
/// (Illinois variant) inside the bracket.
pub fn find_root<T, F, D>(f: F, df: Option<D>, lo: T, hi: T, opts: RootOptions<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = f(a);
    let mut fb = f(b);
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::numerical("root bracket endpoints not finite"));
    }
    if fa.abs() <= opts.f_tol {
        return Ok(a);
    }
    if fb.abs() <= opts.f_tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::numerical(format!(
            "root not bracketed: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    let half = T::lit(0.5);
    let mut side = 0i8;
    for iter in 0..opts.max_iter {
        let width = b - a;
        if width <= opts.x_tol.max(T::epsilon() * a.abs().max(b.abs())) {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let mid = a + half * width;
        let mut x = mid;
        if iter >= opts.bisect_steps {
            x = match &df {
                Some(d) => {
                    let xm = if fa.abs() < fb.abs() { a } else { b };
                    let fxm = if fa.abs() < fb.abs() { fa } else { fb };
                    let slope = d(xm);
                    let cand = xm - fxm / slope;
                    if slope != T::zero() && cand.is_finite() && cand > a && cand < b {
                        cand
                    } else {
                        mid
                    }
                }
                None => {
                    let cand = (a * fb - b * fa) / (fb - fa);
                    if cand.is_finite() && cand > a && cand < b {
                        cand
                    } else {
                        mid
                    }
                }
            };
        }
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::numerical(format!("f not finite at {x}")));
        }
        if fx.abs() <= opts.f_tol {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 && df.is_none() {
                fb = fb * half;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 && df.is_none() {
                fa = fa * half;
            }
            side = 1;
        }
    }
    Err(Error::numerical("root finding exceeded iteration budget"))
}

/// Grows `hi` geometrically (up to `limit`) until `f(hi)` reaches `target`
/// for an increasing function `f`. Returns the bracket `(lo, hi)`.
pub fn bracket_increasing<T, F>(f: F, target: T, mut lo: T, mut hi: T, limit: T) -> Result<(T, T)>
where
    T: Real,
    F: Fn(T) -> T,
{
    let two = T::lit(2.0);
    for _ in 0..200 {
        if f(hi) >= target {
            return Ok((lo, hi));
        }
        if hi >= limit {
            break;
        }
        lo = hi;
        hi = (hi * two).min(limit);
    }
    Err(Error::domain(format!("target {target} not reached below {limit}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    type NoDeriv = fn(f64) -> f64;

    #[test]
    fn newton_polish_finds_sqrt_two() {
        let r = find_root(|x: f64| x * x - 2.0, Some(|x: f64| 2.0 * x), 0.0, 2.0, RootOptions::default())
            .unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn derivative_free_fallback_converges() {
        let r = find_root(|x: f64| x.cos() - x, None::<NoDeriv>, 0.0, 1.0, RootOptions::default()).unwrap();
        assert!((r.cos() - r).abs() < 1e-10);
    }

    #[test]
    fn unbracketed_root_is_rejected() {
        let r = find_root(|x: f64| x * x + 1.0, None::<NoDeriv>, -1.0, 1.0, RootOptions::default());
        assert!(r.is_err());
    }

    #[test]
    fn bracket_growth() {
        let (lo, hi) = bracket_increasing(|x: f64| x * x, 50.0, 0.0, 1.0, 1e6).unwrap();
        assert!(lo * lo < 50.0 && hi * hi >= 50.0);
        assert!(bracket_increasing(|x: f64| x, 50.0, 0.0, 1.0, 10.0).is_err());
    }
}
