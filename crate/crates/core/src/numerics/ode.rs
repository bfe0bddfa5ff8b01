//! Dormand-Prince 5(4) integrator with adaptive step control and event
//! localization.
//!
//! The integrator is stepped explicitly by callers, which lets geodesic and
//! arc shooters apply their own stop conditions, renormalize coordinates
//! between steps and pin outputs to exact parameter values.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub h_init: T,
    pub h_max: T,
    pub h_min: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::tol(1e-9),
            atol: T::tol(1e-12),
            h_init: T::lit(1e-2),
            h_max: T::lit(0.25),
            h_min: T::lit(1e-14),
            max_steps: 200_000,
        }
    }
}

impl<T: Real> OdeOptions<T> {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = T::tol(rtol);
        self.atol = T::tol(rtol * 1e-3);
        self
    }

    pub fn with_h_max(mut self, h_max: T) -> Self {
        self.h_max = h_max;
        self
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub struct Integrator<T, const N: usize, F> {
    rhs: F,
    opts: OdeOptions<T>,
    s: T,
    y: [T; N],
    prev_s: T,
    prev_y: [T; N],
    h: T,
    steps: usize,
}

impl<T, const N: usize, F> Integrator<T, N, F>
where
    T: Real,
    F: Fn(T, &[T; N]) -> [T; N],
{
    pub fn new(rhs: F, s0: T, y0: [T; N], opts: OdeOptions<T>) -> Self {
        Self {
            rhs,
            opts,
            s: s0,
            y: y0,
            prev_s: s0,
            prev_y: y0,
            h: opts.h_init.min(opts.h_max),
            steps: 0,
        }
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn y(&self) -> &[T; N] {
        &self.y
    }

    pub fn prev(&self) -> (T, &[T; N]) {
        (self.prev_s, &self.prev_y)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Replaces the current state by an equivalent representation (for
    /// example after reflecting through a coordinate singularity).
    pub fn set_state(&mut self, y: [T; N]) {
        self.y = y;
    }

    /// One Dormand-Prince step of size `h` from `(s, y)`; returns the
    /// fifth-order solution and the scaled error norm.
    fn trial(&self, s: T, y: &[T; N], h: T) -> ([T; N], T) {
        let mut k = [[T::zero(); N]; 7];
        k[0] = (self.rhs)(s, y);
        for stage in 1..7 {
            let mut yi = *y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    let a = T::lit(a);
                    for i in 0..N {
                        yi[i] = yi[i] + h * a * kj[i];
                    }
                }
            }
            k[stage] = (self.rhs)(s + h * T::lit(C[stage]), &yi);
        }
        let mut y5 = *y;
        let mut err = T::zero();
        for i in 0..N {
            let mut hi5 = T::zero();
            let mut hi4 = T::zero();
            for st in 0..7 {
                hi5 = hi5 + T::lit(B5[st]) * k[st][i];
                hi4 = hi4 + T::lit(B4[st]) * k[st][i];
            }
            y5[i] = y[i] + h * hi5;
            let scale = self.opts.atol + self.opts.rtol * y[i].abs().max(y5[i].abs());
            let e = (h * (hi5 - hi4)).abs() / scale;
            err = if e.is_nan() || err.is_nan() { T::nan() } else { err.max(e) };
        }
        (y5, err)
    }

    /// Takes one accepted adaptive step that does not pass `s_limit`.
    pub fn step(&mut self, s_limit: T) -> Result<()> {
        let remaining = s_limit - self.s;
        if remaining <= T::zero() {
            return Ok(());
        }
        let nominal = self.h.min(self.opts.h_max);
        let mut h = nominal.min(remaining);
        loop {
            if self.steps >= self.opts.max_steps {
                return Err(Error::numerical("ODE step budget exhausted"));
            }
            self.steps += 1;
            let (y_new, err) = self.trial(self.s, &self.y, h);
            let finite = err.is_finite() && y_new.iter().all(|v| v.is_finite());
            if finite && err <= T::one() {
                let landed = h == remaining;
                self.prev_s = self.s;
                self.prev_y = self.y;
                self.s = if landed { s_limit } else { self.s + h };
                self.y = y_new;
                let grow = if err == T::zero() {
                    T::lit(5.0)
                } else {
                    (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2))
                };
                let next = h * grow;
                // A step shortened only to land on s_limit says nothing
                // against the nominal step size.
                self.h = if landed && h < nominal { nominal.max(next) } else { next };
                self.h = self.h.min(self.opts.h_max);
                return Ok(());
            }
            let shrink = if finite {
                (T::lit(0.9) * err.powf(T::lit(-0.25))).max(T::lit(0.1))
            } else {
                T::lit(0.1)
            };
            h = h * shrink;
            if h < self.opts.h_min {
                return Err(Error::numerical(format!(
                    "ODE step size underflow at s = {}",
                    self.s
                )));
            }
        }
    }

    /// Integrates up to exactly `s_target`.
    pub fn advance_to(&mut self, s_target: T) -> Result<()> {
        while self.s < s_target {
            self.step(s_target)?;
        }
        Ok(())
    }

    /// After a step over which `g` changed sign, moves the current state
    /// back to the zero of `g` inside the last step.
    pub fn locate<G>(&mut self, g: G, tol: T) -> Result<()>
    where
        G: Fn(T, &[T; N]) -> T,
    {
        let (s, y) = self.find_event(g, tol)?;
        self.s = s;
        self.y = y;
        Ok(())
    }

    /// Zero of `g` inside the last accepted step, without moving the state.
    pub fn find_event<G>(&self, g: G, tol: T) -> Result<(T, [T; N])>
    where
        G: Fn(T, &[T; N]) -> T,
    {
        let s0 = self.prev_s;
        let y0 = self.prev_y;
        let total = self.s - s0;
        let (mut lo, mut hi) = (T::zero(), total);
        let (mut glo, mut ghi) = (g(s0, &y0), g(self.s, &self.y));
        if glo.signum() == ghi.signum() {
            return Err(Error::numerical("event not bracketed by last step"));
        }
        let mut best = (self.s, self.y);
        let half = T::lit(0.5);
        let mut side = 0i8;
        for _ in 0..100 {
            let mut x = (lo * ghi - hi * glo) / (ghi - glo);
            if !(x > lo && x < hi) {
                x = half * (lo + hi);
            }
            let (yx, _) = self.trial(s0, &y0, x);
            let gx = g(s0 + x, &yx);
            best = (s0 + x, yx);
            if gx.abs() <= tol || hi - lo <= T::epsilon() * total {
                break;
            }
            if gx.signum() == glo.signum() {
                lo = x;
                glo = gx;
                if side == -1 {
                    ghi = ghi * half;
                }
                side = -1;
            } else {
                hi = x;
                ghi = gx;
                if side == 1 {
                    glo = glo * half;
                }
                side = 1;
            }
        }
        Ok(best)
    }

    /// Moves to a state found by [`find_event`](Self::find_event).
    pub fn jump_to(&mut self, s: T, y: [T; N]) {
        self.s = s;
        self.y = y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let mut it = Integrator::new(|_s, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], OdeOptions::default());
        it.advance_to(2.0 * std::f64::consts::PI).unwrap();
        assert!((it.y()[0] - 1.0).abs() < 1e-8);
        assert!(it.y()[1].abs() < 1e-8);
        assert_eq!(it.s(), 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn exponential_growth_relative_accuracy() {
        let mut it = Integrator::new(|_s, y: &[f64; 1]| [y[0]], 0.0, [1.0], OdeOptions::default());
        it.advance_to(5.0).unwrap();
        assert!(((it.y()[0] - 5f64.exp()) / 5f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn event_location_on_falling_body() {
        // y'' = -1 from height 1: hits y = 0 at s = sqrt(2).
        let mut it = Integrator::new(|_s, y: &[f64; 2]| [y[1], -1.0], 0.0, [1.0, 0.0], OdeOptions::default());
        loop {
            it.step(10.0).unwrap();
            if it.y()[0] < 0.0 {
                it.locate(|_s, y| y[0], 1e-13).unwrap();
                break;
            }
        }
        assert!((it.s() - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn single_precision_integration() {
        let mut it = Integrator::new(|_s, y: &[f32; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], OdeOptions::default());
        it.advance_to(1.0).unwrap();
        assert!((it.y()[0] - 1f32.sin()).abs() < 1e-4);
    }
}
