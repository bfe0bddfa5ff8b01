//! Geodesic balls in the simply connected space form of constant curvature
//! `delta` and dimension `n`.
//!
//! In dimension two the ball volume and boundary length have closed forms;
//! in higher dimension the volume is the integral of the model area element
//! `n ω_n sn_δ(r)^{n-1}`. Both paths are available so they can be checked
//! against each other. The flat case uses polynomial formulas directly, not
//! a `delta -> 0` limit.

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, find_root, root::bracket_increasing, QuadOptions, RootOptions};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceForm<T> {
    delta: T,
    dim: usize,
}

impl<T: Real> SpaceForm<T> {
    pub fn new(delta: T, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(format!("space form dimension must be >= 2, got {dim}")));
        }
        if !delta.is_finite() {
            return Err(Error::invalid("space form curvature must be finite"));
        }
        Ok(Self { delta, dim })
    }

    /// The surface (`n = 2`) of curvature `delta`.
    pub fn surface(delta: T) -> Self {
        Self::new(delta, 2).expect("finite curvature")
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `π / δ^{1/2}` for `δ > 0`, infinity otherwise.
    pub fn max_radius(&self) -> T {
        if self.delta > T::zero() {
            T::PI() / self.delta.sqrt()
        } else {
            T::infinity()
        }
    }

    fn check_radius(&self, r: T) -> Result<()> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::domain(format!("radius must be positive and finite, got {r}")));
        }
        if r >= self.max_radius() {
            return Err(Error::domain(format!(
                "radius {r} not below pi/sqrt(delta) = {}",
                self.max_radius()
            )));
        }
        Ok(())
    }

    /// Volume `ω_n` of the Euclidean unit ball.
    pub fn unit_ball_volume(&self) -> T {
        let pi = T::PI();
        let (mut w, mut k) = if self.dim % 2 == 0 { (T::one(), 0) } else { (T::lit(2.0), 1) };
        while k < self.dim {
            k += 2;
            w = w * T::lit(2.0) * pi / T::from_usize(k).unwrap();
        }
        w
    }

    /// Generalized sine `sn_δ(r)`.
    fn sn(&self, r: T) -> T {
        let d = self.delta;
        if d == T::zero() {
            r
        } else if d > T::zero() {
            let k = d.sqrt();
            (k * r).sin() / k
        } else {
            let k = (-d).sqrt();
            (k * r).sinh() / k
        }
    }

    fn area_element(&self, r: T) -> T {
        let n = T::from_usize(self.dim).unwrap();
        n * self.unit_ball_volume() * self.sn(r).powi(self.dim as i32 - 1)
    }

    /// `V_{δ,n}(r)`.
    pub fn ball_volume(&self, r: T) -> Result<T> {
        self.check_radius(r)?;
        if self.dim == 2 {
            Ok(self.ball_volume_closed_2d(r))
        } else {
            self.integrate_area(r)
        }
    }

    fn ball_volume_closed_2d(&self, r: T) -> T {
        let d = self.delta;
        let pi = T::PI();
        let four_pi = T::lit(4.0) * pi;
        let half = T::lit(0.5);
        if d == T::zero() {
            pi * r * r
        } else if d > T::zero() {
            // (2π/δ)(1 - cos √δ r) written without cancellation.
            let s = (half * d.sqrt() * r).sin();
            four_pi / d * s * s
        } else {
            let s = (half * (-d).sqrt() * r).sinh();
            four_pi / (-d) * s * s
        }
    }

    fn integrate_area(&self, r: T) -> Result<T> {
        adaptive_simpson(|t| self.area_element(t), T::zero(), r, QuadOptions::default())
    }

    /// Volume by quadrature of the model area element, in any dimension.
    pub fn ball_volume_quadrature(&self, r: T) -> Result<T> {
        self.check_radius(r)?;
        self.integrate_area(r)
    }

    /// Boundary measure of the model ball; the derivative of
    /// [`ball_volume`](Self::ball_volume) in `r`.
    pub fn ball_area(&self, r: T) -> Result<T> {
        self.check_radius(r)?;
        Ok(self.area_element(r))
    }

    /// Total volume of the model (finite only for `δ > 0`).
    pub fn total_volume(&self) -> T {
        if self.delta > T::zero() {
            if self.dim == 2 {
                T::lit(4.0) * T::PI() / self.delta
            } else {
                self.integrate_area(self.max_radius()).unwrap_or(T::infinity())
            }
        } else {
            T::infinity()
        }
    }

    /// Radius of the model ball of volume `v`.
    pub fn inverse_volume(&self, v: T) -> Result<T> {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::domain(format!("volume must be positive and finite, got {v}")));
        }
        let total = self.total_volume();
        if v >= total {
            return Err(Error::domain(format!("volume {v} exceeds total model volume {total}")));
        }
        let vol = |r: T| {
            if r <= T::zero() {
                T::zero()
            } else if self.dim == 2 {
                self.ball_volume_closed_2d(r)
            } else {
                self.integrate_area(r).unwrap_or(T::nan())
            }
        };
        let (lo, hi) = if self.delta > T::zero() {
            (T::zero(), self.max_radius())
        } else {
            // Euclidean radius is an upper bound when δ <= 0.
            let guess = (v / self.unit_ball_volume()).powf(T::one() / T::from_usize(self.dim).unwrap());
            bracket_increasing(vol, v, T::zero(), guess.max(T::epsilon()), T::max_value())?
        };
        let opts = RootOptions {
            f_tol: T::tol(1e-10) * v.max(T::one()) * T::lit(1e-2),
            ..RootOptions::default()
        };
        let df = |r: T| self.area_element(r);
        find_root(|r| vol(r) - v, Some(df), lo, hi, opts)
    }

    /// Isoperimetric profile of the model surface (`n = 2`): the boundary
    /// length of the geodesic disk of area `v`.
    pub fn profile(&self, v: T) -> Result<T> {
        if self.dim != 2 {
            return Err(Error::invalid("space-form profile is only provided for n = 2"));
        }
        if !(v > T::zero()) || v >= self.total_volume() {
            return Err(Error::domain(format!("volume {v} outside (0, {})", self.total_volume())));
        }
        let four_pi = T::lit(4.0) * T::PI();
        if self.delta == T::zero() {
            Ok(T::lit(2.0) * (T::PI() * v).sqrt())
        } else if self.delta == -T::one() {
            Ok((v * v + four_pi * v).sqrt())
        } else {
            let r = self.inverse_volume(v)?;
            self.ball_area(r)
        }
    }
}
