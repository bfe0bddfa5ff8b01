//! Area of geodesic balls `B(x, s)` centred off the pole.
//!
//! Points of the ball are parametrized by exponential coordinates
//! `(ρ, α)` at the centre: the endpoint of the unit-speed geodesic of length
//! `ρ` leaving the centre at angle `α` from the outward radial direction.
//! The area element is `J(ρ, α) dρ dα`, where `J` solves the Jacobi equation
//! `J'' = -K J`, `J(0) = 0`, `J'(0) = 1` along the ray. This is exact below
//! the conjugate radius, which the callers enforce.

use std::cell::Cell;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SymmetricRegion, WarpedSurface};
use crate::error::{Error, Result};
use crate::numerics::{Integrator, OdeOptions};

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallEstimate {
    pub value: f64,
    pub sigma: f64,
    pub samples: usize,
}

fn ray_options() -> OdeOptions<f64> {
    OdeOptions::default().with_rtol(1e-9).with_h_max(0.1)
}

/// State `[t, θ, ψ, J, J']` along a geodesic ray.
fn ray_rhs(w: &WarpedSurface) -> impl Fn(f64, &[f64; 5]) -> [f64; 5] + '_ {
    move |_s, y| {
        let (t, psi) = (y[0], y[2]);
        let (sn, cs) = psi.sin_cos();
        let (turn, dth) = if t == 0.0 {
            (0.0, 0.0)
        } else {
            (w.latitude_curvature(t) * sn, sn / w.phi(t))
        };
        [cs, dth, -turn, y[4], -w.curvature_at(t) * y[3]]
    }
}

/// Radius of the ray endpoint and the Jacobian `J` at length `rho`.
pub(crate) fn ray_endpoint(w: &WarpedSurface, t0: f64, alpha: f64, rho: f64) -> Result<(f64, f64)> {
    if t0 == 0.0 {
        return Ok((rho, w.phi(rho)));
    }
    if rho == 0.0 {
        return Ok((t0, 0.0));
    }
    let mut it = Integrator::new(ray_rhs(w), 0.0, [t0, 0.0, alpha, 0.0, 1.0], ray_options());
    it.advance_to(rho)?;
    let y = it.y();
    Ok((y[0].abs(), y[3]))
}

/// Checks `0 < s`, that the ball stays inside `[0, T_num]`, and that `s` is
/// below the conjugate bound (or the `inj` override when given).
pub fn check_ball_radius(w: &WarpedSurface, t0: f64, s: f64, inj: Option<f64>) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("ball radius must be positive, got {s}")));
    }
    if !(t0 >= 0.0) || t0 + s > w.t_num() {
        return Err(Error::domain(format!(
            "ball of radius {s} about t = {t0} leaves the numerical domain T_num = {}",
            w.t_num()
        )));
    }
    let bound = match inj {
        Some(b) => b,
        None => {
            let (_, sup) = w.curvature_bounds((t0 - s).max(0.0), t0 + s)?;
            if sup > 0.0 {
                PI / sup.sqrt()
            } else {
                f64::INFINITY
            }
        }
    };
    if s >= bound {
        return Err(Error::domain(format!("ball radius {s} not below the conjugate bound {bound}")));
    }
    Ok(())
}

/// Monte-Carlo estimate of `|B(x, s) \ E|` for `x` at radius `t0`.
///
/// Samples `ρ = s√U`, `α = 2πV`; each sample contributes
/// `π s² J(ρ, α)/ρ` when the endpoint lies outside `E`.
pub fn ball_minus_region_mc(
    w: &WarpedSurface,
    t0: f64,
    s: f64,
    excluded: &SymmetricRegion,
    samples: usize,
    seed: u64,
) -> Result<BallEstimate> {
    check_ball_radius(w, t0, s, None)?;
    mc_estimate(w, t0, s, excluded, samples, seed)
}

pub(crate) fn mc_estimate(
    w: &WarpedSurface,
    t0: f64,
    s: f64,
    excluded: &SymmetricRegion,
    samples: usize,
    seed: u64,
) -> Result<BallEstimate> {
    if samples < 2 {
        return Err(Error::invalid("Monte-Carlo estimates need at least 2 samples"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = PI * s * s;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let rho = s * u.sqrt();
        let alpha = TAU * v;
        let x = if rho == 0.0 {
            if excluded.contains(t0) { 0.0 } else { scale }
        } else {
            let (t, j) = ray_endpoint(w, t0, alpha, rho)?;
            if excluded.contains(t) { 0.0 } else { scale * j / rho }
        };
        sum += x;
        sum_sq += x * x;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(BallEstimate {
        value: mean,
        sigma: (var / n).sqrt(),
        samples,
    })
}

/// Monte-Carlo estimate of `|B(x, s)|` for a centre `(t0, θ0)`.
pub fn offset_ball_measure(
    w: &WarpedSurface,
    center: (f64, f64),
    s: f64,
    samples: usize,
    seed: u64,
) -> Result<BallEstimate> {
    ball_minus_region_mc(w, center.0, s, &SymmetricRegion::empty(), samples, seed)
}

/// `∫₀^s J(ρ, α) [endpoint ∉ E] dρ` along one ray, with the boundary
/// crossings of `E` located exactly.
fn ray_outside_integral(w: &WarpedSurface, t0: f64, alpha: f64, s: f64, excluded: &SymmetricRegion) -> Result<f64> {
    let radii = excluded.boundary_radii();
    let probe = ray_endpoint(w, t0, alpha, 1e-7 * s)?.0;
    let outside = Cell::new(if excluded.contains(probe) { 0.0 } else { 1.0 });
    let rhs = |_s: f64, y: &[f64; 6]| {
        let r = ray_rhs(w)(0.0, &[y[0], y[1], y[2], y[3], y[4]]);
        [r[0], r[1], r[2], r[3], r[4], outside.get() * y[3]]
    };
    let mut it = Integrator::new(rhs, 0.0, [t0, 0.0, alpha, 0.0, 1.0, 0.0], ray_options());
    let mut skip: Option<f64> = radii.iter().copied().find(|&b| b == t0);
    while it.s() < s {
        let t_prev = it.y()[0].abs();
        it.step(s)?;
        let t_new = it.y()[0].abs();
        let mut first: Option<(f64, [f64; 6], f64)> = None;
        for &b in &radii {
            if skip == Some(b) && (t_prev - b).abs() < 1e-10 {
                continue;
            }
            if (t_prev - b) * (t_new - b) < 0.0 {
                let (se, ye) = it.find_event(|_, y| y[0].abs() - b, 1e-14)?;
                if first.map_or(true, |(s0, _, _)| se < s0) {
                    first = Some((se, ye, b));
                }
            }
        }
        skip = None;
        if let Some((se, ye, b)) = first {
            it.jump_to(se, ye);
            let dir = ye[2].cos() * ye[0].signum();
            outside.set(if excluded.contains(b + dir.signum() * 1e-9) { 0.0 } else { 1.0 });
            skip = Some(b);
        }
    }
    Ok(it.y()[5])
}

/// Deterministic `|B(x, s) \ E|` for `x` at radius `t0`: exact radial
/// integration along `n_angles + 1` rays on `α ∈ [0, π]` and the
/// trapezoidal rule in `α` (the integrand is even in `α`).
pub fn ball_measure_excluding(
    w: &WarpedSurface,
    t0: f64,
    s: f64,
    excluded: &SymmetricRegion,
    n_angles: usize,
) -> Result<f64> {
    check_ball_radius(w, t0, s, None)?;
    ball_measure_unchecked(w, t0, s, excluded, n_angles)
}

pub(crate) fn ball_measure_unchecked(
    w: &WarpedSurface,
    t0: f64,
    s: f64,
    excluded: &SymmetricRegion,
    n_angles: usize,
) -> Result<f64> {
    if t0 == 0.0 {
        let total = TAU * w.pole_integral(s);
        let (cut, _) = w.region_truncate(excluded, s)?;
        return Ok(total - w.region_volume(&cut)?);
    }
    let n = n_angles.max(2);
    let mut sum = 0.0;
    for k in 0..=n {
        let alpha = PI * k as f64 / n as f64;
        let weight = if k == 0 || k == n { 0.5 } else { 1.0 };
        sum += weight * ray_outside_integral(w, t0, alpha, s, excluded)?;
    }
    Ok(2.0 * sum * PI / n as f64)
}
