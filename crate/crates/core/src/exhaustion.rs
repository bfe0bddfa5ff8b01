//! The radial exhaustion `f = m(½d²)` with `m(x) = (1 + x)^{1/2}`, where
//! `d` is the distance to the pole.
//!
//! Along a unit-speed geodesic, `(f∘γ)'' = m''(h) (h')² + m'(h) h''` with
//! `h = ½d²`. When `∇²h >= 1` and `|h'| <= |∇h| = d`, this gives the floor
//! `½ (1 + ½d²)^{-3/2}`, attained by radial geodesics.
//! [`hessian_lower_bound`] returns the bound
//! `¼ (1 + d²)/(1 + ½d²)^{3/2}`, which comes from estimating `|h'|` by 1
//! instead of `d`. It exceeds the attainable floor once `d > 1`, so the
//! verification reports both margins.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::OdeOptions;
use crate::warped_surface::geodesic::{geodesic_sample, GeodesicState};
use crate::warped_surface::WarpedSurface;

/// Outer function `m` of `f = m(½d²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterFunction {
    /// `m(x) = (1 + x)^{1/2}`.
    Sqrt,
}

impl OuterFunction {
    pub fn m(self, x: f64) -> f64 {
        match self {
            OuterFunction::Sqrt => (1.0 + x).sqrt(),
        }
    }

    pub fn dm(self, x: f64) -> f64 {
        match self {
            OuterFunction::Sqrt => 0.5 / (1.0 + x).sqrt(),
        }
    }

    pub fn ddm(self, x: f64) -> f64 {
        match self {
            OuterFunction::Sqrt => -0.25 / (1.0 + x).powf(1.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustionSpec {
    surface: WarpedSurface,
    outer: OuterFunction,
}

/// Builds `f = (1 + ½t²)^{1/2}` on `w`. Requires `φ' > 0`, i.e. convex
/// latitude circles.
pub fn build_sqrt_exhaustion(w: &WarpedSurface) -> Result<ExhaustionSpec> {
    let (min_dphi, at) = w.min_dphi();
    if !(min_dphi > 0.0) {
        return Err(Error::domain(format!(
            "phi' = {min_dphi} <= 0 at t = {at}: level circles of the radial exhaustion are not convex"
        )));
    }
    Ok(ExhaustionSpec {
        surface: w.clone(),
        outer: OuterFunction::Sqrt,
    })
}

/// `d/(1 + ½d²)^{1/2}`, an upper bound for `|∇f|` with supremum `√2`.
/// It is twice [`exact_gradient_norm`].
pub fn gradient_norm(d: f64) -> f64 {
    d / (1.0 + 0.5 * d * d).sqrt()
}

/// `|∇f| = m'(½d²) d = d/(2(1 + ½d²)^{1/2})`.
pub fn exact_gradient_norm(d: f64) -> f64 {
    0.5 * gradient_norm(d)
}

/// `¼ (1 + d²)/(1 + ½d²)^{3/2}`.
pub fn hessian_lower_bound(d: f64) -> f64 {
    0.25 * (1.0 + d * d) / (1.0 + 0.5 * d * d).powf(1.5)
}

/// `½ (1 + ½d²)^{-3/2}`: the second derivative of `f` along a radial
/// geodesic, and the smallest value `(f∘γ)''` can take when `∇²h >= 1`.
pub fn radial_hessian(d: f64) -> f64 {
    0.5 / (1.0 + 0.5 * d * d).powf(1.5)
}

impl ExhaustionSpec {
    pub fn surface(&self) -> &WarpedSurface {
        &self.surface
    }

    pub fn outer(&self) -> OuterFunction {
        self.outer
    }

    /// `f` at distance `d` from the pole.
    pub fn value(&self, d: f64) -> f64 {
        self.outer.m(0.5 * d * d)
    }

    /// `inf f = m(0)`.
    pub fn inf_value(&self) -> f64 {
        self.outer.m(0.0)
    }

    /// Lipschitz constant `√2`, the supremum of [`gradient_norm`].
    pub fn lipschitz_constant(&self) -> f64 {
        SQRT_2
    }

    /// Radius of the sublevel ball `C_r = {f <= r}`.
    pub fn sublevel_radius(&self, r: f64) -> Result<f64> {
        if !(r >= self.inf_value()) || !r.is_finite() {
            return Err(Error::domain(format!("level {r} below inf f = {}", self.inf_value())));
        }
        Ok((2.0 * (r * r - 1.0)).sqrt())
    }

    /// Level `r` whose sublevel set is the pole ball of radius `d`.
    pub fn level_for_radius(&self, d: f64) -> f64 {
        self.value(d)
    }

    /// Divergence of `∇f/|∇f|` on the level circle at radius `t`, which is
    /// its geodesic curvature `φ'/φ`.
    pub fn level_normal_divergence(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::domain("the unit normal field is undefined at the pole"));
        }
        if !(t > 0.0) || t > self.surface.t_num() {
            return Err(Error::domain(format!("radius {t} outside (0, {}]", self.surface.t_num())));
        }
        Ok(self.surface.latitude_curvature(t))
    }

    /// Smallest divergence on `n` equally spaced radii in `(0, T_num]`.
    pub fn min_level_divergence(&self, n: usize) -> Result<(f64, f64)> {
        let mut worst = (f64::INFINITY, 0.0);
        for k in 1..=n.max(1) {
            let t = self.surface.t_num() * k as f64 / n.max(1) as f64;
            let d = self.level_normal_divergence(t)?;
            if d < worst.0 {
                worst = (d, t);
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityOptions {
    pub geodesics: usize,
    pub seed: u64,
    pub tol: f64,
    /// Finite-difference step (and maximal integrator step).
    pub step: f64,
    pub geodesic_length: f64,
    /// Start radii are drawn uniformly from `[0, start_radius_max]`;
    /// `None` uses `min(3, T_num/2)`.
    pub start_radius_max: Option<f64>,
}

impl Default for ConvexityOptions {
    fn default() -> Self {
        Self {
            geodesics: 100,
            seed: 0,
            tol: 1e-4,
            step: 1e-3,
            geodesic_length: 2.0,
            start_radius_max: None,
        }
    }
}

/// The sample with the smallest margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexitySample {
    pub geodesic: usize,
    pub start_t: f64,
    pub start_psi: f64,
    pub s: f64,
    pub d: f64,
    pub second_difference: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub surface: String,
    pub lipschitz_constant: f64,
    pub sandwich_constant: f64,
    /// Worst `(f∘γ)'' - hessian_lower_bound(d)`; `None` in positivity mode.
    pub min_hessian_margin: Option<f64>,
    /// Worst `(f∘γ)'' - radial_hessian(d)`; `None` in positivity mode.
    pub min_radial_margin: Option<f64>,
    pub min_second_difference: f64,
    pub geodesic_count: usize,
    pub samples_per_geodesic: usize,
    pub domain_sampled: (f64, f64),
    pub bound_checked: bool,
    pub positive: bool,
    pub pass: bool,
    pub worst: Option<ConvexitySample>,
}

/// Samples seeded random geodesics and checks second differences of `f∘γ`.
///
/// Every second difference must be positive. On surfaces with `K <= 0` on
/// the sampled region they must also exceed
/// `hessian_lower_bound(d) - tol`.
pub fn verify_strict_convexity(spec: &ExhaustionSpec, opts: &ConvexityOptions) -> Result<ConvexityReport> {
    let w = &spec.surface;
    if opts.geodesics == 0 || !(opts.step > 0.0) || !(opts.geodesic_length > 2.0 * opts.step) {
        return Err(Error::invalid("need at least one geodesic and length > 2 steps"));
    }
    let t_hi = opts.start_radius_max.unwrap_or_else(|| (0.5 * w.t_num()).min(3.0));
    let reach = t_hi + opts.geodesic_length;
    if !(t_hi >= 0.0) || reach > w.t_num() {
        return Err(Error::domain(format!(
            "geodesics may reach t = {reach}, beyond T_num = {}",
            w.t_num()
        )));
    }
    let bound_checked = w.curvature_bounds(0.0, reach)?.1 <= 0.0;

    let h = opts.step;
    let n = (opts.geodesic_length / h).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let ode = OdeOptions {
        rtol: 1e-12,
        atol: 1e-14,
        h_init: h,
        h_max: h,
        ..OdeOptions::default()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut min_sd = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    let mut min_radial = f64::INFINITY;
    let mut worst: Option<ConvexitySample> = None;
    let mut worst_key = f64::INFINITY;
    for g in 0..opts.geodesics {
        let t0 = t_hi * rng.random::<f64>();
        let psi = 2.0 * PI * rng.random::<f64>();
        let start = GeodesicState::from_heading(w, t0, 0.0, psi);
        let states = geodesic_sample(w, start, &grid, ode)?;
        let f: Vec<f64> = states.iter().map(|s| spec.value(s.t)).collect();
        for k in 1..n {
            let sd = (f[k + 1] - 2.0 * f[k] + f[k - 1]) / (h * h);
            let d = states[k].t;
            let bound = hessian_lower_bound(d);
            min_sd = min_sd.min(sd);
            let key = if bound_checked {
                let m = sd - bound;
                min_margin = min_margin.min(m);
                min_radial = min_radial.min(sd - radial_hessian(d));
                m
            } else {
                sd
            };
            if key < worst_key {
                worst_key = key;
                worst = Some(ConvexitySample {
                    geodesic: g,
                    start_t: t0,
                    start_psi: psi,
                    s: grid[k],
                    d,
                    second_difference: sd,
                    bound: if bound_checked { bound } else { 0.0 },
                });
            }
        }
    }
    let positive = min_sd > 0.0;
    let pass = positive && (!bound_checked || min_margin >= -opts.tol);
    let sandwich = greene_wu_sandwich(spec, &default_level_grid(spec)?)?;
    Ok(ConvexityReport {
        surface: w.name().to_string(),
        lipschitz_constant: spec.lipschitz_constant(),
        sandwich_constant: sandwich.k,
        min_hessian_margin: bound_checked.then_some(min_margin),
        min_radial_margin: bound_checked.then_some(min_radial),
        min_second_difference: min_sd,
        geodesic_count: opts.geodesics,
        samples_per_geodesic: n - 1,
        domain_sampled: (0.0, reach),
        bound_checked,
        positive,
        pass,
        worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichPoint {
    pub r: f64,
    pub inner_radius: f64,
    pub sublevel_radius: f64,
    pub outer_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub l: f64,
    /// Smallest `r/(R(r) - 1)` over grid levels with sublevel radius
    /// `R(r) > 1`; `∞` when there is none.
    pub k: f64,
    pub points: Vec<SandwichPoint>,
    pub pass: bool,
}

/// Levels `1, 1.1, …, 10`, clipped to the numerical domain.
pub fn default_level_grid(spec: &ExhaustionSpec) -> Result<Vec<f64>> {
    let r_max = spec.level_for_radius(spec.surface.t_num()).min(10.0);
    let n = 90;
    Ok((0..=n).map(|k| 1.0 + (r_max - 1.0) * k as f64 / n as f64).collect())
}

/// Checks `B(x₀, (r - inf f)/L) ⊆ C_r` and computes the largest `K` with
/// `C_r ⊆ B̄(x₀, r/K + 1)` on the grid.
pub fn greene_wu_sandwich(spec: &ExhaustionSpec, r_grid: &[f64]) -> Result<SandwichReport> {
    if r_grid.is_empty() {
        return Err(Error::invalid("empty level grid"));
    }
    let l = spec.lipschitz_constant();
    let mut k = f64::INFINITY;
    let mut radii = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let sr = spec.sublevel_radius(r)?;
        if sr > spec.surface.t_num() {
            return Err(Error::domain(format!(
                "sublevel radius {sr} at level {r} exceeds T_num = {}",
                spec.surface.t_num()
            )));
        }
        if sr > 1.0 {
            k = k.min(r / (sr - 1.0));
        }
        radii.push((r, sr));
    }
    let mut points = Vec::with_capacity(radii.len());
    let mut pass = true;
    for (r, sr) in radii {
        let inner = (r - spec.inf_value()) / l;
        let outer = if k.is_finite() { r / k + 1.0 } else { f64::INFINITY };
        if inner > sr * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::verification(format!(
                "inner ball of radius {inner} not inside C_{r} (radius {sr})"
            )));
        }
        pass &= sr <= outer * (1.0 + 1e-12);
        points.push(SandwichPoint {
            r,
            inner_radius: inner,
            sublevel_radius: sr,
            outer_radius: outer,
        });
    }
    let mut prev = -1.0;
    for p in &points {
        pass &= p.sublevel_radius >= prev;
        prev = p.sublevel_radius;
    }
    Ok(SandwichReport { l, k, points, pass })
}
