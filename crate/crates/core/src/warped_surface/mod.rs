//! Rotationally symmetric surfaces `dt² + φ(t)² dθ²` with a smooth pole at
//! `t = 0`.
//!
//! The warping function is extended oddly through the pole
//! (`φ(-t) = -φ(t)`), so a coordinate pair `(t, θ)` with `t < 0` denotes the
//! point `(-t, θ + π)`. Geodesic and arc integrators rely on this to pass
//! through the pole without special casing.

pub mod ball;
pub mod config;
pub mod expr;
pub mod geodesic;
pub mod region;

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, find_root, root::bracket_increasing, QuadOptions, RootOptions};

pub use ball::{ball_measure_excluding, offset_ball_measure, BallEstimate};
pub use config::SurfaceConfig;
pub use expr::Expr;
pub use geodesic::{cmc_arc_shoot, geodesic_integrate, ArcResult, ArcStop, GeodesicState};
pub use region::SymmetricRegion;

/// Below this radius, `φ'/φ` and the curvature use the series
/// `φ(t) = t + φ'''(0) t³/6 + …`.
pub const POLE_SERIES_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Catalog {
    Plane,
    Hyperbolic,
    Cigar,
    Flare,
    Custom,
}

impl Catalog {
    pub fn name(self) -> &'static str {
        match self {
            Catalog::Plane => "plane",
            Catalog::Hyperbolic => "hyperbolic",
            Catalog::Cigar => "cigar",
            Catalog::Flare => "flare",
            Catalog::Custom => "custom",
        }
    }

    pub fn parse(name: &str) -> Result<Catalog> {
        Ok(match name {
            "plane" => Catalog::Plane,
            "hyperbolic" => Catalog::Hyperbolic,
            "cigar" => Catalog::Cigar,
            "flare" => Catalog::Flare,
            "custom" => Catalog::Custom,
            other => return Err(Error::invalid(format!("unknown catalog surface {other:?}"))),
        })
    }

    /// Surfaces with closed-form constant curvature.
    pub fn constant_curvature(self) -> Option<f64> {
        match self {
            Catalog::Plane => Some(0.0),
            Catalog::Hyperbolic => Some(-1.0),
            _ => None,
        }
    }

    fn default_t_num(self) -> f64 {
        match self {
            Catalog::Plane => 100.0,
            Catalog::Hyperbolic => 30.0,
            Catalog::Cigar => 20.0,
            Catalog::Flare => 5.0,
            Catalog::Custom => 20.0,
        }
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// User-supplied warping function with explicit first and second
/// derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomWarp {
    pub phi: Expr,
    pub dphi: Expr,
    pub ddphi: Expr,
    pub source: [String; 3],
}

impl CustomWarp {
    pub fn parse(phi: &str, dphi: &str, ddphi: &str) -> Result<Self> {
        Ok(Self {
            phi: Expr::parse(phi, "t")?,
            dphi: Expr::parse(dphi, "t")?,
            ddphi: Expr::parse(ddphi, "t")?,
            source: [phi.to_string(), dphi.to_string(), ddphi.to_string()],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpedSurface {
    catalog: Catalog,
    custom: Option<CustomWarp>,
    t_num: f64,
}

impl WarpedSurface {
    pub fn catalog(catalog: Catalog) -> Result<Self> {
        if catalog == Catalog::Custom {
            return Err(Error::invalid("custom surfaces need a warp descriptor"));
        }
        Ok(Self {
            catalog,
            custom: None,
            t_num: catalog.default_t_num(),
        })
    }

    pub fn plane() -> Self {
        Self::catalog(Catalog::Plane).unwrap()
    }

    pub fn hyperbolic() -> Self {
        Self::catalog(Catalog::Hyperbolic).unwrap()
    }

    pub fn cigar() -> Self {
        Self::catalog(Catalog::Cigar).unwrap()
    }

    pub fn flare() -> Self {
        Self::catalog(Catalog::Flare).unwrap()
    }

    /// The four catalog surfaces.
    pub fn all_catalog() -> Vec<WarpedSurface> {
        vec![Self::plane(), Self::hyperbolic(), Self::cigar(), Self::flare()]
    }

    pub fn custom(warp: CustomWarp, t_num: f64) -> Result<Self> {
        let s = Self {
            catalog: Catalog::Custom,
            custom: Some(warp),
            t_num: 1.0,
        }
        .with_t_num(t_num)?;
        s.validate_pole()?;
        s.validate_positive()?;
        Ok(s)
    }

    pub fn with_t_num(mut self, t_num: f64) -> Result<Self> {
        if !(t_num > 0.0) || !t_num.is_finite() {
            return Err(Error::invalid(format!("T_num must be positive and finite, got {t_num}")));
        }
        self.t_num = t_num;
        if self.catalog == Catalog::Custom {
            self.validate_positive()?;
        } else if !self.phi(t_num).is_finite() || !self.pole_integral(t_num).is_finite() {
            return Err(Error::invalid(format!(
                "T_num = {t_num} overflows the {} warping function",
                self.catalog
            )));
        }
        Ok(self)
    }

    /// Shrinks the numerical truncation to the radius whose pole ball holds
    /// ten times `max_volume`.
    pub fn with_volume_budget(self, max_volume: f64) -> Result<Self> {
        let target = 10.0 * max_volume;
        if self.pole_ball_volume_unchecked(self.t_num) <= target {
            return Ok(self);
        }
        let r = self.radius_for_volume(target)?;
        self.with_t_num(r)
    }

    pub fn catalog_id(&self) -> Catalog {
        self.catalog
    }

    pub fn name(&self) -> &'static str {
        self.catalog.name()
    }

    pub fn custom_warp(&self) -> Option<&CustomWarp> {
        self.custom.as_ref()
    }

    /// Numerical domain end `T_num`.
    pub fn t_num(&self) -> f64 {
        self.t_num
    }

    fn validate_pole(&self) -> Result<()> {
        let (p0, dp0) = (self.phi_pos(0.0), self.dphi_pos(0.0));
        if p0.abs() > 1e-12 || (dp0 - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "warp must satisfy phi(0) = 0 and phi'(0) = 1 (got {p0}, {dp0})"
            )));
        }
        Ok(())
    }

    fn validate_positive(&self) -> Result<()> {
        let n = 2048;
        for k in 1..=n {
            let t = self.t_num * k as f64 / n as f64;
            let (p, dp, ddp) = (self.phi_pos(t), self.dphi_pos(t), self.ddphi_pos(t));
            if !(p > 0.0) || !p.is_finite() || !dp.is_finite() || !ddp.is_finite() {
                return Err(Error::invalid(format!(
                    "warp must be positive and finite on (0, T_num]; fails at t = {t}"
                )));
            }
        }
        Ok(())
    }

    fn phi_pos(&self, t: f64) -> f64 {
        match self.catalog {
            Catalog::Plane => t,
            Catalog::Hyperbolic => t.sinh(),
            Catalog::Cigar => t.tanh(),
            Catalog::Flare => t + t * t * t * (t * t).exp(),
            Catalog::Custom => self.custom.as_ref().unwrap().phi.eval(t),
        }
    }

    fn dphi_pos(&self, t: f64) -> f64 {
        match self.catalog {
            Catalog::Plane => 1.0,
            Catalog::Hyperbolic => t.cosh(),
            Catalog::Cigar => {
                let c = t.cosh();
                1.0 / (c * c)
            }
            Catalog::Flare => {
                let t2 = t * t;
                1.0 + (3.0 * t2 + 2.0 * t2 * t2) * t2.exp()
            }
            Catalog::Custom => self.custom.as_ref().unwrap().dphi.eval(t),
        }
    }

    fn ddphi_pos(&self, t: f64) -> f64 {
        match self.catalog {
            Catalog::Plane => 0.0,
            Catalog::Hyperbolic => t.sinh(),
            Catalog::Cigar => {
                let c = t.cosh();
                -2.0 * t.tanh() / (c * c)
            }
            Catalog::Flare => {
                let t2 = t * t;
                (6.0 * t + 14.0 * t2 * t + 4.0 * t2 * t2 * t) * t2.exp()
            }
            Catalog::Custom => self.custom.as_ref().unwrap().ddphi.eval(t),
        }
    }

    /// `φ'''(0)`; closed form for the catalog, a one-sided difference
    /// quotient `φ''(ε)/ε` for custom warps.
    pub fn phi_third_at_pole(&self) -> f64 {
        match self.catalog {
            Catalog::Plane => 0.0,
            Catalog::Hyperbolic => 1.0,
            Catalog::Cigar => -2.0,
            Catalog::Flare => 6.0,
            Catalog::Custom => {
                let eps = POLE_SERIES_THRESHOLD;
                self.ddphi_pos(eps) / eps
            }
        }
    }

    /// `φ(t)`, oddly extended to `t < 0`.
    pub fn phi(&self, t: f64) -> f64 {
        if t < 0.0 {
            -self.phi_pos(-t)
        } else {
            self.phi_pos(t)
        }
    }

    pub fn dphi(&self, t: f64) -> f64 {
        self.dphi_pos(t.abs())
    }

    pub fn ddphi(&self, t: f64) -> f64 {
        if t < 0.0 {
            -self.ddphi_pos(-t)
        } else {
            self.ddphi_pos(t)
        }
    }

    /// `φ'(t)/φ(t)`: the geodesic curvature of the latitude circle at
    /// radius `t` (odd in `t`).
    pub fn latitude_curvature(&self, t: f64) -> f64 {
        if t.abs() < POLE_SERIES_THRESHOLD {
            if t == 0.0 {
                return f64::INFINITY;
            }
            1.0 / t + self.phi_third_at_pole() * t / 3.0
        } else {
            self.dphi(t) / self.phi(t)
        }
    }

    /// Gauss curvature `-φ''/φ` at radius `|t|`, without domain checks.
    pub fn curvature_at(&self, t: f64) -> f64 {
        let t = t.abs();
        if t < POLE_SERIES_THRESHOLD {
            -self.phi_third_at_pole()
        } else {
            -self.ddphi_pos(t) / self.phi_pos(t)
        }
    }

    fn check_radius(&self, t: f64, allow_zero: bool) -> Result<()> {
        let ok_low = if allow_zero { t >= 0.0 } else { t > 0.0 };
        if !ok_low || !(t <= self.t_num) {
            return Err(Error::domain(format!(
                "radius {t} outside the numerical domain {}0, {}]",
                if allow_zero { "[" } else { "(" },
                self.t_num
            )));
        }
        Ok(())
    }

    pub fn gauss_curvature(&self, t: f64) -> Result<f64> {
        self.check_radius(t, true)?;
        Ok(self.curvature_at(t))
    }

    /// Infimum and supremum of the Gauss curvature over the annulus
    /// `a <= t <= b`.
    pub fn curvature_bounds(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if !(a <= b) {
            return Err(Error::invalid(format!("empty radial range [{a}, {b}]")));
        }
        self.check_radius(a, true)?;
        self.check_radius(b, true)?;
        match self.catalog {
            Catalog::Plane => Ok((0.0, 0.0)),
            Catalog::Hyperbolic => Ok((-1.0, -1.0)),
            // Both curvatures are decreasing in t.
            Catalog::Cigar | Catalog::Flare => Ok((self.curvature_at(b), self.curvature_at(a))),
            Catalog::Custom => {
                let n = 1024;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for k in 0..=n {
                    let t = a + (b - a) * k as f64 / n as f64;
                    let kk = self.curvature_at(t);
                    lo = lo.min(kk);
                    hi = hi.max(kk);
                }
                Ok((lo, hi))
            }
        }
    }

    /// Supremum of the curvature over the closed radial hull of a region.
    pub fn curvature_sup(&self, region: &SymmetricRegion) -> Result<f64> {
        let (a, b) = region
            .radial_hull()
            .ok_or_else(|| Error::invalid("curvature supremum over an empty region"))?;
        Ok(self.curvature_bounds(a, b)?.1)
    }

    /// Supremum of the curvature over the pole ball of radius `radius`.
    pub fn curvature_sup_ball(&self, radius: f64) -> Result<f64> {
        Ok(self.curvature_bounds(0.0, radius)?.1)
    }

    /// `Φ(R) = ∫₀^R φ`, closed form for the catalog surfaces.
    pub fn pole_integral(&self, r: f64) -> f64 {
        let r = r.abs();
        match self.catalog {
            Catalog::Plane => 0.5 * r * r,
            Catalog::Hyperbolic => {
                let s = (0.5 * r).sinh();
                2.0 * s * s
            }
            Catalog::Cigar => {
                if r > 20.0 {
                    r + (-2.0 * r).exp().ln_1p() - std::f64::consts::LN_2
                } else {
                    let s = (0.5 * r).sinh();
                    (2.0 * s * s).ln_1p()
                }
            }
            Catalog::Flare => {
                let u = r * r;
                // ∫₀^r s³e^{s²} ds = ((u - 1)e^u + 1)/2 with u = r².
                let cubic = if u < 0.05 {
                    // (u - 1)e^u + 1 = Σ_{k>=2} (k - 1) u^k / k!
                    let mut term = u * u / 2.0;
                    let mut sum = 0.0;
                    for k in 2..16 {
                        sum += term * (k as f64 - 1.0);
                        term *= u / (k as f64 + 1.0);
                    }
                    0.5 * sum
                } else {
                    0.5 * (u * u.exp() - u.exp_m1())
                };
                0.5 * u + cubic
            }
            Catalog::Custom => self.pole_integral_quadrature(r),
        }
    }

    fn pole_integral_quadrature(&self, r: f64) -> f64 {
        adaptive_simpson(|t| self.phi_pos(t), 0.0, r.abs(), QuadOptions::default()).unwrap_or(f64::NAN)
    }

    pub(crate) fn pole_ball_volume_unchecked(&self, r: f64) -> f64 {
        TAU * self.pole_integral(r)
    }

    /// Area `2π∫₀^R φ` of the pole ball of radius `R`.
    pub fn pole_ball_volume(&self, r: f64) -> Result<f64> {
        self.check_radius(r, false)?;
        Ok(self.pole_ball_volume_unchecked(r))
    }

    /// Same as [`pole_ball_volume`](Self::pole_ball_volume) but always by
    /// adaptive quadrature.
    pub fn pole_ball_volume_quadrature(&self, r: f64) -> Result<f64> {
        self.check_radius(r, false)?;
        Ok(TAU * self.pole_integral_quadrature(r))
    }

    /// Length `2πφ(R)` of the boundary circle of the pole ball.
    pub fn pole_ball_area(&self, r: f64) -> Result<f64> {
        self.check_radius(r, false)?;
        Ok(TAU * self.phi(r))
    }

    pub fn max_volume(&self) -> f64 {
        self.pole_ball_volume_unchecked(self.t_num)
    }

    /// Radius of the pole ball of area `v`.
    pub fn radius_for_volume(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("volume must be positive and finite, got {v}")));
        }
        let max = self.max_volume();
        if v >= max {
            return Err(Error::domain(format!(
                "volume {v} not reachable inside T_num = {} (max {max})",
                self.t_num
            )));
        }
        let vol = |r: f64| self.pole_ball_volume_unchecked(r);
        let guess = (v / PI).sqrt().min(self.t_num);
        let (lo, hi) = if vol(guess) >= v {
            (0.0, guess)
        } else {
            bracket_increasing(vol, v, guess, (2.0 * guess).min(self.t_num), self.t_num)?
        };
        let opts = RootOptions {
            f_tol: 1e-12 * v.max(1.0),
            ..RootOptions::default()
        };
        find_root(|r| vol(r) - v, Some(|r: f64| TAU * self.phi(r)), lo, hi, opts)
    }

    /// Minimum of `φ'` over a dense sample of `(0, T_num]`.
    pub fn min_dphi(&self) -> (f64, f64) {
        let n = 4096;
        let mut worst = (f64::INFINITY, 0.0);
        for k in 1..=n {
            let t = self.t_num * k as f64 / n as f64;
            let d = self.dphi_pos(t);
            if d < worst.0 {
                worst = (d, t);
            }
        }
        worst
    }

    /// Conjugate-distance bound `π/sqrt(sup K)` over the pole ball of radius
    /// `radius` (infinite when the curvature is non-positive there).
    pub fn conjugate_bound(&self, radius: f64) -> Result<f64> {
        let k = self.curvature_sup_ball(radius.min(self.t_num))?;
        Ok(if k > 0.0 { PI / k.sqrt() } else { f64::INFINITY })
    }

    /// Region volume `Σ 2π∫_{a_k}^{b_k} φ`.
    pub fn region_volume(&self, region: &SymmetricRegion) -> Result<f64> {
        self.check_region(region)?;
        Ok(region
            .intervals()
            .iter()
            .map(|&(a, b)| TAU * (self.pole_integral(b) - self.pole_integral(a)))
            .sum())
    }

    /// Region perimeter `Σ 2πφ(a_k)[a_k > 0] + 2πφ(b_k)`.
    pub fn region_perimeter(&self, region: &SymmetricRegion) -> Result<f64> {
        self.check_region(region)?;
        Ok(region
            .intervals()
            .iter()
            .map(|&(a, b)| TAU * (if a > 0.0 { self.phi(a) } else { 0.0 } + self.phi(b)))
            .sum())
    }

    /// Perimeter of the region inside the open pole ball of radius `rho`.
    pub fn region_perimeter_inside(&self, region: &SymmetricRegion, rho: f64) -> Result<f64> {
        self.check_region(region)?;
        let mut total = 0.0;
        for &(a, b) in region.intervals() {
            if a > 0.0 && a < rho {
                total += TAU * self.phi(a);
            }
            if b < rho {
                total += TAU * self.phi(b);
            }
        }
        Ok(total)
    }

    /// Intersection with the closed pole ball `C_ρ`, together with the
    /// length of the slice `E ∩ ∂C_ρ`, so that
    /// `perimeter(E ∩ C_ρ) = perimeter(E, int C_ρ) + slice`.
    ///
    /// Measure-zero intersections (`ρ` equal to the start of an interval)
    /// are dropped.
    pub fn region_truncate(&self, region: &SymmetricRegion, rho: f64) -> Result<(SymmetricRegion, f64)> {
        self.check_region(region)?;
        self.check_radius(rho, false)?;
        let mut out = Vec::new();
        let mut slice = 0.0;
        for &(a, b) in region.intervals() {
            if a >= rho {
                break;
            }
            if b >= rho {
                out.push((a, rho));
                slice = TAU * self.phi(rho);
            } else {
                out.push((a, b));
            }
        }
        Ok((SymmetricRegion::new(out)?, slice))
    }

    fn check_region(&self, region: &SymmetricRegion) -> Result<()> {
        if let Some((_, b)) = region.radial_hull() {
            if b > self.t_num {
                return Err(Error::domain(format!(
                    "region extends to {b}, beyond T_num = {}",
                    self.t_num
                )));
            }
        }
        Ok(())
    }
}
