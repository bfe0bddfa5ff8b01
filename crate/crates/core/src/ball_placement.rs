//! Placement of geodesic balls of prescribed radius that mostly avoid a set
//! `E` of smaller volume than a bounded set `B`.
//!
//! Given `E`, pole balls `B ⊂ D` with `d(B, ∂D) > r₀` and `δ = sup K` on
//! `B`, every admissible `r` has a point `x ∈ D` with
//! `|B(x, r) \ E| >= Λ(r) = ((|B| - |E|)/|D|) V_δ(r)`. The witness search
//! looks for such a point; the averaging check estimates the mean of
//! `|B(x, r) \ E|` over `D`, which already exceeds `Λ(r)`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space_forms::SpaceForm;
use crate::warped_surface::ball::{check_ball_radius, mc_estimate, ray_endpoint, BallEstimate};
use crate::warped_surface::{SurfaceConfig, SymmetricRegion, WarpedSurface};

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementScenario {
    surface: WarpedSurface,
    e: SymmetricRegion,
    b: f64,
    d: f64,
    r0: f64,
    delta: f64,
    inj_bound: f64,
    inj_override: Option<f64>,
}

impl PlacementScenario {
    pub fn new(
        surface: WarpedSurface,
        e: SymmetricRegion,
        b: f64,
        d: f64,
        r0: f64,
        inj_override: Option<f64>,
    ) -> Result<Self> {
        if !(b > 0.0) || !(d > b) || !(r0 > 0.0) {
            return Err(Error::invalid(format!("need 0 < B < D and r0 > 0 (got B = {b}, D = {d}, r0 = {r0})")));
        }
        if !(d - b > r0) {
            return Err(Error::invalid(format!("d(B, ∂D) = {} must exceed r0 = {r0}", d - b)));
        }
        if d > surface.t_num() {
            return Err(Error::domain(format!("D = {d} exceeds T_num = {}", surface.t_num())));
        }
        let vol_b = surface.pole_ball_volume(b)?;
        let vol_e = surface.region_volume(&e)?;
        if !(vol_b - vol_e > 0.0) {
            return Err(Error::invalid(format!("|B| - |E| = {} must be positive", vol_b - vol_e)));
        }
        let delta = surface.curvature_sup_ball(b)?;
        let inj_bound = match inj_override {
            Some(v) if v > 0.0 => v,
            Some(v) => return Err(Error::invalid(format!("injectivity override must be positive, got {v}"))),
            None => surface.conjugate_bound(b)?,
        };
        Ok(Self {
            surface,
            e,
            b,
            d,
            r0,
            delta,
            inj_bound,
            inj_override,
        })
    }

    pub fn surface(&self) -> &WarpedSurface {
        &self.surface
    }

    pub fn region(&self) -> &SymmetricRegion {
        &self.e
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn inj_bound(&self) -> f64 {
        self.inj_bound
    }

    pub fn volume_b(&self) -> f64 {
        self.surface.pole_ball_volume_unchecked(self.b)
    }

    pub fn volume_d(&self) -> f64 {
        self.surface.pole_ball_volume_unchecked(self.d)
    }

    pub fn volume_e(&self) -> f64 {
        self.surface.region_volume(&self.e).expect("validated region")
    }

    /// `(|B| - |E|)/|D|`, in `(0, 1]`.
    pub fn density(&self) -> f64 {
        (self.volume_b() - self.volume_e()) / self.volume_d()
    }

    /// `min{r₀, inj, π/δ^{1/2}}`.
    pub fn max_radius(&self) -> f64 {
        let model = SpaceForm::surface(self.delta).max_radius();
        self.r0.min(self.inj_bound).min(model)
    }

    pub fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || !(r < self.max_radius()) {
            return Err(Error::domain(format!(
                "radius {r} not in (0, {}) = (0, min(r0, inj, pi/sqrt(delta)))",
                self.max_radius()
            )));
        }
        if self.d + r > self.surface.t_num() {
            return Err(Error::domain(format!(
                "balls of radius {r} about D leave T_num = {}",
                self.surface.t_num()
            )));
        }
        Ok(())
    }

    /// The same scenario with `E` replaced.
    pub fn with_region(&self, e: SymmetricRegion) -> Result<Self> {
        Self::new(self.surface.clone(), e, self.b, self.d, self.r0, self.inj_override)
    }

    pub fn to_config(&self) -> ScenarioConfig {
        ScenarioConfig {
            surface: self.surface.to_config(),
            e: self.e.clone(),
            b: self.b,
            d: self.d,
            r0: self.r0,
            inj: self.inj_override,
        }
    }
}

/// JSON form of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub surface: SurfaceConfig,
    #[serde(rename = "E")]
    pub e: SymmetricRegion,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub r0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inj: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("scenario config: {e}")))
    }

    pub fn build(&self) -> Result<PlacementScenario> {
        PlacementScenario::new(self.surface.build()?, self.e.clone(), self.b, self.d, self.r0, self.inj)
    }
}

/// `Λ(r) = ((|B| - |E|)/|D|) V_δ(r)`.
pub fn lambda_bound(sc: &PlacementScenario, r: f64) -> Result<f64> {
    sc.check_radius(r)?;
    Ok(sc.density() * SpaceForm::surface(sc.delta).ball_volume(r)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessOptions {
    /// Equally spaced radial grid points on `[0, D]`.
    pub grid_density: usize,
    /// Angular positions per radius (all equivalent by symmetry).
    pub angles: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Certification attempts, best screened point first.
    pub max_certify: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            grid_density: 17,
            angles: 1,
            mc_samples: 100_000,
            seed: 0,
            max_certify: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x_t: f64,
    pub x_theta: f64,
    pub measured: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub pass: bool,
    pub grid_points: usize,
}

fn sub_seed(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Candidate centres: a uniform radial grid on `[0, D]` refined at
/// `∂E ± r/2` and `∂E ± r`.
pub fn witness_grid(sc: &PlacementScenario, r: f64, grid_density: usize) -> Vec<f64> {
    let n = grid_density.max(2);
    let mut ts: Vec<f64> = (0..n).map(|k| sc.d * k as f64 / (n - 1) as f64).collect();
    for b in sc.e.boundary_radii() {
        for off in [-r, -0.5 * r, 0.5 * r, r] {
            let t = b + off;
            if (0.0..=sc.d).contains(&t) {
                ts.push(t);
            }
        }
    }
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ts
}

/// Searches the grid for `x` with a certified `|B(x, r) \ E| - 3σ >= Λ(r)`.
pub fn find_witness(sc: &PlacementScenario, r: f64, opts: &WitnessOptions) -> Result<Witness> {
    let lambda = lambda_bound(sc, r)?;
    if opts.mc_samples < 20 || opts.angles == 0 {
        return Err(Error::invalid("witness search needs mc_samples >= 20 and angles >= 1"));
    }
    let ts = witness_grid(sc, r, opts.grid_density);
    let screen = (opts.mc_samples / 10).max(10);
    let mut screened: Vec<(usize, f64, f64, f64)> = Vec::new();
    let mut idx = 0u64;
    for &t in &ts {
        check_ball_radius(&sc.surface, t, r, Some(sc.inj_bound))?;
        for j in 0..opts.angles {
            let theta = TAU * j as f64 / opts.angles as f64;
            let est = mc_estimate(&sc.surface, t, r, &sc.e, screen, sub_seed(opts.seed, idx))?;
            screened.push((idx as usize, t, theta, est.value));
            idx += 1;
        }
    }
    // Stable sort: equal estimates keep grid order.
    screened.sort_by(|a, b| {
        let tie = 1e-12 * a.3.abs().max(b.3.abs());
        if (a.3 - b.3).abs() <= tie {
            a.0.cmp(&b.0)
        } else {
            b.3.total_cmp(&a.3)
        }
    });
    let mut last = None;
    for &(i, t, theta, _) in screened.iter().take(opts.max_certify.max(1)) {
        let est = mc_estimate(&sc.surface, t, r, &sc.e, opts.mc_samples, sub_seed(opts.seed, (1 << 32) + i as u64))?;
        let w = Witness {
            x_t: t,
            x_theta: theta,
            measured: est.value,
            sigma: est.sigma,
            lambda,
            pass: est.value - 3.0 * est.sigma >= lambda,
            grid_points: screened.len(),
        };
        if w.pass {
            return Ok(w);
        }
        last = Some(w);
    }
    let w = last.expect("non-empty grid");
    Err(Error::verification(format!(
        "no certified witness: best estimate {} ± {} against Λ = {lambda}",
        w.measured, w.sigma
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FubiniReport {
    pub mean: f64,
    pub sigma: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Estimates the average of `|B(x, r) \ E|` over `x ∈ D` and compares it
/// with `Λ(r)`.
///
/// The radius of `x` is stratified into `grid_density` equal strata and
/// sampled uniformly within each, with weight `2π D φ(t)/|D|`; one ray of
/// the ball at `x` is sampled per point.
pub fn fubini_average_check(
    sc: &PlacementScenario,
    r: f64,
    grid_density: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<FubiniReport> {
    let bound = lambda_bound(sc, r)?;
    let strata = grid_density.max(1);
    let per = mc_samples / strata;
    if per < 2 {
        return Err(Error::invalid("need at least two samples per stratum"));
    }
    check_ball_radius(&sc.surface, sc.d, r, Some(sc.inj_bound))?;
    let w = &sc.surface;
    let vol_d = sc.volume_d();
    let width = sc.d / strata as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut mean, mut var) = (0.0, 0.0);
    for k in 0..strata {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..per {
            let t = width * (k as f64 + rng.random::<f64>());
            let u: f64 = rng.random();
            let alpha = TAU * rng.random::<f64>();
            let rho = r * u.sqrt();
            let inner = if rho == 0.0 {
                if sc.e.contains(t) { 0.0 } else { PI * r * r }
            } else {
                let (te, j) = ray_endpoint(w, t, alpha, rho)?;
                if sc.e.contains(te) { 0.0 } else { PI * r * r * j / rho }
            };
            let x = TAU * sc.d * w.phi(t) / vol_d * inner;
            sum += x;
            sum_sq += x * x;
        }
        let n = per as f64;
        let m = sum / n;
        let v = ((sum_sq / n - m * m) * n / (n - 1.0)).max(0.0);
        mean += m / strata as f64;
        var += v / n / (strata * strata) as f64;
    }
    let sigma = var.sqrt();
    Ok(FubiniReport {
        mean,
        sigma,
        bound,
        pass: mean >= bound - 3.0 * sigma,
    })
}

/// Monte-Carlo estimate of `|B(x, r) \ E|` at a given centre radius.
pub fn ball_minus_e(sc: &PlacementScenario, t: f64, r: f64, samples: usize, seed: u64) -> Result<BallEstimate> {
    check_ball_radius(&sc.surface, t, r, Some(sc.inj_bound))?;
    mc_estimate(&sc.surface, t, r, &sc.e, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(w: WarpedSurface, e: SymmetricRegion, b: f64, d: f64) -> PlacementScenario {
        PlacementScenario::new(w, e, b, d, 1.0, None).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let s1 = scenario(WarpedSurface::plane(), SymmetricRegion::empty(), 1.0, 3.0);
        assert!((lambda_bound(&s1, 0.5).unwrap() - PI / 36.0).abs() < 1e-15);
        let s2 = scenario(WarpedSurface::plane(), SymmetricRegion::disk(1.0).unwrap(), 2.0, 4.0);
        assert!((lambda_bound(&s2, 0.5).unwrap() - 3.0 * PI / 64.0).abs() < 1e-15);
        let s3 = scenario(WarpedSurface::hyperbolic(), SymmetricRegion::disk(1.0).unwrap(), 2.0, 4.0);
        let (c1, c2, c4, ch) = (1f64.cosh(), 2f64.cosh(), 4f64.cosh(), 0.5f64.cosh());
        let expect = (c2 - c1) / (c4 - 1.0) * TAU * (ch - 1.0);
        assert!((lambda_bound(&s3, 0.5).unwrap() - expect).abs() < 1e-14);
        assert!((expect - 0.067_640_537_7).abs() < 1e-9);
    }

    #[test]
    fn scenario_validation() {
        let w = WarpedSurface::plane();
        let e = SymmetricRegion::disk(2.0).unwrap();
        assert!(PlacementScenario::new(w.clone(), e, 2.0, 4.0, 1.0, None).is_err());
        assert!(PlacementScenario::new(w.clone(), SymmetricRegion::empty(), 2.0, 2.5, 1.0, None).is_err());
        let s = scenario(w, SymmetricRegion::empty(), 1.0, 3.0);
        assert!(lambda_bound(&s, 1.0).is_err());
        assert!(lambda_bound(&s, 0.0).is_err());
    }

    #[test]
    fn cigar_caps_radius_by_conjugate_bound() {
        let s = PlacementScenario::new(WarpedSurface::cigar(), SymmetricRegion::empty(), 1.0, 3.5, 2.4, None).unwrap();
        assert!((s.delta() - 2.0).abs() < 1e-15);
        assert!((s.max_radius() - PI / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn flat_witnesses() {
        let opts = WitnessOptions {
            mc_samples: 2000,
            ..WitnessOptions::default()
        };
        let s1 = scenario(WarpedSurface::plane(), SymmetricRegion::empty(), 1.0, 3.0);
        let w = find_witness(&s1, 0.5, &opts).unwrap();
        assert_eq!(w.x_t, 0.0);
        assert!((w.measured - PI / 4.0).abs() < 1e-12);
        let s2 = scenario(WarpedSurface::plane(), SymmetricRegion::disk(1.0).unwrap(), 2.0, 4.0);
        let w = find_witness(&s2, 0.5, &opts).unwrap();
        assert!(w.x_t >= 1.5 - 1e-12);
        assert!((w.measured - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn flat_empty_average_is_exact() {
        let s = scenario(WarpedSurface::plane(), SymmetricRegion::empty(), 1.0, 3.0);
        let f = fubini_average_check(&s, 0.5, 8, 8000, 1).unwrap();
        assert!(f.pass);
        // The weight φ(t) is random, so only the mean is exact.
        assert!((f.mean - PI / 4.0).abs() <= 4.0 * f.sigma);
    }

    #[test]
    fn scenario_json_round_trip() {
        let text = r#"{"surface": {"catalog": "plane"}, "E": [[0.0, 1.0]], "B": 2.0, "D": 4.0, "r0": 1.0}"#;
        let c = ScenarioConfig::from_json(text).unwrap();
        let s = c.build().unwrap();
        assert!((lambda_bound(&s, 0.5).unwrap() - 3.0 * PI / 64.0).abs() < 1e-15);
        assert!(ScenarioConfig::from_json(r#"{"surface": {"catalog": "plane"}}"#).is_err());
    }
}
