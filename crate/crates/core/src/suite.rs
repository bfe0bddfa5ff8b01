//! The acceptance suite: one function per criterion, shared by the
//! `verify-all` command and the acceptance tests.

use std::f64::consts::{PI, SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ball_placement::{fubini_average_check, find_witness, lambda_bound, PlacementScenario, WitnessOptions};
use crate::error::Result;
use crate::exhaustion::{
    build_sqrt_exhaustion, default_level_grid, gradient_norm, greene_wu_sandwich, verify_strict_convexity,
    ConvexityOptions,
};
use crate::monotone_limits::remark_demo;
use crate::profile::{
    default_radius_schedule, disk_profile, inf_over_r, linear_grid, refinement_report,
    strict_increase, strict_monotonicity_check, sublevel_profile_candidates, truncate_and_compensate,
    CompensateOptions,
};
use crate::space_forms::SpaceForm;
use crate::warped_surface::{SymmetricRegion, WarpedSurface};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub mc_samples: usize,
    pub geodesics: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20240601,
            mc_samples: 100_000,
            geodesics: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub pass: bool,
    pub summary: String,
    pub details: Value,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.summary
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub criteria: Vec<CriterionReport>,
    pub pass: bool,
}

pub const CRITERIA: u32 = 11;

fn report(id: u32, title: &str, pass: bool, summary: String, details: Value) -> CriterionReport {
    CriterionReport {
        id,
        title: title.into(),
        pass,
        summary,
        details,
    }
}

fn err_report(id: u32, title: &str, e: crate::Error) -> CriterionReport {
    report(id, title, false, format!("error: {e}"), json!({ "error": e.to_string() }))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Runs criterion `id`; errors are folded into a failing report.
pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> CriterionReport {
    let (title, res) = match id {
        1 => ("space-form consistency", space_form_consistency(cfg)),
        2 => ("profile oracle equality", oracle_equality(cfg)),
        3 => ("domain monotonicity", domain_monotonicity(cfg)),
        4 => ("strict monotonicity of I_r", strict_monotonicity(cfg)),
        5 => ("continuity suite", continuity_suite(cfg)),
        6 => ("ball placement witness", placement_witness(cfg)),
        7 => ("hyperbolic exhaustion", hyperbolic_exhaustion(cfg)),
        8 => ("cigar exhaustion", cigar_exhaustion(cfg)),
        9 => ("monotone limits", monotone_limits(cfg)),
        10 => ("truncate and compensate", truncate_compensate(cfg)),
        11 => ("determinism", determinism(cfg)),
        _ => ("unknown", Err(crate::Error::invalid(format!("no criterion {id}")))),
    };
    match res {
        Ok((pass, summary, details)) => report(id, title, pass, summary, details),
        Err(e) => err_report(id, title, e),
    }
}

pub fn run_suite(cfg: &SuiteConfig, ids: &[u32]) -> SuiteReport {
    let criteria: Vec<CriterionReport> = ids.iter().map(|&id| run_criterion(id, cfg)).collect();
    let pass = criteria.iter().all(|c| c.pass);
    SuiteReport {
        config: *cfg,
        criteria,
        pass,
    }
}

type Outcome = Result<(bool, String, Value)>;

fn space_form_consistency(cfg: &SuiteConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x01);
    let (mut worst_q, mut worst_fd) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let delta = -4.0 + 8.0 * rng.random::<f64>();
        let sf = SpaceForm::surface(delta);
        let r_max = if delta > 0.0 { 0.95 * sf.max_radius() } else { 3.0 };
        let r = r_max * (0.01 + 0.99 * rng.random::<f64>());
        let closed = sf.ball_volume(r)?;
        let quad = sf.ball_volume_quadrature(r)?;
        let h = 1e-4 * r;
        let fd = (sf.ball_volume(r - 2.0 * h)? - 8.0 * sf.ball_volume(r - h)? + 8.0 * sf.ball_volume(r + h)?
            - sf.ball_volume(r + 2.0 * h)?)
            / (12.0 * h);
        let area = sf.ball_area(r)?;
        worst_q = worst_q.max(rel(quad, closed));
        worst_fd = worst_fd.max(rel(fd, area));
    }
    let pass = worst_q <= 1e-9 && worst_fd <= 1e-6;
    Ok((
        pass,
        format!("100 pairs, quadrature rel err {worst_q:.2e} (<= 1e-9), dV/dr rel err {worst_fd:.2e} (<= 1e-6)"),
        json!({ "pairs": 100, "max_quadrature_rel_err": worst_q, "max_fd_rel_err": worst_fd }),
    ))
}

/// Sublevel radii for the inf-over-r checks: eight geometric levels from the
/// pole-disk radius to four times it.
const CHECK_LEVELS: usize = 8;

fn oracle_equality(_cfg: &SuiteConfig) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for (w, delta) in [(WarpedSurface::plane(), 0.0), (WarpedSurface::hyperbolic(), -1.0)] {
        let spec = build_sqrt_exhaustion(&w)?;
        let sf = SpaceForm::surface(delta);
        for v in linear_grid(0.5, 20.0, 20)? {
            let oracle = sf.profile(v)?;
            let sched = default_radius_schedule(&w, v, CHECK_LEVELS)?;
            let res = inf_over_r(&spec, v, &sched)?;
            // Every level that holds the optimal ball must equal the oracle.
            let r_opt = sf.inverse_volume(v)?;
            let level_err = res
                .levels
                .iter()
                .filter(|l| l.rho >= r_opt)
                .map(|l| rel(l.value, oracle))
                .fold(0.0, f64::max);
            let e = rel(res.value, oracle).max(level_err);
            worst = worst.max(e);
            pass &= e <= 1e-8 && res.monotone && res.stabilized;
        }
        let (v, expect) = if delta == 0.0 {
            (PI, TAU)
        } else {
            (TAU * (1f64.cosh() - 1.0), TAU * 1f64.sinh())
        };
        let res = inf_over_r(&spec, v, &default_radius_schedule(&w, v, CHECK_LEVELS)?)?;
        let e = rel(res.value, expect);
        pass &= e <= 1e-8;
        details.push(json!({ "surface": w.name(), "v": v, "value": res.value, "expected": expect, "rel_err": e }));
    }
    Ok((
        pass,
        format!("plane and hyperbolic, 20 volumes each: worst rel err {worst:.2e} (<= 1e-8)"),
        json!({ "worst_rel_err": worst, "worked_examples": details }),
    ))
}

fn domain_monotonicity(_cfg: &SuiteConfig) -> Outcome {
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut details = Vec::new();
    for w in WarpedSurface::all_catalog() {
        let rho_min = 1.0;
        let levels: Vec<f64> = (0..8).map(|k| rho_min * 2f64.powf(k as f64 / 7.0)).collect();
        let cap = w.pole_ball_volume(rho_min)?;
        let mut surface_worst = f64::NEG_INFINITY;
        for k in 0..10 {
            let v = cap * (0.05 + 0.9 * k as f64 / 9.0);
            let mut prev = f64::INFINITY;
            for &rho in &levels {
                let value = sublevel_profile_candidates(&w, rho, v)?.value;
                if prev.is_finite() {
                    surface_worst = surface_worst.max((value - prev) / prev);
                }
                prev = value;
            }
        }
        pass &= surface_worst <= 1e-9;
        worst = worst.max(surface_worst);
        details.push(json!({ "surface": w.name(), "max_relative_increase": surface_worst }));
    }
    Ok((
        pass,
        format!("4 surfaces x 10 volumes x 8 levels: largest relative increase in r {worst:.2e} (<= 1e-9)"),
        json!({ "surfaces": details }),
    ))
}

fn strict_monotonicity(_cfg: &SuiteConfig) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let mut plane_values = Vec::new();
    for w in [WarpedSurface::plane(), WarpedSurface::hyperbolic(), WarpedSurface::cigar()] {
        let cap = w.pole_ball_volume(1.0)?;
        let grid = linear_grid(0.05 * cap, 0.99 * cap, 50)?;
        let r = strict_monotonicity_check(&w, 1.0, &grid)?;
        pass &= r.pass;
        if w.name() == "plane" {
            plane_values = r.values.clone();
        }
        details.push(json!({
            "surface": w.name(),
            "min_relative_increment": r.min_relative_increment,
            "pass": r.pass,
        }));
    }
    let mut corrupted = plane_values;
    corrupted[25] = corrupted[24] * (1.0 - 1e-3);
    let (_, control_inc, control_pass) = strict_increase(&corrupted);
    pass &= !control_pass;
    Ok((
        pass,
        format!(
            "plane, hyperbolic, cigar at rho = 1 strictly increasing on 50 volumes; corrupted control {}",
            if control_pass { "accepted" } else { "rejected" }
        ),
        json!({ "surfaces": details, "control_min_relative_increment": control_inc, "control_rejected": !control_pass }),
    ))
}

fn continuity_suite(_cfg: &SuiteConfig) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let mut ratios = Vec::new();
    for w in WarpedSurface::all_catalog() {
        let spec = build_sqrt_exhaustion(&w)?;
        let (lo, hi) = (0.5, 10.0);
        let disk = refinement_report(|v| disk_profile(&w, v), lo, hi, 21)?;
        let inf = refinement_report(
            |v| Ok(inf_over_r(&spec, v, &default_radius_schedule(&w, v, CHECK_LEVELS)?)?.value),
            lo,
            hi,
            11,
        )?;
        pass &= disk.pass && inf.pass;
        ratios.push(disk.ratio);
        ratios.push(inf.ratio);
        details.push(json!({
            "surface": w.name(),
            "disk": { "ratio": disk.ratio, "max_slope": disk.fine.max_slope, "pass": disk.pass },
            "inf_over_r": { "ratio": inf.ratio, "max_slope": inf.fine.max_slope, "pass": inf.pass },
        }));
    }
    let (rmin, rmax) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
    Ok((
        pass,
        format!("disk and inf-over-r curves on 4 surfaces monotone; jump ratios in [{rmin:.3}, {rmax:.3}] (band 0.35..0.65)"),
        json!({ "surfaces": details }),
    ))
}

fn placement_witness(cfg: &SuiteConfig) -> Outcome {
    let r = 0.5;
    let (c1, c2, c4, ch) = (1f64.cosh(), 2f64.cosh(), 4f64.cosh(), 0.5f64.cosh());
    let scenarios = [
        (
            "plane, E empty, B(1), D(3)",
            PlacementScenario::new(WarpedSurface::plane(), SymmetricRegion::empty(), 1.0, 3.0, 1.0, None)?,
            PI / 36.0,
        ),
        (
            "plane, E = B(1), B(2), D(4)",
            PlacementScenario::new(WarpedSurface::plane(), SymmetricRegion::disk(1.0)?, 2.0, 4.0, 1.0, None)?,
            3.0 * PI / 64.0,
        ),
        (
            "hyperbolic, E = B(1), B(2), D(4)",
            PlacementScenario::new(WarpedSurface::hyperbolic(), SymmetricRegion::disk(1.0)?, 2.0, 4.0, 1.0, None)?,
            (c2 - c1) / (c4 - 1.0) * TAU * (ch - 1.0),
        ),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (k, (name, sc, expect)) in scenarios.iter().enumerate() {
        let lambda = lambda_bound(sc, r)?;
        let lambda_ok = rel(lambda, *expect) <= 1e-6;
        let opts = WitnessOptions {
            mc_samples: cfg.mc_samples,
            seed: cfg.seed.wrapping_add(k as u64),
            ..WitnessOptions::default()
        };
        let (witness_pass, witness) = match find_witness(sc, r, &opts) {
            Ok(wt) => (wt.pass, json!(wt)),
            Err(e) if e.is_verification() => (false, json!({ "error": e.to_string() })),
            Err(e) => return Err(e),
        };
        let fub = fubini_average_check(sc, r, 16, cfg.mc_samples, cfg.seed.wrapping_add(100 + k as u64))?;
        pass &= lambda_ok && witness_pass && fub.pass;
        details.push(json!({
            "scenario": name,
            "lambda": lambda,
            "lambda_expected": expect,
            "witness": witness,
            "fubini": fub,
        }));
    }
    Ok((
        pass,
        format!("3 scenarios at r = 0.5 with {} samples: witnesses, Fubini averages and closed-form bounds", cfg.mc_samples),
        json!({ "scenarios": details }),
    ))
}

fn hyperbolic_exhaustion(cfg: &SuiteConfig) -> Outcome {
    let spec = build_sqrt_exhaustion(&WarpedSurface::hyperbolic())?;
    let opts = ConvexityOptions {
        geodesics: cfg.geodesics,
        seed: cfg.seed,
        ..ConvexityOptions::default()
    };
    let conv = verify_strict_convexity(&spec, &opts)?;
    let ds: Vec<f64> = (0..=1000).map(|k| 0.1 * k as f64).collect();
    let g: Vec<f64> = ds.iter().map(|&d| gradient_norm(d)).collect();
    let grad_ok = g.iter().all(|&x| x <= SQRT_2) && g.windows(2).all(|p| p[1] > p[0]);
    let grad_gap = SQRT_2 - g[g.len() - 1];
    let sandwich = greene_wu_sandwich(&spec, &default_level_grid(&spec)?);
    let (sandwich_ok, sandwich_json) = match &sandwich {
        Ok(s) => (s.pass, json!({ "l": s.l, "k": s.k, "pass": s.pass })),
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    let margin = conv.min_hessian_margin.unwrap_or(f64::NAN);
    let pass = conv.pass && grad_ok && sandwich_ok;
    Ok((
        pass,
        format!(
            "{} geodesics: min(second difference - stated Hessian bound) = {margin:.4e} (needs >= -1e-4), \
             min(second difference - radial second derivative) = {:.4e}; gradient <= sqrt 2 increasing: {grad_ok}; sandwich: {sandwich_ok}",
            conv.geodesic_count,
            conv.min_radial_margin.unwrap_or(f64::NAN)
        ),
        json!({
            "convexity": conv,
            "gradient": { "monotone_below_sqrt2": grad_ok, "gap_at_d_100": grad_gap },
            "sandwich": sandwich_json,
        }),
    ))
}

fn cigar_exhaustion(cfg: &SuiteConfig) -> Outcome {
    let w = WarpedSurface::cigar();
    let spec = build_sqrt_exhaustion(&w)?;
    let opts = ConvexityOptions {
        geodesics: cfg.geodesics,
        seed: cfg.seed ^ 0x08,
        ..ConvexityOptions::default()
    };
    let conv = verify_strict_convexity(&spec, &opts)?;
    let (min_div, at) = spec.min_level_divergence(2000)?;
    let v_hi = w.pole_ball_volume(8.0)?;
    let vs = linear_grid(0.1, v_hi, 50)?;
    let values = vs.iter().map(|&v| disk_profile(&w, v)).collect::<Result<Vec<f64>>>()?;
    let strictly = values.windows(2).all(|p| p[1] > p[0]);
    let below = values.iter().all(|&x| x < TAU);
    let pass = conv.pass && !conv.bound_checked && min_div > 0.0 && strictly && below;
    Ok((
        pass,
        format!(
            "{} geodesics, min second difference {:.4e}; min level divergence {min_div:.4e} at t = {at:.3}; \
             disk profile strictly increasing below 2 pi: {}",
            conv.geodesic_count,
            conv.min_second_difference,
            strictly && below
        ),
        json!({
            "convexity": conv,
            "min_level_divergence": min_div,
            "at": at,
            "disk_profile": { "strictly_increasing": strictly, "below_two_pi": below, "last": values[values.len() - 1] },
        }),
    ))
}

fn monotone_limits(_cfg: &SuiteConfig) -> Outcome {
    let d = remark_demo(1000)?;
    let left_gap = *d.left.gaps.last().expect("probes");
    let pass = d.right.pass && !d.left.pass && left_gap == 1.0 && d.limit_is_indicator;
    Ok((
        pass,
        format!(
            "right continuity at 0: {}; left gap {left_gap}; limit on {} points is the indicator: {}",
            if d.right.pass { "pass" } else { "fail" },
            d.grid_points,
            d.limit_is_indicator
        ),
        json!(d),
    ))
}

fn truncate_compensate(cfg: &SuiteConfig) -> Outcome {
    let sc = PlacementScenario::new(WarpedSurface::plane(), SymmetricRegion::disk(1.01)?, 2.0, 4.0, 1.0, None)?;
    let opts = CompensateOptions {
        witness: WitnessOptions {
            mc_samples: cfg.mc_samples,
            seed: cfg.seed,
            ..WitnessOptions::default()
        },
        ..CompensateOptions::default()
    };
    let c = truncate_and_compensate(&sc, 1.0, &opts)?;
    let vol_e = PI * 1.01 * 1.01;
    let vol_err = rel(c.volume, vol_e);
    let derived = TAU * (1.0 + 0.0201f64.sqrt());
    let exact = c.exact_perimeter.unwrap_or(f64::NAN);
    let cert_err = (c.certificate - derived).abs();
    let dominates = c.certificate >= exact * (1.0 - 1e-12);
    let pass = vol_err <= 1e-8 && cert_err <= 1e-6 && dominates;
    Ok((
        pass,
        format!(
            "|F| rel err {vol_err:.2e}; certificate {:.9} vs 2 pi (1 + sqrt 0.0201) = {derived:.9}; exact perimeter {exact:.9}",
            c.certificate
        ),
        json!({ "compensation": c, "derived_certificate": derived, "volume_rel_err": vol_err }),
    ))
}

/// Two seeded runs of the Monte Carlo and geodesic sampling components
/// serialize identically.
fn determinism(cfg: &SuiteConfig) -> Outcome {
    let run = || -> Result<String> {
        let sc = PlacementScenario::new(WarpedSurface::hyperbolic(), SymmetricRegion::disk(1.0)?, 2.0, 4.0, 1.0, None)?;
        let opts = WitnessOptions {
            mc_samples: 20_000,
            seed: cfg.seed,
            ..WitnessOptions::default()
        };
        let wt = find_witness(&sc, 0.5, &opts)?;
        let fub = fubini_average_check(&sc, 0.5, 8, 20_000, cfg.seed)?;
        let spec = build_sqrt_exhaustion(&WarpedSurface::hyperbolic())?;
        let conv = verify_strict_convexity(
            &spec,
            &ConvexityOptions {
                geodesics: 5,
                seed: cfg.seed,
                ..ConvexityOptions::default()
            },
        )?;
        Ok(serde_json::to_string(&json!({ "witness": wt, "fubini": fub, "convexity": conv })).expect("serializable"))
    };
    let (a, b) = (run()?, run()?);
    let pass = a == b;
    Ok((
        pass,
        format!("two seeded runs of witness, Fubini and convexity sampling {}", if pass { "identical" } else { "differ" }),
        json!({ "bytes": a.len(), "identical": pass }),
    ))
}
