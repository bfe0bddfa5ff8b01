//! Isoperimetric profiles: the pole-disk profile, candidate profiles of the
//! sublevel balls `C_ρ`, their infimum over an exhaustion schedule, and the
//! truncate-and-compensate construction.

pub mod candidates;
pub mod checks;
pub mod compensate;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exhaustion::ExhaustionSpec;
use crate::warped_surface::WarpedSurface;

pub use candidates::{sublevel_profile_candidates, CandidateEvaluation, CandidateKind, CandidateRegion};
pub use checks::{
    monotone_continuity_report, refinement_report, strict_increase, strict_monotonicity_check, ContinuityReport, RefinementReport,
    StrictMonotonicityReport,
};
pub use compensate::{truncate_and_compensate, CompensateOptions, Compensation};

/// Fraction of `|C_ρ|` kept clear of both ends in sweeps.
pub const SWEEP_CLIP: f64 = 1e-4;

/// Levels in the default exhaustion schedule.
pub const DEFAULT_LEVELS: usize = 32;

/// Perimeter `2πφ(R)` of the pole disk of volume `v`.
pub fn disk_profile(w: &WarpedSurface, v: f64) -> Result<f64> {
    Ok(TAU * w.phi(w.radius_for_volume(v)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Disk,
    Sublevel,
    InfOverR,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Disk => "disk",
            ProfileKind::Sublevel => "sublevel",
            ProfileKind::InfOverR => "inf_over_r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub v: f64,
    pub value: f64,
    /// Radius of the sublevel ball the value was taken in.
    pub rho: Option<f64>,
    pub candidate: CandidateKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub surface: String,
    pub kind: ProfileKind,
    pub points: Vec<ProfilePoint>,
    /// Some point came from a partial candidate evaluation.
    pub partial: bool,
}

impl ProfileCurve {
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.v, p.value)).collect()
    }
}

fn check_grid(v_grid: &[f64]) -> Result<()> {
    if v_grid.is_empty() {
        return Err(Error::invalid("empty volume grid"));
    }
    if v_grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::invalid("volumes must be positive and finite"));
    }
    if v_grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::invalid("volume grid must be strictly increasing"));
    }
    Ok(())
}

/// `n` equally spaced volumes on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return Err(Error::invalid(format!("grid needs n >= 2 and lo < hi (got {n}, {lo}, {hi})")));
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

pub fn disk_profile_curve(w: &WarpedSurface, v_grid: &[f64]) -> Result<ProfileCurve> {
    check_grid(v_grid)?;
    let points = v_grid
        .iter()
        .map(|&v| {
            let r = w.radius_for_volume(v)?;
            Ok(ProfilePoint {
                v,
                value: TAU * w.phi(r),
                rho: None,
                candidate: CandidateKind::PoleDisk { radius: r },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileCurve {
        surface: w.name().into(),
        kind: ProfileKind::Disk,
        points,
        partial: false,
    })
}

/// Candidate profile of `C_ρ` on a volume grid, clipped to
/// `[SWEEP_CLIP, 1 - SWEEP_CLIP]·|C_ρ|` (duplicates after clipping dropped).
pub fn sublevel_sweep(w: &WarpedSurface, rho: f64, v_grid: &[f64]) -> Result<ProfileCurve> {
    check_grid(v_grid)?;
    let cap = w.pole_ball_volume(rho)?;
    let (lo, hi) = (SWEEP_CLIP * cap, (1.0 - SWEEP_CLIP) * cap);
    let mut vs: Vec<f64> = v_grid.iter().map(|v| v.clamp(lo, hi)).collect();
    vs.dedup();
    let mut points = Vec::with_capacity(vs.len());
    let mut partial = false;
    for v in vs {
        let ev = sublevel_profile_candidates(w, rho, v)?;
        partial |= ev.partial;
        points.push(ProfilePoint {
            v,
            value: ev.value,
            rho: Some(rho),
            candidate: ev.best.kind,
        });
    }
    Ok(ProfileCurve {
        surface: w.name().into(),
        kind: ProfileKind::Sublevel,
        points,
        partial,
    })
}

/// Default sublevel radii for volume `v`: `R_v·4^{k/(n-1)}`, `k = 0..n`,
/// capped at `T_num`, where `R_v` is the pole-disk radius of volume `v`.
pub fn default_radius_schedule(w: &WarpedSurface, v: f64, n: usize) -> Result<Vec<f64>> {
    let r_v = w.radius_for_volume(v)?;
    let n = n.max(2);
    let mut out: Vec<f64> = (0..n)
        .map(|k| (r_v * 4f64.powf(k as f64 / (n - 1) as f64)).min(w.t_num()))
        .collect();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelValue {
    /// Exhaustion level.
    pub r: f64,
    pub rho: f64,
    pub value: f64,
    pub candidate: CandidateKind,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfOverR {
    pub v: f64,
    pub value: f64,
    pub r_best: f64,
    pub rho_best: f64,
    pub candidate: CandidateKind,
    pub levels: Vec<LevelValue>,
    /// Levels whose sublevel ball cannot hold volume `v`.
    pub skipped: usize,
    /// The valid level values are non-increasing in `r`.
    pub monotone: bool,
    /// The last two valid levels agree to `1e-9` relative.
    pub stabilized: bool,
}

/// `inf_r I_r(v)` over sublevel radii `radii` (ascending), computed from the
/// candidate profiles. Radii whose ball has volume at most `v` are skipped.
pub fn inf_over_r(spec: &ExhaustionSpec, v: f64, radii: &[f64]) -> Result<InfOverR> {
    let w = spec.surface();
    if radii.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::invalid("sublevel radii must be strictly increasing"));
    }
    let mut levels = Vec::new();
    let mut skipped = 0;
    for &rho in radii {
        if !(w.pole_ball_volume(rho)? > v) {
            skipped += 1;
            continue;
        }
        let ev = sublevel_profile_candidates(w, rho, v)?;
        levels.push(LevelValue {
            r: spec.level_for_radius(rho),
            rho,
            value: ev.value,
            candidate: ev.best.kind,
            partial: ev.partial,
        });
    }
    let Some(best) = levels.iter().copied().min_by(|a, b| a.value.total_cmp(&b.value)) else {
        return Err(Error::domain(format!(
            "no sublevel ball in the schedule holds volume {v} (largest radius {:?})",
            radii.last()
        )));
    };
    let monotone = levels
        .windows(2)
        .all(|p| p[1].value <= p[0].value * (1.0 + 1e-9));
    let stabilized = match levels.as_slice() {
        [.., a, b] => (a.value - b.value).abs() <= 1e-9 * b.value.abs(),
        _ => false,
    };
    Ok(InfOverR {
        v,
        value: best.value,
        r_best: best.r,
        rho_best: best.rho,
        candidate: best.candidate,
        levels,
        skipped,
        monotone,
        stabilized,
    })
}

/// [`inf_over_r`] on a volume grid, each volume with its default schedule
/// of `levels` sublevel radii.
pub fn inf_over_r_curve(spec: &ExhaustionSpec, v_grid: &[f64], levels: usize) -> Result<ProfileCurve> {
    check_grid(v_grid)?;
    let w = spec.surface();
    let mut points = Vec::with_capacity(v_grid.len());
    let mut partial = false;
    for &v in v_grid {
        let sched = default_radius_schedule(w, v, levels)?;
        let res = inf_over_r(spec, v, &sched)?;
        partial |= res.levels.iter().any(|l| l.partial);
        points.push(ProfilePoint {
            v,
            value: res.value,
            rho: Some(res.rho_best),
            candidate: res.candidate,
        });
    }
    Ok(ProfileCurve {
        surface: w.name().into(),
        kind: ProfileKind::InfOverR,
        points,
        partial,
    })
}
