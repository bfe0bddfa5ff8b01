//! Monotonicity and continuity checks on sampled profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::warped_surface::WarpedSurface;

use super::candidates::sublevel_profile_candidates;
use super::linear_grid;

/// Relative slack for monotonicity comparisons.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub points: usize,
    pub monotone: bool,
    /// Largest `I_j - I_{j+1}` (positive means a decrease).
    pub worst_decrease: f64,
    pub max_jump: f64,
    /// Largest difference quotient, a discrete modulus of continuity.
    pub max_slope: f64,
    pub pass: bool,
}

/// Non-decrease and discrete continuity of `(v, I)` samples with strictly
/// increasing `v`.
pub fn monotone_continuity_report(curve: &[(f64, f64)]) -> Result<ContinuityReport> {
    if curve.len() < 2 {
        return Err(Error::invalid("need at least two profile samples"));
    }
    if curve.windows(2).any(|p| !(p[1].0 > p[0].0)) {
        return Err(Error::invalid("volumes must be strictly increasing"));
    }
    if curve.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::numerical("non-finite profile value"));
    }
    let mut worst_decrease = f64::NEG_INFINITY;
    let mut max_jump: f64 = 0.0;
    let mut max_slope: f64 = 0.0;
    let mut monotone = true;
    for p in curve.windows(2) {
        let (d_v, d_i) = (p[1].0 - p[0].0, p[1].1 - p[0].1);
        worst_decrease = worst_decrease.max(-d_i);
        if d_i < -MONOTONE_TOLERANCE * p[0].1.abs() {
            monotone = false;
        }
        max_jump = max_jump.max(d_i.abs());
        max_slope = max_slope.max(d_i.abs() / d_v);
    }
    Ok(ContinuityReport {
        points: curve.len(),
        monotone,
        worst_decrease,
        max_jump,
        max_slope,
        pass: monotone && max_slope.is_finite(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub coarse: ContinuityReport,
    pub fine: ContinuityReport,
    /// `fine.max_jump / coarse.max_jump`; about `1/2` for a continuous
    /// profile.
    pub ratio: f64,
    pub pass: bool,
}

/// Accepted band for the jump ratio under halving of the grid step.
pub const REFINEMENT_BAND: (f64, f64) = (0.35, 0.65);

/// Samples `profile` on `n` and `2n - 1` equally spaced volumes in
/// `[lo, hi]` and compares the largest jumps.
pub fn refinement_report<F>(profile: F, lo: f64, hi: f64, n: usize) -> Result<RefinementReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let sample = |k: usize| -> Result<Vec<(f64, f64)>> {
        linear_grid(lo, hi, k)?
            .into_iter()
            .map(|v| Ok((v, profile(v)?)))
            .collect()
    };
    let coarse = monotone_continuity_report(&sample(n)?)?;
    let fine = monotone_continuity_report(&sample(2 * n - 1)?)?;
    let ratio = if coarse.max_jump > 0.0 { fine.max_jump / coarse.max_jump } else { f64::NAN };
    let pass = coarse.pass && fine.pass && ratio >= REFINEMENT_BAND.0 && ratio <= REFINEMENT_BAND.1;
    Ok(RefinementReport { coarse, fine, ratio, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictMonotonicityReport {
    pub rho: f64,
    pub volumes: Vec<f64>,
    pub values: Vec<f64>,
    /// Smallest relative increment `(I_{j+1} - I_j)/I_j`.
    pub min_relative_increment: f64,
    pub worst_index: usize,
    pub pass: bool,
}

/// Strict increase of the candidate profile of `C_ρ` along `v_grid`.
pub fn strict_monotonicity_check(w: &WarpedSurface, rho: f64, v_grid: &[f64]) -> Result<StrictMonotonicityReport> {
    if v_grid.len() < 2 || v_grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::invalid("need a strictly increasing grid of at least two volumes"));
    }
    let values = v_grid
        .iter()
        .map(|&v| Ok(sublevel_profile_candidates(w, rho, v)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let (worst_index, min_relative_increment, pass) = strict_increase(&values);
    Ok(StrictMonotonicityReport {
        rho,
        volumes: v_grid.to_vec(),
        values,
        min_relative_increment,
        worst_index,
        pass,
    })
}

/// Index and size of the smallest relative increment of `values`, and
/// whether every increment exceeds [`MONOTONE_TOLERANCE`].
pub fn strict_increase(values: &[f64]) -> (usize, f64, bool) {
    let (i, inc) = values
        .windows(2)
        .map(|p| (p[1] - p[0]) / p[0].abs())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::INFINITY));
    (i, inc, inc > MONOTONE_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::disk_profile;
    use std::f64::consts::PI;

    #[test]
    fn detects_decrease() {
        let r = monotone_continuity_report(&[(1.0, 2.0), (2.0, 3.0), (3.0, 2.5)]).unwrap();
        assert!(!r.monotone && !r.pass);
        assert!((r.worst_decrease - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tolerates_roundoff() {
        let r = monotone_continuity_report(&[(1.0, 2.0), (2.0, 2.0 - 1e-12)]).unwrap();
        assert!(r.monotone);
    }

    #[test]
    fn rejects_unsorted_volumes() {
        assert!(monotone_continuity_report(&[(2.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn disk_profile_refines_like_a_continuous_curve() {
        let w = WarpedSurface::plane();
        let r = refinement_report(|v| disk_profile(&w, v), 1.0, 3.0, 21).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn step_function_fails_refinement() {
        let r = refinement_report(|v| Ok(if v < 1.5 { 1.0 } else { 2.0 + v }), 1.0, 2.0, 11).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn plane_profile_is_strictly_increasing() {
        let w = WarpedSurface::plane();
        let grid = linear_grid(0.1 * PI, 0.9 * PI, 6).unwrap();
        let r = strict_monotonicity_check(&w, 1.0, &grid).unwrap();
        assert!(r.pass);
    }
}
