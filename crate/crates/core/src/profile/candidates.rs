//! Candidate regions inside a closed pole ball `C_ρ` and their total
//! perimeters (the part of the boundary lying on `∂C_ρ` counts).
//!
//! The boundary bite removes from `C_ρ` the cap cut off by an arc of
//! constant geodesic curvature `h`, symmetric about `θ = 0`, whose point
//! closest to the pole (the anchor) is at radius `t_a`. The half arc is
//! shot from the anchor with heading `ψ = π/2` until it meets `∂C_ρ` at
//! angle `θ_exit` after length `s_exit`; with `A = ∫ Φ dθ` along it,
//!
//! ```text
//! |cap|  = 2 (Φ(ρ) θ_exit - A)
//! |bite| = 2π Φ(ρ) - |cap|
//! P      = 2 s_exit + φ(ρ) (2π - 2 θ_exit)
//! ```
//!
//! The bite volume decreases in `h`. Shots whose radius falls back below the
//! anchor, or whose exit angle reaches `π`, have too much curvature; shots
//! whose heading reaches `-π/2` before the boundary have too little.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Integrator, OdeOptions};
use crate::space_forms::SpaceForm;
use crate::warped_surface::geodesic::arc_rhs;
use crate::warped_surface::WarpedSurface;

/// Relative tolerance within which a competitor does not displace the pole
/// disk.
pub const TIE_TOLERANCE: f64 = 1e-7;

/// Relative volume mismatch allowed for a shot candidate.
pub const VOLUME_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CandidateKind {
    PoleDisk { radius: f64 },
    InteriorBall { center_t: f64, radius: f64 },
    BoundaryBite { h: f64, anchor_t: f64, theta_exit: f64 },
    ComplementAnnulus { inner: f64 },
    FullSublevel,
}

impl CandidateKind {
    pub fn name(&self) -> &'static str {
        match self {
            CandidateKind::PoleDisk { .. } => "pole_disk",
            CandidateKind::InteriorBall { .. } => "interior_ball",
            CandidateKind::BoundaryBite { .. } => "boundary_bite",
            CandidateKind::ComplementAnnulus { .. } => "complement_annulus",
            CandidateKind::FullSublevel => "full_sublevel",
        }
    }

    /// Radius for disks and balls, inner radius for annuli, curvature for
    /// bites.
    pub fn param(&self) -> f64 {
        match *self {
            CandidateKind::PoleDisk { radius } => radius,
            CandidateKind::InteriorBall { radius, .. } => radius,
            CandidateKind::BoundaryBite { h, .. } => h,
            CandidateKind::ComplementAnnulus { inner } => inner,
            CandidateKind::FullSublevel => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateRegion {
    pub kind: CandidateKind,
    pub volume: f64,
    pub perimeter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEvaluation {
    pub rho: f64,
    pub v: f64,
    pub value: f64,
    pub best: CandidateRegion,
    pub candidates: Vec<CandidateRegion>,
    /// A candidate family failed numerically (not merely infeasible).
    pub partial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Shot {
    Hit { bite_volume: f64, perimeter: f64, theta_exit: f64 },
    TooHigh,
    TooLow,
}

fn shot_options() -> OdeOptions<f64> {
    OdeOptions::default().with_rtol(1e-10).with_h_max(0.25)
}

/// Shoots the half arc of curvature `h` from the anchor `t_a`.
pub(crate) fn bite_shot(w: &WarpedSurface, rho: f64, t_a: f64, h: f64) -> Result<Shot> {
    let big_phi_rho = w.pole_integral(rho);
    let y0 = [t_a, 0.0, PI / 2.0, w.pole_integral(t_a), 0.0];
    let mut it = Integrator::new(arc_rhs(w, h), 0.0, y0, shot_options());
    let max_len = 4.0 * PI * rho + 10.0;
    let floor = t_a * (1.0 - 1e-12);
    loop {
        it.step(max_len)?;
        let y = *it.y();
        if y[0] >= rho {
            let (s, ye) = it.find_event(|_, y| y[0] - rho, 1e-14 * rho.max(1.0))?;
            if ye[2] <= -PI / 2.0 {
                return Ok(Shot::TooLow);
            }
            if ye[1] >= PI {
                return Ok(Shot::TooHigh);
            }
            let theta = ye[1];
            let cap = 2.0 * (big_phi_rho * theta - ye[4]);
            let bite_volume = TAU * big_phi_rho - cap;
            let perimeter = 2.0 * s + w.phi(rho) * (TAU - 2.0 * theta);
            return Ok(Shot::Hit { bite_volume, perimeter, theta_exit: theta });
        }
        if y[0] < floor || y[1] >= PI || it.s() >= max_len {
            return Ok(Shot::TooHigh);
        }
        if y[2] <= -PI / 2.0 {
            return Ok(Shot::TooLow);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BiteSolution {
    pub h: f64,
    pub anchor_t: f64,
    pub theta_exit: f64,
    pub volume: f64,
    pub perimeter: f64,
}

#[derive(Clone, Copy)]
enum End {
    Value(f64, f64),
    TooHigh(f64),
    TooLow(f64),
}

impl End {
    fn h(self) -> f64 {
        match self {
            End::Value(h, _) | End::TooHigh(h) | End::TooLow(h) => h,
        }
    }
}

/// Solves for the curvature whose bite has volume `v` at anchor `t_a`.
/// `Ok(None)` means no feasible curvature attains `v`.
pub(crate) fn solve_bite_curvature(w: &WarpedSurface, rho: f64, t_a: f64, v: f64) -> Result<Option<BiteSolution>> {
    let budget = 200;
    let evals = std::cell::Cell::new(0usize);
    let ftol = VOLUME_TOLERANCE * v;
    let shoot = |h: f64| -> Result<(End, Option<BiteSolution>)> {
        evals.set(evals.get() + 1);
        Ok(match bite_shot(w, rho, t_a, h)? {
            Shot::Hit { bite_volume, perimeter, theta_exit } => (
                End::Value(h, bite_volume - v),
                Some(BiteSolution { h, anchor_t: t_a, theta_exit, volume: bite_volume, perimeter }),
            ),
            Shot::TooHigh => (End::TooHigh(h), None),
            Shot::TooLow => (End::TooLow(h), None),
        })
    };

    // `lo` carries larger bite volumes (smaller h), `hi` smaller ones.
    let (start, sol) = shoot(0.0)?;
    let (mut lo, mut hi) = match start {
        End::Value(_, f) if f.abs() <= ftol => return Ok(sol),
        End::Value(_, f) if f > 0.0 => (start, End::TooHigh(w.latitude_curvature(t_a))),
        End::Value(..) | End::TooHigh(_) => {
            let mut step = 1.0 / rho;
            let mut lo = None;
            for _ in 0..60 {
                let (e, sol) = shoot(-step)?;
                match e {
                    End::Value(_, f) if f.abs() <= ftol => return Ok(sol),
                    End::Value(_, f) if f > 0.0 => {
                        lo = Some(e);
                        break;
                    }
                    End::TooLow(_) => {
                        lo = Some(e);
                        break;
                    }
                    _ => step *= 2.0,
                }
            }
            match lo {
                Some(lo) => (lo, start),
                None => return Ok(None),
            }
        }
        End::TooLow(_) => (start, End::TooHigh(w.latitude_curvature(t_a))),
    };

    let mut side = 0i8;
    while evals.get() < budget {
        let (hl, hh) = (lo.h(), hi.h());
        if (hh - hl).abs() <= 1e-14 * hl.abs().max(hh.abs()).max(1.0 / rho) {
            return Ok(None);
        }
        let h = match (lo, hi) {
            (End::Value(a, fa), End::Value(b, fb)) => {
                let x = (a * fb - b * fa) / (fb - fa);
                if x > a.min(b) && x < a.max(b) { x } else { 0.5 * (a + b) }
            }
            _ => 0.5 * (hl + hh),
        };
        let (e, sol) = shoot(h)?;
        match e {
            End::Value(_, f) if f.abs() <= ftol => return Ok(sol),
            End::Value(_, f) if f > 0.0 => {
                lo = e;
                if side == -1 {
                    if let End::Value(b, fb) = hi {
                        hi = End::Value(b, 0.5 * fb);
                    }
                }
                side = -1;
            }
            End::Value(..) | End::TooHigh(_) => {
                hi = e;
                if side == 1 {
                    if let End::Value(a, fa) = lo {
                        lo = End::Value(a, 0.5 * fa);
                    }
                }
                side = 1;
            }
            End::TooLow(_) => lo = e,
        }
    }
    Err(Error::numerical(format!(
        "boundary bite curvature solve exceeded {budget} shots (rho = {rho}, anchor = {t_a}, v = {v})"
    )))
}

/// Best boundary bite of volume `v` in `C_ρ`: a coarse anchor grid followed
/// by golden-section refinement around the best feasible anchor.
pub(crate) fn best_boundary_bite(w: &WarpedSurface, rho: f64, v: f64) -> Result<Option<BiteSolution>> {
    let coarse = 8;
    let lo_t = 1e-3 * rho;
    let hi_t = rho * (1.0 - 1e-6);
    let anchors: Vec<f64> = (0..coarse)
        .map(|k| lo_t + (hi_t - lo_t) * (k as f64 + 0.5) / coarse as f64)
        .collect();
    let mut sols: Vec<Option<BiteSolution>> = Vec::with_capacity(coarse);
    for &t in &anchors {
        sols.push(solve_bite_curvature(w, rho, t, v)?);
    }
    let Some(best_k) = (0..coarse)
        .filter(|&k| sols[k].is_some())
        .min_by(|&a, &b| sols[a].unwrap().perimeter.total_cmp(&sols[b].unwrap().perimeter))
    else {
        return Ok(None);
    };
    let mut best = sols[best_k].unwrap();
    let mut a = if best_k == 0 { lo_t } else { anchors[best_k - 1] };
    let mut b = if best_k + 1 == coarse { hi_t } else { anchors[best_k + 1] };
    let eval = |t: f64| -> Result<f64> {
        Ok(solve_bite_curvature(w, rho, t, v)?.map_or(f64::INFINITY, |s| s.perimeter))
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..8 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d)?;
        }
    }
    let t_best = if fc <= fd { c } else { d };
    if let Some(s) = solve_bite_curvature(w, rho, t_best, v)? {
        if s.perimeter < best.perimeter {
            best = s;
        }
    }
    Ok(Some(best))
}

/// Minimal total perimeter over the candidate families for volume `v`
/// inside `C_ρ`.
pub fn sublevel_profile_candidates(w: &WarpedSurface, rho: f64, v: f64) -> Result<CandidateEvaluation> {
    let cap = w.pole_ball_volume(rho)?;
    if !(v > 0.0) || !(v < cap) {
        return Err(Error::domain(format!("volume {v} not in (0, |C_rho|) = (0, {cap})")));
    }
    let mut candidates = Vec::with_capacity(4);
    let mut partial = false;

    let r = w.radius_for_volume(v)?;
    let disk = CandidateRegion {
        kind: CandidateKind::PoleDisk { radius: r },
        volume: v,
        perimeter: TAU * w.phi(r),
    };
    candidates.push(disk);

    if let Some(delta) = w.catalog_id().constant_curvature() {
        let sf = SpaceForm::surface(delta);
        let s = sf.inverse_volume(v)?;
        if s <= rho {
            candidates.push(CandidateRegion {
                kind: CandidateKind::InteriorBall { center_t: 0.0, radius: s },
                volume: v,
                perimeter: sf.ball_area(s)?,
            });
        }
    }

    let inner_volume = cap - v;
    let a = w.radius_for_volume(inner_volume)?;
    candidates.push(CandidateRegion {
        kind: CandidateKind::ComplementAnnulus { inner: a },
        volume: v,
        perimeter: TAU * (w.phi(rho) + w.phi(a)),
    });

    match best_boundary_bite(w, rho, v) {
        Ok(Some(b)) => candidates.push(CandidateRegion {
            kind: CandidateKind::BoundaryBite {
                h: b.h,
                anchor_t: b.anchor_t,
                theta_exit: b.theta_exit,
            },
            volume: b.volume,
            perimeter: b.perimeter,
        }),
        Ok(None) => {}
        Err(Error::Numerical(_)) => partial = true,
        Err(e) => return Err(e),
    }

    let mut best = disk;
    for c in &candidates[1..] {
        if c.perimeter < best.perimeter {
            best = *c;
        }
    }
    if disk.perimeter <= best.perimeter * (1.0 + TIE_TOLERANCE) {
        best = disk;
    }
    Ok(CandidateEvaluation {
        rho,
        v,
        value: best.perimeter,
        best,
        candidates,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(ev: &CandidateEvaluation, name: &str) -> Option<CandidateRegion> {
        ev.candidates.iter().copied().find(|c| c.kind.name() == name)
    }

    #[test]
    fn flat_chord_shot_matches_segment_geometry() {
        let w = WarpedSurface::plane();
        let t_a: f64 = 0.6;
        let Shot::Hit { bite_volume, perimeter, theta_exit } = bite_shot(&w, 1.0, t_a, 0.0).unwrap() else {
            panic!("chord must hit the boundary");
        };
        let th = t_a.acos();
        assert!((theta_exit - th).abs() < 1e-10);
        let segment = th - th.sin() * th.cos();
        assert!((bite_volume - (PI - segment)).abs() < 1e-10);
        assert!((perimeter - (2.0 * th.sin() + TAU - 2.0 * th)).abs() < 1e-10);
    }

    #[test]
    fn near_diameter_chord_is_half_disk() {
        let w = WarpedSurface::plane();
        let Shot::Hit { bite_volume, perimeter, .. } = bite_shot(&w, 1.0, 1e-7, 0.0).unwrap() else {
            panic!()
        };
        assert!((bite_volume - PI / 2.0).abs() < 1e-6);
        assert!((perimeter - (2.0 + PI)).abs() < 1e-6);
    }

    #[test]
    fn curvature_classification() {
        let w = WarpedSurface::plane();
        // Latitude circle curvature at the anchor is 1/t_a.
        assert_eq!(bite_shot(&w, 1.0, 0.5, 2.5).unwrap(), Shot::TooHigh);
        assert_eq!(bite_shot(&w, 1.0, 0.5, -50.0).unwrap(), Shot::TooLow);
    }

    #[test]
    fn bite_volume_decreases_in_curvature() {
        let w = WarpedSurface::hyperbolic();
        let mut prev = f64::INFINITY;
        for h in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            if let Shot::Hit { bite_volume, .. } = bite_shot(&w, 1.5, 0.8, h).unwrap() {
                assert!(bite_volume < prev);
                prev = bite_volume;
            }
        }
    }

    #[test]
    fn flat_circular_bite_closed_form() {
        // Arc of a circle of radius R = 1/h centred at (c, 0) with c = t_a + R
        // meets the unit circle; compare with the lens geometry.
        let w = WarpedSurface::plane();
        let (t_a, h) = (0.5f64, -0.8f64);
        let Shot::Hit { bite_volume, perimeter, .. } = bite_shot(&w, 1.0, t_a, h).unwrap() else {
            panic!()
        };
        // h < 0: the arc bends away from the pole, circle centre on the far
        // side at c = t_a + 1/|h|.
        let rr = 1.0 / h.abs();
        let c = t_a + rr;
        // Intersection of |p| = 1 with |p - (c,0)| = rr.
        let x = (1.0 + c * c - rr * rr) / (2.0 * c);
        let y = (1.0 - x * x).sqrt();
        let phi_unit = y.atan2(x);
        let phi_arc = y.atan2(c - x);
        let unit_seg = phi_unit - phi_unit.sin() * phi_unit.cos();
        let arc_seg = rr * rr * (phi_arc - phi_arc.sin() * phi_arc.cos());
        let cap = unit_seg + arc_seg;
        assert!((bite_volume - (PI - cap)).abs() < 1e-9, "{bite_volume} vs {}", PI - cap);
        let expect_p = 2.0 * rr * phi_arc + (TAU - 2.0 * phi_unit);
        assert!((perimeter - expect_p).abs() < 1e-9);
    }

    #[test]
    fn flat_examples() {
        let w = WarpedSurface::plane();
        let ev = sublevel_profile_candidates(&w, 2.0, PI).unwrap();
        assert!((ev.value - TAU).abs() < 1e-12);
        assert_eq!(ev.best.kind.name(), "pole_disk");

        let ev = sublevel_profile_candidates(&w, 1.0, PI / 2.0).unwrap();
        assert!((ev.value - 2f64.sqrt() * PI).abs() < 1e-12);
        let bite = find(&ev, "boundary_bite").unwrap();
        assert!(bite.perimeter > ev.value);

        let v = PI - 0.01;
        let ev = sublevel_profile_candidates(&w, 1.0, v).unwrap();
        assert!((ev.value - TAU * (1.0 - 0.01 / PI).sqrt()).abs() < 1e-12);
        assert!((ev.value - 6.273_177_336_7).abs() < 1e-9);
        let ann = find(&ev, "complement_annulus").unwrap();
        assert!((ann.perimeter - 6.637_676_077_4).abs() < 1e-9);
        let bite = find(&ev, "boundary_bite").unwrap();
        assert!((bite.volume - v).abs() <= 1e-8 * v);
        assert!(bite.perimeter > ev.value);
    }

    #[test]
    fn flat_chord_bite_value() {
        // Chord cutting area 0.01 from the unit disk: θ - sinθcosθ = 0.01.
        let w = WarpedSurface::plane();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m - m.sin() * m.cos() < 0.01 { lo = m } else { hi = m }
        }
        let th = 0.5 * (lo + hi);
        let chord = 2.0 * th.sin() + TAU - 2.0 * th;
        let sol = solve_bite_curvature(&w, 1.0, th.cos(), PI - 0.01).unwrap().unwrap();
        assert!(sol.h.abs() < 1e-6, "h = {}", sol.h);
        assert!((sol.perimeter - chord).abs() < 1e-8, "{} vs {chord}", sol.perimeter);
        let best = best_boundary_bite(&w, 1.0, PI - 0.01).unwrap().unwrap();
        assert!(best.perimeter <= chord + 1e-9);
    }

    #[test]
    fn volume_outside_sublevel_rejected() {
        let w = WarpedSurface::plane();
        assert!(sublevel_profile_candidates(&w, 1.0, PI).is_err());
        assert!(sublevel_profile_candidates(&w, 1.0, 0.0).is_err());
    }
}
