//! Truncation of a symmetric region to `C_ρ`, with the lost volume restored
//! by a geodesic ball placed by the ball placement witness search.

use serde::{Deserialize, Serialize};

use crate::ball_placement::{find_witness, PlacementScenario, Witness, WitnessOptions};
use crate::error::{Error, Result};
use crate::numerics::{find_root, RootOptions};
use crate::space_forms::SpaceForm;
use crate::warped_surface::ball::ball_measure_unchecked;
use crate::warped_surface::SymmetricRegion;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompensateOptions {
    pub witness: WitnessOptions,
    /// Angular resolution of the deterministic ball measure.
    pub n_angles: usize,
}

impl Default for CompensateOptions {
    fn default() -> Self {
        Self {
            witness: WitnessOptions::default(),
            n_angles: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compensation {
    pub rho: f64,
    pub truncated: SymmetricRegion,
    pub deficit: f64,
    pub perimeter_inside: f64,
    pub slice: f64,
    /// Radius from the placement bound, before shrinking.
    pub initial_radius: f64,
    pub witness: Option<Witness>,
    pub center_t: f64,
    pub radius: f64,
    pub kappa_lower: f64,
    pub ball_area_bound: f64,
    /// `P(E, int C_ρ) + |E ∩ ∂C_ρ| + A_{κ⁻}(s*)`, an upper bound for the
    /// perimeter of the compensated region.
    pub certificate: f64,
    pub volume: f64,
    /// Exact perimeter, when the ball misses the truncated region on a
    /// constant-curvature surface.
    pub exact_perimeter: Option<f64>,
}

/// Margin on the placement volume so that an exactly sized ball still
/// certifies.
const SIZE_MARGIN: f64 = 1e-9;

pub fn truncate_and_compensate(sc: &PlacementScenario, rho: f64, opts: &CompensateOptions) -> Result<Compensation> {
    let w = sc.surface();
    let e = sc.region();
    let (g, slice) = w.region_truncate(e, rho)?;
    let vol_e = w.region_volume(e)?;
    let vol_g = w.region_volume(&g)?;
    let deficit = vol_e - vol_g;
    let perimeter_inside = w.region_perimeter_inside(e, rho)?;

    if deficit <= 1e-14 * vol_e.max(1.0) {
        let p = w.region_perimeter(e)?;
        return Ok(Compensation {
            rho,
            truncated: g,
            deficit: 0.0,
            perimeter_inside,
            slice,
            initial_radius: 0.0,
            witness: None,
            center_t: 0.0,
            radius: 0.0,
            kappa_lower: 0.0,
            ball_area_bound: 0.0,
            certificate: p,
            volume: vol_e,
            exact_perimeter: Some(p),
        });
    }

    let scg = sc.with_region(g.clone())?;
    let model = SpaceForm::surface(scg.delta());
    let target = deficit * (1.0 + SIZE_MARGIN) / scg.density();
    let initial_radius = model
        .inverse_volume(target)
        .map_err(|_| Error::domain(format!("deficit {deficit} admits no compensating ball in the model")))?;
    if initial_radius > scg.max_radius() {
        return Err(Error::domain(format!(
            "compensating radius {initial_radius} exceeds the admissible radius {}",
            scg.max_radius()
        )));
    }
    let witness = find_witness(&scg, initial_radius, &opts.witness)?;
    let x_t = witness.x_t;

    let measure = |s: f64| ball_measure_unchecked(w, x_t, s, &g, opts.n_angles);
    let full = measure(initial_radius)?;
    if full < deficit {
        return Err(Error::verification(format!(
            "placed ball holds {full} outside the truncation, below the deficit {deficit}"
        )));
    }
    let radius = find_root(
        |s| measure(s).unwrap_or(f64::NAN) - deficit,
        None::<fn(f64) -> f64>,
        0.0,
        initial_radius,
        RootOptions {
            f_tol: 1e-12 * deficit,
            ..RootOptions::default()
        },
    )?;
    let outside = measure(radius)?;

    let (kappa_lower, _) = w.curvature_bounds((x_t - radius).max(0.0), x_t + radius)?;
    let ball_area_bound = SpaceForm::surface(kappa_lower).ball_area(radius)?;
    let certificate = perimeter_inside + slice + ball_area_bound;

    let lo = x_t - radius;
    let hi = x_t + radius;
    let misses = g.intervals().iter().all(|&(a, b)| hi < a || lo > b);
    let exact_perimeter = match w.catalog_id().constant_curvature() {
        Some(k) if misses => Some(w.region_perimeter(&g)? + SpaceForm::surface(k).ball_area(radius)?),
        _ => None,
    };

    Ok(Compensation {
        rho,
        truncated: g,
        deficit,
        perimeter_inside,
        slice,
        initial_radius,
        witness: Some(witness),
        center_t: x_t,
        radius,
        kappa_lower,
        ball_area_bound,
        certificate,
        volume: vol_g + outside,
        exact_perimeter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warped_surface::WarpedSurface;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn flat_disk_compensation() {
        let w = WarpedSurface::plane();
        let e = SymmetricRegion::disk(1.01).unwrap();
        let sc = PlacementScenario::new(w, e, 2.0, 4.0, 1.0, None).unwrap();
        let c = truncate_and_compensate(&sc, 1.0, &CompensateOptions::default()).unwrap();
        assert!((c.deficit - PI * 0.0201).abs() < 1e-12);
        assert!((c.radius - 0.0201f64.sqrt()).abs() < 1e-9);
        assert!((c.volume - PI * 1.0201).abs() <= 1e-8 * PI * 1.0201);
        let exact = TAU * (1.0 + 0.0201f64.sqrt());
        assert!((c.exact_perimeter.unwrap() - exact).abs() < 1e-8);
        assert!(c.certificate >= exact - 1e-9);
        assert!((c.certificate - exact).abs() < 1e-6);
    }

    #[test]
    fn region_inside_ball_is_unchanged() {
        let w = WarpedSurface::plane();
        let sc = PlacementScenario::new(w, SymmetricRegion::disk(0.5).unwrap(), 2.0, 4.0, 1.0, None).unwrap();
        let c = truncate_and_compensate(&sc, 1.0, &CompensateOptions::default()).unwrap();
        assert_eq!(c.deficit, 0.0);
        assert!((c.certificate - PI).abs() < 1e-12);
    }

    #[test]
    fn large_deficit_is_inadmissible() {
        let w = WarpedSurface::hyperbolic();
        let sc = PlacementScenario::new(w, SymmetricRegion::disk(2.0).unwrap(), 3.0, 4.5, 1.0, None).unwrap();
        let err = truncate_and_compensate(&sc, 1.0, &CompensateOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err}");
    }
}
