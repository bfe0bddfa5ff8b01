//! Reference values recomputed from closed forms or an independent
//! quadrature.

use std::f64::consts::{PI, TAU};

use isoprofile::profile::disk_profile;
use isoprofile::warped_surface::ball_measure_excluding;
use isoprofile::{SpaceForm64, SymmetricRegion, WarpedSurface};

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (f(a) + f(b) + inner)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn hyperbolic_unit_ball() {
    let s = SpaceForm64::surface(-1.0);
    let (v, a) = (s.ball_volume(1.0).unwrap(), s.ball_area(1.0).unwrap());
    assert!(close(v, TAU * (1f64.cosh() - 1.0), 1e-13));
    assert!(close(a, TAU * 1f64.sinh(), 1e-13));
    assert!(close(v, simpson(|r| TAU * r.sinh(), 0.0, 1.0, 2000), 1e-12));
}

#[test]
fn spherical_ball_in_three_dimensions() {
    // V(r) = 4π ∫₀^r sin² = 2π(r - sin r cos r) on the unit 3-sphere.
    let s = SpaceForm64::new(1.0, 3).unwrap();
    let r = 1.2;
    assert!(close(s.ball_volume(r).unwrap(), TAU * (r - r.sin() * r.cos()), 1e-12));
    assert!(close(s.total_volume(), 2.0 * PI * PI, 1e-12));
}

#[test]
fn cigar_disk_profile() {
    // φ = tanh t: |B_r| = 2π ln cosh r and |∂B_r| = 2π tanh r.
    let w = WarpedSurface::cigar();
    let v = TAU * 1f64.cosh().ln();
    assert!(close(disk_profile(&w, v).unwrap(), TAU * 1f64.tanh(), 1e-10));
}

#[test]
fn flare_pole_volume_by_simpson() {
    let w = WarpedSurface::flare();
    let phi = |t: f64| t + t.powi(3) * (t * t).exp();
    for r in [0.3, 1.0, 1.7] {
        let v = w.pole_ball_volume(r).unwrap();
        assert!(close(v, TAU * simpson(phi, 0.0, r, 4000), 1e-10), "r = {r}");
    }
}

#[test]
fn off_pole_hyperbolic_ball_matches_model() {
    // Homogeneity: every geodesic ball of radius s has area 2π(cosh s - 1).
    let w = WarpedSurface::hyperbolic();
    let m = ball_measure_excluding(&w, 1.0, 0.5, &SymmetricRegion::empty(), 256).unwrap();
    assert!(close(m, TAU * (0.5f64.cosh() - 1.0), 1e-8), "{m}");
}

#[test]
fn flat_ball_outside_pole_disk_is_full() {
    let w = WarpedSurface::plane();
    let e = SymmetricRegion::disk(1.0).unwrap();
    let m = ball_measure_excluding(&w, 2.5, 0.5, &e, 128).unwrap();
    assert!(close(m, PI * 0.25, 1e-9), "{m}");
}
