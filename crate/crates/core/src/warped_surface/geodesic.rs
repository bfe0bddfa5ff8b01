//! Geodesics and curves of constant geodesic curvature.
//!
//! Geodesics are integrated in the second-order form
//! `t'' = φφ'θ'²`, `θ'' = -2(φ'/φ)t'θ'`. Constant-curvature arcs use the
//! heading form `t' = cos ψ`, `θ' = sin ψ/φ`, `ψ' = h - (φ'/φ) sin ψ`, where
//! `ψ` is the angle from the outward radial direction and `h > 0` turns left.
//! Arcs also carry `Φ(t) = ∫₀^t φ` and the swept area `∫ Φ dθ`, which by
//! Green's theorem is the enclosed area of a closed counterclockwise arc.
//!
//! Both forms are invariant under `(t, θ) -> (-t, θ + π)` with the odd
//! extension of `φ`; states are renormalized to `t >= 0` after every step.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::WarpedSurface;
use crate::error::{Error, Result};
use crate::numerics::{Integrator, OdeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub t: f64,
    pub theta: f64,
    pub vt: f64,
    pub vtheta: f64,
    pub arc_length: f64,
}

impl GeodesicState {
    /// Unit-speed state at `(t, θ)` with heading `ψ` measured from the
    /// outward radial direction.
    pub fn from_heading(w: &WarpedSurface, t: f64, theta: f64, psi: f64) -> Self {
        let (sn, cs) = psi.sin_cos();
        // Rounding residue of sin(kπ) would turn a radial geodesic into a
        // near miss of the pole.
        let sn = if sn.abs() < 1e-15 { 0.0 } else { sn };
        Self {
            t,
            theta,
            vt: cs,
            vtheta: sn / w.phi(t),
            arc_length: 0.0,
        }
    }

    pub fn speed_sq(&self, w: &WarpedSurface) -> f64 {
        let p = w.phi(self.t);
        self.vt * self.vt + p * p * self.vtheta * self.vtheta
    }

    /// Clairaut constant `φ² θ'`.
    pub fn clairaut(&self, w: &WarpedSurface) -> f64 {
        let p = w.phi(self.t);
        p * p * self.vtheta
    }

    pub fn heading(&self, w: &WarpedSurface) -> f64 {
        (w.phi(self.t) * self.vtheta).atan2(self.vt)
    }

    fn to_array(self) -> [f64; 4] {
        [self.t, self.theta, self.vt, self.vtheta]
    }

    fn from_array(y: &[f64; 4], s: f64) -> Self {
        Self {
            t: y[0],
            theta: y[1],
            vt: y[2],
            vtheta: y[3],
            arc_length: s,
        }
    }
}

fn geodesic_rhs(w: &WarpedSurface) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    move |_s, y| {
        let (t, vt, vth) = (y[0], y[2], y[3]);
        let (p, dp) = (w.phi(t), w.dphi(t));
        let ath = if vth == 0.0 { 0.0 } else { -2.0 * w.latitude_curvature(t) * vt * vth };
        [vt, vth, p * dp * vth * vth, ath]
    }
}

fn reflect_geodesic(y: &[f64; 4]) -> Option<[f64; 4]> {
    (y[0] < 0.0).then(|| [-y[0], y[1] + PI, -y[2], y[3]])
}

fn check_start(w: &WarpedSurface, t: f64) -> Result<()> {
    if !(t >= 0.0) || t > w.t_num() {
        return Err(Error::domain(format!("start radius {t} outside [0, {}]", w.t_num())));
    }
    Ok(())
}

fn geodesic_options() -> OdeOptions<f64> {
    OdeOptions::default().with_h_max(0.05)
}

/// Integrates a geodesic for arc length `length` and returns the accepted
/// steps, starting with `start` and ending exactly at `length`.
pub fn geodesic_integrate(w: &WarpedSurface, start: GeodesicState, length: f64) -> Result<Vec<GeodesicState>> {
    if !(length >= 0.0) || !length.is_finite() {
        return Err(Error::invalid(format!("geodesic length must be finite and >= 0, got {length}")));
    }
    check_start(w, start.t)?;
    let s0 = start.arc_length;
    let mut it = Integrator::new(geodesic_rhs(w), s0, start.to_array(), geodesic_options());
    let mut out = vec![start];
    while it.s() < s0 + length {
        it.step(s0 + length)?;
        if let Some(r) = reflect_geodesic(it.y()) {
            it.set_state(r);
        }
        if it.y()[0] > w.t_num() {
            return Err(Error::domain(format!(
                "geodesic left the numerical domain T_num = {} at arc length {}",
                w.t_num(),
                it.s()
            )));
        }
        out.push(GeodesicState::from_array(it.y(), it.s()));
    }
    Ok(out)
}

/// Geodesic states at the given increasing arc lengths (measured from the
/// start). Step sizes never exceed `h_max`.
pub fn geodesic_sample(
    w: &WarpedSurface,
    start: GeodesicState,
    samples: &[f64],
    opts: OdeOptions<f64>,
) -> Result<Vec<GeodesicState>> {
    check_start(w, start.t)?;
    let mut it = Integrator::new(geodesic_rhs(w), 0.0, start.to_array(), opts);
    let mut out = Vec::with_capacity(samples.len());
    for &s in samples {
        if s < it.s() {
            return Err(Error::invalid("geodesic samples must be increasing"));
        }
        while it.s() < s {
            it.step(s)?;
            if let Some(r) = reflect_geodesic(it.y()) {
                it.set_state(r);
            }
            if it.y()[0] > w.t_num() {
                return Err(Error::domain(format!(
                    "geodesic left the numerical domain T_num = {} at arc length {}",
                    w.t_num(),
                    it.s()
                )));
            }
        }
        out.push(GeodesicState::from_array(it.y(), s + start.arc_length));
    }
    Ok(out)
}

/// Right-hand side of the arc equations for state `[t, θ, ψ, Φ, A]`.
pub(crate) fn arc_rhs(w: &WarpedSurface, h: f64) -> impl Fn(f64, &[f64; 5]) -> [f64; 5] + '_ {
    move |_s, y| {
        let (t, psi, big_phi) = (y[0], y[2], y[3]);
        let (sn, cs) = psi.sin_cos();
        let p = w.phi(t);
        let turn = if t == 0.0 { 0.0 } else { w.latitude_curvature(t) * sn };
        let dtheta = if t == 0.0 { 0.0 } else { sn / p };
        [cs, dtheta, h - turn, p * cs, big_phi * dtheta]
    }
}

/// Wraps an angle into `(-π, π]`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

pub(crate) fn reflect_arc(y: &[f64; 5]) -> Option<[f64; 5]> {
    (y[0] < 0.0).then(|| [-y[0], y[1] + PI, wrap_angle(y[2] + PI), y[3], y[4]])
}

pub(crate) fn arc_initial(w: &WarpedSurface, t: f64, theta: f64, psi: f64) -> [f64; 5] {
    [t, theta, psi, w.pole_integral(t), 0.0]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcStop {
    /// Stop on the first outward crossing of the circle `t = ρ`.
    ReturnToRadius(f64),
    /// Stop when the arc returns to its starting point.
    Closure,
    /// Run for the full `max_length`.
    MaxLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcEnd {
    Returned,
    Closed,
    MaxLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcPoint {
    pub s: f64,
    pub t: f64,
    pub theta: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcResult {
    pub points: Vec<ArcPoint>,
    pub length: f64,
    /// `∫ Φ(t) dθ` along the arc.
    pub swept_area: f64,
    pub end: ArcEnd,
}

impl ArcResult {
    pub fn last(&self) -> ArcPoint {
        *self.points.last().expect("arc has at least its start point")
    }
}

fn chart(y: &[f64; 5]) -> (f64, f64) {
    (y[0] * y[1].cos(), y[0] * y[1].sin())
}

/// Shoots the unit-speed curve of constant geodesic curvature `h` from
/// `(t, θ)` with heading `ψ` until `stop` fires or `max_length` is reached.
pub fn cmc_arc_shoot(
    w: &WarpedSurface,
    h: f64,
    start: (f64, f64, f64),
    stop: ArcStop,
    max_length: f64,
) -> Result<ArcResult> {
    let (t0, th0, psi0) = start;
    if !(t0 > 0.0) || t0 > w.t_num() {
        return Err(Error::domain(format!("arc start radius {t0} outside (0, {}]", w.t_num())));
    }
    if !(max_length > 0.0) || !max_length.is_finite() || !h.is_finite() {
        return Err(Error::invalid("arc needs finite curvature and positive finite max_length"));
    }
    let y0 = arc_initial(w, t0, th0, psi0);
    let mut it = Integrator::new(arc_rhs(w, h), 0.0, y0, geodesic_options());
    let mut points = vec![ArcPoint { s: 0.0, t: t0, theta: th0, psi: psi0 }];

    let p0 = chart(&y0);
    let tangent = {
        let (sn, cs) = psi0.sin_cos();
        let (st, ct) = th0.sin_cos();
        [cs * ct - sn * st, cs * st + sn * ct]
    };
    let along = |y: &[f64; 5]| {
        let p = chart(y);
        (p.0 - p0.0) * tangent[0] + (p.1 - p0.1) * tangent[1]
    };
    let close_tol = 1e-6 * (1.0 + t0);

    let mut end = ArcEnd::MaxLength;
    while it.s() < max_length {
        let prev_t = it.y()[0];
        let prev_along = along(it.y());
        it.step(max_length)?;
        let y = *it.y();
        match stop {
            ArcStop::ReturnToRadius(rho) => {
                if prev_t < rho && y[0].abs() >= rho {
                    it.locate(|_, y| y[0].abs() - rho, 1e-13)?;
                    end = ArcEnd::Returned;
                }
            }
            ArcStop::Closure => {
                if it.s() > 1e-6 && prev_along < 0.0 && along(&y) >= 0.0 {
                    if let Ok((s, yc)) = it.find_event(|_, y| along(y), 1e-14) {
                        let (cx, cy) = chart(&yc);
                        let miss = ((cx - p0.0).powi(2) + (cy - p0.1).powi(2)).sqrt();
                        if miss <= close_tol {
                            it.jump_to(s, yc);
                            end = ArcEnd::Closed;
                        }
                    }
                }
            }
            ArcStop::MaxLength => {}
        }
        if let Some(r) = reflect_arc(it.y()) {
            it.set_state(r);
        }
        let y = *it.y();
        if y[0] > w.t_num() {
            return Err(Error::domain(format!(
                "arc left the numerical domain T_num = {} at length {}",
                w.t_num(),
                it.s()
            )));
        }
        points.push(ArcPoint { s: it.s(), t: y[0], theta: y[1], psi: y[2] });
        if end != ArcEnd::MaxLength {
            break;
        }
    }
    let y = *it.y();
    Ok(ArcResult {
        points,
        length: it.s(),
        swept_area: y[4],
        end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn plane_radial_ray() {
        let w = WarpedSurface::plane();
        let start = GeodesicState::from_heading(&w, 1.0, 0.0, 0.0);
        let tr = geodesic_integrate(&w, start, 2.0).unwrap();
        let end = tr.last().unwrap();
        assert!((end.t - 3.0).abs() < 1e-12);
        assert!((end.arc_length - 2.0).abs() < 1e-15);
    }

    #[test]
    fn plane_tangent_line_min_distance() {
        let w = WarpedSurface::plane();
        let start = GeodesicState::from_heading(&w, 1.0, 0.0, PI / 2.0);
        let samples: Vec<f64> = (0..=200).map(|k| k as f64 * 0.01).collect();
        let tr = geodesic_sample(&w, start, &samples, geodesic_options()).unwrap();
        let min_t = tr.iter().map(|s| s.t).fold(f64::INFINITY, f64::min);
        assert!((min_t - 1.0).abs() < 1e-12);
        for st in &tr {
            // Line x = 1 in the polar chart.
            let expect = (1.0 + st.arc_length * st.arc_length).sqrt();
            assert!((st.t - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn hyperbolic_clairaut_and_speed() {
        let w = WarpedSurface::hyperbolic();
        let start = GeodesicState::from_heading(&w, 1.0, 0.0, PI / 2.0);
        let c0 = start.clairaut(&w);
        assert!((c0 - 1f64.sinh()).abs() < 1e-15);
        let tr = geodesic_integrate(&w, start, 3.0).unwrap();
        for st in &tr {
            assert!((st.clairaut(&w) - c0).abs() < 1e-8 * (1.0 + st.arc_length));
            assert!((st.speed_sq(&w) - 1.0).abs() < 1e-8 * (1.0 + st.arc_length));
        }
    }

    #[test]
    fn geodesic_through_pole() {
        let w = WarpedSurface::cigar();
        let start = GeodesicState::from_heading(&w, 1.0, 0.3, PI);
        let tr = geodesic_integrate(&w, start, 2.0).unwrap();
        let end = tr.last().unwrap();
        assert!((end.t - 1.0).abs() < 1e-9);
        assert!((wrap_angle(end.theta - 0.3 - PI)).abs() < 1e-9);
        assert!(end.vt > 0.0);
    }

    #[test]
    fn plane_unit_circle_closes() {
        let w = WarpedSurface::plane();
        for (t0, th0, psi0) in [(1.0, 0.0, PI / 2.0), (2.0, 0.4, 0.3), (0.5, 1.0, -2.0)] {
            let arc = cmc_arc_shoot(&w, 1.0, (t0, th0, psi0), ArcStop::Closure, 10.0).unwrap();
            assert_eq!(arc.end, ArcEnd::Closed, "start {t0} {th0} {psi0}");
            assert!((arc.length - TAU).abs() < 1e-7, "length {}", arc.length);
            assert!((arc.swept_area - PI).abs() < 1e-7, "area {}", arc.swept_area);
        }
    }

    #[test]
    fn hyperbolic_circle_about_pole() {
        let w = WarpedSurface::hyperbolic();
        let h = 1.0 / 1f64.tanh();
        let arc = cmc_arc_shoot(&w, h, (1.0, 0.0, PI / 2.0), ArcStop::Closure, 20.0).unwrap();
        assert_eq!(arc.end, ArcEnd::Closed);
        assert!((arc.length - TAU * 1f64.sinh()).abs() < 1e-7);
        assert!((arc.swept_area - TAU * (1f64.cosh() - 1.0)).abs() < 1e-7);
    }

    #[test]
    fn hyperbolic_off_center_circle() {
        // Circle of radius 0.5 about a point at distance 1.5 from the pole.
        let w = WarpedSurface::hyperbolic();
        let h = 1.0 / 0.5f64.tanh();
        let arc = cmc_arc_shoot(&w, h, (2.0, 0.0, PI / 2.0), ArcStop::Closure, 20.0).unwrap();
        assert_eq!(arc.end, ArcEnd::Closed);
        assert!((arc.length - TAU * 0.5f64.sinh()).abs() < 1e-7);
        assert!((arc.swept_area - TAU * (0.5f64.cosh() - 1.0)).abs() < 1e-7);
    }

    #[test]
    fn zero_curvature_arc_matches_geodesic() {
        for w in WarpedSurface::all_catalog() {
            let (t0, psi0) = (0.8, 2.2);
            let arc = cmc_arc_shoot(&w, 0.0, (t0, 0.0, psi0), ArcStop::MaxLength, 1.5).unwrap();
            let start = GeodesicState::from_heading(&w, t0, 0.0, psi0);
            let g = geodesic_sample(&w, start, &[1.5], geodesic_options()).unwrap()[0];
            let e = arc.last();
            assert!((e.t - g.t).abs() < 1e-7, "{}: {} vs {}", w.name(), e.t, g.t);
            assert!(wrap_angle(e.theta - g.theta).abs() < 1e-7, "{}", w.name());
        }
    }

    #[test]
    fn return_to_radius_stop() {
        // Chord of the unit circle starting inward at 45 degrees.
        let w = WarpedSurface::plane();
        let arc = cmc_arc_shoot(&w, 0.0, (1.0, 0.0, 3.0 * PI / 4.0), ArcStop::ReturnToRadius(1.0), 5.0).unwrap();
        assert_eq!(arc.end, ArcEnd::Returned);
        assert!((arc.length - 2f64.sqrt()).abs() < 1e-9);
        assert!((arc.last().t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arc_leaving_domain_is_an_error() {
        let w = WarpedSurface::flare();
        assert!(cmc_arc_shoot(&w, 0.0, (1.0, 0.0, 0.0), ArcStop::MaxLength, 10.0).is_err());
    }
}
