use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite union of closed rotationally invariant annuli `a_k <= t <= b_k`.
///
/// Degenerate intervals `[a, a]` are dropped on construction; the remaining
/// intervals must be ordered with positive gaps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct SymmetricRegion {
    intervals: Vec<(f64, f64)>,
}

impl SymmetricRegion {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let intervals: Vec<(f64, f64)> = intervals.into_iter().filter(|&(a, b)| a != b).collect();
        let mut prev_end: Option<f64> = None;
        for &(a, b) in &intervals {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::invalid(format!("interval [{a}, {b}] is not finite")));
            }
            if a < 0.0 || a > b {
                return Err(Error::invalid(format!("interval [{a}, {b}] must satisfy 0 <= a < b")));
            }
            if let Some(p) = prev_end {
                if a <= p {
                    return Err(Error::invalid(format!(
                        "intervals must be ordered with positive gaps; [{a}, {b}] follows {p}"
                    )));
                }
            }
            prev_end = Some(b);
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The closed pole ball `[0, r]`.
    pub fn disk(r: f64) -> Result<Self> {
        Self::new(vec![(0.0, r)])
    }

    pub fn annulus(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `[a_1, b_m]`, or `None` for the empty region.
    pub fn radial_hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    /// Membership of the latitude circle at radius `t`.
    pub fn contains(&self, t: f64) -> bool {
        let t = t.abs();
        self.intervals.iter().any(|&(a, b)| a <= t && t <= b)
    }

    /// Whether the region lies inside the closed pole ball of radius `rho`.
    pub fn within(&self, rho: f64) -> bool {
        self.radial_hull().map_or(true, |(_, b)| b <= rho)
    }

    /// Radii of the boundary circles (the pole is not a boundary point).
    pub fn boundary_radii(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.intervals.len());
        for &(a, b) in &self.intervals {
            if a > 0.0 {
                out.push(a);
            }
            out.push(b);
        }
        out
    }
}

impl TryFrom<Vec<(f64, f64)>> for SymmetricRegion {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SymmetricRegion> for Vec<(f64, f64)> {
    fn from(r: SymmetricRegion) -> Self {
        r.intervals
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SymmetricRegion::new(vec![(0.0, 1.0), (2.0, 3.0)]).is_ok());
        assert!(SymmetricRegion::new(vec![(0.0, 1.0), (1.0, 3.0)]).is_err());
        assert!(SymmetricRegion::new(vec![(2.0, 3.0), (0.0, 1.0)]).is_err());
        assert!(SymmetricRegion::new(vec![(-1.0, 1.0)]).is_err());
        assert!(SymmetricRegion::new(vec![(1.0, 0.5)]).is_err());
        assert!(SymmetricRegion::new(vec![(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn degenerate_intervals_vanish() {
        let r = SymmetricRegion::new(vec![(1.0, 1.0)]).unwrap();
        assert!(r.is_empty());
        let r = SymmetricRegion::new(vec![(0.0, 1.0), (1.5, 1.5), (2.0, 3.0)]).unwrap();
        assert_eq!(r.intervals().len(), 2);
    }

    #[test]
    fn membership_and_boundary() {
        let r = SymmetricRegion::new(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert!(r.contains(0.5) && r.contains(2.0) && !r.contains(1.5));
        assert_eq!(r.boundary_radii(), vec![1.0, 2.0, 3.0]);
        assert_eq!(r.radial_hull(), Some((0.0, 3.0)));
        assert!(r.within(3.0) && !r.within(2.5));
    }

    #[test]
    fn json_round_trip() {
        let r = SymmetricRegion::new(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "[[0.0,1.0],[2.0,3.0]]");
        let back: SymmetricRegion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<SymmetricRegion>("[[1.0,0.0]]").is_err());
    }
}
