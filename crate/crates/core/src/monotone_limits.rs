//! Sampled monotone families, their pointwise limits, and one-sided
//! continuity probes.
//!
//! A non-increasing sequence of continuous non-decreasing functions has a
//! right-continuous limit. The family
//!
//! ```text
//! f_i(x) = 0        for x <= -1/i
//!          1 + i x  for -1/i <= x <= 0
//!          1        for x >= 0
//! ```
//!
//! converges to the indicator of `[0, ∞)`, which is right- but not
//! left-continuous at 0. Checks here only speak about the samples they see.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFamily<T> {
    x_grid: Vec<T>,
    rows: Vec<Vec<T>>,
}

impl<T: Real> MonotoneFamily<T> {
    /// Validates that the grid increases strictly, that every row is
    /// non-decreasing and that rows decrease pointwise, all with `tol`
    /// slack.
    pub fn with_tolerance(x_grid: Vec<T>, rows: Vec<Vec<T>>, tol: T) -> Result<Self> {
        if x_grid.len() < 2 {
            return Err(Error::invalid("x grid needs at least two points"));
        }
        if x_grid.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::invalid("x grid must be strictly increasing"));
        }
        if rows.is_empty() {
            return Err(Error::invalid("family needs at least one row"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != x_grid.len() {
                return Err(Error::invalid(format!(
                    "row {} has {} values for {} grid points",
                    i + 1,
                    row.len(),
                    x_grid.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("row {} has non-finite values", i + 1)));
            }
            if let Some(j) = row.windows(2).position(|p| p[1] < p[0] - tol) {
                return Err(Error::invalid(format!("row {} decreases between x[{j}] and x[{}]", i + 1, j + 1)));
            }
        }
        for (i, pair) in rows.windows(2).enumerate() {
            if let Some(j) = (0..x_grid.len()).find(|&j| pair[1][j] > pair[0][j] + tol) {
                return Err(Error::invalid(format!("row {} exceeds row {} at x[{j}]", i + 2, i + 1)));
            }
        }
        Ok(Self { x_grid, rows })
    }

    pub fn new(x_grid: Vec<T>, rows: Vec<Vec<T>>) -> Result<Self> {
        Self::with_tolerance(x_grid, rows, T::lit(1e-12))
    }

    /// Samples `f(i, x)` for `i = 1..=m`.
    pub fn from_fn(x_grid: Vec<T>, m: usize, f: impl Fn(usize, T) -> T) -> Result<Self> {
        let rows = (1..=m).map(|i| x_grid.iter().map(|&x| f(i, x)).collect()).collect();
        Self::new(x_grid, rows)
    }

    pub fn x_grid(&self) -> &[T] {
        &self.x_grid
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }
}

/// A function known on a strictly increasing grid, linearly interpolated
/// between nodes and exact at them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn eval(&self, x: T) -> Result<T> {
        let (first, last) = (self.x[0], self.x[self.x.len() - 1]);
        if !(x >= first && x <= last) {
            return Err(Error::domain(format!("{x} outside the sampled range [{first}, {last}]")));
        }
        let k = self.x.partition_point(|&g| g <= x);
        if k == 0 {
            return Ok(self.y[0]);
        }
        let j = k - 1;
        if self.x[j] == x || j + 1 == self.x.len() {
            return Ok(self.y[j]);
        }
        let w = (x - self.x[j]) / (self.x[j + 1] - self.x[j]);
        Ok(self.y[j] + w * (self.y[j + 1] - self.y[j]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseLimit<T> {
    pub limit: SampledFunction<T>,
    /// `|f_m - f_{m-1}|` per grid point (zero for a single row).
    pub tail: Vec<T>,
    pub tail_tolerance: T,
    /// Grid indices whose tail exceeds the tolerance.
    pub unsettled: Vec<usize>,
    /// The limit is non-decreasing on the grid.
    pub monotone: bool,
}

/// Last row of the family with its Cauchy tail.
pub fn pointwise_limit<T: Real>(fam: &MonotoneFamily<T>, tail_tolerance: T) -> PointwiseLimit<T> {
    let m = fam.rows.len();
    let last = fam.rows[m - 1].clone();
    let tail: Vec<T> = if m > 1 {
        last.iter().zip(&fam.rows[m - 2]).map(|(a, b)| (*a - *b).abs()).collect()
    } else {
        vec![T::zero(); last.len()]
    };
    let unsettled = tail
        .iter()
        .enumerate()
        .filter(|(_, t)| **t > tail_tolerance)
        .map(|(j, _)| j)
        .collect();
    let monotone = last.windows(2).all(|p| p[1] >= p[0] - T::lit(1e-12));
    PointwiseLimit {
        limit: SampledFunction { x: fam.x_grid.clone(), y: last },
        tail,
        tail_tolerance,
        unsettled,
        monotone,
    }
}

/// The `i`-th member of the counterexample family.
pub fn remark_family<T: Real>(i: usize, x: T) -> T {
    let i = T::from_usize(i.max(1)).expect("index representable");
    if x >= T::zero() {
        T::one()
    } else if x * i <= -T::one() {
        T::zero()
    } else {
        T::one() + i * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCheck<T> {
    pub side: Side,
    pub x0: T,
    pub value: T,
    pub probes: Vec<T>,
    pub gaps: Vec<T>,
    pub tolerance: T,
    pub pass: bool,
}

/// Probe offsets `2^{-k} h0` for `k = 0..=12`.
pub fn default_probes<T: Real>(h0: T) -> Vec<T> {
    (0..=12).map(|k| h0 * T::lit(0.5f64.powi(k))).collect()
}

/// Default first probe offset `1e-3 · max(1, |x0|)`.
pub fn default_probe_scale<T: Real>(x0: T) -> T {
    T::lit(1e-3) * x0.abs().max(T::one())
}

/// Absolute tolerance `1e-6 · max(1, |g(x0)|)`.
pub fn default_gap_tolerance<T: Real>(value: T) -> T {
    T::lit(1e-6) * value.abs().max(T::one())
}

fn one_sided<T: Real, G>(side: Side, g: G, x0: T, probes: &[T], tolerance: Option<T>) -> Result<ContinuityCheck<T>>
where
    G: Fn(T) -> Result<T>,
{
    if probes.is_empty() || probes.iter().any(|h| !(*h > T::zero())) {
        return Err(Error::invalid("probe offsets must be positive"));
    }
    if probes.windows(2).any(|p| !(p[1] < p[0])) {
        return Err(Error::invalid("probe offsets must decrease"));
    }
    let value = g(x0)?;
    let tolerance = tolerance.unwrap_or_else(|| default_gap_tolerance(value));
    let gaps = probes
        .iter()
        .map(|&h| {
            let x = match side {
                Side::Right => x0 + h,
                Side::Left => x0 - h,
            };
            Ok((g(x)? - value).abs())
        })
        .collect::<Result<Vec<T>>>()?;
    let pass = *gaps.last().expect("non-empty") <= tolerance;
    Ok(ContinuityCheck {
        side,
        x0,
        value,
        probes: probes.to_vec(),
        gaps,
        tolerance,
        pass,
    })
}

/// Gaps `|g(x0 + h_k) - g(x0)|` along decreasing offsets; passes when the
/// gap at the smallest offset is within `tolerance` (default
/// [`default_gap_tolerance`]).
pub fn right_continuity_check<T: Real, G>(g: G, x0: T, probes: &[T], tolerance: Option<T>) -> Result<ContinuityCheck<T>>
where
    G: Fn(T) -> Result<T>,
{
    one_sided(Side::Right, g, x0, probes, tolerance)
}

/// Mirror image of [`right_continuity_check`] using `x0 - h_k`.
pub fn left_continuity_check<T: Real, G>(g: G, x0: T, probes: &[T], tolerance: Option<T>) -> Result<ContinuityCheck<T>>
where
    G: Fn(T) -> Result<T>,
{
    one_sided(Side::Left, g, x0, probes, tolerance)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemarkDemo {
    pub rows: usize,
    pub grid_points: usize,
    pub limit_is_indicator: bool,
    pub right: ContinuityCheck<f64>,
    pub left: ContinuityCheck<f64>,
}

/// Grid on `[-1, 1]` with `n` equally spaced points, merged with `0` and
/// the probe points `±2^{-k}`, `k = 0..=12`.
pub fn remark_grid(n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n.max(2)).map(|k| -1.0 + 2.0 * k as f64 / (n.max(2) - 1) as f64).collect();
    x.push(0.0);
    for h in default_probes(1.0) {
        x.push(h);
        x.push(-h);
    }
    x.sort_by(|a, b| a.total_cmp(b));
    x.dedup();
    x
}

/// The counterexample with `2^13` rows on [`remark_grid`]: its sampled
/// limit is the indicator of `[0, 1]`, right-continuous at 0 with left gap
/// 1.
pub fn remark_demo(n: usize) -> Result<RemarkDemo> {
    let rows = 1 << 13;
    let x = remark_grid(n);
    let fam = MonotoneFamily::from_fn(x, rows, remark_family::<f64>)?;
    let lim = pointwise_limit(&fam, 1e-12);
    let limit_is_indicator = lim
        .limit
        .x
        .iter()
        .zip(&lim.limit.y)
        .all(|(&x, &y)| y == if x >= 0.0 { 1.0 } else { 0.0 });
    let probes = default_probes(1.0);
    let g = |x: f64| lim.limit.eval(x);
    Ok(RemarkDemo {
        rows,
        grid_points: lim.limit.x.len(),
        limit_is_indicator,
        right: right_continuity_check(g, 0.0, &probes, None)?,
        left: left_continuity_check(g, 0.0, &probes, None)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remark_family_values() {
        assert_eq!(remark_family(5, 0.0), 1.0);
        assert!((remark_family(5, -0.1) - 0.5f64).abs() < 1e-15);
        assert_eq!(remark_family(5, -1.0), 0.0);
        assert_eq!(remark_family(5, 0.3f32), 1.0f32);
    }

    #[test]
    fn constant_family_limit() {
        let x = vec![0.0, 0.5, 1.0];
        let fam = MonotoneFamily::from_fn(x, 4, |_, _| 2.5).unwrap();
        let lim = pointwise_limit(&fam, 1e-12);
        assert!(lim.limit.y.iter().all(|&v| v == 2.5));
        assert!(lim.tail.iter().all(|&t| t == 0.0));
        assert!(lim.unsettled.is_empty());
    }

    #[test]
    fn shifted_identity_limit() {
        let x: Vec<f64> = (0..11).map(|k| k as f64 / 10.0).collect();
        let m = 20;
        let fam = MonotoneFamily::from_fn(x.clone(), m, |i, x| x + 1.0 / i as f64).unwrap();
        let lim = pointwise_limit(&fam, 1e-3);
        let tail = 1.0 / (m - 1) as f64 - 1.0 / m as f64;
        for (j, &xj) in x.iter().enumerate() {
            assert!((lim.limit.y[j] - (xj + 1.0 / m as f64)).abs() < 1e-15);
            assert!((lim.tail[j] - tail).abs() < 1e-15);
        }
        assert_eq!(lim.unsettled.len(), x.len());
    }

    #[test]
    fn remark_limit_at_negative_half() {
        let fam = MonotoneFamily::from_fn(vec![-1.0, -0.5, 0.0, 0.5], 10, remark_family::<f64>).unwrap();
        let lim = pointwise_limit(&fam, 1e-12);
        assert_eq!(lim.limit.eval(-0.5).unwrap(), 0.0);
    }

    #[test]
    fn rejects_increasing_rows_in_i() {
        let x = vec![0.0, 1.0];
        assert!(MonotoneFamily::from_fn(x.clone(), 3, |i, x| x + i as f64).is_err());
        assert!(MonotoneFamily::new(x, vec![vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn remark_demo_right_but_not_left() {
        let d = remark_demo(1000).unwrap();
        assert!(d.limit_is_indicator);
        assert!(d.right.pass && d.right.gaps.iter().all(|&g| g == 0.0));
        assert!(!d.left.pass);
        assert_eq!(*d.left.gaps.last().unwrap(), 1.0);
    }

    #[test]
    fn flat_profile_is_continuous() {
        let g = |v: f64| Ok(2.0 * (std::f64::consts::PI * v).sqrt());
        for v in [0.5, 1.0, 7.0] {
            let probes = default_probes(default_probe_scale(v));
            assert!(right_continuity_check(g, v, &probes, None).unwrap().pass);
            assert!(left_continuity_check(g, v, &probes, None).unwrap().pass);
        }
    }

    #[test]
    fn sampled_interpolation() {
        let s = SampledFunction { x: vec![0.0f32, 1.0, 2.0], y: vec![0.0, 2.0, 2.0] };
        assert_eq!(s.eval(0.5).unwrap(), 1.0);
        assert_eq!(s.eval(2.0).unwrap(), 2.0);
        assert!(s.eval(2.5).is_err());
    }
}
