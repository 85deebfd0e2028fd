//! Exponent grids and the shared one-dimensional supremum search.
//!
//! Every supremum over `p` in this crate (GLS norms, fundamental functions,
//! Young-Fenchel transforms) runs through [`sup_over_grid`]: a discrete max
//! over a [`PGrid`] followed by golden-section refinement inside the bracket
//! around the discrete maximizer. The result is a lower bound on the true
//! supremum.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GlsError, Result};
use crate::genfun::{ExponentInterval, GeneratingFunction};
use crate::measure::Exponent;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Parameters used to build default grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub points: usize,
    /// Truncation of unbounded intervals.
    pub p_max: f64,
    pub refinement_depth: usize,
    /// Back-off from an open finite right end, relative to `b - a`.
    pub endpoint_rel_offset: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            points: 256,
            p_max: 1e3,
            refinement_depth: 40,
            endpoint_rel_offset: 1e-6,
        }
    }
}

/// A strictly increasing list of exponents inside an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PGrid {
    interval: ExponentInterval,
    points: Arc<[Exponent]>,
    endpoint_offset: f64,
    refinement_depth: usize,
}

impl PGrid {
    /// Explicit grid; points are sorted and deduplicated.
    pub fn from_points(
        interval: ExponentInterval,
        points: impl IntoIterator<Item = Exponent>,
        refinement_depth: usize,
    ) -> Result<Self> {
        let mut pts: Vec<Exponent> = points.into_iter().collect();
        if pts.is_empty() {
            return Err(GlsError::EmptyGrid);
        }
        pts.sort_by(|x, y| x.partial_cmp(y).expect("exponents are ordered"));
        pts.dedup();
        if let Some(&p) = pts.iter().find(|&&p| !interval.contains(p)) {
            return Err(GlsError::OutOfDomain {
                p: p.value(),
                domain: interval.to_string(),
            });
        }
        Ok(Self {
            interval,
            points: pts.into(),
            endpoint_offset: 0.0,
            refinement_depth,
        })
    }

    /// Log-spaced points on `[a, b - ε]`, or `[a, p_max]` when `b = ∞`.
    pub fn log_spaced(interval: ExponentInterval, config: &GridConfig) -> Result<Self> {
        if config.points == 0 {
            return Err(GlsError::EmptyGrid);
        }
        let a = interval.a;
        let (upper, offset) = match interval.b {
            Exponent::Finite(b) if interval.right_closed => (b, 0.0),
            Exponent::Finite(b) => {
                let eps = config.endpoint_rel_offset * (b - a);
                (b - eps, eps)
            }
            Exponent::Infinity => (config.p_max.max(a), 0.0),
        };
        let points = log_space(a, upper, config.points);
        let mut grid = Self::from_points(interval, points, config.refinement_depth)?;
        grid.endpoint_offset = offset;
        Ok(grid)
    }

    /// Default grid for `psi`: log-spaced over its domain, plus its anchor
    /// points, plus `∞` when `ψ(∞)` is finite.
    pub fn for_function(psi: &GeneratingFunction, config: &GridConfig) -> Result<Self> {
        let base = Self::log_spaced(*psi.domain(), config)?;
        let mut extra: Vec<Exponent> = psi
            .anchor_points()
            .into_iter()
            .filter(|&p| base.interval.contains(p))
            .collect();
        if psi.domain().b == Exponent::Infinity
            && psi.eval(Exponent::Infinity).map(f64::is_finite).unwrap_or(false)
        {
            extra.push(Exponent::Infinity);
        }
        Ok(base.with_points(extra))
    }

    /// Adds points (each must lie in the interval; others are dropped).
    pub fn with_points(&self, extra: impl IntoIterator<Item = Exponent>) -> Self {
        let mut pts: Vec<Exponent> = self.points.to_vec();
        pts.extend(extra.into_iter().filter(|&p| self.interval.contains(p)));
        pts.sort_by(|x, y| x.partial_cmp(y).expect("exponents are ordered"));
        pts.dedup();
        Self {
            points: pts.into(),
            ..self.clone()
        }
    }

    pub fn with_refinement(&self, depth: usize) -> Self {
        Self {
            refinement_depth: depth,
            ..self.clone()
        }
    }

    pub fn interval(&self) -> &ExponentInterval {
        &self.interval
    }

    pub fn points(&self) -> &[Exponent] {
        &self.points
    }

    pub fn endpoint_offset(&self) -> f64 {
        self.endpoint_offset
    }

    pub fn refinement_depth(&self) -> usize {
        self.refinement_depth
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn last_finite_index(&self) -> Option<usize> {
        self.points.iter().rposition(|p| p.is_finite())
    }
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<Exponent> {
    if n == 1 || hi <= lo {
        return vec![Exponent::Finite(lo)];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            let p = match i {
                0 => lo,
                i if i == n - 1 => hi,
                i => (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp(),
            };
            Exponent::Finite(p)
        })
        .collect()
}

/// Outcome of a supremum search.
#[derive(Debug, Clone, PartialEq)]
pub struct SupResult {
    pub value: f64,
    pub argmax_p: Exponent,
    /// Maximum sits on the last finite point before an open or truncated end,
    /// so the true supremum may be larger (possibly infinite).
    pub endpoint_flag: bool,
    pub grid_used: PGrid,
}

/// Maximizes `objective` over `grid`, then refines by golden-section search
/// in the bracket around the discrete maximizer. Ties go to the smaller `p`.
/// NaN evaluations are ignored.
pub fn sup_over_grid(objective: impl Fn(Exponent) -> f64, grid: &PGrid) -> Result<SupResult> {
    if grid.is_empty() {
        return Err(GlsError::EmptyGrid);
    }
    let values: Vec<f64> = grid.points.iter().map(|&p| objective(p)).collect();
    let (k, best) = argmax_first(&values);
    let mut value = best;
    let mut argmax_p = grid.points[k];

    if grid.refinement_depth > 0 && best.is_finite() {
        if let Some((lo, hi)) = bracket(grid.points(), k) {
            let f = |x: f64| {
                let v = objective(Exponent::Finite(x));
                if v.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    v
                }
            };
            let (x, fx) = golden_max(f, lo, hi, grid.refinement_depth);
            if fx > value {
                value = fx;
                argmax_p = Exponent::Finite(x);
            }
        }
    }

    let endpoint_flag = !grid.interval.right_closed
        && grid.last_finite_index() == Some(k)
        && argmax_p.value() >= grid.points[k].value()
        && grid.points.len() > 1;
    Ok(SupResult {
        value,
        argmax_p,
        endpoint_flag,
        grid_used: grid.clone(),
    })
}

fn argmax_first(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    if best.1 == f64::NEG_INFINITY {
        // all NaN or -inf
        (0, values[0].max(f64::NEG_INFINITY))
    } else {
        best
    }
}

fn bracket(points: &[Exponent], k: usize) -> Option<(f64, f64)> {
    let centre = match points[k] {
        Exponent::Finite(p) => p,
        Exponent::Infinity => return None,
    };
    let lo = if k > 0 { points[k - 1].value() } else { centre };
    let hi = match points.get(k + 1) {
        Some(Exponent::Finite(p)) => *p,
        _ => centre,
    };
    (lo < hi).then_some((lo, hi))
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(a: f64, b: f64, n: usize, depth: usize) -> PGrid {
        let iv = ExponentInterval::finite(a, b).unwrap();
        let cfg = GridConfig {
            points: n,
            refinement_depth: depth,
            ..GridConfig::default()
        };
        PGrid::log_spaced(iv, &cfg).unwrap()
    }

    #[test]
    fn constant_objective_ties_to_smallest() {
        let g = unit_grid(1.0, 5.0, 17, 40);
        let r = sup_over_grid(|_| 1.0, &g).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.argmax_p, Exponent::Finite(1.0));
        assert!(!r.endpoint_flag);
    }

    #[test]
    fn quadratic_peak_is_refined() {
        let g = unit_grid(1.0, 3.0, 9, 40);
        let r = sup_over_grid(|p| -(p.value() - 2.0).powi(2), &g).unwrap();
        assert!(r.value <= 0.0 && r.value > -1e-12);
        assert!((r.argmax_p.value() - 2.0).abs() < 1e-6);
        let again = r.argmax_p;
        assert_eq!(r.value, -(again.value() - 2.0).powi(2));
    }

    #[test]
    fn decreasing_objective_peaks_at_left_end() {
        let g = unit_grid(1.0, 4.0, 64, 40);
        let r = sup_over_grid(|p| 1.0 / p.value(), &g).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.argmax_p, Exponent::Finite(1.0));
    }

    #[test]
    fn increasing_objective_sets_endpoint_flag() {
        let g = unit_grid(1.0, 4.0, 64, 40);
        let r = sup_over_grid(|p| p.value(), &g).unwrap();
        assert!(r.endpoint_flag);
        assert!(r.value < 4.0 && r.value > 3.99);
    }

    #[test]
    fn empty_grid_rejected() {
        let iv = ExponentInterval::finite(1.0, 2.0).unwrap();
        assert_eq!(PGrid::from_points(iv, [], 0).unwrap_err(), GlsError::EmptyGrid);
    }

    #[test]
    fn default_grid_shape() {
        let g = unit_grid(2.0, 6.0, 256, 40);
        assert_eq!(g.len(), 256);
        assert_eq!(g.points()[0], Exponent::Finite(2.0));
        let last = g.points()[255].value();
        assert!((last - (6.0 - 4e-6)).abs() < 1e-12);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));

        let unbounded = PGrid::log_spaced(ExponentInterval::unbounded(1.0).unwrap(), &GridConfig::default()).unwrap();
        assert_eq!(unbounded.points().last().unwrap().value(), 1e3);
    }
}
