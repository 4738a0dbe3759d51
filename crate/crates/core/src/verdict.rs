//! Structured pass/fail results with max-merge aggregation.

use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::chart::ChartPoint;
use crate::error::Result;
use crate::jets::DIM;
use crate::scalar::Scalar;

/// A residual observed at one sample point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub residual: f64,
    pub index: usize,
    pub point: [f64; DIM],
}

impl Observation {
    /// Keeps the larger residual; ties go to the smaller sample index so the
    /// result does not depend on merge order. NaN wins over everything.
    pub fn merge(self, other: Self) -> Self {
        match (self.residual.is_nan(), other.residual.is_nan()) {
            (true, true) => return if other.index < self.index { other } else { self },
            (false, false) => {}
            (true, false) => return self,
            (false, true) => return other,
        }
        if other.residual > self.residual || (other.residual == self.residual && other.index < self.index) {
            other
        } else {
            self
        }
    }
}

/// Max-merge over an iterator of observations.
pub fn worst(obs: impl IntoIterator<Item = Observation>) -> Option<Observation> {
    obs.into_iter().reduce(Observation::merge)
}

/// Aggregate result of a residual test over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub max_residual: f64,
    pub argmax_point: Option<[f64; DIM]>,
    pub tolerance: f64,
    pub passed: bool,
}

impl Verdict {
    /// Passes when the worst residual is strictly below `tolerance`. An empty
    /// sample passes vacuously; a NaN residual never passes.
    pub fn below(worst: Option<Observation>, tolerance: f64) -> Self {
        match worst {
            None => Self { max_residual: 0.0, argmax_point: None, tolerance, passed: true },
            Some(o) => Self {
                max_residual: o.residual,
                argmax_point: Some(o.point),
                tolerance,
                passed: o.residual < tolerance,
            },
        }
    }

    /// Passes when the smallest observed value, carried in `min.residual`,
    /// is strictly above `threshold`. An empty sample fails.
    pub fn above(min: Option<Observation>, threshold: f64) -> Self {
        match min {
            None => Self { max_residual: f64::NAN, argmax_point: None, tolerance: threshold, passed: false },
            Some(o) => Self {
                max_residual: o.residual,
                argmax_point: Some(o.point),
                tolerance: threshold,
                passed: o.residual > threshold,
            },
        }
    }

    pub fn is_nan(&self) -> bool {
        self.max_residual.is_nan()
    }
}

/// Evaluates `f` at every point (in parallel) and max-merges the results.
/// The first error in sample order is returned.
pub fn sample_max<T: Scalar>(
    points: &[ChartPoint<T>],
    f: impl Fn(&ChartPoint<T>) -> Result<T> + Sync,
) -> Result<Option<Observation>> {
    let results: Vec<Result<Observation>> = points
        .par_iter()
        .enumerate()
        .map(|(index, p)| f(p).map(|r| Observation { residual: r.as_f64(), index, point: p.coords_f64() }))
        .collect();
    let mut out = None;
    for r in results {
        let o = r?;
        out = Some(match out {
            None => o,
            Some(prev) => Observation::merge(prev, o),
        });
    }
    Ok(out)
}

/// `Verdict::below` over `sample_max`.
pub fn sample_verdict<T: Scalar>(
    points: &[ChartPoint<T>],
    tolerance: f64,
    f: impl Fn(&ChartPoint<T>) -> Result<T> + Sync,
) -> Result<Verdict> {
    Ok(Verdict::below(sample_max(points, f)?, tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(residual: f64, index: usize) -> Observation {
        Observation { residual, index, point: [index as f64; DIM] }
    }

    #[test]
    fn merge_is_order_independent() {
        let a = [obs(1.0, 3), obs(2.0, 5), obs(2.0, 1), obs(0.5, 0)];
        let fwd = worst(a).unwrap();
        let rev = worst(a.into_iter().rev()).unwrap();
        assert_eq!(fwd, rev);
        assert_eq!(fwd.index, 1);
    }

    #[test]
    fn nan_poisons_the_maximum() {
        let w = worst([obs(1.0, 0), obs(f64::NAN, 4), obs(3.0, 2)]).unwrap();
        assert!(w.residual.is_nan());
        assert!(!Verdict::below(Some(w), 1.0).passed);
    }
}
