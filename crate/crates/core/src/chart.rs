//! Coordinate charts, domain guards and chart points.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::jets::{seed_all, Coords, DIM};
use crate::scalar::Scalar;

type GuardFn<T> = Arc<dyn Fn(&[T; DIM]) -> bool + Send + Sync>;

/// A named inequality that must hold for a point to lie in the chart domain.
#[derive(Clone)]
pub struct Guard<T> {
    label: String,
    test: GuardFn<T>,
}

impl<T> Guard<T> {
    pub fn new(label: impl Into<String>, test: impl Fn(&[T; DIM]) -> bool + Send + Sync + 'static) -> Self {
        Self { label: label.into(), test: Arc::new(test) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn holds(&self, coords: &[T; DIM]) -> bool {
        (self.test)(coords)
    }
}

impl<T> fmt::Debug for Guard<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Guard").field(&self.label).finish()
    }
}

/// A four-dimensional coordinate chart.
#[derive(Clone, Debug)]
pub struct Chart<T> {
    name: Arc<str>,
    coordinates: [String; DIM],
    angular: [bool; DIM],
    guards: Vec<Guard<T>>,
}

impl<T: Scalar> Chart<T> {
    pub fn new(name: &str, coordinates: [&str; DIM]) -> Self {
        Self {
            name: Arc::from(name),
            coordinates: coordinates.map(String::from),
            angular: [false; DIM],
            guards: Vec::new(),
        }
    }

    /// Marks coordinates that are angles; they enter potential ansätze only
    /// through `sin`/`cos`.
    pub fn with_angular(mut self, angular: [bool; DIM]) -> Self {
        self.angular = angular;
        self
    }

    pub fn with_guard(
        mut self,
        label: impl Into<String>,
        test: impl Fn(&[T; DIM]) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.guards.push(Guard::new(label, test));
        self
    }

    pub fn push_guard(&mut self, guard: Guard<T>) {
        self.guards.push(guard);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coordinates(&self) -> &[String; DIM] {
        &self.coordinates
    }

    pub fn angular(&self) -> [bool; DIM] {
        self.angular
    }

    pub fn guards(&self) -> &[Guard<T>] {
        &self.guards
    }

    /// First guard that fails at `coords`, if any. Non-finite coordinates
    /// always fail.
    pub fn violated_guard(&self, coords: &[T; DIM]) -> Option<String> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Some("finite coordinates".to_string());
        }
        self.guards.iter().find(|g| !g.holds(coords)).map(|g| g.label.clone())
    }

    /// A point on this chart; `valid` records whether every guard passes.
    pub fn point(&self, coords: [T; DIM]) -> ChartPoint<T> {
        let valid = self.violated_guard(&coords).is_none();
        ChartPoint { coords, chart: self.name.clone(), valid }
    }

    /// Validates `p` against this chart and returns its coordinate jets.
    pub fn seed(&self, p: &ChartPoint<T>) -> Result<Coords<T>> {
        if *p.chart != *self.name {
            return Err(GeometryError::ChartMismatch { expected: self.name.to_string(), found: p.chart.to_string() });
        }
        if let Some(guard) = self.violated_guard(&p.coords) {
            return Err(GeometryError::Guard { chart: self.name.to_string(), point: p.coords_f64(), guard });
        }
        Ok(seed_all(p.coords))
    }
}

/// Four coordinate values on a named chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint<T> {
    pub coords: [T; DIM],
    pub chart: Arc<str>,
    pub valid: bool,
}

impl<T: Scalar> ChartPoint<T> {
    pub fn coords_f64(&self) -> [f64; DIM] {
        self.coords.map(|c| c.as_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart<f64> {
        Chart::new("polar", ["r", "theta", "phi", "t"])
            .with_guard("r > 0", |x| x[0] > 0.0)
            .with_guard("0 < theta < pi", |x| x[1] > 0.0 && x[1] < std::f64::consts::PI)
    }

    #[test]
    fn guards_set_validity() {
        let c = chart();
        assert!(c.point([1.0, 1.0, 0.0, 0.0]).valid);
        assert!(!c.point([-1.0, 1.0, 0.0, 0.0]).valid);
        assert!(!c.point([1.0, f64::NAN, 0.0, 0.0]).valid);
    }

    #[test]
    fn seeding_an_invalid_point_names_the_guard() {
        let c = chart();
        let p = c.point([1.0, 0.0, 0.0, 0.0]);
        match c.seed(&p) {
            Err(GeometryError::Guard { guard, .. }) => assert_eq!(guard, "0 < theta < pi"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn foreign_points_are_rejected() {
        let c = chart();
        let other: Chart<f64> = Chart::new("cartesian", ["x", "y", "z", "t"]);
        let p = other.point([1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(c.seed(&p), Err(GeometryError::ChartMismatch { .. })));
    }
}
