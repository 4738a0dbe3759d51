//! Pure coefficient functions over a chart.

use std::fmt;
use std::sync::Arc;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeometryError, Result};
use crate::jets::{Coords, Jet2, JetError, DIM};
use crate::linalg::Mat4;
use crate::scalar::Scalar;

type FieldFn<T, O> = Arc<dyn Fn(&Coords<T>) -> std::result::Result<O, JetError> + Send + Sync>;

/// A pure function from coordinate jets to `O`, bound to a chart.
pub struct Field<T, O> {
    chart: Arc<Chart<T>>,
    f: FieldFn<T, O>,
}

impl<T, O> Clone for Field<T, O> {
    fn clone(&self) -> Self {
        Self { chart: self.chart.clone(), f: self.f.clone() }
    }
}

impl<T, O> fmt::Debug for Field<T, O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").finish_non_exhaustive()
    }
}

pub type ScalarField<T> = Field<T, Jet2<T>>;
pub type VectorField<T> = Field<T, [Jet2<T>; DIM]>;
pub type MatrixField<T> = Field<T, Mat4<Jet2<T>>>;

impl<T: Scalar, O: 'static> Field<T, O> {
    pub fn new(
        chart: Arc<Chart<T>>,
        f: impl Fn(&Coords<T>) -> std::result::Result<O, JetError> + Send + Sync + 'static,
    ) -> Self {
        Self { chart, f: Arc::new(f) }
    }

    pub fn chart(&self) -> &Arc<Chart<T>> {
        &self.chart
    }

    /// Evaluates on already-validated coordinate jets.
    pub fn eval(&self, coords: &Coords<T>) -> std::result::Result<O, JetError> {
        (self.f)(coords)
    }

    /// Validates `p` against the chart guards and evaluates.
    pub fn at(&self, p: &ChartPoint<T>) -> Result<O> {
        let coords = self.chart.seed(p)?;
        self.eval(&coords).map_err(|source| GeometryError::Domain {
            chart: self.chart.name().to_string(),
            point: p.coords_f64(),
            source,
        })
    }

    pub fn map<P: 'static>(
        &self,
        g: impl Fn(O) -> std::result::Result<P, JetError> + Send + Sync + 'static,
    ) -> Field<T, P> {
        let inner = self.f.clone();
        Field::new(self.chart.clone(), move |c| g(inner(c)?))
    }
}

impl<T: Scalar> ScalarField<T> {
    pub fn constant(chart: Arc<Chart<T>>, value: T) -> Self {
        Field::new(chart, move |_| Ok(Jet2::constant(value)))
    }
}

impl<T: Scalar> VectorField<T> {
    /// The coordinate field `∂_index`.
    pub fn coordinate(chart: Arc<Chart<T>>, index: usize) -> Self {
        Field::new(chart, move |_| {
            let mut v = [Jet2::zero(); DIM];
            v[index] = Jet2::one();
            Ok(v)
        })
    }

    /// Pointwise product `f X`.
    pub fn scaled_by(&self, f: &ScalarField<T>) -> Self {
        let (x, f) = (self.clone(), f.clone());
        Field::new(self.chart.clone(), move |c| {
            let s = f.eval(c)?;
            Ok(x.eval(c)?.map(|v| v * s))
        })
    }
}
