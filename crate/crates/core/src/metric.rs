//! Metric fields, orientation metadata and the signature guard.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeometryError, Result};
use crate::field::{MatrixField, ScalarField};
use crate::jets::{Coords, Jet2, JetError, DIM};
use crate::linalg::{invert4, values4, Mat4};
use crate::scalar::Scalar;

/// Relative determinant threshold below which a metric counts as singular.
pub const SINGULAR_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Riemannian,
    Lorentzian,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signature::Riemannian => f.write_str("riemannian"),
            Signature::Lorentzian => f.write_str("lorentzian"),
        }
    }
}

/// Declared orientation: the ordered coframe legs whose wedge is positive,
/// and the sign of that wedge relative to `dx^0∧dx^1∧dx^2∧dx^3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub legs: [String; DIM],
    pub sign: i8,
}

impl Orientation {
    pub fn new(legs: [&str; DIM], sign: i8) -> Self {
        assert!(sign == 1 || sign == -1, "orientation sign must be ±1");
        Self { legs: legs.map(String::from), sign }
    }

    /// `e¹∧e²∧e³∧e⁴` positively oriented with the coordinate volume form.
    pub fn standard() -> Self {
        Self::new(["e1", "e2", "e3", "e4"], 1)
    }

    /// The opposite orientation (last two legs swapped).
    pub fn flipped(&self) -> Self {
        let mut legs = self.legs.clone();
        legs.swap(2, 3);
        Self { legs, sign: -self.sign }
    }

    pub fn describe(&self) -> String {
        format!(
            "{}^{}^{}^{} (sign {:+} relative to dx0^dx1^dx2^dx3)",
            self.legs[0], self.legs[1], self.legs[2], self.legs[3], self.sign
        )
    }
}

/// `g_{μν}` as a symmetric matrix of jets over a chart.
#[derive(Clone, Debug)]
pub struct MetricField<T> {
    name: String,
    components: MatrixField<T>,
    signature: Signature,
    orientation: Orientation,
}

/// Outcome of [`signature_guard`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardOutcome {
    Pass,
    Refused { reason: String },
}

impl GuardOutcome {
    pub fn is_refused(&self) -> bool {
        matches!(self, GuardOutcome::Refused { .. })
    }
}

impl<T: Scalar> MetricField<T> {
    /// Wraps a component function; only the upper triangle is read and the
    /// result is mirrored, so the matrix is symmetric by construction.
    pub fn new(
        name: impl Into<String>,
        chart: Arc<Chart<T>>,
        signature: Signature,
        orientation: Orientation,
        g: impl Fn(&Coords<T>) -> std::result::Result<Mat4<Jet2<T>>, JetError> + Send + Sync + 'static,
    ) -> Self {
        let components = MatrixField::new(chart, move |c| {
            let mut m = g(c)?;
            for i in 0..DIM {
                for j in 0..i {
                    m[i][j] = m[j][i];
                }
            }
            Ok(m)
        });
        Self { name: name.into(), components, signature, orientation }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Arc<Chart<T>> {
        self.components.chart()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn components(&self) -> &MatrixField<T> {
        &self.components
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Self { orientation, ..self.clone() }
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self { name: name.into(), ..self.clone() }
    }

    /// `g_{μν}(p)` with exact first and second partials.
    pub fn metric_at(&self, p: &ChartPoint<T>) -> Result<Mat4<Jet2<T>>> {
        let g = self.components.at(p)?;
        if g.iter().flatten().any(|e| !e.is_finite()) {
            return Err(GeometryError::Domain {
                chart: self.chart().name().to_string(),
                point: p.coords_f64(),
                source: JetError::NonFinite { function: "metric" },
            });
        }
        Ok(g)
    }

    /// `g^{μν}(p)` computed through jet arithmetic.
    pub fn inverse_metric_at(&self, p: &ChartPoint<T>) -> Result<Mat4<Jet2<T>>> {
        let g = self.metric_at(p)?;
        invert_metric(&g, p)
    }

    /// Metric and inverse at once.
    pub fn metric_and_inverse_at(&self, p: &ChartPoint<T>) -> Result<[Mat4<Jet2<T>>; 2]> {
        let g = self.metric_at(p)?;
        let gi = invert_metric(&g, p)?;
        Ok([g, gi])
    }

    /// Leading principal minors of `g(p)` are all positive.
    pub fn is_positive_definite_at(&self, p: &ChartPoint<T>) -> Result<bool> {
        let g = values4(&self.metric_at(p)?);
        Ok(leading_minors(&g).iter().all(|m| *m > T::zero()))
    }

    /// The conformally related metric `λ g`.
    pub fn conformal(&self, name: impl Into<String>, factor: &ScalarField<T>) -> Self {
        let inner = self.components.clone();
        let factor = factor.clone();
        let components = MatrixField::new(self.chart().clone(), move |c| {
            let l = factor.eval(c)?;
            let g = inner.eval(c)?;
            Ok(g.map(|row| row.map(|e| e * l)))
        });
        Self { name: name.into(), components, signature: self.signature, orientation: self.orientation.clone() }
    }
}

fn invert_metric<T: Scalar>(g: &Mat4<Jet2<T>>, p: &ChartPoint<T>) -> Result<Mat4<Jet2<T>>> {
    invert4(g, T::lit(SINGULAR_REL_TOL)).map(|inv| inv.inverse).map_err(|(det, scale)| GeometryError::Singular {
        point: p.coords_f64(),
        det: det.as_f64(),
        scale: scale.as_f64(),
    })
}

/// The four leading principal minors of a 4×4 matrix.
pub fn leading_minors<T: Scalar>(g: &Mat4<T>) -> [T; DIM] {
    let m1 = g[0][0];
    let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let m3 = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    let m4 = invert4(g, T::zero()).map(|i| i.det).unwrap_or_else(|(d, _)| d);
    [m1, m2, m3, m4]
}

/// Refuses Hermitian and Kähler checks on Lorentzian metrics: a Lorentzian
/// manifold admits no almost Hermitian structure.
pub fn signature_guard<T: Scalar>(metric: &MetricField<T>) -> GuardOutcome {
    match metric.signature() {
        Signature::Riemannian => GuardOutcome::Pass,
        Signature::Lorentzian => GuardOutcome::Refused {
            reason: format!(
                "metric `{}` has Lorentzian signature; a Lorentzian manifold admits no almost Hermitian structure",
                metric.name()
            ),
        },
    }
}

/// The flat metric `diag(1,1,1,1)` on a chart.
pub fn euclidean<T: Scalar>(chart: Arc<Chart<T>>) -> MetricField<T> {
    MetricField::new("euclidean", chart, Signature::Riemannian, Orientation::standard(), |_| {
        let mut g = [[Jet2::zero(); DIM]; DIM];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = Jet2::one();
        }
        Ok(g)
    })
}
