//! Frames and coframes over a chart.

use std::sync::Arc;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeometryError, Result};
use crate::field::{MatrixField, ScalarField, VectorField};
use crate::forms::{Form, KFormField};
use crate::jets::{Coords, Jet2, JetError, DIM};
use crate::linalg::{invert4, max_abs4, transpose4, values4, Mat4};
use crate::metric::{MetricField, SINGULAR_REL_TOL};
use crate::scalar::Scalar;

/// A coframe `{e^a}` given by coefficient functions; row `a` holds the
/// components of `e^{a+1}` on `dx^μ`. The dual vectors are obtained from the
/// jet inverse, so their derivatives are exact.
#[derive(Clone, Debug)]
pub struct FrameField<T> {
    label: String,
    coframe: MatrixField<T>,
}

fn frame_from_coframe<T: Scalar>(e: &Mat4<Jet2<T>>) -> std::result::Result<Mat4<Jet2<T>>, JetError> {
    // E V = I with V[μ][a] = e_a^μ; return rows indexed by a
    let inv = invert4(e, T::lit(SINGULAR_REL_TOL))
        .map_err(|(det, _)| JetError::Domain { function: "coframe inverse", argument: det.as_f64() })?;
    Ok(transpose4(&inv.inverse))
}

impl<T: Scalar> FrameField<T> {
    pub fn new(
        label: impl Into<String>,
        chart: Arc<Chart<T>>,
        coframe: impl Fn(&Coords<T>) -> std::result::Result<Mat4<Jet2<T>>, JetError> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), coframe: MatrixField::new(chart, coframe) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn chart(&self) -> &Arc<Chart<T>> {
        self.coframe.chart()
    }

    pub fn coframe_field(&self) -> &MatrixField<T> {
        &self.coframe
    }

    pub fn coframe_at(&self, p: &ChartPoint<T>) -> Result<Mat4<Jet2<T>>> {
        self.coframe.at(p)
    }

    /// `frame[a][μ] = e_{a+1}^μ` at `p`.
    pub fn frame_at(&self, p: &ChartPoint<T>) -> Result<Mat4<Jet2<T>>> {
        let e = self.coframe_at(p)?;
        frame_from_coframe(&e).map_err(|source| GeometryError::Domain {
            chart: self.chart().name().to_string(),
            point: p.coords_f64(),
            source,
        })
    }

    pub fn coframe_values(&self, p: &ChartPoint<T>) -> Result<Mat4<T>> {
        Ok(values4(&self.coframe_at(p)?))
    }

    pub fn frame_values(&self, p: &ChartPoint<T>) -> Result<Mat4<T>> {
        Ok(values4(&self.frame_at(p)?))
    }

    /// The vector field `e_{a+1}`.
    pub fn vector_field(&self, a: usize) -> VectorField<T> {
        let coframe = self.coframe.clone();
        VectorField::new(self.chart().clone(), move |c| Ok(frame_from_coframe(&coframe.eval(c)?)?[a]))
    }

    /// The 1-form `e^{a+1}`.
    pub fn one_form(&self, a: usize) -> KFormField<T> {
        let coframe = self.coframe.clone();
        KFormField::one_form(format!("e{}", a + 1), self.chart().clone(), move |c| Ok(coframe.eval(c)?[a]))
    }

    /// `Σ sign·e^a∧e^b` over the given zero-based leg pairs.
    pub fn two_form(&self, label: impl Into<String>, terms: &[(usize, usize, i8)]) -> KFormField<T> {
        let coframe = self.coframe.clone();
        let terms = terms.to_vec();
        KFormField::new(label, self.chart().clone(), 2, move |c| {
            let e = coframe.eval(c)?;
            let mut out = Form::zero(2).expect("degree 2");
            for (a, b, s) in &terms {
                let w = Form::wedge_covectors(&e[*a], &e[*b]).scale(Jet2::constant(T::lit(*s as f64)));
                out = out.add(&w).expect("2-forms");
            }
            Ok(out)
        })
    }

    /// The coframe multiplied by `f`; the dual frame scales by `1/f`.
    pub fn scaled(&self, label: impl Into<String>, f: &ScalarField<T>) -> Self {
        let (coframe, f) = (self.coframe.clone(), f.clone());
        Self::new(label, self.chart().clone(), move |c| {
            let s = f.eval(c)?;
            Ok(coframe.eval(c)?.map(|row| row.map(|v| v * s)))
        })
    }

    /// `max|⟨e^a, e_b⟩ − δ^a_b|`.
    pub fn duality_residual(&self, p: &ChartPoint<T>) -> Result<T> {
        let e = self.coframe_values(p)?;
        let v = self.frame_values(p)?;
        let mut worst = T::zero();
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = T::zero();
                for mu in 0..DIM {
                    s = s + e[a][mu] * v[b][mu];
                }
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((s - target).abs());
            }
        }
        Ok(worst)
    }

    /// `G[a][b] = g(e_a, e_b)`.
    pub fn gram(&self, metric: &MetricField<T>, p: &ChartPoint<T>) -> Result<Mat4<T>> {
        let g = values4(&metric.metric_at(p)?);
        let v = self.frame_values(p)?;
        let mut out = [[T::zero(); DIM]; DIM];
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = T::zero();
                for mu in 0..DIM {
                    for nu in 0..DIM {
                        s = s + g[mu][nu] * v[a][mu] * v[b][nu];
                    }
                }
                out[a][b] = s;
            }
        }
        Ok(out)
    }

    /// `max|g(e_a, e_b) − δ_ab|`.
    pub fn orthonormality_residual(&self, metric: &MetricField<T>, p: &ChartPoint<T>) -> Result<T> {
        let mut gram = self.gram(metric, p)?;
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] = row[i] - T::one();
        }
        Ok(max_abs4(&gram))
    }

    /// `max|Σ_a e^a_μ e^a_ν − g_{μν}| / max|g|`, the coframe form of the
    /// orthonormality test.
    pub fn coframe_gram_residual(&self, metric: &MetricField<T>, p: &ChartPoint<T>) -> Result<T> {
        let g = values4(&metric.metric_at(p)?);
        let e = self.coframe_values(p)?;
        let mut worst = T::zero();
        for mu in 0..DIM {
            for nu in 0..DIM {
                let mut s = T::zero();
                for row in &e {
                    s = s + row[mu] * row[nu];
                }
                worst = worst.max((s - g[mu][nu]).abs());
            }
        }
        Ok(worst / max_abs4(&g))
    }
}
