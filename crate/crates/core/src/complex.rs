//! Almost complex structures: Kähler forms, Lie brackets, the Nijenhuis
//! tensor, Hermitian compatibility and quaternionic relations.
//!
//! `J` is stored in coordinates as `j[α][σ] = J^α_σ`, so `(JX)^α = J^α_σ X^σ`.

use std::sync::Arc;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeometryError, Result};
use crate::field::{MatrixField, ScalarField, VectorField};
use crate::forms::{Form, KFormField};
use crate::frame::FrameField;
use crate::jets::{Coords, Jet2, JetError, DIM};
use crate::linalg::{identity4, invert4, matmul4, matvec4, max_abs4, transpose4, values4, Mat4, Vec4};
use crate::metric::{MetricField, SINGULAR_REL_TOL};
use crate::scalar::Scalar;
use crate::verdict::{sample_verdict, Verdict};

/// A (1,1)-tensor field `J^α_σ` over a chart.
#[derive(Clone, Debug)]
pub struct AlmostComplexField<T> {
    label: String,
    j: MatrixField<T>,
}

impl<T: Scalar> AlmostComplexField<T> {
    pub fn from_matrix(
        label: impl Into<String>,
        chart: Arc<Chart<T>>,
        f: impl Fn(&Coords<T>) -> std::result::Result<Mat4<Jet2<T>>, JetError> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), j: MatrixField::new(chart, f) }
    }

    /// `Ĵ e_b = s_b e_{a_b}` for `images[b] = (a_b, s_b)` (zero-based legs),
    /// pushed to coordinates: `J^α_σ = Σ_b s_b e_{a_b}^α e^b_σ`.
    pub fn from_frame_map(label: impl Into<String>, frame: &FrameField<T>, images: [(usize, i8); DIM]) -> Self {
        let coframe = frame.coframe_field().clone();
        Self::from_matrix(label, frame.chart().clone(), move |c| {
            let e = coframe.eval(c)?;
            let inv = invert4(&e, T::lit(SINGULAR_REL_TOL))
                .map_err(|(det, _)| JetError::Domain { function: "coframe inverse", argument: det.as_f64() })?;
            // inv[α][a] = e_a^α
            let mut j = [[Jet2::zero(); DIM]; DIM];
            for (alpha, row) in j.iter_mut().enumerate() {
                for (sigma, entry) in row.iter_mut().enumerate() {
                    let mut acc = Jet2::zero();
                    for (b, (a, s)) in images.iter().enumerate() {
                        let term = inv.inverse[alpha][*a] * e[b][sigma];
                        acc = if *s < 0 { acc - term } else { acc + term };
                    }
                    *entry = acc;
                }
            }
            Ok(j)
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn chart(&self) -> &Arc<Chart<T>> {
        self.j.chart()
    }

    pub fn matrix_field(&self) -> &MatrixField<T> {
        &self.j
    }

    pub fn eval(&self, c: &Coords<T>) -> std::result::Result<Mat4<Jet2<T>>, JetError> {
        self.j.eval(c)
    }

    pub fn at(&self, p: &ChartPoint<T>) -> Result<Mat4<Jet2<T>>> {
        let j = self.j.at(p)?;
        if j.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GeometryError::Domain {
                chart: self.chart().name().to_string(),
                point: p.coords_f64(),
                source: JetError::NonFinite { function: "almost complex structure" },
            });
        }
        Ok(j)
    }

    pub fn values_at(&self, p: &ChartPoint<T>) -> Result<Mat4<T>> {
        Ok(values4(&self.at(p)?))
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `−J`.
    pub fn negated(&self, label: impl Into<String>) -> Self {
        let j = self.j.clone();
        Self::from_matrix(label, self.chart().clone(), move |c| Ok(j.eval(c)?.map(|r| r.map(|v| -v))))
    }

    /// `f J` for a scalar field `f`; not an almost complex structure unless `f = ±1`.
    pub fn scaled_by(&self, label: impl Into<String>, f: &ScalarField<T>) -> Self {
        let (j, f) = (self.j.clone(), f.clone());
        Self::from_matrix(label, self.chart().clone(), move |c| {
            let s = f.eval(c)?;
            Ok(j.eval(c)?.map(|r| r.map(|v| v * s)))
        })
    }

    /// `P J P⁻¹`; still squares to `−Id`, integrable only for special `P`.
    pub fn conjugated(&self, label: impl Into<String>, p: &MatrixField<T>) -> Self {
        let (j, p) = (self.j.clone(), p.clone());
        Self::from_matrix(label, self.chart().clone(), move |c| {
            let pm = p.eval(c)?;
            let inv = invert4(&pm, T::lit(SINGULAR_REL_TOL)).map_err(|(det, _)| JetError::Domain {
                function: "conjugating matrix inverse",
                argument: det.as_f64(),
            })?;
            Ok(matmul4(&matmul4(&pm, &j.eval(c)?), &inv.inverse))
        })
    }

    /// `J` conjugated by `Id + ε B(x)` with a non-constant off-diagonal bump
    /// `B`; a generic perturbation that destroys integrability.
    pub fn perturbed(&self, epsilon: T) -> Self {
        let chart = self.chart().clone();
        let bump = MatrixField::new(chart, move |c| {
            let mut m = identity4::<Jet2<T>>();
            m[0][1] = (c[2].sin() + c[0] * c[3].cos()) * epsilon;
            m[2][3] = c[1].cos() * c[0] * epsilon;
            m[3][0] = c[1].sin() * epsilon;
            Ok(m)
        });
        self.conjugated(format!("{}~perturbed", self.label), &bump)
    }

    /// `max|J² + Id| / max(1, max|J|²)` at `p`.
    pub fn square_residual(&self, p: &ChartPoint<T>) -> Result<T> {
        Ok(square_residual_values(&self.values_at(p)?))
    }

    /// Unnormalized `max|J² + Id|` at `p`, for showing that a field is not
    /// an almost complex structure.
    pub fn square_defect(&self, p: &ChartPoint<T>) -> Result<T> {
        let j = self.values_at(p)?;
        let mut sq = matmul4(&j, &j);
        for (i, row) in sq.iter_mut().enumerate() {
            row[i] = row[i] + T::one();
        }
        Ok(max_abs4(&sq))
    }
}

pub fn square_residual_values<T: Scalar>(j: &Mat4<T>) -> T {
    let mut sq = matmul4(j, j);
    for (i, row) in sq.iter_mut().enumerate() {
        row[i] = row[i] + T::one();
    }
    let s = max_abs4(j);
    max_abs4(&sq) / (s * s).max(T::one())
}

/// `[X,Y]^μ = X^ν ∂_ν Y^μ − Y^ν ∂_ν X^μ` from vector jets.
pub fn bracket_jets<T: Scalar>(x: &Vec4<Jet2<T>>, y: &Vec4<Jet2<T>>) -> Vec4<T> {
    let mut out = [T::zero(); DIM];
    for (mu, o) in out.iter_mut().enumerate() {
        let mut v = T::zero();
        for nu in 0..DIM {
            v = v + x[nu].value() * y[mu].d(nu) - y[nu].value() * x[mu].d(nu);
        }
        *o = v;
    }
    out
}

/// Lie bracket of two vector fields at `p`.
pub fn lie_bracket<T: Scalar>(x: &VectorField<T>, y: &VectorField<T>, p: &ChartPoint<T>) -> Result<Vec4<T>> {
    Ok(bracket_jets(&x.at(p)?, &y.at(p)?))
}

/// `|v|_g`.
pub fn norm<T: Scalar>(g: &Mat4<T>, v: &Vec4<T>) -> T {
    let mut s = T::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            s = s + g[i][j] * v[i] * v[j];
        }
    }
    s.abs().sqrt()
}

/// `ω_{σν} = g_{μν} J^μ_σ` as a full matrix.
pub fn omega_matrix<S: crate::linalg::Entry>(g: &Mat4<S>, j: &Mat4<S>) -> Mat4<S> {
    let mut w = crate::linalg::zero4::<S>();
    for (sigma, row) in w.iter_mut().enumerate() {
        for (nu, entry) in row.iter_mut().enumerate() {
            let mut acc = g[0][nu] * j[0][sigma];
            for mu in 1..DIM {
                acc = acc + g[mu][nu] * j[mu][sigma];
            }
            *entry = acc;
        }
    }
    w
}

/// The fundamental 2-form at a point with its symmetric-part residual.
#[derive(Debug, Clone)]
pub struct KahlerForm<T> {
    pub form: Form<T>,
    /// `max|ω_{σν} + ω_{νσ}| / max|ω|`; zero iff `g` and `J` are compatible.
    pub symmetric_residual: T,
}

/// `ω(X,Y) = g(JX,Y)` at `p`.
pub fn omega_from_j<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    p: &ChartPoint<T>,
) -> Result<KahlerForm<T>> {
    let g = values4(&metric.metric_at(p)?);
    let w = omega_matrix(&g, &j.values_at(p)?);
    let mut sym = T::zero();
    for s in 0..DIM {
        for n in 0..DIM {
            sym = sym.max((w[s][n] + w[n][s]).abs());
        }
    }
    Ok(KahlerForm {
        form: Form::two_form_from_matrix(&w),
        symmetric_residual: sym / (max_abs4(&w) + T::lit(crate::curvature::SCALE_FLOOR)),
    })
}

/// `ω` as a form field, read from the upper triangle of `g_{μν} J^μ_σ`.
pub fn kahler_form_field<T: Scalar>(metric: &MetricField<T>, j: &AlmostComplexField<T>) -> KFormField<T> {
    let (g, jf) = (metric.components().clone(), j.clone());
    KFormField::two_form(format!("omega[{}]", j.label()), metric.chart().clone(), move |c| {
        Ok(omega_matrix(&g.eval(c)?, &jf.eval(c)?))
    })
}

/// `J^α_σ = g^{αν} ω_{σν}` at `p`.
pub fn j_from_omega<T: Scalar>(metric: &MetricField<T>, omega: &KFormField<T>, p: &ChartPoint<T>) -> Result<Mat4<T>> {
    let gi = values4(&metric.inverse_metric_at(p)?);
    let w = omega.values_at(p)?.to_matrix();
    let mut j = [[T::zero(); DIM]; DIM];
    for (alpha, row) in j.iter_mut().enumerate() {
        for (sigma, entry) in row.iter_mut().enumerate() {
            let mut acc = T::zero();
            for nu in 0..DIM {
                acc = acc + gi[alpha][nu] * w[sigma][nu];
            }
            *entry = acc;
        }
    }
    Ok(j)
}

/// [`j_from_omega`] as a field, with exact derivatives through the jet inverse.
pub fn j_from_omega_field<T: Scalar>(
    label: impl Into<String>,
    metric: &MetricField<T>,
    omega: &KFormField<T>,
) -> AlmostComplexField<T> {
    let (g, w) = (metric.components().clone(), omega.clone());
    AlmostComplexField::from_matrix(label, metric.chart().clone(), move |c| {
        let gm = g.eval(c)?;
        let gi = invert4(&gm, T::lit(SINGULAR_REL_TOL))
            .map_err(|(det, _)| JetError::Domain { function: "metric inverse", argument: det.as_f64() })?;
        let wm = w.eval(c)?.to_matrix();
        let mut j = [[Jet2::zero(); DIM]; DIM];
        for (alpha, row) in j.iter_mut().enumerate() {
            for (sigma, entry) in row.iter_mut().enumerate() {
                let mut acc = Jet2::zero();
                for nu in 0..DIM {
                    acc += gi.inverse[alpha][nu] * wm[sigma][nu];
                }
                *entry = acc;
            }
        }
        Ok(j)
    })
}

/// `N(X,Y)` at a point with the largest of its four bracket terms.
#[derive(Debug, Clone, Copy)]
pub struct NijenhuisValue<T> {
    pub vector: Vec4<T>,
    /// `max` of the metric norms of `[X,Y]`, `J[JX,Y]`, `J[X,JY]`, `[JX,JY]`.
    pub term_scale: T,
}

fn apply_jet<T: Scalar>(j: &Mat4<Jet2<T>>, x: &Vec4<Jet2<T>>) -> Vec4<Jet2<T>> {
    matvec4(j, x)
}

/// `N(X,Y) = [X,Y] + J[JX,Y] + J[X,JY] − [JX,JY]` from jets at a point.
pub fn nijenhuis_jets<T: Scalar>(
    j: &Mat4<Jet2<T>>,
    x: &Vec4<Jet2<T>>,
    y: &Vec4<Jet2<T>>,
    g: &Mat4<T>,
) -> NijenhuisValue<T> {
    let jv = values4(j);
    let jx = apply_jet(j, x);
    let jy = apply_jet(j, y);
    let t1 = bracket_jets(x, y);
    let t2 = matvec4(&jv, &bracket_jets(&jx, y));
    let t3 = matvec4(&jv, &bracket_jets(x, &jy));
    let t4 = bracket_jets(&jx, &jy);
    let mut vector = [T::zero(); DIM];
    for mu in 0..DIM {
        vector[mu] = t1[mu] + t2[mu] + t3[mu] - t4[mu];
    }
    let term_scale = [t1, t2, t3, t4].iter().fold(T::zero(), |m, t| m.max(norm(g, t)));
    NijenhuisValue { vector, term_scale }
}

/// `N(X,Y)` for vector fields at `p`.
pub fn nijenhuis<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    x: &VectorField<T>,
    y: &VectorField<T>,
    p: &ChartPoint<T>,
) -> Result<NijenhuisValue<T>> {
    let g = values4(&metric.metric_at(p)?);
    Ok(nijenhuis_jets(&j.at(p)?, &x.at(p)?, &y.at(p)?, &g))
}

fn coordinate_jet<T: Scalar>(i: usize) -> Vec4<Jet2<T>> {
    let mut v = [Jet2::zero(); DIM];
    v[i] = Jet2::one();
    v
}

/// Worst `|N(∂_a, ∂_b)|_g` over the six coordinate pairs, relative to
/// `max(1, largest bracket term over all pairs)`. A per-pair scale blows
/// roundoff up to O(1) on pairs whose terms all vanish.
pub fn nijenhuis_residual<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    p: &ChartPoint<T>,
) -> Result<T> {
    let g = values4(&metric.metric_at(p)?);
    let jm = j.at(p)?;
    let (mut worst, mut scale) = (T::zero(), T::one());
    for a in 0..DIM {
        for b in a + 1..DIM {
            let n = nijenhuis_jets(&jm, &coordinate_jet(a), &coordinate_jet(b), &g);
            worst = worst.max(norm(&g, &n.vector));
            scale = scale.max(n.term_scale);
        }
    }
    Ok(worst / scale)
}

/// `|N(fX, hY) − f h N(X,Y)|_g` relative, for fixed smooth test functions
/// `f, h` and coordinate fields; checks that the bracket plumbing is tensorial.
pub fn tensoriality_residual<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    p: &ChartPoint<T>,
) -> Result<T> {
    let g = values4(&metric.metric_at(p)?);
    let jm = j.at(p)?;
    let c = j.chart().seed(p)?;
    let f = (c[0] * T::lit(0.7) + c[1] * T::lit(0.3)).sin() + T::lit(2.0);
    let h = (c[2] * T::lit(0.5) - c[3] * T::lit(0.2)).cos() * c[0] + T::lit(3.0);
    let (mut worst, mut scale) = (T::zero(), T::one());
    for a in 0..DIM {
        for b in a + 1..DIM {
            let x = coordinate_jet::<T>(a);
            let y = coordinate_jet::<T>(b);
            let plain = nijenhuis_jets(&jm, &x, &y, &g);
            let fx = x.map(|v| v * f);
            let hy = y.map(|v| v * h);
            let scaled = nijenhuis_jets(&jm, &fx, &hy, &g);
            let fh = f.value() * h.value();
            let mut diff = [T::zero(); DIM];
            for mu in 0..DIM {
                diff[mu] = scaled.vector[mu] - fh * plain.vector[mu];
            }
            scale = scale.max(scaled.term_scale).max(fh.abs() * plain.term_scale);
            worst = worst.max(norm(&g, &diff));
        }
    }
    Ok(worst / scale)
}

/// `max|JᵀgJ − g| / max|g|` at `p`.
pub fn hermitian_residual<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    p: &ChartPoint<T>,
) -> Result<T> {
    let g = values4(&metric.metric_at(p)?);
    let jm = j.values_at(p)?;
    Ok(hermitian_residual_values(&g, &jm))
}

pub fn hermitian_residual_values<T: Scalar>(g: &Mat4<T>, j: &Mat4<T>) -> T {
    let mut worst = T::zero();
    for s in 0..DIM {
        for t in 0..DIM {
            let mut v = T::zero();
            for mu in 0..DIM {
                for nu in 0..DIM {
                    v = v + j[mu][s] * g[mu][nu] * j[nu][t];
                }
            }
            worst = worst.max((v - g[s][t]).abs());
        }
    }
    worst / max_abs4(g)
}

/// Names of the quaternionic relations, in the order returned by
/// [`quaternion_residuals`].
pub const QUATERNION_RELATIONS: [&str; 9] =
    ["J1^2=-Id", "J2^2=-Id", "J3^2=-Id", "J1J2=J3", "J2J3=J1", "J3J1=J2", "J1J2=-J2J1", "J2J3=-J3J2", "J3J1=-J1J3"];

/// How products in [`QUATERNION_RELATIONS`] are read for tensor fields.
pub const QUATERNION_CONVENTION: &str =
    "products of the induced action on 1-forms: (J1 J2)(theta) = theta o J2 o J1, i.e. the matrix product of J^T";

/// Residuals of the quaternionic relations at `p`, each relative to the
/// size of the products involved.
///
/// Products act on 1-forms (see [`QUATERNION_CONVENTION`]). Composition on
/// vectors reverses every product, so a triple passing here satisfies
/// `J1 J2 = -J3` as endomorphisms of the tangent space.
pub fn quaternion_residuals<T: Scalar>(js: [&AlmostComplexField<T>; 3], p: &ChartPoint<T>) -> Result<[T; 9]> {
    let m = [js[0].values_at(p)?, js[1].values_at(p)?, js[2].values_at(p)?];
    Ok(quaternion_residuals_values(&m.map(|j| transpose4(&j))))
}

/// The relations for plain matrix products `m[a] m[b]`.
pub fn quaternion_residuals_values<T: Scalar>(m: &[Mat4<T>; 3]) -> [T; 9] {
    let sz: Vec<T> = m.iter().map(|x| max_abs4(x).max(T::one())).collect();
    let rel = |a: &Mat4<T>, b: &Mat4<T>, sign: T, scale: T| {
        let mut worst = T::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                worst = worst.max((a[i][j] + sign * b[i][j]).abs());
            }
        }
        worst / scale
    };
    let id = identity4::<T>();
    let mut out = [T::zero(); 9];
    for k in 0..3 {
        out[k] = rel(&matmul4(&m[k], &m[k]), &id, T::one(), sz[k] * sz[k]);
    }
    for k in 0..3 {
        let (a, b, c) = (k, (k + 1) % 3, (k + 2) % 3);
        let ab = matmul4(&m[a], &m[b]);
        let ba = matmul4(&m[b], &m[a]);
        let scale = sz[a] * sz[b];
        out[3 + k] = rel(&ab, &m[c], -T::one(), scale.max(sz[c]));
        out[6 + k] = rel(&ab, &ba, T::one(), scale);
    }
    out
}

/// Verdict of the integrability test over a sample set.
#[derive(Debug, Clone)]
pub struct IntegrabilityVerdict {
    pub nijenhuis: Verdict,
    pub tensoriality: Verdict,
    pub integrable: bool,
}

pub fn integrability_verdict<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    points: &[ChartPoint<T>],
    tolerance: f64,
) -> Result<IntegrabilityVerdict> {
    let nijenhuis = sample_verdict(points, tolerance, |p| nijenhuis_residual(metric, j, p))?;
    let tensoriality = sample_verdict(points, tolerance, |p| tensoriality_residual(metric, j, p))?;
    let integrable = nijenhuis.passed;
    Ok(IntegrabilityVerdict { nijenhuis, tensoriality, integrable })
}

/// Per-relation verdicts of the quaternionic relations.
pub fn quaternion_check<T: Scalar>(
    js: [&AlmostComplexField<T>; 3],
    points: &[ChartPoint<T>],
    tolerance: f64,
) -> Result<Vec<(&'static str, Verdict)>> {
    let mut out = Vec::with_capacity(9);
    for (k, name) in QUATERNION_RELATIONS.iter().enumerate() {
        let v = sample_verdict(points, tolerance, |p| Ok(quaternion_residuals(js, p)?[k]))?;
        out.push((*name, v));
    }
    Ok(out)
}

pub fn hermitian_check<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    points: &[ChartPoint<T>],
    tolerance: f64,
) -> Result<std::result::Result<Verdict, String>> {
    if let crate::metric::GuardOutcome::Refused { reason } = crate::metric::signature_guard(metric) {
        return Ok(Err(reason));
    }
    Ok(Ok(sample_verdict(points, tolerance, |p| hermitian_residual(metric, j, p))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::euclidean;

    fn flat() -> (Arc<Chart<f64>>, MetricField<f64>, AlmostComplexField<f64>) {
        let chart = Arc::new(Chart::new("R4", ["x1", "x2", "x3", "x4"]));
        let m = euclidean(chart.clone());
        let frame = FrameField::new("std", chart.clone(), |_| Ok(identity4()));
        let j = AlmostComplexField::from_frame_map("J", &frame, [(1, 1), (0, -1), (3, 1), (2, -1)]);
        (chart, m, j)
    }

    #[test]
    fn standard_flat_structure() {
        let (chart, m, j) = flat();
        let p = chart.point([0.2, 0.4, -1.0, 3.0]);
        assert_eq!(j.square_residual(&p).unwrap(), 0.0);
        let w = omega_from_j(&m, &j, &p).unwrap();
        assert_eq!(w.symmetric_residual, 0.0);
        // dx1∧dx2 + dx3∧dx4
        assert_eq!(w.form.coeffs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(nijenhuis_residual(&m, &j, &p).unwrap(), 0.0);
        assert_eq!(hermitian_residual(&m, &j, &p).unwrap(), 0.0);
        let omega = kahler_form_field(&m, &j);
        assert_eq!(j_from_omega(&m, &omega, &p).unwrap(), j.values_at(&p).unwrap());
    }

    #[test]
    fn coordinate_fields_commute() {
        let (chart, _, _) = flat();
        let p = chart.point([0.2, 0.4, -1.0, 3.0]);
        let b = lie_bracket(&VectorField::coordinate(chart.clone(), 1), &VectorField::coordinate(chart.clone(), 2), &p)
            .unwrap();
        assert_eq!(b, [0.0; 4]);
    }

    #[test]
    fn perturbation_breaks_integrability_but_not_square() {
        let (chart, m, j) = flat();
        let pj = j.perturbed(0.01);
        let p = chart.point([0.7, 0.4, -1.0, 3.0]);
        assert!(pj.square_residual(&p).unwrap() < 1e-14);
        assert!(nijenhuis_residual(&m, &pj, &p).unwrap() > 1e-4);
        assert!(tensoriality_residual(&m, &pj, &p).unwrap() < 1e-12);
    }

    #[test]
    fn quaternion_signs() {
        let e = |pairs: [(usize, usize, f64); 4]| {
            let mut m = [[0.0; 4]; 4];
            for (a, b, s) in pairs {
                m[a][b] = s;
            }
            m
        };
        // left multiplication by i, j, k on the quaternions in basis (1,i,j,k)
        let i = e([(1, 0, 1.0), (0, 1, -1.0), (3, 2, 1.0), (2, 3, -1.0)]);
        let j = e([(2, 0, 1.0), (3, 1, -1.0), (0, 2, -1.0), (1, 3, 1.0)]);
        let k = matmul4(&i, &j);
        assert!(quaternion_residuals_values(&[i, j, k]).iter().all(|r| *r < 1e-15));
        let minus_k = k.map(|r| r.map(|v| -v));
        let r = quaternion_residuals_values(&[i, j, minus_k]);
        assert!(r[3] > 0.5);
        let r = quaternion_residuals_values(&[i, i, i]);
        assert!(r[6] > 0.5);
    }
}
