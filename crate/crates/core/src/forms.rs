//! Differential forms in coordinate components.
//!
//! A `k`-form is stored on strictly increasing index tuples in lexicographic
//! order, so `ω = Σ_{i<j} ω_{ij} dx^i∧dx^j` keeps only `ω_{01}, ω_{02}, …`.
//! Reads with any index order go through [`Form::get`], which applies the
//! permutation sign.

use std::sync::Arc;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeometryError, Result};
use crate::field::Field;
use crate::jets::{Jet1, Jet2, JetError, DIM};
use crate::linalg::{zero, Entry, Mat4};
use crate::metric::MetricField;
use crate::scalar::Scalar;

const I0: [&[usize]; 1] = [&[]];
const I1: [&[usize]; 4] = [&[0], &[1], &[2], &[3]];
const I2: [&[usize]; 6] = [&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]];
const I3: [&[usize]; 4] = [&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]];
const I4: [&[usize]; 1] = [&[0, 1, 2, 3]];

/// Strictly increasing index tuples of length `k`, in storage order.
pub fn multi_indices(k: usize) -> &'static [&'static [usize]] {
    match k {
        0 => &I0,
        1 => &I1,
        2 => &I2,
        3 => &I3,
        4 => &I4,
        _ => &[],
    }
}

fn slot(idx: &[usize]) -> usize {
    multi_indices(idx.len()).iter().position(|m| *m == idx).expect("increasing multi-index")
}

/// Sorts `idx`, returning the sorted tuple and the permutation sign, or
/// `None` when an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i8)> {
    let mut v = idx.to_vec();
    let mut sign = 1i8;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Levi-Civita symbol on four indices, `ε_{0123} = +1`.
pub fn levi_civita4(i: usize, j: usize, k: usize, l: usize) -> i8 {
    sort_with_sign(&[i, j, k, l]).map_or(0, |(_, s)| s)
}

/// Levi-Civita symbol on three indices, `ε_{012} = +1`.
pub fn levi_civita3(i: usize, j: usize, k: usize) -> i8 {
    sort_with_sign(&[i, j, k]).map_or(0, |(_, s)| s)
}

/// Components of a `k`-form at a point (or of a jet-valued form).
#[derive(Debug, Clone, PartialEq)]
pub struct Form<S> {
    degree: usize,
    coeffs: Vec<S>,
}

impl<S: Entry> Form<S> {
    pub fn zero(degree: usize) -> Result<Self> {
        if degree > DIM {
            return Err(GeometryError::Contract(format!("form degree {degree} exceeds {DIM}")));
        }
        Ok(Self { degree, coeffs: vec![zero(); multi_indices(degree).len()] })
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<S>) -> Result<Self> {
        let n = multi_indices(degree).len();
        if degree > DIM || coeffs.len() != n {
            return Err(GeometryError::Contract(format!(
                "a {degree}-form needs {n} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn one_form(c: [S; DIM]) -> Self {
        Self { degree: 1, coeffs: c.to_vec() }
    }

    /// Reads `m[i][j]` for `i < j`; the lower triangle is ignored.
    pub fn two_form_from_matrix(m: &Mat4<S>) -> Self {
        Self { degree: 2, coeffs: I2.iter().map(|ij| m[ij[0]][ij[1]]).collect() }
    }

    /// `e^a∧e^b` for two covectors.
    pub fn wedge_covectors(a: &[S; DIM], b: &[S; DIM]) -> Self {
        Self { degree: 2, coeffs: I2.iter().map(|ij| a[ij[0]] * b[ij[1]] - a[ij[1]] * b[ij[0]]).collect() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Component on an arbitrary index tuple.
    pub fn get(&self, idx: &[usize]) -> S {
        assert_eq!(idx.len(), self.degree, "index tuple length must equal the degree");
        match sort_with_sign(idx) {
            None => zero(),
            Some((sorted, sign)) => {
                let v = self.coeffs[slot(&sorted)];
                if sign < 0 {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// Sets the component on an increasing index tuple.
    pub fn set(&mut self, idx: &[usize], value: S) {
        let (sorted, sign) = sort_with_sign(idx).expect("distinct indices");
        self.coeffs[slot(&sorted)] = if sign < 0 { -value } else { value };
    }

    /// Full antisymmetric matrix of a 2-form.
    pub fn to_matrix(&self) -> Mat4<S> {
        assert_eq!(self.degree, 2, "to_matrix needs a 2-form");
        let mut m = [[zero(); DIM]; DIM];
        for (ij, v) in I2.iter().zip(&self.coeffs) {
            m[ij[0]][ij[1]] = *v;
            m[ij[1]][ij[0]] = -*v;
        }
        m
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Result<Self> {
        if self.degree != other.degree {
            return Err(GeometryError::Contract(format!(
                "cannot combine a {}-form with a {}-form",
                self.degree, other.degree
            )));
        }
        Ok(Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|v| v * c)
    }

    pub fn map<U>(&self, f: impl Fn(S) -> U) -> Form<U> {
        Form { degree: self.degree, coeffs: self.coeffs.iter().map(|v| f(*v)).collect() }
    }
}

impl<T: Scalar> Form<T> {
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

impl<T: Scalar> Form<Jet2<T>> {
    pub fn values(&self) -> Form<T> {
        self.map(|v| v.value())
    }
}

/// Graded product; `b∧a = (−1)^{|a||b|} a∧b`.
pub fn wedge<S: Entry>(a: &Form<S>, b: &Form<S>) -> Result<Form<S>> {
    let degree = a.degree + b.degree;
    if degree > DIM {
        return Err(GeometryError::Contract(format!(
            "wedge of a {}-form and a {}-form exceeds degree {DIM}",
            a.degree, b.degree
        )));
    }
    let mut out = Form::zero(degree)?;
    for (i, ai) in multi_indices(a.degree).iter().zip(&a.coeffs) {
        for (j, bj) in multi_indices(b.degree).iter().zip(&b.coeffs) {
            let joined: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
            if let Some((sorted, sign)) = sort_with_sign(&joined) {
                let s = slot(&sorted);
                let term = *ai * *bj;
                out.coeffs[s] = if sign < 0 { out.coeffs[s] - term } else { out.coeffs[s] + term };
            }
        }
    }
    Ok(out)
}

/// `(da)_{μ0…μk} = Σ_s (−1)^s ∂_{μs} a_{μ0…μ̂s…μk}`, with the partial
/// supplied by `partial(slot_of_coefficient, μ)`.
fn d_with<D: Entry>(degree: usize, partial: impl Fn(usize, usize) -> D) -> Result<Form<D>> {
    let mut out = Form::zero(degree + 1)?;
    for (n, idx) in multi_indices(degree + 1).iter().enumerate() {
        let mut acc: D = zero();
        for s in 0..idx.len() {
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(q, _)| *q != s).map(|(_, v)| *v).collect();
            let term = partial(slot(&rest), idx[s]);
            acc = if s % 2 == 0 { acc + term } else { acc - term };
        }
        out.coeffs[n] = acc;
    }
    Ok(out)
}

/// A `k`-form field in coordinate components.
#[derive(Clone, Debug)]
pub struct KFormField<T> {
    label: String,
    degree: usize,
    field: Field<T, Form<Jet2<T>>>,
}

impl<T: Scalar> KFormField<T> {
    pub fn new(
        label: impl Into<String>,
        chart: Arc<Chart<T>>,
        degree: usize,
        f: impl Fn(&crate::jets::Coords<T>) -> std::result::Result<Form<Jet2<T>>, JetError> + Send + Sync + 'static,
    ) -> Self {
        assert!(degree <= DIM, "form degree above {DIM}");
        Self { label: label.into(), degree, field: Field::new(chart, f) }
    }

    /// A 1-form from its four coefficient functions.
    pub fn one_form(
        label: impl Into<String>,
        chart: Arc<Chart<T>>,
        f: impl Fn(&crate::jets::Coords<T>) -> std::result::Result<[Jet2<T>; DIM], JetError> + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, chart, 1, move |c| Ok(Form::one_form(f(c)?)))
    }

    /// The differential of the coordinate function `x^index`.
    pub fn coordinate_differential(chart: Arc<Chart<T>>, index: usize) -> Self {
        let name = format!("d{}", chart.coordinates()[index]);
        Self::one_form(name, chart, move |_| {
            let mut v = [Jet2::zero(); DIM];
            v[index] = Jet2::one();
            Ok(v)
        })
    }

    /// A 2-form from a (not necessarily antisymmetric) matrix function;
    /// only the upper triangle is read.
    pub fn two_form(
        label: impl Into<String>,
        chart: Arc<Chart<T>>,
        f: impl Fn(&crate::jets::Coords<T>) -> std::result::Result<Mat4<Jet2<T>>, JetError> + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, chart, 2, move |c| Ok(Form::two_form_from_matrix(&f(c)?)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn chart(&self) -> &Arc<Chart<T>> {
        self.field.chart()
    }

    pub fn eval(&self, c: &crate::jets::Coords<T>) -> std::result::Result<Form<Jet2<T>>, JetError> {
        self.field.eval(c)
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Coefficient jets at `p`.
    pub fn at(&self, p: &ChartPoint<T>) -> Result<Form<Jet2<T>>> {
        let form = self.field.at(p)?;
        if form.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::Domain {
                chart: self.chart().name().to_string(),
                point: p.coords_f64(),
                source: JetError::NonFinite { function: "form coefficient" },
            });
        }
        Ok(form)
    }

    pub fn values_at(&self, p: &ChartPoint<T>) -> Result<Form<T>> {
        Ok(self.at(p)?.values())
    }

    /// Pointwise `f·a`.
    pub fn scaled_by(&self, f: &Field<T, Jet2<T>>) -> Self {
        let (a, f) = (self.clone(), f.clone());
        Self::new(format!("f·{}", self.label), self.chart().clone(), self.degree, move |c| {
            let s = f.eval(c)?;
            Ok(a.eval(c)?.map(|v| v * s))
        })
    }

    pub fn scaled(&self, k: T) -> Self {
        let a = self.clone();
        Self::new(format!("{}·{}", k, self.label), self.chart().clone(), self.degree, move |c| {
            Ok(a.eval(c)?.map(|v| v * k))
        })
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.combine(other, "+", |a, b| a + b)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.combine(other, "-", |a, b| a - b)
    }

    fn combine(&self, other: &Self, op: &str, f: fn(Jet2<T>, Jet2<T>) -> Jet2<T>) -> Result<Self> {
        if self.degree != other.degree {
            return Err(GeometryError::Contract(format!(
                "cannot combine `{}` (degree {}) with `{}` (degree {})",
                self.label, self.degree, other.label, other.degree
            )));
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::new(format!("{}{op}{}", self.label, other.label), self.chart().clone(), self.degree, move |c| {
            let (x, y) = (a.eval(c)?, b.eval(c)?);
            Ok(x.zip_with(&y, f).expect("equal degrees"))
        }))
    }

    /// Field-level wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let degree = self.degree + other.degree;
        if degree > DIM {
            return Err(GeometryError::Contract(format!(
                "wedge of `{}` (degree {}) and `{}` (degree {}) exceeds degree {DIM}",
                self.label, self.degree, other.label, other.degree
            )));
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::new(format!("{}^{}", self.label, other.label), self.chart().clone(), degree, move |c| {
            Ok(wedge(&a.eval(c)?, &b.eval(c)?).expect("degree checked"))
        }))
    }
}

/// `da` at `p` together with its first partials.
pub fn exterior_derivative_jet<T: Scalar>(a: &KFormField<T>, p: &ChartPoint<T>) -> Result<Form<Jet1<T>>> {
    if a.degree >= DIM {
        return Err(GeometryError::Contract(format!("exterior derivative of the {}-form `{}`", a.degree, a.label)));
    }
    let form = a.at(p)?;
    d_with(a.degree, |s, mu| form.coeffs[s].partial(mu))
}

/// `da` at `p`, read from the jet gradients.
pub fn exterior_derivative<T: Scalar>(a: &KFormField<T>, p: &ChartPoint<T>) -> Result<Form<T>> {
    Ok(exterior_derivative_jet(a, p)?.map(|v| v.value))
}

/// `d` of a form whose coefficients carry their own gradients.
pub fn exterior_derivative_of_jets<T: Scalar>(form: &Form<Jet1<T>>) -> Result<Form<T>> {
    if form.degree >= DIM {
        return Err(GeometryError::Contract(format!("exterior derivative of a {}-form", form.degree)));
    }
    d_with(form.degree, |s, mu| form.coeffs[s].grad[mu])
}

/// Largest first partial `|∂_μ a_I|` at `p`; the natural scale for
/// closedness tests.
pub fn derivative_scale<T: Scalar>(a: &KFormField<T>, p: &ChartPoint<T>) -> Result<T> {
    let form = a.at(p)?;
    Ok(form.coeffs.iter().flat_map(|c| c.grad()).fold(T::zero(), |m, v| m.max(v.abs())))
}

/// `max|d(da)|` relative to `max(1, largest second partial of the coefficients)`.
pub fn dd_residual<T: Scalar>(a: &KFormField<T>, p: &ChartPoint<T>) -> Result<T> {
    if a.degree + 2 > DIM {
        return Ok(T::zero());
    }
    let da = exterior_derivative_jet(a, p)?;
    let dda = exterior_derivative_of_jets(&da)?;
    let form = a.at(p)?;
    let scale =
        form.coeffs.iter().flat_map(|c| c.hessian().into_iter().flatten()).fold(T::zero(), |m, v| m.max(v.abs()));
    Ok(dda.max_abs() / scale.max(T::one()))
}

/// Hodge star of a 2-form: `(⋆a)_{kl} = ½ s √det g ε_{ijkl} a^{ij}`, where
/// `s` is the declared orientation sign.
pub fn hodge_star_values<T: Scalar>(a: &Form<T>, g: &Mat4<T>, gi: &Mat4<T>, sign: i8) -> Result<Form<T>> {
    if a.degree != 2 {
        return Err(GeometryError::Contract(format!("hodge star is implemented for 2-forms, got degree {}", a.degree)));
    }
    let det = crate::linalg::invert4(g, T::zero()).map(|i| i.det).unwrap_or_else(|(d, _)| d);
    if !(det > T::zero()) {
        return Err(GeometryError::Contract("hodge star needs a positive-definite metric".to_string()));
    }
    let vol = det.sqrt() * T::lit(sign as f64);
    let am = a.to_matrix();
    let mut up = [[T::zero(); DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            let mut v = T::zero();
            for x in 0..DIM {
                for y in 0..DIM {
                    v = v + gi[i][x] * gi[j][y] * am[x][y];
                }
            }
            up[i][j] = v;
        }
    }
    let mut out = Form::zero(2)?;
    for (n, kl) in I2.iter().enumerate() {
        let mut v = T::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                let e = levi_civita4(i, j, kl[0], kl[1]);
                if e != 0 {
                    v = v + T::lit(e as f64) * up[i][j];
                }
            }
        }
        out.coeffs[n] = v * vol * T::lit(0.5);
    }
    Ok(out)
}

/// `⋆a` at `p` using the metric's declared orientation.
pub fn hodge_star<T: Scalar>(a: &Form<T>, metric: &MetricField<T>, p: &ChartPoint<T>) -> Result<Form<T>> {
    let [g, gi] = metric.metric_and_inverse_at(p)?;
    hodge_star_values(a, &crate::linalg::values4(&g), &crate::linalg::values4(&gi), metric.orientation().sign)
}

/// `|a|² = ½ a_{ij} a^{ij}` for a 2-form.
pub fn norm2_two_form<T: Scalar>(a: &Form<T>, gi: &Mat4<T>) -> T {
    let am = a.to_matrix();
    let mut s = T::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for x in 0..DIM {
                for y in 0..DIM {
                    s = s + am[i][j] * gi[i][x] * gi[j][y] * am[x][y];
                }
            }
        }
    }
    s * T::lit(0.5)
}

/// Leg pairs of the self-dual basis `e¹∧e² + e³∧e⁴, e¹∧e³ + e⁴∧e², e¹∧e⁴ + e²∧e³`
/// (zero-based).
pub const SELF_DUAL_PAIRS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (3, 1)], [(0, 3), (1, 2)]];

/// `Ω±` built from coframe values (`coframe[a]` = coefficients of `e^{a+1}`).
#[derive(Debug, Clone)]
pub struct SelfDualBasis<T> {
    pub plus: [Form<T>; 3],
    pub minus: [Form<T>; 3],
}

impl<T: Scalar> SelfDualBasis<T> {
    pub fn from_coframe(coframe: &Mat4<T>) -> Self {
        let build = |sign: T| {
            SELF_DUAL_PAIRS.map(|[(a, b), (c, d)]| {
                let first = Form::wedge_covectors(&coframe[a], &coframe[b]);
                let second = Form::wedge_covectors(&coframe[c], &coframe[d]);
                first.add(&second.scale(sign)).expect("2-forms")
            })
        };
        Self { plus: build(T::one()), minus: build(-T::one()) }
    }
}

/// Residuals of `dσ_i = ε_{ijk} σ_j∧σ_k` (summed over `j,k`) at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureResidual<T> {
    /// `max_i |dσ_i − ε_{ijk} σ_j∧σ_k|`
    pub residual: T,
    /// The same with the opposite sign, `max_i |dσ_i + ε_{ijk} σ_j∧σ_k|`.
    pub opposite_sign_residual: T,
}

pub fn structure_equation_check<T: Scalar>(
    sigma: &[KFormField<T>; 3],
    p: &ChartPoint<T>,
) -> Result<StructureResidual<T>> {
    if sigma.iter().any(|s| s.degree != 1) {
        return Err(GeometryError::Contract("structure equations need three 1-forms".to_string()));
    }
    let vals = [sigma[0].values_at(p)?, sigma[1].values_at(p)?, sigma[2].values_at(p)?];
    let mut residual = T::zero();
    let mut opposite = T::zero();
    for i in 0..3 {
        let ds = exterior_derivative(&sigma[i], p)?;
        let mut rhs = Form::zero(2)?;
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita3(i, j, k);
                if e != 0 {
                    rhs = rhs.add(&wedge(&vals[j], &vals[k])?.scale(T::lit(e as f64)))?;
                }
            }
        }
        residual = residual.max(ds.sub(&rhs)?.max_abs());
        opposite = opposite.max(ds.add(&rhs)?.max_abs());
    }
    Ok(StructureResidual { residual, opposite_sign_residual: opposite })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::euclidean;

    fn chart() -> Arc<Chart<f64>> {
        Arc::new(Chart::new("R4", ["x", "y", "z", "w"]))
    }

    #[test]
    fn wedge_of_coordinate_differentials_gives_volume() {
        let c = chart();
        let d: Vec<_> = (0..4).map(|i| KFormField::coordinate_differential(c.clone(), i)).collect();
        let vol = d[0].wedge(&d[1]).unwrap().wedge(&d[2].wedge(&d[3]).unwrap()).unwrap();
        let v = vol.values_at(&c.point([0.1, 0.2, 0.3, 0.4])).unwrap();
        assert_eq!(v.coeffs(), &[1.0]);
    }

    #[test]
    fn wedge_degree_overflow_is_a_contract_violation() {
        let c = chart();
        let d0 = KFormField::coordinate_differential(c.clone(), 0);
        let three = d0.wedge(&d0).unwrap().wedge(&d0).unwrap();
        assert!(matches!(three.wedge(&three.wedge(&d0).unwrap()), Err(GeometryError::Contract(_))));
    }

    #[test]
    fn one_form_squares_to_zero() {
        let a = Form::one_form([1.0, -2.0, 0.5, 3.0]);
        assert!(wedge(&a, &a).unwrap().coeffs().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn graded_commutativity() {
        let a = Form::one_form([1.0, -2.0, 0.5, 3.0]);
        let b = Form::wedge_covectors(&[0.3, 1.0, 0.0, 2.0], &[1.0, 0.0, -1.0, 0.5]);
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        assert!(ab.sub(&ba).unwrap().max_abs() < 1e-15);
        let c = Form::one_form([0.0, 1.0, 2.0, 0.0]);
        assert_eq!(wedge(&a, &c).unwrap(), wedge(&c, &a).unwrap().scale(-1.0));
    }

    #[test]
    fn get_applies_permutation_sign() {
        let mut f = Form::<f64>::zero(2).unwrap();
        f.set(&[2, 0], 3.0);
        assert_eq!(f.get(&[0, 2]), -3.0);
        assert_eq!(f.get(&[2, 0]), 3.0);
        assert_eq!(f.get(&[1, 1]), 0.0);
    }

    #[test]
    fn d_of_exact_form_vanishes() {
        let c = chart();
        let a = KFormField::one_form("df", c.clone(), |x| {
            // d(x y sin z)
            let s = x[2].sin();
            Ok([x[1] * s, x[0] * s, x[0] * x[1] * x[2].cos(), Jet2::zero()])
        });
        let p = c.point([0.3, -1.2, 0.7, 2.0]);
        assert!(exterior_derivative(&a, &p).unwrap().max_abs() < 1e-15);
        let rho = KFormField::coordinate_differential(c, 0);
        assert_eq!(exterior_derivative(&rho, &p).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn d_squared_vanishes_on_generic_form() {
        let c = chart();
        let a = KFormField::one_form("a", c.clone(), |x| {
            Ok([x[1] * x[2].exp(), x[0].sin() * x[3], x[1] * x[1] * x[0], x[2].cos()])
        });
        let p = c.point([0.3, -1.2, 0.7, 2.0]);
        assert!(dd_residual(&a, &p).unwrap() < 1e-15);
    }

    #[test]
    fn star_on_orthonormal_frame() {
        let c = chart();
        let m = euclidean(c.clone());
        let p = c.point([0.0; 4]);
        let e12 = Form::wedge_covectors(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]);
        let e34 = Form::wedge_covectors(&[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(hodge_star(&e12, &m, &p).unwrap(), e34);
        let asd = e12.sub(&e34).unwrap();
        assert_eq!(hodge_star(&asd, &m, &p).unwrap(), asd.scale(-1.0));
        let flipped = m.with_orientation(m.orientation().flipped());
        assert_eq!(hodge_star(&e12, &flipped, &p).unwrap(), e34.scale(-1.0));
    }

    #[test]
    fn self_dual_basis_eigenforms() {
        let id = crate::linalg::identity4::<f64>();
        let b = SelfDualBasis::from_coframe(&id);
        for k in 0..3 {
            assert_eq!(hodge_star_values(&b.plus[k], &id, &id, 1).unwrap(), b.plus[k]);
            assert_eq!(hodge_star_values(&b.minus[k], &id, &id, 1).unwrap(), b.minus[k].scale(-1.0));
        }
    }
}
