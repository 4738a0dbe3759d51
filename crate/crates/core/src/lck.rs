//! Lee forms, the locally conformally Kähler identity, exactness probing,
//! conformal rescaling and the Derdziński factor.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chart::{Chart, ChartPoint};
use crate::complex::{kahler_form_field, AlmostComplexField};
use crate::curvature::christoffel_jets;
use crate::error::{GeometryError, Result};
use crate::field::ScalarField;
use crate::forms::{derivative_scale, exterior_derivative, exterior_derivative_of_jets, wedge, Form, KFormField};
use crate::frame::FrameField;
use crate::jets::{Jet1, Jet2, JetError, DIM};
use crate::metric::MetricField;
use crate::scalar::Scalar;
use crate::verdict::{sample_max, Observation, Verdict};
use crate::weyl::weyl_plus_at;

/// Einstein precondition of [`derdzinski_factor`] on the trace-free Ricci residual.
pub const EINSTEIN_TOL: f64 = 1e-8;
/// Potentials must reproduce the Lee form to this absolute accuracy.
pub const POTENTIAL_TOL: f64 = 1e-8;
/// Exponents tried in the `c·log|P|` ansatz.
pub const ANSATZ_EXPONENTS: [f64; 8] = [1.0, 2.0, -1.0, -2.0, 0.5, -0.5, 3.0, 4.0];
/// Points used to fit the potential ansatz; fewer leave the fit underdetermined.
pub const FIT_POINTS: usize = 60;

/// `ξ_i = −(∇_α J^α_β) J^β_i` at `p`, with first partials.
///
/// In real dimension 4 the prefactor `−2/(m−2)` is `−1`.
pub fn lee_form_jets<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    p: &ChartPoint<T>,
) -> Result<[Jet1<T>; DIM]> {
    let gamma = christoffel_jets(metric, p)?;
    let jm = j.at(p)?;
    let j1 = jm.map(|r| r.map(|e| e.truncate()));
    let mut div = [Jet1::zero(); DIM];
    for (beta, d) in div.iter_mut().enumerate() {
        let mut acc = Jet1::zero();
        for alpha in 0..DIM {
            acc += jm[alpha][beta].partial(alpha);
            for lambda in 0..DIM {
                acc += gamma[alpha][alpha][lambda] * j1[lambda][beta];
                acc -= gamma[lambda][alpha][beta] * j1[alpha][lambda];
            }
        }
        *d = acc;
    }
    let mut xi = [Jet1::zero(); DIM];
    for (i, x) in xi.iter_mut().enumerate() {
        *x = -div.iter().enumerate().map(|(beta, d)| *d * j1[beta][i]).sum::<Jet1<T>>();
    }
    Ok(xi)
}

pub fn lee_form<T: Scalar>(metric: &MetricField<T>, j: &AlmostComplexField<T>, p: &ChartPoint<T>) -> Result<[T; DIM]> {
    Ok(lee_form_jets(metric, j, p)?.map(|x| x.value))
}

fn unit_floor<T: Scalar>(s: T) -> T {
    s.max(T::one())
}

/// `max|dξ| / max(1, max|∂ξ|)` at `p`.
pub fn d_lee_residual<T: Scalar>(metric: &MetricField<T>, j: &AlmostComplexField<T>, p: &ChartPoint<T>) -> Result<T> {
    let xi = lee_form_jets(metric, j, p)?;
    let dxi = exterior_derivative_of_jets(&Form::one_form(xi))?;
    let scale = xi.iter().flat_map(|x| x.grad).fold(T::zero(), |m, v| m.max(v.abs()));
    Ok(dxi.max_abs() / unit_floor(scale))
}

/// `max|dω| / max(1, max|∂ω|)` for `ω = g(J·,·)`.
pub fn closedness_residual<T: Scalar>(omega: &KFormField<T>, p: &ChartPoint<T>) -> Result<T> {
    let d = exterior_derivative(omega, p)?;
    Ok(d.max_abs() / unit_floor(derivative_scale(omega, p)?))
}

/// `max|dω − ξ∧ω| / max(1, max|∂ω|)`.
pub fn lck_identity_residual<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    p: &ChartPoint<T>,
) -> Result<T> {
    let omega = kahler_form_field(metric, j);
    let d = exterior_derivative(&omega, p)?;
    let xi = Form::one_form(lee_form(metric, j, p)?);
    let rhs = wedge(&xi, &omega.values_at(p)?)?;
    Ok(d.sub(&rhs)?.max_abs() / unit_floor(derivative_scale(&omega, p)?))
}

/// A potential `f = c·log|P|` with `P` a combination of basis monomials.
#[derive(Debug, Clone)]
pub struct Potential {
    pub exponent: f64,
    /// `(coefficient, monomial)` pairs, scaled so the first coefficient is 1.
    pub terms: Vec<(f64, String)>,
    /// `max|df − ξ|` over the verification samples.
    pub max_error: f64,
    basis: Arc<Vec<Monomial>>,
    coeffs: Vec<f64>,
}

impl Potential {
    pub fn zero() -> Self {
        Self { exponent: 0.0, terms: Vec::new(), max_error: 0.0, basis: Arc::new(Vec::new()), coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Human-readable form, e.g. `2*log|r^2 - r*cos(theta) + 0.25*cos(theta)^2|`.
    pub fn describe(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut poly = String::new();
        for (k, (c, m)) in self.terms.iter().enumerate() {
            let sign = if *c < 0.0 { "-" } else { "+" };
            match (k, sign) {
                (0, "-") => poly.push('-'),
                (0, _) => {}
                _ => poly.push_str(&format!(" {sign} ")),
            }
            let mag = short(c.abs());
            poly.push_str(&match (m.is_empty(), mag.as_str()) {
                (true, _) => mag,
                (false, "1") => m.clone(),
                (false, _) => format!("{mag}*{m}"),
            });
        }
        format!("{}*log|{poly}|", short(self.exponent))
    }

    /// `f` as a scalar field on `chart`.
    pub fn field<T: Scalar>(&self, chart: Arc<Chart<T>>) -> ScalarField<T> {
        let (basis, coeffs, c) = (self.basis.clone(), self.coeffs.clone(), self.exponent);
        ScalarField::new(chart, move |x| {
            if basis.is_empty() {
                return Ok(Jet2::zero());
            }
            let mut poly = Jet2::zero();
            for (m, a) in basis.iter().zip(&coeffs) {
                poly += m.eval_jet(x) * T::lit(*a);
            }
            let abs = if poly.value() < T::zero() { -poly } else { poly };
            Ok(abs.ln()? * T::lit(c))
        })
    }

    /// The conformal factor `e^{−f}` on `chart`.
    pub fn conformal_factor<T: Scalar>(&self, chart: Arc<Chart<T>>) -> ScalarField<T> {
        let f = self.field(chart.clone());
        ScalarField::new(chart, move |x| Ok((-f.eval(x)?).exp()))
    }
}

/// `v` to nine significant digits without trailing zeros.
fn short(v: f64) -> String {
    let s = format!("{:.8e}", v);
    let parsed: f64 = s.parse().unwrap_or(v);
    format!("{parsed}")
}

/// Generator of the ansatz: a coordinate, or cos/sin of a coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Generator {
    Coord(usize),
    Cos(usize),
    Sin(usize),
}

impl Generator {
    fn eval(&self, x: &[f64; DIM]) -> (f64, [f64; DIM]) {
        let mut g = [0.0; DIM];
        match *self {
            Generator::Coord(i) => {
                g[i] = 1.0;
                (x[i], g)
            }
            Generator::Cos(i) => {
                g[i] = -x[i].sin();
                (x[i].cos(), g)
            }
            Generator::Sin(i) => {
                g[i] = x[i].cos();
                (x[i].sin(), g)
            }
        }
    }

    fn eval_jet<T: Scalar>(&self, x: &[Jet2<T>; DIM]) -> Jet2<T> {
        match *self {
            Generator::Coord(i) => x[i],
            Generator::Cos(i) => x[i].cos(),
            Generator::Sin(i) => x[i].sin(),
        }
    }

    fn name(&self, names: &[String; DIM]) -> String {
        match *self {
            Generator::Coord(i) => names[i].clone(),
            Generator::Cos(i) => format!("cos({})", names[i]),
            Generator::Sin(i) => format!("sin({})", names[i]),
        }
    }
}

/// Product of at most two generators.
#[derive(Debug, Clone)]
struct Monomial {
    factors: Vec<Generator>,
    name: String,
}

impl Monomial {
    fn eval(&self, x: &[f64; DIM]) -> (f64, [f64; DIM]) {
        let mut v = 1.0;
        let mut g = [0.0; DIM];
        for f in &self.factors {
            let (fv, fg) = f.eval(x);
            for i in 0..DIM {
                g[i] = g[i] * fv + v * fg[i];
            }
            v *= fv;
        }
        (v, g)
    }

    fn eval_jet<T: Scalar>(&self, x: &[Jet2<T>; DIM]) -> Jet2<T> {
        self.factors.iter().fold(Jet2::one(), |acc, f| acc * f.eval_jet(x))
    }
}

fn ansatz_basis(names: &[String; DIM], angular: [bool; DIM]) -> Vec<Monomial> {
    let mut gens = Vec::new();
    for i in 0..DIM {
        if !angular[i] {
            gens.push(Generator::Coord(i));
        }
    }
    for i in 0..DIM {
        gens.push(Generator::Cos(i));
        gens.push(Generator::Sin(i));
    }
    let mut out = vec![Monomial { factors: vec![], name: String::new() }];
    for (a, ga) in gens.iter().enumerate() {
        out.push(Monomial { factors: vec![*ga], name: ga.name(names) });
        for gb in &gens[a..] {
            // sin² = 1 − cos², kept out so the basis has no identities
            if ga == gb && matches!(ga, Generator::Sin(_)) {
                continue;
            }
            let name = if ga == gb {
                format!("{}^2", ga.name(names))
            } else {
                format!("{}*{}", ga.name(names), gb.name(names))
            };
            out.push(Monomial { factors: vec![*ga, *gb], name });
        }
    }
    out
}

/// Result of [`exactness_probe`].
#[derive(Debug, Clone)]
pub enum Exactness {
    /// A potential with `df = ξ` at every sample.
    Exact(Potential),
    /// No ansatz member reproduced `ξ`; closedness alone is established.
    Undetermined,
}

impl Exactness {
    pub fn potential(&self) -> Option<&Potential> {
        match self {
            Exactness::Exact(p) => Some(p),
            Exactness::Undetermined => None,
        }
    }
}

/// Looks for `f = c·log|P|` with `df = ξ`, where `P` is a combination of
/// monomials of degree at most two in the non-angular coordinates and the
/// cosines and sines of all coordinates. Coefficients are fitted on a null
/// vector of the linear system `c ∂_i P − ξ_i P = 0` at the first
/// [`FIT_POINTS`] of `fit`; any candidate is then verified at every point of
/// `points`. Works in `f64` whatever the engine scalar is.
pub fn exactness_probe<T: Scalar>(
    chart: &Chart<T>,
    xi: impl Fn(&ChartPoint<T>) -> Result<[T; DIM]> + Sync,
    fit: &[ChartPoint<T>],
    points: &[ChartPoint<T>],
) -> Result<Exactness> {
    let eval = |ps: &[ChartPoint<T>]| -> Result<Vec<([f64; DIM], [f64; DIM])>> {
        ps.iter().map(|p| Ok((p.coords_f64(), xi(p)?.map(|v| v.as_f64())))).collect()
    };
    let samples = eval(points)?;
    if samples.iter().all(|(_, x)| x.iter().all(|v| v.abs() < POTENTIAL_TOL)) {
        let max_error = samples.iter().flat_map(|(_, x)| x.iter().map(|v| v.abs())).fold(0.0, f64::max);
        return Ok(Exactness::Exact(Potential { max_error, ..Potential::zero() }));
    }
    if samples.is_empty() {
        return Ok(Exactness::Undetermined);
    }
    let basis = Arc::new(ansatz_basis(chart.coordinates(), chart.angular()));
    let fit = eval(&fit[..fit.len().min(FIT_POINTS)])?;
    let evals: Vec<Vec<(f64, [f64; DIM])>> =
        fit.iter().map(|(x, _)| basis.iter().map(|m| m.eval(x)).collect()).collect();

    // restrict to combinations whose value or gradient is nonzero somewhere
    // on the samples; identities like cos² + sin² = 1 drop out here
    let values = DMatrix::from_fn(fit.len() * (DIM + 1), basis.len(), |r, c| {
        let (s, k) = (r / (DIM + 1), r % (DIM + 1));
        let (v, g) = evals[s][c];
        if k == 0 {
            v
        } else {
            g[k - 1]
        }
    });
    let svd = values.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > 1e-10 * smax).collect();
    if keep.is_empty() {
        return Ok(Exactness::Undetermined);
    }
    let q = DMatrix::from_fn(basis.len(), keep.len(), |b, k| vt[(keep[k], b)]);

    for &c in &ANSATZ_EXPONENTS {
        let rows = DMatrix::from_fn(fit.len() * DIM, basis.len(), |r, b| {
            let (s, i) = (r / DIM, r % DIM);
            let (v, g) = evals[s][b];
            c * g[i] - fit[s].1[i] * v
        });
        let a = rows * &q;
        if a.nrows() < a.ncols() {
            continue;
        }
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let sv = &svd.singular_values;
        let (kmin, smin) =
            sv.iter().enumerate().fold((0, f64::INFINITY), |acc, (k, s)| if *s < acc.1 { (k, *s) } else { acc });
        if smin > 1e-8 * sv.max() {
            continue;
        }
        let y = vt.row(kmin).transpose();
        let mut coeffs: Vec<f64> = (&q * y).iter().copied().collect();
        let top = coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top == 0.0 {
            continue;
        }
        let lead = coeffs.iter().copied().find(|v| v.abs() > 1e-9 * top).unwrap_or(1.0);
        let norm = top * lead.signum();
        coeffs.iter_mut().for_each(|v| *v /= norm);
        let snapped: Vec<f64> = coeffs.iter().map(|v| if v.abs() < 1e-7 { 0.0 } else { *v }).collect();
        for coeffs in [snapped, coeffs] {
            let Some(max_error) = verify_potential(&basis, &coeffs, c, &samples) else {
                continue;
            };
            if max_error < POTENTIAL_TOL {
                let lead = coeffs.iter().copied().find(|v| *v != 0.0).unwrap_or(1.0);
                let coeffs: Vec<f64> = coeffs.iter().map(|v| v / lead).collect();
                let terms = coeffs
                    .iter()
                    .zip(basis.iter())
                    .filter(|(v, _)| **v != 0.0)
                    .map(|(v, m)| (*v, m.name.clone()))
                    .collect();
                return Ok(Exactness::Exact(Potential { exponent: c, terms, max_error, basis, coeffs }));
            }
        }
    }
    Ok(Exactness::Undetermined)
}

fn verify_potential(basis: &[Monomial], coeffs: &[f64], c: f64, samples: &[([f64; DIM], [f64; DIM])]) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for (x, xi) in samples {
        let mut v = 0.0;
        let mut g = [0.0; DIM];
        for (m, a) in basis.iter().zip(coeffs) {
            if *a == 0.0 {
                continue;
            }
            let (mv, mg) = m.eval(x);
            v += a * mv;
            for i in 0..DIM {
                g[i] += a * mg[i];
            }
        }
        if v == 0.0 || !v.is_finite() {
            return None;
        }
        for i in 0..DIM {
            worst = worst.max((c * g[i] / v - xi[i]).abs());
        }
    }
    Some(worst)
}

/// Classification of a Hermitian pair `(g, J)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LckClass {
    Kahler,
    GloballyConformallyKahler,
    LocallyConformallyKahler,
    NotLck,
}

#[derive(Debug, Clone)]
pub struct LeeFormResult {
    /// Largest `|ξ|` component over the samples.
    pub max_xi: f64,
    pub closedness: Verdict,
    pub identity: Verdict,
    pub d_xi: Verdict,
    pub exactness: Exactness,
    pub classification: LckClass,
}

impl LeeFormResult {
    pub fn exact_potential(&self) -> Option<&Potential> {
        self.exactness.potential()
    }
}

/// Thresholds for [`analyze_lee_form`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeeTolerances {
    pub closedness: f64,
    pub identity: f64,
    pub d_xi: f64,
}

impl LeeTolerances {
    pub fn uniform(t: f64) -> Self {
        Self { closedness: t, identity: t, d_xi: t }
    }
}

impl Default for LeeTolerances {
    fn default() -> Self {
        Self { closedness: 1e-8, identity: 1e-8, d_xi: 1e-9 }
    }
}

/// Lee-form analysis of `(g, J)` over a sample set.
pub fn analyze_lee_form<T: Scalar>(
    metric: &MetricField<T>,
    j: &AlmostComplexField<T>,
    fit: &[ChartPoint<T>],
    points: &[ChartPoint<T>],
    tol: LeeTolerances,
) -> Result<LeeFormResult> {
    let omega = kahler_form_field(metric, j);
    let closedness = Verdict::below(sample_max(points, |p| closedness_residual(&omega, p))?, tol.closedness);
    let identity = Verdict::below(sample_max(points, |p| lck_identity_residual(metric, j, p))?, tol.identity);
    let d_xi = Verdict::below(sample_max(points, |p| d_lee_residual(metric, j, p))?, tol.d_xi);
    let max_xi = sample_max(points, |p| Ok(lee_form(metric, j, p)?.iter().fold(T::zero(), |m, v| m.max(v.abs()))))?
        .map_or(0.0, |o| o.residual);
    let exactness = if d_xi.passed {
        exactness_probe(metric.chart(), |p| lee_form(metric, j, p), fit, points)?
    } else {
        Exactness::Undetermined
    };
    let classification = if closedness.passed {
        LckClass::Kahler
    } else if identity.passed && d_xi.passed {
        match exactness {
            Exactness::Exact(_) => LckClass::GloballyConformallyKahler,
            Exactness::Undetermined => LckClass::LocallyConformallyKahler,
        }
    } else {
        LckClass::NotLck
    };
    Ok(LeeFormResult { max_xi, closedness, identity, d_xi, exactness, classification })
}

/// `λ g` together with the coframe scaled by `√λ`. Fails where `λ ≤ 0`.
pub fn conformal_rescale<T: Scalar>(
    name: impl Into<String>,
    metric: &MetricField<T>,
    frame: Option<&FrameField<T>>,
    factor: &ScalarField<T>,
) -> (MetricField<T>, Option<FrameField<T>>) {
    let name = name.into();
    let checked = positive(factor);
    let g = metric.conformal(name.clone(), &checked);
    let root = {
        let f = checked.clone();
        ScalarField::new(checked.chart().clone(), move |c| f.eval(c)?.sqrt())
    };
    let frame = frame.map(|fr| fr.scaled(format!("{}[{}]", fr.label(), name), &root));
    (g, frame)
}

fn positive<T: Scalar>(f: &ScalarField<T>) -> ScalarField<T> {
    let inner = f.clone();
    ScalarField::new(f.chart().clone(), move |c| {
        let v = inner.eval(c)?;
        if v.value() > T::zero() {
            Ok(v)
        } else {
            Err(JetError::Domain { function: "conformal factor", argument: v.value().as_f64() })
        }
    })
}

/// Outcome of [`derdzinski_factor`].
#[derive(Debug, Clone, PartialEq)]
pub enum DerdzinskiOutcome<T> {
    /// `|W⁺|^{2/3} = (Σλ²)^{1/3}`, with whether the spectrum is degenerate.
    Factor { value: T, pattern_match: bool },
    /// `W⁺` vanishes at the point.
    Inapplicable { reason: String },
    /// The metric is not Einstein at the point.
    PreconditionFailed { reason: String },
}

pub fn derdzinski_factor<T: Scalar>(
    metric: &MetricField<T>,
    frame: &FrameField<T>,
    p: &ChartPoint<T>,
) -> Result<DerdzinskiOutcome<T>> {
    let w = weyl_plus_at(metric, p, frame)?;
    let tf = w.curvature.tracefree_residual();
    if !(tf.as_f64() < EINSTEIN_TOL) {
        return Ok(DerdzinskiOutcome::PreconditionFailed {
            reason: format!("trace-free Ricci residual {:e} at {:?}", tf.as_f64(), p.coords_f64()),
        });
    }
    if w.spectrum.vanishes {
        return Ok(DerdzinskiOutcome::Inapplicable { reason: format!("W+ vanishes at {:?}", p.coords_f64()) });
    }
    Ok(DerdzinskiOutcome::Factor { value: w.norm2().cbrt(), pattern_match: w.spectrum.pattern_match })
}

/// Ratio statistics of two positive factors over a sample set.
#[derive(Debug, Clone)]
pub struct FactorMatch {
    /// Mean of `lee / weyl`.
    pub constant: f64,
    /// Standard deviation over mean of the ratios.
    pub relative_spread: f64,
    /// Largest `|ratio/mean − 1|`, located.
    pub verdict: Verdict,
}

pub fn factor_match<T: Scalar>(
    lee: impl Fn(&ChartPoint<T>) -> Result<T> + Sync,
    weyl: impl Fn(&ChartPoint<T>) -> Result<T> + Sync,
    points: &[ChartPoint<T>],
    tolerance: f64,
) -> Result<FactorMatch> {
    let mut pairs = Vec::with_capacity(points.len());
    for p in points {
        pairs.push((lee(p)?.as_f64(), weyl(p)?.as_f64()));
    }
    factor_match_values(&pairs, points, tolerance)
}

/// [`factor_match`] over precomputed `(lee, weyl)` values, one per point.
pub fn factor_match_values<T: Scalar>(
    pairs: &[(f64, f64)],
    points: &[ChartPoint<T>],
    tolerance: f64,
) -> Result<FactorMatch> {
    assert_eq!(pairs.len(), points.len(), "one factor pair per point");
    let mut ratios = Vec::with_capacity(points.len());
    for (&(a, b), p) in pairs.iter().zip(points) {
        if !(a > 0.0 && b > 0.0) {
            return Err(GeometryError::Contract(format!(
                "factor_match needs positive factors, got {a:e} and {b:e} at {:?}",
                p.coords_f64()
            )));
        }
        ratios.push(a / b);
    }
    let n = ratios.len().max(1) as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let relative_spread = var.sqrt() / mean;
    let worst = crate::verdict::worst(ratios.iter().enumerate().map(|(index, r)| Observation {
        residual: (r / mean - 1.0).abs(),
        index,
        point: points[index].coords_f64(),
    }));
    let mut verdict = Verdict::below(worst, tolerance);
    verdict.passed = verdict.passed && relative_spread < tolerance;
    Ok(FactorMatch { constant: mean, relative_spread, verdict })
}
