//! Kerr in Boyer-Lindquist coordinates `(r, θ, φ, t)`: Lorentzian, Euclidean
//! and conformally rescaled Euclidean.

use std::sync::Arc;

use crate::chart::Chart;
use crate::complex::{j_from_omega_field, AlmostComplexField};
use crate::error::{GeometryError, Result};
use crate::field::ScalarField;
use crate::frame::FrameField;
use crate::jets::{Coords, Jet2, JetError, DIM};
use crate::metric::{MetricField, Orientation, Signature};
use crate::scalar::Scalar;

use super::{Claim, GeometryEntry, Param, Region, BUILTINS};

/// `Ĵ e1 = e4`, `Ĵ e2 = e3`, zero-based.
pub(crate) const KERR_STRUCTURE: [(usize, i8); DIM] = [(3, 1), (2, 1), (1, -1), (0, -1)];
/// `ω = e1∧e4 + e2∧e3`.
pub(crate) const KERR_OMEGA: [(usize, usize, i8); 2] = [(0, 3, 1), (1, 2, 1)];

fn check_params(name: &str, m: f64, alpha: f64, euclidean: bool) -> Result<()> {
    let ok = m.is_finite() && alpha.is_finite() && m > 0.0 && alpha >= 0.0 && (!euclidean || alpha < m);
    if ok {
        Ok(())
    } else if euclidean {
        Err(GeometryError::Parameter(format!("{name} needs M > 0 and 0 <= alpha < M, got M = {m}, alpha = {alpha}")))
    } else {
        Err(GeometryError::Parameter(format!("{name} needs M > 0 and alpha >= 0, got M = {m}, alpha = {alpha}")))
    }
}

/// Outer root of `Δ = r² − 2Mr − α²`.
pub fn euclidean_horizon(m: f64, alpha: f64) -> f64 {
    m + (m * m + alpha * alpha).sqrt()
}

/// Outer root of `Δ̃ = r² − 2Mr + α²`, or `M` when there is none.
pub fn lorentzian_horizon(m: f64, alpha: f64) -> f64 {
    m + (m * m - alpha * alpha).max(0.0).sqrt()
}

fn kerr_chart<T: Scalar>(name: &str, horizon: f64, alpha: f64, lorentzian: bool) -> Arc<Chart<T>> {
    let (rp, a) = (T::lit(horizon), T::lit(alpha));
    let a2 = a * a;
    let chart = Chart::new(name, ["r", "theta", "phi", "t"])
        .with_angular([false, false, true, true])
        .with_guard(format!("r > {horizon}"), move |c| c[0] > rp)
        .with_guard("0 < theta < pi", |c| c[1] > T::zero() && c[1] < T::PI());
    if lorentzian {
        Arc::new(chart)
    } else {
        Arc::new(
            chart
                .with_guard("r - alpha cos(theta) > 0", move |c| c[0] - a * c[1].cos() > T::zero())
                .with_guard("r^2 - alpha^2 cos(theta)^2 > 0", move |c| {
                    c[0] * c[0] - a2 * c[1].cos() * c[1].cos() > T::zero()
                }),
        )
    }
}

fn region(horizon: f64) -> Region {
    let pi = std::f64::consts::PI;
    Region::new([(1.05 * horizon, 20.0), (0.05, pi - 0.05), (0.0, 2.0 * pi), (0.0, 2.0 * pi)])
}

fn outer_add<T: Scalar>(g: &mut [[Jet2<T>; DIM]; DIM], w: Jet2<T>, a: &[Jet2<T>; DIM]) {
    for i in 0..DIM {
        for j in 0..DIM {
            g[i][j] += w * a[i] * a[j];
        }
    }
}

/// Pieces shared by the metric and the coframe.
struct KerrPieces<T> {
    delta: Jet2<T>,
    xi: Jet2<T>,
    sin: Jet2<T>,
    /// `α dt + (r² − α²) dφ`, or `(r² + α²) dφ − α dt` when Lorentzian
    u: [Jet2<T>; DIM],
    /// `dt − α sin²θ dφ`
    v: [Jet2<T>; DIM],
}

fn pieces<T: Scalar>(c: &Coords<T>, m: T, a: T, lorentzian: bool) -> KerrPieces<T> {
    let (r, th) = (c[0], c[1]);
    let s = if lorentzian { T::one() } else { -T::one() };
    let a2 = a * a * s;
    let delta = r * r - r * (T::lit(2.0) * m) + a2;
    let xi = r * r + th.cos() * th.cos() * a2;
    let sin = th.sin();
    let z = Jet2::zero();
    let u = if lorentzian { [z, z, r * r + a2, Jet2::constant(-a)] } else { [z, z, r * r + a2, Jet2::constant(a)] };
    let v = [z, z, -(sin * sin * a), Jet2::one()];
    KerrPieces { delta, xi, sin, u, v }
}

fn kerr_metric<T: Scalar>(name: &str, chart: Arc<Chart<T>>, m: f64, alpha: f64, lorentzian: bool) -> MetricField<T> {
    let (m, a) = (T::lit(m), T::lit(alpha));
    let signature = if lorentzian { Signature::Lorentzian } else { Signature::Riemannian };
    MetricField::new(name, chart, signature, Orientation::standard(), move |c| {
        let k = pieces(c, m, a, lorentzian);
        let mut g = [[Jet2::zero(); DIM]; DIM];
        g[0][0] = k.xi.checked_div(&k.delta)?;
        g[1][1] = k.xi;
        outer_add(&mut g, k.sin * k.sin / k.xi, &k.u);
        let w = k.delta / k.xi;
        outer_add(&mut g, if lorentzian { -w } else { w }, &k.v);
        Ok(g)
    })
}

/// `e1 = √(Ξ/Δ) dr`, `e2 = √Ξ dθ`, `e3 = (sinθ/√Ξ) u`, `e4 = √(|Δ|/Ξ) v`.
fn kerr_coframe<T: Scalar>(label: &str, chart: Arc<Chart<T>>, m: f64, alpha: f64, lorentzian: bool) -> FrameField<T> {
    let (m, a) = (T::lit(m), T::lit(alpha));
    FrameField::new(label, chart, move |c| {
        let k = pieces(c, m, a, lorentzian);
        let sx = k.xi.sqrt()?;
        let sd = k.delta.sqrt()?;
        let z = Jet2::zero();
        let e3 = k.sin / sx;
        let e4 = sd / sx;
        Ok([[sx / sd, z, z, z], [z, sx, z, z], k.u.map(|x| x * e3), k.v.map(|x| x * e4)])
    })
}

fn lee_factor<T: Scalar>(chart: Arc<Chart<T>>, alpha: f64) -> ScalarField<T> {
    let a = T::lit(alpha);
    ScalarField::new(chart, move |c| {
        let d = c[0] - c[1].cos() * a;
        if d.value() <= T::zero() {
            return Err(JetError::Domain { function: "1/(r - alpha cos theta)^2", argument: d.value().as_f64() });
        }
        Ok((d * d).recip())
    })
}

fn params(m: f64, alpha: f64) -> Vec<Param> {
    vec![Param { name: "M".into(), value: m }, Param { name: "alpha".into(), value: alpha }]
}

/// Lorentzian Kerr,
/// `g = Ξ̃/Δ̃ dr² + Ξ̃ dθ² + sin²θ/Ξ̃ ((r²+α²)dφ − α dt)² − Δ̃/Ξ̃ (dt − α sin²θ dφ)²`.
pub fn kerr_lorentzian<T: Scalar>(m: f64, alpha: f64) -> Result<GeometryEntry<T>> {
    check_params("kerr-lorentzian", m, alpha, false)?;
    let horizon = lorentzian_horizon(m, alpha);
    let chart = kerr_chart::<T>("kerr-lorentzian", horizon, alpha, true);
    let metric = kerr_metric("kerr-lorentzian", chart.clone(), m, alpha, true);
    // not orthonormal (e4 is timelike), so only used to build a J to refuse
    let coframe = kerr_coframe("kerr-lorentzian", chart.clone(), m, alpha, true);
    let j = AlmostComplexField::from_frame_map("J", &coframe, KERR_STRUCTURE);
    Ok(GeometryEntry {
        name: "kerr-lorentzian".into(),
        description: BUILTINS[3].summary.into(),
        params: params(m, alpha),
        chart,
        metric,
        frames: Vec::new(),
        forms: Vec::new(),
        acs: vec![j],
        probes: Vec::new(),
        scalars: Vec::new(),
        sigma: None,
        isometry: None,
        expected: vec![Claim::SignatureRefusal],
        region: region(horizon),
    })
}

/// Euclidean Kerr,
/// `g = Ξ(dr²/Δ + dθ²) + sin²θ/Ξ (α dt + (r²−α²)dφ)² + Δ/Ξ (dt − α sin²θ dφ)²`
/// with `Δ = r² − 2Mr − α²`, `Ξ = r² − α²cos²θ`.
///
/// Forms: `omega`, and the closed `omega_closed = ω/(r − α cosθ)²`. Structures:
/// `J` from the frame and `J_tilde` from `omega_closed` under the original metric.
pub fn kerr_euclidean<T: Scalar>(m: f64, alpha: f64) -> Result<GeometryEntry<T>> {
    check_params("kerr", m, alpha, true)?;
    let horizon = euclidean_horizon(m, alpha);
    let chart = kerr_chart::<T>("kerr", horizon, alpha, false);
    let metric = kerr_metric("kerr", chart.clone(), m, alpha, false);
    let frame = kerr_coframe("kerr", chart.clone(), m, alpha, false);
    let j = AlmostComplexField::from_frame_map("J", &frame, KERR_STRUCTURE);
    let omega = frame.two_form("omega", &KERR_OMEGA);
    let factor = lee_factor(chart.clone(), alpha);
    let closed = omega.scaled_by(&factor).relabel("omega_closed");
    let j_tilde = j_from_omega_field("J_tilde", &metric, &closed);
    Ok(GeometryEntry {
        name: "kerr".into(),
        description: BUILTINS[4].summary.into(),
        params: params(m, alpha),
        chart,
        metric,
        frames: vec![frame],
        forms: vec![omega, closed],
        acs: vec![j],
        probes: vec![j_tilde],
        scalars: vec![("lee_factor".into(), factor)],
        sigma: None,
        isometry: None,
        expected: vec![Claim::RicciFlat, Claim::Gck, Claim::WeylDegenerate],
        region: region(horizon),
    })
}

/// `g/(r − α cosθ)²` with the coframe scaled by `1/(r − α cosθ)`; the
/// complex structure is the frame map of the scaled coframe.
pub fn kerr_conformal<T: Scalar>(m: f64, alpha: f64) -> Result<GeometryEntry<T>> {
    check_params("kerr-conformal", m, alpha, true)?;
    let horizon = euclidean_horizon(m, alpha);
    let chart = kerr_chart::<T>("kerr", horizon, alpha, false);
    let base = kerr_metric("kerr", chart.clone(), m, alpha, false);
    let factor = lee_factor(chart.clone(), alpha);
    let (metric, frame) = crate::lck::conformal_rescale(
        "kerr-conformal",
        &base,
        Some(&kerr_coframe("kerr", chart.clone(), m, alpha, false)),
        &factor,
    );
    let frame = frame.expect("frame passed");
    let j = AlmostComplexField::from_frame_map("J", &frame, KERR_STRUCTURE);
    let omega = frame.two_form("omega_hat", &KERR_OMEGA);
    Ok(GeometryEntry {
        name: "kerr-conformal".into(),
        description: BUILTINS[5].summary.into(),
        params: params(m, alpha),
        chart,
        metric,
        frames: vec![frame],
        forms: vec![omega],
        acs: vec![j],
        probes: Vec::new(),
        scalars: vec![("conformal_factor".into(), factor)],
        sigma: None,
        isometry: None,
        expected: vec![Claim::Kahler],
        region: region(horizon),
    })
}
