//! Self-dual Taub-NUT in the Bianchi IX form and in the Gibbons-Hawking form.

use std::sync::Arc;

use crate::chart::{Chart, ChartPoint};
use crate::complex::AlmostComplexField;
use crate::error::{GeometryError, Result};
use crate::field::{ScalarField, VectorField};
use crate::forms::{exterior_derivative, KFormField};
use crate::frame::FrameField;
use crate::jets::{Coords, Jet2, DIM};
use crate::linalg::{invert4, values4, Mat4};
use crate::metric::{MetricField, Orientation, Signature};
use crate::scalar::Scalar;

use super::{Claim, GeometryEntry, Param, Region, BUILTINS};

pub const TAUB_NUT_DEFAULT_M: f64 = 0.5;

/// `σ_1, σ_2, σ_3` on `(ρ, θ, φ, ψ)`:
/// `σ1 = (sinψ dθ − sinθ cosψ dφ)/2`, `σ2 = (cosψ dθ + sinθ sinψ dφ)/2`,
/// `σ3 = (dψ + cosθ dφ)/2`.
fn sigma_jets<T: Scalar>(c: &Coords<T>) -> [[Jet2<T>; DIM]; 3] {
    let half = T::lit(0.5);
    let (st, ct) = (c[1].sin(), c[1].cos());
    let (sp, cp) = (c[3].sin(), c[3].cos());
    let z = Jet2::zero();
    [[z, sp * half, -(st * cp) * half, z], [z, cp * half, st * sp * half, z], [z, z, ct * half, Jet2::constant(half)]]
}

fn outer_add<T: Scalar>(g: &mut Mat4<Jet2<T>>, w: Jet2<T>, a: &[Jet2<T>; DIM]) {
    for i in 0..DIM {
        for j in 0..DIM {
            g[i][j] += w * a[i] * a[j];
        }
    }
}

fn taub_nut_chart<T: Scalar>() -> Arc<Chart<T>> {
    Arc::new(
        Chart::new("taub-nut", ["rho", "theta", "phi", "psi"])
            .with_angular([false, false, true, true])
            .with_guard("rho > 0", |c| c[0] > T::zero())
            .with_guard("0 < theta < pi", |c| c[1] > T::zero() && c[1] < T::PI()),
    )
}

fn taub_nut_metric<T: Scalar>(chart: Arc<Chart<T>>, m: T) -> MetricField<T> {
    MetricField::new("taub-nut", chart, Signature::Riemannian, Orientation::standard(), move |c| {
        let rho = c[0];
        let s = rho + T::lit(2.0) * m;
        let s_inv = s.recip();
        let mut g = [[Jet2::zero(); DIM]; DIM];
        g[0][0] = s / (rho * T::lit(4.0));
        let sigma = sigma_jets(c);
        let round = rho * s;
        outer_add(&mut g, round, &sigma[0]);
        outer_add(&mut g, round, &sigma[1]);
        outer_add(&mut g, rho * s_inv * (T::lit(4.0) * m * m), &sigma[2]);
        Ok(g)
    })
}

/// The orthonormal coframe `e^i = A d(ρ n_i)` for the unit vector `n(θ, φ)`,
/// `e^4 = m √(ρ/(ρ+2m)) (dψ + cosθ dφ)`, `A = √((ρ+2m)/(4ρ))`.
fn taub_nut_frame<T: Scalar>(chart: Arc<Chart<T>>, m: T) -> FrameField<T> {
    FrameField::new("taub-nut", chart, move |c| {
        let (rho, th, ph) = (c[0], c[1], c[2]);
        let s = rho + T::lit(2.0) * m;
        let a = (s / (rho * T::lit(4.0))).sqrt()?;
        let b = (rho / s).sqrt()? * m;
        let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
        let z = Jet2::zero();
        Ok([
            [a * st * cp, a * rho * ct * cp, -(a * rho * st * sp), z],
            [a * st * sp, a * rho * ct * sp, a * rho * st * cp, z],
            [a * ct, -(a * rho * st), z, z],
            [z, z, b * ct, b],
        ])
    })
}

/// Structure label, frame map, Kähler form label, Kähler form terms.
type StructureSpec = (&'static str, [(usize, i8); DIM], &'static str, [(usize, usize, i8); 2]);

/// The three complex structures as frame maps `Ĵ e_a = ±e_b`, zero-based.
pub(crate) const TAUB_NUT_STRUCTURES: [StructureSpec; 3] = [
    ("J1", [(1, 1), (0, -1), (3, 1), (2, -1)], "omega1", [(0, 1, 1), (2, 3, 1)]),
    ("J2", [(3, 1), (2, 1), (1, -1), (0, -1)], "omega2", [(0, 3, 1), (1, 2, 1)]),
    ("J3", [(2, 1), (3, -1), (0, -1), (1, 1)], "omega3", [(0, 2, 1), (3, 1, 1)]),
];

/// Taub-NUT with NUT parameter `m`,
/// `g = (ρ+2m)/(4ρ) dρ² + ρ(ρ+2m)(σ1² + σ2²) + 4m²ρ/(ρ+2m) σ3²`.
pub fn taub_nut<T: Scalar>(m: f64) -> Result<GeometryEntry<T>> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(GeometryError::Parameter(format!("taub-nut needs m > 0, got {m}")));
    }
    let chart = taub_nut_chart::<T>();
    let mt = T::lit(m);
    let metric = taub_nut_metric(chart.clone(), mt);
    let frame = taub_nut_frame(chart.clone(), mt);
    let mut acs = Vec::new();
    let mut forms = Vec::new();
    for (jl, images, wl, terms) in TAUB_NUT_STRUCTURES {
        acs.push(AlmostComplexField::from_frame_map(jl, &frame, images));
        forms.push(frame.two_form(wl, &terms));
    }
    let sigma: [KFormField<T>; 3] = std::array::from_fn(|k| {
        KFormField::one_form(format!("sigma{}", k + 1), chart.clone(), move |c| Ok(sigma_jets(c)[k]))
    });
    forms.extend(sigma.iter().cloned());
    let pi = std::f64::consts::PI;
    Ok(GeometryEntry {
        name: "taub-nut".into(),
        description: BUILTINS[1].summary.into(),
        params: vec![Param { name: "m".into(), value: m }],
        chart,
        metric,
        frames: vec![frame],
        forms,
        acs,
        probes: Vec::new(),
        scalars: Vec::new(),
        sigma: Some(sigma),
        isometry: None,
        expected: vec![Claim::RicciFlat, Claim::HyperKahler],
        region: Region::new([(0.1, 10.0), (0.05, pi - 0.05), (0.0, 2.0 * pi), (0.0, 4.0 * pi)]),
    })
}

fn r3_chart<T: Scalar>() -> Arc<Chart<T>> {
    Arc::new(
        Chart::new("taub-nut-r3", ["x", "y", "z", "t"])
            .with_angular([false, false, false, true])
            .with_guard("x^2 + y^2 + z^2 > 0", |c| c[0] * c[0] + c[1] * c[1] + c[2] * c[2] > T::zero())
            .with_guard("x^2 + y^2 > 0", |c| c[0] * c[0] + c[1] * c[1] > T::zero()),
    )
}

fn harmonic_v<T: Scalar>(c: &Coords<T>) -> std::result::Result<Jet2<T>, crate::jets::JetError> {
    let r = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()?;
    Ok((r * T::lit(2.0)).recip() + T::one())
}

/// `Θ = (z/r)(x dy − y dx) / (2(x² + y²))`, the pull-back of `½ cosθ dφ`.
fn theta_jets<T: Scalar>(c: &Coords<T>) -> std::result::Result<[Jet2<T>; DIM], crate::jets::JetError> {
    let (x, y, z) = (c[0], c[1], c[2]);
    let rho2 = x * x + y * y;
    let r = (rho2 + z * z).sqrt()?;
    let k = z / (r * rho2 * T::lit(2.0));
    Ok([-(k * y), k * x, Jet2::zero(), Jet2::zero()])
}

/// The coordinate map `(ρ, θ, φ, ψ) ↦ (x, y, z, t)` and its inverse.
#[derive(Clone)]
pub struct Isometry<T> {
    pub target: MetricField<T>,
    /// `x = (ρ/2) sinθ cosφ`, `y = (ρ/2) sinθ sinφ`, `z = (ρ/2) cosθ`, `t = ψ/2`,
    /// as jets on the target chart.
    pub inverse: VectorField<T>,
}

impl<T: Scalar> Isometry<T> {
    /// `f(x, y, z, t) = (2r, arccos(z/r), atan2(y, x), 2t)`.
    pub fn forward(&self, p: &ChartPoint<T>) -> Result<ChartPoint<T>> {
        let [x, y, z, t] = p.coords;
        let r = (x * x + y * y + z * z).sqrt();
        if !(x * x + y * y > T::zero()) {
            return Err(GeometryError::Guard {
                chart: p.chart.to_string(),
                point: p.coords_f64(),
                guard: "x^2 + y^2 > 0".into(),
            });
        }
        let two = T::lit(2.0);
        Ok(self.target.chart().point([two * r, (z / r).acos(), y.atan2(x), two * t]))
    }

    /// `max|f⁻¹(f(p)) − p|`.
    pub fn round_trip_residual(&self, p: &ChartPoint<T>) -> Result<T> {
        let q = self.forward(p)?;
        let back = self.inverse.at(&q)?;
        Ok((0..DIM).fold(T::zero(), |m, i| m.max((back[i].value() - p.coords[i]).abs())))
    }

    /// `max|(f*g_target − g_source)_{μν}| / max|g_source|` at `p`, with the
    /// Jacobian of `f` taken as the inverse of the jet Jacobian of `f⁻¹`.
    pub fn pullback_residual(&self, source: &MetricField<T>, p: &ChartPoint<T>) -> Result<T> {
        let q = self.forward(p)?;
        let inv = self.inverse.at(&q)?;
        let mut k = [[T::zero(); DIM]; DIM];
        for a in 0..DIM {
            for mu in 0..DIM {
                k[a][mu] = inv[a].d(mu);
            }
        }
        let jf = invert4(&k, T::lit(1e-14))
            .map_err(|(det, scale)| GeometryError::Singular {
                point: p.coords_f64(),
                det: det.as_f64(),
                scale: scale.as_f64(),
            })?
            .inverse;
        let gt = values4(&self.target.metric_at(&q)?);
        let gs = values4(&source.metric_at(p)?);
        let mut worst = T::zero();
        let mut scale = T::zero();
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = T::zero();
                for mu in 0..DIM {
                    for nu in 0..DIM {
                        s = s + jf[mu][a] * gt[mu][nu] * jf[nu][b];
                    }
                }
                worst = worst.max((s - gs[a][b]).abs());
                scale = scale.max(gs[a][b].abs());
            }
        }
        Ok(worst / scale)
    }
}

/// The isometry from the `(x, y, z, t)` form to `taub_nut(1/2)`.
pub fn taub_nut_isometry<T: Scalar>() -> Isometry<T> {
    let chart = taub_nut_chart::<T>();
    let target = taub_nut_metric(chart.clone(), T::lit(TAUB_NUT_DEFAULT_M));
    let inverse = VectorField::new(chart, |c| {
        let half = T::lit(0.5);
        let (rho, th, ph) = (c[0] * half, c[1], c[2]);
        Ok([rho * th.sin() * ph.cos(), rho * th.sin() * ph.sin(), rho * th.cos(), c[3] * half])
    });
    Isometry { target, inverse }
}

/// `V (dx² + dy² + dz²) + V⁻¹ (dt + Θ)²` with `V = 1 + 1/(2r)`.
pub fn taub_nut_r3_form<T: Scalar>() -> GeometryEntry<T> {
    let chart = r3_chart::<T>();
    let metric = MetricField::new("taub-nut-r3", chart.clone(), Signature::Riemannian, Orientation::standard(), |c| {
        let v = harmonic_v(c)?;
        let mut w = theta_jets(c)?;
        w[3] = Jet2::one();
        let mut g = [[Jet2::zero(); DIM]; DIM];
        for (i, row) in g.iter_mut().enumerate().take(3) {
            row[i] = v;
        }
        outer_add(&mut g, v.recip(), &w);
        Ok(g)
    });
    let theta = KFormField::one_form("Theta", chart.clone(), theta_jets);
    let v = ScalarField::new(chart.clone(), harmonic_v);
    GeometryEntry {
        name: "taub-nut-r3".into(),
        description: BUILTINS[2].summary.into(),
        params: Vec::new(),
        chart,
        metric,
        frames: Vec::new(),
        forms: vec![theta],
        acs: Vec::new(),
        probes: Vec::new(),
        scalars: vec![("V".into(), v)],
        sigma: None,
        isometry: Some(taub_nut_isometry()),
        expected: vec![Claim::RicciFlat],
        region: Region::new([(0.1, 3.0), (0.1, 3.0), (-3.0, 3.0), (0.0, 2.0 * std::f64::consts::PI)]),
    }
}

/// `max|dΘ − ⋆₃dV| / max(1, max|∂V|)`, with `⋆₃` the flat Hodge star on the
/// first three coordinates: `(⋆dV)_{yz} = ∂_x V` and cyclic.
pub fn theta_hodge_residual<T: Scalar>(theta: &KFormField<T>, v: &ScalarField<T>, p: &ChartPoint<T>) -> Result<T> {
    let d = exterior_derivative(theta, p)?;
    let dv = v.at(p)?;
    let pairs = [((1, 2), 0), ((2, 0), 1), ((0, 1), 2)];
    let mut worst = T::zero();
    let mut scale = T::one();
    for ((a, b), k) in pairs {
        worst = worst.max((d.get(&[a, b]) - dv.d(k)).abs());
        scale = scale.max(dv.d(k).abs());
    }
    // dΘ must have no legs along dt
    for a in 0..3 {
        worst = worst.max(d.get(&[a, 3]).abs());
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn psi_psi_component() {
        let e = taub_nut::<f64>(0.5).unwrap();
        let g = values4(&e.metric.metric_at(&e.point([1.0, PI / 2.0, 0.3, 0.1])).unwrap());
        assert!((g[3][3] - 0.125).abs() < 1e-15);
        assert!((g[0][0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn r3_potential_at_unit_radius() {
        let e = taub_nut_r3_form::<f64>();
        let v = e.scalar("V").unwrap().at(&e.point([0.6, 0.8, 0.0, 0.0])).unwrap();
        assert!((v.value() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn forward_map_example() {
        let e = taub_nut_r3_form::<f64>();
        let iso = e.isometry.as_ref().unwrap();
        let q = iso.forward(&e.point([0.5, 0.0, 0.0, 0.3])).unwrap();
        let want = [1.0, PI / 2.0, 0.0, 0.6];
        for i in 0..DIM {
            assert!((q.coords[i] - want[i]).abs() < 1e-15);
        }
        assert!(iso.round_trip_residual(&e.point([0.5, 0.0, 0.0, 0.3])).unwrap() < 1e-15);
    }

    #[test]
    fn axis_points_are_rejected() {
        let e = taub_nut_r3_form::<f64>();
        let iso = e.isometry.as_ref().unwrap();
        assert!(iso.forward(&e.point([0.0, 0.0, 1.0, 0.0])).is_err());
        assert!(!e.point([0.0, 0.0, 1.0, 0.0]).valid);
    }

    #[test]
    fn nonpositive_nut_parameter_is_rejected() {
        assert!(taub_nut::<f64>(0.0).is_err());
        assert!(taub_nut::<f64>(-1.0).is_err());
    }
}
