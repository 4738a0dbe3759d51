//! Levi-Civita connection and curvature.
//!
//! Conventions:
//! * `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`
//! * `R^l_{ijk} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`,
//!   i.e. `R(∂_i,∂_j)∂_k = R^l_{ijk} ∂_l`
//! * `R_{ijkl} = g_{lm} R^m_{ijk} = ⟨R(∂_i,∂_j)∂_k, ∂_l⟩`
//! * `Ric_{jk} = R^i_{ijk}`, positive on the round sphere.

use crate::chart::ChartPoint;
use crate::error::Result;
use crate::jets::{Jet1, Jet2, DIM};
use crate::linalg::{values4, Mat4};
use crate::metric::MetricField;
use crate::scalar::Scalar;

/// `gamma[k][i][j] = Γ^k_{ij}`.
pub type Christoffel<S> = [[[S; DIM]; DIM]; DIM];
pub type Rank4<S> = [[[[S; DIM]; DIM]; DIM]; DIM];

/// Added to every normalizing scale so exact zeros stay finite.
pub const SCALE_FLOOR: f64 = 1e-30;

pub const RIEMANN_CONVENTION: &str =
    "R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}; \
R_{ijkl} = g_{lm} R^m_{ijk}; Ric_{jk} = R^i_{ijk} (round sphere has positive Ricci)";

/// Christoffel symbols with their first partials, from metric jets.
pub fn christoffel_from_jets<T: Scalar>(g: &Mat4<Jet2<T>>, gi: &Mat4<Jet2<T>>) -> Christoffel<Jet1<T>> {
    let half = T::lit(0.5);
    // lowered[l][i][j] = ∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}, as a first-order jet
    let mut lowered = [[[Jet1::zero(); DIM]; DIM]; DIM];
    for l in 0..DIM {
        for i in 0..DIM {
            for j in i..DIM {
                let v = g[j][l].partial(i) + g[i][l].partial(j) - g[i][j].partial(l);
                lowered[l][i][j] = v;
                lowered[l][j][i] = v;
            }
        }
    }
    let mut gamma = [[[Jet1::zero(); DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for j in i..DIM {
                let mut acc = Jet1::zero();
                for (l, low) in lowered.iter().enumerate() {
                    acc += gi[k][l].truncate() * low[i][j];
                }
                let v = acc.scale(half);
                gamma[k][i][j] = v;
                gamma[k][j][i] = v;
            }
        }
    }
    gamma
}

/// Christoffel symbols with first partials at `p`.
pub fn christoffel_jets<T: Scalar>(metric: &MetricField<T>, p: &ChartPoint<T>) -> Result<Christoffel<Jet1<T>>> {
    let [g, gi] = metric.metric_and_inverse_at(p)?;
    Ok(christoffel_from_jets(&g, &gi))
}

/// `Γ^k_{ij}` at `p`.
pub fn christoffel<T: Scalar>(metric: &MetricField<T>, p: &ChartPoint<T>) -> Result<Christoffel<T>> {
    let jets = christoffel_jets(metric, p)?;
    Ok(jets.map(|a| a.map(|b| b.map(|c| c.value))))
}

/// Curvature quantities at a single point.
#[derive(Debug, Clone)]
pub struct CurvatureBundle<T> {
    pub metric: Mat4<T>,
    pub inverse_metric: Mat4<T>,
    pub christoffel: Christoffel<T>,
    /// `riemann[l][i][j][k] = R^l_{ijk}`
    pub riemann: Rank4<T>,
    /// `riemann_lowered[i][j][k][l] = R_{ijkl}`
    pub riemann_lowered: Rank4<T>,
    pub ricci: Mat4<T>,
    pub scalar: T,
    pub tracefree_ricci: Mat4<T>,
}

/// Riemann, Ricci, scalar and trace-free Ricci curvature at `p`.
pub fn curvature<T: Scalar>(metric: &MetricField<T>, p: &ChartPoint<T>) -> Result<CurvatureBundle<T>> {
    let [g, gi] = metric.metric_and_inverse_at(p)?;
    let gamma = christoffel_from_jets(&g, &gi);
    Ok(curvature_from_parts(values4(&g), values4(&gi), &gamma))
}

pub(crate) fn curvature_from_parts<T: Scalar>(
    g: Mat4<T>,
    gi: Mat4<T>,
    gamma: &Christoffel<Jet1<T>>,
) -> CurvatureBundle<T> {
    let z = T::zero();
    let mut riemann = [[[[z; DIM]; DIM]; DIM]; DIM];
    for l in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                if i == j {
                    continue;
                }
                for k in 0..DIM {
                    let mut v = gamma[l][j][k].grad[i] - gamma[l][i][k].grad[j];
                    for m in 0..DIM {
                        v = v + gamma[l][i][m].value * gamma[m][j][k].value
                            - gamma[l][j][m].value * gamma[m][i][k].value;
                    }
                    riemann[l][i][j][k] = v;
                }
            }
        }
    }
    let mut lowered = [[[[z; DIM]; DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let mut v = z;
                    for (m, row) in g[l].iter().enumerate() {
                        v = v + *row * riemann[m][i][j][k];
                    }
                    lowered[i][j][k][l] = v;
                }
            }
        }
    }
    let mut ricci = [[z; DIM]; DIM];
    for j in 0..DIM {
        for k in 0..DIM {
            let mut v = z;
            for (i, r) in riemann.iter().enumerate() {
                v = v + r[i][j][k];
            }
            ricci[j][k] = v;
        }
    }
    let mut scalar = z;
    for j in 0..DIM {
        for k in 0..DIM {
            scalar = scalar + gi[j][k] * ricci[j][k];
        }
    }
    let quarter = T::lit(0.25);
    let mut tracefree = ricci;
    for j in 0..DIM {
        for k in 0..DIM {
            tracefree[j][k] = ricci[j][k] - quarter * scalar * g[j][k];
        }
    }
    CurvatureBundle {
        metric: g,
        inverse_metric: gi,
        christoffel: gamma.map(|a| a.map(|b| b.map(|c| c.value))),
        riemann,
        riemann_lowered: lowered,
        ricci,
        scalar,
        tracefree_ricci: tracefree,
    }
}

fn max_abs_rank4<T: Scalar>(r: &Rank4<T>) -> T {
    r.iter().flatten().flatten().flatten().fold(T::zero(), |m, v| m.max(v.abs()))
}

impl<T: Scalar> CurvatureBundle<T> {
    /// Normalizing scale for zero tests: the largest `|R^l_{ijk}|` plus a floor.
    pub fn scale(&self) -> T {
        max_abs_rank4(&self.riemann) + T::lit(SCALE_FLOOR)
    }

    fn lowered_scale(&self) -> T {
        max_abs_rank4(&self.riemann_lowered) + T::lit(SCALE_FLOOR)
    }

    /// `max|Ric| / scale`.
    pub fn ricci_residual(&self) -> T {
        let m = self.ricci.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
        m / self.scale()
    }

    /// `max|Ric − (R/4) g| / scale`.
    pub fn tracefree_residual(&self) -> T {
        let m = self.tracefree_ricci.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
        m / self.scale()
    }

    /// `|g^{jk} (Ric − (R/4) g)_{jk}|` relative to `|R|` and the curvature scale.
    pub fn tracefree_trace_residual(&self) -> T {
        let mut tr = T::zero();
        for j in 0..DIM {
            for k in 0..DIM {
                tr = tr + self.inverse_metric[j][k] * self.tracefree_ricci[j][k];
            }
        }
        tr.abs() / (self.scalar.abs() + self.scale())
    }

    /// Largest violation of the pair symmetries of `R_{ijkl}`, relative.
    pub fn symmetry_residual(&self) -> T {
        let r = &self.riemann_lowered;
        let mut worst = T::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        let v = r[i][j][k][l];
                        worst = worst
                            .max((v + r[j][i][k][l]).abs())
                            .max((v + r[i][j][l][k]).abs())
                            .max((v - r[k][l][i][j]).abs());
                    }
                }
            }
        }
        worst / self.lowered_scale()
    }

    /// First Bianchi identity `R_{ijkl} + R_{jkil} + R_{kijl} = 0`, relative.
    pub fn bianchi_residual(&self) -> T {
        let r = &self.riemann_lowered;
        let mut worst = T::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        worst = worst.max((r[i][j][k][l] + r[j][k][i][l] + r[k][i][j][l]).abs());
                    }
                }
            }
        }
        worst / self.lowered_scale()
    }

    /// Symmetry of `Γ^k_{ij}` in the lower indices (exact by construction).
    pub fn christoffel_symmetry_residual(&self) -> T {
        let mut worst = T::zero();
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    worst = worst.max((self.christoffel[k][i][j] - self.christoffel[k][j][i]).abs());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::metric::{euclidean, Orientation, Signature};
    use std::sync::Arc;

    fn sphere_block() -> MetricField<f64> {
        // R² × S² with the unit round sphere in (theta, phi)
        let chart = Arc::new(
            Chart::new("s2xr2", ["theta", "phi", "u", "v"])
                .with_guard("0 < theta < pi", |c| c[0] > 0.0 && c[0] < std::f64::consts::PI),
        );
        MetricField::new("s2xr2", chart, Signature::Riemannian, Orientation::standard(), |c| {
            let mut g = [[Jet2::zero(); DIM]; DIM];
            g[0][0] = Jet2::one();
            let s = c[0].sin();
            g[1][1] = s * s;
            g[2][2] = Jet2::one();
            g[3][3] = Jet2::one();
            Ok(g)
        })
    }

    #[test]
    fn flat_metric_has_no_curvature() {
        let m = euclidean(Arc::new(Chart::new("R4", ["x", "y", "z", "w"])));
        let p = m.chart().point([1.0, 2.0, 3.0, 4.0]);
        let b = curvature(&m, &p).unwrap();
        assert!(b.christoffel.iter().flatten().flatten().all(|v| *v == 0.0));
        assert!(b.riemann.iter().flatten().flatten().flatten().all(|v| *v == 0.0));
        assert_eq!(b.scalar, 0.0);
        assert_eq!(b.ricci_residual(), 0.0);
    }

    #[test]
    fn sphere_christoffel_closed_form() {
        let m = sphere_block();
        let theta = 0.7;
        let p = m.chart().point([theta, 0.2, 0.0, 0.0]);
        let gamma = christoffel(&m, &p).unwrap();
        let expected = -theta.sin() * theta.cos();
        assert!((gamma[0][1][1] - expected).abs() < 1e-15);
        assert!((gamma[1][0][1] - theta.cos() / theta.sin()).abs() < 1e-14);
    }

    #[test]
    fn sphere_curvature_sign_convention() {
        let m = sphere_block();
        let p = m.chart().point([1.1, 0.2, 0.0, 0.0]);
        let b = curvature(&m, &p).unwrap();
        // unit S²: Ric = g on the sphere block, scalar curvature 2
        assert!((b.scalar - 2.0).abs() < 1e-13);
        assert!((b.ricci[0][0] - 1.0).abs() < 1e-13);
        // sectional curvature ⟨R(X,Y)Y,X⟩ = +1 for X=∂θ, Y=∂φ/sinθ
        let s2 = 1.1f64.sin().powi(2);
        assert!((b.riemann_lowered[0][1][1][0] / s2 - 1.0).abs() < 1e-13);
        assert!(b.symmetry_residual() < 1e-14);
        assert!(b.bianchi_residual() < 1e-14);
        assert!(b.tracefree_trace_residual() < 1e-14);
    }
}
