//! Finite-difference reimplementations used as independent oracles.
#![allow(dead_code)]

use std::collections::BTreeMap;

use curvlab::catalog::{builtin, GeometryEntry, BUILTINS};
use curvlab::chart::ChartPoint;
use curvlab::forms::{multi_indices, Form, KFormField};
use curvlab::linalg::values4;
use curvlab::metric::MetricField;
use curvlab::sampling::sample_points;
use curvlab::DIM;

pub fn all_builtins() -> Vec<GeometryEntry<f64>> {
    BUILTINS.iter().map(|b| builtin(b.name, &BTreeMap::new()).unwrap()).collect()
}

pub fn entry(name: &str) -> GeometryEntry<f64> {
    builtin(name, &BTreeMap::new()).unwrap()
}

pub fn samples(e: &GeometryEntry<f64>, n: usize, seed: u64) -> Vec<ChartPoint<f64>> {
    sample_points(&e.chart, &e.region, seed, n).unwrap()
}

fn step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

fn shifted(e: &GeometryEntry<f64>, p: &ChartPoint<f64>, i: usize, h: f64) -> ChartPoint<f64> {
    let mut c = p.coords;
    c[i] += h;
    e.point(c)
}

/// Central difference of `f` along coordinate `i`.
pub fn central<R>(
    e: &GeometryEntry<f64>,
    p: &ChartPoint<f64>,
    i: usize,
    f: impl Fn(&ChartPoint<f64>) -> R,
    sub: impl Fn(R, R, f64) -> R,
) -> R {
    let h = step(p.coords[i]);
    sub(f(&shifted(e, p, i, h)), f(&shifted(e, p, i, -h)), 2.0 * h)
}

fn metric_values(m: &MetricField<f64>, p: &ChartPoint<f64>) -> [[f64; DIM]; DIM] {
    values4(&m.metric_at(p).unwrap())
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)` with metric partials
/// taken by central differences of metric values.
pub fn fd_christoffel(e: &GeometryEntry<f64>, p: &ChartPoint<f64>) -> [[[f64; DIM]; DIM]; DIM] {
    let dg: Vec<[[f64; DIM]; DIM]> = (0..DIM)
        .map(|i| {
            central(
                e,
                p,
                i,
                |q| metric_values(&e.metric, q),
                |a, b, h| {
                    let mut out = [[0.0; DIM]; DIM];
                    for r in 0..DIM {
                        for c in 0..DIM {
                            out[r][c] = (a[r][c] - b[r][c]) / h;
                        }
                    }
                    out
                },
            )
        })
        .collect();
    let g = nalgebra::Matrix4::from_fn(|r, c| metric_values(&e.metric, p)[r][c]);
    let gi = g.try_inverse().unwrap();
    let mut gamma = [[[0.0; DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                let mut s = 0.0;
                for l in 0..DIM {
                    s += gi[(k, l)] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gamma[k][i][j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// `(dα)_{i0..ik} = Σ_s (−1)^s ∂_{i_s} α_{i0..î_s..ik}` from central
/// differences of the coefficient values.
pub fn fd_exterior_derivative(e: &GeometryEntry<f64>, form: &KFormField<f64>, p: &ChartPoint<f64>) -> Form<f64> {
    let k = form.degree();
    let partials: Vec<Form<f64>> = (0..DIM)
        .map(|i| central(e, p, i, |q| form.values_at(q).unwrap(), |a, b, h| a.sub(&b).unwrap().scale(1.0 / h)))
        .collect();
    let mut out = Form::zero(k + 1).unwrap();
    for idx in multi_indices(k + 1) {
        let mut v = 0.0;
        for s in 0..idx.len() {
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(t, _)| *t != s).map(|(_, x)| *x).collect();
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            v += sign * partials[idx[s]].get(&rest);
        }
        out.set(idx, v);
    }
    out
}

pub fn max_abs3(a: &[[[f64; DIM]; DIM]; DIM]) -> f64 {
    a.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
}
