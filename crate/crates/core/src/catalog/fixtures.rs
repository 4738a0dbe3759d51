//! Closed-form expressions for the catalog geometries, evaluated pointwise.
//!
//! These are oracles for tests only; no catalog field is built from them.
//! Vectors and forms use the engine's coordinate order: `(ρ, θ, φ, ψ)` for
//! Taub-NUT and `(r, θ, φ, t)` for Kerr. Matrices marked "reference layout"
//! are `P[σ][α] = J^α_σ` with Taub-NUT coordinates ordered `(ρ, φ, θ, ψ)`
//! and Kerr coordinates ordered `(t, r, θ, φ)`; convert them with
//! [`reference_to_engine`].

use crate::forms::Form;
use crate::jets::DIM;
use crate::linalg::Mat4;

/// Reference Taub-NUT index to engine index.
pub const TAUB_NUT_REFERENCE_ORDER: [usize; DIM] = [0, 2, 1, 3];
/// Reference Kerr index to engine index.
pub const KERR_REFERENCE_ORDER: [usize; DIM] = [3, 0, 1, 2];

/// `J[order[j]][order[i]] = P[i][j]`.
pub fn reference_to_engine(p: &Mat4<f64>, order: [usize; DIM]) -> Mat4<f64> {
    let mut j = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for k in 0..DIM {
            j[order[k]][order[i]] = p[i][k];
        }
    }
    j
}

fn two_form(terms: &[(f64, usize, usize)]) -> Form<f64> {
    let mut m = [[0.0; DIM]; DIM];
    for &(c, i, j) in terms {
        m[i][j] += c;
        m[j][i] -= c;
    }
    Form::two_form_from_matrix(&m)
}

const R: usize = 0;
const TH: usize = 1;
const PH: usize = 2;
const PS: usize = 3;
const T: usize = 3;

/// `J_1, J_2, J_3` of Taub-NUT (`m = 1/2`), reference layout; `k` is 1-based.
pub fn taub_nut_j_reference(k: usize, rho: f64, th: f64, ph: f64) -> Mat4<f64> {
    let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
    let cot = ct / st;
    let q = 1.0 + rho;
    let a = 1.0 + rho * st * st;
    let b = rho * (2.0 + rho) * st * st + 1.0;
    match k {
        1 => [
            [0.0, 1.0 / rho, 0.0, ct],
            [-rho * a / q, 0.0, -rho * ct * st / q, 0.0],
            [0.0, cot, 0.0, -a / st],
            [-rho * ct / q, 0.0, st / q, 0.0],
        ],
        2 => [
            [0.0, -cp * cot / rho, -sp / rho, a * cp / (rho * st)],
            [rho * rho * (2.0 * th).sin() * cp / (2.0 * q), sp * cot / q, -a * cp / q, -b * sp / (q * st)],
            [rho * sp, cp, 0.0, rho * ct * cp],
            [-rho * cp * st / q, sp / (q * st), -ct * cp / q, -cot * sp / q],
        ],
        3 => [
            [0.0, sp * cot / rho, -cp / rho, -a * sp / (rho * st)],
            [-rho * rho * (2.0 * th).sin() * sp / (2.0 * q), cp * cot / q, a * sp / q, -b * cp / (q * st)],
            [rho * cp, -sp, 0.0, -rho * ct * sp],
            [rho * sp * st / q, cp / (q * st), ct * sp / q, -cot * cp / q],
        ],
        _ => panic!("Taub-NUT structures are numbered 1 to 3"),
    }
}

/// `ω_1, ω_2, ω_3` of Taub-NUT in closed form, term by term; `k` is 1-based.
pub fn taub_nut_omega_reference(k: usize, rho: f64, th: f64, ph: f64) -> Form<f64> {
    let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
    let q = 0.25;
    let a = 1.0 + rho * st * st;
    match k {
        1 => two_form(&[
            (q * ct, R, PS),
            (q * rho * st * rho * ct, TH, PH),
            (-q * rho * st, TH, PS),
            (q * rho * st * st, R, PH),
            (q, R, PH),
        ]),
        2 => two_form(&[
            (q * (1.0 + rho) * sp, TH, R),
            (q * rho * cp * a, TH, PH),
            (q * rho * cp * ct, TH, PS),
            (-q * rho * cp * ct * st, R, PH),
            (q * cp * st, R, PS),
            (-q * rho * sp * st, PH, PS),
        ]),
        3 => two_form(&[
            (q * (1.0 + rho) * cp, TH, R),
            (-q * rho * sp * a, TH, PH),
            (q * rho * sp * ct * st, R, PH),
            (-q * rho * sp * ct, TH, PS),
            (-q * sp * st, R, PS),
            (-q * rho * cp * st, PH, PS),
        ]),
        _ => panic!("Taub-NUT structures are numbered 1 to 3"),
    }
}

/// The dual frame vector `e_{a+1}` of Taub-NUT in closed form.
pub fn taub_nut_frame_reference(a: usize, rho: f64, th: f64, ph: f64) -> [f64; DIM] {
    let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
    let k = 2.0 / (rho * (1.0 + rho)).sqrt();
    match a {
        0 => [k * rho * st * cp, k * ct * cp, -k * sp / st, k * sp * ct / st],
        1 => [k * rho * st * sp, k * ct * sp, k * cp / st, -k * cp * ct / st],
        2 => [k * rho * ct, -k * st, 0.0, 0.0],
        3 => [0.0, 0.0, 0.0, 2.0 * ((rho + 1.0) / rho).sqrt()],
        _ => panic!("frame index out of range"),
    }
}

/// `[e_{i+1}, e_{j+1}]` of the Taub-NUT frame in closed form, `i < j`.
pub fn taub_nut_bracket_reference(i: usize, j: usize, rho: f64, th: f64, ph: f64) -> [f64; DIM] {
    let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
    let cot = ct / st;
    let d = rho * (1.0 + rho) * (1.0 + rho);
    let d1 = rho * (1.0 + rho);
    let w = st * st * (1.0 + 2.0 * rho) + 1.0;
    let mut v = [0.0; DIM];
    match (i, j) {
        (0, 1) => {
            v[PH] = 2.0 / d;
            v[PS] = 2.0 * (1.0 + 2.0 * rho) * ct / d;
        }
        (0, 2) => {
            v[PH] = 2.0 * cot * sp / d;
            v[TH] = -2.0 * cp / d;
            v[PS] = -2.0 * sp * w / (rho * st * (1.0 + rho) * (1.0 + rho));
        }
        (0, 3) => v[PS] = -2.0 * cp * st / d1,
        (1, 2) => {
            v[PH] = -2.0 * cot * cp / d;
            v[TH] = -2.0 * sp / d;
            v[PS] = 2.0 * cp * w / (rho * st * (1.0 + rho) * (1.0 + rho));
        }
        (1, 3) => v[PS] = -2.0 * sp * st / d1,
        (2, 3) => v[PS] = -2.0 * ct / d1,
        _ => panic!("bracket indices must satisfy i < j < 4"),
    }
    v
}

/// `(r+m)/(4(r−m)) dr² + (r²−m²)(σ1²+σ2²) + 4m²(r−m)/(r+m) σ3²` in the
/// coordinates `(r, θ, φ, ψ)`.
pub fn taub_nut_m_form_metric(r: f64, th: f64, ps: f64, m: f64) -> Mat4<f64> {
    let (st, ct, sp, cp) = (th.sin(), th.cos(), ps.sin(), ps.cos());
    let s1 = [0.0, sp / 2.0, -st * cp / 2.0, 0.0];
    let s2 = [0.0, cp / 2.0, st * sp / 2.0, 0.0];
    let s3 = [0.0, 0.0, ct / 2.0, 0.5];
    let mut g = [[0.0; DIM]; DIM];
    g[0][0] = (r + m) / (4.0 * (r - m));
    let (round, fibre) = (r * r - m * m, 4.0 * m * m * (r - m) / (r + m));
    for i in 0..DIM {
        for j in 0..DIM {
            g[i][j] += round * (s1[i] * s1[j] + s2[i] * s2[j]) + fibre * s3[i] * s3[j];
        }
    }
    g
}

fn kerr_delta(r: f64, m: f64, a: f64) -> f64 {
    r * r - 2.0 * m * r - a * a
}

fn kerr_xi(r: f64, th: f64, a: f64) -> f64 {
    r * r - a * a * th.cos() * th.cos()
}

/// `r − α cosθ`.
pub fn kerr_rho(r: f64, th: f64, a: f64) -> f64 {
    r - a * th.cos()
}

/// Euclidean Kerr `J`, reference layout.
pub fn kerr_j_reference(r: f64, th: f64, m: f64, a: f64) -> Mat4<f64> {
    let (d, x, st) = (kerr_delta(r, m, a), kerr_xi(r, th, a), th.sin());
    [
        [0.0, -d / x, -a * st / x, 0.0],
        [(r * r - a * a) / d, 0.0, 0.0, -a / d],
        [a * st, 0.0, 0.0, 1.0 / st],
        [0.0, a * d * st * st / x, st * (a * a - r * r) / x, 0.0],
    ]
}

/// `J̃` built from the closed form `ω/(r − α cosθ)²`, reference layout.
pub fn kerr_j_tilde_reference(r: f64, th: f64, m: f64, a: f64) -> Mat4<f64> {
    let s = kerr_rho(r, th, a).powi(2);
    kerr_j_reference(r, th, m, a).map(|row| row.map(|v| v / s))
}

/// `ω = dr∧dt − α sin²θ dr∧dφ − α sinθ dt∧dθ + (r²−α²) sinθ dθ∧dφ`.
pub fn kerr_omega_reference(r: f64, th: f64, a: f64) -> Form<f64> {
    let st = th.sin();
    two_form(&[(1.0, R, T), (-a * st * st, R, PH), (-a * st, T, TH), ((r * r - a * a) * st, TH, PH)])
}

/// `ω̂ = ω/(r − α cosθ)²`.
pub fn kerr_omega_hat_reference(r: f64, th: f64, a: f64) -> Form<f64> {
    kerr_omega_reference(r, th, a).scale(1.0 / kerr_rho(r, th, a).powi(2))
}

/// `dω = 2(r + α cosθ) sinθ dr∧dθ∧dφ`, as a 3-form.
pub fn kerr_domega_reference(r: f64, th: f64, a: f64) -> Form<f64> {
    let mut f = Form::zero(3).expect("degree 3");
    f.set(&[R, TH, PH], 2.0 * (r + a * th.cos()) * th.sin());
    f
}

/// `ξ = 2(dr + α sinθ dθ)/(r − α cosθ)`.
pub fn kerr_lee_reference(r: f64, th: f64, a: f64) -> [f64; DIM] {
    let k = 2.0 / kerr_rho(r, th, a);
    [k, k * a * th.sin(), 0.0, 0.0]
}

/// `W⁺ = diag(−M, −M, 2M)/(r − α cosθ)³`.
pub fn kerr_weyl_plus_reference(r: f64, th: f64, m: f64, a: f64) -> [[f64; 3]; 3] {
    let l = m / kerr_rho(r, th, a).powi(3);
    [[-l, 0.0, 0.0], [0.0, -l, 0.0], [0.0, 0.0, 2.0 * l]]
}

/// `|W⁺|^{2/3} = 6^{1/3} M^{2/3}/(r − α cosθ)²`.
pub fn kerr_derdzinski_reference(r: f64, th: f64, m: f64, a: f64) -> f64 {
    6f64.cbrt() * m.powf(2.0 / 3.0) / kerr_rho(r, th, a).powi(2)
}

/// The constant relating the Lee factor to `|W⁺|^{2/3}`: `6^{−1/3} M^{−2/3}`.
pub fn kerr_factor_constant(m: f64) -> f64 {
    1.0 / (6f64.cbrt() * m.powf(2.0 / 3.0))
}

/// Dual frame vector `e_{a+1}` of Euclidean Kerr in closed form.
pub fn kerr_frame_reference(k: usize, r: f64, th: f64, m: f64, a: f64) -> [f64; DIM] {
    let (d, x, st) = (kerr_delta(r, m, a), kerr_xi(r, th, a), th.sin());
    let mut v = [0.0; DIM];
    match k {
        0 => v[R] = (d / x).sqrt(),
        1 => v[TH] = 1.0 / x.sqrt(),
        2 => {
            let s = 1.0 / (st * x.sqrt());
            v[PH] = s;
            v[T] = s * a * st * st;
        }
        3 => {
            let s = 1.0 / (d * x).sqrt();
            v[PH] = -a * s;
            v[T] = (r * r - a * a) * s;
        }
        _ => panic!("frame index out of range"),
    }
    v
}

/// `[e_{i+1}, e_{j+1}]` for the frame of `g/(r − α cosθ)²` in closed form
/// (denominators `(r + α cosθ)²`), `i < j`.
pub fn kerr_scaled_bracket_reference(i: usize, j: usize, r: f64, th: f64, m: f64, a: f64) -> [f64; DIM] {
    let (d, x, st, ct) = (kerr_delta(r, m, a), kerr_xi(r, th, a), th.sin(), th.cos());
    let rp2 = (r + a * ct).powi(2);
    let sd = d.sqrt();
    let cot = ct / st;
    let mut v = [0.0; DIM];
    match (i, j) {
        (0, 1) => {
            let k = a * sd / rp2;
            v[TH] = k * ct;
            v[R] = -k * r * st;
        }
        (0, 2) => {
            let k = a * sd * cot / rp2;
            v[PH] = k;
            v[T] = k * a * st * st;
        }
        (0, 3) => {
            v[PH] = -(a * a * ct * d + a * x * (m - r)) / (d * rp2);
            v[T] = (a * ct * d * (r * r - a * a) + x * (d * r - m * (r * r + a * a))) / (d * rp2);
        }
        (1, 2) => {
            v[PH] = (a * r - x * cot / st) / rp2;
            v[T] = (-r * r * r + x * (r + a * ct) + a * a * r) / rp2;
        }
        (1, 3) => {
            let k = r * a * st / (sd * rp2);
            v[T] = k * (r * r - a * a);
            v[PH] = -k * a;
        }
        (2, 3) => {}
        _ => panic!("bracket indices must satisfy i < j < 4"),
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kerr_example_point() {
        // r = 3, θ = π/2, α = 1/2
        let th = std::f64::consts::FRAC_PI_2;
        let xi = kerr_lee_reference(3.0, th, 0.5);
        assert!((xi[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((xi[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((kerr_derdzinski_reference(3.0, th, 1.0, 0.5) - 6f64.cbrt() / 9.0).abs() < 1e-15);
        let w = kerr_weyl_plus_reference(3.0, th, 1.0, 0.5);
        assert!((w[2][2] - 2.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn m_form_at_half_matches_rho_form_coefficient() {
        // g_ψψ at ρ = 1, θ = π/2: ρ/(4(ρ+1)) = 1/8, with r = ρ + m
        let g = taub_nut_m_form_metric(1.5, std::f64::consts::FRAC_PI_2, 0.3, 0.5);
        assert!((g[3][3] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn reference_layout_conversion_is_a_transposed_permutation() {
        let mut p = [[0.0; DIM]; DIM];
        p[0][1] = 1.0;
        let j = reference_to_engine(&p, KERR_REFERENCE_ORDER);
        // P[t][r] = J^r_t
        assert_eq!(j[0][3], 1.0);
    }
}
