//! Catalog entries against closed-form reference expressions.

mod common;

use std::collections::BTreeMap;

use common::{entry, samples};
use curvlab::catalog::fixtures::*;
use curvlab::catalog::{builtin, GeometryEntry};
use curvlab::complex::{bracket_jets, kahler_form_field};
use curvlab::forms::Form;
use curvlab::linalg::{values4, Mat4};
use curvlab::DIM;

fn mat_err(a: &Mat4<f64>, b: &Mat4<f64>) -> f64 {
    let scale = b.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    (0..DIM).flat_map(|i| (0..DIM).map(move |j| (i, j))).fold(0.0, |m, (i, j)| m.max((a[i][j] - b[i][j]).abs() / scale))
}

fn form_err(a: &Form<f64>, b: &Form<f64>) -> f64 {
    a.sub(b).unwrap().max_abs() / b.max_abs().max(1.0)
}

fn vec_err(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (0..DIM).fold(0.0, |m, i| m.max((a[i] - b[i]).abs() / scale))
}

#[test]
fn taub_nut_structures_match_reference_matrices() {
    let tn = entry("taub-nut");
    for p in samples(&tn, 200, 1) {
        let [rho, th, ph, _] = p.coords;
        for (k, j) in tn.acs.iter().enumerate() {
            let want = reference_to_engine(&taub_nut_j_reference(k + 1, rho, th, ph), TAUB_NUT_REFERENCE_ORDER);
            let got = j.values_at(&p).unwrap();
            assert!(mat_err(&got, &want) < 1e-12, "J{} at {:?}", k + 1, p.coords);
        }
    }
}

#[test]
fn taub_nut_kahler_forms_match_reference_coordinates() {
    let tn = entry("taub-nut");
    for p in samples(&tn, 200, 2) {
        let [rho, th, ph, _] = p.coords;
        for k in 1..=3 {
            let want = taub_nut_omega_reference(k, rho, th, ph);
            let declared = tn.form(&format!("omega{k}")).unwrap().values_at(&p).unwrap();
            let from_j = kahler_form_field(&tn.metric, &tn.acs[k - 1]).values_at(&p).unwrap();
            assert!(form_err(&declared, &want) < 1e-12, "omega{k} at {:?}", p.coords);
            assert!(form_err(&from_j, &want) < 1e-12, "g(J{k}., .) at {:?}", p.coords);
        }
    }
}

#[test]
fn taub_nut_frame_matches_reference_vectors() {
    let tn = entry("taub-nut");
    let frame = tn.frame().unwrap();
    for p in samples(&tn, 100, 3) {
        let [rho, th, ph, _] = p.coords;
        let e = frame.frame_values(&p).unwrap();
        for a in 0..DIM {
            assert!(vec_err(&e[a], &taub_nut_frame_reference(a, rho, th, ph)) < 1e-12, "e{} at {:?}", a + 1, p.coords);
        }
    }
}

#[test]
fn taub_nut_general_m_matches_shifted_radial_form() {
    // r = ρ + m turns the ρ-form into the m-form of the same metric
    for m in [0.5, 0.8, 1.7] {
        let tn: GeometryEntry<f64> = builtin("taub-nut", &BTreeMap::from([("m".to_string(), m)])).unwrap();
        for p in samples(&tn, 100, 4) {
            let [rho, th, _, ps] = p.coords;
            let want = taub_nut_m_form_metric(rho + m, th, ps, m);
            let got = values4(&tn.metric.metric_at(&p).unwrap());
            assert!(mat_err(&got, &want) < 1e-10, "m = {m} at {:?}", p.coords);
        }
    }
}

#[test]
fn kerr_structures_and_forms_match_reference() {
    let k = entry("kerr");
    let (m, a) = (k.param("M").unwrap(), k.param("alpha").unwrap());
    let frame = k.frame().unwrap();
    for p in samples(&k, 200, 5) {
        let [r, th, _, _] = p.coords;
        let want = reference_to_engine(&kerr_j_reference(r, th, m, a), KERR_REFERENCE_ORDER);
        assert!(mat_err(&k.acs[0].values_at(&p).unwrap(), &want) < 1e-12);
        let omega = k.form("omega").unwrap().values_at(&p).unwrap();
        assert!(form_err(&omega, &kerr_omega_reference(r, th, a)) < 1e-12);
        let closed = k.form("omega_closed").unwrap().values_at(&p).unwrap();
        assert!(form_err(&closed, &kerr_omega_hat_reference(r, th, a)) < 1e-12);
        let e = frame.frame_values(&p).unwrap();
        for b in 0..DIM {
            assert!(vec_err(&e[b], &kerr_frame_reference(b, r, th, m, a)) < 1e-12, "e{} at {:?}", b + 1, p.coords);
        }
    }
}

#[test]
fn scaled_kerr_form_is_the_reference_omega_hat() {
    let kc = entry("kerr-conformal");
    let a = kc.param("alpha").unwrap();
    for p in samples(&kc, 200, 6) {
        let [r, th, _, _] = p.coords;
        let got = kc.form("omega_hat").unwrap().values_at(&p).unwrap();
        assert!(form_err(&got, &kerr_omega_hat_reference(r, th, a)) < 1e-12);
        let from_j = kahler_form_field(&kc.metric, &kc.acs[0]).values_at(&p).unwrap();
        assert!(form_err(&from_j, &got) < 1e-12);
    }
}

/// Worst relative gap between the brackets of `frame_of`'s frame and the
/// reference brackets of the scaled Kerr frame, with the largest reference entry.
fn scaled_bracket_gap(frame_of: &GeometryEntry<f64>, m: f64, a: f64, seed: u64) -> (f64, f64) {
    let frame = frame_of.frame().unwrap();
    let (mut gap, mut size): (f64, f64) = (0.0, 0.0);
    for p in samples(frame_of, 100, seed) {
        let [r, th, _, _] = p.coords;
        let e: Vec<_> = (0..DIM).map(|b| frame.vector_field(b).at(&p).unwrap()).collect();
        for i in 0..DIM {
            for j in i + 1..DIM {
                let want = kerr_scaled_bracket_reference(i, j, r, th, m, a);
                gap = gap.max(vec_err(&bracket_jets(&e[i], &e[j]), &want));
                size = want.iter().fold(size, |s, v| s.max(v.abs()));
            }
        }
    }
    (gap, size)
}

#[test]
fn scaled_kerr_brackets_match_reference() {
    // ξ = (r − α cosθ)(r + α cosθ), so rescaling the frame by r − α cosθ
    // leaves (r + α cosθ)² in the denominators
    for alpha in [0.3, 0.5, 0.9] {
        let params = BTreeMap::from([("alpha".to_string(), alpha)]);
        let kc: GeometryEntry<f64> = builtin("kerr-conformal", &params).unwrap();
        let (gap, size) = scaled_bracket_gap(&kc, 1.0, alpha, 7);
        assert!(size > 1e-2, "reference brackets are trivially small");
        assert!(gap < 1e-12, "alpha = {alpha}: gap {gap:e}");
        // the unscaled frame has different brackets
        let k: GeometryEntry<f64> = builtin("kerr", &params).unwrap();
        assert!(scaled_bracket_gap(&k, 1.0, alpha, 7).0 > 1e-3);
    }
}

#[test]
fn taub_nut_brackets_match_reference() {
    let tn = entry("taub-nut");
    let frame = tn.frame().unwrap();
    for p in samples(&tn, 100, 8) {
        let [rho, th, ph, _] = p.coords;
        let e: Vec<_> = (0..DIM).map(|b| frame.vector_field(b).at(&p).unwrap()).collect();
        for i in 0..DIM {
            for j in i + 1..DIM {
                let want = taub_nut_bracket_reference(i, j, rho, th, ph);
                let gap = vec_err(&bracket_jets(&e[i], &e[j]), &want);
                assert!(gap < 1e-12, "[e{}, e{}] at {:?}: {gap:e}", i + 1, j + 1, p.coords);
            }
        }
    }
}
