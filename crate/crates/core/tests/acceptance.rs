//! Acceptance criteria, one line each.
//!
//! Each criterion is evaluated at its stated tolerance and printed as PASS or
//! FAIL. The target succeeds when every outcome equals the recorded
//! expectation; the single expected failure is the structure-equation part of
//! criterion 2, whose stated sign does not hold for the reference σ forms.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use common::{all_builtins, entry, fd_christoffel, fd_exterior_derivative, max_abs3, samples};
use curvlab::catalog::fixtures::*;
use curvlab::catalog::{builtin, GeometryEntry};
use curvlab::chart::Chart;
use curvlab::complex::{bracket_jets, hermitian_residual, integrability_verdict, quaternion_check};
use curvlab::curvature::christoffel;
use curvlab::forms::{exterior_derivative, structure_equation_check};
use curvlab::jets::{seed_all, Jet2};
use curvlab::lck::{analyze_lee_form, exactness_probe, lee_form, Exactness, LckClass, LeeTolerances};
use curvlab::metric::{signature_guard, GuardOutcome};
use curvlab::suite::{run, CheckKind, RunConfig, Status};
use curvlab::weyl::weyl_plus_at;
use curvlab::DIM;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

struct Outcome {
    label: &'static str,
    passed: bool,
    expected: bool,
    detail: String,
}

fn worst(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

/// Runs `checks` through the suite and returns the largest residual among
/// records whose name ends with `suffix`.
fn suite_max(e: &GeometryEntry<f64>, checks: &[CheckKind], samples: usize, filter: impl Fn(&str) -> bool) -> f64 {
    let cfg = RunConfig { checks: Some(checks.to_vec()), samples, seed: SEED, ..RunConfig::default() };
    let report = run(e, &cfg).unwrap();
    let picked: Vec<_> = report.records.iter().filter(|r| filter(&r.check)).collect();
    assert!(!picked.is_empty(), "no records matched in {}", report.to_text());
    for r in &picked {
        assert!(matches!(r.verdict, Status::Pass | Status::Fail), "{}", report.to_text());
    }
    worst(picked.iter().map(|r| r.max_residual.unwrap_or(f64::NAN)))
}

fn c1() -> Outcome {
    let tn = entry("taub-nut");
    let checks = [CheckKind::Curvature, CheckKind::HyperKahler];
    let ricci = suite_max(&tn, &checks, 1000, |c| c == "curvature/ricci");
    let d_omega = suite_max(&tn, &checks, 1000, |c| c.ends_with("/d_omega"));
    let herm = suite_max(&tn, &checks, 1000, |c| c.starts_with("hyper_kahler/J") && c.ends_with("/hermitian"));
    let quat = suite_max(&tn, &checks, 1000, |c| c.contains("/quaternion/"));
    let nij = suite_max(&tn, &checks, 1000, |c| c.ends_with("/nijenhuis"));
    Outcome {
        label: "Taub-NUT hyper-Kahler suite",
        passed: ricci < 1e-8 && d_omega < 1e-8 && herm < 1e-9 && quat < 1e-8 && nij < 1e-8,
        expected: true,
        detail: format!("ricci {ricci:.1e}, d omega {d_omega:.1e}, hermitian {herm:.1e}, quaternion {quat:.1e}, nijenhuis {nij:.1e}"),
    }
}

fn c2_fixtures() -> Outcome {
    let tn = entry("taub-nut");
    let frame = tn.frame().unwrap();
    let pts = samples(&tn, 100, SEED);
    let mut bracket: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    for p in &pts {
        let [rho, th, ph, _] = p.coords;
        let e: Vec<_> = (0..DIM).map(|a| frame.vector_field(a).at(p).unwrap()).collect();
        for i in 0..DIM {
            for j in i + 1..DIM {
                let got = bracket_jets(&e[i], &e[j]);
                let want = taub_nut_bracket_reference(i, j, rho, th, ph);
                let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                for k in 0..DIM {
                    bracket = bracket.max((got[k] - want[k]).abs() / scale);
                }
            }
        }
        ortho = ortho.max(frame.orthonormality_residual(&tn.metric, p).unwrap());
    }
    Outcome {
        label: "Taub-NUT fixtures: brackets and orthonormal coframe",
        passed: bracket < 1e-8 && ortho < 1e-9,
        expected: true,
        detail: format!("bracket {bracket:.1e} relative, orthonormality {ortho:.1e}"),
    }
}

fn c2_structure() -> Outcome {
    let tn = entry("taub-nut");
    let sigma = tn.sigma.as_ref().unwrap();
    let pts = samples(&tn, 100, SEED);
    let checks: Vec<_> = pts.iter().map(|p| structure_equation_check(sigma, p).unwrap()).collect();
    let stated = worst(checks.iter().map(|c| c.residual));
    let opposite = worst(checks.iter().map(|c| c.opposite_sign_residual));
    Outcome {
        label: "Taub-NUT fixtures: d sigma_i = eps_ijk sigma_j ^ sigma_k",
        passed: stated < 1e-9,
        expected: false,
        detail: format!("as stated {stated:.1e}; with the opposite sign {opposite:.1e}"),
    }
}

fn c3() -> Outcome {
    let r3 = entry("taub-nut-r3");
    let iso = r3.isometry.as_ref().unwrap();
    let pts = samples(&r3, 500, SEED);
    let pullback = worst(pts.iter().map(|p| iso.pullback_residual(&r3.metric, p).unwrap()));
    let theta = r3.form("Theta").unwrap();
    let v = r3.scalar("V").unwrap();
    let hodge = worst(pts.iter().map(|p| curvlab::catalog::theta_hodge_residual(theta, v, p).unwrap()));
    let off_axis = pts.iter().all(|p| p.coords[0].hypot(p.coords[1]) > 0.1);
    Outcome {
        label: "Taub-NUT isometry",
        passed: off_axis && pullback < 1e-8 && hodge < 1e-9,
        expected: true,
        detail: format!("pullback {pullback:.1e}, dTheta - *dV {hodge:.1e}"),
    }
}

fn c4() -> Outcome {
    let k = entry("kerr");
    let alpha = k.param("alpha").unwrap();
    let j = &k.acs[0];
    let omega = k.form("omega").unwrap();
    let pts = samples(&k, 1000, SEED);
    let mut d_omega: f64 = 0.0;
    let mut lee: f64 = 0.0;
    for p in &pts {
        let [r, th, _, _] = p.coords;
        let want = kerr_domega_reference(r, th, alpha);
        let got = exterior_derivative(omega, p).unwrap();
        d_omega = d_omega.max(got.sub(&want).unwrap().max_abs() / want.max_abs().max(1.0));
        let xi = lee_form(&k.metric, j, p).unwrap();
        let want = kerr_lee_reference(r, th, alpha);
        let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..DIM {
            lee = lee.max((xi[i] - want[i]).abs() / scale);
        }
    }
    let res = analyze_lee_form(&k.metric, j, &pts, &pts, LeeTolerances::default()).unwrap();
    let (potential_ok, potential) = match &res.exactness {
        Exactness::Exact(f) => {
            let field = f.field(k.chart.clone());
            // f must equal log((r − α cosθ)²), not merely have the right gradient
            let offset = worst(pts.iter().map(|p| {
                let [r, th, _, _] = p.coords;
                (field.at(p).unwrap().value() - (r - alpha * th.cos()).powi(2).ln()).abs()
            }));
            (
                f.max_error < 1e-8 && offset < 1e-8,
                format!("{} (|df - xi| {:.1e}, offset {offset:.1e})", f.describe(), f.max_error),
            )
        }
        Exactness::Undetermined => (false, "not found".to_string()),
    };
    Outcome {
        label: "Kerr non-Kahler and globally conformally Kahler",
        passed: d_omega < 1e-8
            && lee < 1e-8
            && res.d_xi.max_residual < 1e-9
            && res.identity.max_residual < 1e-8
            && !res.closedness.passed
            && res.classification == LckClass::GloballyConformallyKahler
            && potential_ok,
        expected: true,
        detail: format!(
            "d omega {d_omega:.1e}, xi {lee:.1e}, d xi {:.1e}, identity {:.1e}, f = {potential}",
            res.d_xi.max_residual, res.identity.max_residual
        ),
    }
}

fn c5() -> Outcome {
    let kc = entry("kerr-conformal");
    let c = [CheckKind::Kahler];
    let d = suite_max(&kc, &c, 1000, |n| n.ends_with("/d_omega"));
    let n = suite_max(&kc, &c, 1000, |n| n.ends_with("/nijenhuis"));
    let h = suite_max(&kc, &c, 1000, |n| n.ends_with("/hermitian"));
    let s = suite_max(&kc, &c, 1000, |n| n.ends_with("/square"));
    Outcome {
        label: "scaled Kerr Kahler suite",
        passed: d < 1e-8 && n < 1e-8 && h < 1e-9 && s < 1e-12,
        expected: true,
        detail: format!("d omega {d:.1e}, nijenhuis {n:.1e}, hermitian {h:.1e}, J^2 + Id {s:.1e}"),
    }
}

fn c6() -> Outcome {
    let k = entry("kerr");
    let alpha = k.param("alpha").unwrap();
    let m = k.param("M").unwrap();
    let jt = k.structure("J_tilde").unwrap();
    let pts = samples(&k, 1000, SEED);
    let mut least = f64::INFINITY;
    let mut layout: f64 = 0.0;
    let mut s_min = f64::INFINITY;
    for p in &pts {
        let [r, th, _, _] = p.coords;
        s_min = s_min.min(kerr_rho(r, th, alpha));
        least = least.min(jt.square_defect(p).unwrap());
        let want = reference_to_engine(&kerr_j_tilde_reference(r, th, m, alpha), KERR_REFERENCE_ORDER);
        let got = jt.values_at(p).unwrap();
        let scale = want.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));
        for a in 0..DIM {
            for b in 0..DIM {
                layout = layout.max((got[a][b] - want[a][b]).abs() / scale);
            }
        }
    }
    Outcome {
        label: "J_tilde fails J^2 = -Id under the original Kerr metric",
        passed: s_min > 1.2 && least > 0.1 && layout < 1e-10,
        expected: true,
        detail: format!("min |J~^2 + Id| {least:.3}, min (r - a cos theta) {s_min:.3}, reference matrix {layout:.1e}"),
    }
}

fn c7() -> Outcome {
    let mut passed = true;
    let mut detail = Vec::new();
    for m in [1.0, 2.0] {
        let e: GeometryEntry<f64> = builtin("kerr", &BTreeMap::from([("M".to_string(), m)])).unwrap();
        let cfg = RunConfig { checks: Some(vec![CheckKind::Weyl]), seed: SEED, ..RunConfig::default() };
        let report = run(&e, &cfg).unwrap();
        let pattern = report.record("weyl/pattern").unwrap();
        let fm = report.record("weyl/factor_match").unwrap();
        let constant: f64 = fm
            .detail
            .as_deref()
            .and_then(|d| d.strip_prefix("constant "))
            .and_then(|d| d.split(',').next())
            .and_then(|d| d.parse().ok())
            .unwrap_or(f64::NAN);
        let want = kerr_factor_constant(m);
        let ok = pattern.max_residual.unwrap() < 1e-7
            && fm.max_residual.unwrap() < 1e-8
            && fm.verdict == Status::Pass
            && (constant - want).abs() < 1e-8 * want;
        passed &= ok;
        detail.push(format!(
            "M={m}: pattern {:.1e}, ratio spread {:.1e}, constant {constant:.9} vs {want:.9}",
            pattern.max_residual.unwrap(),
            fm.max_residual.unwrap()
        ));
    }
    let k = entry("kerr");
    let p = k.point([3.0, FRAC_PI_2, 0.3, 0.2]);
    let mut ev = weyl_plus_at(&k.metric, &p, k.frame().unwrap()).unwrap().spectrum.eigenvalues;
    ev.sort_by(f64::total_cmp);
    let want = [-1.0 / 27.0, -1.0 / 27.0, 2.0 / 27.0];
    let flipped = [-2.0 / 27.0, 1.0 / 27.0, 1.0 / 27.0];
    let err = |w: &[f64; 3]| (0..3).fold(0.0f64, |a, i| a.max((ev[i] - w[i]).abs()));
    let point_err = err(&want).min(err(&flipped));
    passed &= point_err < 1e-9;
    detail.push(format!("eigenvalues at (3, pi/2) {ev:.6?}, error {point_err:.1e}"));
    Outcome {
        label: "Kerr W+ degenerate spectrum and Derdzinski factor",
        passed,
        expected: true,
        detail: detail.join("; "),
    }
}

/// Safe test functions of four variables on `[0.5, 1.5]^4`.
fn jet_functions(x: &[Jet2<f64>; DIM]) -> Vec<Jet2<f64>> {
    let [a, b, c, d] = *x;
    vec![
        a.sin() * (b * c).exp() + (d + Jet2::constant(2.0)).ln().unwrap() * a.sqrt().unwrap(),
        (b * 0.8).tan().unwrap() / (Jet2::one() + c * c) - a.cot().unwrap() * d,
        d.powf(1.7).unwrap() * a.powi(-3).unwrap() + (a * b - c).cos() * d.recip(),
        (a + b + c + d).sqrt().unwrap().checked_div(&(a * d + Jet2::one())).unwrap(),
    ]
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut jet_err: f64 = 0.0;
    for _ in 0..1000 {
        let x: [f64; DIM] = std::array::from_fn(|_| rng.gen_range(0.5..1.5));
        let jets = jet_functions(&seed_all(x));
        let value =
            |y: [f64; DIM]| -> Vec<f64> { jet_functions(&y.map(Jet2::constant)).iter().map(|j| j.value()).collect() };
        let at = |di: [f64; DIM]| value(std::array::from_fn(|k| x[k] + di[k]));
        let unit = |i: usize, h: f64| {
            let mut e = [0.0; DIM];
            e[i] = h;
            e
        };
        let add = |a: [f64; DIM], b: [f64; DIM]| -> [f64; DIM] { std::array::from_fn(|k| a[k] + b[k]) };
        // central differences with one Richardson step
        let grad = |f: usize, i: usize, h: f64| (at(unit(i, h))[f] - at(unit(i, -h))[f]) / (2.0 * h);
        let hess = |f: usize, i: usize, j: usize, h: f64| {
            let (ei, ej) = (unit(i, h), unit(j, h));
            let neg = |v: [f64; DIM]| v.map(|c| -c);
            (at(add(ei, ej))[f] - at(add(ei, neg(ej)))[f] - at(add(neg(ei), ej))[f] + at(add(neg(ei), neg(ej)))[f])
                / (4.0 * h * h)
        };
        let richardson = |d: &dyn Fn(f64) -> f64, h: f64| (4.0 * d(h / 2.0) - d(h)) / 3.0;
        for (f, jet) in jets.iter().enumerate() {
            let scale = jet.value().abs().max(1.0);
            for i in 0..DIM {
                let fd = richardson(&|h| grad(f, i, h), 1e-3);
                jet_err = jet_err.max((jet.d(i) - fd).abs() / fd.abs().max(scale));
                for j in 0..DIM {
                    let fd = richardson(&|h| hess(f, i, j, h), 2e-3);
                    jet_err = jet_err.max((jet.hess(i, j) - fd).abs() / fd.abs().max(scale));
                }
            }
        }
    }
    let mut geo_err: f64 = 0.0;
    for e in all_builtins() {
        for p in samples(&e, 100, SEED) {
            let got = christoffel(&e.metric, &p).unwrap();
            let want = fd_christoffel(&e, &p);
            let scale = max_abs3(&want).max(1.0);
            for k in 0..DIM {
                for i in 0..DIM {
                    for j in 0..DIM {
                        geo_err = geo_err.max((got[k][i][j] - want[k][i][j]).abs() / scale);
                    }
                }
            }
            for form in &e.forms {
                let got = exterior_derivative(form, &p).unwrap();
                let want = fd_exterior_derivative(&e, form, &p);
                geo_err = geo_err.max(got.sub(&want).unwrap().max_abs() / want.max_abs().max(1.0));
            }
        }
    }
    Outcome {
        label: "jets, Christoffel symbols and d against finite differences",
        passed: jet_err < 1e-5 && geo_err < 1e-5,
        expected: true,
        detail: format!("jets {jet_err:.1e}, geometry {geo_err:.1e}"),
    }
}

fn c9() -> Outcome {
    let kl = entry("kerr-lorentzian");
    let refused = matches!(signature_guard(&kl.metric), GuardOutcome::Refused { .. });
    let cfg = RunConfig { checks: Some(vec![CheckKind::Hermitian]), samples: 10, ..RunConfig::default() };
    let report_refused = run(&kl, &cfg).unwrap().records.iter().all(|r| r.verdict == Status::Refused);

    let flat = entry("flat");
    let pts = samples(&flat, 200, SEED);
    let bent = flat.acs[0].perturbed(0.3);
    let bent_v = integrability_verdict(&flat.metric, &bent, &pts, 1e-8).unwrap();
    let square_ok = pts.iter().all(|p| bent.square_residual(p).unwrap() < 1e-12);

    let tn = entry("taub-nut");
    let tpts = samples(&tn, 200, SEED);
    let minus = tn.acs[2].negated("-J3");
    let flipped = quaternion_check([&tn.acs[0], &tn.acs[1], &minus], &tpts, 1e-8).unwrap();
    let flipped_fails = flipped.iter().any(|(_, v)| !v.passed);

    let chart = Arc::new(
        Chart::new("plane", ["x", "y", "z", "w"]).with_guard("x^2 + y^2 > 0", |c| c[0] * c[0] + c[1] * c[1] > 0.0),
    );
    let ppts: Vec<_> = (0..100)
        .map(|k| {
            let t = k as f64 * 0.37;
            chart.point([(1.0 + 0.01 * k as f64) * t.cos(), (1.0 + 0.01 * k as f64) * t.sin(), 0.2, -0.1])
        })
        .collect();
    // (x dy − y dx)/(x² + y²): closed, with no single-valued potential
    let angle = |p: &curvlab::ChartPoint<f64>| {
        let [x, y, _, _] = p.coords;
        let r2 = x * x + y * y;
        Ok([-y / r2, x / r2, 0.0, 0.0])
    };
    let undetermined = matches!(exactness_probe(&chart, angle, &ppts, &ppts).unwrap(), Exactness::Undetermined);

    let herm_flat = worst(pts.iter().map(|p| hermitian_residual(&flat.metric, &bent, p).unwrap()));
    Outcome {
        label: "negative controls",
        passed: refused && report_refused && !bent_v.integrable && square_ok && flipped_fails && undetermined,
        expected: true,
        detail: format!(
            "lorentzian refused {refused}/{report_refused}; perturbed J nijenhuis {:.1e} (J^2 = -Id kept, hermitian {herm_flat:.1e}); \
             (J1, J2, -J3) fails {flipped_fails}; angle form undetermined {undetermined}",
            bent_v.nijenhuis.max_residual
        ),
    }
}

fn c10() -> Outcome {
    let mut identical = true;
    for e in all_builtins() {
        let json = |jobs: Option<usize>| {
            let cfg = RunConfig {
                checks: Some(CheckKind::ALL.to_vec()),
                samples: 200,
                seed: 7,
                jobs,
                ..RunConfig::default()
            };
            run(&e, &cfg).unwrap().to_json()
        };
        let base = json(None);
        identical &= [json(None), json(Some(1)), json(Some(3))].iter().all(|j| *j == base);
    }
    Outcome {
        label: "byte-identical reports across runs and worker counts",
        passed: identical,
        expected: true,
        detail: "all built-ins, all checks, jobs = default, 1, 3".into(),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: Vec<Criterion> = vec![
        ("1", c1),
        ("2a", c2_fixtures),
        ("2b", c2_structure),
        ("3", c3),
        ("4", c4),
        ("5", c5),
        ("6", c6),
        ("7", c7),
        ("8", c8),
        ("9", c9),
        ("10", c10),
    ];
    let mut surprises = Vec::new();
    for (id, f) in criteria {
        let o = f();
        let mark = if o.passed { "PASS" } else { "FAIL" };
        let note = match (o.passed, o.expected) {
            (true, true) | (false, false) => "",
            (false, true) => "  <-- unexpected failure",
            (true, false) => "  <-- unexpectedly passed",
        };
        println!("criterion {id:>3}: {mark}  {} [{}]{note}", o.label, o.detail);
        if o.passed != o.expected {
            surprises.push(id);
        }
    }
    if !surprises.is_empty() {
        eprintln!("criteria with unexpected outcomes: {}", surprises.join(", "));
        std::process::exit(1);
    }
}
