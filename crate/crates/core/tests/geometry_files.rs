//! The JSON geometries shipped in `geometries/` against the equivalent
//! built-ins.

mod common;

use std::path::PathBuf;

use common::{entry, samples};
use curvlab::geomfile::load_geometry_file;
use curvlab::linalg::values4;
use curvlab::suite::{run, RunConfig, Status};
use curvlab::{GeometryEntry, DIM};

fn file(name: &str) -> GeometryEntry<f64> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../geometries").join(name);
    load_geometry_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn max_gap(a: &[[f64; DIM]; DIM], b: &[[f64; DIM]; DIM]) -> f64 {
    let scale = b.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().flatten().zip(b.iter().flatten()).fold(0.0, |m, (x, y)| m.max((x - y).abs() / scale))
}

fn same_fields(builtin: &str, path: &str) {
    let (b, f) = (entry(builtin), file(path));
    assert_eq!(b.chart.coordinates(), f.chart.coordinates());
    for p in samples(&b, 100, 11) {
        let q = f.point(p.coords);
        assert!(q.valid, "{path}: builtin point {:?} rejected", p.coords);
        let gap = max_gap(&values4(&f.metric.metric_at(&q).unwrap()), &values4(&b.metric.metric_at(&p).unwrap()));
        assert!(gap < 1e-12, "{path}: metric differs by {gap:e} at {:?}", p.coords);
        let (fb, ff) = (b.frame().unwrap(), f.frame().unwrap());
        assert!(max_gap(&ff.coframe_values(&q).unwrap(), &fb.coframe_values(&p).unwrap()) < 1e-12);
        for j in &f.acs {
            let bj = b.structure(j.label()).unwrap();
            assert!(max_gap(&j.values_at(&q).unwrap(), &bj.values_at(&p).unwrap()) < 1e-12, "{path}: {}", j.label());
        }
        for w in &f.forms {
            let bw = b.form(w.label()).unwrap();
            let gap = w.values_at(&q).unwrap().sub(&bw.values_at(&p).unwrap()).unwrap().max_abs();
            assert!(gap < 1e-12, "{path}: {}", w.label());
        }
    }
}

fn same_verdicts(builtin: &str, path: &str) {
    let cfg = RunConfig { samples: 200, ..RunConfig::default() };
    let (b, f) = (entry(builtin), file(path));
    assert_eq!(b.expected, f.expected);
    let (rb, rf) = (run(&b, &cfg).unwrap(), run(&f, &cfg).unwrap());
    for r in &rf.records {
        assert_eq!(r.verdict, Status::Pass, "{path}: {} {:?}", r.check, r.max_residual);
        if let Some(other) = rb.record(&r.check) {
            assert_eq!(other.verdict, r.verdict, "{path}: {}", r.check);
        }
    }
    // the file drops only what JSON cannot express (probes, σ forms)
    let shared = rf.records.iter().filter(|r| rb.record(&r.check).is_some()).count();
    assert!(shared * 10 >= rb.records.len() * 7, "{path}: only {shared} of {} records shared", rb.records.len());
}

#[test]
fn flat_file_matches_builtin() {
    same_fields("flat", "flat.json");
    same_verdicts("flat", "flat.json");
}

#[test]
fn taub_nut_file_matches_builtin() {
    same_fields("taub-nut", "taub-nut.json");
    same_verdicts("taub-nut", "taub-nut.json");
}

#[test]
fn kerr_file_matches_builtin() {
    same_fields("kerr", "kerr.json");
    same_verdicts("kerr", "kerr.json");
    let lee = file("kerr.json");
    let b = entry("kerr");
    for p in samples(&b, 50, 12) {
        let want = b.scalar("lee_factor").unwrap().at(&p).unwrap().value();
        let got = lee.scalar("lee_factor").unwrap().at(&lee.point(p.coords)).unwrap().value();
        assert!((got - want).abs() < 1e-14 * want.abs().max(1.0));
    }
}
