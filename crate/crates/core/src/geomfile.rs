//! Geometry definitions loaded from JSON.
//!
//! ```json
//! {
//!   "name": "flat-file",
//!   "coordinates": ["x1", "x2", "x3", "x4"],
//!   "metric": [["1", "0", "0", "0"], ["", "1", "0", "0"], ["", "", "1", "0"], ["", "", "", "1"]],
//!   "region": {"x1": [-2, 2], "x2": [-2, 2], "x3": [-2, 2], "x4": [-2, 2]},
//!   "coframe": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
//!   "structures": [{"label": "J", "images": [[2, 1], [1, -1], [4, 1], [3, -1]]}],
//!   "expected": ["ricci_flat", "kahler"]
//! }
//! ```
//!
//! Entries below the metric diagonal may be empty; if given they must repeat
//! the mirrored entry. Frame legs in `images` and `forms` are 1-based.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::catalog::{Claim, GeometryEntry, Param, Region};
use crate::chart::Chart;
use crate::complex::AlmostComplexField;
use crate::expr::{Expr, ExprError, GuardExpr, Scope};
use crate::field::ScalarField;
use crate::frame::FrameField;
use crate::jets::{Jet2, DIM};
use crate::metric::{MetricField, Orientation, Signature};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum GeomFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{field}: {source}")]
    Expr {
        field: String,
        #[source]
        source: ExprError,
    },
    #[error("{0}")]
    Invalid(String),
}

type Grid = [[String; DIM]; DIM];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureSpec {
    label: String,
    #[serde(default)]
    images: Option<[[i64; 2]; DIM]>,
    #[serde(default)]
    matrix: Option<Grid>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormSpec {
    label: String,
    /// `[a, b, sign]` for `sign · e^a ∧ e^b`.
    frame_terms: Vec<[i64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    name: String,
    #[serde(default)]
    description: String,
    coordinates: [String; DIM],
    #[serde(default)]
    angular: [bool; DIM],
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default = "riemannian")]
    signature: Signature,
    metric: Grid,
    #[serde(default)]
    guards: Vec<String>,
    region: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    coframe: Option<Grid>,
    #[serde(default)]
    structures: Vec<StructureSpec>,
    #[serde(default)]
    forms: Vec<FormSpec>,
    #[serde(default)]
    scalars: BTreeMap<String, String>,
    #[serde(default)]
    expected: Vec<Claim>,
}

fn riemannian() -> Signature {
    Signature::Riemannian
}

fn parse_expr(field: impl Into<String>, src: &str, scope: &Scope) -> Result<Expr, GeomFileError> {
    Expr::parse(src, scope).map_err(|source| GeomFileError::Expr { field: field.into(), source })
}

fn parse_grid(field: &str, grid: &Grid, scope: &Scope) -> Result<[[Expr; DIM]; DIM], GeomFileError> {
    let mut out: Vec<[Expr; DIM]> = Vec::with_capacity(DIM);
    for (i, row) in grid.iter().enumerate() {
        let mut r = Vec::with_capacity(DIM);
        for (j, src) in row.iter().enumerate() {
            r.push(parse_expr(format!("{field}[{i}][{j}]"), src, scope)?);
        }
        out.push(r.try_into().expect("four entries"));
    }
    Ok(out.try_into().expect("four rows"))
}

fn grid_field<T: Scalar>(
    exprs: [[Expr; DIM]; DIM],
) -> impl Fn(&crate::jets::Coords<T>) -> Result<[[Jet2<T>; DIM]; DIM], crate::jets::JetError> + Send + Sync + 'static {
    move |c| {
        let mut m = [[Jet2::zero(); DIM]; DIM];
        for (row, er) in m.iter_mut().zip(&exprs) {
            for (v, e) in row.iter_mut().zip(er) {
                *v = e.eval(c)?;
            }
        }
        Ok(m)
    }
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn leg(v: i64, what: &str) -> Result<usize, GeomFileError> {
    if (1..=DIM as i64).contains(&v) {
        Ok(v as usize - 1)
    } else {
        Err(GeomFileError::Invalid(format!("{what}: frame leg {v} is not in 1..4")))
    }
}

fn sign(v: i64, what: &str) -> Result<i8, GeomFileError> {
    match v {
        1 => Ok(1),
        -1 => Ok(-1),
        _ => Err(GeomFileError::Invalid(format!("{what}: sign must be 1 or -1, got {v}"))),
    }
}

/// Parses a geometry definition.
pub fn parse_geometry<T: Scalar>(text: &str) -> Result<GeometryEntry<T>, GeomFileError> {
    parse_geometry_with(text, &BTreeMap::new())
}

/// Parses a geometry definition, replacing declared parameter values with
/// `overrides`. Keys the file does not declare are rejected.
pub fn parse_geometry_with<T: Scalar>(
    text: &str,
    overrides: &BTreeMap<String, f64>,
) -> Result<GeometryEntry<T>, GeomFileError> {
    let mut file: GeometryFile = serde_json::from_str(text).map_err(|e| GeomFileError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    for (k, v) in overrides {
        match file.params.get_mut(k) {
            Some(slot) => *slot = *v,
            None => {
                let known: Vec<&str> = file.params.keys().map(String::as_str).collect();
                return Err(GeomFileError::Invalid(format!(
                    "`{}` has no parameter `{k}` (parameters: {})",
                    file.name,
                    if known.is_empty() { "none".to_string() } else { known.join(", ") }
                )));
            }
        }
    }
    build(file)
}

/// Reads and parses a geometry definition file.
pub fn load_geometry_file<T: Scalar>(path: &Path) -> Result<GeometryEntry<T>, GeomFileError> {
    load_geometry_file_with(path, &BTreeMap::new())
}

pub fn load_geometry_file_with<T: Scalar>(
    path: &Path,
    overrides: &BTreeMap<String, f64>,
) -> Result<GeometryEntry<T>, GeomFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| GeomFileError::Io { path: path.display().to_string(), source })?;
    parse_geometry_with(&text, overrides)
}

fn build<T: Scalar>(f: GeometryFile) -> Result<GeometryEntry<T>, GeomFileError> {
    for (i, a) in f.coordinates.iter().enumerate() {
        if f.coordinates[..i].contains(a) {
            return Err(GeomFileError::Invalid(format!("coordinate `{a}` is listed twice")));
        }
        if f.params.contains_key(a) || a == "pi" {
            return Err(GeomFileError::Invalid(format!("coordinate `{a}` shadows a parameter or `pi`")));
        }
    }
    let scope = Scope::new(&f.coordinates, &f.params);

    // metric: upper triangle, lower entries empty or mirrored
    let mut upper = f.metric.clone();
    for i in 0..DIM {
        for j in 0..i {
            let lo = &f.metric[i][j];
            if !lo.trim().is_empty() && squash(lo) != squash(&f.metric[j][i]) {
                return Err(GeomFileError::Invalid(format!(
                    "metric is not symmetric: [{i}][{j}] = `{lo}` but [{j}][{i}] = `{}`",
                    f.metric[j][i]
                )));
            }
            upper[i][j] = "0".into();
        }
    }
    let metric_exprs = parse_grid("metric", &upper, &scope)?;

    let mut chart = Chart::new(&f.name, f.coordinates.each_ref().map(String::as_str)).with_angular(f.angular);
    for (k, src) in f.guards.iter().enumerate() {
        let g = GuardExpr::parse(src, &scope)
            .map_err(|source| GeomFileError::Expr { field: format!("guards[{k}]"), source })?;
        chart = chart.with_guard(src.clone(), move |c: &[T; DIM]| g.holds(c));
    }
    let chart = Arc::new(chart);

    let mut bounds = [(0.0, 0.0); DIM];
    for (i, c) in f.coordinates.iter().enumerate() {
        let [lo, hi] =
            *f.region.get(c).ok_or_else(|| GeomFileError::Invalid(format!("region has no interval for `{c}`")))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GeomFileError::Invalid(format!("region interval for `{c}` is empty or non-finite")));
        }
        bounds[i] = (lo, hi);
    }
    if let Some(k) = f.region.keys().find(|k| !f.coordinates.contains(k)) {
        return Err(GeomFileError::Invalid(format!("region names unknown coordinate `{k}`")));
    }

    let metric =
        MetricField::new(f.name.clone(), chart.clone(), f.signature, Orientation::standard(), grid_field(metric_exprs));

    let frame = match &f.coframe {
        Some(g) => Some(FrameField::new(
            format!("{}-coframe", f.name),
            chart.clone(),
            grid_field(parse_grid("coframe", g, &scope)?),
        )),
        None => None,
    };

    let mut acs = Vec::new();
    for (k, s) in f.structures.iter().enumerate() {
        let what = format!("structures[{k}]");
        let j = match (&s.images, &s.matrix) {
            (Some(images), None) => {
                let frame = frame
                    .as_ref()
                    .ok_or_else(|| GeomFileError::Invalid(format!("{what}: `images` needs a `coframe`")))?;
                let mut im = [(0usize, 1i8); DIM];
                for (b, [a, sg]) in images.iter().enumerate() {
                    im[b] = (leg(*a, &what)?, sign(*sg, &what)?);
                }
                AlmostComplexField::from_frame_map(s.label.clone(), frame, im)
            }
            (None, Some(m)) => AlmostComplexField::from_matrix(
                s.label.clone(),
                chart.clone(),
                grid_field(parse_grid(&what, m, &scope)?),
            ),
            _ => return Err(GeomFileError::Invalid(format!("{what}: give exactly one of `images` or `matrix`"))),
        };
        acs.push(j);
    }

    let mut forms = Vec::new();
    for (k, fs) in f.forms.iter().enumerate() {
        let what = format!("forms[{k}]");
        let frame =
            frame.as_ref().ok_or_else(|| GeomFileError::Invalid(format!("{what}: frame terms need a `coframe`")))?;
        let mut terms = Vec::with_capacity(fs.frame_terms.len());
        for [a, b, s] in &fs.frame_terms {
            terms.push((leg(*a, &what)?, leg(*b, &what)?, sign(*s, &what)?));
        }
        forms.push(frame.two_form(fs.label.clone(), &terms));
    }

    let mut scalars = Vec::new();
    for (name, src) in &f.scalars {
        let e = parse_expr(format!("scalars.{name}"), src, &scope)?;
        scalars.push((name.clone(), ScalarField::new(chart.clone(), move |c| e.eval(c))));
    }

    Ok(GeometryEntry {
        name: f.name,
        description: f.description,
        params: f.params.iter().map(|(name, value)| Param { name: name.clone(), value: *value }).collect(),
        chart,
        metric,
        frames: frame.into_iter().collect(),
        forms,
        acs,
        probes: Vec::new(),
        scalars,
        sigma: None,
        isometry: None,
        expected: f.expected,
        region: Region::new(bounds),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"{
        "name": "flat-file",
        "coordinates": ["x1", "x2", "x3", "x4"],
        "metric": [["1", "0", "0", "0"], ["", "1", "0", "0"], ["", "", "1", "0"], ["", "", "", "1"]],
        "region": {"x1": [-2, 2], "x2": [-2, 2], "x3": [-2, 2], "x4": [-2, 2]},
        "coframe": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
        "structures": [{"label": "J", "images": [[2, 1], [1, -1], [4, 1], [3, -1]]}],
        "expected": ["ricci_flat", "kahler"]
    }"#;

    #[test]
    fn flat_file_builds() {
        let e: GeometryEntry<f64> = parse_geometry(FLAT).unwrap();
        let p = e.point([0.1, 0.2, 0.3, 0.4]);
        let j = e.acs[0].values_at(&p).unwrap();
        assert_eq!(j[1][0], 1.0);
        assert_eq!(e.expected, vec![Claim::RicciFlat, Claim::Kahler]);
    }

    #[test]
    fn expression_errors_carry_the_field() {
        let bad = FLAT.replace(r#"["", "1", "0", "0"]"#, r#"["", "si n(x1)", "0", "0"]"#);
        match parse_geometry::<f64>(&bad).unwrap_err() {
            GeomFileError::Expr { field, source } => {
                assert_eq!(field, "metric[1][1]");
                assert_eq!(source.offset, 3);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn json_errors_carry_line_and_column() {
        match parse_geometry::<f64>("{\n  \"name\": 3,\n}").unwrap_err() {
            GeomFileError::Json { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn asymmetric_metric_and_missing_region_are_rejected() {
        let bad = FLAT.replace(r#"["", "1", "0", "0"]"#, r#"["x1", "1", "0", "0"]"#);
        assert!(matches!(parse_geometry::<f64>(&bad), Err(GeomFileError::Invalid(_))));
        let bad = FLAT.replace(r#""x4": [-2, 2]"#, r#""y": [-2, 2]"#);
        assert!(matches!(parse_geometry::<f64>(&bad), Err(GeomFileError::Invalid(_))));
    }

    #[test]
    fn guards_must_be_comparisons() {
        let bad = FLAT.replace(r#""expected""#, r#""guards": ["x1 + 3"], "expected""#);
        assert!(matches!(parse_geometry::<f64>(&bad), Err(GeomFileError::Expr { .. })));
        let ok = FLAT.replace(r#""expected""#, r#""guards": ["x1 + 3 > 0"], "expected""#);
        let e: GeometryEntry<f64> = parse_geometry(&ok).unwrap();
        assert!(!e.point([-3.5, 0.0, 0.0, 0.0]).valid);
    }

    #[test]
    fn parameter_overrides_replace_declared_values_only() {
        let src = FLAT
            .replace(r#""expected""#, r#""params": {"c": 2.0}, "expected""#)
            .replace(r#"["", "", "", "1"]"#, r#"["", "", "", "c"]"#);
        let e: GeometryEntry<f64> = parse_geometry_with(&src, &BTreeMap::from([("c".to_string(), 5.0)])).unwrap();
        assert_eq!(e.param("c"), Some(5.0));
        let g = e.metric.metric_at(&e.point([0.0; DIM])).unwrap();
        assert_eq!(g[3][3].value(), 5.0);
        let unknown = BTreeMap::from([("d".to_string(), 1.0)]);
        assert!(matches!(parse_geometry_with::<f64>(&src, &unknown), Err(GeomFileError::Invalid(_))));
    }
}
