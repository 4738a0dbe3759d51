//! Built-in geometries.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{Chart, ChartPoint};
use crate::complex::AlmostComplexField;
use crate::error::{GeometryError, Result};
use crate::field::ScalarField;
use crate::forms::KFormField;
use crate::frame::FrameField;
use crate::jets::DIM;
use crate::linalg::identity4;
use crate::metric::{euclidean, MetricField};
use crate::scalar::Scalar;

pub mod fixtures;
mod kerr;
mod taub_nut;

pub use kerr::{kerr_conformal, kerr_euclidean, kerr_lorentzian};
pub use taub_nut::{taub_nut, taub_nut_isometry, taub_nut_r3_form, theta_hodge_residual, Isometry, TAUB_NUT_DEFAULT_M};

/// A claim a geometry is expected to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    RicciFlat,
    Kahler,
    HyperKahler,
    Gck,
    WeylDegenerate,
    SignatureRefusal,
}

impl Claim {
    pub const ALL: [Claim; 6] = [
        Claim::RicciFlat,
        Claim::Kahler,
        Claim::HyperKahler,
        Claim::Gck,
        Claim::WeylDegenerate,
        Claim::SignatureRefusal,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Claim::RicciFlat => "ricci_flat",
            Claim::Kahler => "kahler",
            Claim::HyperKahler => "hyper_kahler",
            Claim::Gck => "gck",
            Claim::WeylDegenerate => "weyl_degenerate",
            Claim::SignatureRefusal => "signature_refusal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Axis-aligned sampling box; intervals are half-open `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub bounds: [(f64, f64); DIM],
}

impl Region {
    pub fn new(bounds: [(f64, f64); DIM]) -> Self {
        Self { bounds }
    }

    /// Replaces the interval of the named coordinate.
    pub fn with_interval(mut self, chart_coords: &[String; DIM], key: &str, lo: f64, hi: f64) -> Result<Self> {
        let i = chart_coords.iter().position(|c| c == key).ok_or_else(|| {
            GeometryError::Parameter(format!("no coordinate `{key}` (have {})", chart_coords.join(", ")))
        })?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GeometryError::Parameter(format!("empty or non-finite interval {lo}:{hi} for `{key}`")));
        }
        self.bounds[i] = (lo, hi);
        Ok(self)
    }
}

/// Declared parameter with its value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: f64,
}

/// A geometry with everything the checks need.
#[derive(Clone)]
pub struct GeometryEntry<T> {
    pub name: String,
    pub description: String,
    pub params: Vec<Param>,
    pub chart: Arc<Chart<T>>,
    pub metric: MetricField<T>,
    pub frames: Vec<FrameField<T>>,
    pub forms: Vec<KFormField<T>>,
    pub acs: Vec<AlmostComplexField<T>>,
    /// Tensor fields kept to reproduce a failure, e.g. a `J` built from a
    /// closed form that does not square to `−Id`. Never used as structures.
    pub probes: Vec<AlmostComplexField<T>>,
    pub scalars: Vec<(String, ScalarField<T>)>,
    /// Left-invariant 1-forms `σ_1, σ_2, σ_3`, when the entry has them.
    pub sigma: Option<[KFormField<T>; 3]>,
    pub isometry: Option<Isometry<T>>,
    pub expected: Vec<Claim>,
    pub region: Region,
}

impl<T> fmt::Debug for GeometryEntry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeometryEntry")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("expected", &self.expected)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> GeometryEntry<T> {
    pub fn form(&self, label: &str) -> Option<&KFormField<T>> {
        self.forms.iter().find(|f| f.label() == label)
    }

    pub fn structure(&self, label: &str) -> Option<&AlmostComplexField<T>> {
        self.acs.iter().chain(&self.probes).find(|j| j.label() == label)
    }

    pub fn scalar(&self, name: &str) -> Option<&ScalarField<T>> {
        self.scalars.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn frame(&self) -> Option<&FrameField<T>> {
        self.frames.first()
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn expects(&self, claim: Claim) -> bool {
        self.expected.contains(&claim)
    }

    pub fn point(&self, coords: [f64; DIM]) -> ChartPoint<T> {
        self.chart.point(coords.map(T::lit))
    }
}

/// Name, summary and default parameters of a built-in.
pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [(&'static str, f64)],
}

pub const BUILTINS: &[Builtin] = &[
    Builtin { name: "flat", summary: "flat R^4 with the standard complex structure", params: &[] },
    Builtin {
        name: "taub-nut",
        summary: "self-dual Taub-NUT in (rho, theta, phi, psi) with three Kahler structures",
        params: &[("m", TAUB_NUT_DEFAULT_M)],
    },
    Builtin { name: "taub-nut-r3", summary: "Taub-NUT as V dx^2 + V^-1 (dt + Theta)^2 over R^3, m = 1/2", params: &[] },
    Builtin {
        name: "kerr-lorentzian",
        summary: "Kerr in Boyer-Lindquist coordinates, Lorentzian signature",
        params: &[("M", 1.0), ("alpha", 0.5)],
    },
    Builtin {
        name: "kerr",
        summary: "Euclidean (Wick-rotated) Kerr with its frame complex structure",
        params: &[("M", 1.0), ("alpha", 0.5)],
    },
    Builtin {
        name: "kerr-conformal",
        summary: "Euclidean Kerr rescaled by 1/(r - alpha cos theta)^2",
        params: &[("M", 1.0), ("alpha", 0.5)],
    },
];

pub fn find_builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

/// Defaults merged with overrides; unknown keys are rejected.
pub fn resolve_params(builtin: &Builtin, overrides: &BTreeMap<String, f64>) -> Result<Vec<Param>> {
    for key in overrides.keys() {
        if !builtin.params.iter().any(|(n, _)| n == key) {
            let known: Vec<&str> = builtin.params.iter().map(|(n, _)| *n).collect();
            return Err(GeometryError::Parameter(format!(
                "`{}` has no parameter `{key}` (parameters: {})",
                builtin.name,
                if known.is_empty() { "none".to_string() } else { known.join(", ") }
            )));
        }
    }
    Ok(builtin
        .params
        .iter()
        .map(|(n, d)| Param { name: n.to_string(), value: overrides.get(*n).copied().unwrap_or(*d) })
        .collect())
}

/// Builds a built-in by name.
pub fn builtin<T: Scalar>(name: &str, overrides: &BTreeMap<String, f64>) -> Result<GeometryEntry<T>> {
    let b = find_builtin(name).ok_or_else(|| {
        let names: Vec<&str> = BUILTINS.iter().map(|b| b.name).collect();
        GeometryError::Parameter(format!("unknown geometry `{name}` (known: {})", names.join(", ")))
    })?;
    let params = resolve_params(b, overrides)?;
    let get = |k: &str| params.iter().find(|p| p.name == k).map(|p| p.value).expect("declared");
    match name {
        "flat" => Ok(flat()),
        "taub-nut" => taub_nut(get("m")),
        "taub-nut-r3" => Ok(taub_nut_r3_form()),
        "kerr-lorentzian" => kerr_lorentzian(get("M"), get("alpha")),
        "kerr" => kerr_euclidean(get("M"), get("alpha")),
        "kerr-conformal" => kerr_conformal(get("M"), get("alpha")),
        _ => unreachable!("registered above"),
    }
}

/// Flat `R^4` with `J e1 = e2`, `J e3 = e4`.
pub fn flat<T: Scalar>() -> GeometryEntry<T> {
    let chart = Arc::new(Chart::new("flat", ["x1", "x2", "x3", "x4"]));
    let metric = euclidean(chart.clone()).renamed("flat");
    let frame = FrameField::new("dx", chart.clone(), |_| Ok(identity4()));
    let j = AlmostComplexField::from_frame_map("J", &frame, [(1, 1), (0, -1), (3, 1), (2, -1)]);
    let omega = frame.two_form("omega", &[(0, 1, 1), (2, 3, 1)]);
    GeometryEntry {
        name: "flat".into(),
        description: BUILTINS[0].summary.into(),
        params: Vec::new(),
        chart,
        metric,
        frames: vec![frame],
        forms: vec![omega],
        acs: vec![j],
        probes: Vec::new(),
        scalars: Vec::new(),
        sigma: None,
        isometry: None,
        expected: vec![Claim::RicciFlat, Claim::Kahler],
        region: Region::new([(-2.0, 2.0); DIM]),
    }
}
