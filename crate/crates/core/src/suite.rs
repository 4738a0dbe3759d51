//! Check suites over a seeded sample set and the reports they produce.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Claim, GeometryEntry};
use crate::chart::ChartPoint;
use crate::complex::{
    hermitian_residual, kahler_form_field, nijenhuis_residual, quaternion_check, tensoriality_residual,
    AlmostComplexField, QUATERNION_CONVENTION,
};
use crate::curvature::{curvature, RIEMANN_CONVENTION};
use crate::error::Result;
use crate::forms::structure_equation_check;
use crate::jets::DIM;
use crate::lck::{
    analyze_lee_form, closedness_residual, factor_match_values, Exactness, LckClass, LeeTolerances, EINSTEIN_TOL,
    FIT_POINTS,
};
use crate::metric::{signature_guard, GuardOutcome};
use crate::sampling::sample_points;
use crate::scalar::Scalar;
use crate::verdict::{sample_max, Observation, Verdict};
use crate::weyl::{weyl_plus_at, WEYL_CONVENTION};

pub const REPORT_SCHEMA: &str = "curvlab-report/1";

pub const EPSILON_CONVENTION: &str = "epsilon_123 = +1 (Levi-Civita symbol); frame index 0 is the first coframe leg e1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Curvature,
    Hermitian,
    Kahler,
    HyperKahler,
    Lck,
    Weyl,
    Isometry,
    StructureEqs,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Curvature,
        CheckKind::Hermitian,
        CheckKind::Kahler,
        CheckKind::HyperKahler,
        CheckKind::Lck,
        CheckKind::Weyl,
        CheckKind::Isometry,
        CheckKind::StructureEqs,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Curvature => "curvature",
            CheckKind::Hermitian => "hermitian",
            CheckKind::Kahler => "kahler",
            CheckKind::HyperKahler => "hyper_kahler",
            CheckKind::Lck => "lck",
            CheckKind::Weyl => "weyl",
            CheckKind::Isometry => "isometry",
            CheckKind::StructureEqs => "structure_eqs",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }

    /// The claim this check decides, if any.
    pub fn covers(&self) -> Option<Claim> {
        match self {
            CheckKind::Curvature => Some(Claim::RicciFlat),
            CheckKind::Hermitian => Some(Claim::SignatureRefusal),
            CheckKind::Kahler => Some(Claim::Kahler),
            CheckKind::HyperKahler => Some(Claim::HyperKahler),
            CheckKind::Lck => Some(Claim::Gck),
            CheckKind::Weyl => Some(Claim::WeylDegenerate),
            CheckKind::Isometry | CheckKind::StructureEqs => None,
        }
    }

    pub fn for_claim(claim: Claim) -> Self {
        Self::ALL.into_iter().find(|c| c.covers() == Some(claim)).expect("every claim has a check")
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Comma-separated check names, or `all`. The result is deduplicated and in
/// canonical order.
pub fn parse_checks(list: &str) -> std::result::Result<Vec<CheckKind>, String> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if name == "all" {
            out.extend(CheckKind::ALL);
            continue;
        }
        out.push(CheckKind::parse(name).ok_or_else(|| {
            let known: Vec<&str> = CheckKind::ALL.iter().map(|c| c.as_str()).collect();
            format!("unknown check `{name}` (known: {}, all)", known.join(", "))
        })?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The checks that decide the entry's expected claims; every check when
/// nothing is expected.
pub fn default_checks(expected: &[Claim]) -> Vec<CheckKind> {
    if expected.is_empty() {
        return CheckKind::ALL.to_vec();
    }
    let mut out: Vec<CheckKind> = expected.iter().map(|c| CheckKind::for_claim(*c)).collect();
    out.sort();
    out.dedup();
    out
}

/// `(key, default, meaning)`.
pub const DEFAULT_TOLERANCES: [(&str, f64, &str); 19] = [
    ("ricci", 1e-8, "max|Ric| / max|Riemann|"),
    ("bianchi", 1e-9, "Riemann pair symmetries and first Bianchi identity, relative"),
    ("hermitian", 1e-9, "max|J^T g J - g| / max|g|"),
    ("square", 1e-9, "max|J^2 + Id| / max(1, max|J|^2)"),
    ("nijenhuis", 1e-8, "max|N(d_a, d_b)|_g / max(1, largest bracket term)"),
    ("tensoriality", 1e-8, "|N(fX, hY) - f h N(X, Y)|_g, relative"),
    ("closedness", 1e-8, "max|d omega| / max(1, max|d coefficient|)"),
    ("quaternion", 1e-8, "quaternion relation residuals, relative"),
    ("lck_identity", 1e-8, "max|d omega - xi ^ omega| / max(1, max|d coefficient|)"),
    ("d_xi", 1e-9, "max|d xi| / max(1, max|d xi coefficient|)"),
    ("potential", 1e-8, "max|df - xi| for the recovered potential"),
    ("einstein", 1e-8, "trace-free Ricci / max|Riemann|"),
    ("weyl_pattern", 1e-7, "|pair gap| / max(1, |distinct eigenvalue|) of W+"),
    ("factor_match", 1e-8, "spread of Lee factor / |W+|^(2/3)"),
    ("pullback", 1e-8, "max|f*g - g| / max|g| through the coordinate map"),
    ("round_trip", 1e-12, "max|f^-1(f(p)) - p|"),
    ("theta_hodge", 1e-9, "max|dTheta - *dV| / max(1, max|dV|)"),
    ("structure", 1e-9, "max|d sigma_i - eps_ijk sigma_j ^ sigma_k|"),
    ("not_acs", 0.1, "minimum max|J^2 + Id| (unnormalized) a non-structure must exceed"),
];

/// Tolerances by key; only documented keys exist and every value lies in
/// `(0, 1)`, so no override can switch a check off.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(DEFAULT_TOLERANCES.iter().map(|(k, v, _)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, key: &str) -> f64 {
        *self.0.get(key).unwrap_or_else(|| panic!("undocumented tolerance `{key}`"))
    }

    pub fn set(&mut self, key: &str, value: f64) -> std::result::Result<(), String> {
        if !self.0.contains_key(key) {
            let known: Vec<&str> = DEFAULT_TOLERANCES.iter().map(|(k, _, _)| *k).collect();
            return Err(format!("unknown tolerance `{key}` (known: {})", known.join(", ")));
        }
        if !(value > 0.0 && value < 1.0) {
            return Err(format!("tolerance `{key}` must lie in (0, 1), got {value}"));
        }
        self.0.insert(key.to_string(), value);
        Ok(())
    }

    /// Parses `KEY=VAL`.
    pub fn set_pair(&mut self, pair: &str) -> std::result::Result<(), String> {
        let (k, v) = pair.split_once('=').ok_or_else(|| format!("tolerance `{pair}` is not KEY=VAL"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("tolerance `{pair}`: `{v}` is not a number"))?;
        self.set(k.trim(), v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    /// A check the geometry cannot meaningfully host, e.g. Hermitian checks
    /// on a Lorentzian metric.
    Refused,
    /// Missing ingredients, or a precondition such as `W⁺ ≠ 0` not met.
    Inapplicable,
    /// Evaluation raised an error at a sample.
    Error,
    Nan,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Refused => "REFUSED",
            Status::Inapplicable => "INAPPLICABLE",
            Status::Error => "ERROR",
            Status::Nan => "NAN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check: String,
    /// An expected claim of the geometry, or `extra`.
    pub claim_ref: String,
    pub verdict: Status,
    pub max_residual: Option<f64>,
    pub argmax_point: Option<[f64; DIM]>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub riemann: String,
    pub weyl: String,
    pub epsilon: String,
    pub orientation: String,
    pub signature: String,
}

impl Conventions {
    fn write_text(&self, w: &mut String) {
        let _ = writeln!(w, "conventions:");
        for (k, v) in [
            ("riemann", &self.riemann),
            ("weyl", &self.weyl),
            ("epsilon", &self.epsilon),
            ("orientation", &self.orientation),
            ("signature", &self.signature),
        ] {
            let _ = writeln!(w, "  {k}: {v}");
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub refused: usize,
    pub inapplicable: usize,
    pub error: usize,
    pub nan: usize,
}

impl Summary {
    fn of(records: &[Record]) -> Self {
        let mut s = Self::default();
        for r in records {
            *match r.verdict {
                Status::Pass => &mut s.pass,
                Status::Fail => &mut s.fail,
                Status::Refused => &mut s.refused,
                Status::Inapplicable => &mut s.inapplicable,
                Status::Error => &mut s.error,
                Status::Nan => &mut s.nan,
            } += 1;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub geometry: String,
    pub params: BTreeMap<String, f64>,
    pub conventions: Conventions,
    pub seed: u64,
    pub samples: usize,
    pub records: Vec<Record>,
    pub summary: Summary,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

impl Report {
    /// 3 if any record is NaN or errored, else 1 if any failed, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.summary.nan > 0 || self.summary.error > 0 {
            EXIT_NUMERIC
        } else if self.summary.fail > 0 {
            EXIT_FAIL
        } else {
            EXIT_PASS
        }
    }

    pub fn record(&self, check: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.check == check)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "curvlab report ({})", self.schema);
        let _ = writeln!(w, "geometry: {}", self.geometry);
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(w, "params: {}", if params.is_empty() { "none".into() } else { params.join(" ") });
        let _ = writeln!(w, "seed: {}", self.seed);
        let _ = writeln!(w, "samples: {}", self.samples);
        self.conventions.write_text(w);
        let _ = writeln!(w, "records:");
        for r in &self.records {
            let _ = write!(w, "  {:<12} {} [{}]", r.verdict.to_string(), r.check, r.claim_ref);
            if let Some(m) = r.max_residual {
                let _ = write!(w, " max={m:e} tol={:e}", r.tolerance);
            }
            if let Some(p) = r.argmax_point {
                let _ = write!(w, " at=({:.6}, {:.6}, {:.6}, {:.6})", p[0], p[1], p[2], p[3]);
            }
            let _ = writeln!(w);
            if let Some(d) = &r.detail {
                let _ = writeln!(w, "      {d}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            w,
            "summary: {} pass, {} fail, {} refused, {} inapplicable, {} error, {} nan",
            s.pass, s.fail, s.refused, s.inapplicable, s.error, s.nan
        );
        out
    }
}

/// What to run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` runs [`default_checks`].
    pub checks: Option<Vec<CheckKind>>,
    pub samples: usize,
    pub seed: u64,
    /// `(coordinate, lo, hi)` replacing the entry's default interval.
    pub region: Vec<(String, f64, f64)>,
    pub tolerances: Tolerances,
    /// Worker threads; results do not depend on it.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            checks: None,
            samples: 1000,
            seed: 42,
            region: Vec::new(),
            tolerances: Tolerances::default(),
            jobs: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
}

pub fn conventions<T: Scalar>(entry: &GeometryEntry<T>) -> Conventions {
    Conventions {
        riemann: RIEMANN_CONVENTION.to_string(),
        weyl: WEYL_CONVENTION.to_string(),
        epsilon: EPSILON_CONVENTION.to_string(),
        orientation: entry.metric.orientation().describe(),
        signature: entry.metric.signature().to_string(),
    }
}

/// Runs the configured checks over the entry's seeded sample set.
pub fn run<T: Scalar>(entry: &GeometryEntry<T>, cfg: &RunConfig) -> std::result::Result<Report, RunError> {
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| RunError::Config(format!("cannot start {n} workers: {e}")))?
            .install(|| run_inner(entry, cfg)),
        None => run_inner(entry, cfg),
    }
}

fn run_inner<T: Scalar>(entry: &GeometryEntry<T>, cfg: &RunConfig) -> std::result::Result<Report, RunError> {
    let mut region = entry.region.clone();
    for (key, lo, hi) in &cfg.region {
        region = region
            .with_interval(entry.chart.coordinates(), key, *lo, *hi)
            .map_err(|e| RunError::Config(e.to_string()))?;
    }
    // sample sets are prefix-stable, so the potential fit reuses the first
    // points and only draws extra ones for small runs
    let drawn = sample_points(&entry.chart, &region, cfg.seed, cfg.samples.max(FIT_POINTS))
        .map_err(|e| RunError::Config(e.to_string()))?;
    let checks = cfg.checks.clone().unwrap_or_else(|| default_checks(&entry.expected));
    let ctx = Ctx { entry, points: &drawn[..cfg.samples], fit: &drawn[..FIT_POINTS], tol: &cfg.tolerances };
    let mut records = Vec::new();
    for check in checks {
        records.extend(match check {
            CheckKind::Curvature => ctx.curvature(),
            CheckKind::Hermitian => ctx.hermitian(),
            CheckKind::Kahler => ctx.kahler(),
            CheckKind::HyperKahler => ctx.hyper_kahler(),
            CheckKind::Lck => ctx.lck(),
            CheckKind::Weyl => ctx.weyl(),
            CheckKind::Isometry => ctx.isometry(),
            CheckKind::StructureEqs => ctx.structure_eqs(),
        });
    }
    Ok(Report {
        schema: REPORT_SCHEMA.to_string(),
        geometry: entry.name.clone(),
        params: entry.params.iter().map(|p| (p.name.clone(), p.value)).collect(),
        conventions: conventions(entry),
        seed: cfg.seed,
        samples: cfg.samples,
        summary: Summary::of(&records),
        records,
    })
}

struct Ctx<'a, T: Scalar> {
    entry: &'a GeometryEntry<T>,
    points: &'a [ChartPoint<T>],
    fit: &'a [ChartPoint<T>],
    tol: &'a Tolerances,
}

fn bare(check: String, claim_ref: String, verdict: Status, tolerance: f64, detail: impl Into<String>) -> Record {
    Record { check, claim_ref, verdict, max_residual: None, argmax_point: None, tolerance, detail: Some(detail.into()) }
}

fn from_verdict(check: String, claim_ref: String, v: Verdict, detail: Option<String>) -> Record {
    let verdict = if v.is_nan() {
        Status::Nan
    } else if v.passed {
        Status::Pass
    } else {
        Status::Fail
    };
    Record {
        check,
        claim_ref,
        verdict,
        max_residual: (!v.is_nan()).then_some(v.max_residual),
        argmax_point: v.argmax_point,
        tolerance: v.tolerance,
        detail,
    }
}

fn class_name(c: LckClass) -> &'static str {
    match c {
        LckClass::Kahler => "kahler",
        LckClass::GloballyConformallyKahler => "globally_conformally_kahler",
        LckClass::LocallyConformallyKahler => "locally_conformally_kahler",
        LckClass::NotLck => "not_lck",
    }
}

impl<'a, T: Scalar> Ctx<'a, T> {
    fn claim(&self, c: Option<Claim>) -> String {
        match c {
            Some(c) if self.entry.expects(c) => c.as_str().to_string(),
            _ => "extra".to_string(),
        }
    }

    fn error(&self, check: String, claim: Option<Claim>, tolerance: f64, e: impl fmt::Display) -> Record {
        bare(check, self.claim(claim), Status::Error, tolerance, e.to_string())
    }

    fn inapplicable(&self, check: &str, claim: Option<Claim>, why: &str) -> Record {
        bare(check.to_string(), self.claim(claim), Status::Inapplicable, 0.0, why)
    }

    fn below(
        &self,
        check: String,
        claim: Option<Claim>,
        key: &str,
        f: impl Fn(&ChartPoint<T>) -> Result<T> + Sync,
    ) -> Record {
        let tol = self.tol.get(key);
        match sample_max(self.points, f) {
            Ok(w) => from_verdict(check, self.claim(claim), Verdict::below(w, tol), None),
            Err(e) => self.error(check, claim, tol, e),
        }
    }

    fn refusal(&self, check: &str) -> Option<Record> {
        match signature_guard(&self.entry.metric) {
            GuardOutcome::Pass => None,
            GuardOutcome::Refused { reason } => Some(bare(
                format!("{check}/signature_guard"),
                self.claim(Some(Claim::SignatureRefusal)),
                Status::Refused,
                0.0,
                reason,
            )),
        }
    }

    fn curvature(&self) -> Vec<Record> {
        let m = &self.entry.metric;
        vec![
            self.below("curvature/ricci".into(), Some(Claim::RicciFlat), "ricci", |p| {
                Ok(curvature(m, p)?.ricci_residual())
            }),
            self.below("curvature/bianchi".into(), None, "bianchi", |p| {
                let b = curvature(m, p)?;
                Ok(b.symmetry_residual().max(b.bianchi_residual()))
            }),
        ]
    }

    fn hermitian(&self) -> Vec<Record> {
        if let Some(r) = self.refusal("hermitian") {
            return vec![r];
        }
        if self.entry.acs.is_empty() {
            return vec![self.inapplicable("hermitian", None, "no almost complex structure declared")];
        }
        let m = &self.entry.metric;
        self.entry
            .acs
            .iter()
            .map(|j| self.below(format!("hermitian/{}", j.label()), None, "hermitian", |p| hermitian_residual(m, j, p)))
            .collect()
    }

    /// J² = −Id, compatibility, integrability and dω = 0 for one structure.
    fn kahler_records(&self, prefix: &str, j: &AlmostComplexField<T>, claim: Claim) -> Vec<Record> {
        let m = &self.entry.metric;
        let omega = kahler_form_field(m, j);
        let name = |part: &str| format!("{prefix}/{}/{part}", j.label());
        let c = Some(claim);
        vec![
            self.below(name("square"), c, "square", |p| j.square_residual(p)),
            self.below(name("hermitian"), c, "hermitian", |p| hermitian_residual(m, j, p)),
            self.below(name("nijenhuis"), c, "nijenhuis", |p| nijenhuis_residual(m, j, p)),
            self.below(name("tensoriality"), c, "tensoriality", |p| tensoriality_residual(m, j, p)),
            self.below(name("d_omega"), c, "closedness", |p| closedness_residual(&omega, p)),
        ]
    }

    fn kahler(&self) -> Vec<Record> {
        if let Some(r) = self.refusal("kahler") {
            return vec![r];
        }
        if self.entry.acs.is_empty() {
            return vec![self.inapplicable("kahler", Some(Claim::Kahler), "no almost complex structure declared")];
        }
        let mut out: Vec<Record> =
            self.entry.acs.iter().flat_map(|j| self.kahler_records("kahler", j, Claim::Kahler)).collect();
        for q in &self.entry.probes {
            let check = format!("kahler/{}/not_acs", q.label());
            let tol = self.tol.get("not_acs");
            let least = sample_max(self.points, |p| Ok(-q.square_defect(p)?))
                .map(|w| w.map(|o| Observation { residual: -o.residual, ..o }));
            out.push(match least {
                Ok(w) => from_verdict(
                    check,
                    self.claim(None),
                    Verdict::above(w, tol),
                    Some(format!("{} must fail J^2 = -Id by more than the tolerance", q.label())),
                ),
                Err(e) => self.error(check, None, tol, e),
            });
        }
        out
    }

    fn hyper_kahler(&self) -> Vec<Record> {
        if let Some(r) = self.refusal("hyper_kahler") {
            return vec![r];
        }
        let acs = &self.entry.acs;
        if acs.len() < 3 {
            return vec![self.inapplicable(
                "hyper_kahler",
                Some(Claim::HyperKahler),
                "fewer than three almost complex structures declared",
            )];
        }
        let mut out: Vec<Record> =
            acs[..3].iter().flat_map(|j| self.kahler_records("hyper_kahler", j, Claim::HyperKahler)).collect();
        let tol = self.tol.get("quaternion");
        let claim = Some(Claim::HyperKahler);
        match quaternion_check([&acs[0], &acs[1], &acs[2]], self.points, tol) {
            Ok(rel) => out.extend(rel.into_iter().enumerate().map(|(k, (name, v))| {
                let detail = (k == 0).then(|| QUATERNION_CONVENTION.to_string());
                from_verdict(format!("hyper_kahler/quaternion/{name}"), self.claim(claim), v, detail)
            })),
            Err(e) => out.push(self.error("hyper_kahler/quaternion".into(), claim, tol, e)),
        }
        out
    }

    fn lck(&self) -> Vec<Record> {
        if let Some(r) = self.refusal("lck") {
            return vec![r];
        }
        let claim = Some(Claim::Gck);
        let Some(j) = self.entry.acs.first() else {
            return vec![self.inapplicable("lck", claim, "no almost complex structure declared")];
        };
        let tol = LeeTolerances {
            closedness: self.tol.get("closedness"),
            identity: self.tol.get("lck_identity"),
            d_xi: self.tol.get("d_xi"),
        };
        let name = |part: &str| format!("lck/{}/{part}", j.label());
        let r = match analyze_lee_form(&self.entry.metric, j, self.fit, self.points, tol) {
            Ok(r) => r,
            Err(e) => return vec![self.error(name("lee_form"), claim, tol.identity, e)],
        };
        let class = class_name(r.classification);
        let pt = self.tol.get("potential");
        let potential = match &r.exactness {
            Exactness::Exact(f) => Record {
                check: name("potential"),
                claim_ref: self.claim(claim),
                verdict: if f.max_error < pt { Status::Pass } else { Status::Fail },
                max_residual: Some(f.max_error),
                argmax_point: None,
                tolerance: pt,
                detail: Some(format!("classification {class}; f = {}", f.describe())),
            },
            Exactness::Undetermined => bare(
                name("potential"),
                self.claim(claim),
                Status::Fail,
                pt,
                if r.d_xi.passed {
                    format!("classification {class}; closed Lee form, exactness undetermined on this chart")
                } else {
                    format!("classification {class}; Lee form is not closed")
                },
            ),
        };
        vec![
            from_verdict(name("identity"), self.claim(claim), r.identity, None),
            from_verdict(name("d_xi"), self.claim(claim), r.d_xi, None),
            potential,
        ]
    }

    fn weyl(&self) -> Vec<Record> {
        if let Some(r) = self.refusal("weyl") {
            return vec![r];
        }
        let claim = Some(Claim::WeylDegenerate);
        let Some(frame) = self.entry.frame() else {
            return vec![self.inapplicable("weyl", claim, "no orthonormal frame declared")];
        };
        let m = &self.entry.metric;
        let mut out =
            vec![self.below("weyl/einstein".into(), claim, "einstein", |p| Ok(curvature(m, p)?.tracefree_residual()))];

        let tol = self.tol.get("weyl_pattern");
        let ft = self.tol.get("factor_match");
        let samples: Result<Vec<_>> = self
            .points
            .par_iter()
            .map(|p| {
                let w = weyl_plus_at(m, p, frame)?;
                let einstein = w.curvature.tracefree_residual().as_f64() < EINSTEIN_TOL;
                Ok((w.spectrum.vanishes, w.spectrum.degeneracy_residual.as_f64(), einstein, w.norm2().cbrt().as_f64()))
            })
            .collect();
        let samples = match samples {
            Ok(s) => s,
            Err(e) => {
                out.push(self.error("weyl/pattern".into(), claim, tol, e));
                return out;
            }
        };
        let vanishing = samples.iter().filter(|s| s.0).count();
        if !samples.is_empty() && vanishing == samples.len() {
            let why = "W+ vanishes at every sample; the degenerate-spectrum criterion is inapplicable";
            out.push(self.inapplicable("weyl/pattern", claim, why));
            out.push(self.inapplicable("weyl/factor_match", claim, why));
            return out;
        }
        let worst = crate::verdict::worst(samples.iter().zip(self.points).enumerate().map(|(index, (s, p))| {
            Observation { residual: if s.0 { 0.0 } else { s.1 }, index, point: p.coords_f64() }
        }));
        let detail = (vanishing > 0).then(|| format!("W+ vanishes at {vanishing} of {} samples", samples.len()));
        out.push(from_verdict("weyl/pattern".into(), self.claim(claim), Verdict::below(worst, tol), detail));

        let Some(lee) = self.entry.scalar("lee_factor") else {
            out.push(self.inapplicable("weyl/factor_match", claim, "no Lee factor declared"));
            return out;
        };
        if vanishing > 0 {
            out.push(self.inapplicable("weyl/factor_match", claim, "W+ vanishes at some samples"));
            return out;
        }
        if let Some(i) = samples.iter().position(|s| !s.2) {
            let why = format!("not Einstein at {:?}", self.points[i].coords_f64());
            out.push(self.inapplicable("weyl/factor_match", claim, &why));
            return out;
        }
        let lee_values: Result<Vec<f64>> = self.points.par_iter().map(|p| Ok(lee.at(p)?.value().as_f64())).collect();
        let fm = lee_values.and_then(|l| {
            let pairs: Vec<(f64, f64)> = l.into_iter().zip(samples.iter().map(|s| s.3)).collect();
            factor_match_values(&pairs, self.points, ft)
        });
        out.push(match fm {
            Ok(fm) => from_verdict(
                "weyl/factor_match".into(),
                self.claim(claim),
                fm.verdict,
                Some(format!("constant {:e}, relative spread {:e}", fm.constant, fm.relative_spread)),
            ),
            Err(e) => self.error("weyl/factor_match".into(), claim, ft, e),
        });
        out
    }

    fn isometry(&self) -> Vec<Record> {
        let Some(iso) = &self.entry.isometry else {
            return vec![self.inapplicable("isometry", None, "no coordinate map declared")];
        };
        let m = &self.entry.metric;
        let mut out = vec![
            self.below("isometry/pullback".into(), None, "pullback", |p| iso.pullback_residual(m, p)),
            self.below("isometry/round_trip".into(), None, "round_trip", |p| iso.round_trip_residual(p)),
        ];
        if let (Some(theta), Some(v)) = (self.entry.form("Theta"), self.entry.scalar("V")) {
            out.push(self.below("isometry/theta_hodge".into(), None, "theta_hodge", |p| {
                crate::catalog::theta_hodge_residual(theta, v, p)
            }));
        }
        out
    }

    fn structure_eqs(&self) -> Vec<Record> {
        let Some(sigma) = &self.entry.sigma else {
            return vec![self.inapplicable("structure_eqs", None, "no invariant 1-forms declared")];
        };
        let mut as_stated = self.below("structure_eqs/as_stated".into(), None, "structure", |p| {
            Ok(structure_equation_check(sigma, p)?.residual)
        });
        as_stated.detail = Some("d sigma_i = eps_ijk sigma_j ^ sigma_k".into());
        let mut opposite = self.below("structure_eqs/opposite_sign".into(), None, "structure", |p| {
            Ok(structure_equation_check(sigma, p)?.opposite_sign_residual)
        });
        opposite.detail = Some("d sigma_i = -eps_ijk sigma_j ^ sigma_k".into());
        vec![as_stated, opposite]
    }
}

/// Static summary of an entry: what it declares and what would be checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Description {
    pub name: String,
    pub description: String,
    pub params: BTreeMap<String, f64>,
    pub coordinates: [String; DIM],
    pub region: BTreeMap<String, [f64; 2]>,
    pub conventions: Conventions,
    pub frames: Vec<String>,
    pub structures: Vec<String>,
    pub probes: Vec<String>,
    pub forms: Vec<String>,
    pub scalars: Vec<String>,
    pub invariant_forms: bool,
    pub isometry: bool,
    pub expected: Vec<Claim>,
    pub default_checks: Vec<CheckKind>,
}

pub fn describe<T: Scalar>(entry: &GeometryEntry<T>) -> Description {
    let coordinates = entry.chart.coordinates().clone();
    Description {
        name: entry.name.clone(),
        description: entry.description.clone(),
        params: entry.params.iter().map(|p| (p.name.clone(), p.value)).collect(),
        region: coordinates.iter().cloned().zip(entry.region.bounds.map(|(a, b)| [a, b])).collect(),
        coordinates,
        conventions: conventions(entry),
        frames: entry.frames.iter().map(|f| f.label().to_string()).collect(),
        structures: entry.acs.iter().map(|j| j.label().to_string()).collect(),
        probes: entry.probes.iter().map(|j| j.label().to_string()).collect(),
        forms: entry.forms.iter().map(|f| format!("{} ({}-form)", f.label(), f.degree())).collect(),
        scalars: entry.scalars.iter().map(|(n, _)| n.clone()).collect(),
        invariant_forms: entry.sigma.is_some(),
        isometry: entry.isometry.is_some(),
        expected: entry.expected.clone(),
        default_checks: default_checks(&entry.expected),
    }
}

impl Description {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("description serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let list = |v: &[String]| if v.is_empty() { "none".to_string() } else { v.join(", ") };
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "{}: {}", self.name, self.description);
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(w, "params: {}", list(&params));
        let _ = writeln!(w, "coordinates: {}", self.coordinates.join(", "));
        let region: Vec<String> =
            self.coordinates.iter().map(|c| format!("{c}={}:{}", self.region[c][0], self.region[c][1])).collect();
        let _ = writeln!(w, "region: {}", region.join(" "));
        let _ = writeln!(w, "frames: {}", list(&self.frames));
        let _ = writeln!(w, "structures: {}", list(&self.structures));
        if !self.probes.is_empty() {
            let _ = writeln!(w, "probes: {}", list(&self.probes));
        }
        let _ = writeln!(w, "forms: {}", list(&self.forms));
        let _ = writeln!(w, "scalars: {}", list(&self.scalars));
        if self.invariant_forms {
            let _ = writeln!(w, "invariant 1-forms: sigma_1, sigma_2, sigma_3");
        }
        if self.isometry {
            let _ = writeln!(w, "coordinate map: yes");
        }
        let expected: Vec<String> = self.expected.iter().map(|c| c.as_str().to_string()).collect();
        let _ = writeln!(w, "expected: {}", list(&expected));
        let checks: Vec<String> = self.default_checks.iter().map(|c| c.as_str().to_string()).collect();
        let _ = writeln!(w, "default checks: {}", list(&checks));
        self.conventions.write_text(w);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    fn quick(name: &str, checks: Option<Vec<CheckKind>>) -> Report {
        let e: GeometryEntry<f64> = builtin(name, &BTreeMap::new()).unwrap();
        let cfg = RunConfig { checks, samples: 24, ..RunConfig::default() };
        run(&e, &cfg).unwrap()
    }

    #[test]
    fn check_lists_parse() {
        assert_eq!(parse_checks("kahler, curvature,kahler").unwrap(), vec![CheckKind::Curvature, CheckKind::Kahler]);
        assert_eq!(parse_checks("all").unwrap().len(), 8);
        assert!(parse_checks("kähler").is_err());
        assert_eq!(parse_checks("").unwrap(), vec![]);
    }

    #[test]
    fn every_claim_is_covered() {
        for c in Claim::ALL {
            assert_eq!(CheckKind::for_claim(c).covers(), Some(c));
        }
    }

    #[test]
    fn tolerance_overrides_are_bounded() {
        let mut t = Tolerances::default();
        assert!(t.set_pair("ricci=1e-6").is_ok());
        assert_eq!(t.get("ricci"), 1e-6);
        assert!(t.set_pair("ricci=0").is_err());
        assert!(t.set_pair("ricci=1").is_err());
        assert!(t.set_pair("ricci=inf").is_err());
        assert!(t.set_pair("nope=0.1").is_err());
        assert!(t.set_pair("ricci").is_err());
    }

    #[test]
    fn flat_defaults_pass_and_round_trip() {
        let r = quick("flat", None);
        assert_eq!(r.exit_code(), EXIT_PASS, "{}", r.to_text());
        let checks: Vec<&str> = r.records.iter().map(|x| x.check.as_str()).collect();
        assert!(checks.contains(&"curvature/ricci") && checks.contains(&"kahler/J/d_omega"), "{checks:?}");
        assert!(r.records.iter().all(|x| x.verdict == Status::Pass));
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn empty_check_list_gives_empty_valid_report() {
        let r = quick("flat", Some(vec![]));
        assert!(r.records.is_empty());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], REPORT_SCHEMA);
        assert_eq!(r.exit_code(), EXIT_PASS);
    }

    #[test]
    fn lorentzian_kerr_is_refused() {
        let r = quick("kerr-lorentzian", Some(vec![CheckKind::Hermitian, CheckKind::Kahler]));
        assert!(r.records.iter().all(|x| x.verdict == Status::Refused));
        assert_eq!(r.records[0].claim_ref, "signature_refusal");
        assert_eq!(r.exit_code(), EXIT_PASS);
    }

    #[test]
    fn bad_region_is_a_config_error() {
        let e: GeometryEntry<f64> = builtin("flat", &BTreeMap::new()).unwrap();
        let cfg = RunConfig { region: vec![("q".into(), 0.0, 1.0)], ..RunConfig::default() };
        assert!(run(&e, &cfg).is_err());
    }
}
