//! Scenario files: JSON with an explicit `version`, complex numbers as `[re, im]` and matrices
//! as row-major nested arrays.

use std::fs;
use std::path::{Path, PathBuf};

use bsd_kuramoto_core::cxmat::CMat;
use bsd_kuramoto_core::domains::{
    contains_interior, on_bs_boundary, sample_bs_boundary_with, sample_interior_with, structure_check, DomainKind,
    DomainSpec,
};
use bsd_kuramoto_core::dynamics::{IntegrationConfig, Method, Tolerances};
use bsd_kuramoto_core::flows::{scalar_drift, EnsembleState, ModelSpec};
use bsd_kuramoto_core::groups::{GeneratorSpec, GroupSpec};
use bsd_kuramoto_core::sampling::rng_from_seed;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCENARIO_VERSION: u32 = 1;

/// Row-major complex matrix, entries as `[re, im]`.
pub type Matrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub model: ModelSection,
    #[serde(rename = "N")]
    pub n: usize,
    pub init: InitSection,
    pub integration: IntegrationSection,
    #[serde(default, skip_serializing_if = "Outputs::is_empty")]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<ChecksSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub domain: DomainSection,
    #[serde(default)]
    pub family_index: usize,
    pub coupling: f64,
    #[serde(default, skip_serializing_if = "DriftSection::is_zero")]
    pub drift: DriftSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    /// `"I"`, `"II"` or `"III"`.
    pub kind: String,
    /// Row count; only for type I (types II and III are square).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub n: usize,
}

/// Natural-frequency part. Either `omega` (scalar models only) or the blocks `a`, `d`;
/// omitted means no drift.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Matrix>,
}

impl DriftSection {
    fn is_zero(&self) -> bool {
        self.omega.is_none() && self.a.is_none() && self.d.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSection {
    SampleBs { seed: u64 },
    SampleInterior { seed: u64 },
    Explicit(Vec<Matrix>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Rk4,
    Rk45,
}

fn default_method() -> MethodName {
    MethodName::Rk4
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_method")]
    pub method: MethodName,
    #[serde(default = "one")]
    pub retract_every: usize,
    #[serde(default = "one")]
    pub monitor_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesSection>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membership: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
}

/// Output paths, relative to the scenario file's directory. Without `csv` the series goes to
/// standard output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<String>,
}

impl Outputs {
    fn is_empty(&self) -> bool {
        self.csv.is_none() && self.snapshots.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    /// Overrides the per-check default tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Number of random group elements for the rank check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transports: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated scenario with everything the commands need.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scenario: Scenario,
    pub model: ModelSpec,
    pub init: EnsembleState,
    pub config: IntegrationConfig,
    pub base_dir: PathBuf,
    pub boundary_run: bool,
}

impl Prepared {
    pub fn resolve(&self, rel: &str) -> PathBuf {
        self.base_dir.join(rel)
    }

    pub fn member(&self) -> DomainSpec {
        self.model.member()
    }
}

fn bad(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        message: message.into(),
    }
}

pub fn parse_kind(s: &str) -> Option<DomainKind> {
    match s.trim().to_ascii_uppercase().as_str() {
        "I" | "1" => Some(DomainKind::TypeI),
        "II" | "2" => Some(DomainKind::TypeII),
        "III" | "3" => Some(DomainKind::TypeIII),
        _ => None,
    }
}

pub fn matrix_to_cmat(field: &str, m: &Matrix, rows: usize, cols: usize) -> Result<CMat, CliError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        let got_cols = m.first().map_or(0, |r| r.len());
        return Err(bad(
            field,
            format!("expected a {rows}x{cols} matrix, got {} rows of length {got_cols}", m.len()),
        ));
    }
    let data: Vec<Complex64> = m.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    if data.iter().any(|z| !z.is_finite()) {
        return Err(bad(field, "entries must be finite"));
    }
    Ok(CMat::from_vec(rows, cols, data))
}

pub fn cmat_to_matrix(z: &CMat) -> Matrix {
    (0..z.rows())
        .map(|i| (0..z.cols()).map(|j| [z[(i, j)].re, z[(i, j)].im]).collect())
        .collect()
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| bad(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn domain(&self) -> Result<DomainSpec, CliError> {
        let d = &self.model.domain;
        let kind = parse_kind(&d.kind)
            .ok_or_else(|| bad("model.domain.kind", format!("unknown domain type {:?}; use I, II or III", d.kind)))?;
        match kind {
            DomainKind::TypeI => {
                let m = d.m.ok_or_else(|| bad("model.domain.m", "required for a type I domain"))?;
                if d.n == 0 {
                    return Err(bad("model.domain.n", "must be at least 1"));
                }
                if m < d.n {
                    return Err(bad(
                        "model.domain.m",
                        format!("m = {m} must be at least n = {} for a type I domain", d.n),
                    ));
                }
                Ok(DomainSpec::type_i(m, d.n).expect("checked"))
            }
            DomainKind::TypeII | DomainKind::TypeIII => {
                if let Some(m) = d.m {
                    if m != d.n {
                        return Err(bad("model.domain.m", format!("type {} domains are square; m = {m} differs from n = {}", kind.roman(), d.n)));
                    }
                }
                if kind == DomainKind::TypeII && d.n < 2 {
                    return Err(bad("model.domain.n", "must be at least 2 for a type II domain"));
                }
                if d.n == 0 {
                    return Err(bad("model.domain.n", "must be at least 1"));
                }
                Ok(DomainSpec::new(kind, d.n, d.n).expect("checked"))
            }
        }
    }

    fn drift(&self, member: &DomainSpec) -> Result<GeneratorSpec, CliError> {
        let dr = &self.model.drift;
        let group = GroupSpec::for_domain(member);
        if let Some(omega) = dr.omega {
            if dr.a.is_some() || dr.d.is_some() {
                return Err(bad("model.drift.omega", "give either omega or the blocks a, d"));
            }
            if member.kind() != DomainKind::TypeI || member.m() != 1 || member.n() != 1 {
                return Err(bad("model.drift.omega", format!("only scalar models take omega; the member domain is {member}")));
            }
            if !omega.is_finite() {
                return Err(bad("model.drift.omega", "must be finite"));
            }
            return Ok(scalar_drift(omega));
        }
        let a = match &dr.a {
            Some(a) => matrix_to_cmat("model.drift.a", a, member.m(), member.m())?,
            None => CMat::zeros(member.m(), member.m()),
        };
        let d = match &dr.d {
            Some(d) => Some(matrix_to_cmat("model.drift.d", d, member.n(), member.n())?),
            None => None,
        };
        GeneratorSpec::drift(group, a, d).map_err(|e| bad("model.drift", e.to_string()))
    }

    fn integration(&self) -> Result<IntegrationConfig, CliError> {
        let s = &self.integration;
        if !(s.dt.is_finite() && s.dt > 0.0) {
            return Err(bad("integration.dt", "must be positive"));
        }
        if !(s.t_end.is_finite() && s.t_end > 0.0) {
            return Err(bad("integration.t_end", "must be positive"));
        }
        let mut tol = Tolerances::default();
        if let Some(t) = &s.tolerances {
            let fields = [
                ("boundary", t.boundary, &mut tol.boundary),
                ("rank", t.rank, &mut tol.rank),
                ("numeric", t.numeric, &mut tol.numeric),
                ("membership", t.membership, &mut tol.membership),
                ("rtol", t.rtol, &mut tol.rtol),
                ("atol", t.atol, &mut tol.atol),
            ];
            for (name, value, slot) in fields {
                if let Some(v) = value {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(bad(format!("integration.tolerances.{name}"), "must be positive"));
                    }
                    *slot = v;
                }
            }
        }
        Ok(IntegrationConfig {
            dt: s.dt,
            t_end: s.t_end,
            method: match s.method {
                MethodName::Rk4 => Method::Rk4,
                MethodName::Rk45 => Method::Rk45Adaptive,
            },
            retract_every: s.retract_every,
            monitor_every: s.monitor_every,
            tolerances: tol,
        })
    }

    fn initial_state(&self, member: &DomainSpec, tol: f64) -> Result<(EnsembleState, bool), CliError> {
        if self.n == 0 {
            return Err(bad("N", "must be at least 1"));
        }
        let zs: Vec<CMat> = match &self.init {
            InitSection::SampleBs { seed } => {
                let mut rng = rng_from_seed(*seed);
                (0..self.n).map(|_| sample_bs_boundary_with(member, &mut rng)).collect()
            }
            InitSection::SampleInterior { seed } => {
                let mut rng = rng_from_seed(*seed);
                (0..self.n).map(|_| sample_interior_with(member, &mut rng)).collect()
            }
            InitSection::Explicit(list) => {
                if list.len() != self.n {
                    return Err(bad("init.explicit", format!("{} matrices given but N = {}", list.len(), self.n)));
                }
                list.iter()
                    .enumerate()
                    .map(|(k, m)| matrix_to_cmat(&format!("init.explicit[{k}]"), m, member.m(), member.n()))
                    .collect::<Result<_, _>>()?
            }
        };
        let mut boundary = None;
        for (k, z) in zs.iter().enumerate() {
            let field = format!("init.explicit[{k}]");
            let core = |e: bsd_kuramoto_core::Error| bad(field.clone(), e.to_string());
            if !structure_check(member, z, tol).map_err(core)? {
                return Err(bad(field, format!("violates the symmetry of {member}")));
            }
            let this = if on_bs_boundary(member, z, tol).map_err(core)? {
                true
            } else if contains_interior(member, z, tol).map_err(core)? {
                false
            } else {
                return Err(bad(field, "neither inside the domain nor on its BS boundary"));
            };
            if *boundary.get_or_insert(this) != this {
                return Err(bad("init", "oscillators must be all interior or all on the BS boundary"));
            }
        }
        Ok((EnsembleState::new(zs, 0.0), boundary.unwrap_or(false)))
    }

    /// Full validation. `base_dir` anchors relative output paths.
    pub fn prepare(self, base_dir: &Path) -> Result<Prepared, CliError> {
        if self.version != SCENARIO_VERSION {
            return Err(bad("version", format!("unsupported version {}; expected {SCENARIO_VERSION}", self.version)));
        }
        let domain = self.domain()?;
        let t = self.model.family_index;
        let member = if t == 0 {
            domain
        } else {
            domain
                .reduced(t)
                .ok_or_else(|| bad("model.family_index", format!("{domain} has no Kuramoto member at t = {t}")))?
        };
        if !self.model.coupling.is_finite() {
            return Err(bad("model.coupling", "must be finite"));
        }
        let drift = self.drift(&member)?;
        let model = ModelSpec::new(domain, t, self.model.coupling, drift).map_err(|e| bad("model", e.to_string()))?;
        let config = self.integration()?;
        let (init, boundary_run) = self.initial_state(&member, config.tolerances.boundary)?;
        if let Some(c) = &self.checks {
            if let Some(tol) = c.tolerance {
                if !(tol.is_finite() && tol > 0.0) {
                    return Err(bad("checks.tolerance", "must be positive"));
                }
            }
        }
        for (name, p) in [("outputs.csv", &self.outputs.csv), ("outputs.snapshots", &self.outputs.snapshots)] {
            if matches!(p, Some(s) if s.trim().is_empty()) {
                return Err(bad(name, "must not be empty"));
            }
        }
        Ok(Prepared {
            scenario: self,
            model,
            init,
            config,
            base_dir: base_dir.to_path_buf(),
            boundary_run,
        })
    }

    pub fn load(path: &Path) -> Result<Prepared, CliError> {
        let text = fs::read_to_string(path).map_err(|e| bad("scenario", format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Scenario::from_json(&text)?.prepare(&base)
    }
}
