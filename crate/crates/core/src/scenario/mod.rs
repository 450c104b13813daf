//! Seeded, reproducible experiment scenarios with machine-readable reports.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::AStructure;

mod theorems;
mod tools;

pub use theorems::{run_lem32, run_thm25, run_thm26, run_thm31, run_thm34};
pub use tools::{geodesic_with_curve, run_decompose, run_geodesic, run_planarity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioId {
    Thm25,
    Thm26,
    Lem32,
    Thm34,
    Thm31,
    Decompose,
    Geodesic,
    Planarity,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        Self::Thm25,
        Self::Thm26,
        Self::Lem32,
        Self::Thm34,
        Self::Thm31,
        Self::Decompose,
        Self::Geodesic,
        Self::Planarity,
    ];

    /// The scenarios run by [`run_all`].
    pub const THEOREMS: [ScenarioId; 5] =
        [Self::Thm25, Self::Thm26, Self::Lem32, Self::Thm34, Self::Thm31];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Thm25 => "thm25",
            Self::Thm26 => "thm26",
            Self::Lem32 => "lem32",
            Self::Thm34 => "thm34",
            Self::Thm31 => "thm31",
            Self::Decompose => "decompose",
            Self::Geodesic => "geodesic",
            Self::Planarity => "planarity",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    /// `⟨E⟩`
    Projective,
    /// `⟨E, I⟩` on `R^{4n}`
    Complex,
    /// `⟨E, I, J, K⟩` on `R^{4n}`
    Quaternionic,
}

impl StructureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Projective => "projective",
            Self::Complex => "complex",
            Self::Quaternionic => "quaternionic",
        }
    }
}

impl FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projective" | "e" => Ok(Self::Projective),
            "complex" | "ei" => Ok(Self::Complex),
            "quaternionic" | "q" => Ok(Self::Quaternionic),
            other => Err(Error::Config(format!("unknown structure {other:?}"))),
        }
    }
}

/// Everything a run depends on. Two runs with equal configs produce equal
/// reports apart from `duration_ms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub seed: u64,
    /// Quaternionic dimension: the charts are `R^{4n}`.
    pub n: usize,
    pub structure: StructureKind,
    /// Second structure for `thm26`; when absent the default pairs run.
    pub structure_b: Option<StructureKind>,
    /// Real dimension for the projective structure (defaults to `4n`).
    pub dim: Option<usize>,
    pub tol_alg: f64,
    pub tol_ode: f64,
    pub tol_map: f64,
    pub step: f64,
    pub samples: usize,
    pub t_max: f64,
    pub x0: Option<Vec<f64>>,
    pub v0: Option<Vec<f64>>,
    pub tensor: Option<PathBuf>,
    pub structure_file: Option<PathBuf>,
    pub connection: Option<PathBuf>,
    pub curve: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioId, seed: u64) -> Self {
        Self {
            scenario,
            seed,
            n: 2,
            structure: StructureKind::Quaternionic,
            structure_b: None,
            dim: None,
            tol_alg: 1e-9,
            tol_ode: 1e-6,
            tol_map: 1e-4,
            step: 1e-3,
            samples: 20,
            t_max: 1.0,
            x0: None,
            v0: None,
            tensor: None,
            structure_file: None,
            connection: None,
            curve: None,
            out: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_structure(mut self, kind: StructureKind, dim: Option<usize>) -> Self {
        self.structure = kind;
        self.dim = dim;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol-alg", self.tol_alg),
            ("tol-ode", self.tol_ode),
            ("tol-map", self.tol_map),
            ("step", self.step),
            ("t-max", self.t_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn build_structure(&self, kind: StructureKind) -> Result<AStructure> {
        match kind {
            StructureKind::Projective => AStructure::projective(self.dim.unwrap_or(4 * self.n)),
            StructureKind::Complex => AStructure::complex(self.n),
            StructureKind::Quaternionic => AStructure::quaternionic(self.n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// Passes when `value <= threshold`.
    Le,
    /// Passes when `value >= threshold`.
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: Relation::Le, pass: value <= threshold }
    }

    pub fn ge(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: Relation::Ge, pass: value >= threshold }
    }

    /// A boolean outcome recorded as `1` or `0` against threshold `1`.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::ge(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: ScenarioId,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
    pub pass: bool,
    pub duration_ms: u64,
}

impl Report {
    pub(crate) fn new(config: &ScenarioConfig) -> Self {
        Self {
            scenario: config.scenario,
            seed: config.seed,
            checks: Vec::new(),
            notes: Vec::new(),
            data: serde_json::Value::Null,
            pass: true,
            duration_ms: 0,
        }
    }

    pub(crate) fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub(crate) fn finish(mut self, started: Instant) -> Self {
        self.pass = self.checks.iter().all(|c| c.pass);
        self.duration_ms = started.elapsed().as_millis() as u64;
        self
    }

    /// A copy with the duration zeroed, for reproducibility comparisons.
    pub fn without_duration(&self) -> Self {
        Self { duration_ms: 0, ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per check: `scenario,seed,name,value,threshold,relation,pass`.
    pub fn write_csv(reports: &[Report], writer: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["scenario", "seed", "name", "value", "threshold", "relation", "pass"])?;
        for r in reports {
            for c in &r.checks {
                let relation = match c.relation {
                    Relation::Le => "le",
                    Relation::Ge => "ge",
                };
                w.write_record([
                    r.scenario.as_str().to_string(),
                    r.seed.to_string(),
                    c.name.clone(),
                    c.value.to_string(),
                    c.threshold.to_string(),
                    relation.to_string(),
                    c.pass.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Aggregate of several reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub reports: Vec<Report>,
    pub pass: bool,
}

pub fn run(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    match config.scenario {
        ScenarioId::Thm25 => run_thm25(config),
        ScenarioId::Thm26 => run_thm26(config),
        ScenarioId::Lem32 => run_lem32(config),
        ScenarioId::Thm34 => run_thm34(config),
        ScenarioId::Thm31 => run_thm31(config),
        ScenarioId::Decompose => run_decompose(config),
        ScenarioId::Geodesic => run_geodesic(config),
        ScenarioId::Planarity => run_planarity(config),
    }
}

/// Runs every theorem scenario with the shared settings of `base`.
pub fn run_all(base: &ScenarioConfig) -> Result<Summary> {
    let mut reports = Vec::new();
    for id in ScenarioId::THEOREMS {
        let mut config = base.clone();
        config.scenario = id;
        if id != ScenarioId::Thm25 && id != ScenarioId::Thm26 {
            config.structure = StructureKind::Quaternionic;
        }
        reports.push(run(&config)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(Summary { reports, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ScenarioId::ALL {
            assert_eq!(id.as_str().parse::<ScenarioId>().unwrap(), id);
        }
        assert!(matches!("bogus".parse::<ScenarioId>(), Err(Error::Config(_))));
    }

    #[test]
    fn checks_treat_nan_as_failure() {
        assert!(!Check::le("x", f64::NAN, 1.0).pass);
        assert!(!Check::ge("x", f64::NAN, 1.0).pass);
        assert!(Check::flag("x", true).pass);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = ScenarioConfig::new(ScenarioId::Geodesic, 1);
        c.step = 0.0;
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }
}
