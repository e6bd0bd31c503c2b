//! The versioned JSON experiment document.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kinetic::{Kernel, SolveOptions};
use crate::ledger::SimConfig;
use crate::stats::{StationarityParams, DEFAULT_TAIL_FRACTION};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Snapshots,
    EntropySeries,
    TemperatureSeries,
    Fits,
    Tail,
    Stationarity,
    OracleCheck,
}

/// One axis of a grid sweep: a dotted path into the spec and the values
/// it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub path: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    /// Number of trailing snapshots pooled for the time-averaged fits.
    #[serde(default = "default_average_last")]
    pub average_last: usize,
    /// Lower edge of the exponential fit; defaults to the policy floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationarity: Option<StationarityParams>,
    #[serde(default = "default_tail_fraction")]
    pub tail_fraction: f64,
    /// Window (sweeps) for the window-averaged entropy series; defaults to
    /// the stationarity window or ten snapshot intervals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_window: Option<u64>,
}

fn default_average_last() -> usize {
    100
}

fn default_tail_fraction() -> f64 {
    DEFAULT_TAIL_FRACTION
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            average_last: default_average_last(),
            support_shift: None,
            stationarity: None,
            tail_fraction: default_tail_fraction(),
            entropy_window: None,
        }
    }
}

/// Checks evaluated in `--assert` mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ks: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_density_exponent_range: Option<[f64; 2]>,
}

/// Master-equation run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticSpec {
    #[serde(default)]
    pub floor: f64,
    pub step: f64,
    pub points: usize,
    /// Money at which the initial delta distribution sits.
    pub initial_money: f64,
    pub kernel: Kernel,
    #[serde(default)]
    pub solve: SolveOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub simulation: SimConfig,
    #[serde(default = "default_replicates")]
    pub replicates: u32,
    #[serde(default)]
    pub outputs: BTreeSet<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_axes: Vec<SweepAxis>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expectations: Option<Expectations>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinetic: Option<KineticSpec>,
}

fn default_replicates() -> u32 {
    1
}

/// A schema violation with its location in the source document.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub line: usize,
    pub column: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: field `{}`: {}",
            self.line, self.column, self.field, self.message
        )
    }
}

impl std::error::Error for SchemaError {}

impl ExperimentSpec {
    pub fn new(simulation: SimConfig) -> Self {
        ExperimentSpec {
            schema_version: SCHEMA_VERSION,
            simulation,
            replicates: 1,
            outputs: BTreeSet::new(),
            output_dir: None,
            sweep_axes: Vec::new(),
            analysis: AnalysisSpec::default(),
            expectations: None,
            kinetic: None,
        }
    }

    /// Parse and validate a JSON document.
    pub fn parse(text: &str) -> std::result::Result<Self, SchemaError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: ExperimentSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            SchemaError {
                line: inner.line(),
                column: inner.column(),
                field,
                message: inner.to_string(),
            }
        })?;
        spec.validate().map_err(|e| SchemaError {
            line: 0,
            column: 0,
            field: "<document>".into(),
            message: e.to_string(),
        })?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.analysis.average_last == 0 {
            return Err(Error::Config(
                "analysis.average_last must be positive".into(),
            ));
        }
        self.simulation.validate()?;
        let doc = serde_json::to_value(self)?;
        for axis in &self.sweep_axes {
            if lookup(&doc, &axis.path).is_none() {
                return Err(Error::Config(format!(
                    "sweep axis `{}` does not name a field of the spec",
                    axis.path
                )));
            }
            if axis.values.is_empty() {
                return Err(Error::Config(format!(
                    "sweep axis `{}` has no values",
                    axis.path
                )));
            }
        }
        if let Some(k) = &self.kinetic {
            k.kernel.validate()?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Copy of the spec with `path` set to `value`.
    pub fn with_value(&self, path: &str, value: &Value) -> Result<Self> {
        let mut doc = serde_json::to_value(self)?;
        let slot = lookup_mut(&mut doc, path).ok_or_else(|| {
            Error::Config(format!(
                "sweep axis `{path}` does not name a field of the spec"
            ))
        })?;
        *slot = value.clone();
        let spec: ExperimentSpec = serde_json::from_value(doc)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }
}

fn lookup<'a>(doc: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(doc, |v, key| v.get(key))
}

fn lookup_mut<'a>(doc: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    path.split('.').try_fold(doc, |v, key| v.get_mut(key))
}
