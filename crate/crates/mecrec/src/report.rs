//! Self-describing run report. The JSON form embeds the full configuration and
//! a provenance block; [`ReconReport::from_json`] is its schema loader.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Approach, ExperimentConfig};
use crate::error::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientName {
    CapitalLambda,
    Lambda,
    Delta,
}

impl CoefficientName {
    pub fn as_str(self) -> &'static str {
        match self {
            CoefficientName::CapitalLambda => "capital_lambda",
            CoefficientName::Lambda => "lambda",
            CoefficientName::Delta => "delta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthSource {
    /// Closed-form transform of the supplied theory (Case I).
    Analytic,
    /// FFT of a dense pilot reconstruction (Case II).
    Discrete,
    /// The pilot was constant; the minimal plan was used.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    /// `‖rec − theory‖₂ / ‖theory‖₂` over the trusted window.
    pub rms_rel: f64,
    /// `max|rec − theory| / max|theory|` over the trusted window.
    pub max_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSamplingReport {
    pub distribution: String,
    pub mean_spacing: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub alias_free: bool,
    pub omega_max: f64,
    /// `(ω_a, ω_b)` with `φ(ω_a) = φ(ω_b)`, when one was found.
    pub collision: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub coefficient: CoefficientName,
    /// Cycles per unit time; the caption figure is `2πW`.
    pub bandwidth_w: f64,
    pub bandwidth_source: BandwidthSource,
    pub ratio: f64,
    /// Samples at `n/(2W)`, `n ≥ 1`; the origin is measured in addition.
    pub point_count: usize,
    pub gibbs_exposed: bool,
    pub support: (f64, f64),
    pub trusted: (f64, f64),
    /// Includes `t = 0`.
    pub plan_times: Vec<f64>,
    pub reconstructed: Vec<f64>,
    pub theory_at_plan: Option<Vec<f64>>,
    pub eval_times: Vec<f64>,
    pub shannon: Vec<f64>,
    pub theory: Option<Vec<f64>>,
    pub errors: Option<ErrorNorms>,
    pub random: Option<RandomSamplingReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VerdictKind {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub bound: f64,
    pub worst_max_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical config JSON.
    pub config_hash: String,
    pub seed: u64,
    pub mecrec_version: String,
    pub core_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconReport {
    pub schema_version: u32,
    pub case: u8,
    pub approach: Approach,
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub curves: Vec<CurveReport>,
    pub verdict: Option<Verdict>,
    pub diagnostics: Vec<String>,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
}

impl Provenance {
    pub fn for_config(cfg: &ExperimentConfig) -> Self {
        Self {
            config_hash: config_hash(cfg),
            seed: cfg.seed,
            mecrec_version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: mecrec_core::VERSION.to_string(),
        }
    }
}

impl ReconReport {
    pub fn curve(&self, c: CoefficientName) -> Option<&CurveReport> {
        self.curves.iter().find(|k| k.coefficient == c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Parses and checks schema version and config hash.
    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        let r: ReconReport = serde_json::from_str(s).map_err(|e| HarnessError::Schema(e.to_string()))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Schema(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        if r.provenance.config_hash != config_hash(&r.config) {
            return Err(HarnessError::Schema("config hash does not match embedded config".into()));
        }
        Ok(r)
    }
}
