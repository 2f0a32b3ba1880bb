//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::grid::Grid2D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    /// Checks without a gate are recorded for information and always pass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<f64>,
    /// The gate is a floor (`max` holds the measured minimum) rather than a ceiling.
    #[serde(default, skip_serializing_if = "is_false")]
    pub lower_bound: bool,
    pub pass: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub inputs: Vec<InputHash>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid2D>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub command: String,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
    pub pass: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl VerificationReport {
    pub fn new(command: &str) -> Self {
        VerificationReport {
            command: command.to_string(),
            checks: Vec::new(),
            provenance: Provenance {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                ..Provenance::default()
            },
            pass: true,
        }
    }

    /// Records a gated check; NaN never passes.
    pub fn gated(&mut self, name: &str, max: f64, mean: Option<f64>, gate: f64) -> bool {
        let pass = max < gate;
        self.checks.push(Check {
            name: name.to_string(),
            max,
            mean,
            gate: Some(gate),
            lower_bound: false,
            pass,
        });
        self.pass &= pass;
        pass
    }

    /// Records a check that passes when the measured minimum exceeds `floor`.
    pub fn gated_min(&mut self, name: &str, min: f64, floor: f64) -> bool {
        let pass = min > floor;
        self.checks.push(Check {
            name: name.to_string(),
            max: min,
            mean: None,
            gate: Some(floor),
            lower_bound: true,
            pass,
        });
        self.pass &= pass;
        pass
    }

    /// Records a measured value without a gate.
    pub fn info(&mut self, name: &str, value: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            max: value,
            mean: None,
            gate: None,
            lower_bound: false,
            pass: true,
        });
    }

    /// Records a boolean outcome as a check of 0 (true) or 1 (false) against gate 0.5.
    pub fn flag(&mut self, name: &str, ok: bool) -> bool {
        self.gated(name, if ok { 0.0 } else { 1.0 }, None, 0.5)
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.provenance.tolerances.insert(name.to_string(), value);
    }

    /// Hashes a file's bytes under the path string as given.
    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.provenance.inputs.push(InputHash {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("name,max,mean,gate,bound,pass\n");
        for c in &self.checks {
            let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            let bound = match (c.gate, c.lower_bound) {
                (None, _) => "",
                (Some(_), false) => "upper",
                (Some(_), true) => "lower",
            };
            out.push_str(&format!("{},{:e},{},{},{},{}\n", c.name, c.max, opt(c.mean), opt(c.gate), bound, c.pass));
        }
        out
    }
}
