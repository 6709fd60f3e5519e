use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub files: Vec<InputFile>,
    /// Flag values as given (after defaults are applied).
    pub args: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub subcommand: String,
    pub inputs: Inputs,
    pub outputs: Value,
    pub verification: Vec<Check>,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(subcommand: &str) -> Self {
        RunReport {
            subcommand: subcommand.to_string(),
            inputs: Inputs::default(),
            outputs: Value::Null,
            verification: Vec::new(),
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn arg(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.inputs.args.insert(name.to_string(), value.to_string());
        self
    }

    pub fn file(&mut self, path: &Path) -> Result<&mut Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.files.push(InputFile {
            path: path.display().to_string(),
            sha256: hex(&Sha256::digest(&bytes)),
        });
        Ok(self)
    }

    pub fn check(&mut self, name: &str, passed: bool) -> &mut Self {
        self.verification.push(Check {
            name: name.to_string(),
            passed,
            detail: None,
        });
        self
    }

    pub fn check_detail(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.verification.push(Check {
            name: name.to_string(),
            passed,
            detail: Some(detail.into()),
        });
        self
    }

    pub fn output<T: Serialize>(&mut self, value: &T) -> &mut Self {
        self.outputs = serde_json::to_value(value).expect("report payloads serialize");
        self
    }

    pub fn passed(&self) -> bool {
        !self.verification.is_empty() && self.verification.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.verification.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report with timing zeroed, for comparing runs.
    pub fn without_timing(&self) -> RunReport {
        RunReport {
            timing: Timing { elapsed_ms: 0.0 },
            ..self.clone()
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
