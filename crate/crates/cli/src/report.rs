//! `report-1` JSON reports and the exit-code contract.

use std::collections::BTreeMap;
use std::fmt;

use cosk_core::CoskError;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "report-1";

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: BTreeMap<&'static str, Value>,
    pub input_digest: Option<String>,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub results: Value,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command,
            args: BTreeMap::new(),
            input_digest: None,
            seed: None,
            tolerances: BTreeMap::new(),
            results: Value::Null,
        }
    }

    pub fn arg(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.args.insert(key, value.into());
        self
    }

    pub fn tol(mut self, key: &'static str, value: f64) -> Self {
        self.tolerances.insert(key, value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }
}

/// Output of a subcommand: the report, its human-readable table, the exit
/// status (0 or 1) and an optional document that owns stdout.
pub struct Outcome {
    pub report: Report,
    pub table: String,
    pub code: u8,
    pub payload: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_MISSING_J: u8 = 4;
pub const EXIT_DIMENSION: u8 = 5;

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<CoskError> for CliError {
    fn from(e: CoskError) -> Self {
        let code = match e {
            CoskError::Format(_) | CoskError::InvalidArgument(_) => EXIT_PARSE,
            _ => EXIT_VALIDATION,
        };
        Self::new(code, e.to_string())
    }
}
