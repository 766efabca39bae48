use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use minklab::Error;
use serde::Serialize;
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit statuses of the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Usage = 1,
    Expectation = 2,
    Infeasible = 3,
    Io = 4,
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(Status::Io, format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::CellCap { .. } | Error::Nonconvergence { .. } | Error::Unsupported(_) => Status::Infeasible,
            _ => Status::Usage,
        };
        Self::new(status, e.to_string())
    }
}

pub type Outcome<T = ()> = std::result::Result<T, Failure>;

/// The single JSON document every command writes.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub entries: Value,
    pub flags: Value,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Report {
    pub fn new(command: &str, config: Value, entries: impl Serialize, flags: Value) -> Self {
        Self {
            command: command.into(),
            config,
            entries: to_value(entries),
            flags,
            version: VERSION,
            details: None,
        }
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = Some(to_value(details));
        self
    }

    /// Writes to `out`, or prints when there is no path.
    pub fn emit(&self, out: Option<&PathBuf>) -> Outcome {
        let text = serde_json::to_string_pretty(self).expect("reports serialise") + "\n";
        match out {
            Some(path) => write(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

pub fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

pub fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// A report's entries, checked against `--expect-monotone`.
pub fn violations(report: &Value) -> Outcome<Vec<u64>> {
    let entries = report
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::new(Status::Usage, "report has no entries array"))?;
    Ok(entries
        .iter()
        .filter(|e| e.get("verdict").and_then(Value::as_str) == Some("certified-violation"))
        .map(|e| e.get("k").and_then(Value::as_u64).unwrap_or(0))
        .collect())
}

pub fn expectation(expect_monotone: bool, report: &Value) -> Outcome {
    if !expect_monotone {
        return Ok(());
    }
    let ks = violations(report)?;
    if ks.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(Status::Expectation, format!("certified violation at k = {ks:?}")))
    }
}

pub fn flags(pairs: &[(&str, Value)]) -> Value {
    Value::Object(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn violations_are_found_by_verdict() {
        let r = json!({"entries": [{"k": 1}, {"k": 2, "verdict": "certified-nondecreasing"}, {"k": 3, "verdict": "certified-violation"}]});
        assert_eq!(violations(&r).unwrap(), vec![3]);
        assert_eq!(expectation(true, &r).unwrap_err().status, Status::Expectation);
        assert!(expectation(false, &r).is_ok());
    }

    #[test]
    fn core_errors_map_to_statuses() {
        assert_eq!(Failure::from(Error::CellCap { requested: 9, cap: 1 }).status, Status::Infeasible);
        assert_eq!(Failure::from(Error::SingularAffine).status, Status::Usage);
    }
}
