//! Structured verdicts shared by the library checks and the CLI.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub millis: u64,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::from_bool(ok),
            detail: None,
            witness: None,
            millis: 0,
        }
    }

    pub fn with_detail(mut self, detail: impl Serialize) -> Self {
        self.detail = Some(serde_json::to_value(detail).unwrap_or(Value::Null));
        self
    }

    pub fn with_witness(mut self, witness: impl Serialize) -> Self {
        self.witness = Some(serde_json::to_value(witness).unwrap_or(Value::Null));
        self
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub records: Vec<CheckRecord>,
    pub verdict: Status,
}

impl CheckReport {
    pub fn new(command: impl Into<String>) -> Self {
        CheckReport {
            schema: SCHEMA_VERSION,
            tool: "pealab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            parameters: BTreeMap::new(),
            records: Vec::new(),
            verdict: Status::Pass,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.set_param(key, value);
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn push(&mut self, record: CheckRecord) {
        if !record.passed() {
            self.verdict = Status::Fail;
        }
        self.records.push(record);
    }

    /// Runs `f`, records its verdict and the elapsed wall time.
    pub fn timed<F>(&mut self, f: F)
    where
        F: FnOnce() -> CheckRecord,
    {
        let start = Instant::now();
        let mut rec = f();
        rec.millis = start.elapsed().as_millis() as u64;
        self.push(rec);
    }

    pub fn extend(&mut self, other: CheckReport) {
        for r in other.records {
            self.push(r);
        }
    }

    /// Records prefixed with `prefix/`.
    pub fn extend_prefixed(&mut self, prefix: &str, other: CheckReport) {
        for mut r in other.records {
            r.name = format!("{prefix}/{}", r.name);
            self.push(r);
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed())
    }

    /// Sorts records by name; record order is part of the output contract.
    pub fn finalize(mut self) -> Self {
        self.records.sort_by(|a, b| a.name.cmp(&b.name));
        self.verdict = Status::from_bool(self.records.iter().all(|r| r.passed()));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with timing zeroed; equal inputs give byte-equal output.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone().finalize();
        for r in &mut c.records {
            r.millis = 0;
        }
        serde_json::to_string(&c).expect("report serializes")
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_records() {
        let mut r = CheckReport::new("t");
        r.push(CheckRecord::new("b", true));
        assert!(r.passed());
        r.push(CheckRecord::new("a", false).with_witness([1, 2]));
        let r = r.finalize();
        assert!(!r.passed());
        assert_eq!(r.records[0].name, "a");
    }

    #[test]
    fn digest_ignores_timing() {
        let mut a = CheckReport::new("t").param("p", 3);
        a.push(CheckRecord::new("x", true));
        let mut b = a.clone();
        b.records[0].millis = 99;
        assert_eq!(a.digest(), b.digest());
        b.records[0].status = Status::Fail;
        assert_ne!(a.digest(), b.digest());
    }
}
