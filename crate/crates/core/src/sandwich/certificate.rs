use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "verified")]
    Verified,
    #[serde(rename = "refuted")]
    Refuted,
    #[serde(rename = "inconclusive-at-cap")]
    InconclusiveAtCap,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::InconclusiveAtCap => "inconclusive-at-cap",
        })
    }
}

/// Record of one checked claim. Field order is the serialized key order;
/// maps are sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub claim_id: String,
    /// Plain statement of the claim being checked.
    pub reference: String,
    pub params: BTreeMap<String, Value>,
    pub status: Status,
    pub witnesses: BTreeMap<String, Value>,
    pub duration_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub presentation_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caveat: Option<String>,
}

impl Certificate {
    pub fn new(claim_id: &str, reference: &str) -> Self {
        Certificate {
            schema_version: SCHEMA_VERSION,
            claim_id: claim_id.to_owned(),
            reference: reference.to_owned(),
            params: BTreeMap::new(),
            status: Status::InconclusiveAtCap,
            witnesses: BTreeMap::new(),
            duration_ms: 0,
            presentation_hash: None,
            caveat: None,
        }
    }

    pub fn param(&mut self, key: &str, value: Value) {
        self.params.insert(key.to_owned(), value);
    }

    pub fn witness(&mut self, key: &str, value: Value) {
        self.witnesses.insert(key.to_owned(), value);
    }

    pub(crate) fn finish(&mut self, start: Instant) {
        self.duration_ms = start.elapsed().as_millis() as u64;
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// Serialized form with the timing field zeroed.
    pub fn payload(&self) -> String {
        Certificate { duration_ms: 0, ..self.clone() }.to_json()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn key_order_is_stable() {
        let mut c = Certificate::new("demo", "a statement");
        c.param("z", json!(1));
        c.param("a", json!(2));
        c.status = Status::Verified;
        c.duration_ms = 17;
        let text = c.to_json();
        let keys = ["schema_version", "claim_id", "reference", "params", "status", "witnesses", "duration_ms"];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(text.find("\"a\"").unwrap() < text.find("\"z\"").unwrap());
        assert!(text.contains("\"verified\""));
        assert_eq!(Certificate::from_json(&text).unwrap(), c);
        assert!(!c.payload().contains("17"));
    }
}
