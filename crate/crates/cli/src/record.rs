use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Machine-readable result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub version: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
}

impl OutputRecord {
    pub fn new(command: &str, parameters: Value, results: Value) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            results,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_round_trip_is_lossless() {
        let rec = OutputRecord::new(
            "analyze",
            json!({ "r": 0.2, "k": 1.0 }),
            json!({ "x": [0.0, 0.2113248654051871, 0.7886751345948129, 1.0 / 3.0, 1e-300] }),
        );
        let back = OutputRecord::from_json(&rec.to_json()).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.results["x"][3].as_f64().unwrap(), 1.0 / 3.0);
    }
}
