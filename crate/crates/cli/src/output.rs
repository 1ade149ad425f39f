//! Versioned JSON envelope, CSV passthrough and structured errors.

use mahlercm::paperdata::{case_dossiers, table1, table2, CLASS_NUMBER_1, CLASS_NUMBER_2};
use mahlercm::Error;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::sync::OnceLock;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

pub const SCHEMA: u32 = 1;

/// What a command hands back to the driver.
pub struct Outcome {
    pub result: Value,
    /// All requested checks met their tolerances.
    pub ok: bool,
    pub csv: Option<String>,
}

impl Outcome {
    pub fn new(result: Value, ok: bool) -> Self {
        Outcome { result, ok, csv: None }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Everything embedded from the printed tables, in a fixed serialization.
pub fn paper_data() -> Value {
    json!({
        "table1": table1(),
        "table2": table2(),
        "class_number_1": CLASS_NUMBER_1,
        "class_number_2": CLASS_NUMBER_2,
        "cases": case_dossiers(),
    })
}

pub fn paper_data_sha256() -> &'static str {
    static SUM: OnceLock<String> = OnceLock::new();
    SUM.get_or_init(|| {
        let bytes = serde_json::to_vec(&paper_data()).expect("embedded data serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    })
}

fn meta(started: SystemTime, elapsed: Duration) -> Value {
    let secs = started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "paper_data_sha256": paper_data_sha256(),
        "started_unix": secs,
        "elapsed_ms": elapsed.as_millis() as u64,
    })
}

pub fn envelope(command: &str, out: &Outcome, started: SystemTime, elapsed: Duration) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "ok": out.ok,
        "result": out.result,
        "meta": meta(started, elapsed),
    })
}

/// Variant name of a core error, e.g. "NotFound".
pub fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

/// Full-precision decimal string of a float.
pub fn float_str(x: &rug::Float) -> String {
    mahlercm::numerics::format_real(x, mahlercm::numerics::digits_for_prec(x.prec()))
}

pub fn error_json(command: Option<&str>, kind: &str, message: &str) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "ok": false,
        "error": { "kind": kind, "message": message },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds() {
        assert_eq!(error_kind(&Error::NotFound("x".into())), "NotFound");
        assert_eq!(error_kind(&Error::SingularSystem), "SingularSystem");
        assert_eq!(error_kind(&Error::TailBoundExceeded { bound: 1.0, eps: 0.1 }), "TailBoundExceeded");
    }

    #[test]
    fn checksum_is_stable() {
        let a = paper_data_sha256();
        assert_eq!(a.len(), 64);
        let again: String = Sha256::digest(serde_json::to_vec(&paper_data()).unwrap())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(a, again);
    }
}
