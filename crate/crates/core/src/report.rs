//! Machine-readable report envelope shared by all CLI subcommands.
//!
//! Every report carries `schema`, the full effective quadrature defaults,
//! and the seed, so a run can be reproduced from its own output. The
//! `timestamp` field is the only non-deterministic part; comparison tooling
//! strips it with [`strip_timestamp`].

use serde::Serialize;
use serde_json::{json, Value};

use crate::quad::{QuadMethod, QuadratureConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Wrap a result payload in the versioned envelope.
pub fn envelope(command: &str, cfg: Option<&QuadratureConfig>, result: Value) -> Value {
    let mut header = json!({
        "schema": SCHEMA_VERSION,
        "command": command,
        "timestamp": unix_time(),
    });
    if let Some(cfg) = cfg {
        header["seed"] = json!(cfg.seed);
        header["samples"] = json!(cfg.samples);
        header["shards"] = json!(cfg.shards);
        header["method"] = json!(match cfg.method {
            QuadMethod::MonteCarlo => "mc",
            QuadMethod::Sobol => "sobol",
        });
    }
    header["result"] = result;
    header
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Remove the timestamp for byte-identical comparison of reruns.
pub fn strip_timestamp(v: &mut Value) {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timestamp");
    }
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
