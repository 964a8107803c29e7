//! Run manifests and report emission.
//!
//! Every report embeds the manifest that produced it, so a run can be
//! reproduced from the report alone. File names carry a hash of the
//! manifest; floating-point values are printed with 6 significant digits.
//! Reports carry no timestamps: re-running the same manifest writes
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use lognnet::{GeneratorParams, NetworkShape, Result};
use serde::Serialize;
use serde_json::Value;

pub const FORMAT_VERSION: u32 = 1;

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub registry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delimiter: Option<char>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    /// Where the generator parameters came from: "explicit",
    /// "table4:rbv1", "table4:rbv2" or "optimize".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gen_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gen: Option<GeneratorParams>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub folds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stratified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed_features: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_features: Option<Vec<usize>>,
    pub out_dir: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, out_dir: &Path) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            command: command.to_string(),
            dataset: None,
            registry: None,
            delimiter: None,
            shape: None,
            gen_source: None,
            gen: None,
            seed,
            epochs: None,
            learning_rate: None,
            folds: None,
            stratified: None,
            removed_features: None,
            selected_features: None,
            out_dir: out_dir.display().to_string(),
        }
    }

    pub fn with_shape(mut self, shape: NetworkShape) -> Self {
        self.shape = Some(shape.to_string());
        self
    }

    /// Hex hash of the canonical manifest JSON; used in file names.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&sorted(serde_json::to_value(self).unwrap()))
            .expect("manifest serializes");
        format!("{:016x}", fnv1a64(canonical.as_bytes()))
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

// serde_json's Map is already ordered (BTreeMap without preserve_order),
// but sort explicitly so the hash never depends on build features.
fn sorted(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sorted(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

/// Rounds to 6 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let factor = 10f64.powi(5 - magnitude);
    (v * factor).round() / factor
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let rounded = round_sig(n.as_f64().unwrap());
                serde_json::Number::from_f64(rounded)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            } else {
                Value::Number(n)
            }
        }
        Value::Object(map) => Value::Object(
            map.into_iter().map(|(k, v)| (k, round_value(v))).collect(),
        ),
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        other => other,
    }
}

/// Writes the report JSON (floats rounded to 6 significant digits) to
/// `<command>_<hash>.json` under the manifest's output directory and
/// returns (path, rendered JSON text).
pub fn emit_report<T: Serialize>(manifest: &RunManifest, body: &T) -> Result<(PathBuf, String)> {
    let out_dir = PathBuf::from(&manifest.out_dir);
    fs::create_dir_all(&out_dir)?;
    let mut root = serde_json::Map::new();
    root.insert("format_version".into(), Value::from(FORMAT_VERSION));
    root.insert("manifest".into(), serde_json::to_value(manifest)?);
    let Value::Object(fields) = round_value(serde_json::to_value(body)?) else {
        return Err(lognnet::Error::Config("report body must be an object".into()));
    };
    for (k, v) in fields {
        root.insert(k, v);
    }
    let text = serde_json::to_string_pretty(&Value::Object(root))?;
    let path = out_dir.join(format!("{}_{}.json", manifest.command, manifest.hash()));
    fs::write(&path, text.as_bytes())?;
    Ok((path, text))
}

/// Path for a CSV side file of this run.
pub fn side_file(manifest: &RunManifest, suffix: &str) -> PathBuf {
    PathBuf::from(&manifest.out_dir).join(format!(
        "{}_{}_{suffix}.csv",
        manifest.command,
        manifest.hash()
    ))
}
