//! Byte-stable report output: JSON with sorted keys and floats rounded to 12
//! significant digits, CSV tables, and an output directory with a manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to `digits` significant decimal digits; non-finite values pass.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

/// Fixed float formatting used by every emitter.
pub fn fmt_float(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        return "-inf".into();
    }
    if x == f64::INFINITY {
        return "inf".into();
    }
    let r = round_sig(x, SIGNIFICANT_DIGITS);
    // avoid "-0"
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn normalize(value: Value) -> Value {
    match value {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => {
                let r = round_sig(x, SIGNIFICANT_DIGITS);
                serde_json::Number::from_f64(if r == 0.0 { 0.0 } else { r })
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }
            _ => Value::Number(n),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Converts to a JSON value with rounded floats; object keys come out sorted.
pub fn to_value<T: Serialize>(value: &T) -> Result<Value> {
    Ok(normalize(serde_json::to_value(value)?))
}

/// Pretty JSON text with sorted keys and rounded floats, newline-terminated.
pub fn to_stable_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&to_value(value)?)?;
    text.push('\n');
    Ok(text)
}

/// A CSV table whose cells are already formatted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.headers)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Serde adapter for reals that may be infinite: `-inf`/`inf` are written
/// as strings, finite values as numbers.
pub mod extended_real {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else if *x == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    struct ExtendedReal;

    impl Visitor<'_> for ExtendedReal {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number, \"-inf\" or \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            super::parse_extended(v).ok_or_else(|| E::custom(format!("not an extended real: {v}")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ExtendedReal)
    }
}

/// Parses a real number or `-inf`/`inf`.
pub fn parse_extended(text: &str) -> Option<f64> {
    match text.trim() {
        "-inf" | "-infinity" | "-Infinity" => Some(f64::NEG_INFINITY),
        "inf" | "+inf" | "infinity" | "Infinity" => Some(f64::INFINITY),
        t => t.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

#[derive(Debug, Clone, Serialize)]
struct ManifestEntry {
    file: String,
    query: Value,
}

/// Collects files written under one directory and records them in
/// `manifest.json`.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root)?;
        Ok(Self {
            root,
            entries: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str, query: Value) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, contents)?;
        self.entries.retain(|e| e.file != name);
        self.entries.push(ManifestEntry {
            file: name.to_string(),
            query,
        });
        Ok(path)
    }

    /// Writes `manifest.json`, merging with entries from earlier runs.
    pub fn finish(self) -> Result<PathBuf> {
        let path = self.root.join("manifest.json");
        let mut merged: Vec<ManifestEntry> = Vec::new();
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(Value::Object(old)) = serde_json::from_str::<Value>(&text) {
                if let Some(Value::Array(files)) = old.get("files") {
                    for f in files {
                        if let (Some(Value::String(file)), Some(query)) = (f.get("file"), f.get("query")) {
                            merged.push(ManifestEntry {
                                file: file.clone(),
                                query: query.clone(),
                            });
                        }
                    }
                }
            }
        }
        for e in self.entries {
            merged.retain(|m| m.file != e.file);
            merged.push(e);
        }
        merged.sort_by(|a, b| a.file.cmp(&b.file));
        let manifest = serde_json::json!({ "files": merged });
        fs::write(&path, to_stable_json(&manifest)?)?;
        Ok(path)
    }
}
