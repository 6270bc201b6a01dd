use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const FORMAT_VERSION: u32 = 1;

/// Provenance block embedded in every output file.
pub fn run_config<S: Serialize>(subcommand: &str, settings: &S) -> Result<Value> {
    Ok(json!({
        "tool": "signpath",
        "version": env!("CARGO_PKG_VERSION"),
        "format_version": FORMAT_VERSION,
        "subcommand": subcommand,
        "settings": serde_json::to_value(settings)?,
    }))
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Serializes `body` as a JSON object with `run_config` added.
pub fn write_json<S: Serialize>(path: &Path, body: &S, run_config: &Value) -> Result<()> {
    let mut value = serde_json::to_value(body)?;
    match &mut value {
        Value::Object(map) => {
            map.insert("run_config".into(), run_config.clone());
        }
        other => {
            let mut map = Map::new();
            map.insert("run_config".into(), run_config.clone());
            map.insert("data".into(), other.take());
            value = Value::Object(map);
        }
    }
    write_value(path, &value)
}

pub fn write_value(path: &Path, value: &Value) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush().with_context(|| format!("writing {}", path.display()))
}

/// The first line of every CSV output.
pub fn csv_preamble(run_config: &Value) -> String {
    format!("# run_config: {}", serde_json::to_string(run_config).expect("JSON values serialize"))
}

/// Opens a CSV file and writes the provenance line and header.
pub fn csv_writer(path: &Path, run_config: &Value, header: &[String]) -> Result<BufWriter<File>> {
    let mut out = create(path)?;
    writeln!(out, "{}", csv_preamble(run_config))?;
    writeln!(out, "{}", header.join(","))?;
    Ok(out)
}
