use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{parse_layer_file, LayerKind, MultilayerNetwork, NodeId, SignedEdge};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerPaths {
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(rename = "R")]
    pub r: String,
}

impl LayerPaths {
    pub fn get(&self, layer: LayerKind) -> &str {
        match layer {
            LayerKind::F => &self.f,
            LayerKind::M => &self.m,
            LayerKind::R => &self.r,
        }
    }
}

/// `{"node_count": n, "layers": {"F": .., "M": .., "R": ..}, "id_map": ..}`.
/// Paths are resolved relative to the manifest file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub node_count: usize,
    pub layers: LayerPaths,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id_map: Option<String>,
}

/// External string id to dense node id.
pub type IdMap = BTreeMap<String, NodeId>;

#[derive(Clone, Debug)]
pub struct LoadedNetwork {
    pub manifest: Manifest,
    pub network: MultilayerNetwork,
    pub id_map: Option<IdMap>,
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(format!("opening {}", path.display()), e))
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<LoadedNetwork> {
    let path = path.as_ref();
    let manifest: Manifest =
        serde_json::from_reader(open(path)?).map_err(|e| Error::json(format!("manifest {}", path.display()), e))?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut edges: Vec<SignedEdge> = Vec::new();
    for layer in LayerKind::ALL {
        let layer_path = resolve(dir, manifest.layers.get(layer));
        let parsed = parse_layer_file(open(&layer_path)?, layer).map_err(|e| match e {
            Error::Parse { line, message } => {
                Error::Parse { line, message: format!("{}: {message}", layer_path.display()) }
            }
            other => other,
        })?;
        edges.extend(parsed);
    }
    let network = MultilayerNetwork::build(manifest.node_count, edges)?;
    let id_map = match &manifest.id_map {
        Some(rel) => Some(read_id_map(open(&resolve(dir, rel))?, manifest.node_count)?),
        None => None,
    };
    Ok(LoadedNetwork { manifest, network, id_map })
}

/// Reads `external_id node_id` lines.
pub fn read_id_map<R: BufRead>(reader: R, node_count: usize) -> Result<IdMap> {
    let mut map = IdMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(format!("reading id map line {line_no}"), e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let err = |message: String| Error::Parse { line: line_no, message };
        if fields.len() != 2 {
            return Err(err(format!("expected `external_id node_id`, found {} fields", fields.len())));
        }
        let id: u32 = fields[1].parse().map_err(|_| err(format!("invalid node id {:?}", fields[1])))?;
        if id as usize >= node_count {
            return Err(Error::NodeOutOfRange { node: id as u64, node_count });
        }
        if map.insert(fields[0].to_string(), NodeId(id)).is_some() {
            return Err(err(format!("duplicate external id {:?}", fields[0])));
        }
    }
    Ok(map)
}

/// Writes a layer file; an edge of weight `w` is written as `w` lines so
/// that re-parsing restores the weight.
pub fn write_layer_file<W: Write>(
    mut out: W,
    net: &MultilayerNetwork,
    layer: LayerKind,
    header: Option<&str>,
) -> std::io::Result<()> {
    if let Some(h) = header {
        for line in h.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    for e in net.edges(layer) {
        for _ in 0..e.weight {
            match e.sign {
                Some(s) => writeln!(out, "{} {} {}", e.src, e.dst, s)?,
                None => writeln!(out, "{} {}", e.src, e.dst)?,
            }
        }
    }
    Ok(())
}
