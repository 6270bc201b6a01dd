use std::io::BufRead;

use super::network::merge_edges;
use super::{LayerKind, NodeId, Sign, SignedEdge};
use crate::error::{Error, Result};

/// Reads one layer file: `src dst` lines for M/R, `src dst sign` for F.
/// Blank lines and lines starting with `#` are skipped. Duplicates are merged.
pub fn parse_layer_file<R: BufRead>(reader: R, layer: LayerKind) -> Result<Vec<SignedEdge>> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(format!("reading line {line_no}"), e))?;
        if let Some(edge) = parse_line(&line, line_no, layer)? {
            edges.push(edge);
        }
    }
    merge_edges(edges)
}

pub fn parse_layer_str(text: &str, layer: LayerKind) -> Result<Vec<SignedEdge>> {
    parse_layer_file(text.as_bytes(), layer)
}

fn parse_line(line: &str, line_no: usize, layer: LayerKind) -> Result<Option<SignedEdge>> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let fields: Vec<&str> = trimmed.split_whitespace().collect();
    let arity = if layer.is_signed() { 3 } else { 2 };
    let err = |message: String| Error::Parse { line: line_no, message };
    if fields.len() != arity {
        return Err(err(format!("expected {arity} fields for layer {layer}, found {}", fields.len())));
    }
    let id = |s: &str| s.parse::<u32>().map(NodeId).map_err(|_| err(format!("invalid node id {s:?}")));
    let src = id(fields[0])?;
    let dst = id(fields[1])?;
    if src == dst {
        return Err(err(format!("self-loop on node {src}")));
    }
    let sign = if layer.is_signed() {
        Some(Sign::parse_token(fields[2]).ok_or_else(|| err(format!("invalid sign token {:?}", fields[2])))?)
    } else {
        None
    };
    Ok(Some(SignedEdge { src, dst, layer, sign, weight: 1 }))
}

/// One `src dst [sign]` line of a pairs file.
pub type PairLine = (NodeId, NodeId, Option<Sign>);

/// Reads a pairs file: `src dst` or `src dst sign` per line, order kept.
pub fn parse_pairs<R: BufRead>(reader: R) -> Result<Vec<PairLine>> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(format!("reading line {line_no}"), e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let err = |message: String| Error::Parse { line: line_no, message };
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected `src dst [sign]`, found {} fields", fields.len())));
        }
        let id = |s: &str| s.parse::<u32>().map(NodeId).map_err(|_| err(format!("invalid node id {s:?}")));
        let sign = match fields.get(2) {
            Some(t) => Some(Sign::parse_token(t).ok_or_else(|| err(format!("invalid sign token {t:?}")))?),
            None => None,
        };
        pairs.push((id(fields[0])?, id(fields[1])?, sign));
    }
    Ok(pairs)
}
