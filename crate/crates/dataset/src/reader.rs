//! Minimal reader for the GraphML subset the exporter writes, used to load
//! stored graphs back into encodings without re-running synthesis.

use std::collections::HashMap;

use crate::error::DatasetError;
use crate::features::GraphEncoding;

fn attr<'a>(line: &'a str, name: &str) -> Option<&'a str> {
    let key = format!("{name}=\"");
    let start = line.find(&key)? + key.len();
    let end = line[start..].find('"')? + start;
    Some(&line[start..end])
}

fn data_value(line: &str, key: &str) -> Option<i64> {
    let tag = format!("<data key=\"{key}\">");
    let start = line.find(&tag)? + tag.len();
    let end = line[start..].find('<')? + start;
    line[start..end].parse().ok()
}

/// Parses one GraphML document into a graph encoding. Node rows keep file
/// order, which for exported graphs is inputs, then ANDs topologically,
/// then output markers.
pub fn read_graphml(text: &str) -> Result<GraphEncoding, DatasetError> {
    let mut enc = GraphEncoding::empty();
    let mut row_of: HashMap<String, u32> = HashMap::new();
    for line in text.lines() {
        let trimmed = line.trim_start();
        if trimmed.starts_with("<node ") {
            let id = attr(trimmed, "id")
                .ok_or_else(|| DatasetError::Graphml("node without id".into()))?;
            let node_type = data_value(trimmed, "d0")
                .ok_or_else(|| DatasetError::Graphml(format!("node {id} missing node_type")))?;
            let ninv = data_value(trimmed, "d1")
                .ok_or_else(|| DatasetError::Graphml(format!("node {id} missing ninv")))?;
            if !(0..=2).contains(&node_type) {
                return Err(DatasetError::Graphml(format!("node {id}: bad type {node_type}")));
            }
            let row = enc.push_node(node_type as usize, ninv as usize);
            if row_of.insert(id.to_string(), row).is_some() {
                return Err(DatasetError::Graphml(format!("duplicate node id {id}")));
            }
        } else if trimmed.starts_with("<edge ") {
            let source = attr(trimmed, "source")
                .ok_or_else(|| DatasetError::Graphml("edge without source".into()))?;
            let target = attr(trimmed, "target")
                .ok_or_else(|| DatasetError::Graphml("edge without target".into()))?;
            let ty = data_value(trimmed, "d2")
                .ok_or_else(|| DatasetError::Graphml("edge missing edge_type".into()))?;
            let s = *row_of
                .get(source)
                .ok_or_else(|| DatasetError::Graphml(format!("unknown source {source}")))?;
            let t = *row_of
                .get(target)
                .ok_or_else(|| DatasetError::Graphml(format!("unknown target {target}")))?;
            enc.edge_index.push((s, t));
            enc.edge_type.push((ty != 0) as u8);
        }
    }
    Ok(enc)
}
