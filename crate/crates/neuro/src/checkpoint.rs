//! Checkpoint format: one JSON header line (dtype, config echo, parameter
//! names and shapes) followed by the little-endian f64 arrays concatenated
//! in header order.

use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckpointEntry {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    dtype: String,
    config: serde_json::Value,
    params: Vec<CheckpointEntry>,
}

pub fn save_checkpoint(
    path: &Path,
    entries: &[(String, Vec<usize>, Vec<f64>)],
    config: serde_json::Value,
) -> io::Result<()> {
    let header = Header {
        dtype: "f64".to_string(),
        config,
        params: entries
            .iter()
            .map(|(name, shape, data)| {
                assert_eq!(shape.iter().product::<usize>(), data.len());
                CheckpointEntry { name: name.clone(), shape: shape.clone() }
            })
            .collect(),
    };
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer(&mut file, &header)?;
    file.write_all(b"\n")?;
    for (_, _, data) in entries {
        for v in data {
            file.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// (name, shape, data) triples in header order.
pub type TensorEntries = Vec<(String, Vec<usize>, Vec<f64>)>;

pub fn load_checkpoint(path: &Path) -> io::Result<(serde_json::Value, TensorEntries)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "missing header line"))?;
    let header: Header = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    if header.dtype != "f64" {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "unsupported dtype"));
    }
    let mut pos = newline + 1;
    let mut out = Vec::with_capacity(header.params.len());
    for entry in header.params {
        let len: usize = entry.shape.iter().product();
        let need = len * 8;
        if pos + need > bytes.len() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "truncated tensor data"));
        }
        let data: Vec<f64> = bytes[pos..pos + need]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        pos += need;
        out.push((entry.name, entry.shape, data));
    }
    Ok((header.config, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_bytes() {
        let dir = std::env::temp_dir().join("neuro_ckpt_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("model.ckpt");
        let entries = vec![
            ("w".to_string(), vec![2, 2], vec![1.0, -0.5, 0.25, 3.0]),
            ("b".to_string(), vec![2], vec![0.0, 1e-9]),
        ];
        let config = serde_json::json!({"net": "net1", "seed": 7});
        save_checkpoint(&path, &entries, config.clone()).unwrap();
        let (config2, loaded) = load_checkpoint(&path).unwrap();
        assert_eq!(config, config2);
        assert_eq!(entries, loaded);
        // Byte-identical on rewrite.
        let first = std::fs::read(&path).unwrap();
        save_checkpoint(&path, &entries, config).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
    }
}
