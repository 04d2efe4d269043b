//! Model-ready samples: the step-0 graph encoding paired with the full
//! recipe vector and the final normalized node count.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::DatasetError;
use crate::features::GraphEncoding;
use crate::pipeline::LabelRecord;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SampleKey {
    pub design: String,
    pub recipe_id: u32,
}

impl fmt::Display for SampleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_syn{}", self.design, self.recipe_id)
    }
}

#[derive(Clone, Debug)]
pub struct DataSample {
    pub key: SampleKey,
    /// Step-0 (baseline) graph encoding, shared across a design's samples.
    pub graph: Arc<GraphEncoding>,
    /// The recipe id vector, one action id per step.
    pub recipe: Vec<u8>,
    /// Final node count over baseline node count.
    pub target: f64,
}

/// Builds one sample per (design, recipe) from the label stream and the
/// per-design baseline encodings. Record order does not matter; output is
/// sorted by (design, recipe id).
pub fn make_samples(
    records: &[LabelRecord],
    recipes: &BTreeMap<u32, Vec<u8>>,
    encodings: &BTreeMap<String, Arc<GraphEncoding>>,
) -> Result<Vec<DataSample>, DatasetError> {
    let mut final_steps: BTreeMap<(String, u32), &LabelRecord> = BTreeMap::new();
    for r in records {
        let key = (r.design.clone(), r.recipe_id);
        match final_steps.get(&key) {
            Some(prev) if prev.step >= r.step => {}
            _ => {
                final_steps.insert(key, r);
            }
        }
    }
    let mut out = Vec::with_capacity(final_steps.len());
    for ((design, recipe_id), record) in final_steps {
        if record.nodes != record.final_nodes {
            return Err(DatasetError::Inconsistent(format!(
                "{design} recipe {recipe_id}: last step has {} nodes but final_nodes is {}",
                record.nodes, record.final_nodes
            )));
        }
        let graph = encodings
            .get(&design)
            .ok_or_else(|| DatasetError::Inconsistent(format!("no encoding for {design}")))?;
        let recipe = recipes
            .get(&recipe_id)
            .ok_or_else(|| DatasetError::Inconsistent(format!("no recipe {recipe_id}")))?;
        out.push(DataSample {
            key: SampleKey { design, recipe_id },
            graph: graph.clone(),
            recipe: recipe.clone(),
            target: record.label,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::encode_graph;

    fn record(design: &str, rid: u32, step: usize, nodes: usize, fin: usize) -> LabelRecord {
        LabelRecord {
            design: design.to_string(),
            recipe_id: rid,
            step,
            pi: 2,
            po: 1,
            nodes,
            edges: 2 * nodes,
            inverted_edges: 0,
            depth: 1,
            function_class: "test".into(),
            final_nodes: fin,
            label: fin as f64 / 4.0,
        }
    }

    fn encoding() -> Arc<GraphEncoding> {
        let mut g = aig::Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let y = g.add_and(a, b);
        g.add_output("y", y);
        Arc::new(encode_graph(&g))
    }

    #[test]
    fn one_sample_per_design_recipe_pair() {
        let mut records = Vec::new();
        for design in ["x", "y", "z"] {
            for rid in 0..2u32 {
                for step in 0..=3 {
                    records.push(record(design, rid, step, 4 - step, 1));
                }
            }
        }
        let recipes: BTreeMap<u32, Vec<u8>> =
            [(0, vec![1u8, 2, 3]), (1, vec![0, 0, 0])].into_iter().collect();
        let encodings: BTreeMap<String, Arc<GraphEncoding>> =
            ["x", "y", "z"].iter().map(|d| (d.to_string(), encoding())).collect();
        let samples = make_samples(&records, &recipes, &encodings).unwrap();
        assert_eq!(samples.len(), 6);
        assert!((samples[0].target - 0.25).abs() < 1e-12);
        assert_eq!(samples[0].key.to_string(), "x_syn0");

        // Shuffled record order gives the same sample set.
        let mut reversed = records.clone();
        reversed.reverse();
        let again = make_samples(&reversed, &recipes, &encodings).unwrap();
        let keys: Vec<String> = samples.iter().map(|s| s.key.to_string()).collect();
        let keys2: Vec<String> = again.iter().map(|s| s.key.to_string()).collect();
        assert_eq!(keys, keys2);
    }

    #[test]
    fn final_step_mismatch_is_detected() {
        let records = vec![record("x", 0, 3, 7, 1)];
        let recipes: BTreeMap<u32, Vec<u8>> = [(0, vec![1u8])].into_iter().collect();
        let encodings: BTreeMap<String, Arc<GraphEncoding>> =
            [("x".to_string(), encoding())].into_iter().collect();
        assert!(matches!(
            make_samples(&records, &recipes, &encodings),
            Err(DatasetError::Inconsistent(_))
        ));
    }
}
