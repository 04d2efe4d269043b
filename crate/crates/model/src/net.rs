use std::path::Path;
use std::rc::Rc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dataset::{DataSample, GraphEncoding, NODE_FEATURE_DIM};
use neuro::{
    global_max_mean_pool, load_checkpoint, normalized_adjacency, save_checkpoint, Conv1dBank,
    Embedding, GcnLayer, Linear, Tensor,
};

use crate::config::{FcInputPolicy, ModelError, NetConfig};

/// Two GCN layers over the graph, a step embedding plus convolution bank
/// over the recipe, concatenated into an FC regression head.
pub struct Model {
    pub cfg: NetConfig,
    pub gcn1: GcnLayer,
    pub gcn2: GcnLayer,
    pub embedding: Embedding,
    pub conv: Conv1dBank,
    pub fcs: Vec<Linear>,
}

/// Builds a model with seeded Glorot-uniform weights and zero biases.
pub fn build_model(cfg: &NetConfig, policy: FcInputPolicy, seed: u64) -> Result<Model, ModelError> {
    let fc_input = cfg.resolve_fc_input(policy)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gcn1 = GcnLayer::new(&mut rng, cfg.gcn_in, cfg.gcn_l1);
    let gcn2 = GcnLayer::new(&mut rng, cfg.gcn_l1, cfg.gcn_l2);
    let embedding = Embedding::new(&mut rng, cfg.vocab, cfg.embed_dim);
    let conv = Conv1dBank::new(&mut rng, cfg.kernels.clone(), cfg.stride);
    let mut fcs = Vec::new();
    let mut width = fc_input;
    for &h in &cfg.fc_hidden {
        fcs.push(Linear::new(&mut rng, width, h));
        width = h;
    }
    fcs.push(Linear::new(&mut rng, width, 1));
    Ok(Model { cfg: cfg.clone(), gcn1, gcn2, embedding, conv, fcs })
}

impl Model {
    /// All trainable parameters with stable names, in a fixed order.
    pub fn named_params(&self) -> Vec<(String, Tensor)> {
        let mut out = Vec::new();
        for (prefix, gcn) in [("gcn1", &self.gcn1), ("gcn2", &self.gcn2)] {
            out.push((format!("{prefix}.weight"), gcn.linear.weight.clone()));
            out.push((format!("{prefix}.bias"), gcn.linear.bias.clone()));
            out.push((format!("{prefix}.bn.gamma"), gcn.bn.gamma.clone()));
            out.push((format!("{prefix}.bn.beta"), gcn.bn.beta.clone()));
        }
        out.push(("embedding.table".to_string(), self.embedding.table.clone()));
        for (i, (w, b)) in self.conv.weights.iter().zip(&self.conv.biases).enumerate() {
            out.push((format!("conv{i}.weight"), w.clone()));
            out.push((format!("conv{i}.bias"), b.clone()));
        }
        for (i, fc) in self.fcs.iter().enumerate() {
            out.push((format!("fc{i}.weight"), fc.weight.clone()));
            out.push((format!("fc{i}.bias"), fc.bias.clone()));
        }
        out
    }

    pub fn params(&self) -> Vec<Tensor> {
        self.named_params().into_iter().map(|(_, t)| t).collect()
    }

    /// Batched forward pass: graphs are combined block-diagonally and the
    /// recipe branch is stacked row-wise. Returns `[batch x 1]`.
    pub fn forward_batch(&self, batch: &[&DataSample], training: bool) -> Tensor {
        assert!(!batch.is_empty());
        let mut features = Vec::new();
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut segments = Vec::new();
        let mut offset = 0u32;
        for (gi, sample) in batch.iter().enumerate() {
            let g: &GraphEncoding = &sample.graph;
            features.extend_from_slice(&g.node_features);
            edges.extend(g.edge_index.iter().map(|&(s, t)| (s + offset, t + offset)));
            segments.extend(std::iter::repeat_n(gi, g.num_nodes));
            offset += g.num_nodes as u32;
        }
        let num_nodes = offset as usize;
        let x = Tensor::from_vec(vec![num_nodes, NODE_FEATURE_DIM], features);
        let adj = normalized_adjacency(num_nodes, &edges);

        let h = self.gcn1.forward(&adj, &x, training);
        let h = self.gcn2.forward(&adj, &h, training);
        let pooled = global_max_mean_pool(&h, &Rc::new(segments), batch.len());

        let ids: Vec<Vec<u8>> = batch.iter().map(|s| s.recipe.clone()).collect();
        let recipe = self.conv.forward(&self.embedding.forward(&ids));

        let mut joint = Tensor::concat_cols(&[pooled, recipe]);
        for (i, fc) in self.fcs.iter().enumerate() {
            joint = fc.forward(&joint);
            if i + 1 < self.fcs.len() {
                joint = joint.relu();
            }
        }
        joint
    }

    /// Checkpoint: every parameter plus the BN running statistics, with
    /// the config echoed into the header.
    pub fn save(&self, path: &Path, extra: serde_json::Value) -> Result<(), ModelError> {
        let mut entries: Vec<(String, Vec<usize>, Vec<f64>)> = self
            .named_params()
            .into_iter()
            .map(|(name, t)| (name, t.shape().to_vec(), t.to_vec()))
            .collect();
        for (prefix, gcn) in [("gcn1", &self.gcn1), ("gcn2", &self.gcn2)] {
            let rm = gcn.bn.running_mean.borrow().clone();
            let rv = gcn.bn.running_var.borrow().clone();
            entries.push((format!("{prefix}.bn.running_mean"), vec![rm.len()], rm));
            entries.push((format!("{prefix}.bn.running_var"), vec![rv.len()], rv));
        }
        let config = serde_json::json!({ "net": self.cfg, "extra": extra });
        save_checkpoint(path, &entries, config)?;
        Ok(())
    }
}

/// Rebuilds a model from a checkpoint written by [`Model::save`].
pub fn load_model(path: &Path) -> Result<Model, ModelError> {
    let (config, entries) = load_checkpoint(path)?;
    let cfg: NetConfig = serde_json::from_value(
        config.get("net").cloned().ok_or_else(|| ModelError::Checkpoint("missing net config".into()))?,
    )?;
    let model = build_model(&cfg, FcInputPolicy::Computed, 0)?;
    let mut by_name: std::collections::BTreeMap<String, (Vec<usize>, Vec<f64>)> =
        entries.into_iter().map(|(n, s, d)| (n, (s, d))).collect();
    for (name, tensor) in model.named_params() {
        let (shape, data) = by_name
            .remove(&name)
            .ok_or_else(|| ModelError::Checkpoint(format!("missing tensor {name}")))?;
        if shape != tensor.shape() {
            return Err(ModelError::Checkpoint(format!(
                "{name}: shape {shape:?} does not match {:?}",
                tensor.shape()
            )));
        }
        tensor.set_values(&data);
    }
    for (prefix, gcn) in [("gcn1", &model.gcn1), ("gcn2", &model.gcn2)] {
        let (_, rm) = by_name
            .remove(&format!("{prefix}.bn.running_mean"))
            .ok_or_else(|| ModelError::Checkpoint(format!("missing {prefix} running mean")))?;
        let (_, rv) = by_name
            .remove(&format!("{prefix}.bn.running_var"))
            .ok_or_else(|| ModelError::Checkpoint(format!("missing {prefix} running var")))?;
        *gcn.bn.running_mean.borrow_mut() = rm;
        *gcn.bn.running_var.borrow_mut() = rv;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dataset::{encode_graph, SampleKey};
    use std::sync::Arc;

    fn sample(n_ands: usize, seed: u64) -> DataSample {
        let mut g = aig::Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let mut lit = a;
        let mut rng = aig::SplitMix64(seed);
        for _ in 0..n_ands {
            let other = [a, b, c][rng.next_u64() as usize % 3];
            lit = g.add_and(lit.xor(rng.next_u64() & 1 != 0), other.xor(rng.next_u64() & 1 != 0));
        }
        g.add_output("y", lit);
        let recipe: Vec<u8> = (0..20).map(|_| (rng.next_u64() % 7) as u8).collect();
        DataSample {
            key: SampleKey { design: format!("s{seed}"), recipe_id: seed as u32 },
            graph: Arc::new(encode_graph(&g)),
            recipe,
            target: 0.5,
        }
    }

    #[test]
    fn forward_is_scalar_for_tiny_and_large_graphs() {
        let model = build_model(&NetConfig::net1(), FcInputPolicy::Declared, 1).unwrap();
        for n in [1usize, 500] {
            let s = sample(n, n as u64);
            let out = model.forward_batch(&[&s], false);
            assert_eq!(out.shape(), &[1, 1]);
            assert!(out.item().is_finite());
        }
    }

    #[test]
    fn batched_forward_keeps_rows_aligned() {
        let model = build_model(&NetConfig::net2(), FcInputPolicy::Declared, 2).unwrap();
        let a = sample(5, 1);
        let b = sample(9, 2);
        let joint = model.forward_batch(&[&a, &b], false).to_vec();
        let ja = model.forward_batch(&[&a], false).item();
        let jb = model.forward_batch(&[&b], false).item();
        assert!((joint[0] - ja).abs() < 1e-9);
        assert!((joint[1] - jb).abs() < 1e-9);
    }

    #[test]
    fn same_seed_builds_identical_models() {
        let m1 = build_model(&NetConfig::net1(), FcInputPolicy::Declared, 7).unwrap();
        let m2 = build_model(&NetConfig::net1(), FcInputPolicy::Declared, 7).unwrap();
        for ((n1, t1), (n2, t2)) in m1.named_params().iter().zip(m2.named_params().iter()) {
            assert_eq!(n1, n2);
            assert_eq!(t1.to_vec(), t2.to_vec());
        }
    }

    #[test]
    fn net3_requires_the_override() {
        assert!(build_model(&NetConfig::net3(), FcInputPolicy::Declared, 0).is_err());
        let m = build_model(&NetConfig::net3(), FcInputPolicy::Computed, 0).unwrap();
        assert_eq!(m.fcs[0].weight.shape()[0], 178);
    }

    #[test]
    fn checkpoint_round_trip_preserves_predictions() {
        let dir = std::env::temp_dir().join(format!("aigkit_model_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("net1.ckpt");
        let model = build_model(&NetConfig::net1(), FcInputPolicy::Declared, 3).unwrap();
        let s = sample(12, 9);
        let before = model.forward_batch(&[&s], false).item();
        model.save(&path, serde_json::json!({"seed": 3})).unwrap();
        let loaded = load_model(&path).unwrap();
        let after = loaded.forward_batch(&[&s], false).item();
        assert_eq!(before.to_bits(), after.to_bits());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
