use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(
        "{name}: declared FC input width {declared} but the architecture computes {computed}; \
         pass the computed-width override to build anyway"
    )]
    FcInputMismatch { name: String, declared: usize, computed: usize },

    #[error("empty training set")]
    EmptyTrainSet,

    #[error("{name} expects {expected}-step recipes but sample {sample} has {got} steps")]
    RecipeLength { name: String, expected: usize, got: usize, sample: String },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Dataset(#[from] dataset::DatasetError),
}

/// Which FC input width to trust when the declared and computed values
/// disagree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FcInputPolicy {
    /// Error out on any mismatch (the default).
    Declared,
    /// Build with the computed width, acknowledging the discrepancy.
    Computed,
}

/// One model hyperparameter bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetConfig {
    pub name: String,
    pub gcn_in: usize,
    pub gcn_l1: usize,
    pub gcn_l2: usize,
    pub vocab: usize,
    pub recipe_len: usize,
    pub embed_dim: usize,
    pub kernels: Vec<usize>,
    pub stride: usize,
    pub declared_fc_input: usize,
    /// Hidden FC widths; the final scalar layer is implicit.
    pub fc_hidden: Vec<usize>,
}

impl NetConfig {
    pub fn net1() -> NetConfig {
        NetConfig {
            name: "net1".into(),
            gcn_in: 4,
            gcn_l1: 128,
            gcn_l2: 128,
            vocab: 7,
            recipe_len: 20,
            embed_dim: 3,
            kernels: vec![6, 9, 12],
            stride: 3,
            declared_fc_input: 310,
            fc_hidden: vec![128, 128],
        }
    }

    pub fn net2() -> NetConfig {
        NetConfig {
            name: "net2".into(),
            gcn_in: 4,
            gcn_l1: 64,
            gcn_l2: 64,
            vocab: 7,
            recipe_len: 20,
            embed_dim: 3,
            kernels: vec![12, 15, 18, 21],
            stride: 3,
            declared_fc_input: 190,
            fc_hidden: vec![512, 512, 512],
        }
    }

    pub fn net3() -> NetConfig {
        NetConfig {
            name: "net3".into(),
            gcn_in: 4,
            gcn_l1: 64,
            gcn_l2: 64,
            vocab: 7,
            recipe_len: 20,
            embed_dim: 3,
            kernels: vec![21, 24, 27, 30],
            stride: 3,
            declared_fc_input: 190,
            fc_hidden: vec![512, 512, 512],
        }
    }

    pub fn by_name(name: &str) -> Option<NetConfig> {
        match name {
            "net1" => Some(NetConfig::net1()),
            "net2" => Some(NetConfig::net2()),
            "net3" => Some(NetConfig::net3()),
            _ => None,
        }
    }

    pub fn recipe_input_len(&self) -> usize {
        self.recipe_len * self.embed_dim
    }

    /// FC input width from the architecture itself: pooled graph embedding
    /// (max+mean of the second GCN layer) plus every conv filter's output
    /// count. Never hard-coded.
    pub fn computed_fc_input(&self) -> usize {
        let conv: usize = self
            .kernels
            .iter()
            .map(|&k| (self.recipe_input_len() - k) / self.stride + 1)
            .sum();
        2 * self.gcn_l2 + conv
    }

    /// The width actually used to build, per policy.
    pub fn resolve_fc_input(&self, policy: FcInputPolicy) -> Result<usize, ModelError> {
        let computed = self.computed_fc_input();
        if computed != self.declared_fc_input && policy == FcInputPolicy::Declared {
            return Err(ModelError::FcInputMismatch {
                name: self.name.clone(),
                declared: self.declared_fc_input,
                computed,
            });
        }
        Ok(computed)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Validation cadence in epochs (when a validation set is supplied).
    pub eval_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { batch_size: 64, lr: 1e-3, epochs: 80, seed: 0, eval_every: 1 }
    }
}
