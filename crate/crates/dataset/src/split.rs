//! Train/test splitting for the two prediction tasks.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::DatasetError;
use crate::samples::DataSample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitMode {
    /// Recipes partitioned 2:1 by seeded shuffle; every design appears on
    /// both sides (the transductive task).
    UnseenRecipe,
    /// Designs sorted by baseline size; the smaller two thirds train and
    /// the larger third is held out (the inductive task).
    UnseenDesign,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SplitSpec {
    pub mode: SplitMode,
    pub seed: u64,
}

/// Partitions samples according to `spec`. Sample order within each side follows the
/// input order.
pub fn split(
    samples: &[DataSample],
    spec: &SplitSpec,
) -> Result<(Vec<DataSample>, Vec<DataSample>), DatasetError> {
    match spec.mode {
        SplitMode::UnseenRecipe => {
            let mut recipe_ids: Vec<u32> =
                samples.iter().map(|s| s.key.recipe_id).collect::<BTreeSet<_>>().into_iter().collect();
            if recipe_ids.len() < 2 {
                return Err(DatasetError::BadSplit("need at least 2 recipes".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            recipe_ids.shuffle(&mut rng);
            let train_count = recipe_ids.len() * 2 / 3;
            let train_set: BTreeSet<u32> = recipe_ids[..train_count].iter().copied().collect();
            Ok(partition(samples, |s| train_set.contains(&s.key.recipe_id)))
        }
        SplitMode::UnseenDesign => {
            let mut designs: Vec<(usize, String)> = samples
                .iter()
                .map(|s| (s.graph.and_node_count(), s.key.design.clone()))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if designs.len() < 3 {
                return Err(DatasetError::BadSplit(format!(
                    "unseen-design split needs at least 3 designs, got {}",
                    designs.len()
                )));
            }
            designs.sort(); // by baseline node count, then name
            let train_count = ((2 * designs.len()).div_ceil(3)).min(designs.len() - 1);
            let train_set: BTreeSet<&str> =
                designs[..train_count].iter().map(|(_, d)| d.as_str()).collect();
            Ok(partition(samples, |s| train_set.contains(s.key.design.as_str())))
        }
    }
}

fn partition(
    samples: &[DataSample],
    is_train: impl Fn(&DataSample) -> bool,
) -> (Vec<DataSample>, Vec<DataSample>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for s in samples {
        if is_train(s) {
            train.push(s.clone());
        } else {
            test.push(s.clone());
        }
    }
    (train, test)
}

/// On-disk split: sample keys per side plus the spec that produced them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitFile {
    pub mode: SplitMode,
    pub seed: u64,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

pub fn save_split(
    path: &Path,
    spec: &SplitSpec,
    train: &[DataSample],
    test: &[DataSample],
) -> Result<(), DatasetError> {
    let file = SplitFile {
        mode: spec.mode,
        seed: spec.seed,
        train: train.iter().map(|s| s.key.to_string()).collect(),
        test: test.iter().map(|s| s.key.to_string()).collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_split(path: &Path) -> Result<SplitFile, DatasetError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
