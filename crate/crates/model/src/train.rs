use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dataset::{DataSample, SampleKey};
use neuro::{backward, mse, Adam, Tensor};

use crate::config::{ModelError, TrainConfig};
use crate::net::Model;

#[derive(Clone, Debug, Default)]
pub struct TrainReport {
    /// Mean training MSE per epoch.
    pub train_loss: Vec<f64>,
    /// (epoch, validation MSE) at the configured cadence.
    pub val_mse: Vec<(usize, f64)>,
}

/// Trains in place: seeded shuffling each epoch, Adam on MSE, fixed batch
/// assembly order. Identical (model seed, data, config) reproduce the loss
/// curve bit for bit.
pub fn train(
    model: &Model,
    samples: &[DataSample],
    cfg: &TrainConfig,
    val: Option<&[DataSample]>,
) -> Result<TrainReport, ModelError> {
    if samples.is_empty() {
        return Err(ModelError::EmptyTrainSet);
    }
    check_recipe_lengths(model, samples)?;
    let params = model.params();
    let mut optimizer = Adam::new(cfg.lr);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut report = TrainReport::default();

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&DataSample> = chunk.iter().map(|&i| &samples[i]).collect();
            let targets =
                Tensor::from_vec(vec![batch.len(), 1], batch.iter().map(|s| s.target).collect());
            let pred = model.forward_batch(&batch, true);
            let loss = mse(&pred, &targets);
            epoch_loss += loss.item() * batch.len() as f64;
            backward(&loss);
            optimizer.step(&params);
        }
        report.train_loss.push(epoch_loss / samples.len() as f64);
        if let Some(val_set) = val {
            if cfg.eval_every > 0 && (epoch + 1) % cfg.eval_every == 0 {
                let (val_mse, _) = evaluate(model, val_set);
                report.val_mse.push((epoch + 1, val_mse));
            }
        }
    }
    Ok(report)
}

/// Samples must match the model's recipe length; catching it here keeps
/// the failure a data error rather than a shape panic mid-batch.
pub fn check_recipe_lengths(model: &Model, samples: &[DataSample]) -> Result<(), ModelError> {
    for s in samples {
        if s.recipe.len() != model.cfg.recipe_len {
            return Err(ModelError::RecipeLength {
                name: model.cfg.name.clone(),
                expected: model.cfg.recipe_len,
                got: s.recipe.len(),
                sample: s.key.to_string(),
            });
        }
    }
    Ok(())
}

/// Eval-mode MSE plus per-sample predictions for scatter plots.
pub fn evaluate(model: &Model, samples: &[DataSample]) -> (f64, Vec<(SampleKey, f64, f64)>) {
    if samples.is_empty() {
        return (0.0, Vec::new());
    }
    let mut rows = Vec::with_capacity(samples.len());
    let mut sq_sum = 0.0;
    for chunk in samples.chunks(64) {
        let batch: Vec<&DataSample> = chunk.iter().collect();
        let pred = model.forward_batch(&batch, false);
        for (s, &p) in chunk.iter().zip(pred.values().iter()) {
            sq_sum += (p - s.target) * (p - s.target);
            rows.push((s.key.clone(), p, s.target));
        }
    }
    (sq_sum / samples.len() as f64, rows)
}

/// MSE of the constant predictor that always answers the training mean.
pub fn mean_baseline_mse(train: &[DataSample], test: &[DataSample]) -> f64 {
    if train.is_empty() || test.is_empty() {
        return 0.0;
    }
    let mean = train.iter().map(|s| s.target).sum::<f64>() / train.len() as f64;
    test.iter().map(|s| (s.target - mean) * (s.target - mean)).sum::<f64>() / test.len() as f64
}
