//! Predictor assembly, training, and evaluation for the two node-count
//! regression tasks.

mod config;
mod net;
mod predict;
mod train;

pub use config::{FcInputPolicy, ModelError, NetConfig, TrainConfig};
pub use net::{build_model, load_model, Model};
pub use predict::predict;
pub use train::{check_recipe_lengths, evaluate, mean_baseline_mse, train, TrainReport};
