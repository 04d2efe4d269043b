//! Minimal dense-tensor numerical core with reverse-mode differentiation.
//!
//! Everything is 64-bit and single-threaded with fixed reduction order, so
//! training runs are bit-reproducible from their seeds. The layer set is
//! exactly what the graph regression models need: graph convolution with
//! batch normalization, global max+mean pooling, a strided 1D convolution
//! bank, fully connected layers, a step embedding, Adam, and MSE.

mod adam;
mod checkpoint;
mod init;
mod layers;
mod sparse;
mod tensor;

pub use adam::Adam;
pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointEntry};
pub use init::glorot_uniform;
pub use layers::{
    global_max_mean_pool, mse, BatchNorm, Conv1dBank, Embedding, GcnLayer, Linear,
};
pub use sparse::{normalized_adjacency, CsrMatrix};
pub use tensor::{backward, Tensor};
