//! End-to-end data synthesis: run recipes over designs, keep every
//! intermediate graph on disk, and turn the results into model-ready
//! samples with train/test splits.

mod error;
mod reader;
mod samples;
mod split;

pub mod features;
pub mod pipeline;

pub use error::DatasetError;
pub use features::{embed_recipe, encode_graph, GraphEncoding, NODE_FEATURE_DIM};
pub use pipeline::{
    load_designs_manifest, load_samples, run_pipeline, DesignSpec, LabelRecord, Manifest,
    PipelineConfig,
};
pub use reader::read_graphml;
pub use samples::{make_samples, DataSample, SampleKey};
pub use split::{load_split, save_split, split, SplitFile, SplitMode, SplitSpec};
