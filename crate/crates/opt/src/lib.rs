//! The synthesis action set: function-preserving AIG transformations,
//! cut-based rewriting backed by a precomputed structure library, and the
//! recipe machinery built on top of the action vocabulary.

mod action;
mod analysis;
mod balance;
mod cuts;
mod library;
mod npn;
mod refactor;
mod rewrite;
mod transform;

pub mod recipes;
pub mod similarity;

pub use action::Action;
pub use analysis::mffc_size;
pub use balance::balance;
pub use cuts::{enumerate_cuts, Cut, CutConfig};
pub use library::{build_rewrite_library, LibraryError, RewriteLibrary, Template, TemplateRef};
pub use npn::{npn_canonicalize, NpnTransform};
pub use refactor::{refactor, RefactorConfig};
pub use rewrite::{rewrite, RewriteConfig};
pub use transform::{apply, apply_sequence, apply_sequence_trace, strash, sweep, TransformContext};

pub use recipes::{sample_recipes, Recipe, RecipeError, DEFAULT_RECIPE_LEN};
pub use similarity::{top_k_similarity, SimilarityError, SimilarityMatrix};
