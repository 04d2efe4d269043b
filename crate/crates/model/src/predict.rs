use std::path::Path;
use std::sync::Arc;

use aig::bench::{ast_to_aig, parse_bench};
use dataset::{encode_graph, DataSample, SampleKey};
use opt::{strash, Recipe};

use crate::config::ModelError;
use crate::net::Model;

/// Full single-query path: parse the netlist, strash it, encode, and run
/// one eval-mode forward pass. Returns the predicted normalized node
/// count.
pub fn predict(model: &Model, design: &Path, recipe: &Recipe) -> Result<f64, ModelError> {
    if recipe.steps.len() != model.cfg.recipe_len {
        return Err(ModelError::RecipeLength {
            name: model.cfg.name.clone(),
            expected: model.cfg.recipe_len,
            got: recipe.steps.len(),
            sample: format!("recipe {}", recipe.id),
        });
    }
    let text = std::fs::read_to_string(design)?;
    let name = design.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let ast = parse_bench(&text)
        .map_err(|e| ModelError::Checkpoint(format!("parse {}: {e}", design.display())))?;
    let g = ast_to_aig(&ast)
        .map_err(|e| ModelError::Checkpoint(format!("lower {}: {e}", design.display())))?;
    let baseline = strash(&g);
    let sample = DataSample {
        key: SampleKey { design: name, recipe_id: recipe.id },
        graph: Arc::new(encode_graph(&baseline)),
        recipe: recipe.encode(),
        target: f64::NAN,
    };
    Ok(model.forward_batch(&[&sample], false).item())
}
