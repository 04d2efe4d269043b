//! The generation pipeline: strash each design once as the baseline, run
//! every recipe step by step, store each intermediate graph as GraphML,
//! and append one label record per step. Fully deterministic from the
//! seed; a manifest with content digests makes reruns comparable.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use aig::bench::{ast_to_aig, parse_bench};
use aig::graphml::export_graphml;
use aig::Aig;
use opt::{apply_sequence_trace, sample_recipes, strash, Recipe, TransformContext};

use crate::error::DatasetError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignSpec {
    pub path: PathBuf,
    pub name: String,
    #[serde(default = "default_function_class")]
    pub function_class: String,
}

fn default_function_class() -> String {
    "unknown".to_string()
}

/// Reads a designs manifest (JSON array of `{path, name, function_class}`)
/// and resolves relative paths against the manifest's directory.
pub fn load_designs_manifest(path: &Path) -> Result<Vec<DesignSpec>, DatasetError> {
    let text = std::fs::read_to_string(path)?;
    let mut designs: Vec<DesignSpec> = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    for d in &mut designs {
        if d.path.is_relative() {
            d.path = base.join(&d.path);
        }
    }
    Ok(designs)
}

/// One line of `labels.jsonl`. Key order is fixed by declaration order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LabelRecord {
    pub design: String,
    pub recipe_id: u32,
    pub step: usize,
    pub pi: usize,
    pub po: usize,
    pub nodes: usize,
    pub edges: usize,
    pub inverted_edges: usize,
    pub depth: usize,
    pub function_class: String,
    pub final_nodes: usize,
    /// `final_nodes / baseline nodes`; 1.0 for a zero-node baseline.
    pub label: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub recipes: usize,
    pub length: usize,
    pub seed: u64,
    #[serde(default)]
    pub force: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignOutput {
    pub name: String,
    pub function_class: String,
    pub status: String,
    pub baseline_nodes: usize,
    pub baseline: Option<FileDigest>,
    pub labels: Option<FileDigest>,
    pub files: Vec<FileDigest>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub recipes: usize,
    pub length: usize,
    pub seed: u64,
    /// Echo of the effective configuration for reproducibility.
    pub config: serde_json::Value,
    pub partial: bool,
    pub designs: Vec<DesignOutput>,
}

fn digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn write_file(outdir: &Path, rel: &str, bytes: &[u8]) -> Result<FileDigest, DatasetError> {
    let full = outdir.join(rel);
    if let Some(parent) = full.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&full, bytes)?;
    Ok(FileDigest { path: rel.to_string(), sha256: digest(bytes) })
}

fn record_for(design: &DesignSpec, recipe_id: u32, step: usize, g: &Aig) -> LabelRecord {
    let s = g.stats();
    LabelRecord {
        design: design.name.clone(),
        recipe_id,
        step,
        pi: s.pi,
        po: s.po,
        nodes: s.nodes,
        edges: s.edges,
        inverted_edges: s.inverted_edges,
        depth: s.depth,
        function_class: design.function_class.clone(),
        final_nodes: 0,
        label: 0.0,
    }
}

/// Runs the pipeline into `outdir`. Per design: parse and lower (errors
/// are recorded in the manifest and the run continues), strash once as the
/// step-0 baseline, then apply each recipe step by step, writing
/// `<design>_syn<rid>_step<s>.graphml` for every step and one label line
/// per step (step 0 references the shared baseline file). `(design,
/// recipe)` jobs run on the rayon pool; outputs are deterministic
/// regardless of thread count.
pub fn run_pipeline(
    designs: &[DesignSpec],
    cfg: &PipelineConfig,
    cx: &TransformContext,
    outdir: &Path,
) -> Result<Manifest, DatasetError> {
    let manifest_path = outdir.join("manifest.json");
    if manifest_path.exists() && !cfg.force {
        return Err(DatasetError::WouldOverwrite(manifest_path));
    }
    std::fs::create_dir_all(outdir)?;
    let recipes = sample_recipes(cfg.recipes, cfg.length, cfg.seed);

    let mut manifest = Manifest {
        recipes: cfg.recipes,
        length: cfg.length,
        seed: cfg.seed,
        config: serde_json::json!({
            "recipes": cfg.recipes,
            "length": cfg.length,
            "seed": cfg.seed,
            "designs": designs.iter().map(|d| d.name.clone()).collect::<Vec<_>>(),
        }),
        partial: false,
        designs: Vec::new(),
    };

    for design in designs {
        match run_design(design, &recipes, cx, outdir) {
            Ok(output) => manifest.designs.push(output),
            Err(DatasetError::Netlist { design: name, message }) => {
                manifest.designs.push(DesignOutput {
                    name,
                    function_class: design.function_class.clone(),
                    status: format!("error: {message}"),
                    baseline_nodes: 0,
                    baseline: None,
                    labels: None,
                    files: Vec::new(),
                });
            }
            Err(e) => {
                // Disk trouble mid-run: leave a partial manifest behind.
                manifest.partial = true;
                let _ = std::fs::write(
                    &manifest_path,
                    serde_json::to_string_pretty(&manifest).unwrap_or_default(),
                );
                return Err(e);
            }
        }
    }
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

fn run_design(
    design: &DesignSpec,
    recipes: &[Recipe],
    cx: &TransformContext,
    outdir: &Path,
) -> Result<DesignOutput, DatasetError> {
    let text = std::fs::read_to_string(&design.path).map_err(|e| DatasetError::Netlist {
        design: design.name.clone(),
        message: format!("{}: {e}", design.path.display()),
    })?;
    let ast = parse_bench(&text).map_err(|e| DatasetError::Netlist {
        design: design.name.clone(),
        message: e.to_string(),
    })?;
    let raw = ast_to_aig(&ast).map_err(|e| DatasetError::Netlist {
        design: design.name.clone(),
        message: e.to_string(),
    })?;
    let baseline = strash(&raw);
    let baseline_nodes = baseline.num_ands();

    let baseline_file =
        write_file(outdir, &format!("{}/step0.graphml", design.name), export_graphml(&baseline).as_bytes())?;

    // Per-recipe jobs are independent; each writes only its own files.
    type RecipeOutput = Result<(Vec<FileDigest>, Vec<LabelRecord>), DatasetError>;
    let results: Vec<RecipeOutput> = recipes
        .par_iter()
        .map(|recipe| {
            let trace = apply_sequence_trace(&baseline, &recipe.steps, cx);
            let final_nodes = trace.last().map_or(baseline_nodes, |g| g.num_ands());
            let label = if baseline_nodes == 0 {
                1.0
            } else {
                final_nodes as f64 / baseline_nodes as f64
            };
            let mut records = Vec::with_capacity(trace.len() + 1);
            records.push(record_for(design, recipe.id, 0, &baseline));
            let mut files = Vec::with_capacity(trace.len());
            for (i, g) in trace.iter().enumerate() {
                let rel = format!("{}/{}_syn{}_step{}.graphml", design.name, design.name, recipe.id, i + 1);
                files.push(write_file(outdir, &rel, export_graphml(g).as_bytes())?);
                records.push(record_for(design, recipe.id, i + 1, g));
            }
            for r in &mut records {
                r.final_nodes = final_nodes;
                r.label = label;
            }
            Ok((files, records))
        })
        .collect();

    let mut files = Vec::new();
    let mut lines = String::new();
    for result in results {
        let (recipe_files, records) = result?;
        files.extend(recipe_files);
        for r in &records {
            lines.push_str(&serde_json::to_string(r)?);
            lines.push('\n');
        }
    }
    let labels_file = write_file(outdir, &format!("{}/labels.jsonl", design.name), lines.as_bytes())?;

    Ok(DesignOutput {
        name: design.name.clone(),
        function_class: design.function_class.clone(),
        status: "ok".to_string(),
        baseline_nodes,
        baseline: Some(baseline_file),
        labels: Some(labels_file),
        files,
    })
}

/// Loads a `labels.jsonl` file.
pub fn load_labels(path: &Path) -> Result<Vec<LabelRecord>, DatasetError> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(DatasetError::Json))
        .collect()
}

type LoadedSamples = (Manifest, Vec<crate::samples::DataSample>);

/// Reconstructs the sample set from a pipeline output directory: the
/// manifest fixes the recipe stream, each design contributes its stored
/// labels and baseline encoding.
pub fn load_samples(outdir: &Path) -> Result<LoadedSamples, DatasetError> {
    let manifest: Manifest =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("manifest.json"))?)?;
    let recipe_vectors: std::collections::BTreeMap<u32, Vec<u8>> =
        sample_recipes(manifest.recipes, manifest.length, manifest.seed)
            .iter()
            .map(|r| (r.id, r.encode()))
            .collect();
    let mut records = Vec::new();
    let mut encodings = std::collections::BTreeMap::new();
    for design in manifest.designs.iter().filter(|d| d.status == "ok") {
        records.extend(load_labels(&outdir.join(format!("{}/labels.jsonl", design.name)))?);
        let text = std::fs::read_to_string(outdir.join(format!("{}/step0.graphml", design.name)))?;
        encodings.insert(
            design.name.clone(),
            std::sync::Arc::new(crate::reader::read_graphml(&text)?),
        );
    }
    let samples = crate::samples::make_samples(&records, &recipe_vectors, &encodings)?;
    Ok((manifest, samples))
}
