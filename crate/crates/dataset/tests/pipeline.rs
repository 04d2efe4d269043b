//! End-to-end pipeline contract checks on the bundled fixtures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use aig::bench::{ast_to_aig, parse_bench};
use aig::{check_equiv, EquivConfig, EquivVerdict};
use dataset::pipeline::load_labels;
use dataset::{
    encode_graph, make_samples, read_graphml, run_pipeline, split, DesignSpec, PipelineConfig,
    SplitMode, SplitSpec,
};
use opt::{apply_sequence, sample_recipes, strash, TransformContext};

fn fixture(name: &str) -> DesignSpec {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    DesignSpec {
        path: dir.join(format!("{name}.bench")),
        name: name.to_string(),
        function_class: "test".to_string(),
    }
}

fn load_aig(path: &Path) -> aig::Aig {
    let text = std::fs::read_to_string(path).unwrap();
    ast_to_aig(&parse_bench(&text).unwrap()).unwrap()
}

fn context() -> &'static TransformContext {
    static CX: std::sync::OnceLock<TransformContext> = std::sync::OnceLock::new();
    CX.get_or_init(TransformContext::with_defaults)
}

fn temp_out(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("aigkit_pipeline_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn file_and_record_arithmetic_matches_the_contract() {
    let cx = context();
    let designs = [fixture("fulladder")];
    let cfg = PipelineConfig { recipes: 2, length: 3, seed: 11, force: false };
    let out = temp_out("arith");
    let manifest = run_pipeline(&designs, &cfg, cx, &out).unwrap();
    assert_eq!(manifest.designs.len(), 1);
    let d = &manifest.designs[0];
    assert_eq!(d.status, "ok");
    // K x L step files plus the shared baseline.
    assert_eq!(d.files.len(), 2 * 3);
    assert!(d.baseline.is_some());
    let records = load_labels(&out.join("fulladder/labels.jsonl")).unwrap();
    assert_eq!(records.len(), 2 * (3 + 1));
    for r in &records {
        assert!(r.label > 0.0 && r.label <= 1.0, "label {}", r.label);
        assert_eq!(r.pi, 3);
        assert_eq!(r.po, 2);
        assert_eq!(r.edges, 2 * r.nodes);
    }
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn rerun_with_same_seed_is_byte_identical() {
    let cx = context();
    let designs = [fixture("c17"), fixture("redundant1")];
    let cfg = PipelineConfig { recipes: 3, length: 5, seed: 7, force: false };
    let out1 = temp_out("det1");
    let out2 = temp_out("det2");
    let m1 = run_pipeline(&designs, &cfg, cx, &out1).unwrap();
    let m2 = run_pipeline(&designs, &cfg, cx, &out2).unwrap();
    let digests = |m: &dataset::Manifest| -> Vec<(String, String)> {
        m.designs
            .iter()
            .flat_map(|d| {
                d.files
                    .iter()
                    .chain(d.baseline.iter())
                    .chain(d.labels.iter())
                    .map(|f| (f.path.clone(), f.sha256.clone()))
            })
            .collect()
    };
    assert_eq!(digests(&m1), digests(&m2));
    assert_eq!(
        serde_json::to_string(&m1.config).unwrap(),
        serde_json::to_string(&m2.config).unwrap()
    );
    std::fs::remove_dir_all(&out1).unwrap();
    std::fs::remove_dir_all(&out2).unwrap();
}

#[test]
fn labels_match_an_independent_replay() {
    let cx = context();
    let designs = [fixture("redundant2")];
    let cfg = PipelineConfig { recipes: 4, length: 6, seed: 3, force: false };
    let out = temp_out("replay");
    run_pipeline(&designs, &cfg, cx, &out).unwrap();
    let records = load_labels(&out.join("redundant2/labels.jsonl")).unwrap();

    let baseline = strash(&load_aig(&designs[0].path));
    let recipes = sample_recipes(4, 6, 3);
    for recipe in &recipes {
        let replay = apply_sequence(&baseline, &recipe.steps, cx);
        let last = records
            .iter()
            .find(|r| r.recipe_id == recipe.id && r.step == 6)
            .expect("final record");
        assert_eq!(last.nodes, replay.num_ands(), "recipe {}", recipe.id);
        assert_eq!(last.final_nodes, replay.num_ands());
    }
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn intermediate_graphs_stay_equivalent_to_baseline() {
    let cx = context();
    let designs = [fixture("mux41")];
    let cfg = PipelineConfig { recipes: 2, length: 4, seed: 19, force: false };
    let out = temp_out("equiv");
    run_pipeline(&designs, &cfg, cx, &out).unwrap();

    let baseline = strash(&load_aig(&designs[0].path));
    let recipes = sample_recipes(2, 4, 19);
    for recipe in &recipes {
        let mut g = baseline.clone();
        for &a in &recipe.steps {
            g = opt::apply(&g, a, cx);
            assert_eq!(
                check_equiv(&baseline, &g, &EquivConfig::default()).unwrap(),
                EquivVerdict::Equivalent
            );
        }
    }
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn stored_step0_matches_fresh_encoding() {
    let cx = context();
    let designs = [fixture("decoder3")];
    let cfg = PipelineConfig { recipes: 1, length: 2, seed: 0, force: false };
    let out = temp_out("enc");
    run_pipeline(&designs, &cfg, cx, &out).unwrap();
    let from_disk =
        read_graphml(&std::fs::read_to_string(out.join("decoder3/step0.graphml")).unwrap())
            .unwrap();
    let fresh = encode_graph(&strash(&load_aig(&designs[0].path)));
    assert_eq!(from_disk, fresh);
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn samples_and_splits_from_a_real_run() {
    let cx = context();
    let designs = [fixture("c17"), fixture("fulladder"), fixture("parity8")];
    let cfg = PipelineConfig { recipes: 6, length: 3, seed: 42, force: false };
    let out = temp_out("samples");
    run_pipeline(&designs, &cfg, cx, &out).unwrap();

    let mut records = Vec::new();
    let mut encodings = BTreeMap::new();
    for d in &designs {
        records.extend(load_labels(&out.join(format!("{}/labels.jsonl", d.name))).unwrap());
        let enc =
            read_graphml(&std::fs::read_to_string(out.join(format!("{}/step0.graphml", d.name))).unwrap())
                .unwrap();
        encodings.insert(d.name.clone(), Arc::new(enc));
    }
    let recipes: BTreeMap<u32, Vec<u8>> =
        sample_recipes(6, 3, 42).iter().map(|r| (r.id, r.encode())).collect();
    let samples = make_samples(&records, &recipes, &encodings).unwrap();
    assert_eq!(samples.len(), 3 * 6);

    let (train, test) =
        split(&samples, &SplitSpec { mode: SplitMode::UnseenRecipe, seed: 9 }).unwrap();
    assert_eq!(train.len(), 3 * 4);
    assert_eq!(test.len(), 3 * 2);

    let (train_d, test_d) =
        split(&samples, &SplitSpec { mode: SplitMode::UnseenDesign, seed: 9 }).unwrap();
    assert_eq!(train_d.len() + test_d.len(), samples.len());
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn unparseable_design_is_reported_but_does_not_abort() {
    let cx = context();
    let bad = DesignSpec {
        path: PathBuf::from("/nonexistent/file.bench"),
        name: "ghost".to_string(),
        function_class: "none".to_string(),
    };
    let designs = [bad, fixture("c17")];
    let cfg = PipelineConfig { recipes: 1, length: 1, seed: 0, force: false };
    let out = temp_out("badfile");
    let manifest = run_pipeline(&designs, &cfg, cx, &out).unwrap();
    assert!(manifest.designs[0].status.starts_with("error:"));
    assert_eq!(manifest.designs[1].status, "ok");
    assert!(!manifest.partial);
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn refuses_to_overwrite_without_force() {
    let cx = context();
    let designs = [fixture("c17")];
    let cfg = PipelineConfig { recipes: 1, length: 1, seed: 0, force: false };
    let out = temp_out("force");
    run_pipeline(&designs, &cfg, cx, &out).unwrap();
    assert!(run_pipeline(&designs, &cfg, cx, &out).is_err());
    let forced = PipelineConfig { force: true, ..cfg };
    assert!(run_pipeline(&designs, &forced, cx, &out).is_ok());
    std::fs::remove_dir_all(&out).unwrap();
}
