//! Checks over the bundled circuit fixtures, including an independent
//! XML-parser view of the GraphML export.

use std::path::PathBuf;

use aig::bench::{ast_to_aig, parse_bench, write_bench, GateOp};
use aig::graphml::export_graphml;
use aig::{check_equiv, Aig, EquivConfig, EquivVerdict};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture_paths() -> Vec<PathBuf> {
    let mut paths: Vec<_> = std::fs::read_dir(fixture_dir())
        .expect("fixtures directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "bench"))
        .collect();
    paths.sort();
    paths
}

fn load(path: &PathBuf) -> Aig {
    let text = std::fs::read_to_string(path).unwrap();
    ast_to_aig(&parse_bench(&text).unwrap()).unwrap()
}

#[test]
fn full_adder_fixture_has_the_committed_shape() {
    let text = std::fs::read_to_string(fixture_dir().join("fulladder.bench")).unwrap();
    let ast = parse_bench(&text).unwrap();
    assert_eq!(ast.inputs, vec!["a", "b", "cin"]);
    assert_eq!(ast.outputs, vec!["sum", "cout"]);
    assert_eq!(ast.gates.len(), 5);
    assert_eq!(
        ast.gates.iter().map(|g| g.op).collect::<Vec<_>>(),
        vec![GateOp::Xor, GateOp::Xor, GateOp::And, GateOp::And, GateOp::Or]
    );
    // Hand-counted lowered structure: 3 nodes per XOR, one per AND, one
    // for the OR; depth runs through both XOR trees.
    let g = ast_to_aig(&ast).unwrap();
    let s = g.stats();
    assert_eq!((s.pi, s.po, s.nodes, s.edges, s.inverted_edges, s.depth), (3, 2, 9, 18, 13, 4));
}

#[test]
fn all_fixtures_round_trip_through_bench() {
    let cfg = EquivConfig::default();
    for path in fixture_paths() {
        let g = load(&path);
        let text = write_bench(&g);
        let ast = parse_bench(&text).unwrap();
        let g2 = ast_to_aig(&ast).unwrap();
        assert_eq!(g.num_ands(), g2.num_ands(), "{path:?}");
        assert_eq!(check_equiv(&g, &g2, &cfg).unwrap(), EquivVerdict::Equivalent, "{path:?}");
        // Writing again reproduces the same text: parse . write . parse is
        // a fixpoint.
        assert_eq!(parse_bench(&write_bench(&g2)).unwrap(), ast, "{path:?}");
    }
}

#[test]
fn graphml_agrees_with_an_independent_xml_parser() {
    for path in fixture_paths() {
        let g = load(&path);
        let xml = export_graphml(&g);
        let doc = roxmltree::Document::parse(&xml).expect("well-formed XML");

        let nodes: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("node")).collect();
        let edges: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("edge")).collect();
        let stats = g.stats();
        let const_used = g.outputs().iter().any(|(_, lit)| lit.is_constant());
        let expected_nodes = stats.pi + stats.nodes + stats.po + const_used as usize;
        assert_eq!(nodes.len(), expected_nodes, "{path:?}");
        assert_eq!(edges.len(), 2 * stats.nodes + stats.po, "{path:?}");

        // Inverted edge attributes must add up to the graph's inverted
        // connection count.
        let inverted = edges
            .iter()
            .filter(|e| {
                e.children()
                    .find(|c| c.has_tag_name("data"))
                    .and_then(|d| d.text())
                    .is_some_and(|t| t == "1")
            })
            .count();
        assert_eq!(inverted, stats.inverted_edges, "{path:?}");

        // Every edge endpoint refers to a declared node id.
        let ids: std::collections::HashSet<&str> =
            nodes.iter().filter_map(|n| n.attribute("id")).collect();
        for e in &edges {
            assert!(ids.contains(e.attribute("source").unwrap()), "{path:?}");
            assert!(ids.contains(e.attribute("target").unwrap()), "{path:?}");
        }
    }
}
