//! Numeric graph and recipe encodings.

use std::rc::Rc;

use aig::{Aig, Node};
use neuro::{normalized_adjacency, CsrMatrix, Tensor};

pub const NODE_FEATURE_DIM: usize = 4;

/// Row meaning in `node_features`: columns 0..3 one-hot the node type
/// (input, AND, output marker) and column 3 counts complemented incoming
/// connections. Nodes are ordered inputs first, then AND nodes in
/// topological order, then one marker row per output.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphEncoding {
    pub num_nodes: usize,
    /// Row-major `[num_nodes x 4]`.
    pub node_features: Vec<f64>,
    /// Directed source -> target pairs over encoding row indices.
    pub edge_index: Vec<(u32, u32)>,
    /// 1 for inverted connections, 0 otherwise; parallel to `edge_index`.
    pub edge_type: Vec<u8>,
}

impl GraphEncoding {
    pub fn and_node_count(&self) -> usize {
        (0..self.num_nodes)
            .filter(|&i| self.node_features[i * NODE_FEATURE_DIM + 1] == 1.0)
            .count()
    }

    pub fn features_tensor(&self) -> Tensor {
        Tensor::from_vec(vec![self.num_nodes, NODE_FEATURE_DIM], self.node_features.clone())
    }

    /// Symmetric-normalized adjacency with self-loops over the undirected
    /// edge list.
    pub fn adjacency(&self) -> Rc<CsrMatrix> {
        normalized_adjacency(self.num_nodes, &self.edge_index)
    }

    pub(crate) fn push_node(&mut self, one_hot: usize, inverted_preds: usize) -> u32 {
        let row = self.num_nodes;
        self.num_nodes += 1;
        let mut features = [0.0; NODE_FEATURE_DIM];
        features[one_hot] = 1.0;
        features[3] = inverted_preds as f64;
        self.node_features.extend_from_slice(&features);
        row as u32
    }

    pub(crate) fn empty() -> GraphEncoding {
        GraphEncoding {
            num_nodes: 0,
            node_features: Vec::new(),
            edge_index: Vec::new(),
            edge_type: Vec::new(),
        }
    }
}

/// Encodes a graph: inputs first, AND nodes in topological order, then one
/// marker node per output; one directed edge per fanin and per output
/// connection with its inversion flag.
pub fn encode_graph(g: &Aig) -> GraphEncoding {
    let mut enc = GraphEncoding::empty();
    let mut row_of = vec![u32::MAX; g.num_nodes()];

    let const_used = g.outputs().iter().any(|(_, lit)| lit.is_constant());
    if const_used {
        row_of[0] = enc.push_node(0, 0);
    }
    for i in 0..g.num_inputs() {
        row_of[g.input_node(i)] = enc.push_node(0, 0);
    }
    for (idx, node) in g.nodes() {
        if let Node::And(f0, f1) = node {
            let ninv = f0.is_complemented() as usize + f1.is_complemented() as usize;
            row_of[idx] = enc.push_node(1, ninv);
        }
    }
    for (idx, node) in g.nodes() {
        if let Node::And(f0, f1) = node {
            for f in [f0, f1] {
                enc.edge_index.push((row_of[f.node()], row_of[idx]));
                enc.edge_type.push(f.is_complemented() as u8);
            }
        }
    }
    for (_, lit) in g.outputs() {
        let po_row = enc.push_node(2, lit.is_complemented() as usize);
        enc.edge_index.push((row_of[lit.node()], po_row));
        enc.edge_type.push(lit.is_complemented() as u8);
    }
    enc
}

/// Maps each step id through the shared embedding table and concatenates
/// the step embeddings in order: ids `[L]` with table `[vocab x d]` give a
/// flat `[1 x L*d]` encoding. Gradients flow into the table.
pub fn embed_recipe(table: &Tensor, step_ids: &[u8]) -> Tensor {
    let dim = table.shape()[1];
    let indices: Vec<usize> = step_ids.iter().map(|&v| v as usize).collect();
    table.gather_rows(Rc::new(indices)).reshape(vec![1, step_ids.len() * dim])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_graph() -> Aig {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let y = g.add_and(!a, !b);
        g.add_output("y", !y);
        g
    }

    #[test]
    fn input_rows_are_one_hot_type_zero() {
        let enc = encode_graph(&sample_graph());
        assert_eq!(&enc.node_features[0..4], &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(&enc.node_features[4..8], &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn and_with_two_complemented_fanins() {
        let enc = encode_graph(&sample_graph());
        // Row 2 is the AND node.
        assert_eq!(&enc.node_features[8..12], &[0.0, 1.0, 0.0, 2.0]);
        // Row 3 is the output marker with one inverted predecessor.
        assert_eq!(&enc.node_features[12..16], &[0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn edge_count_is_two_n_plus_po() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let t = g.add_and(a, b);
        let y = g.add_and(t, c);
        g.add_output("t", t);
        g.add_output("y", y);
        let enc = encode_graph(&g);
        assert_eq!(enc.edge_index.len(), 2 * g.num_ands() + g.num_outputs());
        assert_eq!(enc.edge_type.len(), enc.edge_index.len());
        assert_eq!(enc.and_node_count(), 2);
    }

    #[test]
    fn relabeled_inputs_give_same_feature_multiset() {
        let mut g1 = Aig::new();
        let a = g1.add_input("a");
        let b = g1.add_input("b");
        let y = g1.add_and(a, !b);
        g1.add_output("y", y);

        let mut g2 = Aig::new();
        let b2 = g2.add_input("b");
        let a2 = g2.add_input("a");
        let y2 = g2.add_and(a2, !b2);
        g2.add_output("y", y2);

        let mut rows1: Vec<Vec<u64>> = encode_graph(&g1)
            .node_features
            .chunks(4)
            .map(|c| c.iter().map(|v| v.to_bits()).collect())
            .collect();
        let mut rows2: Vec<Vec<u64>> = encode_graph(&g2)
            .node_features
            .chunks(4)
            .map(|c| c.iter().map(|v| v.to_bits()).collect())
            .collect();
        rows1.sort();
        rows2.sort();
        assert_eq!(rows1, rows2);
        assert_eq!(encode_graph(&g1).edge_index.len(), encode_graph(&g2).edge_index.len());
    }

    #[test]
    fn recipe_embedding_with_indicator_table() {
        let mut table = vec![0.0; 21];
        for v in 0..7 {
            table[v * 3] = v as f64;
        }
        let table = Tensor::from_vec(vec![7, 3], table);
        let out = embed_recipe(&table, &[0, 1, 5]);
        assert_eq!(out.shape(), &[1, 9]);
        assert_eq!(out.to_vec(), vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 5.0, 0.0, 0.0]);
        for l in [1usize, 20] {
            assert_eq!(embed_recipe(&table, &vec![0u8; l]).len(), 3 * l);
        }
    }
}
