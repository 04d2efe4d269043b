use crate::{Aig, Node};

/// Structural statistics of a graph.
///
/// Conventions, applied uniformly everywhere in the toolkit:
/// * `edges` counts AND fanin connections only (always `2 * nodes`);
///   output connections are not edges.
/// * `inverted_edges` counts complemented fanins plus complemented
///   output literals.
/// * `depth` is the largest AND level over output drivers, with inputs
///   and the constant at level 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AigStats {
    pub pi: usize,
    pub po: usize,
    pub nodes: usize,
    pub edges: usize,
    pub inverted_edges: usize,
    pub depth: usize,
}

impl std::fmt::Display for AigStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {}",
            self.pi, self.po, self.nodes, self.edges, self.inverted_edges, self.depth
        )
    }
}

impl Aig {
    /// AND level of every node: inputs at 0, each AND one above its
    /// deepest fanin.
    pub fn levels(&self) -> Vec<usize> {
        let mut levels = vec![0usize; self.num_nodes()];
        for (idx, node) in self.nodes() {
            if let Node::And(f0, f1) = node {
                levels[idx] = 1 + levels[f0.node()].max(levels[f1.node()]);
            }
        }
        levels
    }

    /// Longest input-to-output path in AND levels.
    pub fn depth(&self) -> usize {
        let levels = self.levels();
        self.outputs()
            .iter()
            .map(|(_, lit)| levels[lit.node()])
            .max()
            .unwrap_or(0)
    }

    pub fn stats(&self) -> AigStats {
        let mut nodes = 0usize;
        let mut inverted = 0usize;
        for (_, node) in self.nodes() {
            if let Node::And(f0, f1) = node {
                nodes += 1;
                inverted += f0.is_complemented() as usize + f1.is_complemented() as usize;
            }
        }
        inverted += self
            .outputs()
            .iter()
            .filter(|(_, lit)| lit.is_complemented())
            .count();
        AigStats {
            pi: self.num_inputs(),
            po: self.num_outputs(),
            nodes,
            edges: 2 * nodes,
            inverted_edges: inverted,
            depth: self.depth(),
        }
    }
}
