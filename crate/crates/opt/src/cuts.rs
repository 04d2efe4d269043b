//! Bottom-up k-feasible cut enumeration with truth tables.

use aig::{Aig, Node};

#[derive(Clone, Debug)]
pub struct CutConfig {
    /// Maximum cut width; truth tables are 16-bit, so k <= 4.
    pub k: usize,
    /// Cuts kept per node.
    pub cap: usize,
}

impl Default for CutConfig {
    fn default() -> Self {
        CutConfig { k: 4, cap: 8 }
    }
}

/// A cut of some root node: sorted leaf node indices and the root's
/// function of those leaves, in the low `2^len` bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub leaves: Vec<u32>,
    pub table: u16,
}

impl Cut {
    pub fn mask(len: usize) -> u16 {
        if len >= 4 { 0xffff } else { ((1u32 << (1 << len)) - 1) as u16 }
    }
}

/// Re-expresses `table` over leaf set `from` as a table over the superset
/// `to` (both sorted).
pub fn expand_table(table: u16, from: &[u32], to: &[u32]) -> u16 {
    let mut out = 0u16;
    for m in 0..(1u32 << to.len()) {
        let mut j = 0u32;
        for (fi, leaf) in from.iter().enumerate() {
            let ti = to.binary_search(leaf).expect("`to` must contain `from`");
            j |= (m >> ti & 1) << fi;
        }
        if table >> j & 1 != 0 {
            out |= 1 << m;
        }
    }
    out
}

fn sorted_union(a: &[u32], b: &[u32], limit: usize) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            if j < b.len() && a[i] == b[j] {
                j += 1;
            }
            let v = a[i];
            i += 1;
            v
        } else {
            let v = b[j];
            j += 1;
            v
        };
        if out.len() == limit {
            return None;
        }
        out.push(next);
    }
    Some(out)
}

/// Cut sets for every node, bottom-up.
///
/// Inputs have only their trivial cut. An AND node's cuts are the pairwise
/// merges of its fanin cuts that stay within `k` leaves, plus its own
/// trivial cut; each node keeps at most `cap` cuts, preferring fewer
/// leaves with ties broken by lexicographic leaf order.
pub fn enumerate_cuts(g: &Aig, cfg: &CutConfig) -> Vec<Vec<Cut>> {
    assert!(cfg.k >= 2 && cfg.k <= 4, "cut width must be in 2..=4");
    let mut all: Vec<Vec<Cut>> = Vec::with_capacity(g.num_nodes());
    for (idx, node) in g.nodes() {
        let cuts = match node {
            Node::Const0 => Vec::new(),
            Node::Input(_) => vec![Cut { leaves: vec![idx as u32], table: 0b10 }],
            Node::And(f0, f1) => {
                let mut merged: Vec<Cut> = Vec::new();
                for c0 in &all[f0.node()] {
                    for c1 in &all[f1.node()] {
                        let Some(leaves) = sorted_union(&c0.leaves, &c1.leaves, cfg.k) else {
                            continue;
                        };
                        if merged.iter().any(|c| c.leaves == leaves) {
                            continue;
                        }
                        let mask = Cut::mask(leaves.len());
                        let mut t0 = expand_table(c0.table, &c0.leaves, &leaves);
                        let mut t1 = expand_table(c1.table, &c1.leaves, &leaves);
                        if f0.is_complemented() {
                            t0 = !t0 & mask;
                        }
                        if f1.is_complemented() {
                            t1 = !t1 & mask;
                        }
                        merged.push(Cut { leaves, table: t0 & t1 });
                    }
                }
                merged.push(Cut { leaves: vec![idx as u32], table: 0b10 });
                merged.sort_by(|a, b| {
                    a.leaves.len().cmp(&b.leaves.len()).then_with(|| a.leaves.cmp(&b.leaves))
                });
                merged.truncate(cfg.cap);
                merged
            }
        };
        all.push(cuts);
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_has_trivial_and_fanin_cut() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let y = g.add_and(a, b);
        g.add_output("y", y);
        let cuts = enumerate_cuts(&g, &CutConfig::default());
        let node_cuts = &cuts[y.node()];
        assert_eq!(node_cuts.len(), 2);
        assert_eq!(node_cuts[0].leaves, vec![y.node() as u32]);
        let pair = &node_cuts[1];
        assert_eq!(pair.leaves, vec![a.node() as u32, b.node() as u32]);
        // AND of two leaves: only the minterm with both bits set.
        assert_eq!(pair.table, 0b1000);
    }

    #[test]
    fn three_input_and_tree_reaches_and3_table() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let t = g.add_and(a, b);
        let y = g.add_and(t, c);
        g.add_output("y", y);
        let cuts = enumerate_cuts(&g, &CutConfig::default());
        let root = &cuts[y.node()];
        let c3 = root
            .iter()
            .find(|cut| cut.leaves == vec![a.node() as u32, b.node() as u32, c.node() as u32])
            .expect("three-leaf cut");
        assert_eq!(c3.table, 0x80); // AND3: only minterm 7
    }

    #[test]
    fn cap_one_keeps_only_trivial_cuts() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let y = g.add_and(a, !b);
        g.add_output("y", y);
        let cuts = enumerate_cuts(&g, &CutConfig { k: 4, cap: 1 });
        for (idx, node_cuts) in cuts.iter().enumerate() {
            if !node_cuts.is_empty() {
                assert_eq!(node_cuts.len(), 1);
                assert_eq!(node_cuts[0].leaves, vec![idx as u32]);
            }
        }
    }

    #[test]
    fn complemented_fanins_flip_tables() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let y = g.add_and(!a, !b); // NOR
        g.add_output("y", y);
        let cuts = enumerate_cuts(&g, &CutConfig::default());
        let pair = cuts[y.node()].iter().find(|c| c.leaves.len() == 2).unwrap();
        assert_eq!(pair.table, 0b0001); // true only when both inputs are 0
    }

    #[test]
    fn expand_table_reindexes_variables() {
        // f(x5) = x5 over leaves [5], expanded to [3, 5].
        let t = expand_table(0b10, &[5], &[3, 5]);
        assert_eq!(t, 0b1100); // depends on the second variable only
    }
}
