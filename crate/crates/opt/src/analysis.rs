//! Shared structural analysis: fanout counts and fanout-free cones.

use aig::{Aig, Node};

/// Reference count per node: fanin uses plus output uses.
pub fn fanout_counts(g: &Aig) -> Vec<u32> {
    let mut counts = vec![0u32; g.num_nodes()];
    for (_, node) in g.nodes() {
        if let Node::And(f0, f1) = node {
            counts[f0.node()] += 1;
            counts[f1.node()] += 1;
        }
    }
    for (_, lit) in g.outputs() {
        counts[lit.node()] += 1;
    }
    counts
}

/// Number of AND nodes freed if `root` were replaced, walking down to the
/// given cut leaves: the root itself plus every AND below it whose every
/// reference lies inside the freed set.
///
/// `fanout` must come from [`fanout_counts`] on the same graph; a scratch
/// copy is taken so the counts are not disturbed.
pub fn mffc_size(g: &Aig, root: usize, leaves: &[u32], fanout: &[u32]) -> usize {
    let mut refs = fanout.to_vec();
    let mut freed = 0usize;
    let mut stack = vec![root];
    while let Some(idx) = stack.pop() {
        let Node::And(f0, f1) = g.node(idx) else { continue };
        freed += 1;
        for f in [f0, f1] {
            let n = f.node();
            if leaves.binary_search(&(n as u32)).is_ok() {
                continue;
            }
            refs[n] -= 1;
            if refs[n] == 0 && matches!(g.node(n), Node::And(..)) {
                stack.push(n);
            }
        }
    }
    freed
}

/// The maximum fanout-free cone of `root` with its natural boundary:
/// returns the freed node set (including `root`) and its support, the
/// sorted external nodes feeding the cone.
pub fn natural_mffc(g: &Aig, root: usize, fanout: &[u32]) -> (Vec<usize>, Vec<u32>) {
    let mut refs = fanout.to_vec();
    let mut freed = Vec::new();
    let mut stack = vec![root];
    while let Some(idx) = stack.pop() {
        let Node::And(f0, f1) = g.node(idx) else { continue };
        freed.push(idx);
        for f in [f0, f1] {
            let n = f.node();
            refs[n] -= 1;
            if refs[n] == 0 && matches!(g.node(n), Node::And(..)) {
                stack.push(n);
            }
        }
    }
    freed.sort_unstable();
    let mut support: Vec<u32> = Vec::new();
    for &idx in &freed {
        if let Node::And(f0, f1) = g.node(idx) {
            for f in [f0, f1] {
                let n = f.node() as u32;
                if freed.binary_search(&f.node()).is_err() && !support.contains(&n) {
                    support.push(n);
                }
            }
        }
    }
    support.sort_unstable();
    (freed, support)
}
