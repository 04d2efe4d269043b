//! Depth reduction by collapsing single-fanout AND trees and rebuilding
//! each as a level-balanced binary tree.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use aig::{Aig, Literal, Node};

/// Collapses maximal single-fanout AND trees into n-ary conjunctions and
/// rebuilds each by repeatedly pairing the two operands of smallest
/// arrival level (ties by literal order). The result never has larger
/// depth and computes the same function.
pub fn balance(g: &Aig) -> Aig {
    let live = g.live_nodes();

    // Reference data over the live cone only: a node is interior to a tree
    // if its single use is an uncomplemented fanin of a live AND.
    let mut refs = vec![0u32; g.num_nodes()];
    let mut comp_ref = vec![false; g.num_nodes()];
    let mut out_ref = vec![false; g.num_nodes()];
    for (idx, node) in g.nodes() {
        if !live[idx] {
            continue;
        }
        if let Node::And(f0, f1) = node {
            for f in [f0, f1] {
                refs[f.node()] += 1;
                if f.is_complemented() {
                    comp_ref[f.node()] = true;
                }
            }
        }
    }
    for (_, lit) in g.outputs() {
        refs[lit.node()] += 1;
        out_ref[lit.node()] = true;
    }
    let interior = |idx: usize| -> bool {
        matches!(g.node(idx), Node::And(..)) && refs[idx] == 1 && !comp_ref[idx] && !out_ref[idx]
    };

    let mut h = Aig::new();
    for name in g.input_names() {
        h.add_input(name.clone());
    }
    let mut levels: Vec<usize> = vec![0; h.num_nodes()];
    let mut map: Vec<Option<Literal>> = vec![None; g.num_nodes()];
    map[0] = Some(Literal::FALSE);
    for i in 0..g.num_inputs() {
        map[g.input_node(i)] = Some(h.input_literal(i));
    }

    for (idx, node) in g.nodes() {
        if !live[idx] || interior(idx) {
            continue;
        }
        let Node::And(f0, f1) = node else { continue };

        // Flatten the maximal tree under this root into operands.
        let mut operands: Vec<Literal> = Vec::new();
        let mut stack = vec![f0, f1];
        while let Some(f) = stack.pop() {
            if !f.is_complemented() && interior(f.node()) {
                if let Node::And(g0, g1) = g.node(f.node()) {
                    stack.push(g0);
                    stack.push(g1);
                    continue;
                }
            }
            let mapped = map[f.node()].expect("operand mapped earlier");
            operands.push(mapped.xor(f.is_complemented()));
        }

        // Huffman-style pairing on arrival levels.
        let mut heap: BinaryHeap<Reverse<(usize, Literal)>> = operands
            .into_iter()
            .map(|lit| Reverse((levels[lit.node()], lit)))
            .collect();
        while heap.len() > 1 {
            let Reverse((_, a)) = heap.pop().unwrap();
            let Reverse((_, b)) = heap.pop().unwrap();
            let before = h.num_nodes();
            let c = h.add_and(a, b);
            if h.num_nodes() > before {
                let lvl = 1 + levels[a.node()].max(levels[b.node()]);
                levels.push(lvl);
            }
            heap.push(Reverse((levels[c.node()], c)));
        }
        let Reverse((_, result)) = heap.pop().expect("at least one operand");
        map[idx] = Some(result);
    }

    for (name, lit) in g.outputs() {
        let mapped = map[lit.node()].expect("output driver mapped");
        h.add_output(name.clone(), mapped.xor(lit.is_complemented()));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and_chain(n: usize) -> Aig {
        let mut g = Aig::new();
        let lits: Vec<Literal> = (0..n).map(|i| g.add_input(format!("x{i}"))).collect();
        let y = lits.iter().copied().reduce(|a, b| g.add_and(a, b)).unwrap();
        g.add_output("y", y);
        g
    }

    #[test]
    fn chain_of_16_balances_to_depth_4() {
        let g = and_chain(16);
        assert_eq!(g.depth(), 15);
        let b = balance(&g);
        assert_eq!(b.depth(), 4);
        assert_eq!(b.num_ands(), 15);
    }

    #[test]
    fn already_balanced_tree_is_unchanged() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let d = g.add_input("d");
        let t0 = g.add_and(a, b);
        let t1 = g.add_and(c, d);
        let y = g.add_and(t0, t1);
        g.add_output("y", y);
        let h = balance(&g);
        assert_eq!(h, g);
    }

    #[test]
    fn shared_nodes_stay_boundaries() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let shared = g.add_and(a, b);
        let y = g.add_and(shared, c);
        g.add_output("y", y);
        g.add_output("s", shared); // second use
        let h = balance(&g);
        assert_eq!(h.num_ands(), 2);
        assert_eq!(h, g);
    }

    #[test]
    fn duplicate_operands_collapse() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        // (a & b) & a built raw so the duplicate survives construction.
        let t = g.add_and(a, b);
        let y = g.push_and_raw(t, a);
        g.add_output("y", y);
        let h = balance(&g);
        assert_eq!(h.num_ands(), 1, "a & b & a is just a & b");
    }
}
