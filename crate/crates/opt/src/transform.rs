//! The action dispatcher and the rebuild-based cleanup transforms.

use aig::{Aig, Literal, Node};

use crate::action::Action;
use crate::balance::balance;
use crate::cuts::CutConfig;
use crate::library::{build_rewrite_library, RewriteLibrary};
use crate::refactor::{refactor, RefactorConfig};
use crate::rewrite::rewrite;

/// Shared state for applying actions: the rewrite library and the
/// transform parameters. Build once, share read-only across workers.
#[derive(Clone, Debug)]
pub struct TransformContext {
    pub library: RewriteLibrary,
    pub cut: CutConfig,
    pub refactor: RefactorConfig,
}

impl TransformContext {
    /// Default parameters: cut width 4, cut cap 8, cone cap 10, library
    /// bound 7.
    pub fn with_defaults() -> Self {
        TransformContext {
            library: build_rewrite_library(4, 7).expect("k=4 is supported"),
            cut: CutConfig::default(),
            refactor: RefactorConfig::default(),
        }
    }
}

/// Rebuilds the live cone through `add_and` in topological order: merges
/// structural duplicates, re-applies the constant and identity rules, and
/// drops unreachable nodes.
pub fn strash(g: &Aig) -> Aig {
    let live = g.live_nodes();
    let mut h = Aig::new();
    for name in g.input_names() {
        h.add_input(name.clone());
    }
    let mut map: Vec<Option<Literal>> = vec![None; g.num_nodes()];
    map[0] = Some(Literal::FALSE);
    for i in 0..g.num_inputs() {
        map[g.input_node(i)] = Some(h.input_literal(i));
    }
    for (idx, node) in g.nodes() {
        if !live[idx] {
            continue;
        }
        if let Node::And(f0, f1) = node {
            let a = map[f0.node()].expect("fanin mapped").xor(f0.is_complemented());
            let b = map[f1.node()].expect("fanin mapped").xor(f1.is_complemented());
            map[idx] = Some(h.add_and(a, b));
        }
    }
    for (name, lit) in g.outputs() {
        let mapped = map[lit.node()].expect("output driver mapped");
        h.add_output(name.clone(), mapped.xor(lit.is_complemented()));
    }
    h
}

/// Drops nodes unreachable from any output and propagates constants into
/// outputs. Same rebuild as [`strash`]; the two differ only in intent.
pub fn sweep(g: &Aig) -> Aig {
    strash(g)
}

/// Applies one action, returning a new functionally equivalent graph.
pub fn apply(g: &Aig, action: Action, cx: &TransformContext) -> Aig {
    match action {
        Action::Strash => strash(g),
        Action::Sweep => sweep(g),
        Action::Balance => balance(g),
        Action::Rewrite => rewrite(g, false, &cx.library, &cx.cut),
        Action::RewriteZero => rewrite(g, true, &cx.library, &cx.cut),
        Action::Refactor => refactor(g, false, &cx.refactor),
        Action::RefactorZero => refactor(g, true, &cx.refactor),
    }
}

/// Applies a sequence of actions left to right.
pub fn apply_sequence(g: &Aig, actions: &[Action], cx: &TransformContext) -> Aig {
    actions.iter().fold(g.clone(), |acc, &a| apply(&acc, a, cx))
}

/// Like [`apply_sequence`] but keeps the graph after every step.
pub fn apply_sequence_trace(g: &Aig, actions: &[Action], cx: &TransformContext) -> Vec<Aig> {
    let mut out = Vec::with_capacity(actions.len());
    let mut current = g.clone();
    for &a in actions {
        current = apply(&current, a, cx);
        out.push(current.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strash_merges_raw_duplicates() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let t1 = g.add_and(a, b);
        let t2 = g.push_and_raw(a, b);
        let y = g.push_and_raw(t1, t2); // y = t1 & t2 = t1
        g.add_output("y", y);
        assert_eq!(g.num_ands(), 3);
        let s = strash(&g);
        assert_eq!(s.num_ands(), 1);
    }

    #[test]
    fn strash_is_idempotent() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let t = g.xor2(a, b);
        let y = g.mux(c, t, a);
        let _dead = g.add_and(a, !c);
        g.add_output("y", y);
        let once = strash(&g);
        let twice = strash(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn and_with_x_and_xy_keeps_two_nodes() {
        let mut g = Aig::new();
        let x = g.add_input("x");
        let y = g.add_input("y");
        let t = g.add_and(x, y);
        let top = g.add_and(x, t);
        g.add_output("o", top);
        let s = strash(&g);
        assert_eq!(s.num_ands(), 2, "no rule applies to AND(x, AND(x, y))");
    }

    #[test]
    fn sweep_drops_exactly_the_unreachable() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let used = g.add_and(a, b);
        let _unused = g.add_and(a, !b);
        g.add_output("y", used);
        let s = sweep(&g);
        assert_eq!(s.num_ands(), g.num_ands() - 1);
        let again = sweep(&s);
        assert_eq!(s, again);
        // sweep after strash changes nothing: strash already dropped them.
        assert_eq!(sweep(&strash(&g)), strash(&g));
    }

    #[test]
    fn apply_on_empty_graph_returns_empty() {
        let g = Aig::new();
        let cx = TransformContext::with_defaults();
        for a in Action::ALL {
            let r = apply(&g, a, &cx);
            assert_eq!(r.num_ands(), 0);
            assert_eq!(r.num_inputs(), 0);
        }
    }
}
