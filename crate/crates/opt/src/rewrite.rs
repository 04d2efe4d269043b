//! Cut-based rewriting against the precomputed structure library.

use std::collections::HashMap;

use aig::{Aig, Literal, Node};

use crate::analysis::{fanout_counts, mffc_size};
use crate::cuts::{enumerate_cuts, expand_table, Cut, CutConfig};
use crate::library::RewriteLibrary;
use crate::npn::{npn_canonicalize, NpnTransform};

#[derive(Clone, Debug, Default)]
pub struct RewriteConfig {
    pub cut: CutConfig,
}

/// One topological pass of cut rewriting.
///
/// For every live AND node, each k-feasible cut's function is
/// canonicalized and the library template instantiated speculatively
/// against the graph under construction (structural hashing provides
/// sharing). The replacement with the best gain, measured as the cut's
/// maximum fanout-free cone size minus the nodes actually added, is kept
/// when the gain is at least 1, or at least 0 with `zero_cost`. The node
/// count never increases.
pub fn rewrite(g: &Aig, zero_cost: bool, lib: &RewriteLibrary, cfg: &CutConfig) -> Aig {
    let k = lib.k().min(cfg.k);
    let cut_cfg = CutConfig { k, cap: cfg.cap };
    let live = g.live_nodes();
    let cuts = enumerate_cuts(g, &cut_cfg);
    let fanout = fanout_counts(g);
    let mut canon_cache: HashMap<(u8, u16), (u16, NpnTransform)> = HashMap::new();

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
        let Node::And(f0, f1) = node else { continue };

        // Speculatively instantiate every candidate against a rolled-back
        // graph, then keep only the winner, so `added` counts are exact.
        let threshold = if zero_cost { 0 } else { 1 };
        let mut best: Option<(isize, usize)> = None;
        for (ci, cut) in cuts[idx].iter().enumerate() {
            if cut.leaves.len() < 2 {
                continue;
            }
            let freed = mffc_size(g, idx, &cut.leaves, &fanout) as isize;
            // Pad the cut function to k variables so library classes line up.
            let padded = pad_table(cut, k);
            let (class, tr) = *canon_cache
                .entry((cut.leaves.len() as u8, padded))
                .or_insert_with(|| npn_canonicalize(padded, k));
            let template = lib.template_for(class);
            let inverse = tr.invert(k);

            let checkpoint = h.checkpoint();
            let _ = instantiate(&mut h, &template, &inverse, &cut.leaves, &map, k);
            let added = (h.num_nodes() - checkpoint) as isize;
            h.rollback_to(checkpoint);

            let gain = freed - added;
            if gain >= threshold && best.is_none_or(|(bg, _)| gain > bg) {
                best = Some((gain, ci));
            }
        }
        map[idx] = Some(match best {
            Some((_, ci)) => {
                let cut = &cuts[idx][ci];
                let padded = pad_table(cut, k);
                let (class, tr) = canon_cache[&(cut.leaves.len() as u8, padded)];
                let template = lib.template_for(class);
                instantiate(&mut h, &template, &tr.invert(k), &cut.leaves, &map, k)
            }
            None => {
                let a = map[f0.node()].expect("fanin mapped").xor(f0.is_complemented());
                let b = map[f1.node()].expect("fanin mapped").xor(f1.is_complemented());
                h.add_and(a, b)
            }
        });
    }

    for (name, lit) in g.outputs() {
        let mapped = map[lit.node()].expect("output driver mapped");
        h.add_output(name.clone(), mapped.xor(lit.is_complemented()));
    }
    // Replacements orphan the cones they bypassed; rebuild the live part.
    let result = crate::transform::strash(&h);
    if result.num_ands() > g.num_ands() {
        // The gain estimate is measured against the old graph; if the
        // rebuilt result ever comes out larger, keep the cleaned original.
        return crate::transform::strash(g);
    }
    result
}

fn pad_table(cut: &Cut, k: usize) -> u16 {
    if cut.leaves.len() >= k {
        return cut.table;
    }
    // Extend the leaf list with unused variable slots.
    let mut padded_leaves = cut.leaves.clone();
    let mut next = cut.leaves.last().map_or(0, |&l| l + 1);
    while padded_leaves.len() < k {
        padded_leaves.push(next);
        next += 1;
    }
    expand_table(cut.table, &cut.leaves, &padded_leaves)
}

/// Builds the template against `h`, binding template leaf slot `j` to the
/// host literal of cut leaf `inverse.perm[j]`, complemented per the
/// inverse transform; slots beyond the cut width are vacuous and tied to
/// constant false.
fn instantiate(
    h: &mut Aig,
    template: &crate::library::Template,
    inverse: &NpnTransform,
    leaves: &[u32],
    map: &[Option<Literal>],
    k: usize,
) -> Literal {
    let mut leaf_lits = [Literal::FALSE; 4];
    for (j, lit) in leaf_lits.iter_mut().enumerate().take(k) {
        let src = inverse.perm[j] as usize;
        if src < leaves.len() {
            let host = map[leaves[src] as usize].expect("cut leaf mapped");
            *lit = host.xor(inverse.input_neg >> j & 1 != 0);
        }
    }
    let mut built: Vec<Literal> = Vec::with_capacity(template.steps.len());
    let resolve = |r: crate::library::TemplateRef, built: &[Literal]| -> Literal {
        let base = if r.is_const() {
            Literal::FALSE
        } else if let Some(i) = r.leaf_index(k) {
            leaf_lits[i]
        } else {
            built[r.step_index(k).unwrap()]
        };
        base.xor(r.is_complemented())
    };
    for &(a, b) in &template.steps {
        let la = resolve(a, &built);
        let lb = resolve(b, &built);
        let lit = h.add_and(la, lb);
        built.push(lit);
    }
    resolve(template.output, &built).xor(inverse.output_neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::build_rewrite_library;
    use aig::{check_equiv, EquivConfig, EquivVerdict};

    fn lib4() -> RewriteLibrary {
        build_rewrite_library(4, 7).unwrap()
    }

    #[test]
    fn redundant_or_and_collapses() {
        // !(!a & !b) & a == a
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let or = g.or2(a, b);
        let y = g.add_and(or, a);
        g.add_output("y", y);
        let lib = lib4();
        let r = rewrite(&g, false, &lib, &CutConfig::default());
        assert!(r.num_ands() < g.num_ands(), "{} >= {}", r.num_ands(), g.num_ands());
        assert_eq!(
            check_equiv(&g, &r, &EquivConfig::default()).unwrap(),
            EquivVerdict::Equivalent
        );
        assert_eq!(r.num_ands(), 0); // y is just a
    }

    #[test]
    fn minimal_graph_is_unchanged() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let t = g.add_and(a, b);
        let y = g.add_and(t, !c);
        g.add_output("y", y);
        let lib = lib4();
        let r = rewrite(&g, false, &lib, &CutConfig::default());
        assert_eq!(r, g);
    }

    #[test]
    fn node_count_never_increases_on_random_graphs() {
        use aig::SplitMix64;
        let lib = lib4();
        let mut rng = SplitMix64(2024);
        for round in 0..200 {
            let mut g = Aig::new();
            let n_in = 3 + (rng.next_u64() % 4) as usize;
            let lits: Vec<Literal> = (0..n_in).map(|i| g.add_input(format!("i{i}"))).collect();
            let mut pool = lits.clone();
            for _ in 0..(5 + rng.next_u64() % 25) {
                let a = pool[rng.next_u64() as usize % pool.len()].xor(rng.next_u64() & 1 != 0);
                let b = pool[rng.next_u64() as usize % pool.len()].xor(rng.next_u64() & 1 != 0);
                pool.push(g.add_and(a, b));
            }
            for i in 0..2 {
                let lit = pool[pool.len() - 1 - i];
                g.add_output(format!("o{i}"), lit.xor(rng.next_u64() & 1 != 0));
            }
            for zero_cost in [false, true] {
                let r = rewrite(&g, zero_cost, &lib, &CutConfig::default());
                assert!(
                    r.num_ands() <= g.num_ands(),
                    "round {round} zero_cost {zero_cost}: {} > {}",
                    r.num_ands(),
                    g.num_ands()
                );
                assert_eq!(
                    check_equiv(&g, &r, &EquivConfig::default()).unwrap(),
                    EquivVerdict::Equivalent,
                    "round {round}"
                );
            }
        }
    }
}
