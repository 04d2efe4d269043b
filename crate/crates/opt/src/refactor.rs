//! Cone resynthesis: recompute each maximum fanout-free cone's function
//! and rebuild it by recursive Shannon expansion.

use std::collections::HashMap;

use aig::{Aig, Literal, Node};

use crate::analysis::{fanout_counts, natural_mffc};

#[derive(Clone, Debug)]
pub struct RefactorConfig {
    /// Cones with more inputs than this are left alone.
    pub max_cone_inputs: usize,
}

impl Default for RefactorConfig {
    fn default() -> Self {
        RefactorConfig { max_cone_inputs: 10 }
    }
}

/// Word-packed truth table over `vars` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Table {
    words: Vec<u64>,
    vars: usize,
}

impl Table {
    fn words_for(vars: usize) -> usize {
        (1usize << vars).div_ceil(64)
    }

    fn constant(vars: usize, value: bool) -> Table {
        let mut t = Table { words: vec![if value { u64::MAX } else { 0 }; Self::words_for(vars)], vars };
        t.mask_tail();
        t
    }

    fn projection(vars: usize, v: usize) -> Table {
        const MASKS: [u64; 6] = [
            0xaaaa_aaaa_aaaa_aaaa,
            0xcccc_cccc_cccc_cccc,
            0xf0f0_f0f0_f0f0_f0f0,
            0xff00_ff00_ff00_ff00,
            0xffff_0000_ffff_0000,
            0xffff_ffff_0000_0000,
        ];
        let n = Self::words_for(vars);
        let words = (0..n)
            .map(|w| {
                if v < 6 {
                    MASKS[v]
                } else if (w >> (v - 6)) & 1 != 0 {
                    u64::MAX
                } else {
                    0
                }
            })
            .collect();
        let mut t = Table { words, vars };
        t.mask_tail();
        t
    }

    fn mask_tail(&mut self) {
        let bits = 1usize << self.vars;
        if bits < 64 {
            self.words[0] &= (1u64 << bits) - 1;
        }
    }

    fn not(&self) -> Table {
        let mut t = Table { words: self.words.iter().map(|w| !w).collect(), vars: self.vars };
        t.mask_tail();
        t
    }

    fn and(&self, other: &Table) -> Table {
        Table {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            vars: self.vars,
        }
    }

    fn is_const(&self, value: bool) -> bool {
        *self == Table::constant(self.vars, value)
    }

    /// Cofactors with the fixed variable's slices duplicated, keeping the
    /// full width so variable indices stay stable.
    fn cofactors(&self, v: usize) -> (Table, Table) {
        let proj = Table::projection(self.vars, v);
        if v < 6 {
            let shift = 1usize << v;
            let lo_words: Vec<u64> = self
                .words
                .iter()
                .zip(&proj.words)
                .map(|(w, m)| {
                    let lo = w & !m;
                    lo | lo << shift
                })
                .collect();
            let hi_words: Vec<u64> = self
                .words
                .iter()
                .zip(&proj.words)
                .map(|(w, m)| {
                    let hi = w & m;
                    hi | hi >> shift
                })
                .collect();
            let mut lo = Table { words: lo_words, vars: self.vars };
            let mut hi = Table { words: hi_words, vars: self.vars };
            lo.mask_tail();
            hi.mask_tail();
            (lo, hi)
        } else {
            let block = 1usize << (v - 6);
            let mut lo = self.clone();
            let mut hi = self.clone();
            for w in 0..self.words.len() {
                let partner = w ^ block;
                if (w >> (v - 6)) & 1 != 0 {
                    lo.words[w] = self.words[partner];
                } else {
                    hi.words[w] = self.words[partner];
                }
            }
            (lo, hi)
        }
    }

    fn support(&self) -> Vec<usize> {
        (0..self.vars)
            .filter(|&v| {
                let (c0, c1) = self.cofactors(v);
                c0 != c1
            })
            .collect()
    }
}

/// One topological pass of cone refactoring.
///
/// Every live AND node whose maximum fanout-free cone has at most
/// `max_cone_inputs` inputs is recomputed as a truth table and rebuilt by
/// Shannon expansion (splitting on the variable that minimizes the larger
/// cofactor's support, ties to the lowest index). The rebuild is accepted
/// when it frees at least one node, or at least zero with `zero_cost`.
pub fn refactor(g: &Aig, zero_cost: bool, cfg: &RefactorConfig) -> Aig {
    let live = g.live_nodes();
    let fanout = fanout_counts(g);

    let mut h = Aig::new();
    for name in g.input_names() {
        h.add_input(name.clone());
    }
    let mut map: Vec<Option<Literal>> = vec![None; g.num_nodes()];
    map[0] = Some(Literal::FALSE);
    for i in 0..g.num_inputs() {
        map[g.input_node(i)] = Some(h.input_literal(i));
    }

    let threshold = if zero_cost { 0 } else { 1 };
    for (idx, node) in g.nodes() {
        if !live[idx] {
            continue;
        }
        let Node::And(f0, f1) = node else { continue };

        let mut replaced = None;
        let (freed, support) = natural_mffc(g, idx, &fanout);
        if support.len() <= cfg.max_cone_inputs && !support.is_empty() {
            let table = cone_table(g, idx, &freed, &support);
            let support_lits: Vec<Literal> = support
                .iter()
                .map(|&n| map[n as usize].expect("support mapped earlier"))
                .collect();
            let checkpoint = h.checkpoint();
            let lit = shannon_build(&mut h, &table, &support_lits, &mut HashMap::new());
            let added = (h.num_nodes() - checkpoint) as isize;
            let gain = freed.len() as isize - added;
            if gain >= threshold {
                replaced = Some(lit);
            } else {
                h.rollback_to(checkpoint);
            }
        }
        map[idx] = Some(match replaced {
            Some(lit) => lit,
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
    let result = crate::transform::strash(&h);
    if result.num_ands() > g.num_ands() {
        return crate::transform::strash(g);
    }
    result
}

/// Truth table of `root` over the cone's support nodes.
fn cone_table(g: &Aig, root: usize, cone: &[usize], support: &[u32]) -> Table {
    let vars = support.len();
    let mut tables: HashMap<usize, Table> = support
        .iter()
        .enumerate()
        .map(|(v, &n)| (n as usize, Table::projection(vars, v)))
        .collect();
    for &idx in cone {
        let Node::And(f0, f1) = g.node(idx) else { unreachable!("cone nodes are ANDs") };
        let fetch = |f: Literal, tables: &HashMap<usize, Table>| -> Table {
            let t = tables.get(&f.node()).expect("cone is closed over support");
            if f.is_complemented() { t.not() } else { t.clone() }
        };
        let t = fetch(f0, &tables).and(&fetch(f1, &tables));
        tables.insert(idx, t);
    }
    tables.remove(&root).expect("root evaluated")
}

/// Shannon expansion into `h`, with memoized subfunctions.
fn shannon_build(
    h: &mut Aig,
    t: &Table,
    vars: &[Literal],
    memo: &mut HashMap<Table, Literal>,
) -> Literal {
    if t.is_const(false) {
        return Literal::FALSE;
    }
    if t.is_const(true) {
        return Literal::TRUE;
    }
    for (v, &lit) in vars.iter().enumerate() {
        let proj = Table::projection(t.vars, v);
        if *t == proj {
            return lit;
        }
        if *t == proj.not() {
            return !lit;
        }
    }
    if let Some(&lit) = memo.get(t) {
        return lit;
    }
    let support = t.support();
    let split = support
        .iter()
        .copied()
        .min_by_key(|&v| {
            let (c0, c1) = t.cofactors(v);
            c0.support().len().max(c1.support().len())
        })
        .expect("nonconstant table");
    let (c0, c1) = t.cofactors(split);
    let x = vars[split];
    let lit = if c1.is_const(true) {
        let s0 = shannon_build(h, &c0, vars, memo);
        h.or2(x, s0)
    } else if c1.is_const(false) {
        let s0 = shannon_build(h, &c0, vars, memo);
        h.add_and(!x, s0)
    } else if c0.is_const(true) {
        let s1 = shannon_build(h, &c1, vars, memo);
        h.or2(!x, s1)
    } else if c0.is_const(false) {
        let s1 = shannon_build(h, &c1, vars, memo);
        h.add_and(x, s1)
    } else {
        let s0 = shannon_build(h, &c0, vars, memo);
        let s1 = shannon_build(h, &c1, vars, memo);
        h.mux(x, s1, s0)
    };
    memo.insert(t.clone(), lit);
    memo.insert(t.not(), !lit);
    lit
}
