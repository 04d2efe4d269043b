use std::collections::HashMap;

use crate::literal::Literal;

/// One node of the graph. Index 0 is always [`Node::Const0`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Node {
    /// Constant false.
    Const0,
    /// Primary input; the payload is the position in the input list.
    Input(usize),
    /// 2-input AND with canonically ordered fanins (fanin0 <= fanin1).
    And(Literal, Literal),
}

/// An and-inverter graph.
///
/// Nodes are stored in topological order by construction: every AND refers
/// only to nodes with strictly smaller indices. [`Aig::add_and`] applies the
/// usual simplification rules (identity, annihilation, idempotence,
/// contradiction), orders the fanins, and consults the structural hash
/// table, so equal structure is never duplicated.
///
/// Outputs are named literals, not nodes; the GraphML exporter materializes
/// output marker nodes where a node-typed encoding needs them.
#[derive(Clone, Debug, Default)]
pub struct Aig {
    nodes: Vec<Node>,
    strash: HashMap<(Literal, Literal), usize>,
    inputs: Vec<usize>,
    input_names: Vec<String>,
    outputs: Vec<(String, Literal)>,
}

impl Aig {
    pub fn new() -> Self {
        Aig {
            nodes: vec![Node::Const0],
            strash: HashMap::new(),
            inputs: Vec::new(),
            input_names: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Appends a primary input and returns its (uncomplemented) literal.
    pub fn add_input(&mut self, name: impl Into<String>) -> Literal {
        let idx = self.nodes.len();
        self.nodes.push(Node::Input(self.inputs.len()));
        self.inputs.push(idx);
        self.input_names.push(name.into());
        Literal::new(idx, false)
    }

    /// Returns a literal computing `a AND b`.
    ///
    /// Simplification rules are applied before allocation:
    /// `x AND 1 = x`, `x AND 0 = 0`, `x AND x = x`, `x AND !x = 0`.
    /// Otherwise the canonical fanin pair is looked up in the hash table
    /// and a node is allocated only if the structure is new.
    pub fn add_and(&mut self, a: Literal, b: Literal) -> Literal {
        assert!(a.node() < self.nodes.len(), "fanin {a:?} out of range");
        assert!(b.node() < self.nodes.len(), "fanin {b:?} out of range");
        if a == Literal::TRUE {
            return b;
        }
        if b == Literal::TRUE {
            return a;
        }
        if a == Literal::FALSE || b == Literal::FALSE {
            return Literal::FALSE;
        }
        if a == b {
            return a;
        }
        if a == !b {
            return Literal::FALSE;
        }
        let (f0, f1) = if a <= b { (a, b) } else { (b, a) };
        if let Some(&idx) = self.strash.get(&(f0, f1)) {
            return Literal::new(idx, false);
        }
        let idx = self.nodes.len();
        self.nodes.push(Node::And(f0, f1));
        self.strash.insert((f0, f1), idx);
        Literal::new(idx, false)
    }

    /// Appends an AND node without rules or hashing.
    ///
    /// Fanins must already exist and the node is stored with ordered fanins,
    /// so the topological invariant still holds, but the graph may now
    /// contain structural duplicates until it is re-hashed. Intended for
    /// file readers and for tests that need non-canonical graphs.
    pub fn push_and_raw(&mut self, a: Literal, b: Literal) -> Literal {
        assert!(a.node() < self.nodes.len(), "fanin {a:?} out of range");
        assert!(b.node() < self.nodes.len(), "fanin {b:?} out of range");
        let (f0, f1) = if a <= b { (a, b) } else { (b, a) };
        let idx = self.nodes.len();
        self.nodes.push(Node::And(f0, f1));
        Literal::new(idx, false)
    }

    pub fn add_output(&mut self, name: impl Into<String>, lit: Literal) {
        assert!(lit.node() < self.nodes.len(), "output {lit:?} out of range");
        self.outputs.push((name.into(), lit));
    }

    /// `a OR b` as a complemented AND.
    pub fn or2(&mut self, a: Literal, b: Literal) -> Literal {
        !self.add_and(!a, !b)
    }

    /// `a XOR b` in the shared 3-node form `!(!(a & !b) & !(!a & b))`.
    pub fn xor2(&mut self, a: Literal, b: Literal) -> Literal {
        let p = self.add_and(a, !b);
        let q = self.add_and(!a, b);
        !self.add_and(!p, !q)
    }

    /// `if s then t else e`.
    pub fn mux(&mut self, s: Literal, t: Literal, e: Literal) -> Literal {
        let p = self.add_and(s, t);
        let q = self.add_and(!s, e);
        !self.add_and(!p, !q)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of AND nodes (the N statistic).
    pub fn num_ands(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::And(..)))
            .count()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn node(&self, idx: usize) -> Node {
        self.nodes[idx]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, Node)> + '_ {
        self.nodes.iter().copied().enumerate()
    }

    /// Node index of the i-th primary input.
    pub fn input_node(&self, i: usize) -> usize {
        self.inputs[i]
    }

    /// Literal of the i-th primary input.
    pub fn input_literal(&self, i: usize) -> Literal {
        Literal::new(self.inputs[i], false)
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn outputs(&self) -> &[(String, Literal)] {
        &self.outputs
    }

    /// Looks up the canonical fanin pair in the hash table.
    pub fn lookup_and(&self, a: Literal, b: Literal) -> Option<usize> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.strash.get(&key).copied()
    }

    /// Marks the current node count so speculative construction can be
    /// undone with [`Aig::rollback_to`].
    pub fn checkpoint(&self) -> usize {
        self.nodes.len()
    }

    /// Removes every node appended after `checkpoint`, including its hash
    /// table entry. Only AND nodes may be rolled back; inputs and outputs
    /// must not have been touched since the checkpoint.
    pub fn rollback_to(&mut self, checkpoint: usize) {
        for idx in (checkpoint..self.nodes.len()).rev() {
            match self.nodes[idx] {
                Node::And(f0, f1) => {
                    // push_and_raw nodes are absent from the table; only
                    // remove the entry if it points at this node.
                    if self.strash.get(&(f0, f1)) == Some(&idx) {
                        self.strash.remove(&(f0, f1));
                    }
                }
                _ => panic!("rollback across a non-AND node"),
            }
        }
        self.nodes.truncate(checkpoint);
    }

    /// Checks the structural invariants with a linear scan: node 0 is the
    /// constant, fanins point strictly backwards and are canonically
    /// ordered, and input records match the input list.
    pub fn check_invariants(&self) -> bool {
        if self.nodes.first() != Some(&Node::Const0) {
            return false;
        }
        for (idx, node) in self.nodes.iter().enumerate().skip(1) {
            match *node {
                Node::Const0 => return false,
                Node::Input(k) => {
                    if self.inputs.get(k) != Some(&idx) {
                        return false;
                    }
                }
                Node::And(f0, f1) => {
                    if f0.node() >= idx || f1.node() >= idx || f0 > f1 {
                        return false;
                    }
                }
            }
        }
        self.outputs
            .iter()
            .all(|(_, lit)| lit.node() < self.nodes.len())
    }

    /// Node indices reachable from the outputs (always includes node 0).
    pub fn live_nodes(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        live[0] = true;
        let mut stack: Vec<usize> = self.outputs.iter().map(|(_, l)| l.node()).collect();
        while let Some(idx) = stack.pop() {
            if live[idx] {
                continue;
            }
            live[idx] = true;
            if let Node::And(f0, f1) = self.nodes[idx] {
                stack.push(f0.node());
                stack.push(f1.node());
            }
        }
        live
    }
}

/// Structural equality: same nodes in the same order, same input names,
/// same outputs. The hash table is derived state and not compared.
impl PartialEq for Aig {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.input_names == other.input_names
            && self.outputs == other.outputs
    }
}

impl Eq for Aig {}
