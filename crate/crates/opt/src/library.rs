//! Precomputed AND-structure library keyed by NPN canonical class.
//!
//! Construction enumerates structurally hashed AND structures over `k`
//! leaf slots breadth-first by node count, recording the first (and so
//! minimal, within the enumerated depth) structure reaching each canonical
//! class. Classes not reached within the bound fall back to recursive
//! Shannon templates generated on demand.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::npn::{npn_canonicalize, table_mask, NpnTransform};

/// A signal inside a template: the constant, a leaf slot, or the output of
/// an earlier step, with a complement bit. Packed as `signal << 1 | comp`
/// where signal 0 is the constant, `1..=k` are leaves and `k+1+j` is step
/// `j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemplateRef(u8);

impl TemplateRef {
    pub const CONST0: TemplateRef = TemplateRef(0);
    pub const CONST1: TemplateRef = TemplateRef(1);

    pub fn leaf(i: usize) -> Self {
        TemplateRef(((i + 1) << 1) as u8)
    }

    pub fn step(k: usize, j: usize) -> Self {
        TemplateRef(((k + 1 + j) << 1) as u8)
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 != 0
    }

    pub fn xor(self, c: bool) -> Self {
        TemplateRef(self.0 ^ c as u8)
    }

    pub fn signal(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_const(self) -> bool {
        self.signal() == 0
    }

    pub fn leaf_index(self, k: usize) -> Option<usize> {
        let s = self.signal();
        (s >= 1 && s <= k).then(|| s - 1)
    }

    pub fn step_index(self, k: usize) -> Option<usize> {
        let s = self.signal();
        (s > k).then(|| s - k - 1)
    }

    fn raw(self) -> u8 {
        self.0
    }

    fn from_raw(b: u8) -> Self {
        TemplateRef(b)
    }
}

impl std::ops::Not for TemplateRef {
    type Output = TemplateRef;
    fn not(self) -> TemplateRef {
        TemplateRef(self.0 ^ 1)
    }
}

impl std::fmt::Debug for TemplateRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_complemented() {
            write!(f, "!s{}", self.signal())
        } else {
            write!(f, "s{}", self.signal())
        }
    }
}

/// A small AND structure over `k` leaf slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub steps: Vec<(TemplateRef, TemplateRef)>,
    pub output: TemplateRef,
}

impl Template {
    pub fn node_count(&self) -> usize {
        self.steps.len()
    }

    /// Evaluates the template over the k leaf projections.
    pub fn simulate(&self, k: usize) -> u16 {
        let mask = table_mask(k);
        let proj = projections(k);
        let mut tables: Vec<u16> = Vec::with_capacity(self.steps.len());
        let eval = |r: TemplateRef, tables: &[u16]| -> u16 {
            let t = if r.is_const() {
                0
            } else if let Some(i) = r.leaf_index(k) {
                proj[i]
            } else {
                tables[r.step_index(k).unwrap()]
            };
            if r.is_complemented() { !t & mask } else { t & mask }
        };
        for &(a, b) in &self.steps {
            let t = eval(a, &tables) & eval(b, &tables);
            tables.push(t);
        }
        eval(self.output, &tables)
    }

    /// Rewires leaves and output polarity so that a template computing `f`
    /// computes `transform.apply(f)` instead. Node count is unchanged.
    fn rewire(&self, transform: &NpnTransform, k: usize) -> Template {
        let map = |r: TemplateRef| -> TemplateRef {
            match r.leaf_index(k) {
                Some(i) => TemplateRef::leaf(transform.perm[i] as usize)
                    .xor((transform.input_neg >> i) & 1 != 0)
                    .xor(r.is_complemented()),
                None => r,
            }
        };
        Template {
            steps: self.steps.iter().map(|&(a, b)| (map(a), map(b))).collect(),
            output: map(self.output).xor(transform.output_neg),
        }
    }

    /// Drops steps not reachable from the output and renumbers the rest.
    fn pruned(&self, k: usize) -> Template {
        let mut used = vec![false; self.steps.len()];
        let mut stack = Vec::new();
        if let Some(j) = self.output.step_index(k) {
            stack.push(j);
        }
        while let Some(j) = stack.pop() {
            if used[j] {
                continue;
            }
            used[j] = true;
            for r in [self.steps[j].0, self.steps[j].1] {
                if let Some(i) = r.step_index(k) {
                    stack.push(i);
                }
            }
        }
        let mut remap = vec![0usize; self.steps.len()];
        let mut steps = Vec::new();
        for (j, &(a, b)) in self.steps.iter().enumerate() {
            if used[j] {
                remap[j] = steps.len();
                let fix = |r: TemplateRef| match r.step_index(k) {
                    Some(i) => TemplateRef::step(k, remap[i]).xor(r.is_complemented()),
                    None => r,
                };
                steps.push((fix(a), fix(b)));
            }
        }
        let output = match self.output.step_index(k) {
            Some(j) => TemplateRef::step(k, remap[j]).xor(self.output.is_complemented()),
            None => self.output,
        };
        Template { steps, output }
    }
}

fn projections(k: usize) -> Vec<u16> {
    const PROJ: [u16; 4] = [0xaaaa, 0xcccc, 0xf0f0, 0xff00];
    let mask = table_mask(k);
    (0..k).map(|i| PROJ[i] & mask).collect()
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("cut width {0} unsupported (truth tables are 16-bit, k must be 1..=4)")]
    UnsupportedK(usize),

    #[error("corrupt library data: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Canonical class -> minimal known template, plus Shannon fallback.
#[derive(Clone, Debug)]
pub struct RewriteLibrary {
    k: usize,
    bound: usize,
    /// Exhaustive enumeration depth actually used (min of the bound and a
    /// per-width cap that keeps the state space in memory).
    enum_depth: usize,
    templates: BTreeMap<u16, Template>,
}

/// Enumeration depth beyond which the state frontier no longer fits the
/// desk-scale budget. Bounds above the cap are served by the Shannon
/// fallback instead.
fn enum_depth_cap(k: usize) -> usize {
    if k <= 3 { 6 } else { 5 }
}

pub fn build_rewrite_library(k: usize, bound: usize) -> Result<RewriteLibrary, LibraryError> {
    if k == 0 || k > 4 {
        return Err(LibraryError::UnsupportedK(k));
    }
    let mask = table_mask(k);
    let proj = projections(k);
    let normalize = |t: u16| -> u16 { (t & mask).min(!t & mask) };
    let trivial: HashSet<u16> =
        std::iter::once(0).chain(proj.iter().map(|&p| normalize(p))).collect();

    let mut canon_cache: HashMap<u16, (u16, NpnTransform)> = HashMap::new();
    let canon = |t: u16, cache: &mut HashMap<u16, (u16, NpnTransform)>| -> (u16, NpnTransform) {
        *cache.entry(t & mask).or_insert_with(|| npn_canonicalize(t, k))
    };

    let mut templates: BTreeMap<u16, Template> = BTreeMap::new();
    let record = |table: u16,
                      template: &Template,
                      templates: &mut BTreeMap<u16, Template>,
                      cache: &mut HashMap<u16, (u16, NpnTransform)>| {
        let (class, tr) = canon(table, cache);
        templates.entry(class).or_insert_with(|| {
            let rewired = template.rewire(&tr, k).pruned(k);
            debug_assert_eq!(rewired.simulate(k), class);
            rewired
        });
    };

    // Zero-node classes: the constant and the projections.
    let empty = Template { steps: Vec::new(), output: TemplateRef::CONST0 };
    record(0, &empty, &mut templates, &mut canon_cache);
    for (i, &p) in proj.iter().enumerate() {
        let t = Template { steps: Vec::new(), output: TemplateRef::leaf(i) };
        record(p, &t, &mut templates, &mut canon_cache);
    }

    // Total class count, used for early exit; enumerable cheaply for k <= 3.
    let total_classes: Option<usize> = (k <= 3).then(|| {
        let mut set = HashSet::new();
        for t in 0..=mask {
            set.insert(canon(t, &mut canon_cache).0);
        }
        set.len()
    });

    #[derive(Clone)]
    struct State {
        /// Complement-normalized step functions, sorted (the dedup key).
        funcs: Vec<u16>,
        /// Actual table of each step, in construction order.
        tables: Vec<u16>,
        steps: Vec<(TemplateRef, TemplateRef)>,
    }

    let pack = |funcs: &[u16]| -> u128 {
        funcs.iter().enumerate().fold(funcs.len() as u128, |acc, (i, &f)| {
            acc | (f as u128) << (16 * i + 8)
        })
    };

    let enum_depth = bound.min(enum_depth_cap(k));
    let mut frontier = vec![State { funcs: Vec::new(), tables: Vec::new(), steps: Vec::new() }];
    let mut seen: HashSet<u128> = HashSet::new();

    'levels: for level in 0..enum_depth {
        let store_next = level + 1 < enum_depth;
        let mut next: Vec<State> = Vec::new();
        for state in &frontier {
            let num_signals = k + state.steps.len();
            let table_of = |s: usize| -> u16 {
                if s < k { proj[s] } else { state.tables[s - k] }
            };
            for s1 in 0..num_signals {
                for s2 in s1 + 1..num_signals {
                    for pol in 0..4u8 {
                        let mut t1 = table_of(s1);
                        let mut t2 = table_of(s2);
                        if pol & 1 != 0 {
                            t1 = !t1 & mask;
                        }
                        if pol & 2 != 0 {
                            t2 = !t2 & mask;
                        }
                        let t = t1 & t2;
                        let n = normalize(t);
                        if trivial.contains(&n) || state.funcs.contains(&n) {
                            continue;
                        }
                        let to_ref = |s: usize, c: bool| -> TemplateRef {
                            if s < k {
                                TemplateRef::leaf(s).xor(c)
                            } else {
                                TemplateRef::step(k, s - k).xor(c)
                            }
                        };
                        let step = (to_ref(s1, pol & 1 != 0), to_ref(s2, pol & 2 != 0));

                        let mut funcs = state.funcs.clone();
                        let pos = funcs.partition_point(|&f| f < n);
                        funcs.insert(pos, n);
                        if !seen.insert(pack(&funcs)) {
                            continue;
                        }

                        let mut steps = state.steps.clone();
                        steps.push(step);
                        let candidate = Template {
                            steps: steps.clone(),
                            output: TemplateRef::step(k, steps.len() - 1),
                        };
                        record(t, &candidate, &mut templates, &mut canon_cache);
                        if let Some(total) = total_classes {
                            if templates.len() == total {
                                break 'levels;
                            }
                        }
                        if store_next {
                            let mut tables = state.tables.clone();
                            tables.push(t);
                            next.push(State { funcs, tables, steps });
                        }
                    }
                }
            }
        }
        if !store_next {
            break;
        }
        frontier = next;
    }

    Ok(RewriteLibrary { k, bound, enum_depth, templates })
}

impl RewriteLibrary {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn enum_depth(&self) -> usize {
        self.enum_depth
    }

    /// Classes reached by enumeration (the rest are served by Shannon
    /// fallback).
    pub fn coverage(&self) -> usize {
        self.templates.len()
    }

    /// The template enumerated for a canonical class, if any.
    pub fn enumerated(&self, class: u16) -> Option<&Template> {
        self.templates.get(&class)
    }

    /// A template for the canonical class: the enumerated minimal one when
    /// available, otherwise a Shannon decomposition built on demand.
    pub fn template_for(&self, class: u16) -> Template {
        match self.templates.get(&class) {
            Some(t) => t.clone(),
            None => shannon_template(class, self.k),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"ARWL");
        out.extend_from_slice(&1u16.to_le_bytes());
        out.push(self.k as u8);
        out.push(self.bound as u8);
        out.push(self.enum_depth as u8);
        out.extend_from_slice(&(self.templates.len() as u32).to_le_bytes());
        for (&class, t) in &self.templates {
            out.extend_from_slice(&class.to_le_bytes());
            out.push(t.steps.len() as u8);
            for &(a, b) in &t.steps {
                out.push(a.raw());
                out.push(b.raw());
            }
            out.push(t.output.raw());
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<RewriteLibrary, LibraryError> {
        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8], LibraryError> {
            if pos + n > data.len() {
                return Err(LibraryError::Corrupt("truncated".into()));
            }
            let s = &data[pos..pos + n];
            pos += n;
            Ok(s)
        };
        if take(4)? != b"ARWL" {
            return Err(LibraryError::Corrupt("bad magic".into()));
        }
        let version = u16::from_le_bytes(take(2)?.try_into().unwrap());
        if version != 1 {
            return Err(LibraryError::Corrupt(format!("unsupported version {version}")));
        }
        let k = take(1)?[0] as usize;
        if k == 0 || k > 4 {
            return Err(LibraryError::UnsupportedK(k));
        }
        let bound = take(1)?[0] as usize;
        let enum_depth = take(1)?[0] as usize;
        let count = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        let mut templates = BTreeMap::new();
        for _ in 0..count {
            let class = u16::from_le_bytes(take(2)?.try_into().unwrap());
            let nsteps = take(1)?[0] as usize;
            let mut steps = Vec::with_capacity(nsteps);
            for _ in 0..nsteps {
                let a = TemplateRef::from_raw(take(1)?[0]);
                let b = TemplateRef::from_raw(take(1)?[0]);
                steps.push((a, b));
            }
            let output = TemplateRef::from_raw(take(1)?[0]);
            let t = Template { steps, output };
            if t.simulate(k) != class {
                return Err(LibraryError::Corrupt(format!(
                    "template for class {class:#06x} does not simulate to its key"
                )));
            }
            templates.insert(class, t);
        }
        Ok(RewriteLibrary { k, bound, enum_depth, templates })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), LibraryError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<RewriteLibrary, LibraryError> {
        RewriteLibrary::from_bytes(&std::fs::read(path)?)
    }

    /// Textual form for diffing.
    pub fn dump(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "rewrite library k={} bound={} enum_depth={} classes={}",
            self.k,
            self.bound,
            self.enum_depth,
            self.templates.len()
        );
        for (class, t) in &self.templates {
            let _ = write!(out, "{class:#06x} nodes={}", t.node_count());
            for (j, (a, b)) in t.steps.iter().enumerate() {
                let _ = write!(out, " s{}=AND({:?},{:?})", self.k + 1 + j, a, b);
            }
            let _ = writeln!(out, " out={:?}", t.output);
        }
        out
    }
}

/// Recursive Shannon decomposition of a table into a template, splitting
/// on the variable that minimizes the larger cofactor's support (ties to
/// the lowest index), with constant-cofactor shortcuts and structural
/// sharing of repeated subfunctions.
pub fn shannon_template(table: u16, k: usize) -> Template {
    let mut b = TemplateBuilder::new(k);
    let output = b.build(table & table_mask(k));
    Template { steps: b.steps, output }
}

struct TemplateBuilder {
    k: usize,
    mask: u16,
    proj: Vec<u16>,
    steps: Vec<(TemplateRef, TemplateRef)>,
    strash: HashMap<(TemplateRef, TemplateRef), TemplateRef>,
    memo: HashMap<u16, TemplateRef>,
}

impl TemplateBuilder {
    fn new(k: usize) -> Self {
        TemplateBuilder {
            k,
            mask: table_mask(k),
            proj: projections(k),
            steps: Vec::new(),
            strash: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn cofactors(&self, t: u16, v: usize) -> (u16, u16) {
        let m = self.proj[v];
        let shift = 1usize << v;
        let lo = t & !m;
        let hi = t & m;
        (((lo | lo << shift) & self.mask), ((hi | hi >> shift) & self.mask))
    }

    fn support(&self, t: u16) -> Vec<usize> {
        (0..self.k)
            .filter(|&v| {
                let (c0, c1) = self.cofactors(t, v);
                c0 != c1
            })
            .collect()
    }

    fn and(&mut self, a: TemplateRef, b: TemplateRef) -> TemplateRef {
        if a == TemplateRef::CONST1 {
            return b;
        }
        if b == TemplateRef::CONST1 {
            return a;
        }
        if a == TemplateRef::CONST0 || b == TemplateRef::CONST0 {
            return TemplateRef::CONST0;
        }
        if a == b {
            return a;
        }
        if a == !b {
            return TemplateRef::CONST0;
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.strash.get(&key) {
            return r;
        }
        let r = TemplateRef::step(self.k, self.steps.len());
        self.steps.push(key);
        self.strash.insert(key, r);
        r
    }

    fn or(&mut self, a: TemplateRef, b: TemplateRef) -> TemplateRef {
        !self.and(!a, !b)
    }

    fn build(&mut self, t: u16) -> TemplateRef {
        if t == 0 {
            return TemplateRef::CONST0;
        }
        if t == self.mask {
            return TemplateRef::CONST1;
        }
        for v in 0..self.k {
            if t == self.proj[v] {
                return TemplateRef::leaf(v);
            }
            if t == !self.proj[v] & self.mask {
                return !TemplateRef::leaf(v);
            }
        }
        if let Some(&r) = self.memo.get(&t) {
            return r;
        }
        let support = self.support(t);
        let split = support
            .iter()
            .copied()
            .min_by_key(|&v| {
                let (c0, c1) = self.cofactors(t, v);
                self.support(c0).len().max(self.support(c1).len())
            })
            .expect("nonconstant table has support");
        let (c0, c1) = self.cofactors(t, split);
        let x = TemplateRef::leaf(split);
        let r = if c1 == self.mask {
            let s0 = self.build(c0);
            self.or(x, s0)
        } else if c1 == 0 {
            let s0 = self.build(c0);
            self.and(!x, s0)
        } else if c0 == self.mask {
            let s1 = self.build(c1);
            self.or(!x, s1)
        } else if c0 == 0 {
            let s1 = self.build(c1);
            self.and(x, s1)
        } else {
            let s0 = self.build(c0);
            let s1 = self.build(c1);
            let p = self.and(x, s1);
            let q = self.and(!x, s0);
            self.or(p, q)
        };
        self.memo.insert(t, r);
        self.memo.insert(!t & self.mask, !r);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use aig::SplitMix64;

    #[test]
    fn k2_library_covers_all_functions() {
        let lib = build_rewrite_library(2, 7).unwrap();
        for t in 0..16u16 {
            let (class, tr) = npn_canonicalize(t, 2);
            let template = lib.template_for(class);
            assert_eq!(template.simulate(2), class, "class {class:#x} of {t:#x}");
            let _ = tr;
        }
        // The AND class is realized with a single node.
        let (and_class, _) = npn_canonicalize(0b1000, 2);
        assert_eq!(lib.template_for(and_class).node_count(), 1);
        // XOR needs the full three-node form.
        let (xor_class, _) = npn_canonicalize(0b0110, 2);
        assert_eq!(lib.template_for(xor_class).node_count(), 3);
    }

    #[test]
    fn shannon_fallback_simulates_to_its_table() {
        let mut rng = SplitMix64(11);
        for _ in 0..300 {
            let t = rng.next_u64() as u16;
            let template = shannon_template(t, 4);
            assert_eq!(template.simulate(4), t);
        }
    }

    #[test]
    fn serialization_round_trips() {
        let lib = build_rewrite_library(3, 7).unwrap();
        let bytes = lib.to_bytes();
        let back = RewriteLibrary::from_bytes(&bytes).unwrap();
        assert_eq!(lib.k(), back.k());
        assert_eq!(lib.coverage(), back.coverage());
        assert_eq!(lib.dump(), back.dump());
    }

    #[test]
    fn corrupt_data_is_rejected() {
        let lib = build_rewrite_library(2, 7).unwrap();
        let mut bytes = lib.to_bytes();
        assert!(RewriteLibrary::from_bytes(&bytes[..5]).is_err());
        bytes[0] = b'X';
        assert!(RewriteLibrary::from_bytes(&bytes).is_err());
    }

    #[test]
    fn unsupported_width_is_rejected() {
        assert!(matches!(build_rewrite_library(5, 7), Err(LibraryError::UnsupportedK(5))));
    }
}
