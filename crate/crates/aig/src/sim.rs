use crate::{Aig, AigError, Node};

/// SplitMix64: a tiny deterministic generator for simulation patterns.
/// Stable across platforms and versions, which keeps equivalence checks
/// and tests reproducible without external dependencies.
#[derive(Clone, Debug)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

/// Number of 64-bit words needed for `n` patterns.
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// One row per variable covering all `2^n` assignments: bit `p` of row `i`
/// is bit `i` of the pattern index `p`.
pub fn exhaustive_patterns(num_vars: usize) -> Vec<Vec<u64>> {
    assert!(num_vars <= 32, "exhaustive patterns limited to 32 variables");
    let num_patterns = 1usize << num_vars;
    let words = words_for(num_patterns);
    const MASKS: [u64; 6] = [
        0xaaaa_aaaa_aaaa_aaaa,
        0xcccc_cccc_cccc_cccc,
        0xf0f0_f0f0_f0f0_f0f0,
        0xff00_ff00_ff00_ff00,
        0xffff_0000_ffff_0000,
        0xffff_ffff_0000_0000,
    ];
    (0..num_vars)
        .map(|i| {
            (0..words)
                .map(|w| {
                    if i < 6 {
                        MASKS[i]
                    } else if (w >> (i - 6)) & 1 != 0 {
                        u64::MAX
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

/// Seeded random rows, one per variable.
pub fn random_patterns(num_vars: usize, num_patterns: usize, seed: u64) -> Vec<Vec<u64>> {
    let words = words_for(num_patterns);
    let mut rng = SplitMix64(seed);
    (0..num_vars)
        .map(|_| (0..words).map(|_| rng.next_u64()).collect())
        .collect()
}

impl Aig {
    /// Bit-parallel simulation over 64-bit pattern words.
    ///
    /// `inputs` holds one row per primary input, all rows the same width.
    /// Returns one row per output, in declaration order.
    pub fn simulate_words(&self, inputs: &[Vec<u64>]) -> Result<Vec<Vec<u64>>, AigError> {
        if inputs.len() != self.num_inputs() {
            return Err(AigError::PatternRows {
                expected: self.num_inputs(),
                got: inputs.len(),
            });
        }
        let words = inputs.first().map_or(0, |r| r.len());
        for row in inputs {
            if row.len() != words {
                return Err(AigError::PatternWidth(words, row.len()));
            }
        }
        let mut values: Vec<Vec<u64>> = Vec::with_capacity(self.num_nodes());
        for (_, node) in self.nodes() {
            let row = match node {
                Node::Const0 => vec![0u64; words],
                Node::Input(k) => inputs[k].clone(),
                Node::And(f0, f1) => {
                    let a = &values[f0.node()];
                    let b = &values[f1.node()];
                    let ca = if f0.is_complemented() { u64::MAX } else { 0 };
                    let cb = if f1.is_complemented() { u64::MAX } else { 0 };
                    (0..words).map(|w| (a[w] ^ ca) & (b[w] ^ cb)).collect()
                }
            };
            values.push(row);
        }
        Ok(self
            .outputs()
            .iter()
            .map(|(_, lit)| {
                let v = &values[lit.node()];
                let c = if lit.is_complemented() { u64::MAX } else { 0 };
                v.iter().map(|w| w ^ c).collect()
            })
            .collect())
    }

    /// Boolean-matrix convenience wrapper around [`Aig::simulate_words`].
    pub fn simulate(&self, patterns: &[Vec<bool>]) -> Result<Vec<Vec<bool>>, AigError> {
        let num_patterns = patterns.first().map_or(0, |r| r.len());
        for row in patterns {
            if row.len() != num_patterns {
                return Err(AigError::PatternWidth(num_patterns, row.len()));
            }
        }
        let words = words_for(num_patterns);
        let packed: Vec<Vec<u64>> = patterns
            .iter()
            .map(|row| {
                let mut out = vec![0u64; words];
                for (p, &bit) in row.iter().enumerate() {
                    if bit {
                        out[p / 64] |= 1 << (p % 64);
                    }
                }
                out
            })
            .collect();
        let out_words = self.simulate_words(&packed)?;
        Ok(out_words
            .into_iter()
            .map(|row| {
                (0..num_patterns)
                    .map(|p| row[p / 64] >> (p % 64) & 1 != 0)
                    .collect()
            })
            .collect())
    }
}
