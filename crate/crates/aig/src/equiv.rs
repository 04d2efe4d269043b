//! Simulation-based combinational equivalence checking.

use std::collections::BTreeMap;

use crate::sim::{exhaustive_patterns, random_patterns, words_for};
use crate::{Aig, AigError};

#[derive(Clone, Debug)]
pub struct EquivConfig {
    /// Exhaustive simulation is used up to this many inputs.
    pub max_exhaustive_pis: usize,
    /// Number of random patterns beyond the exhaustive limit.
    pub random_patterns: usize,
    pub seed: u64,
}

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig { max_exhaustive_pis: 14, random_patterns: 4096, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    /// Proven by exhaustive simulation.
    Equivalent,
    /// A differing input assignment, by input name.
    NotEquivalent { counterexample: BTreeMap<String, bool> },
    /// Random simulation found no difference.
    ProbablyEquivalent { patterns: usize },
}

/// Checks two graphs for functional equivalence.
///
/// Inputs are matched by name (order-insensitive) and so are outputs; a
/// mismatch in either name set is an interface error, not a verdict.
/// With at most `max_exhaustive_pis` inputs the check simulates all `2^n`
/// assignments and is a proof; otherwise it draws seeded random patterns.
pub fn check_equiv(a: &Aig, b: &Aig, cfg: &EquivConfig) -> Result<EquivVerdict, AigError> {
    let b_input_pos: BTreeMap<&str, usize> = b
        .input_names()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    if a.num_inputs() != b.num_inputs() || b_input_pos.len() != b.num_inputs() {
        return Err(AigError::InputMismatch(format!(
            "{} vs {} inputs",
            a.num_inputs(),
            b.num_inputs()
        )));
    }
    // b's input row for each of a's input positions.
    let mut remap = Vec::with_capacity(a.num_inputs());
    for name in a.input_names() {
        match b_input_pos.get(name.as_str()) {
            Some(&i) => remap.push(i),
            None => return Err(AigError::InputMismatch(format!("missing input {name}"))),
        }
    }
    let b_output_pos: BTreeMap<&str, usize> = b
        .outputs()
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.as_str(), i))
        .collect();
    if a.num_outputs() != b.num_outputs() || b_output_pos.len() != b.num_outputs() {
        return Err(AigError::OutputMismatch(format!(
            "{} vs {} outputs",
            a.num_outputs(),
            b.num_outputs()
        )));
    }
    let mut out_pairs = Vec::with_capacity(a.num_outputs());
    for (i, (name, _)) in a.outputs().iter().enumerate() {
        match b_output_pos.get(name.as_str()) {
            Some(&j) => out_pairs.push((i, j)),
            None => return Err(AigError::OutputMismatch(format!("missing output {name}"))),
        }
    }

    let n = a.num_inputs();
    let exhaustive = n <= cfg.max_exhaustive_pis;
    let (rows_a, num_patterns) = if exhaustive {
        (exhaustive_patterns(n), 1usize << n)
    } else {
        (random_patterns(n, cfg.random_patterns, cfg.seed), cfg.random_patterns)
    };
    let rows_b: Vec<Vec<u64>> = (0..n)
        .map(|bi| {
            let ai = remap.iter().position(|&r| r == bi).expect("bijective remap");
            rows_a[ai].clone()
        })
        .collect();

    let outs_a = a.simulate_words(&rows_a)?;
    let outs_b = b.simulate_words(&rows_b)?;

    let words = words_for(num_patterns);
    let tail_mask = if num_patterns % 64 == 0 { u64::MAX } else { (1u64 << (num_patterns % 64)) - 1 };
    for &(i, j) in &out_pairs {
        for w in 0..words {
            let mut diff = outs_a[i][w] ^ outs_b[j][w];
            if w == words - 1 {
                diff &= tail_mask;
            }
            if diff != 0 {
                let p = w * 64 + diff.trailing_zeros() as usize;
                let counterexample: BTreeMap<String, bool> = a
                    .input_names()
                    .iter()
                    .enumerate()
                    .map(|(ai, name)| (name.clone(), rows_a[ai][w] >> (p % 64) & 1 != 0))
                    .collect();
                debug_assert!(counterexample_differs(a, b, &counterexample));
                return Ok(EquivVerdict::NotEquivalent { counterexample });
            }
        }
    }
    Ok(if exhaustive {
        EquivVerdict::Equivalent
    } else {
        EquivVerdict::ProbablyEquivalent { patterns: num_patterns }
    })
}

/// Re-simulates a counterexample and reports whether the outputs differ.
pub fn counterexample_differs(a: &Aig, b: &Aig, assignment: &BTreeMap<String, bool>) -> bool {
    let single = |g: &Aig| -> Option<BTreeMap<String, bool>> {
        let patterns: Vec<Vec<bool>> = g
            .input_names()
            .iter()
            .map(|n| assignment.get(n).map(|&b| vec![b]))
            .collect::<Option<_>>()?;
        let outs = g.simulate(&patterns).ok()?;
        Some(
            g.outputs()
                .iter()
                .zip(outs)
                .map(|((name, _), row)| (name.clone(), row[0]))
                .collect(),
        )
    };
    match (single(a), single(b)) {
        (Some(oa), Some(ob)) => oa != ob,
        _ => false,
    }
}
