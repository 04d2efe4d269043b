//! Overlap analysis of the best recipes across designs.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("designs were evaluated on different recipe sets: {0}")]
    RecipeSetMismatch(String),

    #[error("need at least one design with at least one recipe result")]
    Empty,
}

/// Pairwise top-set overlap, symmetric with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    pub designs: Vec<String>,
    /// Row-major `designs.len() x designs.len()` entries in [0, 1].
    pub values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.designs.len() + j]
    }

    /// CSV with a header row/column of design names.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("design");
        for name in &self.designs {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, name) in self.designs.iter().enumerate() {
            out.push_str(name);
            for j in 0..self.designs.len() {
                out.push_str(&format!(",{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// For each design, ranks recipes by quality (lower is better, ties by
/// recipe id) and takes the best `percent` as a set; entry (i, j) is the
/// fractional overlap of the two top sets.
pub fn top_k_similarity(
    results: &BTreeMap<String, BTreeMap<u32, f64>>,
    percent: f64,
) -> Result<SimilarityMatrix, SimilarityError> {
    if results.is_empty() || results.values().next().unwrap().is_empty() {
        return Err(SimilarityError::Empty);
    }
    let reference: Vec<u32> = results.values().next().unwrap().keys().copied().collect();
    for (design, table) in results {
        let ids: Vec<u32> = table.keys().copied().collect();
        if ids != reference {
            return Err(SimilarityError::RecipeSetMismatch(design.clone()));
        }
    }
    let top_n = ((reference.len() as f64 * percent / 100.0).floor() as usize).max(1);

    let top_sets: Vec<(String, Vec<u32>)> = results
        .iter()
        .map(|(design, table)| {
            let mut ranked: Vec<(u32, f64)> = table.iter().map(|(&id, &q)| (id, q)).collect();
            ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            let mut top: Vec<u32> = ranked.iter().take(top_n).map(|&(id, _)| id).collect();
            top.sort_unstable();
            (design.clone(), top)
        })
        .collect();

    let n = top_sets.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let overlap = intersection_size(&top_sets[i].1, &top_sets[j].1);
            values[i * n + j] = overlap as f64 / top_n as f64;
        }
    }
    Ok(SimilarityMatrix { designs: top_sets.into_iter().map(|(d, _)| d).collect(), values })
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}
