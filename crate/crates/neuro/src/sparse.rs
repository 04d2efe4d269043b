use std::rc::Rc;

use crate::tensor::{Op, Tensor};

/// Compressed sparse row matrix; here always square and symmetric (the
/// normalized adjacency).
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    /// `self . x` for dense `[n x d]` input, recorded for backward.
    pub fn matmul(self: &Rc<Self>, x: &Tensor) -> Tensor {
        assert_eq!(x.shape()[0], self.n, "adjacency size mismatch");
        let d = x.shape()[1];
        let xv = x.values();
        let mut out = vec![0.0; self.n * d];
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                for c in 0..d {
                    out[i * d + c] += w * xv[j * d + c];
                }
            }
        }
        drop(xv);
        Tensor::new(vec![self.n, d], out, Op::SpMm(self.clone(), x.clone()))
    }
}

/// Symmetric-normalized adjacency with self-loops:
/// `A_hat = D^(-1/2) (A + I) D^(-1/2)` over the undirected version of the
/// edge list. Entry (i, j) is `1 / sqrt(d_i d_j)` with `d` counting the
/// self-loop; an isolated node maps to weight 1.
pub fn normalized_adjacency(num_nodes: usize, edges: &[(u32, u32)]) -> Rc<CsrMatrix> {
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
    for &(u, v) in edges {
        let (u, v) = (u as usize, v as usize);
        assert!(u < num_nodes && v < num_nodes, "edge ({u},{v}) out of range");
        if u != v {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<f64> = neighbors.iter().map(|l| 1.0 + l.len() as f64).collect();

    let mut row_ptr = Vec::with_capacity(num_nodes + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for i in 0..num_nodes {
        // Self-loop plus sorted neighbors, keeping column order sorted.
        let mut inserted_self = false;
        for &j in &neighbors[i] {
            if !inserted_self && j > i {
                cols.push(i);
                vals.push(1.0 / degree[i]);
                inserted_self = true;
            }
            cols.push(j);
            vals.push(1.0 / (degree[i] * degree[j]).sqrt());
        }
        if !inserted_self {
            cols.push(i);
            vals.push(1.0 / degree[i]);
        }
        row_ptr.push(cols.len());
    }
    Rc::new(CsrMatrix { n: num_nodes, row_ptr, cols, vals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_node_with_self_loop_is_identity() {
        let adj = normalized_adjacency(1, &[]);
        let x = Tensor::from_vec(vec![1, 2], vec![3.0, -1.0]);
        let y = adj.matmul(&x);
        assert_eq!(y.to_vec(), vec![3.0, -1.0]);
    }

    #[test]
    fn rows_sum_finite_and_symmetric() {
        let adj = normalized_adjacency(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        for i in 0..4 {
            for (j, w) in adj.row(i) {
                assert!(w.is_finite() && w > 0.0);
                let back: Vec<(usize, f64)> = adj.row(j).collect();
                let mirrored = back.iter().find(|(c, _)| *c == i).expect("symmetric entry");
                assert!((mirrored.1 - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_node_pair_normalization() {
        // Both nodes have degree 2 (self-loop + edge): off-diagonal 1/2.
        let adj = normalized_adjacency(2, &[(0, 1)]);
        let entries: Vec<(usize, f64)> = adj.row(0).collect();
        assert_eq!(entries.len(), 2);
        assert!((entries[0].1 - 0.5).abs() < 1e-15);
        assert!((entries[1].1 - 0.5).abs() < 1e-15);
    }
}
