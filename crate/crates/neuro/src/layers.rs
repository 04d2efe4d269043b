use std::cell::RefCell;
use std::rc::Rc;

use rand_chacha::ChaCha8Rng;

use crate::init::glorot_uniform;
use crate::sparse::CsrMatrix;
use crate::tensor::{BatchNormRecord, Conv1dRecord, Op, Tensor};

/// Affine layer `x . W + b` with `W: [in x out]`.
pub struct Linear {
    pub weight: Tensor,
    pub bias: Tensor,
}

impl Linear {
    pub fn new(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> Linear {
        Linear {
            weight: glorot_uniform(rng, fan_in, fan_out, vec![fan_in, fan_out]),
            bias: Tensor::zeros(vec![fan_out]),
        }
    }

    pub fn forward(&self, x: &Tensor) -> Tensor {
        x.matmul(&self.weight).add_row(&self.bias)
    }

    pub fn params(&self) -> Vec<Tensor> {
        vec![self.weight.clone(), self.bias.clone()]
    }
}

/// Per-column batch normalization with running statistics.
///
/// Training mode normalizes with biased batch statistics and folds them
/// into the running buffers; eval mode uses the running statistics. With
/// fresh buffers (mean 0, var 1) eval mode is the identity up to
/// gamma/beta.
pub struct BatchNorm {
    pub gamma: Tensor,
    pub beta: Tensor,
    pub running_mean: Rc<RefCell<Vec<f64>>>,
    pub running_var: Rc<RefCell<Vec<f64>>>,
    pub momentum: f64,
    pub eps: f64,
}

impl BatchNorm {
    pub fn new(dim: usize) -> BatchNorm {
        BatchNorm {
            gamma: Tensor::from_vec(vec![dim], vec![1.0; dim]),
            beta: Tensor::zeros(vec![dim]),
            running_mean: Rc::new(RefCell::new(vec![0.0; dim])),
            running_var: Rc::new(RefCell::new(vec![1.0; dim])),
            momentum: 0.1,
            eps: 1e-5,
        }
    }

    pub fn forward(&self, x: &Tensor, training: bool) -> Tensor {
        let (n, d) = (x.shape()[0], x.shape()[1]);
        assert_eq!(d, self.gamma.len());
        let xv = x.values();
        let (mean, var) = if training {
            let mut mean = vec![0.0; d];
            let mut var = vec![0.0; d];
            for i in 0..n {
                for j in 0..d {
                    mean[j] += xv[i * d + j];
                }
            }
            for m in &mut mean {
                *m /= n as f64;
            }
            for i in 0..n {
                for j in 0..d {
                    let c = xv[i * d + j] - mean[j];
                    var[j] += c * c;
                }
            }
            for v in &mut var {
                *v /= n as f64;
            }
            {
                let mut rm = self.running_mean.borrow_mut();
                let mut rv = self.running_var.borrow_mut();
                for j in 0..d {
                    rm[j] = (1.0 - self.momentum) * rm[j] + self.momentum * mean[j];
                    rv[j] = (1.0 - self.momentum) * rv[j] + self.momentum * var[j];
                }
            }
            (mean, var)
        } else {
            (self.running_mean.borrow().clone(), self.running_var.borrow().clone())
        };
        let inv_std: Vec<f64> = var.iter().map(|&v| 1.0 / (v + self.eps).sqrt()).collect();
        let gv = self.gamma.values();
        let bv = self.beta.values();
        let mut out = vec![0.0; n * d];
        for i in 0..n {
            for j in 0..d {
                let xhat = (xv[i * d + j] - mean[j]) * inv_std[j];
                out[i * d + j] = gv[j] * xhat + bv[j];
            }
        }
        drop(xv);
        drop(gv);
        drop(bv);
        Tensor::new(
            vec![n, d],
            out,
            Op::BatchNorm(Box::new(BatchNormRecord {
                x: x.clone(),
                gamma: self.gamma.clone(),
                beta: self.beta.clone(),
                mean,
                inv_std,
                training,
            })),
        )
    }

    pub fn params(&self) -> Vec<Tensor> {
        vec![self.gamma.clone(), self.beta.clone()]
    }
}

/// Graph convolution: `ReLU(BN(A_hat . (X . W) + b))`.
pub struct GcnLayer {
    pub linear: Linear,
    pub bn: BatchNorm,
}

impl GcnLayer {
    pub fn new(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> GcnLayer {
        GcnLayer { linear: Linear::new(rng, fan_in, fan_out), bn: BatchNorm::new(fan_out) }
    }

    pub fn forward(&self, adj: &Rc<CsrMatrix>, x: &Tensor, training: bool) -> Tensor {
        let propagated = adj.matmul(&x.matmul(&self.linear.weight)).add_row(&self.linear.bias);
        self.bn.forward(&propagated, training).relu()
    }

    pub fn params(&self) -> Vec<Tensor> {
        let mut p = self.linear.params();
        p.extend(self.bn.params());
        p
    }
}

/// Concatenated per-graph max and mean over node rows: `[n x d]` with
/// segment ids -> `[g x 2d]`.
pub fn global_max_mean_pool(x: &Tensor, segments: &Rc<Vec<usize>>, num_segments: usize) -> Tensor {
    let (n, d) = (x.shape()[0], x.shape()[1]);
    assert_eq!(segments.len(), n);
    let xv = x.values();
    let mut max = vec![f64::NEG_INFINITY; num_segments * d];
    let mut argmax = vec![usize::MAX; num_segments * d];
    let mut sum = vec![0.0; num_segments * d];
    let mut counts = vec![0usize; num_segments];
    for (row, &s) in segments.iter().enumerate() {
        assert!(s < num_segments);
        counts[s] += 1;
        for c in 0..d {
            let v = xv[row * d + c];
            if v > max[s * d + c] {
                max[s * d + c] = v;
                argmax[s * d + c] = row;
            }
            sum[s * d + c] += v;
        }
    }
    for (s, &count) in counts.iter().enumerate() {
        assert!(count > 0, "segment {s} has no rows");
    }
    let mut out = vec![0.0; num_segments * 2 * d];
    for s in 0..num_segments {
        for c in 0..d {
            out[s * 2 * d + c] = max[s * d + c];
            out[s * 2 * d + d + c] = sum[s * d + c] / counts[s] as f64;
        }
    }
    drop(xv);
    Tensor::new(
        vec![num_segments, 2 * d],
        out,
        Op::SegmentPool { x: x.clone(), segments: segments.clone(), num_segments, argmax },
    )
}

/// A bank of strided 1D convolutions, one single-channel filter per kernel
/// size, outputs concatenated. `[B x len] -> [B x sum((len-k)/s + 1)]`,
/// before any activation.
pub struct Conv1dBank {
    pub kernels: Vec<usize>,
    pub stride: usize,
    pub weights: Vec<Tensor>,
    pub biases: Vec<Tensor>,
}

impl Conv1dBank {
    pub fn new(rng: &mut ChaCha8Rng, kernels: Vec<usize>, stride: usize) -> Conv1dBank {
        let weights =
            kernels.iter().map(|&k| glorot_uniform(rng, k, 1, vec![k])).collect();
        let biases = kernels.iter().map(|_| Tensor::zeros(vec![1])).collect();
        Conv1dBank { kernels, stride, weights, biases }
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        self.kernels.iter().map(|&k| (input_len - k) / self.stride + 1).sum()
    }

    /// Pre-activation filter responses.
    pub fn forward_raw(&self, x: &Tensor) -> Tensor {
        let (batch, len) = (x.shape()[0], x.shape()[1]);
        let total = self.output_len(len);
        let xv = x.values();
        let mut out = vec![0.0; batch * total];
        let mut offset = 0;
        for (fi, &k) in self.kernels.iter().enumerate() {
            let outs = (len - k) / self.stride + 1;
            let wv = self.weights[fi].values();
            let b = self.biases[fi].values()[0];
            for row in 0..batch {
                for o in 0..outs {
                    let start = o * self.stride;
                    let mut acc = b;
                    for t in 0..k {
                        acc += wv[t] * xv[row * len + start + t];
                    }
                    out[row * total + offset + o] = acc;
                }
            }
            offset += outs;
        }
        drop(xv);
        Tensor::new(
            vec![batch, total],
            out,
            Op::Conv1d(Box::new(Conv1dRecord {
                x: x.clone(),
                weights: self.weights.clone(),
                biases: self.biases.clone(),
                kernels: self.kernels.clone(),
                stride: self.stride,
            })),
        )
    }

    /// Filter responses with ReLU applied.
    pub fn forward(&self, x: &Tensor) -> Tensor {
        self.forward_raw(x).relu()
    }

    pub fn params(&self) -> Vec<Tensor> {
        self.weights.iter().chain(self.biases.iter()).cloned().collect()
    }
}

/// Learned step embedding: ids `[B x L]` gathered from a `[vocab x dim]`
/// table and flattened to `[B x L*dim]` in step order.
pub struct Embedding {
    pub table: Tensor,
}

impl Embedding {
    pub fn new(rng: &mut ChaCha8Rng, vocab: usize, dim: usize) -> Embedding {
        Embedding { table: glorot_uniform(rng, vocab, dim, vec![vocab, dim]) }
    }

    pub fn forward(&self, ids: &[Vec<u8>]) -> Tensor {
        let batch = ids.len();
        let len = ids.first().map_or(0, |r| r.len());
        let flat: Vec<usize> = ids
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), len, "ragged id batch");
                row.iter().map(|&v| v as usize)
            })
            .collect();
        let dim = self.table.shape()[1];
        self.table.gather_rows(Rc::new(flat)).reshape(vec![batch, len * dim])
    }

    pub fn params(&self) -> Vec<Tensor> {
        vec![self.table.clone()]
    }
}

/// Mean squared error over flattened entries.
pub fn mse(pred: &Tensor, target: &Tensor) -> Tensor {
    let diff = pred.sub(target);
    diff.mul(&diff).mean_all()
}
