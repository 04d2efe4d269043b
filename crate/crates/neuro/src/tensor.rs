use std::cell::{Ref, RefCell};
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::sparse::CsrMatrix;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// A dense f64 tensor with reverse-mode derivative tracking.
///
/// Cloning is cheap (shared buffer). Values are interior-mutable so an
/// optimizer can update parameters in place between steps; each forward
/// pass records a fresh operation graph over the same parameter tensors.
#[derive(Clone)]
pub struct Tensor(Rc<Inner>);

pub(crate) struct Inner {
    id: u64,
    shape: Vec<usize>,
    values: RefCell<Vec<f64>>,
    grad: RefCell<Vec<f64>>,
    op: Op,
}

pub(crate) enum Op {
    Leaf,
    Add(Tensor, Tensor),
    Sub(Tensor, Tensor),
    Mul(Tensor, Tensor),
    Scale(Tensor, f64),
    Relu(Tensor),
    MatMul(Tensor, Tensor),
    /// Row-broadcast bias add: [n x d] + [d].
    AddRow(Tensor, Tensor),
    SpMm(Rc<CsrMatrix>, Tensor),
    Reshape(Tensor),
    /// Column-wise concatenation of equal-row tensors.
    ConcatCols(Vec<Tensor>),
    /// Row gather from a [v x d] table.
    GatherRows(Tensor, Rc<Vec<usize>>),
    /// Per-segment max+mean pooling; argmax rows recorded at forward time.
    SegmentPool { x: Tensor, segments: Rc<Vec<usize>>, num_segments: usize, argmax: Vec<usize> },
    BatchNorm(Box<BatchNormRecord>),
    Conv1d(Box<Conv1dRecord>),
    MeanAll(Tensor),
}

pub(crate) struct BatchNormRecord {
    pub x: Tensor,
    pub gamma: Tensor,
    pub beta: Tensor,
    /// Per-column statistics used in the forward pass (batch statistics in
    /// training mode, running statistics in eval mode).
    pub mean: Vec<f64>,
    pub inv_std: Vec<f64>,
    pub training: bool,
}

pub(crate) struct Conv1dRecord {
    pub x: Tensor,
    pub weights: Vec<Tensor>,
    pub biases: Vec<Tensor>,
    pub kernels: Vec<usize>,
    pub stride: usize,
}

impl Tensor {
    pub(crate) fn new(shape: Vec<usize>, values: Vec<f64>, op: Op) -> Tensor {
        assert_eq!(
            shape.iter().product::<usize>(),
            values.len(),
            "shape {shape:?} does not match {} values",
            values.len()
        );
        let len = values.len();
        Tensor(Rc::new(Inner {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            shape,
            values: RefCell::new(values),
            grad: RefCell::new(vec![0.0; len]),
            op,
        }))
    }

    pub fn from_vec(shape: impl Into<Vec<usize>>, values: Vec<f64>) -> Tensor {
        Tensor::new(shape.into(), values, Op::Leaf)
    }

    pub fn zeros(shape: impl Into<Vec<usize>>) -> Tensor {
        let shape = shape.into();
        let len = shape.iter().product();
        Tensor::new(shape, vec![0.0; len], Op::Leaf)
    }

    pub fn scalar(v: f64) -> Tensor {
        Tensor::new(vec![1], vec![v], Op::Leaf)
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn shape(&self) -> &[usize] {
        &self.0.shape
    }

    pub fn len(&self) -> usize {
        self.0.values.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> Ref<'_, Vec<f64>> {
        self.0.values.borrow()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.values.borrow().clone()
    }

    pub fn item(&self) -> f64 {
        assert_eq!(self.len(), 1, "item() on non-scalar");
        self.0.values.borrow()[0]
    }

    pub fn grad(&self) -> Vec<f64> {
        self.0.grad.borrow().clone()
    }

    /// Overwrites the stored values (parameter update). Shape must match.
    pub fn set_values(&self, new: &[f64]) {
        let mut v = self.0.values.borrow_mut();
        assert_eq!(v.len(), new.len());
        v.copy_from_slice(new);
    }

    pub fn zero_grad(&self) {
        self.0.grad.borrow_mut().fill(0.0);
    }

    fn rows_cols(&self) -> (usize, usize) {
        match self.shape() {
            [n] => (1, *n),
            [n, d] => (*n, *d),
            s => panic!("expected 1- or 2-dimensional tensor, got {s:?}"),
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.shape(), other.shape());
        let v = zip_map(self, other, |a, b| a + b);
        Tensor::new(self.shape().to_vec(), v, Op::Add(self.clone(), other.clone()))
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.shape(), other.shape());
        let v = zip_map(self, other, |a, b| a - b);
        Tensor::new(self.shape().to_vec(), v, Op::Sub(self.clone(), other.clone()))
    }

    pub fn mul(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.shape(), other.shape());
        let v = zip_map(self, other, |a, b| a * b);
        Tensor::new(self.shape().to_vec(), v, Op::Mul(self.clone(), other.clone()))
    }

    pub fn scale(&self, c: f64) -> Tensor {
        let v = self.values().iter().map(|a| a * c).collect();
        Tensor::new(self.shape().to_vec(), v, Op::Scale(self.clone(), c))
    }

    pub fn relu(&self) -> Tensor {
        let v = self.values().iter().map(|a| a.max(0.0)).collect();
        Tensor::new(self.shape().to_vec(), v, Op::Relu(self.clone()))
    }

    /// `[n x m] . [m x p] -> [n x p]`
    pub fn matmul(&self, other: &Tensor) -> Tensor {
        let (n, m) = self.rows_cols();
        let (m2, p) = other.rows_cols();
        assert_eq!(m, m2, "matmul {:?} x {:?}", self.shape(), other.shape());
        let a = self.values();
        let b = other.values();
        let mut out = vec![0.0; n * p];
        for i in 0..n {
            for k in 0..m {
                let aik = a[i * m + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..p {
                    out[i * p + j] += aik * b[k * p + j];
                }
            }
        }
        drop(a);
        drop(b);
        Tensor::new(vec![n, p], out, Op::MatMul(self.clone(), other.clone()))
    }

    /// Adds a `[d]` row vector to every row of `[n x d]`.
    pub fn add_row(&self, row: &Tensor) -> Tensor {
        let (n, d) = self.rows_cols();
        assert_eq!(row.len(), d);
        let a = self.values();
        let b = row.values();
        let mut out = vec![0.0; n * d];
        for i in 0..n {
            for j in 0..d {
                out[i * d + j] = a[i * d + j] + b[j];
            }
        }
        drop(a);
        drop(b);
        Tensor::new(self.shape().to_vec(), out, Op::AddRow(self.clone(), row.clone()))
    }

    pub fn reshape(&self, shape: impl Into<Vec<usize>>) -> Tensor {
        let shape = shape.into();
        assert_eq!(shape.iter().product::<usize>(), self.len());
        Tensor::new(shape, self.to_vec(), Op::Reshape(self.clone()))
    }

    /// Concatenates tensors with equal row counts along columns.
    pub fn concat_cols(parts: &[Tensor]) -> Tensor {
        assert!(!parts.is_empty());
        let n = parts[0].rows_cols().0;
        let widths: Vec<usize> = parts
            .iter()
            .map(|t| {
                let (rows, cols) = t.rows_cols();
                assert_eq!(rows, n, "row mismatch in concat");
                cols
            })
            .collect();
        let total: usize = widths.iter().sum();
        let mut out = vec![0.0; n * total];
        let mut offset = 0;
        for (t, &w) in parts.iter().zip(&widths) {
            let v = t.values();
            for i in 0..n {
                out[i * total + offset..i * total + offset + w]
                    .copy_from_slice(&v[i * w..(i + 1) * w]);
            }
            offset += w;
        }
        Tensor::new(vec![n, total], out, Op::ConcatCols(parts.to_vec()))
    }

    /// Gathers rows of a `[v x d]` table: output row `i` is table row
    /// `indices[i]`.
    pub fn gather_rows(&self, indices: Rc<Vec<usize>>) -> Tensor {
        let (v, d) = self.rows_cols();
        let table = self.values();
        let mut out = Vec::with_capacity(indices.len() * d);
        for &ix in indices.iter() {
            assert!(ix < v, "gather index {ix} out of range {v}");
            out.extend_from_slice(&table[ix * d..(ix + 1) * d]);
        }
        drop(table);
        Tensor::new(vec![indices.len(), d], out, Op::GatherRows(self.clone(), indices))
    }

    pub fn mean_all(&self) -> Tensor {
        let v = self.values();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        drop(v);
        Tensor::new(vec![1], vec![mean], Op::MeanAll(self.clone()))
    }

    pub(crate) fn op(&self) -> &Op {
        &self.0.op
    }

    pub(crate) fn grad_mut(&self) -> std::cell::RefMut<'_, Vec<f64>> {
        self.0.grad.borrow_mut()
    }
}

fn zip_map(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.values().iter().zip(b.values().iter()).map(|(&x, &y)| f(x, y)).collect()
}

/// Reverse-mode accumulation from a scalar loss.
///
/// Gradients of every tensor reachable from `loss` are zeroed, then
/// accumulated in reverse topological order with fixed iteration order.
pub fn backward(loss: &Tensor) {
    assert_eq!(loss.len(), 1, "backward needs a scalar loss");
    // Iterative post-order over the operation graph.
    let mut order: Vec<Tensor> = Vec::new();
    let mut visited = std::collections::HashSet::new();
    let mut stack: Vec<(Tensor, bool)> = vec![(loss.clone(), false)];
    while let Some((t, processed)) = stack.pop() {
        if processed {
            order.push(t);
            continue;
        }
        if !visited.insert(t.id()) {
            continue;
        }
        stack.push((t.clone(), true));
        let mut push = |p: &Tensor| stack.push((p.clone(), false));
        match t.op() {
            Op::Leaf => {}
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) | Op::MatMul(a, b) | Op::AddRow(a, b) => {
                push(a);
                push(b);
            }
            Op::Scale(a, _) | Op::Relu(a) | Op::Reshape(a) | Op::MeanAll(a) => push(a),
            Op::SpMm(_, x) => push(x),
            Op::ConcatCols(parts) => parts.iter().for_each(&mut push),
            Op::GatherRows(table, _) => push(table),
            Op::SegmentPool { x, .. } => push(x),
            Op::BatchNorm(r) => {
                push(&r.x);
                push(&r.gamma);
                push(&r.beta);
            }
            Op::Conv1d(r) => {
                push(&r.x);
                r.weights.iter().for_each(&mut push);
                r.biases.iter().for_each(&mut push);
            }
        }
    }
    for t in &order {
        t.zero_grad();
    }
    loss.grad_mut()[0] = 1.0;

    for t in order.iter().rev() {
        let grad = t.grad();
        match t.op() {
            Op::Leaf => {}
            Op::Add(a, b) => {
                accumulate(a, &grad, |g, _| g);
                accumulate(b, &grad, |g, _| g);
            }
            Op::Sub(a, b) => {
                accumulate(a, &grad, |g, _| g);
                accumulate(b, &grad, |g, _| -g);
            }
            Op::Mul(a, b) => {
                let av = a.to_vec();
                let bv = b.to_vec();
                accumulate(a, &grad, |g, i| g * bv[i]);
                accumulate(b, &grad, |g, i| g * av[i]);
            }
            Op::Scale(a, c) => accumulate(a, &grad, |g, _| g * c),
            Op::Relu(a) => {
                let av = a.to_vec();
                accumulate(a, &grad, |g, i| if av[i] > 0.0 { g } else { 0.0 });
            }
            Op::MatMul(a, b) => {
                let (n, m) = (a.shape()[0], a.shape()[1]);
                let p = b.shape()[1];
                let av = a.to_vec();
                let bv = b.to_vec();
                {
                    let mut ga = a.grad_mut();
                    for i in 0..n {
                        for j in 0..p {
                            let g = grad[i * p + j];
                            if g == 0.0 {
                                continue;
                            }
                            for k in 0..m {
                                ga[i * m + k] += g * bv[k * p + j];
                            }
                        }
                    }
                }
                {
                    let mut gb = b.grad_mut();
                    for i in 0..n {
                        for k in 0..m {
                            let aik = av[i * m + k];
                            if aik == 0.0 {
                                continue;
                            }
                            for j in 0..p {
                                gb[k * p + j] += aik * grad[i * p + j];
                            }
                        }
                    }
                }
            }
            Op::AddRow(a, row) => {
                accumulate(a, &grad, |g, _| g);
                let d = row.len();
                let mut gr = row.grad_mut();
                for (i, g) in grad.iter().enumerate() {
                    gr[i % d] += g;
                }
            }
            Op::SpMm(m, x) => {
                // Y = M . X with symmetric M, so dX = M . dY.
                let d = x.shape()[1];
                let mut gx = x.grad_mut();
                for i in 0..m.rows() {
                    for (j, w) in m.row(i) {
                        for c in 0..d {
                            gx[j * d + c] += w * grad[i * d + c];
                        }
                    }
                }
            }
            Op::Reshape(a) => accumulate(a, &grad, |g, _| g),
            Op::ConcatCols(parts) => {
                let n = parts[0].shape()[0];
                let total: usize = parts.iter().map(|p| p.shape()[1]).sum();
                let mut offset = 0;
                for p in parts {
                    let w = p.shape()[1];
                    let mut gp = p.grad_mut();
                    for i in 0..n {
                        for j in 0..w {
                            gp[i * w + j] += grad[i * total + offset + j];
                        }
                    }
                    offset += w;
                }
            }
            Op::GatherRows(table, indices) => {
                let d = table.shape()[1];
                let mut gt = table.grad_mut();
                for (row, &ix) in indices.iter().enumerate() {
                    for c in 0..d {
                        gt[ix * d + c] += grad[row * d + c];
                    }
                }
            }
            Op::SegmentPool { x, segments, num_segments, argmax } => {
                let d = x.shape()[1];
                let g = *num_segments;
                let mut counts = vec![0usize; g];
                for &s in segments.iter() {
                    counts[s] += 1;
                }
                let mut gx = x.grad_mut();
                // Max half: gradient flows to the recorded argmax row.
                for s in 0..g {
                    for c in 0..d {
                        let row = argmax[s * d + c];
                        gx[row * d + c] += grad[s * 2 * d + c];
                    }
                }
                // Mean half: uniform share.
                for (row, &s) in segments.iter().enumerate() {
                    for c in 0..d {
                        gx[row * d + c] += grad[s * 2 * d + d + c] / counts[s] as f64;
                    }
                }
            }
            Op::BatchNorm(r) => backward_batchnorm(r, &grad),
            Op::Conv1d(r) => backward_conv1d(r, &grad),
            Op::MeanAll(a) => {
                let n = a.len() as f64;
                let g = grad[0] / n;
                accumulate(a, &vec![g; a.len()], |v, _| v);
            }
        }
    }
}

fn accumulate(t: &Tensor, grad: &[f64], f: impl Fn(f64, usize) -> f64) {
    let mut g = t.grad_mut();
    for (i, &v) in grad.iter().enumerate() {
        g[i] += f(v, i);
    }
}

fn backward_batchnorm(r: &BatchNormRecord, dy: &[f64]) {
    let (n, d) = (r.x.shape()[0], r.x.shape()[1]);
    let xv = r.x.to_vec();
    let gv = r.gamma.to_vec();
    let nf = n as f64;

    let mut dgamma = vec![0.0; d];
    let mut dbeta = vec![0.0; d];
    for i in 0..n {
        for j in 0..d {
            let xhat = (xv[i * d + j] - r.mean[j]) * r.inv_std[j];
            dgamma[j] += dy[i * d + j] * xhat;
            dbeta[j] += dy[i * d + j];
        }
    }
    {
        let mut g = r.gamma.grad_mut();
        let mut b = r.beta.grad_mut();
        for j in 0..d {
            g[j] += dgamma[j];
            b[j] += dbeta[j];
        }
    }

    let mut gx = r.x.grad_mut();
    if r.training {
        // Batch statistics participate in the forward value, so they get
        // differentiated through.
        for j in 0..d {
            let ivar = r.inv_std[j];
            let mut sum_dxhat = 0.0;
            let mut sum_dxhat_xc = 0.0;
            for i in 0..n {
                let dxhat = dy[i * d + j] * gv[j];
                let xc = xv[i * d + j] - r.mean[j];
                sum_dxhat += dxhat;
                sum_dxhat_xc += dxhat * xc;
            }
            let dvar = sum_dxhat_xc * -0.5 * ivar * ivar * ivar;
            let dmu = -ivar * sum_dxhat;
            for i in 0..n {
                let dxhat = dy[i * d + j] * gv[j];
                let xc = xv[i * d + j] - r.mean[j];
                gx[i * d + j] += dxhat * ivar + dvar * 2.0 * xc / nf + dmu / nf;
            }
        }
    } else {
        for i in 0..n {
            for j in 0..d {
                gx[i * d + j] += dy[i * d + j] * gv[j] * r.inv_std[j];
            }
        }
    }
}

fn backward_conv1d(r: &Conv1dRecord, dy: &[f64]) {
    let (batch, len) = (r.x.shape()[0], r.x.shape()[1]);
    let xv = r.x.to_vec();
    let total: usize = r.kernels.iter().map(|&k| (len - k) / r.stride + 1).sum();
    let mut gx = r.x.grad_mut();
    let mut offset = 0;
    for (fi, &k) in r.kernels.iter().enumerate() {
        let outs = (len - k) / r.stride + 1;
        let wv = r.weights[fi].to_vec();
        let mut gw = r.weights[fi].grad_mut();
        let mut gb = r.biases[fi].grad_mut();
        for b in 0..batch {
            for o in 0..outs {
                let g = dy[b * total + offset + o];
                if g == 0.0 {
                    continue;
                }
                gb[0] += g;
                let start = o * r.stride;
                for t in 0..k {
                    gw[t] += g * xv[b * len + start + t];
                    gx[b * len + start + t] += g * wv[t];
                }
            }
        }
        offset += outs;
    }
}
