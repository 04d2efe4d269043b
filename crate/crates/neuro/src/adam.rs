use crate::tensor::Tensor;

/// Adam with bias correction. State is kept per parameter position, so the
/// same parameter list must be passed to every step.
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    moments: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Adam {
    pub fn new(lr: f64) -> Adam {
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, step: 0, moments: Vec::new() }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Applies one update from the parameters' accumulated gradients, then
    /// clears those gradients.
    pub fn step(&mut self, params: &[Tensor]) {
        if self.moments.is_empty() {
            self.moments =
                params.iter().map(|p| (vec![0.0; p.len()], vec![0.0; p.len()])).collect();
        }
        assert_eq!(self.moments.len(), params.len(), "parameter list changed");
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for (p, (m, v)) in params.iter().zip(self.moments.iter_mut()) {
            let grad = p.grad();
            let mut values = p.to_vec();
            for i in 0..values.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * grad[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                values[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
            p.set_values(&values);
            p.zero_grad();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::mse;
    use crate::tensor::backward;

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let p = Tensor::from_vec(vec![2], vec![1.0, -2.0]);
        let mut opt = Adam::new(0.1);
        opt.step(std::slice::from_ref(&p));
        assert_eq!(p.to_vec(), vec![1.0, -2.0]);
        assert_eq!(opt.step_count(), 1);
    }

    #[test]
    fn one_step_on_square_decreases_magnitude() {
        let w = Tensor::scalar(1.0);
        let loss = w.mul(&w);
        backward(&loss);
        let mut opt = Adam::new(0.1);
        opt.step(std::slice::from_ref(&w));
        assert!(w.item().abs() < 1.0);
    }

    #[test]
    fn hundred_steps_reach_quadratic_optimum() {
        let w = Tensor::from_vec(vec![2], vec![1.0, -0.7]);
        let target = Tensor::zeros(vec![2]);
        let mut opt = Adam::new(0.1);
        for _ in 0..100 {
            let loss = mse(&w, &target);
            backward(&loss);
            opt.step(std::slice::from_ref(&w));
        }
        for v in w.to_vec() {
            assert!(v.abs() < 1e-2, "{v}");
        }
    }
}
