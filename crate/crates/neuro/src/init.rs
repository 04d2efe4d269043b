use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::Tensor;

/// Uniform initialization in `+-sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_uniform(
    rng: &mut ChaCha8Rng,
    fan_in: usize,
    fan_out: usize,
    shape: Vec<usize>,
) -> Tensor {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let len = shape.iter().product();
    let values = (0..len).map(|_| rng.random::<f64>() * 2.0 * bound - bound).collect();
    Tensor::from_vec(shape, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn values_stay_in_bound_and_reproduce() {
        let bound = (6.0f64 / 20.0).sqrt();
        let a = glorot_uniform(&mut ChaCha8Rng::seed_from_u64(5), 10, 10, vec![10, 10]);
        let b = glorot_uniform(&mut ChaCha8Rng::seed_from_u64(5), 10, 10, vec![10, 10]);
        assert_eq!(a.to_vec(), b.to_vec());
        assert!(a.to_vec().iter().all(|v| v.abs() <= bound));
    }
}
