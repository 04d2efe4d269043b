//! Recipe representation, uniform sampling, and the integer encoding.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::action::Action;

pub const DEFAULT_RECIPE_LEN: usize = 20;

#[derive(Debug, Error)]
pub enum RecipeError {
    #[error("step value {step} is outside the action vocabulary (0..{})", Action::VOCAB)]
    BadStep { step: u8 },

    #[error("recipe must have at least one step")]
    Empty,

    #[error("unknown action mnemonic `{0}` (expected one of strash;balance;rw;rwz;rf;rfz;sweep)")]
    BadMnemonic(String),
}

/// A fixed-length sequence of action ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    pub id: u32,
    pub steps: Vec<Action>,
}

impl Recipe {
    /// The integer encoding: one action id per step.
    pub fn encode(&self) -> Vec<u8> {
        self.steps.iter().map(|a| a.id()).collect()
    }

    pub fn decode(id: u32, vector: &[u8]) -> Result<Recipe, RecipeError> {
        if vector.is_empty() {
            return Err(RecipeError::Empty);
        }
        let steps = vector
            .iter()
            .map(|&v| Action::from_id(v).ok_or(RecipeError::BadStep { step: v }))
            .collect::<Result<_, _>>()?;
        Ok(Recipe { id, steps })
    }

    /// Parses a semicolon-separated mnemonic string like `balance;rw;rfz`.
    pub fn parse(id: u32, text: &str) -> Result<Recipe, RecipeError> {
        let steps: Vec<Action> = text
            .split(';')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| Action::from_mnemonic(s).ok_or_else(|| RecipeError::BadMnemonic(s.into())))
            .collect::<Result<_, _>>()?;
        if steps.is_empty() {
            return Err(RecipeError::Empty);
        }
        Ok(Recipe { id, steps })
    }

    pub fn to_mnemonics(&self) -> String {
        self.steps.iter().map(|a| a.mnemonic()).collect::<Vec<_>>().join(";")
    }
}

/// Draws `count` recipes of `length` steps, each step independent and
/// uniform over the 7-action vocabulary. The generator is seeded, so
/// identical arguments reproduce identical recipes byte for byte.
pub fn sample_recipes(count: usize, length: usize, seed: u64) -> Vec<Recipe> {
    assert!(count >= 1 && length >= 1, "need at least one recipe of one step");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|id| Recipe {
            id: id as u32,
            steps: (0..length)
                .map(|_| Action::from_id(rng.random_range(0..Action::VOCAB as u8)).unwrap())
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_recipes(5, 20, 42);
        let b = sample_recipes(5, 20, 42);
        assert_eq!(a, b);
        let c = sample_recipes(5, 20, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn single_recipe_has_exact_length() {
        let r = sample_recipes(1, 20, 0);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].steps.len(), 20);
        assert_eq!(r[0].id, 0);
    }

    #[test]
    fn action_frequencies_are_uniform_within_3_sigma() {
        let k = 100_000usize;
        let recipes = sample_recipes(k, 1, 7);
        let mut counts = [0usize; Action::VOCAB];
        for r in &recipes {
            counts[r.steps[0].id() as usize] += 1;
        }
        let p = 1.0 / Action::VOCAB as f64;
        let sigma = (k as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            let dev = (c as f64 - k as f64 * p).abs();
            assert!(dev < 3.0 * sigma, "action {i}: count {c} deviates {dev:.1} > 3s {sigma:.1}");
        }
    }

    #[test]
    fn encode_decode_round_trip() {
        let all_strash = Recipe { id: 3, steps: vec![Action::Strash; 20] };
        assert_eq!(all_strash.encode(), vec![0u8; 20]);
        let mixed = Recipe {
            id: 9,
            steps: vec![Action::Balance, Action::Rewrite, Action::RefactorZero],
        };
        assert_eq!(mixed.encode(), vec![1, 2, 5]);
        for r in sample_recipes(1000, 20, 5) {
            assert_eq!(Recipe::decode(r.id, &r.encode()).unwrap(), r);
        }
    }

    #[test]
    fn mnemonic_parsing() {
        let r = Recipe::parse(0, "strash;balance;rw;rwz;rf;rfz;sweep").unwrap();
        assert_eq!(r.steps, Action::ALL.to_vec());
        assert!(Recipe::parse(0, "").is_err());
        assert!(matches!(Recipe::parse(0, "balance;resub"), Err(RecipeError::BadMnemonic(_))));
    }
}
