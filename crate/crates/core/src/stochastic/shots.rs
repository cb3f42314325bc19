use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::StateVector;
use crate::error::{Error, Result};

/// Number of measurement samples per expectation value and the base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub shots: u64,
    pub seed: u64,
}

impl ShotConfig {
    pub fn new(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidSpec("shots must be at least 1".into()));
        }
        Ok(Self { shots, seed })
    }

    /// Fresh RNG stream for task `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(index))
    }
}

/// Estimate of `⟨Z⟩` from `shots` projective measurements of a state with exact value `z`.
pub fn sample_from_expectation<R: rand::Rng + ?Sized>(z: f64, shots: u64, rng: &mut R) -> f64 {
    let p1 = ((1.0 - z) / 2.0).clamp(0.0, 1.0);
    let k = Binomial::new(shots, p1).expect("p1 clamped to [0, 1]").sample(rng);
    1.0 - 2.0 * k as f64 / shots as f64
}

/// Shot-based `⟨Z⟩` of `qubit`.
pub fn sample_expectation_z<R: rand::Rng + ?Sized>(
    state: &StateVector,
    qubit: usize,
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    Ok(sample_from_expectation(state.expectation_z(qubit)?, shots, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for shots in [1, 7, 1000] {
            assert_eq!(
                sample_expectation_z(&StateVector::zero(2), 1, shots, &mut rng).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let cfg = ShotConfig::new(500, 42).unwrap();
        let a: Vec<f64> = {
            let mut r = cfg.rng(3);
            (0..10)
                .map(|_| sample_from_expectation(0.2, cfg.shots, &mut r))
                .collect()
        };
        let mut r = cfg.rng(3);
        let b: Vec<f64> = (0..10)
            .map(|_| sample_from_expectation(0.2, cfg.shots, &mut r))
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(ShotConfig::new(0, 1).is_err());
    }
}
