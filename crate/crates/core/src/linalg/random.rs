use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{qr, CMat, C64};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-distributed unitary matrix, deterministic in `seed`.
pub fn random_unitary(dim: usize, seed: u64) -> CMat {
    assert!(dim >= 1, "random_unitary requires dim >= 1");
    let mut rng = rng_from_seed(seed);
    let g = CMat::from_fn(dim, dim, |_, _| {
        C64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    });
    qr(&g).q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormality_residual;

    #[test]
    fn scalar_has_unit_modulus() {
        for seed in 0..5 {
            let q = random_unitary(1, seed);
            assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = random_unitary(5, 42);
        let b = random_unitary(5, 42);
        assert!(a
            .iter()
            .zip(b.iter())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
        assert_ne!(a, random_unitary(5, 43));
    }

    #[test]
    fn unitary_to_machine_precision() {
        let q = random_unitary(8, 7);
        assert!(orthonormality_residual(&q) <= 1e-12);
        assert!(orthonormality_residual(&q.adjoint()) <= 1e-12);
    }
}
