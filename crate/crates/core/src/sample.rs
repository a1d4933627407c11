//! Deterministic rational sampling for probabilistic checks.

use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Q;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational `p/q` with `p ∈ [-40, 40]` and `q ∈ [1, 4]`; keeps
/// intermediate arithmetic cheap while avoiding degenerate all-integer
/// points.
pub fn sample_q(rng: &mut ChaCha8Rng) -> Q {
    let p: i64 = rng.gen_range(-40..=40);
    let q: i64 = rng.gen_range(1..=4);
    Ratio::new(p.into(), q.into())
}

pub fn sample_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| sample_q(rng)).collect()
}
