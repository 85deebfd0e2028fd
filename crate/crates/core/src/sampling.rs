//! Seeded test-vector generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Seeded generator for one work item; independent of evaluation order.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Candidate arguments: the constant vector, every basis vector, then
/// `samples` vectors with iid standard normal entries.
pub fn candidate_vectors(n: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(samples + n + 1);
    out.push(vec![1.0; n]);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        out.push(e);
    }
    let mut rng = rng_for(seed, 0);
    for _ in 0..samples {
        out.push((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect());
    }
    out
}
