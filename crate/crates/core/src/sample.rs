//! Seeded random instances shared by the sufficiency harness and tests.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::simplex::ProbVec;

/// Deterministic generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) << 20);
    rng
}

/// Uniform draw from the open simplex (flat Dirichlet).
pub fn interior_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ProbVec {
    loop {
        let w: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 && w.iter().all(|&x| x > 0.0) {
            return ProbVec::new(w.into_iter().map(|x| x / total).collect())
                .expect("normalized exponential draws lie on the simplex");
        }
    }
}

/// Uniformly random permutation of `0..n`.
pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
