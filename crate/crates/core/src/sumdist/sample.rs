use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::NakagamiParams;

/// Draws per substream in [`super::SumDistribution::sample`].
pub const DEFAULT_CHUNK: usize = 8192;

/// Generator for chunk `chunk` of the run seeded by `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn gamma_power<R: Rng>(rng: &mut R, p: NakagamiParams) -> f64 {
    let sum: f64 = (0..p.m()).map(|_| rng.sample::<f64, _>(Exp1)).sum();
    sum * p.omega() / f64::from(p.m())
}

/// One draw of `|sum_k sqrt(G1_k G2_k) e^{j theta_k}|`.
pub(crate) fn draw<R: Rng>(rng: &mut R, a: NakagamiParams, b: NakagamiParams, n_vectors: u32) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for _ in 0..n_vectors {
        let amp = (gamma_power(rng, a) * gamma_power(rng, b)).sqrt();
        let (s, c) = (TAU * rng.gen::<f64>()).sin_cos();
        re += amp * c;
        im += amp * s;
    }
    re.hypot(im)
}
