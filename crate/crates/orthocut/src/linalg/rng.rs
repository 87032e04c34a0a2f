//! Seeded, streamed randomness.
//!
//! Everything random in this crate flows through an [`RngSeed`]: a ChaCha8
//! seed plus a stream index. ChaCha's counter construction means distinct
//! streams of the same seed are independent, and a given `(seed, stream)`
//! pair yields a bit-identical sequence on every platform and thread
//! schedule. Parallel loops hand each work unit its own child stream.

use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

impl RngSeed {
    pub const fn new(seed: u64, stream: u64) -> Self {
        RngSeed { seed, stream }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Deterministically derived child stream `k`. Children of distinct
    /// `(stream, k)` pairs are distinct with overwhelming probability; the
    /// seed half never changes, so a run is identified by its root seed.
    pub fn child(&self, k: u64) -> RngSeed {
        RngSeed {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(k)),
        }
    }
}

impl Default for RngSeed {
    fn default() -> Self {
        RngSeed::new(0, 0)
    }
}

/// `rows x cols` matrix of i.i.d. centered Gaussians with per-entry total
/// variance `variance` (complex entries split it evenly between parts).
/// Entries are drawn in row-major order.
pub fn gaussian_matrix<T: Scalar>(
    rows: usize,
    cols: usize,
    variance: f64,
    seed: RngSeed,
) -> Result<Matrix<T>> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape("gaussian_matrix: empty shape".into()));
    }
    if !(variance.is_finite() && variance > 0.0) {
        return Err(Error::Domain(format!(
            "gaussian_matrix: variance {variance} must be positive and finite"
        )));
    }
    let sd = variance.sqrt();
    let mut rng = seed.rng();
    let mut m = Matrix::zeros(rows, cols);
    for v in m.data_mut() {
        *v = T::standard_normal(&mut rng).scale(sd);
    }
    Ok(m)
}
