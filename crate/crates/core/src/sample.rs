//! Seeded sampling of evaluation points that avoid known vanishing loci.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Field;

/// Attempts before [`sample_point`] gives up.
pub const MAX_RETRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no admissible point after {0} attempts")]
pub struct SampleError(pub usize);

/// A locus a sampled scalar must avoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// `q = 0`
    Zero,
    /// `q^d = 1`
    RootOfUnity(u32),
    /// `Σ cᵢ qⁱ = 0`, coefficients from degree 0 upward
    Poly(Vec<i64>),
}

impl Constraint {
    pub fn vanishes_at<F: Field>(&self, q: &F) -> bool {
        match self {
            Constraint::Zero => q.is_zero(),
            Constraint::RootOfUnity(d) => {
                let p = q.pow_i(*d as i64).expect("nonnegative power");
                (p - q.one_like()).is_zero()
            }
            Constraint::Poly(coeffs) => {
                let mut acc = q.zero_like();
                for &c in coeffs.iter().rev() {
                    acc = acc * q.clone() + q.int_like(c);
                }
                acc.is_zero()
            }
        }
    }
}

/// Mixes a root seed with a task index (SplitMix64 finalizer).
pub fn derive_seed(root: u64, task: u64) -> u64 {
    let mut z = root
        ^ task
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(root: u64, task: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, task))
}

/// A nonzero scalar avoiding every listed locus; deterministic for a fixed rng state.
pub fn sample_point<F: Field>(
    one: &F,
    rng: &mut ChaCha8Rng,
    forbidden: &[Constraint],
) -> Result<F, SampleError> {
    for _ in 0..MAX_RETRIES {
        let q = one.random_like(rng);
        if q.is_zero() {
            continue;
        }
        if forbidden.iter().all(|c| !c.vanishes_at(&q)) {
            return Ok(q);
        }
    }
    Err(SampleError(MAX_RETRIES))
}

/// `k` nonzero scalars accepted jointly by `accept`.
pub fn sample_tuple<F: Field>(
    one: &F,
    rng: &mut ChaCha8Rng,
    k: usize,
    accept: impl Fn(&[F]) -> bool,
) -> Result<Vec<F>, SampleError> {
    for _ in 0..MAX_RETRIES {
        let qs: Vec<F> = (0..k).map(|_| one.random_like(rng)).collect();
        if qs.iter().any(|q| q.is_zero()) {
            continue;
        }
        if accept(&qs) {
            return Ok(qs);
        }
    }
    Err(SampleError(MAX_RETRIES))
}

/// Samples `k` nonzero scalars until `f` accepts them, returning its value.
pub fn sample_map<F: Field, T>(
    one: &F,
    rng: &mut ChaCha8Rng,
    k: usize,
    mut f: impl FnMut(&[F]) -> Option<T>,
) -> Result<T, SampleError> {
    for _ in 0..MAX_RETRIES {
        let qs: Vec<F> = (0..k).map(|_| one.random_like(rng)).collect();
        if qs.iter().any(|q| q.is_zero()) {
            continue;
        }
        if let Some(t) = f(&qs) {
            return Ok(t);
        }
    }
    Err(SampleError(MAX_RETRIES))
}

/// `q` is nonzero and `q^d ≠ 1`.
pub fn avoids_root_of_unity<F: Field>(q: &F, d: u32) -> bool {
    !q.is_zero() && !Constraint::RootOfUnity(d).vanishes_at(q)
}
