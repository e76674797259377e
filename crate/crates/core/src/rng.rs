//! Deterministic sampling helpers shared by the numeric zero test and the
//! catalog verifier. All randomness is ChaCha-based and fully determined by
//! the caller-provided seed.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type DetRng = ChaCha12Rng;

pub fn rng_from(seed: u64, stream: u64) -> DetRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

/// Uniform draw in the open interval `(lo, hi)`.
pub fn sample_open(rng: &mut DetRng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.gen_range(0.001..0.999);
    lo + (hi - lo) * u
}

/// Random rational with numerator in `[-3q, 3q]` and denominator `q` from a
/// short list, i.e. a value in `[-3, 3]`.
pub fn sample_rational(rng: &mut DetRng) -> BigRational {
    let den: i64 = *[1i64, 2, 3, 4].get(rng.gen_range(0..4)).unwrap();
    let num: i64 = rng.gen_range(-3 * den..=3 * den);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random nonzero rational in `[-3, 3]`.
pub fn sample_nonzero_rational(rng: &mut DetRng) -> BigRational {
    loop {
        let q = sample_rational(rng);
        if !num_traits::Zero::is_zero(&q) {
            return q;
        }
    }
}
