//! Seeded random-number streams and the geometric skip draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// A reproducible random stream identified by `(seed, stream)`.
///
/// The same pair reproduces the same draw sequence bit-for-bit on the same
/// build. Ensemble workers use a shared seed with one stream id per sample,
/// so results are independent of scheduling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Instantiates the generator for this stream.
    pub fn rng(&self) -> ChaCha12Rng {
        // Expand (seed, stream) into a full 256-bit key with splitmix64 so
        // distinct streams differ in every key word.
        let mut state = self.seed;
        splitmix64(&mut state);
        state ^= self.stream;
        splitmix64(&mut state);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            let word = splitmix64(&mut state);
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha12Rng::from_seed(key)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws the gap to the next proposed candidate: `L >= 1` with
/// `P(L) = q (1-q)^(L-1)`, by inverse transform
/// `L = 1 + floor(ln U / ln(1-q))` with `U` uniform in `(0, 1]`.
///
/// `q = 1` returns 1 deterministically without consuming randomness.
/// `q <= 0` is an error; the caller must terminate its scan instead.
#[inline]
pub fn geometric_skip<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<u64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::invalid(format!(
            "geometric_skip: q must be in (0, 1], got {q}"
        )));
    }
    if q == 1.0 {
        return Ok(1);
    }
    let u = 1.0 - rng.random::<f64>(); // (0, 1]
    let l = 1.0 + (u.ln() / (-q).ln_1p()).floor();
    if l >= u64::MAX as f64 {
        Ok(u64::MAX)
    } else {
        Ok(l as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RngStream::new(7, 3).rng();
            (0..8).map(|_| r.random()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(7, 3).rng();
            (0..8).map(|_| r.random()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<u64> = {
            let mut r = RngStream::new(7, 4).rng();
            (0..8).map(|_| r.random()).collect()
        };
        assert_ne!(a, c);
        let d: Vec<u64> = {
            let mut r = RngStream::new(8, 3).rng();
            (0..8).map(|_| r.random()).collect()
        };
        assert_ne!(a, d);
    }

    #[test]
    fn skip_rejects_nonpositive_q() {
        let mut rng = RngStream::new(1, 0).rng();
        assert!(geometric_skip(0.0, &mut rng).is_err());
        assert!(geometric_skip(-0.5, &mut rng).is_err());
        assert!(geometric_skip(1.5, &mut rng).is_err());
    }

    #[test]
    fn skip_at_q_one_is_always_one() {
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..100 {
            assert_eq!(geometric_skip(1.0, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn skip_mean_matches_geometric() {
        let mut rng = RngStream::new(42, 0).rng();
        let n = 1_000_000u64;
        let sum: u64 = (0..n).map(|_| geometric_skip(0.5, &mut rng).unwrap()).sum();
        let mean = sum as f64 / n as f64;
        assert!((mean - 2.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn skip_pmf_matches_geometric() {
        // frequency test at q = 0.1 over L = 1..=20, 3-sigma multinomial bands
        let q = 0.1f64;
        let n = 1_000_000u64;
        let mut counts = [0u64; 21];
        let mut rng = RngStream::new(9, 1).rng();
        for _ in 0..n {
            let l = geometric_skip(q, &mut rng).unwrap();
            if l <= 20 {
                counts[l as usize] += 1;
            }
        }
        for l in 1..=20usize {
            let p = q * (1.0 - q).powi(l as i32 - 1);
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            let diff = counts[l] as f64 - n as f64 * p;
            assert!(
                diff.abs() <= 3.0 * sd,
                "L={l}: observed {} expected {:.1} ({}sd)",
                counts[l],
                n as f64 * p,
                diff / sd
            );
        }
    }
}
