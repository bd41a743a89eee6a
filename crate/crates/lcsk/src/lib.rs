//! Longest common substring with approximately k mismatches.
//!
//! Given two sequences over a small alphabet and a mismatch budget `k`, the
//! solver returns a substring pair of length at least `LCS_k(X, Y)` (with high
//! probability) whose Hamming distance is guaranteed to be at most
//! `(1 + epsilon) * k`. The pipeline combines bit-sampling LSH over
//! Karp-Rabin fingerprints, ±1 random-projection sketches for fast distance
//! tests, and a lie-tolerant binary search that lifts the decision procedure
//! to the optimization problem.
//!
//! Exact baselines (`baselines::fgku`, `baselines::brute_lcs_k`) are included
//! for validation and accuracy measurements.

pub mod baselines;
pub mod error;
pub mod fingerprint;
pub mod lshdecide;
pub mod modmath;
pub mod noisysearch;
pub mod seqcore;
pub mod sketch;

pub use error::{Error, Result};

/// Derive a child seed from a master seed and a path of indices, so a single
/// master seed determines every per-run random stream.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let mut s = splitmix64(master);
    for &p in parts {
        s = splitmix64(s ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    s
}
