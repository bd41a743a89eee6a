//! Karp-Rabin fingerprints of strings and of projected substrings.
//!
//! A fingerprint is `phi(S) = sum_i r^(i-1) * s_i mod q` with the base `r`
//! drawn uniformly at random once per top-level run and shared across all
//! hash functions and window lengths. Projected fingerprints for every
//! window of a text are evaluated in one batch, either through an exact
//! NTT correlation or, for short windows, by direct evaluation.

use crate::error::{Error, Result};
use crate::modmath::{correlate_windows, Modulus};
use crate::seqcore::Sequence;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A fixed Karp-Rabin fingerprinting function: prime modulus, base, and a
/// table of base powers.
#[derive(Debug, Clone)]
pub struct FingerprintScheme {
    modulus: Modulus,
    base: u64,
    powers: Vec<u64>,
    seed: u64,
}

impl FingerprintScheme {
    /// Draw a scheme over the fingerprint prime with a uniform base in
    /// `[1, q)`, with powers precomputed up to `r^max_len`.
    pub fn new(max_len: usize, seed: u64) -> Self {
        let modulus = Modulus::fingerprint_prime();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = rng.random_range(1..modulus.get());
        Self::build(modulus, base, max_len, seed)
    }

    /// A scheme with explicit modulus and base (mainly for tests against
    /// hand-computed values).
    pub fn with_parameters(modulus: Modulus, base: u64, max_len: usize) -> Result<Self> {
        if base == 0 || base >= modulus.get() {
            return Err(Error::InvalidParameter(format!(
                "fingerprint base must lie in [1, q), got {base}"
            )));
        }
        Ok(Self::build(modulus, base, max_len, 0))
    }

    fn build(modulus: Modulus, base: u64, max_len: usize, seed: u64) -> Self {
        let mut powers = Vec::with_capacity(max_len + 1);
        let mut p = 1u64;
        for _ in 0..=max_len {
            powers.push(p);
            p = modulus.mul(p, base);
        }
        FingerprintScheme {
            modulus,
            base,
            powers,
            seed,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Seed the base was drawn from (zero for explicit-parameter schemes).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_len(&self) -> usize {
        self.powers.len() - 1
    }

    /// `r^i mod q`; falls back to fast exponentiation beyond the table.
    pub fn power(&self, i: usize) -> u64 {
        match self.powers.get(i) {
            Some(&p) => p,
            None => self.modulus.pow(self.base, i as u64),
        }
    }

    /// `phi(S) = sum_i r^(i-1) s_i mod q`; the empty string maps to 0.
    pub fn fingerprint(&self, codes: &[u16]) -> u64 {
        let m = self.modulus;
        let mut acc = 0u64;
        let mut rp = 1u64;
        for &c in codes {
            acc = m.add(acc, m.mul(rp, c as u64 % m.get()));
            rp = m.mul(rp, self.base);
        }
        acc
    }
}

/// A bit-sampling hash: an ordered tuple of `m` positions inside `[0, ell)`,
/// sampled i.i.d. uniformly (duplicates allowed; order matters for the
/// fingerprint of the projection).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionHash {
    positions: Vec<usize>,
    window_len: usize,
}

impl ProjectionHash {
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    /// Number of sampled positions (`m`).
    pub fn arity(&self) -> usize {
        self.positions.len()
    }

    /// The projected string `S[a_1] S[a_2] ... S[a_m]`.
    pub fn project(&self, window: &[u16]) -> Vec<u16> {
        self.positions.iter().map(|&a| window[a]).collect()
    }
}

/// Sample one hash from `Pi^m` uniformly at random.
pub fn sample_projection(window_len: usize, arity: usize, rng: &mut impl Rng) -> ProjectionHash {
    assert!(window_len >= 1 && arity >= 1);
    let positions = (0..arity).map(|_| rng.random_range(0..window_len)).collect();
    ProjectionHash {
        positions,
        window_len,
    }
}

/// Fingerprint of the projection of one window, straight from the definition.
fn projected_fingerprint_one(
    codes: &[u16],
    start: usize,
    h: &ProjectionHash,
    scheme: &FingerprintScheme,
) -> u64 {
    let m = scheme.modulus();
    let q = m.get();
    let mut acc = 0u64;
    let mut rp = 1u64;
    for &a in h.positions() {
        acc = m.add(acc, m.mul(rp, codes[start + a] as u64 % q));
        rp = m.mul(rp, scheme.base());
    }
    acc
}

fn check_window_len(text: &Sequence, h: &ProjectionHash) -> Result<()> {
    if h.window_len() > text.len() {
        return Err(Error::WindowTooLong {
            window: h.window_len(),
            text: text.len(),
        });
    }
    Ok(())
}

/// `phi(h(window))` for every window start, via one exact correlation: the
/// sparse weight vector `U` accumulates `r^(t-1)` at position `a_t` and is
/// slid across the text in the field.
pub fn projected_fingerprints_all_windows(
    text: &Sequence,
    h: &ProjectionHash,
    scheme: &FingerprintScheme,
) -> Result<Vec<u64>> {
    check_window_len(text, h)?;
    let m = scheme.modulus();
    let q = m.get();
    let mut weights = vec![0u64; h.window_len()];
    let mut rp = 1u64;
    for &a in h.positions() {
        weights[a] = m.add(weights[a], rp);
        rp = m.mul(rp, scheme.base());
    }
    let field_text: Vec<u64> = text.codes().iter().map(|&c| c as u64 % q).collect();
    correlate_windows(&weights, &field_text, m)
}

/// Same contract as [`projected_fingerprints_all_windows`], evaluated window
/// by window. Cheaper when the window is short compared to the text.
pub fn projected_fingerprints_direct(
    text: &Sequence,
    h: &ProjectionHash,
    scheme: &FingerprintScheme,
) -> Result<Vec<u64>> {
    check_window_len(text, h)?;
    let codes = text.codes();
    let count = text.len() - h.window_len() + 1;
    Ok((0..count)
        .map(|i| projected_fingerprint_one(codes, i, h, scheme))
        .collect())
}
