//! Exact modular arithmetic and exact convolution / sliding correlation.
//!
//! Everything here is bit-exact: convolutions run as number-theoretic
//! transforms in `Z_q` for the NTT-friendly fingerprint prime, and integer
//! correlations are lifted back from the field, so no floating-point rounding
//! ever enters the pipeline.

use crate::error::{Error, Result};

/// The fingerprint modulus: `29 * 2^57 + 1`, a 62-bit prime supporting
/// power-of-two transform lengths up to `2^57` with primitive root 3.
pub const FINGERPRINT_PRIME: u64 = 4_179_340_454_199_820_289;

const PRIMITIVE_ROOT: u64 = 3;

/// A prime modulus for exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    q: u64,
}

impl Modulus {
    /// The fixed fingerprint prime used by the whole pipeline.
    pub fn fingerprint_prime() -> Self {
        Modulus {
            q: FINGERPRINT_PRIME,
        }
    }

    /// An arbitrary odd prime modulus. Primality is the caller's contract;
    /// only trivial cases are rejected.
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || q % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "modulus must be an odd prime, got {q}"
            )));
        }
        Ok(Modulus { q })
    }

    pub fn get(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.q as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.q - 2)
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        if v >= 0 {
            v as u64 % self.q
        } else {
            let r = (-(v as i128)) as u64 % self.q;
            if r == 0 {
                0
            } else {
                self.q - r
            }
        }
    }
}

fn bit_reverse_permute(a: &mut [u64]) {
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
}

/// In-place iterative NTT over the fingerprint prime.
/// `a.len()` must be a power of two dividing `2^57`.
fn ntt(a: &mut [u64], invert: bool) {
    let m = Modulus::fingerprint_prime();
    let n = a.len();
    debug_assert!(n.is_power_of_two() && n as u64 <= 1 << 57);
    bit_reverse_permute(a);

    let mut len = 2;
    while len <= n {
        let mut w_len = m.pow(PRIMITIVE_ROOT, (m.q - 1) / len as u64);
        if invert {
            w_len = m.inv(w_len);
        }
        for start in (0..n).step_by(len) {
            let mut w = 1u64;
            for j in 0..len / 2 {
                let u = a[start + j];
                let v = m.mul(a[start + j + len / 2], w);
                a[start + j] = m.add(u, v);
                a[start + j + len / 2] = m.sub(u, v);
                w = m.mul(w, w_len);
            }
        }
        len <<= 1;
    }

    if invert {
        let inv_n = m.inv(n as u64);
        for x in a.iter_mut() {
            *x = m.mul(*x, inv_n);
        }
    }
}

/// Exact cyclic-free convolution in `Z_FINGERPRINT_PRIME` via NTT.
fn convolve_fp(a: &[u64], b: &[u64]) -> Vec<u64> {
    let need = a.len() + b.len() - 1;
    let size = need.next_power_of_two();
    let mut fa = vec![0u64; size];
    let mut fb = vec![0u64; size];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    ntt(&mut fa, false);
    ntt(&mut fb, false);
    let m = Modulus::fingerprint_prime();
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = m.mul(*x, *y);
    }
    ntt(&mut fa, true);
    fa.truncate(need);
    fa
}

/// Exact convolution modulo `q`: `out[t] = sum_i a[i] * b[t-i] mod q`,
/// of length `|a| + |b| - 1`.
pub fn convolve_mod(a: &[u64], b: &[u64], modulus: Modulus) -> Result<Vec<u64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("convolution operand"));
    }
    let q = modulus.q;
    if q == FINGERPRINT_PRIME {
        return Ok(convolve_fp(a, b));
    }
    // Small modulus: coefficients of the integer convolution are bounded by
    // min(|a|, |b|) * (q-1)^2; when that fits below the fingerprint prime we
    // compute the integer convolution exactly in its field and reduce.
    let bound = a.len().min(b.len()) as u128 * (q as u128 - 1) * (q as u128 - 1);
    if bound < FINGERPRINT_PRIME as u128 {
        let mut out = convolve_fp(a, b);
        for x in out.iter_mut() {
            *x %= q;
        }
        return Ok(out);
    }
    // Fallback: direct quadratic evaluation, still exact.
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = modulus.add(out[i + j], modulus.mul(ai, bj));
        }
    }
    Ok(out)
}

/// Sliding dot products modulo `q`:
/// `out[i] = sum_p weights[p] * text[i+p] mod q` for every window start.
pub fn correlate_windows(weights: &[u64], text: &[u64], modulus: Modulus) -> Result<Vec<u64>> {
    if weights.is_empty() {
        return Err(Error::EmptyInput("correlation weights"));
    }
    if weights.len() > text.len() {
        return Err(Error::WindowTooLong {
            window: weights.len(),
            text: text.len(),
        });
    }
    let ell = weights.len();
    let mut rev = weights.to_vec();
    rev.reverse();
    let conv = convolve_mod(&rev, text, modulus)?;
    Ok(conv[ell - 1..text.len()].to_vec())
}

/// Exact integer sliding dot products of small-integer weights against a 0/1
/// indicator array (no modulus in the result).
///
/// The weight mass `sum |w|` bounds every output, so the computation runs in
/// the fingerprint field and lifts back to signed integers. Configurations
/// whose outputs could not be represented are rejected up front.
pub fn integer_correlate_windows(weights: &[i64], indicator: &[u64]) -> Result<Vec<i64>> {
    if weights.is_empty() {
        return Err(Error::EmptyInput("correlation weights"));
    }
    if weights.len() > indicator.len() {
        return Err(Error::WindowTooLong {
            window: weights.len(),
            text: indicator.len(),
        });
    }
    for &b in indicator {
        if b > 1 {
            return Err(Error::InvalidParameter(format!(
                "indicator entries must be 0 or 1, got {b}"
            )));
        }
    }
    let mass: u128 = weights.iter().map(|&w| w.unsigned_abs() as u128).sum();
    if 2 * mass + 1 > FINGERPRINT_PRIME as u128 {
        return Err(Error::CorrelationOverflow {
            mass,
            q: FINGERPRINT_PRIME,
        });
    }
    let m = Modulus::fingerprint_prime();
    let field_weights: Vec<u64> = weights.iter().map(|&w| m.reduce_i64(w)).collect();
    let correlated = correlate_windows(&field_weights, indicator, m)?;
    let half = mass as u64;
    Ok(correlated
        .into_iter()
        .map(|v| {
            if v <= half {
                v as i64
            } else {
                -((m.q - v) as i64)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_convolve(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + ai as u128 * bj as u128 % q as u128)
                    % q as u128) as u64;
            }
        }
        out
    }

    #[test]
    fn primitive_root_order() {
        let m = Modulus::fingerprint_prime();
        // q - 1 = 29 * 2^57; 3 generates the multiplicative group.
        assert_eq!(FINGERPRINT_PRIME, 29 * (1u64 << 57) + 1);
        assert_ne!(m.pow(PRIMITIVE_ROOT, (m.q - 1) / 2), 1);
        assert_ne!(m.pow(PRIMITIVE_ROOT, (m.q - 1) / 29), 1);
        assert_eq!(m.pow(PRIMITIVE_ROOT, m.q - 1), 1);
    }

    #[test]
    fn convolve_hand_expansion() {
        let m = Modulus::new(97).unwrap();
        assert_eq!(
            convolve_mod(&[1, 2], &[3, 4], m).unwrap(),
            vec![3, 10, 8]
        );
    }

    #[test]
    fn convolve_identity() {
        let m = Modulus::fingerprint_prime();
        let a = vec![5, 0, 17, 3];
        assert_eq!(convolve_mod(&a, &[1], m).unwrap(), a);
    }

    #[test]
    fn convolve_empty_is_error() {
        let m = Modulus::fingerprint_prime();
        assert!(convolve_mod(&[], &[1], m).is_err());
        assert!(convolve_mod(&[1], &[], m).is_err());
    }

    #[test]
    fn correlate_examples() {
        let m = Modulus::new(97).unwrap();
        assert_eq!(
            correlate_windows(&[1, 0], &[5, 6, 7], m).unwrap(),
            vec![5, 6]
        );
        assert_eq!(
            correlate_windows(&[0, 0, 0], &[5, 6, 7, 8], m).unwrap(),
            vec![0, 0]
        );
        assert!(correlate_windows(&[1, 2, 3], &[1, 2], m).is_err());
    }

    #[test]
    fn integer_correlate_examples() {
        assert_eq!(
            integer_correlate_windows(&[1, -1], &[1, 1, 0]).unwrap(),
            vec![0, 1]
        );
        assert_eq!(
            integer_correlate_windows(&[1, -1, 1], &[0, 0, 0, 0]).unwrap(),
            vec![0, 0]
        );
    }

    #[test]
    fn integer_correlate_rejects_overflow() {
        let weights = vec![i64::MAX / 2; 3];
        assert!(matches!(
            integer_correlate_windows(&weights, &[1, 1, 1, 1]),
            Err(Error::CorrelationOverflow { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn convolve_matches_naive_fingerprint_prime(
            a in proptest::collection::vec(0u64..FINGERPRINT_PRIME, 1..256),
            b in proptest::collection::vec(0u64..FINGERPRINT_PRIME, 1..256),
        ) {
            let m = Modulus::fingerprint_prime();
            prop_assert_eq!(
                convolve_mod(&a, &b, m).unwrap(),
                naive_convolve(&a, &b, FINGERPRINT_PRIME)
            );
        }

        #[test]
        fn convolve_matches_naive_small_prime(
            a in proptest::collection::vec(0u64..97, 1..64),
            b in proptest::collection::vec(0u64..97, 1..64),
        ) {
            let m = Modulus::new(97).unwrap();
            prop_assert_eq!(convolve_mod(&a, &b, m).unwrap(), naive_convolve(&a, &b, 97));
        }

        #[test]
        fn convolve_is_linear(
            a in proptest::collection::vec(0u64..FINGERPRINT_PRIME, 1..48),
            a2 in proptest::collection::vec(0u64..FINGERPRINT_PRIME, 1..48),
            b in proptest::collection::vec(0u64..FINGERPRINT_PRIME, 1..48),
        ) {
            let m = Modulus::fingerprint_prime();
            let n = a.len().min(a2.len());
            let (a, a2) = (&a[..n], &a2[..n]);
            let sum: Vec<u64> = a.iter().zip(a2).map(|(x, y)| m.add(*x, *y)).collect();
            let lhs = convolve_mod(&sum, &b, m).unwrap();
            let ca = convolve_mod(a, &b, m).unwrap();
            let ca2 = convolve_mod(a2, &b, m).unwrap();
            let rhs: Vec<u64> = ca.iter().zip(&ca2).map(|(x, y)| m.add(*x, *y)).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn correlate_matches_direct(
            weights in proptest::collection::vec(0u64..FINGERPRINT_PRIME, 1..32),
            text in proptest::collection::vec(0u64..FINGERPRINT_PRIME, 32..200),
        ) {
            let m = Modulus::fingerprint_prime();
            let got = correlate_windows(&weights, &text, m).unwrap();
            let ell = weights.len();
            for (i, &g) in got.iter().enumerate() {
                let mut want = 0u64;
                for (p, &w) in weights.iter().enumerate() {
                    want = m.add(want, m.mul(w, text[i + p]));
                }
                prop_assert_eq!(g, want);
                prop_assert!(i + ell <= text.len());
            }
            prop_assert_eq!(got.len(), text.len() - ell + 1);
        }

        #[test]
        fn integer_correlate_matches_direct(
            weights in proptest::collection::vec(-8i64..=8, 1..32),
            indicator in proptest::collection::vec(0u64..=1, 32..200),
        ) {
            let got = integer_correlate_windows(&weights, &indicator).unwrap();
            for (i, &g) in got.iter().enumerate() {
                let want: i64 = weights
                    .iter()
                    .enumerate()
                    .map(|(p, &w)| w * indicator[i + p] as i64)
                    .sum();
                prop_assert_eq!(g, want);
            }
        }
    }
}
