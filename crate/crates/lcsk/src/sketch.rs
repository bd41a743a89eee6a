//! ±1 random-projection sketches of one-hot-expanded windows.
//!
//! A spec fixes a `d x (sigma * ell)` matrix of i.u.d. ±1 entries through
//! per-row seeds. Window sketches are kept as exact integer row dot products
//! (the unscaled `M * mu(window)`); the scaled form with `c^2 = 1/(2d)` is
//! never materialized. With that scaling the squared sketch distance is an
//! unbiased estimator of the Hamming distance, and the distance test
//! `c^2 * sum <= (1+eps) k` becomes the integer comparison
//! `sum <= 2 d (1+eps) k`.

use crate::error::{Error, Result};
use crate::modmath::integer_correlate_windows;
use crate::seqcore::Sequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_ROWS_CONSTANT: f64 = 8.0;

/// Dimensions and per-row seeds of a sketch matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchSpec {
    rows: usize,
    alpha: f64,
    window_len: usize,
    sigma: u16,
    row_seeds: Vec<u64>,
    tag: u64,
}

impl SketchSpec {
    /// `d = ceil(constant * alpha^-2 * ln n)` rows for windows of length
    /// `window_len` over an alphabet of size `sigma`.
    pub fn new(
        alpha: f64,
        window_len: usize,
        sigma: u16,
        n: usize,
        constant: f64,
        seed: u64,
    ) -> Result<Self> {
        if alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "distortion parameter must be positive, got {alpha}"
            )));
        }
        let ln_n = (n.max(2) as f64).ln();
        let rows = (constant * alpha.powi(-2) * ln_n).ceil().max(1.0) as usize;
        Self::with_rows(alpha, window_len, sigma, rows, seed)
    }

    /// A spec with an explicit row count.
    pub fn with_rows(
        alpha: f64,
        window_len: usize,
        sigma: u16,
        rows: usize,
        seed: u64,
    ) -> Result<Self> {
        if rows == 0 || window_len == 0 || sigma < 2 {
            return Err(Error::InvalidParameter(
                "sketch spec needs rows >= 1, window_len >= 1, sigma >= 2".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let row_seeds: Vec<u64> = (0..rows).map(|_| rng.random()).collect();
        let mut tag = 0xcbf2_9ce4_8422_2325u64;
        for v in [
            rows as u64,
            alpha.to_bits(),
            window_len as u64,
            sigma as u64,
            row_seeds[0],
            row_seeds[rows - 1],
        ] {
            tag ^= v;
            tag = tag.wrapping_mul(0x0000_0100_0000_01b3);
        }
        Ok(SketchSpec {
            rows,
            alpha,
            window_len,
            sigma,
            row_seeds,
            tag,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn sigma(&self) -> u16 {
        self.sigma
    }

    /// The ±1 entries of row `i`, reproducible from the row seed.
    pub fn row_entries(&self, i: usize) -> Vec<i8> {
        let len = self.sigma as usize * self.window_len;
        let mut rng = ChaCha8Rng::seed_from_u64(self.row_seeds[i]);
        let mut out = Vec::with_capacity(len);
        let mut bits = 0u64;
        let mut left = 0u32;
        for _ in 0..len {
            if left == 0 {
                bits = rng.random();
                left = 64;
            }
            out.push(if bits & 1 == 1 { 1 } else { -1 });
            bits >>= 1;
            left -= 1;
        }
        out
    }
}

/// The fully materialized ±1 matrix of a spec, for repeated per-window use.
#[derive(Debug, Clone)]
pub struct SketchMatrix {
    spec: SketchSpec,
    entries: Vec<Vec<i8>>,
}

impl SketchMatrix {
    pub fn new(spec: &SketchSpec) -> Self {
        let entries = (0..spec.rows()).map(|i| spec.row_entries(i)).collect();
        SketchMatrix {
            spec: spec.clone(),
            entries,
        }
    }

    pub fn spec(&self) -> &SketchSpec {
        &self.spec
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i]
    }

    /// Unscaled sketch of one window: `coords[i] = row_i . mu(window)`.
    pub fn window_sketch(&self, window: &[u16]) -> Result<WindowSketch> {
        if window.len() != self.spec.window_len {
            return Err(Error::LengthMismatch {
                left: window.len(),
                right: self.spec.window_len,
            });
        }
        let sigma = self.spec.sigma as usize;
        let coords = self
            .entries
            .iter()
            .map(|row| {
                window
                    .iter()
                    .enumerate()
                    .map(|(p, &c)| row[sigma * p + (c as usize - 1)] as i64)
                    .sum()
            })
            .collect();
        Ok(WindowSketch {
            coords,
            tag: self.spec.tag,
        })
    }
}

/// Exact integer sketch coordinates of one window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSketch {
    coords: Vec<i64>,
    tag: u64,
}

impl WindowSketch {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }
}

/// Squared Euclidean distance of two sketches, in exact integers.
pub fn sketch_squared_distance(u: &WindowSketch, v: &WindowSketch) -> Result<u64> {
    if u.tag != v.tag || u.coords.len() != v.coords.len() {
        return Err(Error::SketchSpecMismatch);
    }
    Ok(u.coords
        .iter()
        .zip(&v.coords)
        .map(|(a, b)| {
            let d = a - b;
            (d * d) as u64
        })
        .sum())
}

/// The comparison behind the distance test: `sum <= 2 d (1+eps) k`, the
/// integer form of `c^2 * sum <= (1+eps) k` with `c^2 = 1/(2d)`.
pub fn sum_within_budget(sum: u64, rows: usize, k: usize, epsilon: f64) -> bool {
    sum as f64 <= 2.0 * rows as f64 * (1.0 + epsilon) * k as f64
}

/// The distance test of the decision procedure: true iff
/// `sum (u_i - v_i)^2 <= 2 d (1+eps) k`.
pub fn sketch_distance_test(
    u: &WindowSketch,
    v: &WindowSketch,
    k: usize,
    epsilon: f64,
) -> Result<bool> {
    let sum = sketch_squared_distance(u, v)?;
    Ok(sum_within_budget(sum, u.coords.len(), k, epsilon))
}

/// One row of `M * mu(window)` for every window start of `text`, computed as
/// `sigma` per-character exact correlations.
pub fn sketch_row_all_windows(text: &Sequence, spec: &SketchSpec, row: usize) -> Result<Vec<i64>> {
    let entries = spec.row_entries(row);
    row_all_windows_from_entries(text, &entries, spec.window_len, spec.sigma)
}

fn row_all_windows_from_entries(
    text: &Sequence,
    entries: &[i8],
    window_len: usize,
    sigma: u16,
) -> Result<Vec<i64>> {
    if window_len > text.len() {
        return Err(Error::WindowTooLong {
            window: window_len,
            text: text.len(),
        });
    }
    let codes = text.codes();
    let count = text.len() - window_len + 1;
    let mut out = vec![0i64; count];
    let mut weights = vec![0i64; window_len];
    let mut indicator = vec![0u64; text.len()];
    for symbol in 1..=sigma {
        let mut present = false;
        for (pos, &c) in codes.iter().enumerate() {
            let hit = c == symbol;
            indicator[pos] = hit as u64;
            present |= hit;
        }
        if !present {
            continue;
        }
        for (p, w) in weights.iter_mut().enumerate() {
            *w = entries[sigma as usize * p + (symbol as usize - 1)] as i64;
        }
        let partial = integer_correlate_windows(&weights, &indicator)?;
        for (o, p) in out.iter_mut().zip(partial) {
            *o += p;
        }
    }
    Ok(out)
}

/// Squared sketch distances for a list of window-start collision pairs,
/// processed in batches with the rows streamed one at a time, so memory
/// stays linear in the text length plus the batch size instead of growing
/// with the number of rows.
pub fn batched_collision_distances(
    pairs: &[(usize, usize)],
    x: &Sequence,
    y: &Sequence,
    spec: &SketchSpec,
    batch_size: usize,
) -> Result<Vec<u64>> {
    if batch_size == 0 {
        return Err(Error::InvalidParameter("batch size must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(pairs.len());
    for chunk in pairs.chunks(batch_size) {
        let mut counters = vec![0u64; chunk.len()];
        for row in 0..spec.rows() {
            let entries = spec.row_entries(row);
            let row_x = row_all_windows_from_entries(x, &entries, spec.window_len, spec.sigma)?;
            let row_y = row_all_windows_from_entries(y, &entries, spec.window_len, spec.sigma)?;
            for (counter, &(i, j)) in counters.iter_mut().zip(chunk) {
                let d = row_x[i] - row_y[j];
                *counter += (d * d) as u64;
            }
        }
        out.extend(counters);
    }
    Ok(out)
}
