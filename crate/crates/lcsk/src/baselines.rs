//! Exact reference algorithms: the FGKU diagonal scan and a brute-force
//! oracle, each computing the longest common substring with at most `k`
//! mismatches.

use crate::seqcore::Sequence;
use std::collections::VecDeque;

/// An exact answer: the maximal length and one witness pair of start
/// positions achieving it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactResult {
    pub length: usize,
    pub x_start: usize,
    pub y_start: usize,
}

/// Diagonal scan in O(|X| * |Y|) time and O(k) extra space per diagonal.
///
/// Every diagonal fixes the offset between the two start positions; a queue
/// of the most recent mismatch positions bounds the window to at most `k`
/// mismatches while it slides. Ties keep the first window found (strict
/// improvement only), which makes the output reproducible bit for bit.
pub fn fgku(x: &Sequence, y: &Sequence, k: usize) -> ExactResult {
    let xs = x.codes();
    let ys = y.codes();
    let n = xs.len() as isize;
    let m = ys.len() as isize;

    let mut best_len = 0usize;
    let mut best_x = 0usize;
    let mut best_y = 0usize;

    let mut queue: VecDeque<usize> = VecDeque::with_capacity(k + 1);
    for d in (-m + 1)..n {
        let i = (std::cmp::max(-d, 0) + d) as usize;
        let j = std::cmp::max(-d, 0) as usize;
        queue.clear();
        let mut s = 0usize; // left end of the current window on this diagonal
        let limit = (n as usize - i).min(m as usize - j);
        for p in 0..limit {
            if xs[i + p] != ys[j + p] {
                queue.push_back(p);
                if queue.len() > k {
                    s = queue.pop_front().unwrap() + 1;
                }
            }
            let len = p + 1 - s;
            if len > best_len {
                best_len = len;
                best_x = i + s;
                best_y = j + s;
            }
        }
    }

    ExactResult {
        length: best_len,
        x_start: best_x,
        y_start: best_y,
    }
}

/// Brute-force oracle: extend every start pair while the mismatch budget
/// lasts. Quadratic-plus; intended for inputs up to a few hundred symbols.
pub fn brute_lcs_k(x: &Sequence, y: &Sequence, k: usize) -> ExactResult {
    let xs = x.codes();
    let ys = y.codes();
    let mut best = ExactResult {
        length: 0,
        x_start: 0,
        y_start: 0,
    };
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            let mut mismatches = 0usize;
            let mut len = 0usize;
            let limit = (xs.len() - i).min(ys.len() - j);
            for p in 0..limit {
                if xs[i + p] != ys[j + p] {
                    mismatches += 1;
                    if mismatches > k {
                        break;
                    }
                }
                len = p + 1;
            }
            if len > best.length {
                best = ExactResult {
                    length: len,
                    x_start: i,
                    y_start: j,
                };
            }
        }
    }
    best
}
