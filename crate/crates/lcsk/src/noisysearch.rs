//! Lie-tolerant binary search over window lengths and the top-level solver.
//!
//! The optimization problem reduces to the decision procedure through a
//! variant of the Twenty Questions game: Carole answers "is x <= A?" with a
//! bounded fraction of lies allowed when the true answer is YES, and may
//! answer anything inside the slack zone `(A, B]`. Paul follows the
//! trusted-interval-stack strategy and returns the argument of the largest
//! YES seen. Here each question runs the decision procedure a few times,
//! with every witness re-verified character by character, so a returned
//! witness can never violate the distance bound.

use crate::derive_seed;
use crate::error::{Error, Result};
use crate::fingerprint::FingerprintScheme;
use crate::lshdecide::{decide, DecideConfig, LRule, SketchMode};
use crate::seqcore::{hamming_distance_capped, CappedDistance, Sequence};
use std::collections::HashMap;

/// Question budget and lie tolerance of one game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    /// Upper end of the search range `[0, N]`.
    pub range_max: u64,
    /// Assumed lie fraction, strictly below 1/3.
    pub rho: f64,
    /// Total number of questions Paul may ask.
    pub questions: usize,
}

impl GameConfig {
    /// The worst-case budget `Q = ceil(8 log2 N / (1 - 3 rho)^2)`.
    pub fn theoretical(range_max: u64, rho: f64) -> Result<Self> {
        if !(0.0..1.0 / 3.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!(
                "lie fraction must lie in [0, 1/3), got {rho}"
            )));
        }
        let log_n = (range_max.max(2) as f64).log2();
        let questions = (8.0 * log_n / (1.0 - 3.0 * rho).powi(2)).ceil() as usize;
        Ok(GameConfig {
            range_max,
            rho,
            questions: questions.max(2),
        })
    }

    /// The practical budget `Q = ceil(2 log2(N + 2))`.
    pub fn practical(range_max: u64) -> Self {
        let questions = (2.0 * ((range_max + 2) as f64).log2()).ceil() as usize;
        GameConfig {
            range_max,
            rho: 0.3,
            questions: questions.max(2),
        }
    }
}

/// Stack of trusted intervals; the bottom `[0, N]` is axiomatic and never
/// removed.
#[derive(Debug, Clone)]
pub struct IntervalStack {
    stack: Vec<(u64, u64)>,
}

impl IntervalStack {
    pub fn new(range_max: u64) -> Self {
        IntervalStack {
            stack: vec![(0, range_max)],
        }
    }

    pub fn top(&self) -> (u64, u64) {
        *self.stack.last().expect("bottom interval is permanent")
    }

    pub fn push(&mut self, interval: (u64, u64)) {
        self.stack.push(interval);
    }

    pub fn pop(&mut self) {
        if self.stack.len() > 1 {
            self.stack.pop();
        }
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }
}

/// The trusted-interval-stack strategy, returning the argument of the
/// largest YES answer obtained during the game (0 if no YES was ever given).
///
/// Each round queries the midpoint of the top interval plus one endpoint as
/// a consistency check, so at most `questions` oracle calls are made.
pub fn twenty_questions(mut oracle: impl FnMut(u64) -> bool, config: &GameConfig) -> u64 {
    let mut stack = IntervalStack::new(config.range_max);
    let mut best_yes: Option<u64> = None;
    let record = |x: u64, best: &mut Option<u64>| {
        *best = Some(best.map_or(x, |b: u64| b.max(x)));
    };
    for _ in 0..config.questions / 2 {
        let (lo, hi) = stack.top();
        let mid = lo + (hi - lo).div_ceil(2);
        if oracle(mid) {
            record(mid, &mut best_yes);
            if oracle(hi) {
                record(hi, &mut best_yes);
                stack.pop();
            } else {
                stack.push((mid, hi));
            }
        } else if oracle(lo) {
            record(lo, &mut best_yes);
            if mid > lo {
                stack.push((lo, mid - 1));
            } else {
                // degenerate interval answered inconsistently
                stack.pop();
            }
        } else {
            stack.pop();
        }
    }
    best_yes.unwrap_or(0)
}

// --- exact longest common substring (0 mismatches) -------------------------

struct SamState {
    len: u32,
    link: i32,
    first_end: u32,
    next: HashMap<u16, u32>,
}

/// Suffix automaton over X, used to stream Y in linear time.
struct SuffixAutomaton {
    states: Vec<SamState>,
}

impl SuffixAutomaton {
    fn build(codes: &[u16]) -> Self {
        let mut states = vec![SamState {
            len: 0,
            link: -1,
            first_end: 0,
            next: HashMap::new(),
        }];
        let mut last = 0usize;
        for (pos, &c) in codes.iter().enumerate() {
            let cur = states.len();
            states.push(SamState {
                len: states[last].len + 1,
                link: -1,
                first_end: pos as u32,
                next: HashMap::new(),
            });
            let mut p = last as i32;
            while p >= 0 && !states[p as usize].next.contains_key(&c) {
                states[p as usize].next.insert(c, cur as u32);
                p = states[p as usize].link;
            }
            if p < 0 {
                states[cur].link = 0;
            } else {
                let q = states[p as usize].next[&c] as usize;
                if states[p as usize].len + 1 == states[q].len {
                    states[cur].link = q as i32;
                } else {
                    let clone = states.len();
                    let cloned = SamState {
                        len: states[p as usize].len + 1,
                        link: states[q].link,
                        first_end: states[q].first_end,
                        next: states[q].next.clone(),
                    };
                    states.push(cloned);
                    while p >= 0 && states[p as usize].next.get(&c) == Some(&(q as u32)) {
                        states[p as usize].next.insert(c, clone as u32);
                        p = states[p as usize].link;
                    }
                    states[q].link = clone as i32;
                    states[cur].link = clone as i32;
                }
            }
            last = cur;
        }
        SuffixAutomaton { states }
    }
}

/// Exact longest common substring with 0 mismatches, with one witness
/// occurrence: `(length, x_start, y_start)`.
pub fn exact_lcs_witness(x: &Sequence, y: &Sequence) -> (usize, usize, usize) {
    if x.is_empty() || y.is_empty() {
        return (0, 0, 0);
    }
    let sam = SuffixAutomaton::build(x.codes());
    let mut state = 0usize;
    let mut length = 0usize;
    let mut best = (0usize, 0usize, 0usize);
    for (j, &c) in y.codes().iter().enumerate() {
        loop {
            if let Some(&nx) = sam.states[state].next.get(&c) {
                state = nx as usize;
                length += 1;
                break;
            }
            let link = sam.states[state].link;
            if link < 0 {
                length = 0;
                break;
            }
            state = link as usize;
            length = sam.states[state].len as usize;
        }
        if length > best.0 {
            let x_end = sam.states[state].first_end as usize;
            best = (length, x_end + 1 - length, j + 1 - length);
        }
    }
    best
}

/// Exact longest common substring length with 0 mismatches.
pub fn exact_lcs(x: &Sequence, y: &Sequence) -> usize {
    exact_lcs_witness(x, y).0
}

/// Search interval for the game: `A = min(LCS + k, min_len)` and
/// `B = min((k+1) LCS + k, min_len)`, both clamped to the longest window
/// that exists at all.
pub fn interval_bounds(x: &Sequence, y: &Sequence, k: usize) -> (usize, usize) {
    let lcs = exact_lcs(x, y);
    let min_len = x.len().min(y.len());
    let a = (lcs + k).min(min_len);
    let b = (k + 1)
        .saturating_mul(lcs)
        .saturating_add(k)
        .min(min_len);
    (a, b)
}

/// Which question budget the solver uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuestionBudget {
    Practical,
    Theoretical { rho: f64 },
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub epsilon: f64,
    /// Decision calls per question; YES wins if any repetition verifies.
    pub repetitions: usize,
    pub budget: QuestionBudget,
    pub l_rule: LRule,
    pub sketch_constant: f64,
    pub sketch_mode: SketchMode,
}

impl SolverConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        SolverConfig {
            epsilon,
            ..SolverConfig::default()
        }
    }

    fn decide_config(&self) -> DecideConfig {
        DecideConfig {
            epsilon: self.epsilon,
            l_rule: self.l_rule,
            sketch_constant: self.sketch_constant,
            sketch_mode: self.sketch_mode,
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1.0,
            repetitions: 3,
            budget: QuestionBudget::Practical,
            l_rule: LRule::Practical,
            sketch_constant: crate::sketch::DEFAULT_ROWS_CONSTANT,
            sketch_mode: SketchMode::Precomputed,
        }
    }
}

/// The reported answer: length, witness start positions, and the verified
/// Hamming distance of the witness (always at most `(1+eps) k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchResult {
    pub length: usize,
    pub x_start: usize,
    pub y_start: usize,
    pub distance: usize,
}

/// Longest common substring with approximately `k` mismatches.
///
/// Runs the lie-tolerant search over `[A, B]`, asking the decision procedure
/// `repetitions` times per question and demoting YES answers whose witness
/// fails the exact distance check. The longest verified witness across all
/// questions is returned; when nothing verifies, the exact-LCS witness
/// (distance 0) is a safe fallback since `A >= LCS` always holds.
pub fn lcs_approx_k(
    x: &Sequence,
    y: &Sequence,
    k: usize,
    cfg: &SolverConfig,
    seed: u64,
) -> Result<SearchResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput("both input sequences must be nonempty"));
    }
    if x.sigma() != y.sigma() {
        return Err(Error::SigmaMismatch(x.sigma(), y.sigma()));
    }
    if cfg.epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {}",
            cfg.epsilon
        )));
    }
    if cfg.repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
    }

    let n = x.len().max(y.len());
    let scheme = FingerprintScheme::new(n, derive_seed(seed, &[0x5eed]));
    let (lcs_len, lcs_x, lcs_y) = exact_lcs_witness(x, y);
    let min_len = x.len().min(y.len());
    let a = (lcs_len + k).min(min_len);
    let b = (k + 1)
        .saturating_mul(lcs_len)
        .saturating_add(k)
        .min(min_len);

    let mut best = SearchResult {
        length: lcs_len,
        x_start: lcs_x,
        y_start: lcs_y,
        distance: 0,
    };

    let decide_cfg = cfg.decide_config();
    let verify_cap = ((1.0 + cfg.epsilon) * k as f64).floor() as usize;
    let mut question = 0u64;

    let ask = |window_len: usize, question: &mut u64, best: &mut SearchResult| -> bool {
        *question += 1;
        let mut answer = false;
        for rep in 0..cfg.repetitions {
            let rep_seed = derive_seed(seed, &[1, *question, rep as u64]);
            let outcome = match decide(x, y, window_len, k, &decide_cfg, &scheme, rep_seed) {
                Ok(o) => o,
                Err(_) => continue,
            };
            let Some(w) = outcome.witness else { continue };
            let (Ok(wx), Ok(wy)) = (x.window(w.x_start, w.length), y.window(w.y_start, w.length))
            else {
                continue;
            };
            match hamming_distance_capped(wx, wy, verify_cap) {
                Ok(CappedDistance::Within(d)) => {
                    if w.length > best.length {
                        *best = SearchResult {
                            length: w.length,
                            x_start: w.x_start,
                            y_start: w.y_start,
                            distance: d,
                        };
                    }
                    answer = true;
                }
                // failed verification: demote this repetition to NO
                _ => continue,
            }
        }
        answer
    };

    if b > a {
        let range = (b - a) as u64;
        let game = match cfg.budget {
            QuestionBudget::Practical => GameConfig::practical(range),
            QuestionBudget::Theoretical { rho } => GameConfig::theoretical(range, rho)?,
        };
        twenty_questions(
            |offset| ask(a + offset as usize, &mut question, &mut best),
            &game,
        );
    } else if a >= 1 {
        // B - A = 0: a single decision call supplies the witness.
        ask(a, &mut question, &mut best);
    }

    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{hamming_distance, Alphabet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dna(s: &str) -> Sequence {
        Alphabet::dna().encode(s.as_bytes()).unwrap()
    }

    fn random_seq(rng: &mut ChaCha8Rng, len: usize, sigma: u16) -> Sequence {
        Sequence::from_codes(
            (0..len).map(|_| rng.random_range(1..=sigma)).collect(),
            sigma,
        )
        .unwrap()
    }

    fn brute_lcs(x: &Sequence, y: &Sequence) -> usize {
        let xs = x.codes();
        let ys = y.codes();
        let mut best = 0;
        for i in 0..xs.len() {
            for j in 0..ys.len() {
                let mut l = 0;
                while i + l < xs.len() && j + l < ys.len() && xs[i + l] == ys[j + l] {
                    l += 1;
                }
                best = best.max(l);
            }
        }
        best
    }

    #[test]
    fn truthful_point_game() {
        let cfg = GameConfig::theoretical(8, 0.3).unwrap();
        let got = twenty_questions(|x| x <= 5, &cfg);
        assert_eq!(got, 5);
    }

    #[test]
    fn truthful_interval_game_stays_in_bounds() {
        let cfg = GameConfig::theoretical(15, 0.3).unwrap();
        // Carole answers the A = 3, B = 7 contract; inside the zone she
        // alternates.
        let mut flip = false;
        let got = twenty_questions(
            |x| {
                if x <= 3 {
                    true
                } else if x <= 7 {
                    flip = !flip;
                    flip
                } else {
                    false
                }
            },
            &cfg,
        );
        assert!((3..=7).contains(&got), "answer {got} outside [3, 7]");
    }

    #[test]
    fn truthful_exhaustive_point_games() {
        for n in 0u64..=64 {
            let cfg = GameConfig::theoretical(n, 0.3).unwrap();
            for a in 0..=n {
                let got = twenty_questions(|x| x <= a, &cfg);
                assert_eq!(got, a, "N={n} A={a}");
            }
        }
    }

    #[test]
    fn question_budget_is_respected() {
        for n in [0u64, 1, 5, 31, 100] {
            let cfg = GameConfig::theoretical(n, 0.3).unwrap();
            let mut calls = 0usize;
            twenty_questions(
                |x| {
                    calls += 1;
                    x <= n / 2
                },
                &cfg,
            );
            assert!(calls <= cfg.questions, "N={n}: {calls} > {}", cfg.questions);
        }
    }

    #[test]
    fn stack_keeps_bottom_interval() {
        let mut s = IntervalStack::new(10);
        assert_eq!(s.top(), (0, 10));
        s.pop();
        assert_eq!(s.top(), (0, 10));
        s.push((5, 10));
        s.push((5, 7));
        assert_eq!(s.depth(), 3);
        s.pop();
        s.pop();
        s.pop();
        assert_eq!(s.top(), (0, 10));
    }

    #[test]
    fn practical_budget_formula() {
        let g = GameConfig::practical(0);
        assert_eq!(g.questions, 2); // ceil(2 log2 2)
        let g = GameConfig::practical(62);
        assert_eq!(g.questions, 12); // ceil(2 log2 64)
    }

    #[test]
    fn invalid_rho_rejected() {
        assert!(GameConfig::theoretical(8, 1.0 / 3.0).is_err());
        assert!(GameConfig::theoretical(8, -0.1).is_err());
        assert!(GameConfig::theoretical(8, 0.32).is_ok());
    }

    #[test]
    fn exact_lcs_hand_cases() {
        assert_eq!(exact_lcs(&dna("ACGT"), &dna("ACGT")), 4);
        let a = Alphabet::latin(2).unwrap();
        let x = a.encode(b"ABAB").unwrap();
        let y = a.encode(b"BABA").unwrap();
        assert_eq!(exact_lcs(&x, &y), 3);
        let x = dna("AAAA");
        let y = dna("CCCC");
        assert_eq!(exact_lcs(&x, &y), 0);
    }

    #[test]
    fn exact_lcs_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..60 {
            let sigma = if trial % 2 == 0 { 2 } else { 4 };
            let x = random_seq(&mut rng, rng.random_range(1..80), sigma);
            let y = random_seq(&mut rng, rng.random_range(1..80), sigma);
            let (len, xi, yj) = exact_lcs_witness(&x, &y);
            assert_eq!(len, brute_lcs(&x, &y), "trial {trial}");
            assert_eq!(
                x.window(xi, len).unwrap(),
                y.window(yj, len).unwrap(),
                "witness mismatch in trial {trial}"
            );
        }
    }

    #[test]
    fn interval_bounds_cases() {
        let x = dna("ACGT");
        assert_eq!(interval_bounds(&x, &x, 0), (4, 4));
        let y = dna("CCCC");
        assert_eq!(interval_bounds(&dna("AAAA"), &y, 2), (2, 2));
        // clamping when LCS + k overruns the shorter string
        let x = dna("ACGTACGT");
        let y = dna("ACGTA");
        let (a, b) = interval_bounds(&x, &y, 3);
        assert_eq!(a, 5);
        assert_eq!(b, 5);
    }

    #[test]
    fn identical_inputs_full_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let x = random_seq(&mut rng, 200, 4);
        for k in [0usize, 3] {
            let r = lcs_approx_k(&x, &x, k, &SolverConfig::default(), 7).unwrap();
            assert_eq!(r.length, 200);
            assert_eq!(r.distance, 0);
        }
    }

    #[test]
    fn empty_input_is_error() {
        let x = dna("");
        let y = dna("ACGT");
        assert!(lcs_approx_k(&x, &y, 1, &SolverConfig::default(), 0).is_err());
        assert!(lcs_approx_k(&y, &x, 1, &SolverConfig::default(), 0).is_err());
    }

    #[test]
    fn witness_distance_never_exceeds_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let cfg = SolverConfig::default();
        for t in 0..15 {
            let x = random_seq(&mut rng, 400, 4);
            let y = random_seq(&mut rng, 400, 4);
            let k = [0usize, 2, 5, 10][t % 4];
            let r = lcs_approx_k(&x, &y, k, &cfg, t as u64).unwrap();
            let wx = x.window(r.x_start, r.length).unwrap();
            let wy = y.window(r.y_start, r.length).unwrap();
            let d = hamming_distance(wx, wy).unwrap();
            assert_eq!(d, r.distance);
            assert!(d as f64 <= (1.0 + cfg.epsilon) * k as f64);
        }
    }

    #[test]
    fn result_is_at_least_the_exact_lcs() {
        // the fallback witness makes this deterministic
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for t in 0..10 {
            let x = random_seq(&mut rng, 300, 4);
            let y = random_seq(&mut rng, 300, 4);
            let r = lcs_approx_k(&x, &y, 5, &SolverConfig::default(), t).unwrap();
            assert!(r.length >= exact_lcs(&x, &y));
        }
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let x = random_seq(&mut rng, 500, 4);
        let y = random_seq(&mut rng, 500, 4);
        let cfg = SolverConfig::default();
        let r1 = lcs_approx_k(&x, &y, 8, &cfg, 1234).unwrap();
        let r2 = lcs_approx_k(&x, &y, 8, &cfg, 1234).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn approximates_scaled_down_instances() {
        use crate::baselines::fgku;
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        let cfg = SolverConfig::default();
        let mut ok = 0usize;
        let runs = 10;
        for t in 0..runs {
            let x = random_seq(&mut rng, 1000, 4);
            let y = random_seq(&mut rng, 1000, 4);
            let exact = fgku(&x, &y, 10).length;
            let r = lcs_approx_k(&x, &y, 10, &cfg, 500 + t).unwrap();
            if r.length >= exact {
                ok += 1;
            }
        }
        assert!(ok * 10 >= runs * 7, "only {ok}/{runs} runs reached LCS_k");
    }
}
