//! The decision procedure: given a window length and a mismatch budget,
//! answer YES with a witness pair or NO.
//!
//! Collisions of projected-window fingerprints under a batch of bit-sampling
//! hashes are enumerated in one pass per hash; a capped prefix of the
//! collision stream goes through the sketch distance test, and one collision
//! drawn uniformly from the whole stream gets an exact capped Hamming check.

use crate::error::{Error, Result};
use crate::fingerprint::{
    projected_fingerprints_all_windows, projected_fingerprints_direct, sample_projection,
    FingerprintScheme, ProjectionHash,
};
use crate::modmath::correlate_windows;
use crate::seqcore::{hamming_distance_capped, Sequence};
use crate::sketch::{sum_within_budget, SketchMatrix, SketchSpec, WindowSketch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// How the number of hash functions is derived from `n` and `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LRule {
    /// `L = max(1, floor(n^(1/(1+eps)) / 16))`, the empirical trade-off.
    Practical,
    /// `L = ceil(ln 4 * (1+eps)/eps * n^(1/(1+eps)))`, large enough for the
    /// 3/4 collision bound on a planted pair at distance k.
    TheoremBound,
}

/// Derived parameters of one decision call.
#[derive(Debug, Clone)]
pub struct DecisionParams {
    pub epsilon: f64,
    pub n: usize,
    pub window_len: usize,
    pub k: usize,
    pub p1: f64,
    pub p2: f64,
    /// Positions per hash (`m`); zero on the trivial and exact paths.
    pub arity: usize,
    /// Number of hash functions (`L`).
    pub hash_count: usize,
    /// Bound on the number of sketch-tested collisions (`4 n L`).
    pub cap: usize,
    /// `(1+eps) k >= window_len`: any window pair is a valid witness.
    pub trivial: bool,
    /// `k == 0` degenerates the projection family; handled by exact matching.
    pub exact_path: bool,
}

pub fn lsh_parameters(n: usize, window_len: usize, k: usize, epsilon: f64) -> DecisionParams {
    lsh_parameters_with(n, window_len, k, epsilon, LRule::Practical)
}

pub fn lsh_parameters_with(
    n: usize,
    window_len: usize,
    k: usize,
    epsilon: f64,
    rule: LRule,
) -> DecisionParams {
    assert!(window_len >= 1 && epsilon > 0.0);
    let nf = n.max(1) as f64;
    let ell = window_len as f64;
    let hash_count = match rule {
        LRule::Practical => (nf.powf(1.0 / (1.0 + epsilon)) / 16.0).floor().max(1.0) as usize,
        LRule::TheoremBound => {
            (4.0f64.ln() * (1.0 + epsilon) / epsilon * nf.powf(1.0 / (1.0 + epsilon))).ceil()
                as usize
        }
    };
    let cap = 4usize.saturating_mul(n).saturating_mul(hash_count);
    let trivial = (1.0 + epsilon) * k as f64 >= ell;
    let exact_path = k == 0 && !trivial;
    let p1 = 1.0 - k as f64 / ell;
    let p2 = 1.0 - (1.0 + epsilon) * k as f64 / ell;
    let arity = if trivial || exact_path {
        0
    } else {
        // m = ceil(log_{p2}(1/n)) = ceil(ln n / ln(1/p2))
        ((nf.ln() / (1.0 / p2).ln()).ceil() as usize).max(1)
    };
    DecisionParams {
        epsilon,
        n,
        window_len,
        k,
        p1,
        p2,
        arity,
        hash_count,
        cap,
        trivial,
        exact_path,
    }
}

/// All window pairs of X and Y whose projected fingerprints under one hash
/// equal `fingerprint`: a compressed representation of `|idx_x| * |idx_y|`
/// collisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionGroup {
    pub fingerprint: u64,
    pub hash_index: usize,
    pub idx_x: Vec<usize>,
    pub idx_y: Vec<usize>,
}

impl CollisionGroup {
    pub fn weight(&self) -> u64 {
        self.idx_x.len() as u64 * self.idx_y.len() as u64
    }
}

/// One concrete collision: window starts in X and Y plus the hash that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Collision {
    pub x_start: usize,
    pub y_start: usize,
    pub hash_index: usize,
}

/// Group two per-window fingerprint arrays by common value.
/// Groups come out ordered by fingerprint value, with ascending index lists.
fn group_common_values(fx: &[u64], fy: &[u64], hash_index: usize) -> Vec<CollisionGroup> {
    let mut sx: Vec<(u64, usize)> = fx.iter().copied().zip(0..).collect();
    let mut sy: Vec<(u64, usize)> = fy.iter().copied().zip(0..).collect();
    sx.sort_unstable();
    sy.sort_unstable();
    let mut groups = Vec::new();
    let (mut a, mut b) = (0usize, 0usize);
    while a < sx.len() && b < sy.len() {
        let va = sx[a].0;
        let vb = sy[b].0;
        if va < vb {
            a += 1;
        } else if vb < va {
            b += 1;
        } else {
            let mut idx_x = Vec::new();
            while a < sx.len() && sx[a].0 == va {
                idx_x.push(sx[a].1);
                a += 1;
            }
            let mut idx_y = Vec::new();
            while b < sy.len() && sy[b].0 == va {
                idx_y.push(sy[b].1);
                b += 1;
            }
            groups.push(CollisionGroup {
                fingerprint: va,
                hash_index,
                idx_x,
                idx_y,
            });
        }
    }
    groups
}

/// Short windows skip the transform: the sparse per-window evaluation is
/// cheaper below roughly `2 log2 n`.
fn short_window(window_len: usize, n: usize) -> bool {
    (window_len as f64) < 2.0 * (n.max(2) as f64).log2()
}

fn fingerprints_auto(
    text: &Sequence,
    h: &ProjectionHash,
    scheme: &FingerprintScheme,
    n: usize,
) -> Result<Vec<u64>> {
    if short_window(h.window_len(), n) {
        projected_fingerprints_direct(text, h, scheme)
    } else {
        projected_fingerprints_all_windows(text, h, scheme)
    }
}

fn collision_groups_for_hash(
    x: &Sequence,
    y: &Sequence,
    h: &ProjectionHash,
    hash_index: usize,
    scheme: &FingerprintScheme,
    n: usize,
) -> Result<Vec<CollisionGroup>> {
    let fx = fingerprints_auto(x, h, scheme, n)?;
    let fy = fingerprints_auto(y, h, scheme, n)?;
    Ok(group_common_values(&fx, &fy, hash_index))
}

/// The full collision multiset for a set of hashes, as groups in stream
/// order: hashes in order, groups per hash ordered by fingerprint value.
pub fn enumerate_collision_groups(
    x: &Sequence,
    y: &Sequence,
    window_len: usize,
    hashes: &[ProjectionHash],
    scheme: &FingerprintScheme,
) -> Result<Vec<CollisionGroup>> {
    if window_len > x.len().min(y.len()) {
        return Err(Error::WindowTooLong {
            window: window_len,
            text: x.len().min(y.len()),
        });
    }
    let n = x.len().max(y.len());
    let mut out = Vec::new();
    for (hash_index, h) in hashes.iter().enumerate() {
        out.extend(collision_groups_for_hash(x, y, h, hash_index, scheme, n)?);
    }
    Ok(out)
}

/// The first `cap` collisions of the stream, in expansion order
/// (groups in stream order, X index major within a group).
pub fn capped_subset(groups: &[CollisionGroup], cap: usize) -> Vec<Collision> {
    let mut out = Vec::new();
    for g in groups {
        for &i in &g.idx_x {
            for &j in &g.idx_y {
                if out.len() == cap {
                    return out;
                }
                out.push(Collision {
                    x_start: i,
                    y_start: j,
                    hash_index: g.hash_index,
                });
            }
        }
    }
    out
}

/// Single-slot weighted reservoir over the group stream.
struct Reservoir {
    total: u128,
    chosen: Option<Collision>,
}

impl Reservoir {
    fn new() -> Self {
        Reservoir {
            total: 0,
            chosen: None,
        }
    }

    fn offer(&mut self, group: &CollisionGroup, rng: &mut ChaCha8Rng) {
        let weight = group.weight() as u128;
        if weight == 0 {
            return;
        }
        self.total += weight;
        if rng.random_range(0..self.total) < weight {
            let pick = rng.random_range(0..weight) as u64;
            let y_len = group.idx_y.len() as u64;
            self.chosen = Some(Collision {
                x_start: group.idx_x[(pick / y_len) as usize],
                y_start: group.idx_y[(pick % y_len) as usize],
                hash_index: group.hash_index,
            });
        }
    }
}

/// Draw one collision uniformly from the multiset represented by the group
/// stream; `None` when the stream holds no collisions.
pub fn reservoir_draw<'a>(
    groups: impl IntoIterator<Item = &'a CollisionGroup>,
    rng: &mut ChaCha8Rng,
) -> Option<Collision> {
    let mut reservoir = Reservoir::new();
    for g in groups {
        reservoir.offer(g, rng);
    }
    reservoir.chosen
}

/// How sketches are evaluated inside `decide`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SketchMode {
    /// Sketch each distinct colliding window on demand and keep it.
    Precomputed,
    /// Stream the matrix rows over the capped collision list in batches,
    /// keeping memory linear in the text length.
    Batched,
}

#[derive(Debug, Clone)]
pub struct DecideConfig {
    pub epsilon: f64,
    pub l_rule: LRule,
    pub sketch_constant: f64,
    pub sketch_mode: SketchMode,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig {
            epsilon: 1.0,
            l_rule: LRule::Practical,
            sketch_constant: crate::sketch::DEFAULT_ROWS_CONSTANT,
            sketch_mode: SketchMode::Precomputed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
}

/// A YES certificate: window starts and the shared window length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub x_start: usize,
    pub y_start: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionOutcome {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl DecisionOutcome {
    fn yes(x_start: usize, y_start: usize, length: usize) -> Self {
        DecisionOutcome {
            verdict: Verdict::Yes,
            witness: Some(Witness {
                x_start,
                y_start,
                length,
            }),
        }
    }

    fn no() -> Self {
        DecisionOutcome {
            verdict: Verdict::No,
            witness: None,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.verdict == Verdict::Yes
    }
}

/// Exact-match path for `k == 0`: group windows by full-window fingerprint
/// and verify one member pair per group character by character.
fn decide_exact_match(
    x: &Sequence,
    y: &Sequence,
    window_len: usize,
    scheme: &FingerprintScheme,
) -> Result<DecisionOutcome> {
    let m = scheme.modulus();
    let q = m.get();
    let weights: Vec<u64> = (0..window_len).map(|p| scheme.power(p)).collect();
    let fx = correlate_windows(
        &weights,
        &x.codes().iter().map(|&c| c as u64 % q).collect::<Vec<_>>(),
        m,
    )?;
    let fy = correlate_windows(
        &weights,
        &y.codes().iter().map(|&c| c as u64 % q).collect::<Vec<_>>(),
        m,
    )?;
    for g in group_common_values(&fx, &fy, 0) {
        let (i, j) = (g.idx_x[0], g.idx_y[0]);
        let wx = x.window(i, window_len)?;
        let wy = y.window(j, window_len)?;
        if hamming_distance_capped(wx, wy, 0)?.is_within() {
            return Ok(DecisionOutcome::yes(i, j, window_len));
        }
    }
    Ok(DecisionOutcome::no())
}

struct SketchCache<'a> {
    matrix: &'a SketchMatrix,
    window_len: usize,
    x_cache: HashMap<usize, WindowSketch>,
    y_cache: HashMap<usize, WindowSketch>,
}

impl<'a> SketchCache<'a> {
    fn squared_distance(&mut self, x: &Sequence, y: &Sequence, c: &Collision) -> Result<u64> {
        let ell = self.window_len;
        let matrix = self.matrix;
        if !self.x_cache.contains_key(&c.x_start) {
            let sk = matrix.window_sketch(x.window(c.x_start, ell)?)?;
            self.x_cache.insert(c.x_start, sk);
        }
        if !self.y_cache.contains_key(&c.y_start) {
            let sk = matrix.window_sketch(y.window(c.y_start, ell)?)?;
            self.y_cache.insert(c.y_start, sk);
        }
        crate::sketch::sketch_squared_distance(&self.x_cache[&c.x_start], &self.y_cache[&c.y_start])
    }
}

/// One round of the decision procedure.
///
/// Returns NO when no window of the requested length exists; answers the
/// trivial and `k == 0` regimes directly; otherwise runs the two collision
/// tests. Any witness returned from the random-collision branch has been
/// checked character by character against `(1+eps) k`.
pub fn decide(
    x: &Sequence,
    y: &Sequence,
    window_len: usize,
    k: usize,
    cfg: &DecideConfig,
    scheme: &FingerprintScheme,
    seed: u64,
) -> Result<DecisionOutcome> {
    if window_len == 0 {
        return Err(Error::InvalidParameter("window length must be >= 1".into()));
    }
    if cfg.epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {}",
            cfg.epsilon
        )));
    }
    if x.sigma() != y.sigma() {
        return Err(Error::SigmaMismatch(x.sigma(), y.sigma()));
    }
    if window_len > x.len().min(y.len()) {
        return Ok(DecisionOutcome::no());
    }

    let n = x.len().max(y.len());
    let params = lsh_parameters_with(n, window_len, k, cfg.epsilon, cfg.l_rule);

    if params.trivial {
        // Any pair differs in at most window_len <= (1+eps) k positions.
        return Ok(DecisionOutcome::yes(0, 0, window_len));
    }
    if params.exact_path {
        return decide_exact_match(x, y, window_len, scheme);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sketch_seed: u64 = rng.random();
    let hashes: Vec<ProjectionHash> = (0..params.hash_count)
        .map(|_| sample_projection(window_len, params.arity, &mut rng))
        .collect();
    let spec = SketchSpec::new(
        cfg.epsilon,
        window_len,
        x.sigma(),
        n,
        cfg.sketch_constant,
        sketch_seed,
    )?;
    let verify_cap = ((1.0 + cfg.epsilon) * k as f64).floor() as usize;

    let mut reservoir = Reservoir::new();

    match cfg.sketch_mode {
        SketchMode::Precomputed => {
            let matrix = SketchMatrix::new(&spec);
            let mut cache = SketchCache {
                matrix: &matrix,
                window_len,
                x_cache: HashMap::new(),
                y_cache: HashMap::new(),
            };
            let mut tested = 0usize;
            for (hash_index, h) in hashes.iter().enumerate() {
                for g in collision_groups_for_hash(x, y, h, hash_index, scheme, n)? {
                    reservoir.offer(&g, &mut rng);
                    if tested >= params.cap {
                        continue;
                    }
                    'expand: for &i in &g.idx_x {
                        for &j in &g.idx_y {
                            if tested == params.cap {
                                break 'expand;
                            }
                            tested += 1;
                            let c = Collision {
                                x_start: i,
                                y_start: j,
                                hash_index,
                            };
                            let sum = cache.squared_distance(x, y, &c)?;
                            if sum_within_budget(sum, spec.rows(), k, cfg.epsilon) {
                                return Ok(DecisionOutcome::yes(i, j, window_len));
                            }
                        }
                    }
                }
            }
        }
        SketchMode::Batched => {
            let mut capped: Vec<Collision> = Vec::new();
            for (hash_index, h) in hashes.iter().enumerate() {
                for g in collision_groups_for_hash(x, y, h, hash_index, scheme, n)? {
                    reservoir.offer(&g, &mut rng);
                    if capped.len() >= params.cap {
                        continue;
                    }
                    'expand: for &i in &g.idx_x {
                        for &j in &g.idx_y {
                            if capped.len() == params.cap {
                                break 'expand;
                            }
                            capped.push(Collision {
                                x_start: i,
                                y_start: j,
                                hash_index,
                            });
                        }
                    }
                }
            }
            let pairs: Vec<(usize, usize)> =
                capped.iter().map(|c| (c.x_start, c.y_start)).collect();
            let sums =
                crate::sketch::batched_collision_distances(&pairs, x, y, &spec, n.max(1))?;
            for (c, sum) in capped.iter().zip(sums) {
                if sum_within_budget(sum, spec.rows(), k, cfg.epsilon) {
                    return Ok(DecisionOutcome::yes(c.x_start, c.y_start, window_len));
                }
            }
        }
    }

    if let Some(c) = reservoir.chosen {
        let wx = x.window(c.x_start, window_len)?;
        let wy = y.window(c.y_start, window_len)?;
        if hamming_distance_capped(wx, wy, verify_cap)?.is_within() {
            return Ok(DecisionOutcome::yes(c.x_start, c.y_start, window_len));
        }
    }
    Ok(DecisionOutcome::no())
}
