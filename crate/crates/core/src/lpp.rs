//! Last-passage values for all six models.
//!
//! * lattice LPP (exponential / geometric vertex weights) by dynamic
//!   programming over up-right paths, both endpoints included;
//! * SJ edge-LPP: maximal number of weight-1 *horizontal* Bernoulli edges
//!   (vertical edges cost nothing);
//! * Poisson lines: semi-discrete LPP `U(x,m;y,n) = sup Σ F_i(x_{i−1}, x_i]`
//!   over nondecreasing breakpoints, computed as a longest chain (strictly
//!   increasing in `x`, nondecreasing in level) via a Fenwick prefix-max;
//! * Hammersley: longest strictly-increasing chain among planar Poisson
//!   points in a half-open rectangle, via patience sorting in O(n log n);
//! * Brownian LPP on a δ-grid by per-level prefix-max sweeps.
//!
//! The [`oracle`] submodule holds deliberately naive reference
//! implementations (exhaustive path enumeration) used by the test suites;
//! they share no code with the production kernels.

use crate::error::Error;
use crate::processes::{PlanarPointSet, PointSet};
use crate::rng::RngStream;
use crate::Result;
use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

/// Endpoints of a passage-time query, `from = (x, s)` to `to = (y, t)` in
/// model coordinates (space first, level/time second).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassageQuery {
    pub from: (f64, f64),
    pub to: (f64, f64),
}

impl PassageQuery {
    pub fn new(from: (f64, f64), to: (f64, f64)) -> Self {
        PassageQuery { from, to }
    }
}

// ---------------------------------------------------------------------------
// lattice LPP
// ---------------------------------------------------------------------------

/// Vertex-weight law of a lattice environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightLaw {
    /// Exp(mean 1).
    ExpUnit,
    /// Geometric on {0, 1, ...} with the given mean γ
    /// (`P(k) = (1−v)^k v`, `v = 1/(1+γ)`).
    Geom { mean: f64 },
}

/// Rectangle of i.i.d. vertex weights, columns `0..cols`, rows `0..rows`.
#[derive(Debug, Clone)]
pub struct LatticeEnvironment {
    pub weights: Vec<f64>,
    pub cols: usize,
    pub rows: usize,
    pub law: WeightLaw,
}

impl LatticeEnvironment {
    pub fn sample(cols: usize, rows: usize, law: WeightLaw, stream: RngStream) -> Result<Self> {
        let mut rng = stream.rng();
        let n = cols * rows;
        let weights = match law {
            WeightLaw::ExpUnit => (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect(),
            WeightLaw::Geom { mean } => {
                if !(mean > 0.0) {
                    return Err(Error::parameter("geometric mean must be > 0"));
                }
                let v = 1.0 / (1.0 + mean);
                (0..n).map(|_| sample_geom(&mut rng, v) as f64).collect()
            }
        };
        Ok(LatticeEnvironment { weights, cols, rows, law })
    }

    pub fn from_weights(weights: Vec<f64>, cols: usize, rows: usize, law: WeightLaw) -> Self {
        assert_eq!(weights.len(), cols * rows);
        LatticeEnvironment { weights, cols, rows, law }
    }

    #[inline]
    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.weights[j * self.cols + i]
    }
}

/// Geometric sample on {0,1,...} with success probability `v`.
pub fn sample_geom(rng: &mut rand_chacha::ChaCha8Rng, v: f64) -> u64 {
    // inverse CDF: k = floor(ln U / ln(1−v))
    let u = 1.0 - rng.gen::<f64>();
    (u.ln() / (1.0 - v).ln()).floor() as u64
}

/// Max over up-right paths from `(k, l)` to `(m, n)` of the sum of vertex
/// weights, both endpoints included.
pub fn lattice_lpp(env: &LatticeEnvironment, from: (usize, usize), to: (usize, usize)) -> Result<f64> {
    let ((k, l), (m, n)) = (from, to);
    if m >= env.cols || n >= env.rows || k > m || l > n {
        return Err(Error::domain(format!(
            "lattice query ({k},{l})→({m},{n}) outside {}×{} grid",
            env.cols, env.rows
        )));
    }
    let w = m - k + 1;
    let mut row = vec![f64::NEG_INFINITY; w];
    for j in l..=n {
        for i in 0..w {
            let best = if j == l && i == 0 {
                0.0
            } else {
                let left = if i > 0 { row[i - 1] } else { f64::NEG_INFINITY };
                let below = if j > l { row[i] } else { f64::NEG_INFINITY };
                left.max(below)
            };
            row[i] = best + env.w(k + i, j);
        }
    }
    Ok(row[w - 1])
}

/// As [`lattice_lpp`], also returning the rightmost geodesic (ties broken so
/// that up-steps happen as far right as possible).
pub fn lattice_lpp_geodesic(
    env: &LatticeEnvironment,
    from: (usize, usize),
    to: (usize, usize),
) -> Result<(f64, Vec<(usize, usize)>)> {
    let ((k, l), (m, n)) = (from, to);
    if m >= env.cols || n >= env.rows || k > m || l > n {
        return Err(Error::domain("lattice query outside grid"));
    }
    let w = m - k + 1;
    let h = n - l + 1;
    let mut dp = vec![f64::NEG_INFINITY; w * h];
    for j in 0..h {
        for i in 0..w {
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let left = if i > 0 { dp[j * w + i - 1] } else { f64::NEG_INFINITY };
                let below = if j > 0 { dp[(j - 1) * w + i] } else { f64::NEG_INFINITY };
                left.max(below)
            };
            dp[j * w + i] = best + env.w(k + i, l + j);
        }
    }
    // Backtrack; on ties prefer the predecessor below, which pushes the
    // up-step (and hence the whole path) as far right as possible.
    let mut path = vec![(m, n)];
    let (mut i, mut j) = (w - 1, h - 1);
    while i > 0 || j > 0 {
        let below = if j > 0 { dp[(j - 1) * w + i] } else { f64::NEG_INFINITY };
        let left = if i > 0 { dp[j * w + i - 1] } else { f64::NEG_INFINITY };
        if below >= left {
            j -= 1;
        } else {
            i -= 1;
        }
        path.push((k + i, l + j));
    }
    path.reverse();
    Ok((dp[w * h - 1], path))
}

// ---------------------------------------------------------------------------
// SJ edge-LPP
// ---------------------------------------------------------------------------

/// Bernoulli horizontal-edge weights: `edge(i, j)` is the weight of the edge
/// from column `i−1` to column `i` at row `j` (`i = 1..=cols`, `j = 0..rows`).
/// Vertical edges implicitly weigh 0.
#[derive(Debug, Clone)]
pub struct SJEnvironment {
    pub edges: Vec<u8>,
    /// Number of horizontal edges per row (columns run `0..=cols`).
    pub cols: usize,
    pub rows: usize,
    pub p: f64,
}

impl SJEnvironment {
    pub fn sample(cols: usize, rows: usize, p: f64, stream: RngStream) -> Result<Self> {
        if !(0.0 < p && p < 1.0) {
            return Err(Error::parameter("SJ requires 0 < p < 1"));
        }
        let mut rng = stream.rng();
        let edges = (0..cols * rows).map(|_| (rng.gen::<f64>() < p) as u8).collect();
        Ok(SJEnvironment { edges, cols, rows, p })
    }

    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> i64 {
        debug_assert!(i >= 1);
        self.edges[j * self.cols + i - 1] as i64
    }
}

/// Maximal number of weight-1 horizontal edges collected by an up-right path
/// from `(k, l)` to `(m, n)`.
pub fn sj_lpp(env: &SJEnvironment, from: (usize, usize), to: (usize, usize)) -> Result<i64> {
    let ((k, l), (m, n)) = (from, to);
    if m > env.cols || n >= env.rows || k > m || l > n {
        return Err(Error::domain(format!(
            "SJ query ({k},{l})→({m},{n}) outside {}×{} grid",
            env.cols, env.rows
        )));
    }
    let w = m - k + 1;
    let mut row = vec![0i64; w];
    for j in l..=n {
        for i in 1..w {
            let via_left = row[i - 1] + env.edge(k + i, j);
            // row[i] currently holds the value from the row below
            row[i] = row[i].max(via_left);
        }
    }
    Ok(row[w - 1])
}

// ---------------------------------------------------------------------------
// Poisson lines
// ---------------------------------------------------------------------------

/// One independent rate-1 Poisson process per integer level.
#[derive(Debug, Clone)]
pub struct LineField {
    pub levels: Vec<PointSet>,
}

impl LineField {
    pub fn sample(levels: usize, window: (f64, f64), stream: RngStream) -> Result<Self> {
        let mut rng = stream.rng();
        let levels = (0..levels)
            .map(|_| {
                let pts = crate::processes::poisson_sorted(&mut rng, 1.0, window);
                PointSet { points: pts, window }
            })
            .collect();
        Ok(LineField { levels })
    }
}

/// Fenwick (binary indexed) tree for prefix maxima over `0..n`.
pub(crate) struct FenwickMax {
    tree: Vec<i64>,
}

impl FenwickMax {
    pub fn new(n: usize) -> Self {
        FenwickMax { tree: vec![i64::MIN; n + 1] }
    }

    /// Raise position `i` to at least `v`.
    pub fn update(&mut self, mut i: usize, v: i64) {
        i += 1;
        while i < self.tree.len() {
            if self.tree[i] < v {
                self.tree[i] = v;
            }
            i += i & i.wrapping_neg();
        }
    }

    /// Max over positions `0..=i`.
    pub fn prefix_max(&self, mut i: usize) -> i64 {
        i += 1;
        let mut m = i64::MIN;
        while i > 0 {
            m = m.max(self.tree[i]);
            i -= i & i.wrapping_neg();
        }
        m
    }
}

/// `U(x, m; y, n)`: sup over nondecreasing breakpoints
/// `x = x_{m−1} ≤ x_m ≤ ... ≤ x_n = y` of `Σ_{i=m}^{n} F_i(x_{i−1}, x_i]`.
///
/// Equivalently (because the increments are counting measures) the longest
/// sequence of points that is strictly increasing in `x` and nondecreasing
/// in level — computed here with a Fenwick prefix-max over levels.
pub fn lines_lpp(env: &LineField, x: f64, m: usize, y: f64, n: usize) -> Result<i64> {
    if n >= env.levels.len() || m > n || y < x {
        return Err(Error::domain(format!(
            "lines query ({x},{m})→({y},{n}) outside field with {} levels",
            env.levels.len()
        )));
    }
    // gather (x, level) in the window, sorted by x (levels individually
    // sorted; k-way concatenation then sort — desk-scale sizes here)
    let mut pts: Vec<(f64, usize)> = Vec::new();
    for (lvl, ps) in env.levels.iter().enumerate().take(n + 1).skip(m) {
        for &px in &ps.points {
            if px > x && px <= y {
                pts.push((px, lvl - m));
            }
        }
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut fen = FenwickMax::new(n - m + 1);
    let mut best = 0i64;
    for &(_, lvl) in &pts {
        let prev = fen.prefix_max(lvl).max(0);
        let score = prev + 1;
        fen.update(lvl, score);
        best = best.max(score);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Hammersley
// ---------------------------------------------------------------------------

/// Longest strictly-increasing chain among the points of `env` inside the
/// half-open rectangle `(x, y] × (s, t]` (the point at the lower-left corner,
/// if any, is excluded). Patience sorting, O(n log n).
pub fn hammersley_lpp(env: &PlanarPointSet, q: PassageQuery) -> Result<i64> {
    let (x, s) = q.from;
    let (y, t) = q.to;
    if y < x || t < s {
        return Err(Error::domain("Hammersley query must be ordered"));
    }
    let mut pts: Vec<(f64, f64)> = env
        .points
        .iter()
        .copied()
        .filter(|&(px, pt)| px > x && px <= y && pt > s && pt <= t)
        .collect();
    // x ascending, ties by t descending so equal-x points can never chain
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.partial_cmp(&a.1).unwrap()));
    let mut tails: Vec<f64> = Vec::new(); // tails[k] = min final t of a chain of length k+1
    for (_, pt) in pts {
        // strictly increasing t: replace the first tail ≥ pt
        let pos = tails.partition_point(|&v| v < pt);
        if pos == tails.len() {
            tails.push(pt);
        } else {
            tails[pos] = pt;
        }
    }
    Ok(tails.len() as i64)
}

// ---------------------------------------------------------------------------
// Brownian LPP (δ-grid discretization)
// ---------------------------------------------------------------------------

/// Independent discretized Brownian levels: level `i` stores values of
/// `B_i` on the grid `x0 + k·δ`, `k = 0..len`, with `B_i(x0) = 0`.
#[derive(Debug, Clone)]
pub struct BrownianField {
    /// `levels[i][k] = B_i(x0 + k δ)`.
    pub levels: Vec<Vec<f64>>,
    pub x0: f64,
    pub delta: f64,
}

impl BrownianField {
    pub fn sample(levels: usize, x0: f64, x1: f64, delta: f64, stream: RngStream) -> Result<Self> {
        if !(delta > 0.0) || x1 < x0 {
            return Err(Error::parameter("BLPP needs delta > 0 and x1 ≥ x0"));
        }
        let len = ((x1 - x0) / delta).ceil() as usize;
        let mut rng = stream.rng();
        let normal = rand_distr::Normal::new(0.0, delta.sqrt()).unwrap();
        let levels = (0..levels)
            .map(|_| {
                let mut b = Vec::with_capacity(len + 1);
                let mut v = 0.0;
                b.push(v);
                for _ in 0..len {
                    v += normal.sample(&mut rng);
                    b.push(v);
                }
                b
            })
            .collect();
        Ok(BrownianField { levels, x0, delta })
    }

    /// Nearest grid index for `x`; `true` if `x` was already on the grid
    /// (within 1e-9·δ).
    pub fn snap(&self, x: f64) -> (usize, bool) {
        let k = ((x - self.x0) / self.delta).round();
        let k = k.clamp(0.0, (self.levels[0].len() - 1) as f64) as usize;
        let exact = (self.x0 + k as f64 * self.delta - x).abs() <= 1e-9 * self.delta;
        (k, exact)
    }
}

/// Outcome of a Brownian passage computation.
#[derive(Debug, Clone, Copy)]
pub struct BlppValue {
    pub value: f64,
    /// Endpoints were off-grid and snapped.
    pub snapped: bool,
}

/// `L(x, m; y, n) = sup Σ_i [B_i(x_i) − B_i(x_{i−1})]` over grid-valued
/// nondecreasing breakpoints `x = x_{m−1} ≤ ... ≤ x_n = y`.
pub fn blpp(env: &BrownianField, x: f64, m: usize, y: f64, n: usize) -> Result<BlppValue> {
    if n >= env.levels.len() || m > n || y < x {
        return Err(Error::domain("BLPP query outside field"));
    }
    let (kx, ex) = env.snap(x);
    let (ky, ey) = env.snap(y);
    let snapped = !(ex && ey);
    // V_i(g) = best value ending at grid point g on level i
    let first = &env.levels[m];
    let mut v: Vec<f64> = (kx..=ky).map(|g| first[g] - first[kx]).collect();
    for lvl in &env.levels[m + 1..=n] {
        let mut run = f64::NEG_INFINITY;
        for (idx, g) in (kx..=ky).enumerate() {
            run = run.max(v[idx] - lvl[g]);
            v[idx] = run + lvl[g];
        }
    }
    Ok(BlppValue { value: v[ky - kx], snapped })
}

// ---------------------------------------------------------------------------
// reference oracles (exhaustive enumeration; test/verification use only)
// ---------------------------------------------------------------------------

pub mod oracle {
    //! Naive reference implementations by exhaustive enumeration. These are
    //! intentionally slow and share no logic with the production kernels;
    //! the oracle suite asserts exact agreement on small instances.

    use super::*;

    /// All up-right vertex paths, recursively.
    pub fn lattice(env: &LatticeEnvironment, from: (usize, usize), to: (usize, usize)) -> f64 {
        fn rec(env: &LatticeEnvironment, cur: (usize, usize), to: (usize, usize)) -> f64 {
            let w = env.w(cur.0, cur.1);
            if cur == to {
                return w;
            }
            let mut best = f64::NEG_INFINITY;
            if cur.0 < to.0 {
                best = best.max(rec(env, (cur.0 + 1, cur.1), to));
            }
            if cur.1 < to.1 {
                best = best.max(rec(env, (cur.0, cur.1 + 1), to));
            }
            w + best
        }
        rec(env, from, to)
    }

    /// All up-right edge paths for the SJ model.
    pub fn sj(env: &SJEnvironment, from: (usize, usize), to: (usize, usize)) -> i64 {
        fn rec(env: &SJEnvironment, cur: (usize, usize), to: (usize, usize)) -> i64 {
            if cur == to {
                return 0;
            }
            let mut best = i64::MIN;
            if cur.0 < to.0 {
                best = best.max(env.edge(cur.0 + 1, cur.1) + rec(env, (cur.0 + 1, cur.1), to));
            }
            if cur.1 < to.1 {
                best = best.max(rec(env, (cur.0, cur.1 + 1), to));
            }
            best
        }
        rec(env, from, to)
    }

    /// All breakpoint tuples located at point positions (or the endpoints).
    pub fn lines(env: &LineField, x: f64, m: usize, y: f64, n: usize) -> i64 {
        // candidate breakpoints: x, y, and every point location in (x, y]
        let mut cands = vec![x, y];
        for ps in &env.levels[m..=n] {
            cands.extend(ps.points.iter().copied().filter(|&p| p > x && p <= y));
        }
        cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cands.dedup();
        fn rec(env: &LineField, cands: &[f64], prev: f64, lvl: usize, n: usize, y: f64) -> i64 {
            if lvl == n {
                return env.levels[lvl].count_in(prev, y) as i64;
            }
            let mut best = i64::MIN;
            for &c in cands.iter().filter(|&&c| c >= prev && c <= y) {
                best = best
                    .max(env.levels[lvl].count_in(prev, c) as i64 + rec(env, cands, c, lvl + 1, n, y));
            }
            best
        }
        rec(env, &cands, x, m, n, y)
    }

    /// Longest strictly-increasing chain by recursion over subsets.
    pub fn hammersley(points: &[(f64, f64)], q: PassageQuery) -> i64 {
        let (x, s) = q.from;
        let (y, t) = q.to;
        let inside: Vec<(f64, f64)> = points
            .iter()
            .copied()
            .filter(|&(px, pt)| px > x && px <= y && pt > s && pt <= t)
            .collect();
        fn chain_from(points: &[(f64, f64)], cur: Option<(f64, f64)>) -> i64 {
            let mut best = 0;
            for &(px, pt) in points {
                let ok = match cur {
                    None => true,
                    Some((cx, ct)) => px > cx && pt > ct,
                };
                if ok {
                    best = best.max(1 + chain_from(points, Some((px, pt))));
                }
            }
            best
        }
        chain_from(&inside, None)
    }

    /// Two-level BLPP: brute force over the single breakpoint.
    pub fn blpp_two_levels(env: &BrownianField, kx: usize, ky: usize) -> f64 {
        let (b0, b1) = (&env.levels[0], &env.levels[1]);
        let mut best = f64::NEG_INFINITY;
        for k in kx..=ky {
            best = best.max(b0[k] - b0[kx] + b1[ky] - b1[k]);
        }
        best
    }
}
