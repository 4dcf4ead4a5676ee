//! Stationary boundary data, the boundary variational height functional,
//! rightmost exit points, queue-map line evolution, and the Hammersley
//! interacting fluid process.
//!
//! Every model shares the same shape of height functional
//!
//! ```text
//! h(y) = sup_{ −W ≤ x ≤ y } { f(x) + d(x, 0; y, t) }
//! ```
//!
//! with model-specific boundary laws `f` and passage kernels `d`. All
//! implementations propagate the *rightmost* argmax (the exit point `Z`)
//! alongside the value, and flag a query as boundary-active when the argmax
//! sits at the truncation edge `−W` — the caller must widen the window
//! rather than trust a possibly biased value.
//!
//! Exit points are reported at the discrete candidate set where the
//! objective actually jumps: lattice/grid coordinates for the discrete
//! models, and boundary point locations (or `−W`) for the continuum ones.

use crate::error::Error;
use crate::lpp::{BrownianField, FenwickMax, LatticeEnvironment, LineField, SJEnvironment};
use crate::processes::{PlanarPointSet, PointSet};
use crate::queues::{queue_cont, queue_disc, ContQueue, DiscQueue};
use crate::rng::RngStream;
use crate::Result;
use rand::Rng;
use rand_distr::Distribution;

// ---------------------------------------------------------------------------
// boundary data
// ---------------------------------------------------------------------------

/// Boundary path on integer sites `lo ..= lo + incr.len()`, stored both as
/// increments and as cumulative values normalized to `f(0) = 0`
/// (requires `lo ≤ 0 ≤ hi`).
#[derive(Debug, Clone)]
pub struct DiscreteBoundary {
    pub lo: i64,
    /// `incr[j]` = `f(lo+j+1) − f(lo+j)`.
    pub incr: Vec<f64>,
    /// `values[j]` = `f(lo + j)`; `values[−lo] = 0`.
    pub values: Vec<f64>,
}

impl DiscreteBoundary {
    pub fn from_incr(lo: i64, incr: Vec<f64>) -> Result<Self> {
        let hi = lo + incr.len() as i64;
        if lo > 0 || hi < 0 {
            return Err(Error::parameter("boundary window must contain 0"));
        }
        let mut values = Vec::with_capacity(incr.len() + 1);
        let mut v = 0.0;
        values.push(0.0);
        for &x in &incr {
            v += x;
            values.push(v);
        }
        let off = values[(-lo) as usize];
        for v in &mut values {
            *v -= off;
        }
        Ok(DiscreteBoundary { lo, incr, values })
    }

    /// i.i.d. Ber(z) increments (the SJ stationary boundary, `z = e^a/(1+e^a)`).
    pub fn sample_bernoulli(z: f64, lo: i64, hi: i64, stream: RngStream) -> Result<Self> {
        if !(0.0 < z && z < 1.0) {
            return Err(Error::parameter("Bernoulli boundary needs 0 < z < 1"));
        }
        let mut rng = stream.rng();
        let incr = (0..(hi - lo)).map(|_| (rng.gen::<f64>() < z) as u8 as f64).collect();
        Self::from_incr(lo, incr)
    }

    /// i.i.d. Exp increments with mean `beta`.
    pub fn sample_exp(beta: f64, lo: i64, hi: i64, stream: RngStream) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::parameter("exponential boundary needs beta > 0"));
        }
        let mut rng = stream.rng();
        let incr = (0..(hi - lo)).map(|_| -beta * (1.0 - rng.gen::<f64>()).ln()).collect();
        Self::from_incr(lo, incr)
    }

    /// i.i.d. geometric increments on {0,1,...} with mean `beta`.
    pub fn sample_geom(beta: f64, lo: i64, hi: i64, stream: RngStream) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::parameter("geometric boundary needs beta > 0"));
        }
        let v = 1.0 / (1.0 + beta);
        let mut rng = stream.rng();
        let incr = (0..(hi - lo)).map(|_| crate::lpp::sample_geom(&mut rng, v) as f64).collect();
        Self::from_incr(lo, incr)
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.incr.len() as i64
    }

    /// `f(k)`.
    pub fn f_at(&self, k: i64) -> f64 {
        self.values[(k - self.lo) as usize]
    }
}

/// Discretized drift-`beta`, unit-diffusivity Gaussian boundary path on the
/// grid `x0 + kδ`, normalized so the value at the grid point nearest 0 is 0.
#[derive(Debug, Clone)]
pub struct BlppBoundary {
    pub x0: f64,
    pub delta: f64,
    pub values: Vec<f64>,
}

impl BlppBoundary {
    pub fn sample(beta: f64, x0: f64, x1: f64, delta: f64, stream: RngStream) -> Result<Self> {
        if !(delta > 0.0) || x1 <= x0 || x0 > 0.0 || x1 < 0.0 {
            return Err(Error::parameter("BLPP boundary needs delta > 0 and x0 ≤ 0 ≤ x1"));
        }
        let len = ((x1 - x0) / delta).ceil() as usize;
        let mut rng = stream.rng();
        let normal = rand_distr::Normal::new(beta * delta, delta.sqrt()).unwrap();
        let mut values = Vec::with_capacity(len + 1);
        let mut v = 0.0;
        values.push(0.0);
        for _ in 0..len {
            v += normal.sample(&mut rng);
            values.push(v);
        }
        let k0 = ((-x0) / delta).round() as usize;
        let off = values[k0.min(len)];
        for v in &mut values {
            *v -= off;
        }
        Ok(BlppBoundary { x0, delta, values })
    }
}

// ---------------------------------------------------------------------------
// height profiles
// ---------------------------------------------------------------------------

/// Heights, rightmost exit points, and truncation flags over a query grid.
#[derive(Debug, Clone)]
pub struct HeightProfile {
    pub y: Vec<f64>,
    pub h: Vec<f64>,
    pub z: Vec<f64>,
    pub boundary_active: Vec<bool>,
}

impl HeightProfile {
    pub fn to_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["y", "h", "Z", "boundary_active"])?;
        for i in 0..self.y.len() {
            wtr.write_record(&[
                self.y[i].to_string(),
                self.h[i].to_string(),
                self.z[i].to_string(),
                (self.boundary_active[i] as u8).to_string(),
            ])?;
        }
        wtr.flush().map_err(crate::error::Error::Io)?;
        Ok(())
    }
}

/// DP cell carrying a value and the rightmost boundary origin achieving it.
#[derive(Clone, Copy)]
struct Cell {
    v: f64,
    o: u32,
}

#[inline]
fn cmax(a: Cell, b: Cell) -> Cell {
    if b.v > a.v || (b.v == a.v && b.o > a.o) {
        b
    } else {
        a
    }
}

// ---------------------------------------------------------------------------
// lattice / SJ heights
// ---------------------------------------------------------------------------

/// Lattice height profile. `env` column `i` carries boundary coordinate
/// `f.lo + i` (so `env.cols == f.values.len()`); all `env.rows` rows are
/// bulk. `h(m) = max_{f.lo ≤ k ≤ m} { f(k) + d(k,0; m,n) }` with the entry
/// weight at `(k, 0)` included in `d`.
pub fn height_lattice(
    env: &LatticeEnvironment,
    f: &DiscreteBoundary,
    ys: &[i64],
) -> Result<HeightProfile> {
    if env.cols != f.values.len() {
        return Err(Error::domain("lattice environment does not cover the boundary window"));
    }
    let cols = env.cols;
    let mut row: Vec<Cell> = Vec::with_capacity(cols);
    // row 0: a path entering at (k, 0) collects every row-0 weight from
    // column k onward, so the running value (not the bare boundary max)
    // competes with each fresh entry point
    let mut prev = Cell { v: f64::NEG_INFINITY, o: 0 };
    for i in 0..cols {
        let best = cmax(prev, Cell { v: f.values[i], o: i as u32 });
        prev = Cell { v: best.v + env.w(i, 0), o: best.o };
        row.push(prev);
    }
    for j in 1..env.rows {
        let mut left = Cell { v: f64::NEG_INFINITY, o: 0 };
        for (i, cell) in row.iter_mut().enumerate() {
            let best = cmax(left, *cell);
            *cell = Cell { v: best.v + env.w(i, j), o: best.o };
            left = *cell;
        }
    }
    profile_from_cells(&row, f.lo, ys)
}

/// SJ height profile. `env` horizontal edge `i` (for `i = 1..=env.cols`)
/// joins boundary coordinates `f.lo + i − 1` and `f.lo + i`
/// (so `env.cols == f.incr.len()`).
pub fn height_sj(env: &SJEnvironment, f: &DiscreteBoundary, ys: &[i64]) -> Result<HeightProfile> {
    if env.cols != f.incr.len() {
        return Err(Error::domain("SJ environment does not cover the boundary window"));
    }
    let nodes = env.cols + 1;
    let mut row: Vec<Cell> =
        (0..nodes).map(|i| Cell { v: f.values[i], o: i as u32 }).collect();
    for j in 0..env.rows {
        for i in 1..nodes {
            let via_left = Cell { v: row[i - 1].v + env.edge(i, j) as f64, o: row[i - 1].o };
            row[i] = cmax(row[i], via_left);
        }
    }
    profile_from_cells(&row, f.lo, ys)
}

fn profile_from_cells(row: &[Cell], lo: i64, ys: &[i64]) -> Result<HeightProfile> {
    let mut out = HeightProfile {
        y: Vec::with_capacity(ys.len()),
        h: Vec::with_capacity(ys.len()),
        z: Vec::with_capacity(ys.len()),
        boundary_active: Vec::with_capacity(ys.len()),
    };
    for &m in ys {
        let idx = m - lo;
        if idx < 0 || idx as usize >= row.len() {
            return Err(Error::domain(format!("query {m} outside boundary window")));
        }
        let c = row[idx as usize];
        out.y.push(m as f64);
        out.h.push(c.v);
        out.z.push((lo + c.o as i64) as f64);
        out.boundary_active.push(c.o == 0);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Brownian heights
// ---------------------------------------------------------------------------

/// BLPP height profile over all levels of `env`. The boundary grid must
/// coincide with the environment grid.
pub fn height_blpp(env: &BrownianField, f: &BlppBoundary, ys: &[f64]) -> Result<HeightProfile> {
    if (env.x0 - f.x0).abs() > 1e-9 * f.delta
        || (env.delta - f.delta).abs() > 1e-12
        || env.levels[0].len() != f.values.len()
    {
        return Err(Error::domain("BLPP environment grid does not match the boundary grid"));
    }
    let len = f.values.len();
    let b0 = &env.levels[0];
    let mut v: Vec<Cell> = Vec::with_capacity(len);
    let mut run = Cell { v: f64::NEG_INFINITY, o: 0 };
    for g in 0..len {
        run = cmax(run, Cell { v: f.values[g] - b0[g], o: g as u32 });
        v.push(Cell { v: run.v + b0[g], o: run.o });
    }
    for lvl in &env.levels[1..] {
        let mut run = Cell { v: f64::NEG_INFINITY, o: 0 };
        for (g, cell) in v.iter_mut().enumerate() {
            run = cmax(run, Cell { v: cell.v - lvl[g], o: cell.o });
            *cell = Cell { v: run.v + lvl[g], o: run.o };
        }
    }
    let mut out = HeightProfile {
        y: Vec::with_capacity(ys.len()),
        h: Vec::with_capacity(ys.len()),
        z: Vec::with_capacity(ys.len()),
        boundary_active: Vec::with_capacity(ys.len()),
    };
    for &y in ys {
        let g = ((y - f.x0) / f.delta).round();
        if g < 0.0 || g >= len as f64 {
            return Err(Error::domain(format!("query {y} outside boundary window")));
        }
        let c = v[g as usize];
        out.y.push(y);
        out.h.push(c.v);
        out.z.push(f.x0 + c.o as f64 * f.delta);
        out.boundary_active.push(c.o == 0);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hammersley heights (backward patience scan)
// ---------------------------------------------------------------------------

/// Hammersley height profile: `h(y) = max over boundary candidates
/// x ∈ {−W} ∪ (points of ν in (−W, y]) of ν(x) + (longest strict chain of
/// environment points in (x, y] × (0, t])`.
///
/// Per query, one right-to-left patience scan over the environment computes
/// the best chain length starting strictly right of every candidate.
pub fn height_hammersley(
    env: &PlanarPointSet,
    nu: &PointSet,
    t: f64,
    ys: &[f64],
) -> Result<HeightProfile> {
    let lo = nu.window.0;
    let mut out = HeightProfile {
        y: Vec::with_capacity(ys.len()),
        h: Vec::with_capacity(ys.len()),
        z: Vec::with_capacity(ys.len()),
        boundary_active: Vec::with_capacity(ys.len()),
    };
    // ν(b_i) for the i-th boundary point = (i+1) − #points ≤ 0
    let n_neg = nu.points.partition_point(|&p| p <= 0.0) as i64;
    for &y in ys {
        if y < lo {
            return Err(Error::domain(format!("query {y} left of truncation {lo}")));
        }
        let env_hi = env.points.partition_point(|&(px, _)| px <= y);
        let bd_hi = nu.points.partition_point(|&p| p <= y);
        // starts[k] = max start-t among chains of length ≥ k+1 to the right
        let mut starts: Vec<f64> = Vec::new();
        let mut e = env_hi;
        let mut cands: Vec<(f64, f64)> = Vec::with_capacity(bd_hi + 1); // (x, value)
        for bi in (0..bd_hi).rev() {
            let b = nu.points[bi];
            while e > 0 && env.points[e - 1].0 > b {
                e -= 1;
                let (px, pt) = env.points[e];
                if px > lo && pt > 0.0 && pt <= t {
                    feed_backward(&mut starts, pt);
                }
            }
            let val = (bi as i64 + 1 - n_neg) as f64 + starts.len() as f64;
            cands.push((b, val));
        }
        while e > 0 && env.points[e - 1].0 > lo {
            e -= 1;
            let (_, pt) = env.points[e];
            if pt > 0.0 && pt <= t {
                feed_backward(&mut starts, pt);
            }
        }
        cands.push((lo, (-n_neg + starts.len() as i64) as f64));
        // cands are ordered right to left; pick max value, rightmost on ties
        let mut best = f64::NEG_INFINITY;
        let mut z = lo;
        for &(x, v) in &cands {
            if v > best {
                best = v;
                z = x;
            }
        }
        out.y.push(y);
        out.h.push(best);
        out.z.push(z);
        out.boundary_active.push(z == lo);
    }
    Ok(out)
}

/// One step of the backward patience scan: register a chain start at `t`.
#[inline]
fn feed_backward(starts: &mut Vec<f64>, t: f64) {
    let pos = starts.partition_point(|&v| v > t);
    if pos == starts.len() {
        starts.push(t);
    } else if starts[pos] < t {
        starts[pos] = t;
    }
}

// ---------------------------------------------------------------------------
// lines heights (backward Fenwick scan)
// ---------------------------------------------------------------------------

/// Level field flattened to a single x-sorted stream (level stored per
/// point) — the memory- and generation-friendly layout for large windows.
#[derive(Debug, Clone)]
pub struct MergedLines {
    /// x-coordinates, ascending.
    pub xs: Vec<f64>,
    /// level of each point.
    pub lvls: Vec<u32>,
    pub n_levels: usize,
    pub window: (f64, f64),
}

impl MergedLines {
    /// Sample `n_levels` independent rate-1 Poisson lines as one merged
    /// stream: x-marginal of rate `n_levels`, i.i.d. uniform levels.
    pub fn sample(n_levels: usize, window: (f64, f64), stream: RngStream) -> Result<Self> {
        if n_levels == 0 {
            return Err(Error::parameter("need at least one level"));
        }
        let mut rng = stream.rng();
        let xs = crate::processes::poisson_sorted(&mut rng, n_levels as f64, window);
        let lvls = xs.iter().map(|_| rng.gen_range(0..n_levels as u32)).collect();
        Ok(MergedLines { xs, lvls, n_levels, window })
    }

    pub fn from_field(field: &LineField) -> Self {
        let mut pairs: Vec<(f64, u32)> = field
            .levels
            .iter()
            .enumerate()
            .flat_map(|(l, ps)| ps.points.iter().map(move |&x| (x, l as u32)))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let window = field.levels.first().map(|p| p.window).unwrap_or((0.0, 0.0));
        MergedLines {
            xs: pairs.iter().map(|p| p.0).collect(),
            lvls: pairs.iter().map(|p| p.1).collect(),
            n_levels: field.levels.len(),
            window,
        }
    }
}

/// Lines height profile over all `env.n_levels` levels, same candidate
/// logic as [`height_hammersley`] with the patience scan replaced by a
/// Fenwick suffix-max over levels (chains are strictly increasing in `x`,
/// nondecreasing in level).
pub fn height_lines(env: &MergedLines, nu: &PointSet, ys: &[f64]) -> Result<HeightProfile> {
    let lo = nu.window.0;
    let n = env.n_levels;
    let mut out = HeightProfile {
        y: Vec::with_capacity(ys.len()),
        h: Vec::with_capacity(ys.len()),
        z: Vec::with_capacity(ys.len()),
        boundary_active: Vec::with_capacity(ys.len()),
    };
    let n_neg = nu.points.partition_point(|&p| p <= 0.0) as i64;
    for &y in ys {
        if y < lo {
            return Err(Error::domain(format!("query {y} left of truncation {lo}")));
        }
        let env_hi = env.xs.partition_point(|&px| px <= y);
        let bd_hi = nu.points.partition_point(|&p| p <= y);
        // level l stored at index n−1−l, so prefix-max = suffix over levels
        let mut fen = FenwickMax::new(n);
        let mut best_chain = 0i64;
        let mut e = env_hi;
        let feed = |fen: &mut FenwickMax, best: &mut i64, lvl: u32| {
            let idx = n - 1 - lvl as usize;
            let score = 1 + fen.prefix_max(idx).max(0);
            fen.update(idx, score);
            *best = (*best).max(score);
        };
        let mut cands: Vec<(f64, f64)> = Vec::with_capacity(bd_hi + 1);
        for bi in (0..bd_hi).rev() {
            let b = nu.points[bi];
            while e > 0 && env.xs[e - 1] > b {
                e -= 1;
                if env.xs[e] > lo {
                    feed(&mut fen, &mut best_chain, env.lvls[e]);
                }
            }
            cands.push((b, (bi as i64 + 1 - n_neg + best_chain) as f64));
        }
        while e > 0 && env.xs[e - 1] > lo {
            e -= 1;
            feed(&mut fen, &mut best_chain, env.lvls[e]);
        }
        cands.push((lo, (-n_neg + best_chain) as f64));
        let mut best = f64::NEG_INFINITY;
        let mut z = lo;
        for &(x, v) in &cands {
            if v > best {
                best = v;
                z = x;
            }
        }
        out.y.push(y);
        out.h.push(best);
        out.z.push(z);
        out.boundary_active.push(z == lo);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// queue-map evolution
// ---------------------------------------------------------------------------

/// One line-to-line evolution step for the Poisson lines model.
#[derive(Debug, Clone)]
pub struct LinesStep {
    /// Evolved boundary: the recycled-service process `R(F, f)`.
    pub boundary: PointSet,
    /// The queue, exposing the per-site height gain `Q` and truncation flags.
    pub queue: ContQueue,
}

/// Evolve a lines boundary through one environment level: arrivals are the
/// level's rate-1 points, services are the boundary's rate-`e^a` points
/// (`a > 0` keeps the queue stable), and the new boundary is the
/// recycled-service process.
pub fn evolve_lines(boundary: &PointSet, level: &PointSet) -> LinesStep {
    let lo = boundary.window.0;
    let queue = queue_cont(&level.points, &boundary.points, lo);
    let new = PointSet::new(queue.recycled.clone(), boundary.window);
    LinesStep { boundary: new, queue }
}

/// Lines height by iterating the queue maps over all levels:
/// `h(y) = f(y) + Σ_k Q_k(y)`. Returns the heights and whether any queried
/// queue supremum was truncation-active.
pub fn lines_height_iterated(
    f: &PointSet,
    env: &LineField,
    ys: &[f64],
) -> Result<(Vec<f64>, bool)> {
    let mut boundary = f.clone();
    let mut gains = vec![0i64; ys.len()];
    let mut active = false;
    for level in &env.levels {
        let step = evolve_lines(&boundary, level);
        for (g, &y) in gains.iter_mut().zip(ys) {
            *g += step.queue.q_at(y);
            active |= step.queue.boundary_active_at(y);
        }
        boundary = step.boundary;
    }
    let hs = ys.iter().zip(&gains).map(|(&y, &g)| (f.nu_unchecked(y) + g) as f64).collect();
    Ok((hs, active))
}

/// One evolution step for the SJ model.
#[derive(Debug, Clone)]
pub struct SjStep {
    /// Evolved boundary increments (the recycled services), 0/1 per slot.
    pub sites: Vec<i64>,
    /// The queue, exposing the `J` record `q` and truncation flags.
    pub queue: DiscQueue,
}

/// Evolve an SJ boundary through one edge row: arrivals are the row's
/// Ber(p) edges, services are the boundary's Ber(z) increments (`z > p`).
pub fn evolve_sj(sites: &[i64], row: &[i64], lo: i64) -> SjStep {
    let queue = queue_disc(row, sites, lo);
    SjStep { sites: queue.r.clone(), queue }
}

/// SJ height by iterating the queue maps over all rows:
/// `h(m) = f(m) + Σ_k J_k(m)`.
pub fn sj_height_iterated(
    f: &DiscreteBoundary,
    env: &SJEnvironment,
    ys: &[i64],
) -> Result<(Vec<f64>, bool)> {
    if env.cols != f.incr.len() {
        return Err(Error::domain("SJ environment does not cover the boundary window"));
    }
    let lo = f.lo;
    let mut sites: Vec<i64> = f.incr.iter().map(|&x| x as i64).collect();
    let mut gains = vec![0i64; ys.len()];
    let mut active = false;
    for j in 0..env.rows {
        let row: Vec<i64> = (1..=env.cols).map(|i| env.edge(i, j)).collect();
        let step = evolve_sj(&sites, &row, lo + 1);
        for (g, &m) in gains.iter_mut().zip(ys) {
            if m > lo {
                let idx = (m - lo - 1) as usize;
                *g += step.queue.q[idx];
                active |= step.queue.boundary_active[idx];
            }
        }
        sites = step.sites;
    }
    let hs = ys.iter().zip(&gains).map(|(&m, &g)| f.f_at(m) + g as f64).collect();
    Ok((hs, active))
}

// ---------------------------------------------------------------------------
// Hammersley fluid process
// ---------------------------------------------------------------------------

/// A single particle jump: at `time`, the particle at `from` moved left
/// to `to`.
#[derive(Debug, Clone, Copy)]
pub struct Jump {
    pub time: f64,
    pub from: f64,
    pub to: f64,
}

/// State of the interacting fluid after running all environment events.
#[derive(Debug, Clone)]
pub struct FluidState {
    /// Particle positions after the last event, ascending.
    pub positions: Vec<f64>,
    /// All jumps, in time order.
    pub jumps: Vec<Jump>,
    /// Some event had no particle to its right inside the window — crossing
    /// counts may be biased; treat dependent checks as inconclusive.
    pub underflow: bool,
}

/// Run the fluid dynamics: particles start at the points of `ν`; for each
/// environment point `(x, s)` in time order, the nearest particle strictly
/// right of `x` jumps to `x`.
pub fn fluid_evolve(nu: &PointSet, env: &PlanarPointSet, t: f64) -> FluidState {
    let mut positions = nu.points.clone();
    let mut events: Vec<(f64, f64)> =
        env.points.iter().copied().filter(|&(_, s)| s > 0.0 && s <= t).collect();
    events.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let mut jumps = Vec::new();
    let mut underflow = false;
    for (x, s) in events {
        let idx = positions.partition_point(|&p| p <= x);
        if idx == positions.len() {
            underflow = true;
            continue;
        }
        jumps.push(Jump { time: s, from: positions[idx], to: x });
        positions[idx] = x; // left neighbor is ≤ x, so order is preserved
    }
    FluidState { positions, jumps, underflow }
}

/// `η^ν_y(t)`: number of particle trajectories crossing `{y} × (0, t]`.
pub fn eta_count(fluid: &FluidState, y: f64, t: f64) -> i64 {
    fluid.jumps.iter().filter(|j| j.time <= t && j.to <= y && y < j.from).count() as i64
}

/// Check the trajectory identity `h(t, y; ν) = ν(y) + η^ν_y(t)` with both
/// sides computed independently (LIS-based height vs crossing count).
/// Returns `None` when inconclusive: fluid underflow, or exit point at the
/// truncation edge.
pub fn eta_identity_check(nu: &PointSet, env: &PlanarPointSet, y: f64, t: f64) -> Option<bool> {
    let fluid = fluid_evolve(nu, env, t);
    if fluid.underflow {
        return None;
    }
    let prof = height_hammersley(env, nu, t, &[y]).ok()?;
    if prof.boundary_active[0] {
        return None;
    }
    let rhs = (nu.nu_unchecked(y) + eta_count(&fluid, y, t)) as f64;
    Some(prof.h[0] == rhs)
}
