//! Random environments and boundary point processes.
//!
//! Poisson point processes on intervals and rectangles, uniform-mark
//! thinning couplings across intensities, and coupled Bernoulli site fields.
//! A [`PointSet`] doubles as the counting function
//! `ν(x) = #(0,x]` for `x ≥ 0`, `−#(x,0]` for `x < 0` (so `ν(0) = 0`, `ν` is
//! nondecreasing and right-continuous and `ν(x,y] = ν(y) − ν(x)`).
//!
//! # Sampling in sorted order
//!
//! 1-D Poisson samples are generated by cumulative exponential gaps, which
//! yields the points already sorted — jointly equivalent to "Poisson count,
//! then i.i.d. uniform locations" but without an O(n log n) sort. The heavy
//! Monte Carlo suites (N = 2000 environments have millions of points) rely
//! on this.

use crate::error::Error;
use crate::rng::RngStream;
use crate::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Locally finite point configuration on an interval, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    /// Strictly sorted coordinates.
    pub points: Vec<f64>,
    /// Closed window `[lo, hi]` containing all points.
    pub window: (f64, f64),
}

impl PointSet {
    pub fn new(mut points: Vec<f64>, window: (f64, f64)) -> Self {
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        debug_assert!(points.iter().all(|&x| x >= window.0 && x <= window.1));
        PointSet { points, window }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points `≤ x`.
    pub fn rank(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p <= x)
    }

    /// Number of points in the half-open interval `(x, y]`.
    pub fn count_in(&self, x: f64, y: f64) -> usize {
        if y <= x {
            0
        } else {
            self.rank(y) - self.rank(x)
        }
    }

    /// The counting function `ν(x)` (see module docs). Errors if `x` is
    /// outside the window.
    pub fn nu(&self, x: f64) -> Result<i64> {
        if x < self.window.0 || x > self.window.1 {
            return Err(Error::domain(format!(
                "nu({x}) outside window [{}, {}]",
                self.window.0, self.window.1
            )));
        }
        Ok(self.nu_unchecked(x))
    }

    /// `ν(x)` without the window check (callers that already clamp).
    pub fn nu_unchecked(&self, x: f64) -> i64 {
        self.rank(x) as i64 - self.rank(0.0) as i64
    }

    /// CSV serialization: header `x`, one coordinate per row.
    pub fn to_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["x"])?;
        for &p in &self.points {
            wtr.write_record([format!("{p}")])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// JSON serialization: `{"window":[lo,hi],"points":[...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "window": [self.window.0, self.window.1], "points": self.points })
    }
}

/// Planar point configuration with almost-surely distinct coordinates in
/// each axis (enforced by resampling on the desk-scale sampler).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarPointSet {
    /// `(x, t)` pairs, sorted by `x`.
    pub points: Vec<(f64, f64)>,
    /// `((x_lo, x_hi), (t_lo, t_hi))`.
    pub window: ((f64, f64), (f64, f64)),
}

impl PlanarPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Exponential gap helper: next Poisson point after `x` at rate `rate`.
#[inline]
fn next_gap(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    // Inverse-CDF exponential; `1 - u` avoids log(0).
    -(1.0 - rng.gen::<f64>()).ln() / rate
}

/// Sample a 1-D Poisson process of the given intensity on `window`,
/// returned sorted ascending.
pub fn sample_poisson_1d(intensity: f64, window: (f64, f64), stream: RngStream) -> Result<PointSet> {
    if !(intensity > 0.0) {
        return Err(Error::parameter(format!("Poisson intensity must be > 0, got {intensity}")));
    }
    if window.1 < window.0 {
        return Err(Error::parameter("empty window"));
    }
    let mut rng = stream.rng();
    Ok(PointSet { points: poisson_sorted(&mut rng, intensity, window), window })
}

/// Sorted Poisson sample on `window` drawn from an existing generator.
pub fn poisson_sorted(rng: &mut ChaCha8Rng, rate: f64, window: (f64, f64)) -> Vec<f64> {
    let mut points = Vec::with_capacity((rate * (window.1 - window.0) * 1.1 + 16.0) as usize);
    let mut x = window.0 + next_gap(rng, rate);
    while x <= window.1 {
        points.push(x);
        x += next_gap(rng, rate);
    }
    points
}

/// Sample a rate-`intensity` planar Poisson process on the rectangle,
/// resampling any (astronomically unlikely) coordinate collision so that all
/// x-coordinates and all t-coordinates are pairwise distinct.
pub fn sample_poisson_2d(
    intensity: f64,
    window: ((f64, f64), (f64, f64)),
    stream: RngStream,
) -> Result<PlanarPointSet> {
    if !(intensity > 0.0) {
        return Err(Error::parameter(format!("Poisson intensity must be > 0, got {intensity}")));
    }
    let ((x0, x1), (t0, t1)) = window;
    if x1 < x0 || t1 < t0 {
        return Err(Error::parameter("empty window"));
    }
    let mut rng = stream.rng();
    let height = t1 - t0;
    loop {
        // x-marginal is Poisson of rate intensity·height; t-coordinates i.i.d.
        let xs = poisson_sorted(&mut rng, intensity * height.max(f64::MIN_POSITIVE), (x0, x1));
        let points: Vec<(f64, f64)> =
            xs.into_iter().map(|x| (x, t0 + rng.gen::<f64>() * height)).collect();
        if coordinates_distinct(&points) {
            return Ok(PlanarPointSet { points, window });
        }
        // resample the whole configuration (a.s. never happens)
    }
}

fn coordinates_distinct(points: &[(f64, f64)]) -> bool {
    // xs are strictly increasing by construction; check ts.
    let mut ts: Vec<f64> = points.iter().map(|&(_, t)| t).collect();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.windows(2).all(|w| w[0].0 < w[1].0) && ts.windows(2).all(|w| w[0] < w[1])
}

/// Uniform-mark thinning coupling of Poisson processes across intensities.
///
/// The base is sampled at intensity `e^Λ`; each point carries an independent
/// uniform mark. Extraction at `(a, b)` keeps a negative-axis point iff its
/// mark is ≤ `e^{a−Λ}` and a nonnegative-axis point iff its mark is
/// ≤ `e^{b−Λ}`, producing independent Poisson restrictions of intensities
/// `e^a` on `(lo, 0)` and `e^b` on `[0, hi)`, *monotonically coupled* across
/// parameter pairs: lowering `(a, b)` only removes points.
#[derive(Debug, Clone)]
pub struct CoupledPointFamily {
    pub base: PointSet,
    pub marks: Vec<f64>,
    /// The log-intensity cap Λ.
    pub cap: f64,
}

impl CoupledPointFamily {
    pub fn sample(cap: f64, window: (f64, f64), stream: RngStream) -> Result<Self> {
        if window.1 < window.0 {
            return Err(Error::parameter("empty window"));
        }
        let mut rng = stream.rng();
        let points = poisson_sorted(&mut rng, cap.exp(), window);
        // marks drawn from the same stream, after the base points
        let marks = (0..points.len()).map(|_| rng.gen::<f64>()).collect();
        Ok(CoupledPointFamily { base: PointSet { points, window }, marks, cap })
    }

    /// Extract the two-sided configuration `ν^{a,b}` (see struct docs).
    pub fn extract(&self, a: f64, b: f64) -> Result<PointSet> {
        if a > self.cap || b > self.cap {
            return Err(Error::parameter(format!(
                "extraction parameters ({a}, {b}) above coupling cap {}",
                self.cap
            )));
        }
        let pa = (a - self.cap).exp();
        let pb = (b - self.cap).exp();
        let points = self
            .base
            .points
            .iter()
            .zip(&self.marks)
            .filter(|&(&x, &m)| if x < 0.0 { m <= pa } else { m <= pb })
            .map(|(&x, _)| x)
            .collect();
        Ok(PointSet { points, window: self.base.window })
    }
}

/// Coupled Bernoulli field: one uniform per integer site; extraction at
/// logit-parameter `a` sets site `i` to 1 iff `U_i ≤ e^a/(1+e^a)`.
/// Extractions are pointwise nondecreasing in `a`.
#[derive(Debug, Clone)]
pub struct CoupledBernoulliField {
    /// Uniforms for sites `lo..=hi`.
    pub uniforms: Vec<f64>,
    /// First site index.
    pub lo: i64,
}

impl CoupledBernoulliField {
    pub fn sample(lo: i64, hi: i64, stream: RngStream) -> Self {
        assert!(hi >= lo);
        let mut rng = stream.rng();
        let uniforms = (lo..=hi).map(|_| rng.gen::<f64>()).collect();
        CoupledBernoulliField { uniforms, lo }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.uniforms.len() as i64 - 1
    }

    /// Extraction at a single parameter `a` for all sites.
    pub fn extract(&self, a: f64) -> Vec<u8> {
        let u = sigmoid(a);
        self.uniforms.iter().map(|&m| (m <= u) as u8).collect()
    }

    /// Two-sided extraction: sites `≤ 0` use `a`, sites `≥ 1` use `b`
    /// (the site index is `lo + offset`).
    pub fn extract_two_sided(&self, a: f64, b: f64) -> Vec<u8> {
        let ua = sigmoid(a);
        let ub = sigmoid(b);
        self.uniforms
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                let site = self.lo + k as i64;
                (m <= if site <= 0 { ua } else { ub }) as u8
            })
            .collect()
    }
}

/// Logistic function `e^a / (1 + e^a)`, numerically stable on both tails.
pub fn sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(seed: u64) -> RngStream {
        RngStream::new(seed)
    }

    #[test]
    fn zero_length_window_is_empty() {
        let ps = sample_poisson_1d(1.0, (0.0, 0.0), stream(1)).unwrap();
        assert!(ps.is_empty());
    }

    #[test]
    fn unit_rate_mean_count() {
        // intensity 1 on [0,10] ⇒ mean count 10
        let mut total = 0usize;
        let n = 4000;
        for r in 0..n {
            total += sample_poisson_1d(1.0, (0.0, 10.0), stream(2).substream(1, r)).unwrap().len();
        }
        let mean = total as f64 / n as f64;
        assert!((mean - 10.0).abs() < 0.2, "mean = {mean}");
    }

    #[test]
    fn poisson_dispersion_near_one() {
        // intensity 2 on [0,50]: variance/mean ratio within [0.95, 1.05]
        let counts: Vec<u64> = (0..10_000)
            .map(|r| sample_poisson_1d(2.0, (0.0, 50.0), stream(3).substream(1, r)).unwrap().len() as u64)
            .collect();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<u64>() as f64 / n;
        let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let ratio = var / mean;
        assert!((0.95..=1.05).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn poisson_2d_mean_counts() {
        let mut unit = 0usize;
        let mut big = 0usize;
        for r in 0..2000 {
            unit += sample_poisson_2d(1.0, ((0.0, 1.0), (0.0, 1.0)), stream(4).substream(1, r))
                .unwrap()
                .len();
            big += sample_poisson_2d(1.0, ((0.0, 4.0), (0.0, 4.0)), stream(4).substream(2, r))
                .unwrap()
                .len();
        }
        assert!((unit as f64 / 2000.0 - 1.0).abs() < 0.1);
        assert!((big as f64 / 2000.0 - 16.0).abs() < 0.5);
    }

    #[test]
    fn poisson_2d_coordinates_distinct() {
        let ps = sample_poisson_2d(1.0, ((0.0, 10.0), (0.0, 10.0)), stream(5)).unwrap();
        assert!(coordinates_distinct(&ps.points));
    }

    #[test]
    fn nu_basics() {
        let ps = PointSet::new(vec![-1.5, 0.5, 2.0], (-3.0, 3.0));
        assert_eq!(ps.nu(0.0).unwrap(), 0);
        assert_eq!(ps.nu(1.0).unwrap(), 1);
        assert_eq!(ps.nu(-2.0).unwrap(), -1);
        assert!(ps.nu(5.0).is_err());
    }

    #[test]
    fn nu_increment_identity() {
        let mut rng = stream(6).rng();
        let ps = sample_poisson_1d(2.0, (-20.0, 20.0), stream(6)).unwrap();
        for _ in 0..1000 {
            let x = rng.gen_range(-20.0..20.0);
            let y = rng.gen_range(x..20.0);
            assert_eq!(
                ps.nu(y).unwrap() - ps.nu(x).unwrap(),
                ps.count_in(x, y) as i64,
                "increment identity at ({x}, {y}]"
            );
        }
    }

    #[test]
    fn coupling_at_cap_is_identity() {
        let fam = CoupledPointFamily::sample(1.0, (-10.0, 10.0), stream(7)).unwrap();
        let full = fam.extract(1.0, 1.0).unwrap();
        assert_eq!(full.points, fam.base.points);
    }

    #[test]
    fn coupling_far_below_cap_is_empty() {
        let fam = CoupledPointFamily::sample(1.0, (-10.0, 10.0), stream(8)).unwrap();
        assert!(fam.extract(-59.0, -59.0).unwrap().is_empty());
    }

    #[test]
    fn coupling_above_cap_rejected() {
        let fam = CoupledPointFamily::sample(0.5, (-1.0, 1.0), stream(9)).unwrap();
        assert!(fam.extract(0.6, 0.0).is_err());
    }

    #[test]
    fn coupling_monotone_subset() {
        for r in 0..1000 {
            let fam = CoupledPointFamily::sample(0.8, (-8.0, 8.0), stream(10).substream(1, r)).unwrap();
            let big = fam.extract(0.5, 0.3).unwrap();
            let small = fam.extract(0.1, -0.4).unwrap();
            // subset check via merge (both sorted)
            let mut i = 0;
            for &x in &small.points {
                while i < big.points.len() && big.points[i] < x {
                    i += 1;
                }
                assert!(i < big.points.len() && big.points[i] == x, "not a subset at replica {r}");
            }
        }
    }

    #[test]
    fn bernoulli_field_monotone_and_halves() {
        let field = CoupledBernoulliField::sample(-50, 50, stream(11));
        let lowest = field.extract(-60.0);
        assert!(lowest.iter().all(|&b| b == 0));
        let half = field.extract(0.0);
        let frac = half.iter().map(|&b| b as f64).sum::<f64>() / half.len() as f64;
        assert!((frac - 0.5).abs() < 0.2);
        let lower = field.extract(-0.7);
        assert!(lower.iter().zip(&half).all(|(&l, &h)| l <= h));
    }

    #[test]
    fn pointset_csv_json() {
        let ps = PointSet::new(vec![0.5, -1.0], (-2.0, 2.0));
        let mut buf = Vec::new();
        ps.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x\n"));
        assert_eq!(text.lines().count(), 3);
        let j = ps.to_json();
        assert_eq!(j["window"][0], -2.0);
        assert_eq!(j["points"].as_array().unwrap().len(), 2);
    }
}
