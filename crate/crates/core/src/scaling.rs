//! KPZ diffusive rescaling: per-model parameter tables `(ρ → χ, α, β, τ)`,
//! the drift schedule `β_N(μ)`, the scaling operator `ι_N`, rescaled
//! passage profiles `L_N`, rescaled stationary boundaries `H_μ^N`, and the
//! finite-N joint-invariance test.
//!
//! Conventions used throughout:
//!
//! * `β` is the *mean of a one-unit horizontal boundary increment* in every
//!   model. Concretely: Poisson intensity (Hammersley, lines), Bernoulli
//!   success probability (SJ), exponential / geometric increment mean
//!   (lattice models), Brownian drift (BLPP).
//! * space-time point `(y, t)` maps to model coordinates
//!   `(tρN + yτN^{2/3}, tN)`, with floors applied for ℤ coordinates.

use crate::error::Error;
use crate::lpp::{BrownianField, LatticeEnvironment, SJEnvironment, WeightLaw};
use crate::processes::{sample_poisson_1d, sample_poisson_2d};
use crate::report::{SubTest, TestReport};
use crate::rng::RngStream;
use crate::stationary::{
    height_blpp, height_hammersley, height_lattice, height_lines, height_sj, BlppBoundary,
    DiscreteBoundary, MergedLines,
};
use crate::stats;
use crate::Result;
use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

/// The six exactly solvable models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelKind {
    Hammersley,
    PoissonLines,
    Sj { p: f64 },
    Exponential,
    Geometric { mean: f64 },
    Blpp,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Hammersley => "hammersley",
            ModelKind::PoissonLines => "lines",
            ModelKind::Sj { .. } => "sj",
            ModelKind::Exponential => "exponential",
            ModelKind::Geometric { .. } => "geometric",
            ModelKind::Blpp => "blpp",
        }
    }
}

/// The KPZ scaling constants of one model in direction `ρ`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalingParams {
    pub model: ModelKind,
    pub rho: f64,
    pub chi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
}

/// Closed-form scaling constants. `ρ > 0` for all models; SJ additionally
/// requires `ρ > p/(1−p)`.
pub fn params_for(model: ModelKind, rho: f64) -> Result<ScalingParams> {
    if !(rho > 0.0) {
        return Err(Error::parameter("rho must be > 0"));
    }
    let sr = rho.sqrt();
    let (chi3, alpha, beta, chi_over_tau2): (f64, f64, f64, f64) = match model {
        ModelKind::Hammersley => (sr, 2.0 * sr, 1.0 / sr, 0.25 / rho.powf(1.5)),
        ModelKind::PoissonLines => {
            (sr * (1.0 + sr).powi(2), rho + 2.0 * sr, 1.0 + 1.0 / sr, 0.25 / rho.powf(1.5))
        }
        ModelKind::Sj { p } => {
            if !(0.0 < p && p < 1.0) {
                return Err(Error::parameter("SJ requires 0 < p < 1"));
            }
            let lam = (1.0 - p) / p;
            if rho * lam <= 1.0 {
                return Err(Error::parameter(format!(
                    "SJ direction inadmissible: need rho > p/(1-p) = {}",
                    1.0 / lam
                )));
            }
            let sl = lam.sqrt();
            let chi3 = sl * ((lam * rho).sqrt() - 1.0).powi(2) * (sr + sl).powi(2)
                / (sr * (lam + 1.0).powi(3));
            let alpha = rho - ((rho * lam).sqrt() - 1.0).powi(2) / (lam + 1.0);
            let beta = p + (p * (1.0 - p) / rho).sqrt();
            (chi3, alpha, beta, sl / (4.0 * (lam + 1.0) * rho.powf(1.5)))
        }
        ModelKind::Exponential => {
            ((sr + 1.0).powi(4) / sr, (sr + 1.0).powi(2), 1.0 + 1.0 / sr, 0.25 / rho.powf(1.5))
        }
        ModelKind::Geometric { mean } => {
            if !(mean > 0.0) {
                return Err(Error::parameter("geometric weight mean must be > 0"));
            }
            let gb = mean * (mean + 1.0);
            let chi3 = gb * (gb * (1.0 + rho) + (2.0 * mean + 1.0) * sr).powi(2) / sr;
            let alpha = mean * (rho + 1.0) + 2.0 * gb * sr;
            let beta = mean + gb / sr;
            (chi3, alpha, beta, 0.25 / rho.powf(1.5))
        }
        ModelKind::Blpp => (rho.powf(1.5), 2.0 * sr, 1.0 / sr, 0.25 / rho.powf(1.5)),
    };
    let chi = chi3.cbrt();
    let tau = (chi / chi_over_tau2).sqrt();
    Ok(ScalingParams { model, rho, chi, alpha, beta, tau })
}

/// Largest residual of the defining parameter system — re-evaluates every
/// defining equation from scratch (used to certify the closed forms).
pub fn params_residual(p: &ScalingParams) -> f64 {
    let sr = p.rho.sqrt();
    let (chi3, alpha, beta, cot2): (f64, f64, f64, f64) = match p.model {
        ModelKind::Hammersley => (sr, 2.0 * sr, 1.0 / sr, 0.25 / p.rho.powf(1.5)),
        ModelKind::PoissonLines => {
            (sr * (1.0 + sr).powi(2), p.rho + 2.0 * sr, 1.0 + 1.0 / sr, 0.25 / p.rho.powf(1.5))
        }
        ModelKind::Sj { p: pp } => {
            let lam = (1.0 - pp) / pp;
            let sl = lam.sqrt();
            (
                sl * ((lam * p.rho).sqrt() - 1.0).powi(2) * (sr + sl).powi(2)
                    / (sr * (lam + 1.0).powi(3)),
                p.rho - ((p.rho * lam).sqrt() - 1.0).powi(2) / (lam + 1.0),
                pp + (pp * (1.0 - pp) / p.rho).sqrt(),
                sl / (4.0 * (lam + 1.0) * p.rho.powf(1.5)),
            )
        }
        ModelKind::Exponential => (
            (sr + 1.0).powi(4) / sr,
            (sr + 1.0).powi(2),
            1.0 + 1.0 / sr,
            0.25 / p.rho.powf(1.5),
        ),
        ModelKind::Geometric { mean } => {
            let gb = mean * (mean + 1.0);
            (
                gb * (gb * (1.0 + p.rho) + (2.0 * mean + 1.0) * sr).powi(2) / sr,
                mean * (p.rho + 1.0) + 2.0 * gb * sr,
                mean + gb / sr,
                0.25 / p.rho.powf(1.5),
            )
        }
        ModelKind::Blpp => (p.rho.powf(1.5), 2.0 * sr, 1.0 / sr, 0.25 / p.rho.powf(1.5)),
    };
    // relative residuals so the 1e-12 certificate is scale-free
    let r1 = (p.chi.powi(3) - chi3).abs() / chi3.abs().max(1.0);
    let r2 = (p.alpha - alpha).abs() / alpha.abs().max(1.0);
    let r3 = (p.beta - beta).abs() / beta.abs().max(1.0);
    let r4 = (p.chi / (p.tau * p.tau) - cot2).abs() / cot2.abs().max(1.0);
    let r5 = if p.tau > 0.0 { 0.0 } else { f64::INFINITY };
    r1.max(r2).max(r3).max(r4).max(r5)
}

/// Drift schedule: mean of a one-unit boundary increment at scale `N`,
/// `β_N(μ) = β + (2μχ/τ)·N^{−1/3}`.
pub fn beta_n(params: &ScalingParams, mu: f64, n: u64) -> f64 {
    params.beta + 2.0 * mu * params.chi / params.tau * (n as f64).powf(-1.0 / 3.0)
}

/// A piecewise-linear increment path, `f(0) = 0`.
#[derive(Debug, Clone)]
pub struct IncrementPath {
    /// Sample locations, ascending.
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl IncrementPath {
    /// Evaluate by linear interpolation (constant extrapolation outside).
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 {
            return 0.0;
        }
        let i = self.xs.partition_point(|&v| v < x);
        if i == 0 {
            return self.values[0];
        }
        if i == n {
            return self.values[n - 1];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }
}

/// The scaling operator `ι_N f(x) = (f(xτN^{2/3}) − βτN^{2/3}x)/(χN^{1/3})`,
/// evaluated on `xs_out`.
pub fn iota_n(f: &IncrementPath, params: &ScalingParams, n: u64, xs_out: &[f64]) -> IncrementPath {
    let n23 = (n as f64).powf(2.0 / 3.0);
    let n13 = (n as f64).powf(1.0 / 3.0);
    let values = xs_out
        .iter()
        .map(|&x| (f.eval(x * params.tau * n23) - params.beta * params.tau * n23 * x) / (params.chi * n13))
        .collect();
    IncrementPath { xs: xs_out.to_vec(), values }
}

// ---------------------------------------------------------------------------
// rescaled stationary boundary H_μ^N
// ---------------------------------------------------------------------------

/// Fresh boundary increment `f(d) − f(0)` over a (possibly negative)
/// horizontal span `d` in model coordinates, with one-unit increment mean
/// `b` (= `β_N(μ)`). Continuum models take `d` real, lattice models floor
/// it before calling.
pub fn boundary_increment(
    model: &ModelKind,
    b: f64,
    d: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> f64 {
    let span = d.abs();
    let sgn = if d >= 0.0 { 1.0 } else { -1.0 };
    let raw = match model {
        ModelKind::Hammersley | ModelKind::PoissonLines => {
            rand_distr::Poisson::new((b * span).max(1e-300)).unwrap().sample(rng)
        }
        ModelKind::Sj { .. } => {
            let m = span.round() as u64;
            (0..m).filter(|_| rng.gen::<f64>() < b).count() as f64
        }
        ModelKind::Exponential => {
            let m = span.round() as u64;
            (0..m).map(|_| -b * (1.0 - rng.gen::<f64>()).ln()).sum()
        }
        ModelKind::Geometric { .. } => {
            let m = span.round() as u64;
            let v = 1.0 / (1.0 + b);
            (0..m).map(|_| crate::lpp::sample_geom(rng, v) as f64).sum()
        }
        ModelKind::Blpp => rand_distr::Normal::new(b * span, span.sqrt().max(1e-300))
            .unwrap()
            .sample(rng),
    };
    sgn * raw
}

/// Samples of `H_μ^N(x) = ι'_N f_{β_N(μ)}(x)` (exact boundary evaluation at
/// the floored model coordinate), independent across replicas.
pub fn rescaled_busemann_samples(
    model: ModelKind,
    rho: f64,
    mu: f64,
    n: u64,
    x: f64,
    replicas: u32,
    stream: RngStream,
) -> Result<Vec<f64>> {
    let sp = params_for(model, rho)?;
    let b = beta_n(&sp, mu, n);
    let n23 = (n as f64).powf(2.0 / 3.0);
    let n13 = (n as f64).powf(1.0 / 3.0);
    let d_real = x * sp.tau * n23;
    let d = match model {
        ModelKind::Hammersley | ModelKind::Blpp => d_real,
        _ => d_real.floor(),
    };
    let out = crate::replicas::run_replicas(replicas, |r| {
        let mut rng = stream.substream(0x48424d53, r).rng();
        (boundary_increment(&model, b, d, &mut rng) - sp.beta * sp.tau * n23 * x)
            / (sp.chi * n13)
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// rescaled passage profiles L_N
// ---------------------------------------------------------------------------

/// A rescaled profile on a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescaledProfile {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub n: u64,
}

/// `L_N(x, 0; y, t)` for the exponential model on an `x`-grid with fixed
/// `(y, t)`: samples one environment and evaluates the rescaled display
/// `(d(xτN^{2/3}, 0; tρN + yτN^{2/3}, tN) − αNt − βτN^{2/3}(y−x))/(χN^{1/3})`
/// with floors on all lattice coordinates.
pub fn rescaled_profile_exponential(
    rho: f64,
    n: u64,
    t: f64,
    xs: &[f64],
    y: f64,
    stream: RngStream,
) -> Result<RescaledProfile> {
    let sp = params_for(ModelKind::Exponential, rho)?;
    let n23 = (n as f64).powf(2.0 / 3.0);
    let n13 = (n as f64).powf(1.0 / 3.0);
    let rows = ((t * n as f64).floor() as usize).max(1);
    let x_cells: Vec<i64> = xs.iter().map(|&x| (x * sp.tau * n23).floor() as i64).collect();
    let y_cell = (t * rho * n as f64 + y * sp.tau * n23).floor() as i64;
    let lo = *x_cells.iter().min().unwrap();
    if y_cell < *x_cells.iter().max().unwrap() {
        return Err(Error::domain("target left of a source in the rescaled grid"));
    }
    let cols = (y_cell - lo + 1) as usize;
    let env = LatticeEnvironment::sample(cols, rows, WeightLaw::ExpUnit, stream)?;
    let mut values = Vec::with_capacity(xs.len());
    for (&x, &xc) in xs.iter().zip(&x_cells) {
        let d = crate::lpp::lattice_lpp(&env, ((xc - lo) as usize, 0), (cols - 1, rows - 1))?;
        let v = (d - sp.alpha * n as f64 * t - sp.beta * sp.tau * n23 * (y - x)) / (sp.chi * n13);
        values.push(v);
    }
    Ok(RescaledProfile { xs: xs.to_vec(), values, n })
}

// ---------------------------------------------------------------------------
// finite-N joint invariance
// ---------------------------------------------------------------------------

/// Evolved height increments at time `t = 1`: per replica, sample a
/// stationary boundary with one-unit increment mean `β_N(μ)` and the model
/// environment, and return `h(y_i) − h(y_0)` in model units for
/// `y_i = ρN + x_i τN^{2/3}` (floored as needed), `y_0 = ρN`.
///
/// Errors if any query is truncation-active (widen `W`).
fn evolved_increments(
    model: &ModelKind,
    sp: &ScalingParams,
    n: u64,
    b: f64,
    xs: &[f64],
    stream: RngStream,
    r: u32,
) -> Result<Vec<f64>> {
    let nf = n as f64;
    let n23 = nf.powf(2.0 / 3.0);
    // exit fluctuations live on scale τN^{2/3}; 6τ keeps the truncation
    // probability negligible for every model (8 is the floor for small τ)
    let w = ((6.0 * sp.tau).max(8.0) * n23).ceil();
    let env_stream = stream.substream(0x4556454e, r);
    let bd_stream = stream.substream(0x45564244, r);
    match model {
        ModelKind::Hammersley => {
            let y0 = sp.rho * nf;
            let ys: Vec<f64> = std::iter::once(y0)
                .chain(xs.iter().map(|&x| y0 + x * sp.tau * n23))
                .collect();
            let y_max = ys.iter().cloned().fold(y0, f64::max);
            let nu = sample_poisson_1d(b, (-w, y_max), bd_stream)?;
            let env = sample_poisson_2d(1.0, ((-w, y_max), (0.0, nf)), env_stream)?;
            let prof = height_hammersley(&env, &nu, nf, &ys)?;
            finish_increments(&prof.h, &prof.boundary_active)
        }
        ModelKind::PoissonLines => {
            let y0 = sp.rho * nf;
            let ys: Vec<f64> = std::iter::once(y0)
                .chain(xs.iter().map(|&x| y0 + x * sp.tau * n23))
                .collect();
            let y_max = ys.iter().cloned().fold(y0, f64::max);
            let nu = sample_poisson_1d(b, (-w, y_max), bd_stream)?;
            let env = MergedLines::sample(n as usize, (-w, y_max), env_stream)?;
            let prof = height_lines(&env, &nu, &ys)?;
            finish_increments(&prof.h, &prof.boundary_active)
        }
        ModelKind::Sj { p } => {
            let y0 = (sp.rho * nf).floor() as i64;
            let ys: Vec<i64> = std::iter::once(y0)
                .chain(xs.iter().map(|&x| (sp.rho * nf + x * sp.tau * n23).floor() as i64))
                .collect();
            let y_max = *ys.iter().max().unwrap();
            let lo = -(w as i64);
            let f = DiscreteBoundary::sample_bernoulli(b, lo, y_max, bd_stream)?;
            let env = SJEnvironment::sample((y_max - lo) as usize, n as usize, *p, env_stream)?;
            let prof = height_sj(&env, &f, &ys)?;
            finish_increments(&prof.h, &prof.boundary_active)
        }
        ModelKind::Exponential | ModelKind::Geometric { .. } => {
            let y0 = (sp.rho * nf).floor() as i64;
            let ys: Vec<i64> = std::iter::once(y0)
                .chain(xs.iter().map(|&x| (sp.rho * nf + x * sp.tau * n23).floor() as i64))
                .collect();
            let y_max = *ys.iter().max().unwrap();
            let lo = -(w as i64);
            let (f, law) = match model {
                ModelKind::Exponential => {
                    (DiscreteBoundary::sample_exp(b, lo, y_max, bd_stream)?, WeightLaw::ExpUnit)
                }
                ModelKind::Geometric { mean } => (
                    DiscreteBoundary::sample_geom(b, lo, y_max, bd_stream)?,
                    WeightLaw::Geom { mean: *mean },
                ),
                _ => unreachable!(),
            };
            let cols = (y_max - lo + 1) as usize;
            let env = LatticeEnvironment::sample(cols, n as usize, law, env_stream)?;
            let prof = height_lattice(&env, &f, &ys)?;
            finish_increments(&prof.h, &prof.boundary_active)
        }
        ModelKind::Blpp => {
            let y0 = sp.rho * nf;
            let ys: Vec<f64> = std::iter::once(y0)
                .chain(xs.iter().map(|&x| y0 + x * sp.tau * n23))
                .collect();
            let y_max = ys.iter().cloned().fold(y0, f64::max);
            // δ from the query pitch so discretization bias stays below
            // statistical resolution
            let pitch = min_pitch(&ys);
            let delta = (pitch / (8.0 * nf)).max(1e-4);
            let f = BlppBoundary::sample(b, -w, y_max, delta, bd_stream)?;
            let levels = f.values.len();
            let env = sample_brownian_matching(n as usize, -w, delta, levels, env_stream);
            let prof = height_blpp(&env, &f, &ys)?;
            finish_increments(&prof.h, &prof.boundary_active)
        }
    }
}

fn min_pitch(ys: &[f64]) -> f64 {
    let mut s: Vec<f64> = ys.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s.windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > 1e-9)
        .fold(f64::INFINITY, f64::min)
        .min(s.last().unwrap() - s.first().unwrap())
}

fn sample_brownian_matching(
    levels: usize,
    x0: f64,
    delta: f64,
    len: usize,
    stream: RngStream,
) -> BrownianField {
    let mut rng = stream.rng();
    let normal = rand_distr::Normal::new(0.0, delta.sqrt()).unwrap();
    let lv = (0..levels)
        .map(|_| {
            let mut b = Vec::with_capacity(len);
            let mut v = 0.0;
            b.push(v);
            for _ in 1..len {
                v += normal.sample(&mut rng);
                b.push(v);
            }
            b
        })
        .collect();
    BrownianField { levels: lv, x0, delta }
}

fn finish_increments(h: &[f64], active: &[bool]) -> Result<Vec<f64>> {
    if active.iter().any(|&a| a) {
        return Err(Error::domain(
            "height query is truncation-active; widen the boundary window",
        ));
    }
    Ok(h[1..].iter().map(|&v| v - h[0]).collect())
}

/// Finite-N joint-invariance test at `t = 1`: for each grid point `x_i`,
/// two-sample KS between evolved increments `h(ρN + x_i τN^{2/3}) − h(ρN)`
/// and fresh boundary increments over the same span. Exact stationarity
/// makes this a same-law comparison at every `N`.
pub fn invariance_test(
    model: ModelKind,
    rho: f64,
    mu: f64,
    n: u64,
    xs: &[f64],
    replicas: u32,
    stream: RngStream,
    level: f64,
) -> Result<TestReport> {
    let sp = params_for(model, rho)?;
    let b = beta_n(&sp, mu, n);
    if let ModelKind::Sj { p } = model {
        if b <= p {
            return Err(Error::parameter("SJ boundary drift must exceed p"));
        }
    }
    let nf = n as f64;
    let n23 = nf.powf(2.0 / 3.0);
    // spans in model units, floored exactly as the evolved queries are
    let spans: Vec<f64> = match model {
        ModelKind::Hammersley | ModelKind::Blpp => {
            xs.iter().map(|&x| x * sp.tau * n23).collect()
        }
        _ => {
            let y0 = (rho * nf).floor();
            xs.iter().map(|&x| (rho * nf + x * sp.tau * n23).floor() - y0).collect()
        }
    };
    let evolved: Vec<Result<Vec<f64>>> =
        crate::replicas::run_replicas(replicas, |r| evolved_increments(&model, &sp, n, b, xs, stream, r));
    let fresh: Vec<Vec<f64>> = crate::replicas::run_replicas(replicas, |r| {
        let mut rng = stream.substream(0x46524553, r).rng();
        spans.iter().map(|&d| boundary_increment(&model, b, d, &mut rng)).collect()
    });
    let mut report = TestReport::new("sh_invariance")
        .param("model", model.name())
        .param("rho", rho)
        .param("mu", mu)
        .param("N", n)
        .param("replicas", replicas);
    report.seeds.push(stream.seed);
    let mut per_x: Vec<Vec<f64>> = vec![Vec::with_capacity(replicas as usize); xs.len()];
    for row in evolved {
        let row = row?;
        for (i, v) in row.into_iter().enumerate() {
            per_x[i].push(v);
        }
    }
    for (i, &x) in xs.iter().enumerate() {
        let fresh_i: Vec<f64> = fresh.iter().map(|row| row[i]).collect();
        let (d, p) = stats::ks_two_sample(&per_x[i], &fresh_i);
        report.push(SubTest::from_p(format!("ks_x_{x}"), d, p, level));
    }
    Ok(report)
}
