//! Exact stationarity statistics `(M, R, ζ, γ)` for the Hammersley, Poisson
//! lines, and SJ models, Monte Carlo certification of the MGF identity
//! `E[exp((a−b)·h^{a,b})] = exp(R(a,b))`, change-of-measure reweighting
//! checks, Taylor-remainder bound checks, exit-tail estimation, and the
//! coupled exit-point monotonicity check.
//!
//! Parameter conventions (all models): the two-sided stationary height
//! `h^{a,b}` uses boundary parameter `a` strictly left of the origin and `b`
//! from the origin rightward. Boundary one-unit increment means:
//! Hammersley / lines `e^a` (Poisson intensity), SJ `e^a/(1+e^a)`
//! (Bernoulli).

use crate::error::Error;
use crate::lpp::{LatticeEnvironment, SJEnvironment, WeightLaw};
use crate::processes::{
    sample_poisson_1d, sample_poisson_2d, sigmoid, CoupledBernoulliField, CoupledPointFamily,
};
use crate::report::{SubTest, TestReport};
use crate::rng::RngStream;
use crate::scaling::{beta_n, params_for, ModelKind};
use crate::stationary::{
    height_hammersley, height_lattice, height_lines, height_sj, DiscreteBoundary, MergedLines,
};
use crate::stats;
use crate::Result;
use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

/// Closed-form stationarity statistics of one model at fixed size, for a
/// parameter pair `(a, b)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EjsStats {
    /// `M(a)`: mean of the one-parameter stationary height.
    pub m_a: f64,
    /// `M(b)`.
    pub m_b: f64,
    /// `R(a,b) = ∫_b^a M(w) dw`.
    pub r: f64,
    /// Minimizer of `M` over the admissible half-line (`∞` on the SJ
    /// degenerate branch).
    pub zeta: f64,
    /// `γ = inf M = M(ζ)` (equals `m` on the SJ degenerate branch).
    pub gamma: f64,
}

/// One model instance at fixed size, for the exact-statistics block.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum EjsModel {
    Ham { t: f64, y: f64 },
    Lines { n: u64, y: f64 },
    Sj { n: u64, m: u64, p: f64 },
}

impl EjsModel {
    pub fn name(&self) -> &'static str {
        match self {
            EjsModel::Ham { .. } => "ham",
            EjsModel::Lines { .. } => "lines",
            EjsModel::Sj { .. } => "sj",
        }
    }

    /// Admissibility guard for a single parameter (lemma preconditions).
    pub fn check_param(&self, a: f64) -> Result<()> {
        match self {
            EjsModel::Ham { t, y } => {
                if !(*t > 0.0 && *y > 0.0) {
                    return Err(Error::parameter("Hammersley statistics need t, y > 0"));
                }
            }
            EjsModel::Lines { y, .. } => {
                if !(*y > 0.0) {
                    return Err(Error::parameter("lines statistics need y > 0"));
                }
                if !(a > 0.0) {
                    return Err(Error::parameter("lines statistics need a, b > 0"));
                }
            }
            EjsModel::Sj { p, .. } => {
                if !(0.0 < *p && *p < 1.0) {
                    return Err(Error::parameter("SJ requires 0 < p < 1"));
                }
                let lam = (1.0 - p) / p;
                if !(a > -lam.ln()) {
                    return Err(Error::parameter(
                        "SJ statistics need a, b > -log((1-p)/p)",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Mean stationary height `M(a)`.
    pub fn m(&self, a: f64) -> Result<f64> {
        self.check_param(a)?;
        Ok(match self {
            EjsModel::Ham { t, y } => a.exp() * y + (-a).exp() * t,
            EjsModel::Lines { n, y } => a.exp() * y + (*n as f64 + 1.0) / (a.exp() - 1.0),
            EjsModel::Sj { n, m, p } => {
                *m as f64 * sigmoid(a)
                    + (*n as f64 + 1.0) * p / ((1.0 - p) * a.exp() - p)
            }
        })
    }

    /// `R(a,b) = ∫_b^a M(w) dw` in closed form.
    pub fn r(&self, a: f64, b: f64) -> Result<f64> {
        self.check_param(a)?;
        self.check_param(b)?;
        Ok(match self {
            EjsModel::Ham { t, y } => (a.exp() - b.exp()) * y + ((-b).exp() - (-a).exp()) * t,
            EjsModel::Lines { n, y } => {
                (a.exp() - b.exp()) * y
                    + (*n as f64 + 1.0) * ((1.0 - (-a).exp()) / (1.0 - (-b).exp())).ln()
            }
            EjsModel::Sj { n, m, p } => {
                *m as f64 * ((1.0 + a.exp()) / (1.0 + b.exp())).ln()
                    + (*n as f64 + 1.0)
                        * ((((1.0 - p) * a.exp() - p) / ((1.0 - p) * b.exp() - p)).ln()
                            + (b - a))
            }
        })
    }

    /// `(ζ, γ)`: minimizer and minimum of `M` over the admissible half-line.
    pub fn zeta_gamma(&self) -> Result<(f64, f64)> {
        Ok(match self {
            EjsModel::Ham { t, y } => {
                if !(*t > 0.0 && *y > 0.0) {
                    return Err(Error::parameter("Hammersley statistics need t, y > 0"));
                }
                (0.5 * (t / y).ln(), 2.0 * (y * t).sqrt())
            }
            EjsModel::Lines { n, y } => {
                if !(*y > 0.0) {
                    return Err(Error::parameter("lines statistics need y > 0"));
                }
                let np1 = *n as f64 + 1.0;
                ((1.0 + (np1 / y).sqrt()).ln(), y + 2.0 * (np1 * y).sqrt())
            }
            EjsModel::Sj { n, m, p } => {
                let np1 = *n as f64 + 1.0;
                let mf = *m as f64;
                if mf / np1 <= p / (1.0 - p) {
                    // degenerate branch: M decreases to m as a → ∞
                    (f64::INFINITY, mf)
                } else {
                    let z = p + (np1 * p * (1.0 - p) / mf).sqrt();
                    let zeta = (z / (1.0 - z)).ln();
                    (zeta, mf * z + np1 * p * (1.0 - z) / (z - p))
                }
            }
        })
    }

    /// All four statistics at `(a, b)`.
    pub fn stats(&self, a: f64, b: f64) -> Result<EjsStats> {
        let (zeta, gamma) = self.zeta_gamma()?;
        Ok(EjsStats { m_a: self.m(a)?, m_b: self.m(b)?, r: self.r(a, b)?, zeta, gamma })
    }

    /// Cubic Taylor coefficient of `R` at `ζ`: `M''(ζ)/6` by a central
    /// second difference of the closed-form `M` (the expansion
    /// `R(a,b) = γ(a−b) + (M''(ζ)/6)((a−ζ)³ − (b−ζ)³) + O(ε⁴)` follows from
    /// `∂R/∂a = M(a)` and `M'(ζ) = 0`).
    pub fn cubic_coefficient(&self) -> Result<f64> {
        let (zeta, gamma) = self.zeta_gamma()?;
        if !zeta.is_finite() {
            return Err(Error::domain("degenerate branch has no Taylor expansion at ζ"));
        }
        let h = 1e-4 * zeta.abs().max(1.0);
        let m2 = (self.m(zeta + h)? - 2.0 * gamma + self.m(zeta - h)?) / (h * h);
        Ok(m2 / 6.0)
    }
}

/// Convenience constructors mirroring the per-model statistic blocks.
pub fn ham_stats(a: f64, b: f64, t: f64, y: f64) -> Result<EjsStats> {
    EjsModel::Ham { t, y }.stats(a, b)
}

pub fn lines_stats(a: f64, b: f64, n: u64, y: f64) -> Result<EjsStats> {
    EjsModel::Lines { n, y }.stats(a, b)
}

pub fn sj_stats(a: f64, b: f64, n: u64, m: u64, p: f64) -> Result<EjsStats> {
    EjsModel::Sj { n, m, p }.stats(a, b)
}

// ---------------------------------------------------------------------------
// MGF identity certification
// ---------------------------------------------------------------------------

/// One replica of the two-sided stationary height `h^{a,b}` with truncation
/// window `[-w, ·]`. Returns `(h, truncation_active)`.
fn two_sided_height(
    model: &EjsModel,
    a: f64,
    b: f64,
    w: f64,
    stream: RngStream,
    r: u32,
) -> Result<(f64, bool)> {
    let bd_stream = stream.substream(0x454a4244, r);
    let env_stream = stream.substream(0x454a454e, r);
    match model {
        EjsModel::Ham { t, y } => {
            let family = CoupledPointFamily::sample(a.max(b), (-w, *y), bd_stream)?;
            let nu = family.extract(a, b)?;
            let env = sample_poisson_2d(1.0, ((-w, *y), (0.0, *t)), env_stream)?;
            let prof = height_hammersley(&env, &nu, *t, &[*y])?;
            Ok((prof.h[0], prof.boundary_active[0]))
        }
        EjsModel::Lines { n, y } => {
            let family = CoupledPointFamily::sample(a.max(b), (-w, *y), bd_stream)?;
            let nu = family.extract(a, b)?;
            let env = MergedLines::sample(*n as usize + 1, (-w, *y), env_stream)?;
            let prof = height_lines(&env, &nu, &[*y])?;
            Ok((prof.h[0], prof.boundary_active[0]))
        }
        EjsModel::Sj { n, m, p } => {
            let lo = -(w.ceil() as i64);
            let field = CoupledBernoulliField::sample(lo + 1, *m as i64, bd_stream);
            let incr: Vec<f64> =
                field.extract_two_sided(a, b).into_iter().map(f64::from).collect();
            let f = DiscreteBoundary::from_incr(lo, incr)?;
            let env = SJEnvironment::sample((*m as i64 - lo) as usize, *n as usize + 1, *p, env_stream)?;
            let prof = height_sj(&env, &f, &[*m as i64])?;
            Ok((prof.h[0], prof.boundary_active[0]))
        }
    }
}

fn default_truncation(model: &EjsModel) -> f64 {
    match model {
        EjsModel::Ham { t, y } => 10.0 * (t + y),
        EjsModel::Lines { n, y } => 10.0 * (*n as f64 + 1.0 + y),
        EjsModel::Sj { n, m, .. } => 10.0 * (*n as f64 + 1.0 + *m as f64),
    }
}

/// Monte Carlo certification of `E[exp((a−b) h^{a,b})] = exp(R(a,b))`.
/// Compares in log space with a delta-method standard error and reports the
/// effective sample size. Aborts if more than 1% of replicas are
/// truncation-active.
pub fn mgf_verify(
    model: EjsModel,
    a: f64,
    b: f64,
    replicas: u32,
    stream: RngStream,
) -> Result<TestReport> {
    if replicas < 1000 {
        return Err(Error::parameter("mgf_verify needs at least 1000 replicas"));
    }
    let r_target = model.r(a, b)?;
    let w = default_truncation(&model);
    let rows: Vec<Result<(f64, bool)>> =
        crate::replicas::run_replicas(replicas, |r| two_sided_height(&model, a, b, w, stream, r));
    let mut weights = Vec::with_capacity(replicas as usize);
    let mut truncated = 0u32;
    for row in rows {
        let (h, active) = row?;
        if active {
            truncated += 1;
        }
        weights.push(((a - b) * h).exp());
    }
    if f64::from(truncated) > 0.01 * f64::from(replicas) {
        return Err(Error::domain(format!(
            "{truncated}/{replicas} replicas hit the truncation boundary; widen W beyond {w}"
        )));
    }
    let n = weights.len() as f64;
    let mean = weights.iter().sum::<f64>() / n;
    let var = weights.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se_log = (var / n).sqrt() / mean;
    let ess = weights.iter().sum::<f64>().powi(2) / weights.iter().map(|v| v * v).sum::<f64>();
    let diff = mean.ln() - r_target;
    let mut report = TestReport::new("verify_mgf")
        .param("model", model.name())
        .param("a", a)
        .param("b", b)
        .param("replicas", replicas)
        .param("R", r_target)
        .param("log_estimate", mean.ln())
        .param("ess", ess)
        .param("truncated", truncated);
    report.seeds.push(stream.seed);
    report.push(SubTest::exact("log_mgf_within_3se", diff / se_log.max(1e-300), diff.abs() <= 3.0 * se_log));
    Ok(report)
}

// ---------------------------------------------------------------------------
// change-of-measure reweighting checks
// ---------------------------------------------------------------------------

/// Poisson reweighting: sample `N ~ Poisson(e^b y)` and verify that the
/// factor `exp(e^b y − e^a y + (a−b)N)` transports the law to intensity
/// `e^a` (weighted mean of `N` equals `e^a y`, weights average to 1).
pub fn reweight_poisson_check(
    a: f64,
    b: f64,
    y: f64,
    replicas: u32,
    stream: RngStream,
) -> Result<TestReport> {
    if !(y > 0.0) {
        return Err(Error::parameter("reweighting window must have positive length"));
    }
    let mut rng = stream.rng();
    let lam_b = b.exp() * y;
    let lam_a = a.exp() * y;
    let pois = rand_distr::Poisson::new(lam_b).map_err(|_| Error::parameter("bad intensity"))?;
    let mut w = Vec::with_capacity(replicas as usize);
    let mut wn = Vec::with_capacity(replicas as usize);
    for _ in 0..replicas {
        let count: f64 = pois.sample(&mut rng);
        let weight = (b.exp() * y - a.exp() * y + (a - b) * count).exp();
        w.push(weight);
        wn.push(weight * count);
    }
    finish_reweight("verify_burke_poisson", stream, w, wn, lam_a, replicas)
        .map(|rep| rep.param("a", a).param("b", b).param("y", y))
}

/// Bernoulli reweighting: sample `m` i.i.d. `Ber(u)` and verify the factor
/// `((1−w)/(1−u))^{m−S} (w/u)^S` transports the law to `Ber(w)` (weighted
/// success frequency equals `w`).
pub fn reweight_bernoulli_check(
    u: f64,
    w_target: f64,
    m: u64,
    replicas: u32,
    stream: RngStream,
) -> Result<TestReport> {
    if !(0.0 < u && u < 1.0 && 0.0 < w_target && w_target < 1.0) {
        return Err(Error::parameter("Bernoulli parameters must lie in (0,1)"));
    }
    let mut rng = stream.rng();
    let mut wts = Vec::with_capacity(replicas as usize);
    let mut wf = Vec::with_capacity(replicas as usize);
    for _ in 0..replicas {
        let s = (0..m).filter(|_| rng.gen::<f64>() < u).count() as f64;
        let weight = (w_target / u).powf(s)
            * ((1.0 - w_target) / (1.0 - u)).powf(m as f64 - s);
        wts.push(weight);
        wf.push(weight * s / m as f64);
    }
    finish_reweight("verify_burke_bernoulli", stream, wts, wf, w_target, replicas)
        .map(|rep| rep.param("u", u).param("w", w_target).param("m", m))
}

fn finish_reweight(
    name: &str,
    stream: RngStream,
    w: Vec<f64>,
    wx: Vec<f64>,
    target: f64,
    replicas: u32,
) -> Result<TestReport> {
    let n = w.len() as f64;
    let ess = w.iter().sum::<f64>().powi(2) / w.iter().map(|v| v * v).sum::<f64>();
    // NaN (all weights underflowed) counts as degenerate
    if !(ess >= 100.0) {
        return Err(Error::domain(format!(
            "weight degeneracy: effective sample size {ess:.1} < 100"
        )));
    }
    let mut report = TestReport::new(name).param("replicas", replicas).param("ess", ess);
    report.seeds.push(stream.seed);
    for (label, xs, tgt) in [("weighted_mean", &wx, target), ("weight_normalization", &w, 1.0)] {
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let diff = mean - tgt;
        // a.s.-constant cases (a=b) have se = 0; then require exactness
        let pass = if se == 0.0 { diff == 0.0 } else { diff.abs() <= 3.0 * se };
        report.push(SubTest::exact(label, diff / se.max(1e-300), pass));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Taylor remainder bound
// ---------------------------------------------------------------------------

/// Fitted remainder constant on the `ε`-box `[ζ−ε, ζ+ε]²`:
/// `max |R − γ(a−b) − c((a−ζ)³ − (b−ζ)³)| / (γ((a−ζ)⁴ + (b−ζ)⁴))`.
fn fitted_constant(model: &EjsModel, zeta: f64, gamma: f64, c: f64, eps: f64) -> Result<f64> {
    let offsets = [-1.0, -0.6, -0.3, 0.3, 0.6, 1.0];
    let mut cmax: f64 = 0.0;
    for &da in &offsets {
        for &db in &offsets {
            let (a, b) = (zeta + da * eps, zeta + db * eps);
            let rem = (model.r(a, b)?
                - gamma * (a - b)
                - c * ((a - zeta).powi(3) - (b - zeta).powi(3)))
            .abs();
            let quartic = gamma * ((a - zeta).powi(4) + (b - zeta).powi(4));
            cmax = cmax.max(rem / quartic);
        }
    }
    Ok(cmax)
}

/// Remainder-bound check: on shrinking `ε`-boxes around `ζ`, the fitted
/// constant `Ĉ(ε)` stays finite and stable under refinement
/// `ε → ε/2 → ε/4` (a wrong cubic coefficient makes `Ĉ` scale like `1/ε`).
/// Refuses parameters outside the lemma boxes (lines: needs `ζ − ε > 0`;
/// SJ: `ζ − ε > −log λ` and a non-degenerate direction).
pub fn taylor_bound_check(model: EjsModel, eps0: f64) -> Result<TestReport> {
    if !(eps0 > 0.0) {
        return Err(Error::parameter("eps0 must be positive"));
    }
    let (zeta, gamma) = model.zeta_gamma()?;
    if !zeta.is_finite() {
        return Err(Error::domain("degenerate branch: no expansion point"));
    }
    // refusal when the requested box leaves the lemma's admissible region
    model.check_param(zeta - eps0).map_err(|_| {
        Error::parameter(format!("eps-box [ζ−ε, ζ+ε] with ε={eps0} leaves the admissible region"))
    })?;
    let c = model.cubic_coefficient()?;
    let epss = [eps0, eps0 / 2.0, eps0 / 4.0];
    let cs: Vec<f64> = epss
        .iter()
        .map(|&e| fitted_constant(&model, zeta, gamma, c, e))
        .collect::<Result<_>>()?;
    let mut report = TestReport::new("verify_taylor")
        .param("model", model.name())
        .param("zeta", zeta)
        .param("gamma", gamma)
        .param("cubic_coefficient", c)
        .param("eps_grid", format!("{epss:?}"))
        .param("fitted_constants", format!("{cs:?}"));
    let cmax = cs.iter().cloned().fold(0.0_f64, f64::max);
    report.push(SubTest::exact("constant_finite", cmax, cmax.is_finite()));
    // a wrong cubic coefficient makes Ĉ(ε) grow like 1/ε under refinement;
    // a correct one keeps it bounded (it may shrink when the quartic Taylor
    // term vanishes, as for Hammersley at ζ = 0)
    let growth = cs
        .windows(2)
        .map(|w| w[1] / w[0].max(1e-300))
        .fold(0.0_f64, f64::max);
    report.push(SubTest::exact(
        "constant_stable_under_refinement",
        growth,
        cmax.is_finite() && growth <= 1.2,
    ));
    // exact structural checks
    let a = zeta + eps0 / 3.0;
    let b = zeta - eps0 / 5.0;
    let cubic = |a: f64, b: f64| c * ((a - zeta).powi(3) - (b - zeta).powi(3));
    report.push(SubTest::exact(
        "cubic_antisymmetry",
        (cubic(a, b) + cubic(b, a)).abs(),
        cubic(a, b) + cubic(b, a) == 0.0,
    ));
    let r_sym = model.r(a, b)? + model.r(b, a)?;
    report.push(SubTest::exact(
        "r_antisymmetry",
        r_sym.abs(),
        r_sym.abs() <= 1e-10 * gamma.max(1.0),
    ));
    report.push(SubTest::exact("zero_at_center", model.r(zeta, zeta)?, model.r(zeta, zeta)? == 0.0));
    Ok(report)
}

// ---------------------------------------------------------------------------
// exit tails
// ---------------------------------------------------------------------------

/// One row of the exit-tail table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailRow {
    pub model: String,
    pub n: u64,
    pub m: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub exceed: u64,
    pub trials: u64,
}

/// Exit-tail table plus the fitted `log p` vs `M³` slope per `N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailTable {
    pub rows: Vec<TailRow>,
    /// `(N, slope)`; slope present only when ≥ 2 rows have exceedances.
    pub slopes: Vec<(u64, Option<f64>)>,
}

impl TailTable {
    pub fn to_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["model", "N", "M", "p_hat", "ci_lo", "ci_hi"])?;
        for r in &self.rows {
            wtr.write_record(&[
                r.model.clone(),
                r.n.to_string(),
                r.m.to_string(),
                r.p_hat.to_string(),
                r.ci_lo.to_string(),
                r.ci_hi.to_string(),
            ])?;
        }
        wtr.flush().map_err(Error::Io)?;
        Ok(())
    }
}

/// One replica's rightmost exit point `Z` (model units) at the
/// characteristic endpoint `(tρN (+ drift window), tN)` under a stationary
/// boundary of one-unit increment mean `beta`.
fn exit_z(
    model: &ModelKind,
    rho: f64,
    beta: f64,
    t: f64,
    n: u64,
    w: f64,
    stream: RngStream,
    r: u32,
) -> Result<(f64, bool)> {
    let bd_stream = stream.substream(0x58424421, r);
    let env_stream = stream.substream(0x58454e56, r);
    let rows = ((t * n as f64).floor() as usize).max(1);
    match model {
        ModelKind::Hammersley => {
            let yq = t * rho * n as f64;
            let nu = sample_poisson_1d(beta, (-w, yq), bd_stream)?;
            let env = sample_poisson_2d(1.0, ((-w, yq), (0.0, t * n as f64)), env_stream)?;
            let prof = height_hammersley(&env, &nu, t * n as f64, &[yq])?;
            Ok((prof.z[0], prof.boundary_active[0]))
        }
        ModelKind::PoissonLines => {
            let yq = t * rho * n as f64;
            let nu = sample_poisson_1d(beta, (-w, yq), bd_stream)?;
            let env = MergedLines::sample(rows, (-w, yq), env_stream)?;
            let prof = height_lines(&env, &nu, &[yq])?;
            Ok((prof.z[0], prof.boundary_active[0]))
        }
        ModelKind::Sj { p } => {
            let yq = (t * rho * n as f64).floor() as i64;
            let lo = -(w.ceil() as i64);
            let f = DiscreteBoundary::sample_bernoulli(beta, lo, yq, bd_stream)?;
            let env = SJEnvironment::sample((yq - lo) as usize, rows, *p, env_stream)?;
            let prof = height_sj(&env, &f, &[yq])?;
            Ok((prof.z[0], prof.boundary_active[0]))
        }
        ModelKind::Exponential | ModelKind::Geometric { .. } => {
            let yq = (t * rho * n as f64).floor() as i64;
            let lo = -(w.ceil() as i64);
            let (f, law) = match model {
                ModelKind::Exponential => {
                    (DiscreteBoundary::sample_exp(beta, lo, yq, bd_stream)?, WeightLaw::ExpUnit)
                }
                ModelKind::Geometric { mean } => (
                    DiscreteBoundary::sample_geom(beta, lo, yq, bd_stream)?,
                    WeightLaw::Geom { mean: *mean },
                ),
                _ => unreachable!(),
            };
            let env = LatticeEnvironment::sample((yq - lo + 1) as usize, rows, law, env_stream)?;
            let prof = height_lattice(&env, &f, &[yq])?;
            Ok((prof.z[0], prof.boundary_active[0]))
        }
        ModelKind::Blpp => Err(Error::parameter("exit tails are not provided for BLPP")),
    }
}

/// Empirical exit-tail table: `P(|Z| > M·N^{2/3})` over the `(N, M)` grid
/// with Wilson confidence intervals, and the `log p` vs `M³` slope per `N`.
#[allow(clippy::too_many_arguments)]
pub fn exit_tail_estimate(
    model: ModelKind,
    rho: f64,
    mu: f64,
    t: f64,
    ns: &[u64],
    ms: &[f64],
    replicas: u32,
    stream: RngStream,
) -> Result<TailTable> {
    let sp = params_for(model, rho)?;
    if !(t > 0.0) {
        return Err(Error::parameter("t must be positive"));
    }
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    let m_max = ms.iter().cloned().fold(0.0_f64, f64::max);
    for &n in ns {
        let beta = beta_n(&sp, mu, n);
        let n23 = (n as f64).powf(2.0 / 3.0);
        // window covers the largest threshold plus the exit fluctuation scale
        let w = ((m_max + 1.0 + 6.0 * sp.tau) * n23).ceil();
        let zs: Vec<Result<(f64, bool)>> = crate::replicas::run_replicas(replicas, |r| {
            exit_z(&model, rho, beta, t, n, w, stream, r)
        });
        let mut abs_z = Vec::with_capacity(replicas as usize);
        let mut truncated = 0u32;
        for z in zs {
            let (z, active) = z?;
            if active {
                truncated += 1;
            }
            abs_z.push(z.abs());
        }
        if f64::from(truncated) > 0.01 * f64::from(replicas) {
            return Err(Error::domain(format!(
                "{truncated}/{replicas} exit replicas hit the truncation boundary at N={n}"
            )));
        }
        let mut fit_pts = Vec::new();
        for &m in ms {
            let thresh = m * n23;
            // nested indicators: exceedance counts are automatically
            // nonincreasing in M within a replica set; M = 0 is the whole
            // sample space (lattice exits can sit exactly at the origin)
            let exceed = if m == 0.0 {
                abs_z.len() as u64
            } else {
                abs_z.iter().filter(|&&z| z > thresh).count() as u64
            };
            let trials = abs_z.len() as u64;
            let p_hat = exceed as f64 / trials as f64;
            let (ci_lo, ci_hi) = stats::wilson_interval(exceed, trials, 0.05);
            rows.push(TailRow {
                model: model.name().to_string(),
                n,
                m,
                p_hat,
                ci_lo,
                ci_hi,
                exceed,
                trials,
            });
            if exceed > 0 && p_hat < 1.0 && m > 0.0 {
                fit_pts.push((m.powi(3), p_hat.ln()));
            }
        }
        slopes.push((n, ls_slope(&fit_pts)));
    }
    Ok(TailTable { rows, slopes })
}

fn ls_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    if sxx > 0.0 {
        Some(sxy / sxx)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// coupled exit-point monotonicity
// ---------------------------------------------------------------------------

/// Coupled exit monotonicity: with `a' ≤ a`, `b' ≤ b` and the boundary
/// processes coupled monotonically over a shared environment,
/// `Z^{a',b'} ≤ Z^{a,b}` must hold exactly in every sample (raising either
/// parameter adds boundary points, which pulls the rightmost exit point
/// rightward). Supports the Hammersley (Poisson coupling) and SJ (Bernoulli
/// coupling) models.
#[allow(clippy::too_many_arguments)]
pub fn exit_coupling_check(
    model: EjsModel,
    a: f64,
    b: f64,
    a2: f64,
    b2: f64,
    replicas: u32,
    stream: RngStream,
) -> Result<TestReport> {
    if a2 > a || b2 > b {
        return Err(Error::parameter("coupling check needs a' ≤ a and b' ≤ b"));
    }
    let w = default_truncation(&model);
    let results: Vec<Result<bool>> = crate::replicas::run_replicas(replicas, |r| {
        let bd_stream = stream.substream(0x43504244, r);
        let env_stream = stream.substream(0x4350454e, r);
        match &model {
            EjsModel::Ham { t, y } => {
                let family = CoupledPointFamily::sample(a.max(b), (-w, *y), bd_stream)?;
                let env = sample_poisson_2d(1.0, ((-w, *y), (0.0, *t)), env_stream)?;
                let hi = height_hammersley(&env, &family.extract(a, b)?, *t, &[*y])?;
                let lo = height_hammersley(&env, &family.extract(a2, b2)?, *t, &[*y])?;
                Ok(lo.z[0] <= hi.z[0])
            }
            EjsModel::Sj { n, m, p } => {
                let lo_i = -(w.ceil() as i64);
                let field = CoupledBernoulliField::sample(lo_i + 1, *m as i64, bd_stream);
                let env =
                    SJEnvironment::sample((*m as i64 - lo_i) as usize, *n as usize + 1, *p, env_stream)?;
                let mk = |aa: f64, bb: f64| -> Result<f64> {
                    let incr: Vec<f64> =
                        field.extract_two_sided(aa, bb).into_iter().map(f64::from).collect();
                    let f = DiscreteBoundary::from_incr(lo_i, incr)?;
                    Ok(height_sj(&env, &f, &[*m as i64])?.z[0])
                };
                Ok(mk(a2, b2)? <= mk(a, b)?)
            }
            EjsModel::Lines { .. } => {
                Err(Error::parameter("coupled exit check covers Hammersley and SJ"))
            }
        }
    });
    let mut ok = 0u32;
    for r in results {
        if r? {
            ok += 1;
        }
    }
    let mut report = TestReport::new("exit_coupling")
        .param("model", model.name())
        .param("a", a)
        .param("b", b)
        .param("a_prime", a2)
        .param("b_prime", b2)
        .param("replicas", replicas);
    report.seeds.push(stream.seed);
    report.push(SubTest::exact("monotone_every_sample", f64::from(ok), ok == replicas));
    Ok(report)
}
