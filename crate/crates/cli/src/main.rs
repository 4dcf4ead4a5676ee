//! `lppkit` — verification suites for exactly solvable LPP models with
//! stationary boundary data.
//!
//! Every subcommand writes three kinds of artifact into the output
//! directory: a `manifest.json` reproducibility record, a `report.json`
//! test report (`{test, params, sub_tests, seeds}`), and raw CSV data where
//! the subcommand produces samples. Exit codes: 0 all configured checks
//! pass, 1 statistical failure, 2 usage/config error.
//!
//! Randomness: a master `--seed` feeds the library's `(domain, replica)`
//! substream schedule, so replays are byte-identical and adding replicas to
//! one component never perturbs another. `LPPKIT_SEED` and `LPPKIT_OUT`
//! environment variables override the corresponding flags.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{load_config, parse_model_kind, SuiteConfig};
use lppkit::ejs::{exit_tail_estimate, mgf_verify, taylor_bound_check, EjsModel};
use lppkit::{Error, Result};
use lppkit::lpp::{
    self, blpp, hammersley_lpp, lattice_lpp, lines_lpp, sj_lpp, BrownianField,
    LatticeEnvironment, LineField, PassageQuery, SJEnvironment, WeightLaw,
};
use lppkit::processes::{poisson_sorted, sample_poisson_1d, sample_poisson_2d, PlanarPointSet};
use lppkit::queues::{burke_bernoulli_test, burke_poisson_test, pitman_check};
use lppkit::report::{ExperimentManifest, SubTest, TestReport};
use lppkit::rng::RngStream;
use lppkit::scaling::{
    invariance_test, params_for, params_residual, rescaled_busemann_samples, ModelKind,
};
use lppkit::stationary::eta_identity_check;
use rand::Rng;
use std::path::PathBuf;

// Stream domain tags used by the CLI itself (library verifiers allocate
// their own domains internally; these cover sampling done directly here).
const DOMAIN_SAMPLE: u32 = 0x434c5350; // point-set samples
const DOMAIN_PITMAN: u32 = 0x434c5054; // pitman replicas
const DOMAIN_FLUID_NU: u32 = 0x434c464e; // fluid-identity boundary
const DOMAIN_FLUID_ENV: u32 = 0x434c4645; // fluid-identity environment
const DOMAIN_ORACLE: u32 = 0x434c4f52; // oracle-suite instances

#[derive(Parser)]
#[command(
    name = "lppkit",
    version,
    about = "Verification suites for exactly solvable LPP models",
    propagate_version = true
)]
struct Cli {
    /// Master seed (overridden by LPPKIT_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for manifest/report/CSV artifacts (overridden by
    /// LPPKIT_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Optional JSON config file supplying defaults (seed, out_dir, level,
    /// replicas); validated before anything runs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Significance level for statistical sub-tests.
    #[arg(long, global = true)]
    level: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

/// Flags selecting one of the six rescaling-capable models.
#[derive(Args, Clone)]
struct ModelArgs {
    /// Model: hammersley | poisson_lines | sj | exponential | geometric | blpp
    #[arg(long)]
    model: String,
    /// Direction/density parameter ρ.
    #[arg(long)]
    rho: f64,
    /// SJ site probability p (required iff --model sj).
    #[arg(long)]
    p: Option<f64>,
    /// Geometric weight mean (required iff --model geometric).
    #[arg(long)]
    mean: Option<f64>,
}

impl ModelArgs {
    fn kind(&self) -> Result<ModelKind> {
        parse_model_kind(&self.model, self.p, self.mean)
    }
}

/// Flags selecting an EJS-statistics model with its geometry.
#[derive(Args, Clone)]
struct EjsArgs {
    /// Model: ham | lines | sj
    #[arg(long)]
    model: String,
    /// Hammersley: time horizon t.
    #[arg(long)]
    t: Option<f64>,
    /// Hammersley/lines: spatial coordinate y.
    #[arg(long)]
    y: Option<f64>,
    /// Lines/SJ: level index n.
    #[arg(long)]
    n: Option<u64>,
    /// SJ: spatial coordinate m.
    #[arg(long)]
    m: Option<u64>,
    /// SJ: site probability p.
    #[arg(long)]
    p: Option<f64>,
}

impl EjsArgs {
    fn model(&self) -> Result<EjsModel> {
        fn need<T: Copy>(v: Option<T>, key: &str, model: &str) -> Result<T> {
            v.ok_or_else(|| Error::Config(format!("model {model:?} requires --{key}")))
        }
        Ok(match self.model.as_str() {
            "ham" => EjsModel::Ham {
                t: need(self.t, "t", "ham")?,
                y: need(self.y, "y", "ham")?,
            },
            "lines" => EjsModel::Lines {
                n: need(self.n, "n", "lines")?,
                y: need(self.y, "y", "lines")?,
            },
            "sj" => EjsModel::Sj {
                n: need(self.n, "n", "sj")?,
                m: need(self.m, "m", "sj")?,
                p: need(self.p, "p", "sj")?,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown model {other:?}; expected ham, lines or sj"
                )))
            }
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the KPZ scaling parameters (χ, α, β, τ) for a model at ρ.
    Params(ModelArgs),
    /// Sample stationary boundary point sets (Poisson) and write them as
    /// CSV (header `x`) or JSON ({"window": [lo, hi], "points": [...]}).
    Sample {
        /// Poisson intensity.
        #[arg(long, default_value_t = 1.0)]
        intensity: f64,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        hi: f64,
        /// Number of independent point sets to draw.
        #[arg(long, default_value_t = 1)]
        replicas: u32,
        /// Output format: csv | json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Burke theorem for the stationary queue: Poisson (λ < μ) or
    /// Bernoulli (p < u) servers.
    VerifyBurke {
        /// Queue type: poisson | bernoulli
        #[arg(long, default_value = "poisson")]
        queue: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 2.0)]
        mu: f64,
        /// Bernoulli arrival probability.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Bernoulli service probability.
        #[arg(long, default_value_t = 0.6)]
        u: f64,
        #[arg(long, default_value_t = 10_000)]
        replicas: u32,
        /// Left edge of the simulation window (burn-in region).
        #[arg(long, default_value_t = -200.0, allow_hyphen_values = true)]
        window_lo: f64,
    },
    /// Pitman's 2M−X identity for M/M/1-type sample paths: exact on every
    /// conclusive replica.
    VerifyPitman {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 2.0)]
        mu: f64,
        #[arg(long, default_value_t = 40.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u32,
    },
    /// EJS–Rains MGF identity E[exp((a−b) h^{a,b})] = exp(R(a,b)).
    VerifyMgf {
        #[command(flatten)]
        model: EjsArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u32,
    },
    /// Hammersley fluid identity h(t, y; ν) = ν(y) + η on conclusive
    /// replicas, both sides computed independently.
    VerifyFluid {
        /// Boundary (ν) intensity.
        #[arg(long, default_value_t = 1.2)]
        nu_intensity: f64,
        #[arg(long, default_value_t = -30.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 5.0)]
        y: f64,
        #[arg(long, default_value_t = 6.0)]
        t: f64,
        /// Number of conclusive samples required.
        #[arg(long, default_value_t = 1000)]
        samples: u32,
    },
    /// Cubic Taylor control of R near ζ: fitted quartic-remainder constant
    /// is finite and stable under ε-refinement.
    VerifyTaylor {
        #[command(flatten)]
        model: EjsArgs,
        /// Half-width of the box [ζ−ε, ζ+ε].
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Exit-point tail table P(|Z| > M·N^{2/3}) with Wilson intervals and
    /// the least-squares slope of log p against M³.
    ExitTails {
        #[command(flatten)]
        model: ModelArgs,
        /// Boundary tilt μ.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu: f64,
        /// Macroscopic time horizon.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Scale parameters N (repeatable).
        #[arg(long = "n", required = true)]
        ns: Vec<u64>,
        /// Exit thresholds M in units of N^{2/3} (repeatable).
        #[arg(long = "m", default_values_t = [0.5, 1.0, 2.0, 3.0])]
        ms: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        replicas: u32,
    },
    /// Finite-N joint invariance: evolved boundary increments are
    /// distributed as fresh boundary increments (two-sample KS per x).
    ShInvariance {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu: f64,
        /// Scale parameter N.
        #[arg(long, default_value_t = 200)]
        n: u64,
        /// Rescaled query points (repeatable).
        #[arg(long = "x", default_values_t = [-1.0, 1.0], allow_hyphen_values = true)]
        xs: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        replicas: u32,
    },
    /// Brownian marginal of the rescaled Busemann process (exponential
    /// model): mean 2μx within 3·SE, variance within 10% of 2|x|.
    ShMarginal {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 4000)]
        replicas: u32,
    },
    /// Production passage-time kernels against brute-force oracles on small
    /// random instances: exact agreement required.
    OracleSuite {
        /// Instances per model.
        #[arg(long, default_value_t = 200)]
        cases: u32,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

/// Global options after merging config-file defaults and env overrides.
struct Globals {
    seed: u64,
    out: PathBuf,
    level: f64,
}

fn resolve_globals(cli: &Cli) -> Result<Globals> {
    let cfg: SuiteConfig = match &cli.config {
        Some(p) => load_config(p)?,
        None => SuiteConfig::default(),
    };
    let env_seed = match std::env::var("LPPKIT_SEED") {
        Ok(s) => Some(
            s.parse::<u64>()
                .map_err(|_| Error::Config(format!("LPPKIT_SEED must be a u64, got {s:?}")))?,
        ),
        Err(_) => None,
    };
    let env_out = std::env::var("LPPKIT_OUT").ok().map(PathBuf::from);
    let seed = env_seed.or(cli.seed).or(cfg.seed).unwrap_or(0);
    let out = env_out
        .or_else(|| cli.out.clone())
        .or_else(|| cfg.out_dir.as_deref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("lppkit-out"));
    let level = cli.level.or(cfg.level).unwrap_or(0.01);
    if !(0.0 < level && level < 1.0) {
        return Err(Error::Config(format!("level must lie in (0,1), got {level}")));
    }
    Ok(Globals { seed, out, level })
}

fn run(cli: Cli) -> Result<bool> {
    let g = resolve_globals(&cli)?;
    std::fs::create_dir_all(&g.out)?;
    match &cli.command {
        Command::Params(m) => cmd_params(&g, m),
        Command::Sample { intensity, lo, hi, replicas, format } => {
            cmd_sample(&g, *intensity, (*lo, *hi), *replicas, format)
        }
        Command::VerifyBurke { queue, lambda, mu, p, u, replicas, window_lo } => {
            cmd_burke(&g, queue, *lambda, *mu, *p, *u, *replicas, *window_lo)
        }
        Command::VerifyPitman { lambda, mu, horizon, samples } => {
            cmd_pitman(&g, *lambda, *mu, *horizon, *samples)
        }
        Command::VerifyMgf { model, a, b, replicas } => cmd_mgf(&g, model, *a, *b, *replicas),
        Command::VerifyFluid { nu_intensity, lo, hi, y, t, samples } => {
            cmd_fluid(&g, *nu_intensity, (*lo, *hi), *y, *t, *samples)
        }
        Command::VerifyTaylor { model, eps } => cmd_taylor(&g, model, *eps),
        Command::ExitTails { model, mu, t, ns, ms, replicas } => {
            cmd_exit_tails(&g, model, *mu, *t, ns, ms, *replicas)
        }
        Command::ShInvariance { model, mu, n, xs, replicas } => {
            cmd_invariance(&g, model, *mu, *n, xs, *replicas)
        }
        Command::ShMarginal { mu, n, x, replicas } => cmd_marginal(&g, *mu, *n, *x, *replicas),
        Command::OracleSuite { cases } => cmd_oracle(&g, *cases),
    }
}

/// Write `report.json` and a finished `manifest.json`; return `all_pass`.
fn emit(
    g: &Globals,
    mut manifest: ExperimentManifest,
    report: &TestReport,
    extra: &[(&str, &[u8])],
) -> Result<bool> {
    let report_bytes = serde_json::to_vec_pretty(report)?;
    std::fs::write(g.out.join("report.json"), &report_bytes)?;
    manifest.digest_output("report.json", &report_bytes);
    for (name, bytes) in extra {
        std::fs::write(g.out.join(name), bytes)?;
        manifest.digest_output(name, bytes);
    }
    manifest.finish();
    std::fs::write(g.out.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
    // one line per sub-test on stdout; the JSON report carries the details
    for s in &report.sub_tests {
        println!(
            "{} {}: {}",
            report.test,
            s.name,
            if s.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(report.all_pass())
}

fn manifest_for(command: &str, config: serde_json::Value, seed: u64) -> ExperimentManifest {
    ExperimentManifest::new(command, config, seed)
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_params(g: &Globals, m: &ModelArgs) -> Result<bool> {
    let kind = m.kind()?;
    let sp = params_for(kind, m.rho)?;
    let payload = serde_json::json!({
        "model": kind,
        "rho": sp.rho,
        "chi3": sp.chi.powi(3),
        "chi": sp.chi,
        "alpha": sp.alpha,
        "beta": sp.beta,
        "tau": sp.tau,
        "residual": params_residual(&sp),
    });
    println!("{}", serde_json::to_string_pretty(&payload)?);
    let mut report = TestReport::new("params")
        .param("model", serde_json::to_value(kind)?)
        .param("rho", m.rho);
    report.push(SubTest::exact("residual_below_1e12", params_residual(&sp), params_residual(&sp) < 1e-12));
    let manifest = manifest_for("params", payload, g.seed);
    emit(g, manifest, &report, &[])
}

fn cmd_sample(
    g: &Globals,
    intensity: f64,
    window: (f64, f64),
    replicas: u32,
    format: &str,
) -> Result<bool> {
    if format != "csv" && format != "json" {
        return Err(Error::Config(format!("unknown format {format:?}; expected csv or json")));
    }
    let cfg = serde_json::json!({
        "intensity": intensity, "window": [window.0, window.1],
        "replicas": replicas, "format": format,
    });
    let mut manifest = manifest_for("sample", cfg, g.seed);
    manifest.allocate("points", DOMAIN_SAMPLE, replicas);
    let base = RngStream::new(g.seed);
    let mut outputs: Vec<(String, Vec<u8>)> = Vec::new();
    for r in 0..replicas {
        let ps = sample_poisson_1d(intensity, window, base.substream(DOMAIN_SAMPLE, r))?;
        let (name, bytes) = if format == "csv" {
            let mut buf = Vec::new();
            ps.to_csv(&mut buf)?;
            (format!("points_{r}.csv"), buf)
        } else {
            (format!("points_{r}.json"), serde_json::to_vec_pretty(&ps.to_json())?)
        };
        outputs.push((name, bytes));
    }
    let mut report = TestReport::new("sample").param("intensity", intensity);
    report.seeds.push(g.seed);
    report.push(SubTest::exact("sampled", replicas as f64, true));
    let refs: Vec<(&str, &[u8])> =
        outputs.iter().map(|(n, b)| (n.as_str(), b.as_slice())).collect();
    emit(g, manifest, &report, &refs)
}

#[allow(clippy::too_many_arguments)]
fn cmd_burke(
    g: &Globals,
    queue: &str,
    lambda: f64,
    mu: f64,
    p: f64,
    u: f64,
    replicas: u32,
    window_lo: f64,
) -> Result<bool> {
    if window_lo >= -10.0 {
        return Err(Error::Config(format!(
            "--window-lo must be below -10 to leave a burn-in region, got {window_lo}"
        )));
    }
    let stream = RngStream::new(g.seed);
    let mut report = match queue {
        "poisson" => burke_poisson_test(lambda, mu, (window_lo, 10.0), replicas, stream, g.level)?,
        "bernoulli" => {
            burke_bernoulli_test(p, u, (window_lo.floor() as i64, 10), replicas, stream, g.level)?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown queue {other:?}; expected poisson or bernoulli"
            )))
        }
    };
    report.seeds.push(g.seed);
    let cfg = serde_json::json!({
        "queue": queue, "lambda": lambda, "mu": mu, "p": p, "u": u,
        "replicas": replicas, "level": g.level,
    });
    let manifest = manifest_for("verify-burke", cfg, g.seed);
    emit(g, manifest, &report, &[])
}

fn cmd_pitman(g: &Globals, lambda: f64, mu: f64, horizon: f64, samples: u32) -> Result<bool> {
    if !(0.0 < lambda && lambda < mu) {
        return Err(Error::parameter(format!(
            "Pitman check requires 0 < lambda < mu, got lambda={lambda}, mu={mu}"
        )));
    }
    let base = RngStream::new(g.seed);
    let mut defects = 0u32;
    let mut worst = 0.0f64;
    for r in 0..samples {
        let mut rng = base.substream(DOMAIN_PITMAN, r).rng();
        let arrivals = poisson_sorted(&mut rng, lambda, (0.0, horizon));
        let services = poisson_sorted(&mut rng, mu, (0.0, horizon));
        let out = pitman_check(&arrivals, &services, 0.0);
        if !out.holds {
            defects += 1;
            worst = worst.max(out.max_defect as f64);
        }
    }
    let mut report = TestReport::new("verify_pitman")
        .param("lambda", lambda)
        .param("mu", mu)
        .param("samples", samples);
    report.seeds.push(g.seed);
    report.push(SubTest::exact("zero_defects", defects as f64, defects == 0));
    report.push(SubTest::exact("max_defect", worst, defects == 0));
    let cfg = serde_json::json!({
        "lambda": lambda, "mu": mu, "horizon": horizon, "samples": samples,
    });
    let mut manifest = manifest_for("verify-pitman", cfg, g.seed);
    manifest.allocate("pitman", DOMAIN_PITMAN, samples);
    emit(g, manifest, &report, &[])
}

fn cmd_mgf(g: &Globals, model: &EjsArgs, a: f64, b: f64, replicas: u32) -> Result<bool> {
    let m = model.model()?;
    let mut report = mgf_verify(m, a, b, replicas, RngStream::new(g.seed))?;
    report.seeds.push(g.seed);
    let cfg = serde_json::json!({
        "model": model.model, "a": a, "b": b, "replicas": replicas,
    });
    let manifest = manifest_for("verify-mgf", cfg, g.seed);
    emit(g, manifest, &report, &[])
}

fn cmd_fluid(
    g: &Globals,
    nu_intensity: f64,
    window: (f64, f64),
    y: f64,
    t: f64,
    samples: u32,
) -> Result<bool> {
    if !(window.0 < 0.0 && window.0 < y && y <= window.1 && t > 0.0) {
        return Err(Error::parameter(
            "fluid check needs lo < 0, lo < y <= hi and t > 0",
        ));
    }
    let base = RngStream::new(g.seed);
    let mut conclusive = 0u32;
    let mut defects = 0u32;
    let mut r = 0u32;
    let budget = samples.saturating_mul(100).max(samples);
    while conclusive < samples && r < budget {
        let nu = sample_poisson_1d(nu_intensity, window, base.substream(DOMAIN_FLUID_NU, r))?;
        let env = sample_poisson_2d(1.0, (window, (0.0, t)), base.substream(DOMAIN_FLUID_ENV, r))?;
        r += 1;
        if let Some(ok) = eta_identity_check(&nu, &env, y, t) {
            conclusive += 1;
            if !ok {
                defects += 1;
            }
        }
    }
    if conclusive < samples {
        return Err(Error::refusal(format!(
            "only {conclusive}/{samples} conclusive fluid samples within {budget} attempts; \
             widen the window"
        )));
    }
    let mut report = TestReport::new("verify_fluid")
        .param("nu_intensity", nu_intensity)
        .param("y", y)
        .param("t", t)
        .param("samples", samples);
    report.seeds.push(g.seed);
    report.push(SubTest::exact("zero_defects", defects as f64, defects == 0));
    report.push(SubTest::exact("attempts", r as f64, true));
    let cfg = serde_json::json!({
        "nu_intensity": nu_intensity, "window": [window.0, window.1],
        "y": y, "t": t, "samples": samples,
    });
    let mut manifest = manifest_for("verify-fluid", cfg, g.seed);
    manifest.allocate("fluid_nu", DOMAIN_FLUID_NU, r);
    manifest.allocate("fluid_env", DOMAIN_FLUID_ENV, r);
    emit(g, manifest, &report, &[])
}

fn cmd_taylor(g: &Globals, model: &EjsArgs, eps: f64) -> Result<bool> {
    let m = model.model()?;
    let report = taylor_bound_check(m, eps)?;
    let cfg = serde_json::json!({ "model": model.model, "eps": eps });
    let manifest = manifest_for("verify-taylor", cfg, g.seed);
    emit(g, manifest, &report, &[])
}

fn cmd_exit_tails(
    g: &Globals,
    model: &ModelArgs,
    mu: f64,
    t: f64,
    ns: &[u64],
    ms: &[f64],
    replicas: u32,
) -> Result<bool> {
    let kind = model.kind()?;
    let table = exit_tail_estimate(kind, model.rho, mu, t, ns, ms, replicas, RngStream::new(g.seed))?;
    let mut csv = Vec::new();
    table.to_csv(&mut csv)?;
    let mut report = TestReport::new("exit_tails")
        .param("model", serde_json::to_value(kind)?)
        .param("rho", model.rho)
        .param("mu", mu)
        .param("replicas", replicas);
    report.seeds.push(g.seed);
    for &n in ns {
        let rows: Vec<_> = table.rows.iter().filter(|row| row.n == n).collect();
        let nonincreasing = rows.windows(2).all(|w| w[1].p_hat <= w[0].p_hat + 1e-12);
        report.push(SubTest::exact(
            format!("p_nonincreasing_n{n}"),
            rows.len() as f64,
            nonincreasing,
        ));
        let slope = table.slopes.iter().find(|(sn, _)| *sn == n).and_then(|(_, s)| *s);
        match slope {
            Some(s) => report.push(SubTest::exact(format!("slope_negative_n{n}"), s, s < 0.0)),
            // all rows saturated at 0 or 1: no informative slope
            None => report.push(SubTest::exact(format!("slope_negative_n{n}"), f64::NAN, false)),
        }
    }
    let cfg = serde_json::json!({
        "model": kind, "rho": model.rho, "mu": mu, "t": t,
        "ns": ns, "ms": ms, "replicas": replicas,
    });
    let manifest = manifest_for("exit-tails", cfg, g.seed);
    emit(g, manifest, &report, &[("tails.csv", &csv)])
}

fn cmd_invariance(
    g: &Globals,
    model: &ModelArgs,
    mu: f64,
    n: u64,
    xs: &[f64],
    replicas: u32,
) -> Result<bool> {
    let kind = model.kind()?;
    let mut report =
        invariance_test(kind, model.rho, mu, n, xs, replicas, RngStream::new(g.seed), g.level)?;
    report.seeds.push(g.seed);
    let cfg = serde_json::json!({
        "model": kind, "rho": model.rho, "mu": mu, "n": n,
        "xs": xs, "replicas": replicas, "level": g.level,
    });
    let manifest = manifest_for("sh-invariance", cfg, g.seed);
    emit(g, manifest, &report, &[])
}

fn cmd_marginal(g: &Globals, mu: f64, n: u64, x: f64, replicas: u32) -> Result<bool> {
    let samples = rescaled_busemann_samples(
        ModelKind::Exponential,
        1.0,
        mu,
        n,
        x,
        replicas,
        RngStream::new(g.seed),
    )?;
    let len = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / len;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0);
    let se = (var / len).sqrt();
    let target_mean = 2.0 * mu * x;
    let target_var = 2.0 * x.abs();
    let mut report = TestReport::new("sh_marginal")
        .param("mu", mu)
        .param("n", n)
        .param("x", x)
        .param("replicas", replicas);
    report.seeds.push(g.seed);
    report.push(SubTest::exact(
        "mean_within_3se_of_2mux",
        mean,
        (mean - target_mean).abs() <= 3.0 * se,
    ));
    report.push(SubTest::exact(
        "variance_within_10pct_of_2x",
        var,
        (var - target_var).abs() <= 0.1 * target_var,
    ));
    // long-form CSV for external plotting: replica, x, value
    let mut csv = Vec::new();
    {
        let mut wtr = csv::Writer::from_writer(&mut csv);
        wtr.write_record(["replica", "x", "value"]).map_err(Error::Csv)?;
        for (r, v) in samples.iter().enumerate() {
            wtr.write_record(&[r.to_string(), x.to_string(), v.to_string()])
                .map_err(Error::Csv)?;
        }
        wtr.flush()?;
    }
    let cfg = serde_json::json!({ "mu": mu, "n": n, "x": x, "replicas": replicas });
    let manifest = manifest_for("sh-marginal", cfg, g.seed);
    emit(g, manifest, &report, &[("samples.csv", &csv)])
}

fn cmd_oracle(g: &Globals, cases: u32) -> Result<bool> {
    let base = RngStream::new(g.seed);
    let mut report = TestReport::new("oracle_suite").param("cases", cases);
    report.seeds.push(g.seed);
    let mut rng = base.substream(DOMAIN_ORACLE, 0).rng();

    let mut ok = true;
    for _ in 0..cases {
        let w: Vec<f64> = (0..9).map(|_| f64::from(rng.gen_range(0u8..3))).collect();
        let env = LatticeEnvironment::from_weights(w, 3, 3, WeightLaw::ExpUnit);
        ok &= (lattice_lpp(&env, (0, 0), (2, 2))? - lpp::oracle::lattice(&env, (0, 0), (2, 2)))
            .abs()
            < 1e-12;
    }
    report.push(SubTest::exact("lattice", cases as f64, ok));

    let mut ok = true;
    for k in 0..cases {
        let env = SJEnvironment::sample(4, 4, 0.45, base.substream(DOMAIN_ORACLE, 1 + k))?;
        ok &= sj_lpp(&env, (0, 0), (3, 3))? == lpp::oracle::sj(&env, (0, 0), (3, 3));
    }
    report.push(SubTest::exact("sj", cases as f64, ok));

    let mut ok = true;
    for _ in 0..cases {
        let npts = rng.gen_range(0usize..=10);
        let pts: Vec<(f64, f64)> =
            (0..npts).map(|_| (rng.gen::<f64>() * 4.0, rng.gen::<f64>() * 4.0)).collect();
        let env = PlanarPointSet { points: pts.clone(), window: ((0.0, 4.0), (0.0, 4.0)) };
        let q = PassageQuery::new((0.0, 0.0), (4.0, 4.0));
        ok &= hammersley_lpp(&env, q)? == lpp::oracle::hammersley(&pts, q);
    }
    report.push(SubTest::exact("hammersley", cases as f64, ok));

    let mut ok = true;
    for k in 0..cases {
        let env = LineField::sample(3, (0.0, 2.0), base.substream(DOMAIN_ORACLE, 20_000 + k))?;
        ok &= lines_lpp(&env, 0.2, 0, 1.8, 2)? == lpp::oracle::lines(&env, 0.2, 0, 1.8, 2);
    }
    report.push(SubTest::exact("lines", cases as f64, ok));

    let mut ok = true;
    for k in 0..cases {
        let env =
            BrownianField::sample(2, 0.0, 0.2, 0.1, base.substream(DOMAIN_ORACLE, 40_000 + k))?;
        ok &= (blpp(&env, 0.0, 0, 0.2, 1)?.value - lpp::oracle::blpp_two_levels(&env, 0, 2)).abs()
            < 1e-12;
    }
    report.push(SubTest::exact("blpp", cases as f64, ok));

    let cfg = serde_json::json!({ "cases": cases });
    let mut manifest = manifest_for("oracle-suite", cfg, g.seed);
    manifest.allocate("oracle", DOMAIN_ORACLE, 40_000 + cases);
    emit(g, manifest, &report, &[])
}
