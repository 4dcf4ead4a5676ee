//! Acceptance gate: the ten headline criteria, one test (and one printed
//! pass/fail line) each. Budgets assume a single-core runner with the
//! optimized test profile.

use lppkit::ejs::{exit_coupling_check, exit_tail_estimate, mgf_verify, EjsModel};
use lppkit::lpp::{
    self, blpp, hammersley_lpp, lattice_lpp, lines_lpp, sj_lpp, BrownianField,
    LatticeEnvironment, LineField, PassageQuery, SJEnvironment, WeightLaw,
};
use lppkit::processes::{sample_poisson_1d, sample_poisson_2d, PlanarPointSet};
use lppkit::queues::{burke_bernoulli_test, burke_poisson_test, pitman_check, queue_cont};
use lppkit::rng::RngStream;
use lppkit::scaling::{
    invariance_test, params_for, params_residual, rescaled_busemann_samples, ModelKind,
};
use lppkit::stationary::{
    eta_identity_check, lines_height_iterated, sj_height_iterated, height_lines, height_sj,
    DiscreteBoundary, MergedLines,
};
use lppkit::stats;
use rand::Rng;

fn verdict(criterion: u32, name: &str, pass: bool) {
    println!("[criterion {criterion}] {name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} ({name}) failed");
}

/// 1. EJS–Rains MGF identities for Hammersley, lines, and SJ at desk scale:
/// log Monte Carlo estimate within 3·SE of the closed-form R over ≥ 10⁵
/// replicas per model.
#[test]
fn criterion_01_mgf_identities() {
    let cases = [
        (EjsModel::Ham { t: 5.0, y: 5.0 }, 1.1_f64.ln(), 0.9_f64.ln(), 1001),
        (EjsModel::Lines { n: 2, y: 4.0 }, 2.0_f64.ln(), 1.5_f64.ln(), 1002),
        // SJ point sits near the minimizer zeta of M; parameters far below
        // zeta push M(b) toward its pole and the importance weights become
        // heavy-tailed (infinite-variance estimator), which is a conditioning
        // problem, not an identity failure.
        (EjsModel::Sj { n: 2, m: 6, p: 0.4 }, 1.3, 0.85, 1003),
    ];
    let mut all = true;
    for (model, a, b, seed) in cases {
        let report = mgf_verify(model, a, b, 100_000, RngStream::new(seed)).unwrap();
        if !report.all_pass() {
            eprintln!("mgf failure: {:?} {:?}", report.params, report.sub_tests);
            all = false;
        }
    }
    verdict(1, "EJS-Rains MGF identities (ham, lines, sj)", all);
}

/// 2. Burke theorems: Poisson queue (λ=1, μ=2) and Bernoulli queue
/// (p=0.3, u=0.6); median p-value over 20 seeds > 0.01 for every sub-test.
#[test]
fn criterion_02_burke_theorems() {
    let mut pass = true;
    for (name, runner) in [
        ("poisson", 0u8),
        ("bernoulli", 1u8),
    ] {
        // collect p-values per sub-test across seeds, then take medians
        let mut per_name: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
        for seed in 0..20u64 {
            let report = match runner {
                0 => burke_poisson_test(1.0, 2.0, (-200.0, 10.0), 10_000, RngStream::new(2000 + seed), 1e-4)
                    .unwrap(),
                _ => burke_bernoulli_test(0.3, 0.6, (-200, 10), 10_000, RngStream::new(2100 + seed), 1e-4)
                    .unwrap(),
            };
            for sub in report.sub_tests {
                per_name.entry(sub.name).or_default().push(sub.p_value);
            }
        }
        for (sub, ps) in per_name {
            let med = stats::median(&ps);
            if med <= 0.01 {
                eprintln!("burke {name}/{sub}: median p = {med}");
                pass = false;
            }
        }
    }
    verdict(2, "Burke theorems (Poisson and Bernoulli queues)", pass);
}

/// 3. Pitman identity and Hammersley fluid identity `h = ν(y) + η`: exact
/// on ≥ 10³ conclusive samples each, zero defects.
#[test]
fn criterion_03_pitman_and_fluid() {
    let mut defects = 0u32;
    for r in 0..1000u32 {
        let stream = RngStream::new(3000).substream(1, r);
        let mut rng = stream.rng();
        let arrivals = lppkit::processes::poisson_sorted(&mut rng, 1.0, (0.0, 40.0));
        let services = lppkit::processes::poisson_sorted(&mut rng, 2.0, (0.0, 40.0));
        // the positive service-rate drift makes essentially every point
        // conclusive; pitman_check already excludes the inconclusive ones
        let out = pitman_check(&arrivals, &services, 0.0);
        if !out.holds {
            defects += 1;
        }
    }
    let mut fluid_conclusive = 0u32;
    let mut fluid_defects = 0u32;
    let mut r = 0u32;
    while fluid_conclusive < 1000 {
        let base = RngStream::new(3001);
        let nu = sample_poisson_1d(1.2, (-30.0, 8.0), base.substream(10, r)).unwrap();
        let env =
            sample_poisson_2d(1.0, ((-30.0, 8.0), (0.0, 6.0)), base.substream(11, r)).unwrap();
        r += 1;
        match eta_identity_check(&nu, &env, 5.0, 6.0) {
            Some(ok) => {
                fluid_conclusive += 1;
                if !ok {
                    fluid_defects += 1;
                }
            }
            None => {}
        }
    }
    verdict(
        3,
        "Pitman identity and Hammersley fluid identity (exact, 10^3 conclusive each)",
        defects == 0 && fluid_defects == 0,
    );
}

/// 4. Oracle suite: production kernels equal brute-force enumeration on
/// exhaustive small instances, 100% equality.
#[test]
fn criterion_04_oracle_suite() {
    let mut pass = true;
    let mut rng = RngStream::new(4000).rng();
    // lattice 3×3 over {0,1,2} weights, 10^3 draws
    for _ in 0..1000 {
        let w: Vec<f64> = (0..9).map(|_| f64::from(rng.gen_range(0u8..3))).collect();
        let env = LatticeEnvironment::from_weights(w, 3, 3, WeightLaw::ExpUnit);
        let fast = lattice_lpp(&env, (0, 0), (2, 2)).unwrap();
        pass &= (fast - lpp::oracle::lattice(&env, (0, 0), (2, 2))).abs() < 1e-12;
    }
    // SJ 4×4
    for k in 0..1000u32 {
        let env = SJEnvironment::sample(4, 4, 0.45, RngStream::new(4100).substream(1, k)).unwrap();
        pass &= sj_lpp(&env, (0, 0), (3, 3)).unwrap() == lpp::oracle::sj(&env, (0, 0), (3, 3));
    }
    // Hammersley ≤ 10 points
    for _ in 0..1000 {
        let n = rng.gen_range(0usize..=10);
        let pts: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.gen::<f64>() * 4.0, rng.gen::<f64>() * 4.0)).collect();
        let env = PlanarPointSet { points: pts.clone(), window: ((0.0, 4.0), (0.0, 4.0)) };
        let q = PassageQuery::new((0.0, 0.0), (4.0, 4.0));
        pass &= hammersley_lpp(&env, q).unwrap() == lpp::oracle::hammersley(&pts, q);
    }
    // lines: 3 levels, ~6 points
    for k in 0..1000u32 {
        let env = LineField::sample(3, (0.0, 2.0), RngStream::new(4200).substream(2, k)).unwrap();
        pass &= lines_lpp(&env, 0.2, 0, 1.8, 2).unwrap() == lpp::oracle::lines(&env, 0.2, 0, 1.8, 2);
    }
    // BLPP: 2 levels, 3 columns
    for k in 0..1000u32 {
        let env = BrownianField::sample(2, 0.0, 0.2, 0.1, RngStream::new(4300).substream(3, k)).unwrap();
        let fast = blpp(&env, 0.0, 0, 0.2, 1).unwrap().value;
        pass &= (fast - lpp::oracle::blpp_two_levels(&env, 0, 2)).abs() < 1e-12;
    }
    verdict(4, "oracle suite (lattice, SJ, Hammersley, lines, BLPP)", pass);
}

/// 5. Line-evolution consistency: iterated queue-map heights equal direct
/// variational heights exactly (lines and SJ), 10³ samples each.
#[test]
fn criterion_05_evolution_consistency() {
    let mut pass = true;
    for k in 0..1000u32 {
        let base = RngStream::new(5000);
        let f = sample_poisson_1d(1.6, (-25.0, 5.0), base.substream(1, k)).unwrap();
        let field = LineField::sample(4, (-25.0, 5.0), base.substream(2, k)).unwrap();
        let merged = MergedLines::from_field(&field);
        let ys = [0.5, 2.0, 4.5];
        let (iter_h, _) = lines_height_iterated(&f, &field, &ys).unwrap();
        let direct = height_lines(&merged, &f, &ys).unwrap();
        for (a, b) in iter_h.iter().zip(&direct.h) {
            pass &= (a - b).abs() < 1e-9;
        }
    }
    for k in 0..1000u32 {
        let base = RngStream::new(5100);
        let f = DiscreteBoundary::sample_bernoulli(0.7, -20, 6, base.substream(3, k)).unwrap();
        let env = SJEnvironment::sample(26, 5, 0.4, base.substream(4, k)).unwrap();
        let ys = [-2, 1, 6];
        let (iter_h, _) = sj_height_iterated(&f, &env, &ys).unwrap();
        let direct = height_sj(&env, &f, &ys).unwrap();
        for (a, b) in iter_h.iter().zip(&direct.h) {
            pass &= (a - b).abs() < 1e-9;
        }
    }
    verdict(5, "iterated queue-map heights equal direct heights (lines, SJ)", pass);
}

/// 6. Finite-N joint invariance: evolved height increments vs fresh
/// boundary increments, two-sample KS median p > 0.01 over 5 seeds, for all
/// six models at N ∈ {200, 500}, x ∈ {−1, 1}.
#[test]
fn criterion_06_joint_invariance() {
    let models = [
        ModelKind::Hammersley,
        ModelKind::PoissonLines,
        ModelKind::Sj { p: 0.3 },
        ModelKind::Exponential,
        ModelKind::Geometric { mean: 1.0 },
        ModelKind::Blpp,
    ];
    let xs = [-1.0, 1.0];
    let mut pass = true;
    for model in models {
        for n in [200u64, 500] {
            // median over seeds, per grid point
            let mut ps: Vec<Vec<f64>> = vec![Vec::new(); xs.len()];
            for seed in 0..5u64 {
                let report = invariance_test(
                    model,
                    1.0,
                    0.0,
                    n,
                    &xs,
                    64,
                    RngStream::new(6000 + seed),
                    1e-12, // pass/fail decided on the median below
                )
                .unwrap();
                for (i, sub) in report.sub_tests.iter().enumerate() {
                    ps[i].push(sub.p_value);
                }
            }
            for (i, p) in ps.iter().enumerate() {
                let med = stats::median(p);
                if med <= 0.01 {
                    eprintln!("invariance {model:?} N={n} x={}: median p = {med}", xs[i]);
                    pass = false;
                }
            }
        }
    }
    verdict(6, "finite-N joint invariance (six models, N in {200,500})", pass);
}

/// 7. Brownian marginal targets: exponential model, ρ=1, N=10⁴, x=1 —
/// mean of H_μ^N(1) within 3·SE of 2μ for μ ∈ {0, 0.5}, variance within
/// 10% of 2.
#[test]
fn criterion_07_brownian_marginal() {
    let mut pass = true;
    for (mu, seed) in [(0.0, 7000u64), (0.5, 7001)] {
        let samples = rescaled_busemann_samples(
            ModelKind::Exponential,
            1.0,
            mu,
            10_000,
            1.0,
            4000,
            RngStream::new(seed),
        )
        .unwrap();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        if (mean - 2.0 * mu).abs() > 3.0 * se {
            eprintln!("mu={mu}: mean {mean} vs target {} (se {se})", 2.0 * mu);
            pass = false;
        }
        if (var - 2.0).abs() > 0.2 {
            eprintln!("mu={mu}: variance {var} vs target 2");
            pass = false;
        }
    }
    verdict(7, "Brownian marginal drift 2*mu and diffusivity sqrt(2) at N=10^4", pass);
}

/// 8. Exit-point structure at N = 2000: P(|Z| > M·N^{2/3}) nonincreasing in
/// M and log p vs M³ slope strictly negative, for Hammersley, lines, SJ,
/// and exponential.
#[test]
fn criterion_08_exit_tails() {
    let models = [
        ModelKind::Hammersley,
        ModelKind::PoissonLines,
        ModelKind::Sj { p: 0.3 },
        ModelKind::Exponential,
    ];
    let mut pass = true;
    for (i, model) in models.iter().enumerate() {
        let table = exit_tail_estimate(
            *model,
            1.0,
            0.0,
            1.0,
            &[2000],
            &[0.5, 1.0, 2.0, 3.0],
            120,
            RngStream::new(8000 + i as u64),
        )
        .unwrap();
        for w in table.rows.windows(2) {
            if w[1].p_hat > w[0].p_hat {
                eprintln!("{model:?}: p_hat not monotone: {:?}", table.rows);
                pass = false;
            }
        }
        match table.slopes[0].1 {
            Some(s) if s < 0.0 => {}
            other => {
                eprintln!("{model:?}: slope {other:?}, rows {:?}", table.rows);
                pass = false;
            }
        }
    }
    verdict(8, "exit tails nonincreasing with negative log p vs M^3 slope (N=2000)", pass);
}

/// 9. Exit-point coupling monotonicity: Z^{a',b'} ≤ Z^{a,b} exactly on 10³
/// coupled samples per model with couplings (Hammersley, SJ).
#[test]
fn criterion_09_exit_coupling() {
    let ham = exit_coupling_check(
        EjsModel::Ham { t: 5.0, y: 5.0 },
        0.2,
        0.1,
        -0.1,
        -0.2,
        1000,
        RngStream::new(9000),
    )
    .unwrap();
    let sj = exit_coupling_check(
        EjsModel::Sj { n: 6, m: 10, p: 0.4 },
        0.6,
        0.5,
        0.25,
        0.15,
        1000,
        RngStream::new(9001),
    )
    .unwrap();
    verdict(9, "coupled exit monotonicity exact on 10^3 samples (ham, SJ)", ham.all_pass() && sj.all_pass());
}

/// 10. Closed-form consistency: R antisymmetry, R(a,a)=0, ∂R/∂a = M within
/// 1e−6, M(ζ) = γ minimal, and parameter-table residuals < 1e−12 over the
/// ρ grid for all models.
#[test]
fn criterion_10_closed_forms() {
    let mut pass = true;
    let ejs_models = [
        EjsModel::Ham { t: 3.0, y: 1.5 },
        EjsModel::Lines { n: 2, y: 3.0 },
        EjsModel::Sj { n: 2, m: 9, p: 0.3 },
    ];
    let h = 1e-5;
    for model in ejs_models {
        let (zeta, gamma) = model.zeta_gamma().unwrap();
        for da in [-0.2, -0.1, 0.05, 0.15] {
            let a = zeta + da;
            let b = zeta - 0.07;
            if model.check_param(a - h).is_err() || model.check_param(b).is_err() {
                continue;
            }
            pass &= model.r(a, a).unwrap() == 0.0;
            pass &= (model.r(a, b).unwrap() + model.r(b, a).unwrap()).abs() < 1e-10;
            let dr = (model.r(a + h, b).unwrap() - model.r(a - h, b).unwrap()) / (2.0 * h);
            pass &= (dr - model.m(a).unwrap()).abs() < 1e-6 * model.m(a).unwrap().abs().max(1.0);
            pass &= model.m(a).unwrap() >= gamma - 1e-9 * gamma;
        }
        pass &= (model.m(zeta).unwrap() - gamma).abs() < 1e-9 * gamma;
    }
    for model in [
        ModelKind::Hammersley,
        ModelKind::PoissonLines,
        ModelKind::Sj { p: 0.3 },
        ModelKind::Exponential,
        ModelKind::Geometric { mean: 1.0 },
        ModelKind::Blpp,
    ] {
        for rho in [0.25, 0.5, 1.0, 2.0, 4.0] {
            match params_for(model, rho) {
                Ok(sp) => pass &= params_residual(&sp) < 1e-12,
                Err(_) => {
                    pass &= matches!(model, ModelKind::Sj { p } if rho <= p / (1.0 - p) + 1e-12)
                }
            }
        }
    }
    verdict(10, "closed-form consistency (EJS statistics and parameter tables)", pass);
}

/// Sanity companion to criterion 3: queue conservation on a continuous
/// window never produces a negative queue.
#[test]
fn queue_nonnegativity_spotcheck() {
    let mut rng = RngStream::new(12345).rng();
    let arrivals = lppkit::processes::poisson_sorted(&mut rng, 1.0, (0.0, 25.0));
    let services = lppkit::processes::poisson_sorted(&mut rng, 2.0, (0.0, 25.0));
    let q = queue_cont(&arrivals, &services, 0.0);
    for &t in &q.times {
        assert!(q.q_at(t) >= 0);
    }
}
