//! Property tests: structural invariants over randomized inputs. Exact
//! identities are asserted exactly; kernel-vs-oracle agreement is asserted
//! on small random instances.

use lppkit::lpp::{
    self, hammersley_lpp, lattice_lpp, lines_lpp, sj_lpp, LatticeEnvironment, LineField,
    PassageQuery, SJEnvironment, WeightLaw,
};
use lppkit::processes::{CoupledBernoulliField, CoupledPointFamily, PointSet, PlanarPointSet};
use lppkit::queues::{queue_cont, queue_disc};
use lppkit::rng::RngStream;
use lppkit::scaling::{beta_n, params_for, params_residual, IncrementPath, iota_n, ModelKind};
use lppkit::ejs::EjsModel;
use proptest::prelude::*;

fn small_weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0_f64..5.0, 9..=16)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // ---- discrete queue identities -------------------------------------

    #[test]
    fn disc_queue_conservation(
        a in prop::collection::vec(0_i64..4, 1..40),
        s in prop::collection::vec(0_i64..4, 1..40),
    ) {
        let n = a.len().min(s.len());
        let (a, s) = (&a[..n], &s[..n]);
        let out = queue_disc(a, s, 0);
        let mut q_prev = 0;
        for i in 0..n {
            // Lindley recursion and flow conservation, exactly
            prop_assert!(out.q[i] >= 0);
            prop_assert_eq!(out.q[i], (q_prev + a[i] - s[i]).max(0));
            prop_assert_eq!(out.d[i] + out.q[i], q_prev + a[i]);
            prop_assert_eq!(out.d[i] + out.r[i], a[i] + s[i]);
            prop_assert!(out.d[i] >= 0 && out.r[i] >= 0);
            q_prev = out.q[i];
        }
    }

    #[test]
    fn cont_queue_counts_conserve(
        arrivals in prop::collection::vec(0.0_f64..10.0, 0..25),
        services in prop::collection::vec(0.0_f64..10.0, 1..25),
    ) {
        let mut arrivals = arrivals;
        let mut services = services;
        arrivals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        services.sort_by(|x, y| x.partial_cmp(y).unwrap());
        arrivals.dedup();
        services.dedup();
        let q = queue_cont(&arrivals, &services, 0.0);
        // every departure and recycled event lies in the window, and
        // departures + idle services account for all service events
        prop_assert_eq!(
            q.d_count(0.0, 10.0) + (q.r_count(0.0, 10.0) - arrivals.len() as i64),
            services.len() as i64
        );
        // queue length is nonnegative everywhere
        for &t in services.iter().chain(arrivals.iter()) {
            prop_assert!(q.q_at(t) >= 0);
        }
    }

    // ---- LPP kernels vs exhaustive oracles -----------------------------

    #[test]
    fn lattice_matches_oracle(w in small_weights()) {
        let cols = 3;
        let rows = w.len() / cols;
        let w = w[..cols * rows].to_vec();
        let env = LatticeEnvironment::from_weights(w, cols, rows, WeightLaw::ExpUnit);
        let to = (cols - 1, rows - 1);
        let fast = lattice_lpp(&env, (0, 0), to).unwrap();
        let slow = lpp::oracle::lattice(&env, (0, 0), to);
        prop_assert!((fast - slow).abs() < 1e-9);
    }

    #[test]
    fn lattice_monotone_in_weights(w in small_weights(), bump in 0.0_f64..3.0, idx in 0usize..9) {
        let cols = 3;
        let rows = w.len() / cols;
        let mut w = w[..cols * rows].to_vec();
        let env = LatticeEnvironment::from_weights(w.clone(), cols, rows, WeightLaw::ExpUnit);
        let to = (cols - 1, rows - 1);
        let base = lattice_lpp(&env, (0, 0), to).unwrap();
        let k = idx % w.len();
        w[k] += bump;
        let env2 = LatticeEnvironment::from_weights(w, cols, rows, WeightLaw::ExpUnit);
        let bumped = lattice_lpp(&env2, (0, 0), to).unwrap();
        prop_assert!(bumped >= base - 1e-12);
        prop_assert!(bumped <= base + bump + 1e-12);
    }

    #[test]
    fn lattice_superadditive_through_midpoint(w in small_weights()) {
        let cols = 3;
        let rows = w.len() / cols;
        let w = w[..cols * rows].to_vec();
        let env = LatticeEnvironment::from_weights(w, cols, rows, WeightLaw::ExpUnit);
        let to = (cols - 1, rows - 1);
        let mid = (1, rows / 2);
        let through = lattice_lpp(&env, (0, 0), mid).unwrap()
            + lattice_lpp(&env, mid, to).unwrap()
            - env.w(mid.0, mid.1);
        let direct = lattice_lpp(&env, (0, 0), to).unwrap();
        prop_assert!(direct >= through - 1e-9);
    }

    #[test]
    fn sj_matches_oracle(seed in 0u64..5000, p in 0.1_f64..0.9) {
        let env = SJEnvironment::sample(4, 4, p, RngStream::new(seed)).unwrap();
        let fast = sj_lpp(&env, (0, 0), (3, 3)).unwrap();
        let slow = lpp::oracle::sj(&env, (0, 0), (3, 3));
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn lines_matches_oracle(seed in 0u64..5000) {
        let env = LineField::sample(3, (0.0, 4.0), RngStream::new(seed)).unwrap();
        let fast = lines_lpp(&env, 0.5, 0, 3.5, 2).unwrap();
        let slow = lpp::oracle::lines(&env, 0.5, 0, 3.5, 2);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn hammersley_matches_oracle(
        pts in prop::collection::vec((0.0_f64..4.0, 0.0_f64..4.0), 0..12)
    ) {
        let env = PlanarPointSet { points: pts.clone(), window: ((0.0, 4.0), (0.0, 4.0)) };
        let q = PassageQuery::new((0.0, 0.0), (4.0, 4.0));
        let fast = hammersley_lpp(&env, q).unwrap();
        let slow = lpp::oracle::hammersley(&pts, q);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn hammersley_monotone_in_rectangle(
        pts in prop::collection::vec((0.0_f64..4.0, 0.0_f64..4.0), 0..14),
        y in 1.0_f64..4.0,
        t in 1.0_f64..4.0,
    ) {
        let env = PlanarPointSet { points: pts, window: ((0.0, 4.0), (0.0, 4.0)) };
        let small = hammersley_lpp(&env, PassageQuery::new((0.0, 0.0), (y, t))).unwrap();
        let big = hammersley_lpp(&env, PassageQuery::new((0.0, 0.0), (4.0, 4.0))).unwrap();
        prop_assert!(big >= small);
    }

    // ---- point-process couplings ---------------------------------------

    #[test]
    fn coupled_points_nested(seed in 0u64..5000, a in -1.0_f64..1.0, da in 0.0_f64..1.0) {
        let family = CoupledPointFamily::sample(1.5, (-3.0, 3.0), RngStream::new(seed)).unwrap();
        let lo = family.extract(a, a - 0.5).unwrap();
        let hi = family.extract(a + da.min(1.5 - a), (a - 0.5 + da).min(1.5)).unwrap();
        // raising either parameter only adds points
        for x in &lo.points {
            prop_assert!(hi.points.contains(x));
        }
    }

    #[test]
    fn coupled_bernoulli_monotone(seed in 0u64..5000, a in -2.0_f64..2.0, da in 0.0_f64..2.0) {
        let field = CoupledBernoulliField::sample(-5, 5, RngStream::new(seed));
        let lo = field.extract(a);
        let hi = field.extract(a + da);
        for (l, h) in lo.iter().zip(&hi) {
            prop_assert!(h >= l);
        }
    }

    #[test]
    fn nu_is_counting_function(
        pts in prop::collection::vec(-5.0_f64..5.0, 0..20),
        x in -5.0_f64..5.0,
        y in -5.0_f64..5.0,
    ) {
        let ps = PointSet::new(pts, (-5.0, 5.0));
        prop_assert_eq!(ps.nu_unchecked(0.0), 0);
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        // increments count points in (x, y]
        prop_assert_eq!(
            ps.nu_unchecked(y) - ps.nu_unchecked(x),
            ps.count_in(x, y) as i64
        );
        prop_assert!(ps.nu_unchecked(y) >= ps.nu_unchecked(x));
    }

    // ---- scaling closed forms ------------------------------------------

    #[test]
    fn params_residual_tiny_for_random_rho(rho in 0.05_f64..20.0, p in 0.05_f64..0.95) {
        for model in [
            ModelKind::Hammersley,
            ModelKind::PoissonLines,
            ModelKind::Sj { p },
            ModelKind::Exponential,
            ModelKind::Geometric { mean: 1.0 },
            ModelKind::Blpp,
        ] {
            match params_for(model, rho) {
                Ok(sp) => {
                    prop_assert!(params_residual(&sp) < 1e-12);
                    prop_assert!(sp.tau > 0.0 && sp.chi > 0.0 && sp.beta > 0.0);
                }
                Err(_) => {
                    // only the SJ admissibility boundary may reject
                    if let ModelKind::Sj { p } = model {
                        prop_assert!(rho <= p / (1.0 - p) + 1e-12);
                    } else {
                        prop_assert!(false, "unexpected rejection");
                    }
                }
            }
        }
    }

    #[test]
    fn beta_n_monotone_in_mu(mu1 in -2.0_f64..2.0, dmu in 0.0_f64..2.0, n in 1u64..10_000) {
        let sp = params_for(ModelKind::Exponential, 1.0).unwrap();
        prop_assert!(beta_n(&sp, mu1 + dmu, n) >= beta_n(&sp, mu1, n));
        prop_assert_eq!(beta_n(&sp, 0.0, n), sp.beta);
    }

    #[test]
    fn iota_kills_slope_beta_and_fixes_origin(n in 2u64..2000, slope_dev in -1.0_f64..1.0) {
        let sp = params_for(ModelKind::Hammersley, 1.0).unwrap();
        let xs: Vec<f64> = (-40..=40).map(|k| k as f64 * 50.0).collect();
        let f = IncrementPath {
            xs: xs.clone(),
            values: xs.iter().map(|&x| (sp.beta + slope_dev) * x).collect(),
        };
        let out = iota_n(&f, &sp, n, &[-1.0, 0.0, 1.0]);
        prop_assert!(out.values[1].abs() < 1e-9);
        // a linear path maps to a linear path: symmetric about 0
        prop_assert!((out.values[0] + out.values[2]).abs() < 1e-6);
    }

    // ---- EJS statistics -------------------------------------------------

    #[test]
    fn ejs_r_antisymmetric_and_m_above_gamma(
        da in -0.4_f64..0.4,
        db in -0.4_f64..0.4,
        y in 0.5_f64..10.0,
    ) {
        for model in [
            EjsModel::Ham { t: 2.0 * y, y },
            EjsModel::Lines { n: 2, y },
            EjsModel::Sj { n: 1, m: 12, p: 0.3 },
        ] {
            let (zeta, gamma) = model.zeta_gamma().unwrap();
            let (a, b) = (zeta + da, zeta + db);
            if model.check_param(a).is_err() || model.check_param(b).is_err() {
                continue;
            }
            let r_ab = model.r(a, b).unwrap();
            let r_ba = model.r(b, a).unwrap();
            prop_assert!((r_ab + r_ba).abs() <= 1e-12 * r_ab.abs().max(1.0));
            prop_assert_eq!(model.r(a, a).unwrap(), 0.0);
            prop_assert!(model.m(a).unwrap() >= gamma - 1e-9 * gamma);
        }
    }
}
