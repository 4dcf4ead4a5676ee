//! Queueing operators `Q`/`D`/`R`, Pitman's `2M − X` identity, and
//! statistical verifiers of Burke's theorem — the engine behind all
//! line-by-line evolution of stationary LPP boundary data.
//!
//! # Continuous (M/M/1-type) queues
//!
//! For counting processes `A` (arrivals) and `S` (services),
//!
//! ```text
//! Q(A,S)(t) = sup_{s ≤ t} { A(s,t] − S(s,t] }      (A(t,t] = 0, so Q ≥ 0)
//! D(s,t]    = A(s,t] + Q(s) − Q(t)                  (departures)
//! R(s,t]    = S(s,t] + Q(t) − Q(s)                  (recycled services)
//! ```
//!
//! The supremum over `s ∈ (−∞, t]` is truncated at `truncation_lo`; a
//! *boundary-active* flag marks any query whose supremum is attained only at
//! the truncation point, so silent truncation error is impossible — callers
//! widen the window and rerun.
//!
//! # Discrete (Bernoulli) queues
//!
//! For 0/1 sequences `a`, `s`:
//! `q_i = sup_{j ≤ i+1}(a[j,i] − s[j,i])` (empty sum = 0),
//! `d_i = q_{i−1} − q_i + a_i`, `r_i = q_i − q_{i−1} + s_i`.
//!
//! All queue arithmetic is exact integer arithmetic; the identities this
//! module certifies are exact, and floating point would mask defects.

use crate::error::Error;
use crate::processes::poisson_sorted;
use crate::report::{SubTest, TestReport};
use crate::rng::RngStream;
use crate::stats;
use crate::Result;
use rand::Rng;

/// Result of the continuous queue operator on a finite window.
#[derive(Debug, Clone)]
pub struct ContQueue {
    /// Left end of the supremum scan (`s ≥ truncation_lo`).
    pub truncation_lo: f64,
    /// Merged event times, ascending.
    pub times: Vec<f64>,
    /// Queue length just after each event.
    pub q_after: Vec<i64>,
    /// Last time `≤ times[k]` at which the queue was 0 (or `truncation_lo`).
    last_zero: Vec<f64>,
    /// Departure times: services that found the queue nonempty.
    pub departures: Vec<f64>,
    /// Recycled-service times: arrivals plus idle services (the jump times
    /// of `R`, by the conservation identity).
    pub recycled: Vec<f64>,
}

impl ContQueue {
    /// Queue length at time `t` (piecewise-constant, right-continuous).
    pub fn q_at(&self, t: f64) -> i64 {
        match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            k => self.q_after[k - 1],
        }
    }

    /// True iff the supremum defining `Q(t)` is attained only at the
    /// truncation boundary — the value may be biased and the caller should
    /// widen the window.
    pub fn boundary_active_at(&self, t: f64) -> bool {
        match self.times.partition_point(|&x| x <= t) {
            0 => false, // Q(t) = 0 attained at s = t
            k => self.q_after[k - 1] > 0 && self.last_zero[k - 1] <= self.truncation_lo,
        }
    }

    /// Number of departures in `(s, t]`.
    pub fn d_count(&self, s: f64, t: f64) -> i64 {
        count_in(&self.departures, s, t)
    }

    /// Number of recycled services in `(s, t]`.
    pub fn r_count(&self, s: f64, t: f64) -> i64 {
        count_in(&self.recycled, s, t)
    }
}

fn count_in(sorted: &[f64], s: f64, t: f64) -> i64 {
    (sorted.partition_point(|&x| x <= t) - sorted.partition_point(|&x| x <= s)) as i64
}

/// Continuous queue operator. `arrivals` and `services` must be sorted event
/// times within `[truncation_lo, hi]`; simultaneous events across the two
/// processes are not expected (a.s. for Poisson inputs) — if they occur, the
/// arrival is processed first.
pub fn queue_cont(arrivals: &[f64], services: &[f64], truncation_lo: f64) -> ContQueue {
    let mut times = Vec::with_capacity(arrivals.len() + services.len());
    let mut q_after = Vec::with_capacity(times.capacity());
    let mut last_zero_v = Vec::with_capacity(times.capacity());
    let mut departures = Vec::new();
    let mut recycled = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let mut q: i64 = 0;
    let mut last_zero = truncation_lo;
    while i < arrivals.len() || j < services.len() {
        let take_arrival = j >= services.len() || (i < arrivals.len() && arrivals[i] <= services[j]);
        let t = if take_arrival {
            let t = arrivals[i];
            i += 1;
            q += 1;
            recycled.push(t); // R jumps at arrivals (conservation identity)
            t
        } else {
            let t = services[j];
            j += 1;
            if q > 0 {
                q -= 1;
                departures.push(t);
            } else {
                recycled.push(t); // idle service
            }
            t
        };
        if q == 0 {
            last_zero = t;
        }
        times.push(t);
        q_after.push(q);
        last_zero_v.push(last_zero);
    }
    ContQueue { truncation_lo, times, q_after, last_zero: last_zero_v, departures, recycled }
}

/// Result of the discrete queue operator on integer slots `lo..=hi`.
#[derive(Debug, Clone)]
pub struct DiscQueue {
    /// First slot index.
    pub lo: i64,
    /// Queue length after slot `i` (index `i − lo`).
    pub q: Vec<i64>,
    /// Departures per slot (0/1 when inputs are 0/1).
    pub d: Vec<i64>,
    /// Recycled services per slot.
    pub r: Vec<i64>,
    /// Per-slot flag: supremum attained only at the truncation boundary.
    pub boundary_active: Vec<bool>,
}

impl DiscQueue {
    pub fn q_at(&self, i: i64) -> i64 {
        self.q[(i - self.lo) as usize]
    }
}

/// Discrete queue operator on slots `lo..=hi`, truncating the history at
/// `lo` (queue empty before `lo`). Within a slot, the arrival precedes the
/// service (an arrival can be served in its own slot).
pub fn queue_disc(a: &[i64], s: &[i64], lo: i64) -> DiscQueue {
    assert_eq!(a.len(), s.len());
    let mut q = Vec::with_capacity(a.len());
    let mut d = Vec::with_capacity(a.len());
    let mut r = Vec::with_capacity(a.len());
    let mut boundary = Vec::with_capacity(a.len());
    let mut prev: i64 = 0;
    // the empty queue *before* lo is the truncation assumption; a zero at
    // any slot ≥ lo re-anchors the supremum in the interior
    let mut interior_zero = false;
    for k in 0..a.len() {
        let cur = (prev + a[k] - s[k]).max(0);
        if cur == 0 {
            interior_zero = true;
        }
        d.push(prev - cur + a[k]);
        r.push(cur - prev + s[k]);
        boundary.push(cur > 0 && !interior_zero);
        q.push(cur);
        prev = cur;
    }
    DiscQueue { lo, q, d, r, boundary_active: boundary }
}

/// Outcome of a Pitman-identity check.
#[derive(Debug, Clone, Copy)]
pub struct PitmanOutcome {
    /// Identity held exactly at every conclusive evaluation point.
    pub holds: bool,
    /// Largest |F(t) − inf_s {2F(s) − f(s)}| over conclusive points.
    pub max_defect: i64,
    /// Number of evaluation points where the infimum was attained only at
    /// the right boundary (excluded from the verdict).
    pub inconclusive: usize,
}

/// Verify Pitman's identity `F(t) = inf_{s ≥ t} {2F(s) − f(s)}` for the
/// ±1-jump path `f = S − A` built from sorted arrival/service times on
/// `[lo, hi]` (`f(lo) = 0`, `F(t) = sup_{lo ≤ s ≤ t} f(s)`).
///
/// Evaluation points where the infimum is attained *only* on the final
/// segment (touching `hi`) are counted as inconclusive rather than failures.
pub fn pitman_check(arrivals: &[f64], services: &[f64], _lo: f64) -> PitmanOutcome {
    // Merge into segment values: segment 0 precedes all events.
    let mut f_vals = vec![0i64];
    let (mut i, mut j) = (0usize, 0usize);
    let mut f = 0i64;
    while i < arrivals.len() || j < services.len() {
        let take_arrival = j >= services.len() || (i < arrivals.len() && arrivals[i] <= services[j]);
        if take_arrival {
            f -= 1;
            i += 1;
        } else {
            f += 1;
            j += 1;
        }
        f_vals.push(f);
    }
    let n = f_vals.len();
    // F on each segment (prefix max), then suffix min of 2F − f with the
    // index of the *earliest* attainment.
    let mut big_f = vec![0i64; n];
    let mut m = i64::MIN;
    for (k, &v) in f_vals.iter().enumerate() {
        m = m.max(v);
        big_f[k] = m;
    }
    let mut suffix_min = vec![0i64; n];
    let mut cur = 2 * big_f[n - 1] - f_vals[n - 1];
    suffix_min[n - 1] = cur;
    for k in (0..n - 1).rev() {
        cur = cur.min(2 * big_f[k] - f_vals[k]);
        suffix_min[k] = cur;
    }
    // Since 2F(s) − f(s) ≥ F(s) ≥ F(t) for *all* s ≥ t, the identity is
    // certified as soon as f touches its running maximum somewhere in
    // [t, hi] — the infimum is then attained inside the window and cannot
    // move beyond it. Points with no such touch are inconclusive (the
    // infimum would localize past the right boundary).
    let mut touched = vec![false; n];
    let mut touch = false;
    for k in (0..n).rev() {
        touch = touch || f_vals[k] == big_f[k];
        touched[k] = touch;
    }
    let mut max_defect = 0i64;
    let mut inconclusive = 0usize;
    for k in 0..n {
        if !touched[k] {
            inconclusive += 1;
            continue;
        }
        max_defect = max_defect.max((big_f[k] - suffix_min[k]).abs());
    }
    PitmanOutcome { holds: max_defect == 0, max_defect, inconclusive }
}

/// Reconstruction identity from the proof of Burke's theorem:
/// `Q(t) = sup_{s ≥ t} { D(t,s] − R(t,s] }`, checked exactly at every event
/// time on `[t_lo, t_hi]`; suprema attained only at the right window end are
/// skipped (inconclusive). Returns the number of defects and of conclusive
/// checks.
pub fn reconstruction_check(q: &ContQueue, t_lo: f64, t_hi: f64) -> (usize, usize) {
    let mut defects = 0usize;
    let mut conclusive = 0usize;
    for &t in q.times.iter().filter(|&&t| t >= t_lo && t <= t_hi) {
        let mut best = 0i64; // s = t term
        let mut best_at_end = false;
        let mut walk = 0i64;
        // replay D and R events after t
        let mut di = q.departures.partition_point(|&x| x <= t);
        let mut ri = q.recycled.partition_point(|&x| x <= t);
        while di < q.departures.len() || ri < q.recycled.len() {
            let take_d = ri >= q.recycled.len()
                || (di < q.departures.len() && q.departures[di] <= q.recycled[ri]);
            if take_d {
                walk += 1;
                di += 1;
            } else {
                walk -= 1;
                ri += 1;
            }
            if walk > best {
                best = walk;
                best_at_end = di >= q.departures.len() && ri >= q.recycled.len();
            }
        }
        if best_at_end {
            continue; // supremum may lie beyond the window
        }
        conclusive += 1;
        if best != q.q_at(t) {
            defects += 1;
        }
    }
    (defects, conclusive)
}

/// Statistical verification of Burke's theorem for the Poisson queue:
/// with `A ~ Poisson(λ)`, `S ~ Poisson(μ)`, `λ < μ`, the departures are
/// Poisson(λ), the recycled services Poisson(μ), `Q(t) ~ Geom(1 − λ/μ)`
/// (`P(Q = k) = (λ/μ)^k (1 − λ/μ)`), and past `(D, R)` is independent of
/// the current and future queue.
///
/// Sub-tests (finite-dimensional surrogates of the full independence
/// statement, which is not testable from finitely many statistics):
/// 1. KS: inter-departure gaps vs Exp(λ);
/// 2. dispersion: R-counts on a fixed cell vs Poisson;
/// 3. correlation of D- and R-counts on disjoint cells ≈ 0;
/// 4. chi-square: Q(0) vs Geom(1 − λ/μ);
/// 5. correlation of past D-count with Q(0) ≈ 0.
pub fn burke_poisson_test(
    lambda: f64,
    mu: f64,
    window: (f64, f64),
    replicas: u32,
    stream: RngStream,
    level: f64,
) -> Result<TestReport> {
    if !(0.0 < lambda && lambda < mu) {
        return Err(Error::parameter(format!(
            "Burke (Poisson) requires 0 < lambda < mu, got lambda={lambda}, mu={mu}"
        )));
    }
    if replicas < 100 {
        return Err(Error::refusal(format!("need at least 100 replicas, got {replicas}")));
    }
    let (lo, hi) = window;
    assert!(lo < 0.0 && hi >= 10.0, "window must cover the measurement cells");
    struct Rep {
        q0: u64,
        gaps: Vec<f64>,
        d_past: f64,
        r_future: f64,
        r_cell: u64,
    }
    let per: Vec<Rep> = crate::replicas::run_replicas(replicas, |r| {
        let mut rng = stream.substream(0x42504f49, r).rng();
        let a = poisson_sorted(&mut rng, lambda, (lo, hi));
        let s = poisson_sorted(&mut rng, mu, (lo, hi));
        let q = queue_cont(&a, &s, lo);
        // measurement cells sit well inside the window so the truncated
        // history has relaxed to stationarity
        // Gap collection must avoid right-censoring bias: take the gap after
        // every departure in (−50, 0] (10 window units of slack remain, so a
        // missing right neighbour has probability e^{−10λ} — negligible).
        let gaps: Vec<f64> = q
            .departures
            .windows(2)
            .filter(|w| w[0] > -50.0 && w[0] <= 0.0)
            .map(|w| w[1] - w[0])
            .collect();
        Rep {
            q0: q.q_at(0.0) as u64,
            gaps,
            d_past: q.d_count(-10.0, 0.0) as f64,
            r_future: q.r_count(0.0, 10.0) as f64,
            r_cell: q.r_count(0.0, 10.0) as u64,
        }
    });
    let mut report = TestReport::new("burke_poisson")
        .param("lambda", lambda)
        .param("mu", mu)
        .param("replicas", replicas)
        .param("window", serde_json::json!([lo, hi]));
    report.seeds.push(stream.seed);

    let gaps: Vec<f64> = per.iter().flat_map(|r| r.gaps.iter().copied()).collect();
    let (d_stat, d_p) = stats::ks_one_sample(&gaps, |x| 1.0 - (-lambda * x).exp());
    report.push(SubTest::from_p("departure_gaps_exp_ks", d_stat, d_p, level));

    let r_cells: Vec<u64> = per.iter().map(|r| r.r_cell).collect();
    let (disp, disp_p) = stats::poisson_dispersion(&r_cells);
    report.push(SubTest::from_p("recycled_poisson_dispersion", disp, disp_p, level));

    let d_past: Vec<f64> = per.iter().map(|r| r.d_past).collect();
    let r_future: Vec<f64> = per.iter().map(|r| r.r_future).collect();
    let (c_dr, p_dr) = stats::correlation_test(&d_past, &r_future);
    report.push(SubTest::from_p("d_r_disjoint_cells_corr", c_dr, p_dr, level));

    let q0: Vec<u64> = per.iter().map(|r| r.q0).collect();
    let v = 1.0 - lambda / mu;
    let (chi, chi_p) = stats::chi_square_gof(&q0, |k| (1.0 - v).powi(k as i32) * v, 5.0);
    report.push(SubTest::from_p("q_geometric_chi2", chi, chi_p, level));

    let q0f: Vec<f64> = q0.iter().map(|&q| q as f64).collect();
    let (c_dq, p_dq) = stats::correlation_test(&d_past, &q0f);
    report.push(SubTest::from_p("past_d_future_q_corr", c_dq, p_dq, level));
    Ok(report)
}

/// Statistical verification of the discrete Burke lemma: with
/// `a ~ Ber(p)`, `s ~ Ber(u)`, `p < u`, departures are Ber(p), recycled
/// services Ber(u), `q ~ Geom(v)` with `v = (u−p)/((1−p)u)`, and the three
/// are mutually independent (pairwise correlation surrogates).
pub fn burke_bernoulli_test(
    p: f64,
    u: f64,
    window: (i64, i64),
    replicas: u32,
    stream: RngStream,
    level: f64,
) -> Result<TestReport> {
    if !(0.0 < p && p < u && u < 1.0) {
        return Err(Error::parameter(format!(
            "Burke (Bernoulli) requires 0 < p < u < 1, got p={p}, u={u}"
        )));
    }
    if replicas < 100 {
        return Err(Error::refusal(format!("need at least 100 replicas, got {replicas}")));
    }
    let (lo, hi) = window;
    assert!(lo < -10 && hi >= 0);
    let len = (hi - lo + 1) as usize;
    struct Rep {
        q0: u64,
        d_sum: f64,
        r_sum: f64,
        d_tot: u64,
        r_tot: u64,
        cells: u64,
    }
    let per: Vec<Rep> = crate::replicas::run_replicas(replicas, |rep| {
        let mut rng = stream.substream(0x42424552, rep).rng();
        let a: Vec<i64> = (0..len).map(|_| (rng.gen::<f64>() < p) as i64).collect();
        let s: Vec<i64> = (0..len).map(|_| (rng.gen::<f64>() < u) as i64).collect();
        let q = queue_disc(&a, &s, lo);
        let idx = |i: i64| (i - lo) as usize;
        // past cell (−10, 0]: slots −9..=0
        let mut d_sum = 0i64;
        let mut r_sum = 0i64;
        for i in -9..=0 {
            d_sum += q.d[idx(i)];
            r_sum += q.r[idx(i)];
        }
        Rep {
            q0: q.q_at(0) as u64,
            d_sum: d_sum as f64,
            r_sum: r_sum as f64,
            d_tot: d_sum as u64,
            r_tot: r_sum as u64,
            cells: 10,
        }
    });
    let mut report = TestReport::new("burke_bernoulli")
        .param("p", p)
        .param("u", u)
        .param("replicas", replicas)
        .param("window", serde_json::json!([lo, hi]));
    report.seeds.push(stream.seed);

    let trials: u64 = per.iter().map(|r| r.cells).sum();
    let d_succ: u64 = per.iter().map(|r| r.d_tot).sum();
    let (fd, pd) = stats::binomial_freq_test(d_succ, trials, p);
    report.push(SubTest::from_p("d_bernoulli_freq", fd, pd, level));
    let r_succ: u64 = per.iter().map(|r| r.r_tot).sum();
    let (fr, pr) = stats::binomial_freq_test(r_succ, trials, u);
    report.push(SubTest::from_p("r_bernoulli_freq", fr, pr, level));

    let q0: Vec<u64> = per.iter().map(|r| r.q0).collect();
    let v = (u - p) / ((1.0 - p) * u);
    let (chi, chi_p) = stats::chi_square_gof(&q0, |k| (1.0 - v).powi(k as i32) * v, 5.0);
    report.push(SubTest::from_p("q_geometric_chi2", chi, chi_p, level));

    let d_sums: Vec<f64> = per.iter().map(|r| r.d_sum).collect();
    let r_sums: Vec<f64> = per.iter().map(|r| r.r_sum).collect();
    let q0f: Vec<f64> = q0.iter().map(|&q| q as f64).collect();
    let (c1, p1) = stats::correlation_test(&d_sums, &r_sums);
    report.push(SubTest::from_p("d_r_corr", c1, p1, level));
    let (c2, p2) = stats::correlation_test(&d_sums, &q0f);
    report.push(SubTest::from_p("d_q_corr", c2, p2, level));
    let (c3, p3) = stats::correlation_test(&r_sums, &q0f);
    report.push(SubTest::from_p("r_q_corr", c3, p3, level));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_arrivals_means_empty_queue() {
        let s = vec![1.0, 2.0, 3.0];
        let q = queue_cont(&[], &s, 0.0);
        assert!(q.q_after.iter().all(|&v| v == 0));
        assert!(q.departures.is_empty());
        assert_eq!(q.recycled, s); // R = S when A is empty
    }

    #[test]
    fn matched_arrivals_served_instantly_by_convention() {
        // A = S as identical event lists: arrival processed first in each
        // tie, so Q stays 0 after each pair and D = A.
        let a = vec![1.0, 2.0, 3.0];
        let q = queue_cont(&a, &a, 0.0);
        assert_eq!(q.departures, a);
        assert_eq!(q.q_at(10.0), 0);
    }

    #[test]
    fn conservation_identities_exact() {
        let mut rng = RngStream::new(1).rng();
        for _ in 0..200 {
            let a = poisson_sorted(&mut rng, 1.0, (-30.0, 10.0));
            let s = poisson_sorted(&mut rng, 2.0, (-30.0, 10.0));
            let q = queue_cont(&a, &s, -30.0);
            let (s0, t0) = (-20.0, 5.0);
            let a_cnt = count_in(&a, s0, t0);
            let s_cnt = count_in(&s, s0, t0);
            assert_eq!(q.d_count(s0, t0), a_cnt + q.q_at(s0) - q.q_at(t0));
            assert_eq!(q.r_count(s0, t0), s_cnt + q.q_at(t0) - q.q_at(s0));
        }
    }

    #[test]
    fn queue_jumps_bounded_by_one() {
        let mut rng = RngStream::new(2).rng();
        let a = poisson_sorted(&mut rng, 1.0, (-50.0, 10.0));
        let s = poisson_sorted(&mut rng, 2.0, (-50.0, 10.0));
        let q = queue_cont(&a, &s, -50.0);
        assert!(q.q_after.iter().all(|&v| v >= 0));
        let mut prev = 0i64;
        for &v in &q.q_after {
            assert!((v - prev).abs() <= 1);
            prev = v;
        }
    }

    #[test]
    fn reconstruction_identity_holds() {
        let mut rng = RngStream::new(3).rng();
        let mut conclusive_total = 0;
        for _ in 0..50 {
            let a = poisson_sorted(&mut rng, 1.0, (-40.0, 40.0));
            let s = poisson_sorted(&mut rng, 2.0, (-40.0, 40.0));
            let q = queue_cont(&a, &s, -40.0);
            let (defects, conclusive) = reconstruction_check(&q, -20.0, 0.0);
            assert_eq!(defects, 0);
            conclusive_total += conclusive;
        }
        assert!(conclusive_total > 100);
    }

    #[test]
    fn disc_queue_hand_example() {
        // a=(1,1,0), s=(0,1,1), zero history ⇒ q=(1,1,0), d_2 = 1
        let q = queue_disc(&[1, 1, 0], &[0, 1, 1], 0);
        assert_eq!(q.q, vec![1, 1, 0]);
        assert_eq!(q.d[2], 1);
    }

    #[test]
    fn disc_queue_no_arrivals() {
        let s = vec![1, 0, 1, 1];
        let q = queue_disc(&[0, 0, 0, 0], &s, 0);
        assert!(q.q.iter().all(|&v| v == 0));
        assert!(q.d.iter().all(|&v| v == 0));
        assert_eq!(q.r, s);
    }

    #[test]
    fn disc_queue_matches_sup_definition() {
        // brute-force the sup definition on random 0/1 sequences
        let mut rng = RngStream::new(4).rng();
        for _ in 0..500 {
            let n = 12;
            let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
            let s: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
            let q = queue_disc(&a, &s, 0);
            for i in 0..n {
                let mut best = 0i64; // j = i+1 term
                for j in 0..=i {
                    let diff: i64 =
                        (j..=i).map(|k| a[k]).sum::<i64>() - (j..=i).map(|k| s[k]).sum::<i64>();
                    best = best.max(diff);
                }
                assert_eq!(q.q[i], best);
            }
        }
    }

    #[test]
    fn cont_disc_embedding_agree() {
        // continuous inputs supported on integers reproduce the discrete queue
        let mut rng = RngStream::new(5).rng();
        for _ in 0..200 {
            let n = 40i64;
            let a: Vec<i64> = (0..n).map(|_| (rng.gen::<f64>() < 0.3) as i64).collect();
            let s: Vec<i64> = (0..n).map(|_| (rng.gen::<f64>() < 0.6) as i64).collect();
            let qd = queue_disc(&a, &s, 0);
            // slot i: arrival at i − 0.6, service at i − 0.4
            let ac: Vec<f64> = (0..n).filter(|&i| a[i as usize] == 1).map(|i| i as f64 - 0.6).collect();
            let sc: Vec<f64> = (0..n).filter(|&i| s[i as usize] == 1).map(|i| i as f64 - 0.4).collect();
            let qc = queue_cont(&ac, &sc, -1.0);
            for i in 0..n {
                assert_eq!(qc.q_at(i as f64), qd.q_at(i));
            }
        }
    }

    #[test]
    fn pitman_flat_path_holds() {
        let out = pitman_check(&[], &[], 0.0);
        assert!(out.holds && out.inconclusive == 0);
    }

    #[test]
    fn pitman_small_paths_exhaustive() {
        // every arrival/service layout with ≤ 5 events on distinct times
        let mut rng = RngStream::new(6).rng();
        for _ in 0..2000 {
            let n_a = rng.gen_range(0..=3);
            let n_s = rng.gen_range(0..=3);
            let mut a: Vec<f64> = (0..n_a).map(|_| rng.gen_range(0.0..10.0)).collect();
            let mut s: Vec<f64> = (0..n_s).map(|_| rng.gen_range(0.0..10.0)).collect();
            a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            s.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let out = pitman_check(&a, &s, 0.0);
            assert!(out.holds, "defect {} on a={a:?} s={s:?}", out.max_defect);
        }
    }

    #[test]
    fn burke_poisson_preconditions() {
        assert!(burke_poisson_test(2.0, 1.0, (-200.0, 10.0), 1000, RngStream::new(1), 0.01).is_err());
        assert!(burke_poisson_test(1.0, 2.0, (-200.0, 10.0), 50, RngStream::new(1), 0.01).is_err());
    }

    #[test]
    fn burke_bernoulli_preconditions() {
        assert!(burke_bernoulli_test(0.6, 0.6, (-200, 10), 1000, RngStream::new(1), 0.01).is_err());
    }

    #[test]
    fn burke_poisson_smoke() {
        let report =
            burke_poisson_test(1.0, 2.0, (-200.0, 10.0), 2000, RngStream::new(77), 0.001).unwrap();
        assert_eq!(report.sub_tests.len(), 5);
        assert!(report.all_pass(), "{:?}", report.sub_tests);
    }

    #[test]
    fn burke_bernoulli_smoke() {
        let report =
            burke_bernoulli_test(0.3, 0.6, (-200, 10), 2000, RngStream::new(78), 0.001).unwrap();
        assert_eq!(report.sub_tests.len(), 6);
        assert!(report.all_pass(), "{:?}", report.sub_tests);
    }
}
