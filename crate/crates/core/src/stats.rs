//! Statistical test kernels: Kolmogorov–Smirnov (one- and two-sample),
//! chi-square goodness of fit, Poisson dispersion, correlation t-tests,
//! binomial frequency z-tests and Wilson confidence intervals.
//!
//! Conventions:
//!
//! * Every test returns `(statistic, p_value)`; report assembly and
//!   pass/fail thresholds live with the callers.
//! * KS p-values use the asymptotic Kolmogorov series with Stephens'
//!   finite-sample correction — accurate to a few 1e-3 for n ≳ 35, which is
//!   far below the resolution of the 0.01 thresholds used here.
//! * With discrete data the continuous KS null is conservative (true
//!   rejection rates are below nominal); since the suites assert that null
//!   hypotheses *hold*, this bias is in the safe direction.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};

/// Complement of the Kolmogorov distribution: `P(K > lambda)`.
///
/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2 k² λ²)`, truncated when terms drop
/// below 1e-10 (they decay doubly exponentially).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-10 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test of `sample` against a continuous CDF.
///
/// Returns `(D, p)`; `cdf` must be the hypothesized distribution function.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    assert!(!sample.is_empty(), "KS test needs a nonempty sample");
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    // Stephens' correction for finite n.
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    (d, kolmogorov_sf(lambda))
}

/// Two-sample KS test. Ties across the two samples are handled by the
/// standard ECDF sweep (both ECDFs advanced past all equal values before
/// the gap is measured).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs nonempty samples");
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_sf(lambda))
}

/// Chi-square goodness-of-fit of integer-valued observations against the
/// probability mass function `pmf` on `0..`, pooling the upper tail (and any
/// sparse cells) so that every expected count is at least `min_expected`.
///
/// Returns `(statistic, p)`; degrees of freedom are `cells − 1` (no
/// parameters are estimated from the data).
pub fn chi_square_gof(obs: &[u64], pmf: impl Fn(u64) -> f64, min_expected: f64) -> (f64, f64) {
    let n = obs.len() as f64;
    assert!(n > 0.0);
    let max = obs.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; (max + 1) as usize];
    for &o in obs {
        counts[o as usize] += 1;
    }
    // Build pooled cells left to right; the final cell absorbs the tail mass.
    let mut cells: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    let mut tail_mass = 1.0;
    for (k, &c) in counts.iter().enumerate() {
        let p = pmf(k as u64);
        acc_obs += c as f64;
        acc_exp += n * p;
        tail_mass -= p;
        if acc_exp >= min_expected {
            cells.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    // Remaining support beyond the observed maximum.
    acc_exp += n * tail_mass.max(0.0);
    if let Some(last) = cells.last_mut() {
        if acc_exp < min_expected {
            last.0 += acc_obs;
            last.1 += acc_exp;
        } else {
            cells.push((acc_obs, acc_exp));
        }
    } else {
        cells.push((acc_obs, acc_exp));
    }
    let dof = cells.len().saturating_sub(1).max(1) as f64;
    let stat: f64 = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e) * (o - e) / e } else { 0.0 })
        .sum();
    let chi = ChiSquared::new(dof).unwrap();
    (stat, 1.0 - chi.cdf(stat))
}

/// Poisson dispersion (variance/mean) test for i.i.d. counts.
///
/// Under H0 the index of dispersion `(n−1)·s²/x̄` is approximately
/// chi-square with `n−1` degrees of freedom; the returned p-value is
/// two-sided (detects both over- and under-dispersion).
pub fn poisson_dispersion(counts: &[u64]) -> (f64, f64) {
    let n = counts.len() as f64;
    assert!(n >= 2.0);
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    if mean == 0.0 {
        return (0.0, 1.0);
    }
    let ss: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum();
    let stat = ss / mean;
    let chi = ChiSquared::new(n - 1.0).unwrap();
    let cdf = chi.cdf(stat);
    (stat, 2.0 * cdf.min(1.0 - cdf))
}

/// Two-sided test of zero correlation between paired samples via the
/// t-statistic `r √((n−2)/(1−r²))`. Returns `(r, p)`.
pub fn correlation_test(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    assert!(n >= 3.0);
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, 1.0); // a degenerate margin carries no evidence
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let t = r * ((n - 2.0) / (1.0 - r * r).max(1e-300)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n - 2.0).unwrap();
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    (r, p)
}

/// Two-sided z-test that Bernoulli observations have success probability
/// `p0`. Returns `(frequency, p)`.
pub fn binomial_freq_test(successes: u64, trials: u64, p0: f64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let freq = successes as f64 / n;
    let se = (p0 * (1.0 - p0) / n).sqrt();
    if se == 0.0 {
        return (freq, if freq == p0 { 1.0 } else { 0.0 });
    }
    let z = (freq - p0) / se;
    let norm = Normal::new(0.0, 1.0).unwrap();
    (freq, 2.0 * (1.0 - norm.cdf(z.abs())))
}

/// Two-sided z-test that a sample mean equals `mu0`, with SE estimated from
/// the sample. Returns `(mean, p)`.
pub fn mean_test(sample: &[f64], mu0: f64) -> (f64, f64) {
    let n = sample.len() as f64;
    assert!(n >= 2.0);
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    if se == 0.0 {
        return (mean, if mean == mu0 { 1.0 } else { 0.0 });
    }
    let z = (mean - mu0) / se;
    let norm = Normal::new(0.0, 1.0).unwrap();
    (mean, 2.0 * (1.0 - norm.cdf(z.abs())))
}

/// Wilson score interval for a binomial proportion at confidence `1 − alpha`.
pub fn wilson_interval(successes: u64, trials: u64, alpha: f64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let norm = Normal::new(0.0, 1.0).unwrap();
    let z = norm.inverse_cdf(1.0 - alpha / 2.0);
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) + z * z / (4.0 * n)) / n).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Median of a sample (average of middle pair for even length).
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
