//! Small statistics toolbox used by the ensemble checks: Kolmogorov-Smirnov
//! tests against the thermal (exponential) intensity law and between
//! empirical samples.

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS statistic of `samples` against an exponential distribution
/// with the given mean. Returns `(d, p)` using the asymptotic finite-size
/// correction `lambda = d (sqrt(n) + 0.12 + 0.11 / sqrt(n))`.
pub fn ks_exponential(samples: &[f64], mean: f64) -> (f64, f64) {
    assert!(!samples.is_empty() && mean > 0.0);
    let mut s: Vec<f64> = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in s.iter().enumerate() {
        let cdf = 1.0 - (-x / mean).exp();
        let hi = (i as f64 + 1.0) / n - cdf;
        let lo = cdf - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    let lambda = d * (n.sqrt() + 0.12 + 0.11 / n.sqrt());
    (d, kolmogorov_sf(lambda))
}

/// Two-sample KS test. Returns `(d, p)` with the usual effective sample
/// size `ne = n m / (n + m)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        let fx = i as f64 / n as f64;
        let fy = j as f64 / m as f64;
        d = d.max((fx - fy).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = d * (ne.sqrt() + 0.12 + 0.11 / ne.sqrt());
    (d, kolmogorov_sf(lambda))
}

/// Mean and standard error of a slice.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
