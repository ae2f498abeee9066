//! Small statistics helpers: Kolmogorov–Smirnov tests, binomial intervals,
//! log-log slopes.

use alloc::vec::Vec;

use crate::math;

/// Asymptotic Kolmogorov tail `P(K > lambda)`.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = math::exp(-2.0 * kf * kf * lambda * lambda);
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn p_value(d: f64, n_eff: f64) -> f64 {
    let s = math::sqrt(n_eff);
    kolmogorov_tail((s + 0.12 + 0.11 / s) * d)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

/// Two-sample test: `(D, p-value)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    (d, p_value(d, na * nb / (na + nb)))
}

/// One-sample test against a continuous distribution function.
pub fn ks_one_sample(a: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let a = sorted(a);
    let n = a.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in a.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    (d, p_value(d, n))
}

/// Normal-approximation 95% half-width of a binomial proportion, with the
/// Wilson correction for small counts.
pub fn binomial_half_width(k: usize, n: usize) -> f64 {
    let n = n as f64;
    let p = k as f64 / n;
    let z = 1.96;
    let denom = 1.0 + z * z / n;
    z * math::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
}

/// Whether `k1/n1` exceeds `k2/n2` by more than the combined 95% half-widths.
pub fn separated_above(k1: usize, n1: usize, k2: usize, n2: usize) -> bool {
    let (p1, p2) = (k1 as f64 / n1 as f64, k2 as f64 / n2 as f64);
    p1 - p2 > binomial_half_width(k1, n1) + binomial_half_width(k2, n2)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| math::ln(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| math::ln(*v)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Empirical quantile by linear interpolation (`q` in `[0, 1]`).
pub fn quantile(v: &[f64], q: f64) -> f64 {
    let s = sorted(v);
    let h = q * (s.len() - 1) as f64;
    let lo = math::floor(h) as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

/// CDF of the first coordinate of the uniform law on the disk of radius
/// `r` centered at the origin.
pub fn disk_coordinate_cdf(x: f64, r: f64) -> f64 {
    let t = (x / r).clamp(-1.0, 1.0);
    0.5 + (t * math::sqrt(1.0 - t * t) + math::asin(t)) / math::PI
}
