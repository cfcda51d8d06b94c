//! Discrete power-law fit: maximum-likelihood exponent with the lower
//! cutoff chosen by minimizing the Kolmogorov-Smirnov distance.
//!
//! The fitted model is the density `p(x) = x^-alpha / zeta(alpha, xmin)`
//! for integers `x >= xmin`. Its complementary CDF then falls off roughly
//! as `x^-(alpha - 1)`, so the exponent of the cumulative distribution is
//! reported as `alpha - 1`.

use crate::error::{Error, Result};

/// Minimum number of samples at or above `xmin`.
pub const MIN_TAIL: usize = 10;

const ALPHA_LO: f64 = 1.0 + 1e-6;
const ALPHA_HI: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Exponent of the density, `p(x) ~ x^-alpha`.
    pub density_exponent: f64,
    /// Exponent of the complementary CDF, `alpha - 1`.
    pub cumulative_exponent: f64,
    /// Asymptotic standard error of the density exponent.
    pub stderr: f64,
    pub xmin: u64,
    pub n_tail: usize,
    pub n_total: usize,
    pub ks_distance: f64,
    /// KS distance above the asymptotic 5% critical value `1.36 / sqrt(n_tail)`.
    /// Parameters are fitted, so this is a screening flag, not a test.
    pub ks_flag: bool,
}

// Bernoulli numbers B2, B4, ..., B20 for the Euler-Maclaurin tail.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta `sum_{k>=0} (q + k)^-s` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * a^(-s-2j+1)
    let mut rising = s; // s (s+1) ... (s+2j-2)
    let mut factorial = 2.0; // (2j)!
    let mut power = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / factorial * rising * power;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let j2 = 2.0 * (j as f64 + 1.0);
        rising *= (s + j2 - 1.0) * (s + j2);
        factorial *= (j2 + 1.0) * (j2 + 2.0);
        power /= a * a;
    }
    sum
}

struct Tail<'a> {
    /// Sorted ascending, all >= xmin.
    values: &'a [u64],
    sum_ln: f64,
    xmin: u64,
}

impl Tail<'_> {
    fn log_likelihood(&self, alpha: f64) -> f64 {
        let n = self.values.len() as f64;
        -n * hurwitz_zeta(alpha, self.xmin as f64).ln() - alpha * self.sum_ln
    }

    fn fit_alpha(&self) -> f64 {
        // golden-section search; the log-likelihood is concave in alpha
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (ALPHA_LO, ALPHA_HI);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = self.log_likelihood(x1);
        let mut f2 = self.log_likelihood(x2);
        while hi - lo > 1e-9 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = self.log_likelihood(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = self.log_likelihood(x1);
            }
        }
        0.5 * (lo + hi)
    }

    /// Largest gap between the empirical and fitted CDFs over the integers.
    fn ks_distance(&self, alpha: f64) -> f64 {
        let n = self.values.len() as f64;
        let norm = hurwitz_zeta(alpha, self.xmin as f64);
        // model CDF F(x) = 1 - zeta(alpha, x + 1) / norm
        let model_cdf = |x: u64| 1.0 - hurwitz_zeta(alpha, (x + 1) as f64) / norm;
        let mut d: f64 = 0.0;
        let mut i = 0;
        let mut below = 0.0; // empirical CDF just below the current value
        while i < self.values.len() {
            let x = self.values[i];
            let run = self.values[i..].iter().take_while(|&&v| v == x).count();
            i += run;
            // just before x both are flat from the previous support point;
            // at x - 1 the empirical CDF is still `below`
            if x > self.xmin {
                d = d.max((below - model_cdf(x - 1)).abs());
            }
            let at = i as f64 / n;
            d = d.max((at - model_cdf(x)).abs());
            below = at;
        }
        d
    }
}

/// Fits a discrete power law to positive integer samples.
pub fn fit_power_law(samples: &[u64]) -> Result<PowerLawFit> {
    if samples.len() < MIN_TAIL {
        return Err(Error::Stats(format!(
            "power-law fit needs at least {MIN_TAIL} samples, got {}",
            samples.len()
        )));
    }
    if samples.contains(&0) {
        return Err(Error::Stats("power-law samples must be positive".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::Stats("all samples are equal".into()));
    }

    // suffix sums of ln x, so each candidate tail is O(1) to summarize
    let mut suffix_ln = vec![0.0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + (sorted[i] as f64).ln();
    }

    let mut best: Option<PowerLawFit> = None;
    let mut start = 0;
    while start < sorted.len() {
        let xmin = sorted[start];
        let n_tail = sorted.len() - start;
        if n_tail < MIN_TAIL {
            break;
        }
        let tail = Tail {
            values: &sorted[start..],
            sum_ln: suffix_ln[start],
            xmin,
        };
        // a single distinct value carries no exponent information
        if tail.values[tail.values.len() - 1] > xmin {
            let alpha = tail.fit_alpha();
            let ks = tail.ks_distance(alpha);
            if best.is_none_or(|b| ks < b.ks_distance) {
                best = Some(PowerLawFit {
                    density_exponent: alpha,
                    cumulative_exponent: alpha - 1.0,
                    stderr: (alpha - 1.0) / (n_tail as f64).sqrt(),
                    xmin,
                    n_tail,
                    n_total: sorted.len(),
                    ks_distance: ks,
                    ks_flag: ks > 1.36 / (n_tail as f64).sqrt(),
                });
            }
        }
        start += sorted[start..].iter().take_while(|&&v| v == xmin).count();
    }
    best.ok_or_else(|| Error::Stats("no candidate cutoff leaves a usable tail".into()))
}
