use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankCorrelation {
    pub rho_s: f64,
    pub n: usize,
    /// Standard deviation of the bootstrap distribution of `rho_s`.
    pub ci_halfwidth: f64,
    /// Resamples that produced a defined correlation.
    pub valid_resamples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bootstrap {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for Bootstrap {
    fn default() -> Self {
        Bootstrap {
            resamples: 1000,
            seed: 1,
        }
    }
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn check_inputs(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::Stats(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Stats(
            "rank correlation needs at least 2 pairs".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Stats(
            "non-finite value in rank correlation input".into(),
        ));
    }
    Ok(())
}

/// Spearman's rho: Pearson correlation of the average ranks.
/// Undefined (an error) when either input is constant.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_inputs(xs, ys)?;
    let rho = pearson(&average_ranks(xs), &average_ranks(ys));
    if rho.is_nan() {
        return Err(Error::Stats("rank correlation of a constant input".into()));
    }
    Ok(rho)
}

/// Spearman's rho with a bootstrap spread. Resample `b` draws its indices
/// from stream `b` of a ChaCha generator keyed by the seed, so the result
/// does not depend on thread scheduling. Resamples in which either side is
/// constant are discarded.
pub fn spearman(xs: &[f64], ys: &[f64], boot: &Bootstrap) -> Result<RankCorrelation> {
    let rho_s = spearman_rho(xs, ys)?;
    let n = xs.len();
    let draws: Vec<f64> = (0..boot.resamples as u64)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(boot.seed);
            rng.set_stream(b);
            let (mut rx, mut ry) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                let i = rng.gen_range(0..n);
                rx.push(xs[i]);
                ry.push(ys[i]);
            }
            let r = pearson(&average_ranks(&rx), &average_ranks(&ry));
            r.is_finite().then_some(r)
        })
        .collect();
    let ci_halfwidth = if draws.len() < 2 {
        0.0
    } else {
        let m = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (draws.len() - 1) as f64;
        var.sqrt()
    };
    Ok(RankCorrelation {
        rho_s,
        n,
        ci_halfwidth,
        valid_resamples: draws.len(),
    })
}
