//! Corpus-wide distributions and correlation statistics.

mod powerlaw;
mod rank;

use std::collections::{BTreeMap, HashSet};

pub use powerlaw::{fit_power_law, hurwitz_zeta, PowerLawFit, MIN_TAIL};
pub use rank::{average_ranks, spearman, spearman_rho, Bootstrap, RankCorrelation};

use crate::codeword::Codeword;
use crate::corpus::Corpus;
use crate::estimator::pair_key;

/// Number of appearances of each codeword across all works.
pub fn codeword_occurrence_counts(corpus: &Corpus) -> BTreeMap<Codeword, u64> {
    let mut counts = vec![0u64; corpus.vocabulary().len()];
    for pos in 0..corpus.works().len() {
        for &id in corpus.encoded(pos) {
            counts[id as usize] += 1;
        }
    }
    corpus
        .vocabulary()
        .iter()
        .map(|(id, cw)| (cw.clone(), counts[id as usize]))
        .filter(|(_, n)| *n > 0)
        .collect()
}

/// `(c, P(X >= c))` for each distinct value `c`, ascending.
pub fn ccdf(values: &[u64]) -> Vec<(u64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        out.push((v, (sorted.len() - i) as f64 / n));
        i += sorted[i..].iter().take_while(|&&x| x == v).count();
    }
    out
}

/// Cumulative count of distinct transitions used by works dated up to and
/// including each year that has at least one work.
pub fn unique_transition_growth(corpus: &Corpus) -> Vec<(i32, usize)> {
    let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (pos, w) in corpus.works().iter().enumerate() {
        by_year.entry(w.year).or_default().push(pos);
    }
    let mut seen = HashSet::new();
    by_year
        .into_iter()
        .map(|(year, positions)| {
            for pos in positions {
                for w in corpus.encoded(pos).windows(2) {
                    seen.insert(pair_key(w[0], w[1]));
                }
            }
            (year, seen.len())
        })
        .collect()
}
