//! Conventional-pool count tables and the smoothed first-order Markov
//! estimator evaluated against them.
//!
//! A pool is the bag of codeword transitions (and opening codewords) in a
//! reference set of works. Every transition over the codeword space also
//! carries `alpha0` pseudo-counts, which is what lets unseen material keep a
//! nonzero probability:
//!
//! ```text
//! P(a -> b) = (z(a -> b) + alpha0) / (sum_g z(a -> g) + alpha0 * |V|)
//! P(first)  = (z(first)  + alpha0) / (sum_g z(g)      + alpha0 * |V|)
//! ```
//!
//! All products are accumulated as sums of base-10 logarithms.

use std::collections::HashMap;
use std::fmt;

use crate::corpus::CodewordId;
use crate::error::{Error, Result};

#[inline]
pub(crate) fn pair_key(from: CodewordId, to: CodewordId) -> u64 {
    (u64::from(from) << 32) | u64::from(to)
}

/// Average surprisal per codeword of a work, in log10 units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NoveltyScore(f64);

impl NoveltyScore {
    pub fn new(value: f64) -> Self {
        NoveltyScore(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for NoveltyScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sparse transition and opening-codeword counts of a pool.
#[derive(Debug, Clone)]
pub struct CountTable {
    transitions: HashMap<u64, u64>,
    row_totals: HashMap<CodewordId, u64>,
    initial: HashMap<CodewordId, u64>,
    initial_total: u64,
    vocab_size: usize,
    alpha0: f64,
    seen: Vec<bool>,
    distinct: usize,
    works: usize,
}

impl CountTable {
    /// An empty pool over a codeword space of `vocab_size` codewords.
    pub fn new(vocab_size: usize, alpha0: f64) -> Result<Self> {
        if vocab_size == 0 {
            return Err(Error::Config("vocabulary size must be at least 1".into()));
        }
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(Error::Config(format!(
                "alpha0 must be positive, got {alpha0}"
            )));
        }
        Ok(CountTable {
            transitions: HashMap::new(),
            row_totals: HashMap::new(),
            initial: HashMap::new(),
            initial_total: 0,
            vocab_size,
            alpha0,
            seen: Vec::new(),
            distinct: 0,
            works: 0,
        })
    }

    fn mark_seen(&mut self, id: CodewordId) -> Result<()> {
        let i = id as usize;
        if i >= self.seen.len() {
            self.seen.resize(i + 1, false);
        }
        if !self.seen[i] {
            self.seen[i] = true;
            self.distinct += 1;
            if self.distinct > self.vocab_size {
                return Err(Error::VocabularyTooSmall {
                    given: self.vocab_size,
                    observed: self.distinct,
                });
            }
        }
        Ok(())
    }

    /// Adds one work's opening codeword and transitions to the pool.
    pub fn add_sequence(&mut self, seq: &[CodewordId]) -> Result<()> {
        let Some(&first) = seq.first() else {
            return Ok(());
        };
        for &id in seq {
            self.mark_seen(id)?;
        }
        *self.initial.entry(first).or_insert(0) += 1;
        self.initial_total += 1;
        for w in seq.windows(2) {
            *self.transitions.entry(pair_key(w[0], w[1])).or_insert(0) += 1;
            *self.row_totals.entry(w[0]).or_insert(0) += 1;
        }
        self.works += 1;
        Ok(())
    }

    /// Adds a single transition occurrence without an opening codeword.
    pub fn add_transition(&mut self, from: CodewordId, to: CodewordId) -> Result<()> {
        self.mark_seen(from)?;
        self.mark_seen(to)?;
        *self.transitions.entry(pair_key(from, to)).or_insert(0) += 1;
        *self.row_totals.entry(from).or_insert(0) += 1;
        Ok(())
    }

    pub fn transition_count(&self, from: CodewordId, to: CodewordId) -> u64 {
        self.transitions
            .get(&pair_key(from, to))
            .copied()
            .unwrap_or(0)
    }

    pub fn row_total(&self, from: CodewordId) -> u64 {
        self.row_totals.get(&from).copied().unwrap_or(0)
    }

    pub fn initial_count(&self, first: CodewordId) -> u64 {
        self.initial.get(&first).copied().unwrap_or(0)
    }

    pub fn initial_total(&self) -> u64 {
        self.initial_total
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// Number of works added with [`CountTable::add_sequence`].
    pub fn works(&self) -> usize {
        self.works
    }

    /// Number of distinct transitions with a nonzero count.
    pub fn distinct_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// Largest count total in any single denominator.
    pub fn max_total(&self) -> u64 {
        self.row_totals
            .values()
            .copied()
            .max()
            .unwrap_or(0)
            .max(self.initial_total)
    }

    fn prior_mass(&self) -> f64 {
        self.alpha0 * self.vocab_size as f64
    }

    pub fn transition_prob(&self, from: CodewordId, to: CodewordId) -> f64 {
        (self.transition_count(from, to) as f64 + self.alpha0)
            / (self.row_total(from) as f64 + self.prior_mass())
    }

    pub fn initial_prob(&self, first: CodewordId) -> f64 {
        (self.initial_count(first) as f64 + self.alpha0)
            / (self.initial_total as f64 + self.prior_mass())
    }

    /// log10 of the generation probability of `seq`: opening factor times
    /// one factor per transition.
    pub fn generation_log10(&self, seq: &[CodewordId]) -> f64 {
        let Some(&first) = seq.first() else {
            return 0.0;
        };
        let mut total = self.initial_prob(first).log10();
        for w in seq.windows(2) {
            total += self.transition_prob(w[0], w[1]).log10();
        }
        total
    }

    /// Length-normalized surprisal of `seq`; zero for an empty slice.
    pub fn novelty(&self, seq: &[CodewordId]) -> NoveltyScore {
        if seq.is_empty() {
            return NoveltyScore(0.0);
        }
        NoveltyScore(-self.generation_log10(seq) / seq.len() as f64)
    }
}

/// Builds the pool of a set of works.
pub fn build_pool<'a, I>(sequences: I, vocab_size: usize, alpha0: f64) -> Result<CountTable>
where
    I: IntoIterator<Item = &'a [CodewordId]>,
{
    let mut table = CountTable::new(vocab_size, alpha0)?;
    for seq in sequences {
        table.add_sequence(seq)?;
    }
    Ok(table)
}
