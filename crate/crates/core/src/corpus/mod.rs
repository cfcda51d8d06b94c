//! Works, composers and the codeword vocabulary of a corpus.

pub(crate) mod format;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

pub use format::{
    load_corpus, load_corpus_dir, read_sequence_file, save_corpus, write_sequence, ComposerRecord,
    WorkRecord, COMPOSERS_FILE, SEQUENCE_DIR, WORKS_FILE,
};

use crate::codeword::{Codeword, CodewordSequence};
use crate::error::{Error, Result};

/// Dense index of a codeword within a [`Vocabulary`].
pub type CodewordId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Period {
    Baroque,
    Classical,
    Transition,
    Romantic,
    Other,
}

impl Period {
    pub const ALL: [Period; 5] = [
        Period::Baroque,
        Period::Classical,
        Period::Transition,
        Period::Romantic,
        Period::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Period::Baroque => "Baroque",
            Period::Classical => "Classical",
            Period::Transition => "Transition",
            Period::Romantic => "Romantic",
            Period::Other => "Other",
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Period::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownPeriod(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composer {
    pub id: String,
    pub name: String,
    pub birth_year: i32,
    pub death_year: i32,
    pub period: Period,
}

impl Composer {
    /// Timeline position: midpoint of the lifespan.
    pub fn midpoint(&self) -> f64 {
        f64::from(self.birth_year + self.death_year) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Work {
    pub id: String,
    pub composer_id: String,
    pub year: i32,
    pub title: String,
    pub sequence: CodewordSequence,
}

/// Which earlier works form a work's reference pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reference {
    /// Every work dated strictly earlier.
    History,
    /// The same composer's works dated strictly earlier.
    Own,
}

/// Interning table for the codewords of a corpus. Ids follow the sorted
/// order of the codewords, so they do not depend on load order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    codewords: Vec<Codeword>,
    index: HashMap<Codeword, CodewordId>,
}

impl Vocabulary {
    pub fn from_codewords<'a, I>(codewords: I) -> Self
    where
        I: IntoIterator<Item = &'a Codeword>,
    {
        let mut sorted: Vec<Codeword> = codewords.into_iter().cloned().collect();
        sorted.sort_unstable();
        sorted.dedup();
        let index = sorted
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as CodewordId))
            .collect();
        Vocabulary {
            codewords: sorted,
            index,
        }
    }

    pub fn id(&self, codeword: &Codeword) -> Option<CodewordId> {
        self.index.get(codeword).copied()
    }

    pub fn codeword(&self, id: CodewordId) -> Option<&Codeword> {
        self.codewords.get(id as usize)
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CodewordId, &Codeword)> {
        self.codewords
            .iter()
            .enumerate()
            .map(|(i, c)| (i as CodewordId, c))
    }

    /// Encodes a sequence drawn from this vocabulary.
    pub fn encode(&self, seq: &CodewordSequence) -> Option<Vec<CodewordId>> {
        seq.iter().map(|c| self.id(c)).collect()
    }
}

/// A validated, immutable corpus.
///
/// Works are kept sorted by id. The codeword space used for the prior
/// defaults to every codeword observed in the corpus and may be enlarged
/// with [`Corpus::with_vocab_size`].
#[derive(Debug, Clone)]
pub struct Corpus {
    composers: BTreeMap<String, Composer>,
    works: Vec<Work>,
    work_index: HashMap<String, usize>,
    vocabulary: Vocabulary,
    vocab_size: usize,
    encoded: Vec<Vec<CodewordId>>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.composers == other.composers
            && self.works == other.works
            && self.vocab_size == other.vocab_size
    }
}

pub(crate) fn validate_token(token: &str) -> Result<()> {
    let ok = !token.is_empty()
        && token
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'));
    if ok && token != "." && token != ".." {
        Ok(())
    } else {
        Err(Error::InvalidToken(token.to_string()))
    }
}

impl Corpus {
    pub fn new(composers: Vec<Composer>, mut works: Vec<Work>) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        for c in composers {
            validate_token(&c.id)?;
            if c.death_year < c.birth_year {
                return Err(Error::InvalidLifespan {
                    id: c.id,
                    birth: c.birth_year,
                    death: c.death_year,
                });
            }
            if by_id.contains_key(&c.id) {
                return Err(Error::DuplicateComposer(c.id));
            }
            by_id.insert(c.id.clone(), c);
        }

        works.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in works.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateWork(pair[0].id.clone()));
            }
        }
        for w in &works {
            validate_token(&w.id)?;
            if !by_id.contains_key(&w.composer_id) {
                return Err(Error::UnknownComposer {
                    work_id: w.id.clone(),
                    composer_id: w.composer_id.clone(),
                });
            }
        }

        let vocabulary = Vocabulary::from_codewords(works.iter().flat_map(|w| w.sequence.iter()));
        let encoded = works
            .iter()
            .map(|w| {
                vocabulary
                    .encode(&w.sequence)
                    .expect("vocabulary covers corpus")
            })
            .collect();
        let work_index = works
            .iter()
            .enumerate()
            .map(|(i, w)| (w.id.clone(), i))
            .collect();
        let vocab_size = vocabulary.len().max(1);
        Ok(Corpus {
            composers: by_id,
            works,
            work_index,
            vocabulary,
            vocab_size,
            encoded,
        })
    }

    /// Overrides |Γ|; it may not be smaller than the observed vocabulary.
    pub fn with_vocab_size(mut self, vocab_size: usize) -> Result<Self> {
        if vocab_size < self.vocabulary.len() || vocab_size == 0 {
            return Err(Error::VocabularyTooSmall {
                given: vocab_size,
                observed: self.vocabulary.len(),
            });
        }
        self.vocab_size = vocab_size;
        Ok(self)
    }

    pub fn works(&self) -> &[Work] {
        &self.works
    }

    pub fn composers(&self) -> impl Iterator<Item = &Composer> {
        self.composers.values()
    }

    pub fn composer(&self, id: &str) -> Option<&Composer> {
        self.composers.get(id)
    }

    pub fn work(&self, id: &str) -> Option<&Work> {
        self.work_index.get(id).map(|&i| &self.works[i])
    }

    pub fn work_position(&self, id: &str) -> Result<usize> {
        self.work_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownWork(id.to_string()))
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    /// |Γ|, the size of the codeword space the prior is spread over.
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Interned sequence of the work at `position` in [`Corpus::works`].
    pub fn encoded(&self, position: usize) -> &[CodewordId] {
        &self.encoded[position]
    }

    /// Positions of the works in `work`'s reference pool. Same-year works
    /// never enter each other's pools.
    pub fn positions_before(&self, position: usize, mode: Reference) -> Vec<usize> {
        let target = &self.works[position];
        self.works
            .iter()
            .enumerate()
            .filter(|(_, w)| w.year < target.year)
            .filter(|(_, w)| mode == Reference::History || w.composer_id == target.composer_id)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn works_before(&self, work_id: &str, mode: Reference) -> Result<Vec<&Work>> {
        let pos = self.work_position(work_id)?;
        Ok(self
            .positions_before(pos, mode)
            .into_iter()
            .map(|i| &self.works[i])
            .collect())
    }

    /// Works of one composer, in id order.
    pub fn works_by<'a>(&'a self, composer_id: &'a str) -> impl Iterator<Item = &'a Work> + 'a {
        self.works
            .iter()
            .filter(move |w| w.composer_id == composer_id)
    }

    pub fn year_range(&self) -> Option<(i32, i32)> {
        let min = self.works.iter().map(|w| w.year).min()?;
        let max = self.works.iter().map(|w| w.year).max()?;
        Some((min, max))
    }
}
