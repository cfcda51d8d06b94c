//! Codewords: the sets of simultaneously sounding pitches a work is made of.

use std::fmt;
use std::str::FromStr;

/// Highest valid MIDI note number.
pub const MAX_PITCH: u8 = 127;

/// A nonempty set of MIDI pitches sounding together, kept sorted and
/// deduplicated so that structural equality is set equality. Octaves are
/// retained: `{48, 60}` and `{60}` are different codewords.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword(Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodewordError {
    #[error("codeword has no pitches")]
    Empty,
    #[error("pitch {0} outside 0..=127")]
    PitchOutOfRange(i64),
    #[error("pitches not strictly ascending at {0}")]
    NotAscending(u8),
    #[error("invalid pitch token {0:?}")]
    BadToken(String),
}

impl Codeword {
    /// Builds a codeword from pitches in any order, dropping duplicates.
    pub fn from_pitches<I>(pitches: I) -> Result<Self, CodewordError>
    where
        I: IntoIterator<Item = u8>,
    {
        let mut v: Vec<u8> = pitches.into_iter().collect();
        if v.is_empty() {
            return Err(CodewordError::Empty);
        }
        v.sort_unstable();
        v.dedup();
        if let Some(&p) = v.last() {
            if p > MAX_PITCH {
                return Err(CodewordError::PitchOutOfRange(p.into()));
            }
        }
        Ok(Codeword(v))
    }

    /// Builds a codeword from an already canonical pitch list, rejecting
    /// anything that is not strictly ascending.
    pub fn from_sorted(pitches: Vec<u8>) -> Result<Self, CodewordError> {
        if pitches.is_empty() {
            return Err(CodewordError::Empty);
        }
        for w in pitches.windows(2) {
            if w[1] <= w[0] {
                return Err(CodewordError::NotAscending(w[1]));
            }
        }
        if let Some(&p) = pitches.last() {
            if p > MAX_PITCH {
                return Err(CodewordError::PitchOutOfRange(p.into()));
            }
        }
        Ok(Codeword(pitches))
    }

    pub fn pitches(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Renders as the interchange form, e.g. `60,64,67`.
impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Parses the interchange form. Pitches must be ascending base-10 integers
/// separated by commas; surrounding whitespace is tolerated.
impl FromStr for Codeword {
    type Err = CodewordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pitches = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            let value: i64 = tok
                .parse()
                .map_err(|_| CodewordError::BadToken(tok.to_string()))?;
            if !(0..=i64::from(MAX_PITCH)).contains(&value) {
                return Err(CodewordError::PitchOutOfRange(value));
            }
            pitches.push(value as u8);
        }
        Codeword::from_sorted(pitches)
    }
}

/// An ordered, nonempty list of codewords in musical time order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodewordSequence(Vec<Codeword>);

impl CodewordSequence {
    /// Returns `None` for an empty list.
    pub fn new(codewords: Vec<Codeword>) -> Option<Self> {
        if codewords.is_empty() {
            None
        } else {
            Some(CodewordSequence(codewords))
        }
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> &Codeword {
        &self.0[0]
    }

    /// Consecutive codeword pairs `(γk, γk+1)`.
    pub fn transitions(&self) -> impl Iterator<Item = (&Codeword, &Codeword)> {
        self.0.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Codeword> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Codeword> {
        self.0
    }
}

impl<'a> IntoIterator for &'a CodewordSequence {
    type Item = &'a Codeword;
    type IntoIter = std::slice::Iter<'a, Codeword>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
