//! Information-theoretic novelty and influence for symbolic music corpora.
//!
//! Works are read from Standard MIDI Files and sliced into codewords (sets
//! of simultaneously sounding pitches). Each work is then scored against a
//! pool of earlier works with a smoothed first-order Markov chain over
//! codeword transitions:
//!
//! * novelty is the average surprisal per codeword, in log10 units, either
//!   against all earlier works (historical) or against the composer's own
//!   earlier works (psychological);
//! * influence of a composer on a later work is the length-normalized log
//!   ratio between the work's generation probability and the probability
//!   with that composer's counts removed.

pub mod chordify;
pub mod codeword;
pub mod corpus;
pub mod error;
pub mod estimator;
pub mod metrics;
pub mod pipeline;
pub mod smf;
pub mod stats;

pub use chordify::{chordify, ChordifyOptions};
pub use codeword::{Codeword, CodewordSequence};
pub use corpus::{
    load_corpus, load_corpus_dir, save_corpus, CodewordId, Composer, Corpus, Period, Reference,
    Vocabulary, Work,
};
pub use error::{Error, Result};
pub use estimator::{build_pool, CountTable, NoveltyScore};
pub use metrics::{
    Analysis, Analyzer, ComposerNovelty, CurveSample, Eligibility, InfluenceCurve, InfluenceScore,
    WorkNovelty,
};
pub use smf::{parse_smf, NoteEvent, Smf};
