//! Synthetic inputs for benchmarks.

use musnov::{Codeword, CodewordSequence, Composer, Corpus, NoteEvent, Period, Work};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct SyntheticSpec {
    pub works: usize,
    pub codewords_per_work: usize,
    pub vocabulary: usize,
    pub composers: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            works: 100,
            codewords_per_work: 10_000,
            vocabulary: 1_000,
            composers: 10,
            seed: 1,
        }
    }
}

/// `n` distinct codewords of one to three pitches.
pub fn alphabet<R: Rng>(rng: &mut R, n: usize) -> Vec<Codeword> {
    let mut out: Vec<Codeword> = Vec::with_capacity(n);
    while out.len() < n {
        let k = rng.gen_range(1..=3);
        let cw = Codeword::from_pitches((0..k).map(|_| rng.gen_range(36u8..96))).unwrap();
        if !out.contains(&cw) {
            out.push(cw);
        }
    }
    out
}

/// Random walk over the alphabet that mostly steps to nearby entries, so
/// transitions recur across works. One work every three years, composers
/// assigned round-robin.
pub fn synthetic_corpus(spec: &SyntheticSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let alphabet = alphabet(&mut rng, spec.vocabulary);
    let composers = (0..spec.composers)
        .map(|i| Composer {
            id: format!("c{i}"),
            name: format!("Composer {i}"),
            birth_year: 1550,
            death_year: 2000,
            period: Period::ALL[i % Period::ALL.len()],
        })
        .collect();
    let works = (0..spec.works)
        .map(|i| {
            let mut cur = rng.gen_range(0..spec.vocabulary);
            let seq = (0..spec.codewords_per_work)
                .map(|_| {
                    cur = if rng.gen_bool(0.7) {
                        (cur + rng.gen_range(1..4)) % spec.vocabulary
                    } else {
                        rng.gen_range(0..spec.vocabulary)
                    };
                    alphabet[cur].clone()
                })
                .collect();
            Work {
                id: format!("w{i:04}"),
                composer_id: format!("c{}", i % spec.composers),
                year: 1600 + 3 * i as i32,
                title: String::new(),
                sequence: CodewordSequence::new(seq).unwrap(),
            }
        })
        .collect();
    Corpus::new(composers, works).unwrap()
}

/// `n` overlapping notes at 480 ticks per beat with onsets on a jittered
/// eighth-note grid.
pub fn synthetic_notes(n: usize, seed: u64) -> Vec<NoteEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let onset = 240 * i as u64 / 2 + rng.gen_range(0..10);
            NoteEvent {
                onset_tick: onset,
                release_tick: onset + rng.gen_range(60..1920),
                pitch: rng.gen_range(36..96),
                track: rng.gen_range(0..4),
            }
        })
        .collect()
}
