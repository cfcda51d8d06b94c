#![allow(dead_code)]

//! Shared test support: a naive direct evaluator of the generation
//! probability, novelty and influence formulas, random corpus generators,
//! and an SMF writer built on `midly`.

use midly::num::{u15, u28, u4, u7};
use midly::{Format, Header, MetaMessage, MidiMessage, Smf, Timing, TrackEvent, TrackEventKind};
use musnov::{Codeword, CodewordSequence, Composer, Corpus, Period, Work};
use rand::seq::SliceRandom;
use rand::Rng;

/// Plain-data work used by the oracle.
#[derive(Debug, Clone)]
pub struct NaiveWork {
    pub id: String,
    pub composer: String,
    pub year: i32,
    pub seq: Vec<Vec<u8>>,
}

/// Distinct codewords across all works, by brute-force comparison.
pub fn naive_vocab(works: &[NaiveWork]) -> usize {
    let mut seen: Vec<&Vec<u8>> = Vec::new();
    for w in works {
        for c in &w.seq {
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
    }
    seen.len()
}

fn count_initial(pool: &[&NaiveWork], c: &[u8]) -> f64 {
    pool.iter().filter(|w| w.seq[0] == c).count() as f64
}

fn count_transition(pool: &[&NaiveWork], a: &[u8], b: &[u8]) -> f64 {
    let mut n = 0;
    for w in pool {
        for k in 0..w.seq.len().saturating_sub(1) {
            if w.seq[k] == a && w.seq[k + 1] == b {
                n += 1;
            }
        }
    }
    n as f64
}

fn count_row(pool: &[&NaiveWork], a: &[u8]) -> f64 {
    let mut n = 0;
    for w in pool {
        for k in 0..w.seq.len().saturating_sub(1) {
            if w.seq[k] == a {
                n += 1;
            }
        }
    }
    n as f64
}

/// Generation probability as a raw product of smoothed factors.
pub fn naive_generation_prob(pool: &[&NaiveWork], seq: &[Vec<u8>], v: usize, alpha: f64) -> f64 {
    let prior = alpha * v as f64;
    let mut p = (count_initial(pool, &seq[0]) + alpha) / (pool.len() as f64 + prior);
    for k in 0..seq.len() - 1 {
        p *= (count_transition(pool, &seq[k], &seq[k + 1]) + alpha)
            / (count_row(pool, &seq[k]) + prior);
    }
    p
}

pub fn naive_novelty(pool: &[&NaiveWork], seq: &[Vec<u8>], v: usize, alpha: f64) -> f64 {
    -naive_generation_prob(pool, seq, v, alpha).log10() / seq.len() as f64
}

/// Influence of `source` on `target`. The reduced product counts the
/// numerators over the works of other composers directly, while every
/// denominator keeps the full pool's counts.
pub fn naive_influence(
    works: &[NaiveWork],
    source: &str,
    target: &NaiveWork,
    v: usize,
    alpha: f64,
) -> f64 {
    let pool: Vec<&NaiveWork> = works.iter().filter(|w| w.year < target.year).collect();
    let others: Vec<&NaiveWork> = pool
        .iter()
        .copied()
        .filter(|w| w.composer != source)
        .collect();
    let prior = alpha * v as f64;
    let seq = &target.seq;
    let den0 = pool.len() as f64 + prior;
    let mut full = (count_initial(&pool, &seq[0]) + alpha) / den0;
    let mut reduced = (count_initial(&others, &seq[0]) + alpha) / den0;
    for k in 0..seq.len() - 1 {
        let den = count_row(&pool, &seq[k]) + prior;
        full *= (count_transition(&pool, &seq[k], &seq[k + 1]) + alpha) / den;
        reduced *= (count_transition(&others, &seq[k], &seq[k + 1]) + alpha) / den;
    }
    (full / reduced).log10() / seq.len() as f64
}

pub fn history_pool<'a>(works: &'a [NaiveWork], target: &NaiveWork) -> Vec<&'a NaiveWork> {
    works.iter().filter(|w| w.year < target.year).collect()
}

pub fn own_pool<'a>(works: &'a [NaiveWork], target: &NaiveWork) -> Vec<&'a NaiveWork> {
    works
        .iter()
        .filter(|w| w.year < target.year && w.composer == target.composer)
        .collect()
}

pub fn composer(id: &str) -> Composer {
    Composer {
        id: id.to_string(),
        name: format!("Composer {id}"),
        birth_year: 1650,
        death_year: 1900,
        period: Period::Other,
    }
}

pub fn to_corpus(works: &[NaiveWork], n_composers: usize) -> Corpus {
    let composers = (0..n_composers)
        .map(|i| composer(&format!("c{i}")))
        .collect();
    let works = works
        .iter()
        .map(|w| Work {
            id: w.id.clone(),
            composer_id: w.composer.clone(),
            year: w.year,
            title: format!("Work {}", w.id),
            sequence: CodewordSequence::new(
                w.seq
                    .iter()
                    .map(|c| Codeword::from_pitches(c.iter().copied()).unwrap())
                    .collect(),
            )
            .unwrap(),
        })
        .collect();
    Corpus::new(composers, works).unwrap()
}

pub struct RandomCorpusSpec {
    pub max_works: usize,
    pub max_codewords: usize,
    pub max_len: usize,
    pub max_composers: usize,
    pub year_span: i32,
}

impl Default for RandomCorpusSpec {
    fn default() -> Self {
        RandomCorpusSpec {
            max_works: 5,
            max_codewords: 20,
            max_len: 30,
            max_composers: 3,
            year_span: 6,
        }
    }
}

/// A random pool of distinct canonical codewords.
pub fn random_alphabet<R: Rng>(rng: &mut R, size: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = Vec::new();
    while out.len() < size {
        let k = rng.gen_range(1..=3);
        let mut c: Vec<u8> = (0..k).map(|_| rng.gen_range(48..84)).collect();
        c.sort_unstable();
        c.dedup();
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Returns the naive works and the number of composers.
pub fn random_corpus<R: Rng>(rng: &mut R, spec: &RandomCorpusSpec) -> (Vec<NaiveWork>, usize) {
    let n_works = rng.gen_range(1..=spec.max_works);
    let n_composers = rng.gen_range(1..=spec.max_composers);
    let alphabet_size = rng.gen_range(1..=spec.max_codewords);
    let alphabet = random_alphabet(rng, alphabet_size);
    // a smaller working alphabet per corpus makes shared transitions common
    let works = (0..n_works)
        .map(|i| {
            let len = rng.gen_range(1..=spec.max_len);
            NaiveWork {
                id: format!("w{i:02}"),
                composer: format!("c{}", rng.gen_range(0..n_composers)),
                year: 1700 + rng.gen_range(0..spec.year_span),
                seq: (0..len)
                    .map(|_| alphabet.choose(rng).unwrap().clone())
                    .collect(),
            }
        })
        .collect();
    (works, n_composers)
}

/// One note for the SMF writer: (track, onset tick, release tick, pitch).
pub type FixtureNote = (usize, u32, u32, u8);

/// Writes a format-1 file with one MTrk per track index, using running
/// status as `midly` does. `velocity_zero_off` writes releases as
/// note-on with velocity 0.
pub fn write_smf(
    ticks_per_quarter: u16,
    notes: &[FixtureNote],
    velocity_zero_off: bool,
) -> Vec<u8> {
    let n_tracks = notes.iter().map(|n| n.0).max().map_or(1, |m| m + 1);
    let mut tracks: Vec<Vec<TrackEvent<'static>>> = Vec::new();
    for t in 0..n_tracks {
        // (tick, is_on, pitch); releases sort before onsets at the same tick
        let mut events: Vec<(u32, bool, u8)> = Vec::new();
        for &(track, on, off, pitch) in notes {
            if track == t {
                events.push((on, true, pitch));
                events.push((off, false, pitch));
            }
        }
        events.sort();
        let mut last = 0;
        let mut track = Vec::new();
        for (tick, is_on, pitch) in events {
            let message = if is_on {
                MidiMessage::NoteOn {
                    key: u7::new(pitch),
                    vel: u7::new(80),
                }
            } else if velocity_zero_off {
                MidiMessage::NoteOn {
                    key: u7::new(pitch),
                    vel: u7::new(0),
                }
            } else {
                MidiMessage::NoteOff {
                    key: u7::new(pitch),
                    vel: u7::new(64),
                }
            };
            track.push(TrackEvent {
                delta: u28::new(tick - last),
                kind: TrackEventKind::Midi {
                    channel: u4::new(0),
                    message,
                },
            });
            last = tick;
        }
        track.push(TrackEvent {
            delta: u28::new(0),
            kind: TrackEventKind::Meta(MetaMessage::EndOfTrack),
        });
        tracks.push(track);
    }
    let format = if n_tracks == 1 {
        Format::SingleTrack
    } else {
        Format::Parallel
    };
    let mut smf = Smf::new(Header::new(
        format,
        Timing::Metrical(u15::new(ticks_per_quarter)),
    ));
    smf.tracks = tracks;
    let mut out = Vec::new();
    smf.write_std(&mut out).unwrap();
    out
}

pub fn cw(pitches: &[u8]) -> Codeword {
    Codeword::from_pitches(pitches.iter().copied()).unwrap()
}

pub struct Golden {
    pub name: &'static str,
    pub bytes: Vec<u8>,
    pub expected: Vec<Codeword>,
}

/// Right hand (track 0) and left hand (track 1) over four bars of 4/4 at
/// 480 ticks per quarter. Beat 1 of bar 3 is silent in both voices, and
/// the left-hand G3 in bar 2 is struck 5 ticks late.
pub const TWO_VOICE: &[FixtureNote] = &[
    // bar 1
    (0, 0, 480, 72),
    (0, 480, 960, 74),
    (0, 960, 1440, 76),
    (0, 1440, 1920, 77),
    (1, 0, 1920, 48),
    // bar 2
    (0, 1920, 2880, 79),
    (0, 2880, 3840, 76),
    (1, 1925, 2400, 55),
    (1, 2400, 2880, 59),
    (1, 2880, 3840, 60),
    // bar 3
    (0, 4320, 4800, 74),
    (0, 4800, 5760, 72),
    (1, 4320, 5760, 53),
    // bar 4
    (0, 5760, 7680, 72),
    (1, 5760, 7680, 48),
    (1, 5760, 7680, 55),
];

/// Slices of [`TWO_VOICE`], worked out by hand: one per distinct onset
/// (0, 480, 960, 1440, 1920, 2400, 2880, 4320, 4800, 5760; 1925 snaps to
/// 1920), each holding every pitch sounding at that onset.
pub fn two_voice_expected() -> Vec<Codeword> {
    [
        &[48, 72][..],
        &[48, 74],
        &[48, 76],
        &[48, 77],
        &[55, 79],
        &[59, 79],
        &[60, 76],
        &[53, 74],
        &[53, 72],
        &[48, 55, 72],
    ]
    .iter()
    .map(|p| cw(p))
    .collect()
}

pub fn golden_fixtures() -> Vec<Golden> {
    vec![
        Golden {
            name: "held note",
            bytes: write_smf(480, &[(0, 0, 960, 60), (0, 480, 960, 64)], false),
            expected: vec![cw(&[60]), cw(&[60, 64])],
        },
        Golden {
            name: "simultaneous onset across tracks",
            bytes: write_smf(480, &[(0, 0, 480, 60), (1, 0, 480, 64)], false),
            expected: vec![cw(&[60, 64])],
        },
        Golden {
            name: "rest skip",
            bytes: write_smf(480, &[(0, 0, 240, 60), (0, 960, 1200, 67)], false),
            expected: vec![cw(&[60]), cw(&[67])],
        },
        Golden {
            name: "velocity-0 note-off",
            bytes: write_smf(
                480,
                &[(0, 0, 480, 60), (0, 480, 960, 64), (0, 960, 1440, 64)],
                true,
            ),
            expected: vec![cw(&[60]), cw(&[64]), cw(&[64])],
        },
        Golden {
            name: "two-voice four bars",
            bytes: write_smf(480, TWO_VOICE, false),
            expected: two_voice_expected(),
        },
    ]
}

/// Exact inverse-CDF sampler for the discrete power law
/// `p(x) = x^-alpha / sum_{k>=xmin} k^-alpha`, with the normalizer summed
/// directly up to `MAX_SUPPORT` plus an integral bound for the remainder.
pub struct PowerLawSampler {
    xmin: u64,
    cdf: Vec<f64>,
}

const MAX_SUPPORT: u64 = 1_000_000;

impl PowerLawSampler {
    pub fn new(alpha: f64, xmin: u64) -> Self {
        let weights: Vec<f64> = (xmin..=MAX_SUPPORT)
            .map(|k| (k as f64).powf(-alpha))
            .collect();
        let tail = (MAX_SUPPORT as f64 + 0.5).powf(1.0 - alpha) / (alpha - 1.0);
        let total: f64 = weights.iter().sum::<f64>() + tail;
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        PowerLawSampler { xmin, cdf }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        let i = self.cdf.partition_point(|&c| c < u);
        self.xmin + i.min(self.cdf.len() - 1) as u64
    }

    pub fn samples<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<u64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Geometric on {1, 2, ...} with success probability `p`.
pub fn geometric_samples<R: Rng>(rng: &mut R, p: f64, n: usize) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            1 + ((1.0 - u).ln() / (1.0 - p).ln()).floor() as u64
        })
        .collect()
}

/// A large synthetic corpus: a random walk over `vocab` codewords that
/// mostly steps to nearby ids, so transitions recur across works.
pub fn synthetic_corpus<R: Rng>(
    rng: &mut R,
    n_works: usize,
    len: usize,
    vocab: usize,
    n_composers: usize,
) -> Corpus {
    let alphabet = random_alphabet(rng, vocab);
    let works: Vec<NaiveWork> = (0..n_works)
        .map(|i| {
            let mut cur = rng.gen_range(0..vocab);
            let seq = (0..len)
                .map(|_| {
                    cur = if rng.gen_bool(0.7) {
                        (cur + rng.gen_range(1..4)) % vocab
                    } else {
                        rng.gen_range(0..vocab)
                    };
                    alphabet[cur].clone()
                })
                .collect();
            NaiveWork {
                id: format!("w{i:03}"),
                composer: format!("c{}", i % n_composers),
                year: 1600 + (i as i32 * 3),
                seq,
            }
        })
        .collect();
    to_corpus(&works, n_composers)
}

/// Every file under `dir` with its bytes, sorted by relative path.
pub fn dir_contents(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &std::path::Path, dir: &std::path::Path, out: &mut Vec<(String, Vec<u8>)>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
