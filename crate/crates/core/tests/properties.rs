mod common;

use std::collections::BTreeSet;

use common::*;
use musnov::chordify::quantize;
use musnov::corpus::{read_sequence_file, write_sequence};
use musnov::stats::{spearman_rho, unique_transition_growth};
use musnov::{
    build_pool, chordify, load_corpus_dir, save_corpus, Analyzer, ChordifyOptions, Composer,
    Corpus, NoteEvent, Reference, Work,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus_from_seed(seed: u64) -> (Vec<NaiveWork>, Corpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (works, n) = random_corpus(&mut rng, &RandomCorpusSpec::default());
    let corpus = to_corpus(&works, n);
    (works, corpus)
}

fn notes() -> impl Strategy<Value = Vec<NoteEvent>> {
    prop::collection::vec((0u64..4000, 1u64..800, 36u8..96, 0u16..3), 1..40).prop_map(|v| {
        v.into_iter()
            .map(|(on, dur, pitch, track)| NoteEvent {
                onset_tick: on,
                release_tick: on + dur,
                pitch,
                track,
            })
            .collect()
    })
}

/// Pitches sounding at quantum `t`, by direct scan.
fn sounding_at(events: &[NoteEvent], tpb: u32, div: u32, t: u64) -> Vec<u8> {
    let set: BTreeSet<u8> = events
        .iter()
        .filter(|e| {
            let on = quantize(e.onset_tick, tpb, div);
            let off = quantize(e.release_tick, tpb, div).max(on + 1);
            on <= t && t < off
        })
        .map(|e| e.pitch)
        .collect();
    set.into_iter().collect()
}

fn count_opening(works: &[&NaiveWork], c: &[u8]) -> usize {
    works.iter().filter(|w| w.seq[0] == c).count()
}

fn count_pair(works: &[&NaiveWork], a: &[u8], b: &[u8]) -> usize {
    works
        .iter()
        .map(|w| w.seq.windows(2).filter(|p| p[0] == a && p[1] == b).count())
        .sum()
}

fn with_extra_work(corpus: &Corpus, extra: Work) -> Corpus {
    let composers: Vec<Composer> = corpus.composers().cloned().collect();
    let mut works = corpus.works().to_vec();
    works.push(extra);
    Corpus::new(composers, works).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chordify_slices_every_distinct_onset(events in notes(), tpb in prop::sample::select(vec![96u32, 120, 480, 960])) {
        let opts = ChordifyOptions::default();
        let div = opts.quantization_divisor;
        let seq = chordify(&events, tpb, &opts).unwrap();
        let onsets: BTreeSet<u64> = events.iter().map(|e| quantize(e.onset_tick, tpb, div)).collect();
        prop_assert_eq!(seq.len(), onsets.len());
        for (cw, &t) in seq.iter().zip(onsets.iter()) {
            prop_assert_eq!(cw.pitches(), &sounding_at(&events, tpb, div, t)[..]);
        }
        prop_assert_eq!(chordify(&events, tpb, &opts).unwrap(), seq);
    }

    #[test]
    fn chordify_ignores_event_order(events in notes(), seed in any::<u64>()) {
        let opts = ChordifyOptions::default();
        let mut shuffled = events.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(chordify(&events, 480, &opts).unwrap(), chordify(&shuffled, 480, &opts).unwrap());
    }

    #[test]
    fn sequence_file_round_trip(events in notes()) {
        let seq = chordify(&events, 480, &ChordifyOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.txt");
        write_sequence(&path, &seq).unwrap();
        prop_assert_eq!(read_sequence_file(&path).unwrap(), seq.codewords().to_vec());
    }

    #[test]
    fn corpus_round_trip(seed in any::<u64>()) {
        let (_, corpus) = corpus_from_seed(seed);
        let dir = tempfile::tempdir().unwrap();
        save_corpus(&corpus, dir.path()).unwrap();
        prop_assert_eq!(&load_corpus_dir(dir.path()).unwrap(), &corpus);
    }

    #[test]
    fn reference_pools_are_strictly_earlier(seed in any::<u64>()) {
        let (_, corpus) = corpus_from_seed(seed);
        for u in corpus.works() {
            let history: Vec<&str> = corpus.works_before(&u.id, Reference::History).unwrap().iter().map(|w| w.id.as_str()).collect();
            let own = corpus.works_before(&u.id, Reference::Own).unwrap();
            prop_assert!(!history.contains(&u.id.as_str()));
            for w in &own {
                prop_assert!(history.contains(&w.id.as_str()));
                prop_assert_eq!(&w.composer_id, &u.composer_id);
            }
            for v in corpus.works() {
                let v_before_u = history.contains(&v.id.as_str());
                let u_before_v = corpus.works_before(&v.id, Reference::History).unwrap().iter().any(|w| w.id == u.id);
                prop_assert!(!(v_before_u && u_before_v));
                prop_assert_eq!(v_before_u, v.year < u.year);
            }
        }
    }

    #[test]
    fn novelty_is_bounded(seed in any::<u64>(), alpha in prop::sample::select(vec![0.1, 0.5, 1.0, 2.0])) {
        let (_, corpus) = corpus_from_seed(seed);
        let an = Analyzer::new(&corpus, alpha).unwrap();
        let v = corpus.vocab_size() as f64;
        for w in corpus.works() {
            for mode in [Reference::History, Reference::Own] {
                let pool = an.pool(&w.id, mode).unwrap();
                let nu = an.novelty(&w.id, mode).unwrap().value();
                let bound = ((pool.max_total() as f64 + alpha * v) / alpha).log10();
                prop_assert!(nu >= 0.0);
                prop_assert!(nu <= bound + 1e-12, "{} > {}", nu, bound);
            }
        }
    }

    #[test]
    fn pool_order_does_not_matter(seed in any::<u64>(), shuffle in any::<u64>()) {
        let (_, corpus) = corpus_from_seed(seed);
        let seqs: Vec<&[u32]> = (0..corpus.works().len()).map(|i| corpus.encoded(i)).collect();
        let mut shuffled = seqs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let a = build_pool(seqs.iter().copied(), corpus.vocab_size(), 1.0).unwrap();
        let b = build_pool(shuffled.iter().copied(), corpus.vocab_size(), 1.0).unwrap();
        for s in &seqs {
            prop_assert_eq!(a.novelty(s).value().to_bits(), b.novelty(s).value().to_bits());
        }

        let composers: Vec<Composer> = corpus.composers().cloned().collect();
        let mut works = corpus.works().to_vec();
        works.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let reordered = Corpus::new(composers, works).unwrap();
        let x = Analyzer::new(&corpus, 1.0).unwrap().work_novelties().unwrap();
        let y = Analyzer::new(&reordered, 1.0).unwrap().work_novelties().unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn influence_is_nonnegative_and_zero_exactly_without_shared_counts(seed in any::<u64>()) {
        let (works, corpus) = corpus_from_seed(seed);
        let an = Analyzer::new(&corpus, 1.0).unwrap();
        for target in &works {
            for source in corpus.composers() {
                if source.id == target.composer {
                    continue;
                }
                let eta = an.influence(&source.id, &target.id).unwrap().eta;
                prop_assert!(eta >= 0.0);
                let part: Vec<&NaiveWork> = works.iter().filter(|w| w.year < target.year && w.composer == source.id).collect();
                let shared = count_opening(&part, &target.seq[0]) > 0
                    || target.seq.windows(2).any(|p| count_pair(&part, &p[0], &p[1]) > 0);
                prop_assert_eq!(eta == 0.0, !shared, "eta {}", eta);
            }
        }
    }

    #[test]
    fn influence_of_a_union_dominates_its_parts(seed in any::<u64>()) {
        let (works, corpus) = corpus_from_seed(seed);
        let an = Analyzer::new(&corpus, 1.0).unwrap();
        for target in &works {
            let earlier: Vec<&str> = works.iter().filter(|w| w.year < target.year).map(|w| w.id.as_str()).collect();
            if earlier.len() < 2 {
                continue;
            }
            let (left, right) = earlier.split_at(earlier.len() / 2);
            let a = an.influence_of_works(left, &target.id).unwrap();
            let b = an.influence_of_works(right, &target.id).unwrap();
            let both = an.influence_of_works(&earlier, &target.id).unwrap();
            prop_assert!(both + 1e-12 >= a.max(b));
            prop_assert!(an.influence_of_works(&[], &target.id).unwrap() == 0.0);
        }
    }

    #[test]
    fn adding_a_target_transition_to_the_source_raises_influence(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let (_, corpus) = corpus_from_seed(seed);
        let later: Vec<&Work> = corpus.works().iter().filter(|w| w.sequence.len() >= 2 && w.year > 1700).collect();
        prop_assume!(!later.is_empty());
        let target = pick.get(&later);
        let source = corpus.composers().find(|c| c.id != target.composer_id).map(|c| c.id.clone());
        let source = source.unwrap_or_else(|| "extra".into());
        let mut composers: Vec<Composer> = corpus.composers().cloned().collect();
        if corpus.composer(&source).is_none() {
            composers.push(composer(&source));
        }
        let base = Corpus::new(composers, corpus.works().to_vec()).unwrap();
        let before = Analyzer::new(&base, 1.0).unwrap().influence(&source, &target.id).unwrap().eta;
        let k = pick.index(target.sequence.len() - 1);
        let pair = musnov::CodewordSequence::new(target.sequence.codewords()[k..k + 2].to_vec()).unwrap();
        let extra = Work { id: "zz".into(), composer_id: source.clone(), year: 1699, title: String::new(), sequence: pair };
        let grown = with_extra_work(&base, extra);
        let after = Analyzer::new(&grown, 1.0).unwrap().influence(&source, &target.id).unwrap().eta;
        prop_assert!(after > before, "{} !> {}", after, before);
    }

    #[test]
    fn familiar_transition_does_not_raise_novelty(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let (_, corpus) = corpus_from_seed(seed);
        let candidates: Vec<(&Work, usize)> = corpus
            .works()
            .iter()
            .flat_map(|w| {
                let cws = w.sequence.codewords();
                (0..cws.len().saturating_sub(1))
                    .filter(move |&k| {
                        // every transition out of this row within the work goes to the same codeword
                        cws.windows(2).all(|p| p[0] != cws[k] || p[1] == cws[k + 1])
                    })
                    .map(move |k| (w, k))
            })
            .collect();
        prop_assume!(!candidates.is_empty());
        let &(target, k) = pick.get(&candidates);
        let an = Analyzer::new(&corpus, 1.0).unwrap();
        let seq = corpus.vocabulary().encode(&target.sequence).unwrap();
        let mut pool = an.pool(&target.id, Reference::History).unwrap();
        let before = pool.novelty(&seq).value();
        pool.add_transition(seq[k], seq[k + 1]).unwrap();
        let after = pool.novelty(&seq).value();
        prop_assert!(after <= before + 1e-12, "{} > {}", after, before);
    }

    #[test]
    fn spearman_is_rank_invariant(xs in prop::collection::vec(-1e3f64..1e3, 3..40), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ys = xs.clone();
        ys.shuffle(&mut rng);
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        let rho = spearman_rho(&xs, &ys).unwrap();
        let fx: Vec<f64> = xs.iter().map(|x| (x / 100.0).exp()).collect();
        let fy: Vec<f64> = ys.iter().map(|y| y * y * y + 5.0).collect();
        let rho_t = spearman_rho(&fx, &fy).unwrap();
        prop_assert!((rho - rho_t).abs() < 1e-12);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&rho));
    }

    #[test]
    fn transition_growth_is_monotone(seed in any::<u64>()) {
        let (_, corpus) = corpus_from_seed(seed);
        let growth = unique_transition_growth(&corpus);
        prop_assert!(growth.windows(2).all(|g| g[0].1 <= g[1].1 && g[0].0 < g[1].0));
        let all = build_pool((0..corpus.works().len()).map(|i| corpus.encoded(i)), corpus.vocab_size(), 1.0).unwrap();
        prop_assert_eq!(growth.last().unwrap().1, all.distinct_transitions());
    }
}

/// Adding `a -> b` also raises row `a`'s total, so a work that mostly uses
/// `a -> c` gets less probable: familiarity is only monotone per row.
#[test]
fn extra_transition_can_raise_novelty_when_its_row_is_shared() {
    let a = vec![60];
    let b = vec![62];
    let c = vec![64];
    let mut seq = vec![a.clone()];
    for _ in 0..6 {
        seq.push(c.clone());
        seq.push(a.clone());
    }
    seq.push(b.clone());
    let old = NaiveWork {
        id: "w0".into(),
        composer: "c0".into(),
        year: 1700,
        seq: vec![a.clone(), c.clone()],
    };
    let target = NaiveWork {
        id: "w1".into(),
        composer: "c0".into(),
        year: 1710,
        seq,
    };
    let extra = NaiveWork {
        id: "w2".into(),
        composer: "c0".into(),
        year: 1700,
        seq: vec![a, b],
    };
    let before = to_corpus(&[old.clone(), target.clone()], 1);
    let after = to_corpus(&[old, target, extra], 1);
    let nu0 = Analyzer::new(&before, 1.0)
        .unwrap()
        .h_novelty("w1")
        .unwrap()
        .value();
    let nu1 = Analyzer::new(&after, 1.0)
        .unwrap()
        .h_novelty("w1")
        .unwrap()
        .value();
    assert!(nu1 > nu0, "{nu1} <= {nu0}");
}
