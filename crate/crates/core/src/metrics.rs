//! Historical and psychological novelty, composer influence, and the
//! windowed influence curves built from them.
//!
//! [`Analyzer`] answers single queries by building the reference pool from
//! scratch. [`Analyzer::run`] computes every work's novelty and every
//! eligible influence pair in one chronological sweep, growing the history
//! pool and the per-composer pools year by year.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::corpus::{CodewordId, Corpus, Reference};
use crate::error::{Error, Result};
use crate::estimator::{build_pool, CountTable, NoveltyScore};

#[derive(Debug, Clone, PartialEq)]
pub struct WorkNovelty {
    pub work_id: String,
    pub composer_id: String,
    pub year: i32,
    pub nu_h: NoveltyScore,
    pub nu_p: NoveltyScore,
    /// Works in the history pool.
    pub history_works: usize,
    /// Works in the composer's own pool.
    pub own_works: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComposerNovelty {
    pub composer_id: String,
    pub n_h: f64,
    pub n_p: f64,
    pub n_works: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceScore {
    pub source_composer_id: String,
    pub target_work_id: String,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub year: i32,
    pub mean_eta: f64,
    pub n_targets: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceCurve {
    pub composer_id: String,
    pub samples: Vec<CurveSample>,
}

/// Which (composer, work) pairs get an influence score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Eligibility {
    /// The source composer has at least one work dated before the target.
    #[default]
    EarlierWork,
    /// Every composer other than the target's own.
    AnyOtherComposer,
}

/// Output of a full sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// In corpus (work id) order.
    pub novelties: Vec<WorkNovelty>,
    /// Sorted by (source composer, target work).
    pub influences: Vec<InfluenceScore>,
}

/// Length-normalized log ratio of the full generation probability to the
/// one with `part`'s counts removed from every numerator. Both products
/// share their denominators, so each factor reduces to
/// `(z + a) / (z - z_part + a)`, which is exactly 1 whenever `z_part` is 0.
///
/// `full` holds the pool counts of the target's factors in order: the
/// opening codeword, then each transition.
fn eta_from_counts(full: &[u64], part: &CountTable, seq: &[CodewordId]) -> f64 {
    debug_assert_eq!(full.len(), seq.len());
    let alpha = part.alpha0();
    let mut sum = 0.0;
    let mut factor = |z: u64, z_part: u64| {
        if z_part > 0 {
            debug_assert!(z_part <= z);
            let ratio = (z as f64 + alpha) / ((z - z_part) as f64 + alpha);
            sum += ratio.log10();
        }
    };
    factor(full[0], part.initial_count(seq[0]));
    for (k, w) in seq.windows(2).enumerate() {
        factor(full[k + 1], part.transition_count(w[0], w[1]));
    }
    sum / seq.len() as f64
}

fn factor_counts(pool: &CountTable, seq: &[CodewordId]) -> Vec<u64> {
    let mut out = Vec::with_capacity(seq.len());
    out.push(pool.initial_count(seq[0]));
    out.extend(seq.windows(2).map(|w| pool.transition_count(w[0], w[1])));
    out
}

#[derive(Clone, Copy)]
enum Sources<'a> {
    All,
    Only(&'a str),
    Skip,
}

pub struct Analyzer<'c> {
    corpus: &'c Corpus,
    alpha0: f64,
}

impl<'c> Analyzer<'c> {
    pub fn new(corpus: &'c Corpus, alpha0: f64) -> Result<Self> {
        // validates alpha0
        CountTable::new(corpus.vocab_size(), alpha0)?;
        Ok(Analyzer { corpus, alpha0 })
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    fn pool_of(&self, positions: &[usize]) -> Result<CountTable> {
        build_pool(
            positions.iter().map(|&i| self.corpus.encoded(i)),
            self.corpus.vocab_size(),
            self.alpha0,
        )
    }

    /// The reference pool of a work.
    pub fn pool(&self, work_id: &str, mode: Reference) -> Result<CountTable> {
        let pos = self.corpus.work_position(work_id)?;
        self.pool_of(&self.corpus.positions_before(pos, mode))
    }

    pub fn novelty(&self, work_id: &str, mode: Reference) -> Result<NoveltyScore> {
        let pos = self.corpus.work_position(work_id)?;
        let pool = self.pool_of(&self.corpus.positions_before(pos, mode))?;
        Ok(pool.novelty(self.corpus.encoded(pos)))
    }

    /// Novelty against every strictly earlier work.
    pub fn h_novelty(&self, work_id: &str) -> Result<NoveltyScore> {
        self.novelty(work_id, Reference::History)
    }

    /// Novelty against the composer's own strictly earlier works.
    pub fn p_novelty(&self, work_id: &str) -> Result<NoveltyScore> {
        self.novelty(work_id, Reference::Own)
    }

    /// Influence of a composer on a work of another composer.
    pub fn influence(&self, source_composer: &str, target_work: &str) -> Result<InfluenceScore> {
        let target = self.corpus.work_position(target_work)?;
        if self.corpus.composer(source_composer).is_none() {
            return Err(Error::Config(format!(
                "unknown composer id {source_composer}"
            )));
        }
        let target_work_ref = &self.corpus.works()[target];
        if target_work_ref.composer_id == source_composer {
            return Err(Error::SelfInfluence {
                composer_id: source_composer.to_string(),
                work_id: target_work.to_string(),
            });
        }
        let history = self.corpus.positions_before(target, Reference::History);
        let own: Vec<usize> = history
            .iter()
            .copied()
            .filter(|&i| self.corpus.works()[i].composer_id == source_composer)
            .collect();
        let eta = self.eta(target, &history, &own)?;
        Ok(InfluenceScore {
            source_composer_id: source_composer.to_string(),
            target_work_id: target_work.to_string(),
            eta,
        })
    }

    /// Influence of an arbitrary set of works on a target. Works that are
    /// not in the target's history pool contribute nothing.
    pub fn influence_of_works(&self, source_works: &[&str], target_work: &str) -> Result<f64> {
        let target = self.corpus.work_position(target_work)?;
        let history = self.corpus.positions_before(target, Reference::History);
        let mut part = Vec::new();
        for id in source_works {
            let pos = self.corpus.work_position(id)?;
            if history.contains(&pos) && !part.contains(&pos) {
                part.push(pos);
            }
        }
        self.eta(target, &history, &part)
    }

    fn eta(&self, target: usize, history: &[usize], part: &[usize]) -> Result<f64> {
        let full = self.pool_of(history)?;
        let part = self.pool_of(part)?;
        let seq = self.corpus.encoded(target);
        Ok(eta_from_counts(&factor_counts(&full, seq), &part, seq))
    }

    /// Novelty of every work and influence of every eligible pair.
    pub fn run(&self, eligibility: Eligibility) -> Result<Analysis> {
        self.sweep(eligibility, Sources::All)
    }

    fn sweep(&self, eligibility: Eligibility, sources: Sources<'_>) -> Result<Analysis> {
        let corpus = self.corpus;
        let works = corpus.works();
        let composer_ids: Vec<&str> = corpus.composers().map(|c| c.id.as_str()).collect();
        let mut own: BTreeMap<&str, CountTable> = BTreeMap::new();
        for id in &composer_ids {
            own.insert(id, CountTable::new(corpus.vocab_size(), self.alpha0)?);
        }
        let mut history = CountTable::new(corpus.vocab_size(), self.alpha0)?;

        let mut order: Vec<usize> = (0..works.len()).collect();
        order.sort_by_key(|&i| (works[i].year, i));

        let mut novelties: Vec<Option<WorkNovelty>> = vec![None; works.len()];
        let mut influences = Vec::new();

        let mut start = 0;
        while start < order.len() {
            let year = works[order[start]].year;
            let end = start
                + order[start..]
                    .iter()
                    .take_while(|&&i| works[i].year == year)
                    .count();
            let group = &order[start..end];

            let results: Vec<(usize, WorkNovelty, Vec<InfluenceScore>)> = group
                .par_iter()
                .map(|&pos| {
                    let work = &works[pos];
                    let seq = corpus.encoded(pos);
                    let own_pool = &own[work.composer_id.as_str()];
                    let novelty = WorkNovelty {
                        work_id: work.id.clone(),
                        composer_id: work.composer_id.clone(),
                        year: work.year,
                        nu_h: history.novelty(seq),
                        nu_p: own_pool.novelty(seq),
                        history_works: history.works(),
                        own_works: own_pool.works(),
                    };
                    let full = factor_counts(&history, seq);
                    let eligible: Vec<&str> = composer_ids
                        .iter()
                        .copied()
                        .filter(|&s| s != work.composer_id)
                        .filter(|&s| match sources {
                            Sources::All => true,
                            Sources::Only(o) => o == s,
                            Sources::Skip => false,
                        })
                        .filter(|&s| match eligibility {
                            Eligibility::EarlierWork => own[s].works() > 0,
                            Eligibility::AnyOtherComposer => true,
                        })
                        .collect();
                    let scores = eligible
                        .par_iter()
                        .map(|&s| InfluenceScore {
                            source_composer_id: s.to_string(),
                            target_work_id: work.id.clone(),
                            eta: eta_from_counts(&full, &own[s], seq),
                        })
                        .collect();
                    (pos, novelty, scores)
                })
                .collect();

            for (pos, novelty, scores) in results {
                novelties[pos] = Some(novelty);
                influences.extend(scores);
            }
            for &pos in group {
                let seq = corpus.encoded(pos);
                history.add_sequence(seq)?;
                own.get_mut(works[pos].composer_id.as_str())
                    .ok_or_else(|| Error::Internal("composer table missing".into()))?
                    .add_sequence(seq)?;
            }
            start = end;
        }

        influences.sort_by(|a, b| {
            (&a.source_composer_id, &a.target_work_id)
                .cmp(&(&b.source_composer_id, &b.target_work_id))
        });
        let novelties = novelties
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Internal("work skipped by sweep".into()))?;
        Ok(Analysis {
            novelties,
            influences,
        })
    }

    pub fn work_novelties(&self) -> Result<Vec<WorkNovelty>> {
        Ok(self
            .sweep(Eligibility::EarlierWork, Sources::Skip)?
            .novelties)
    }

    pub fn all_pair_influences(&self, eligibility: Eligibility) -> Result<Vec<InfluenceScore>> {
        Ok(self.run(eligibility)?.influences)
    }

    pub fn composer_novelty(&self) -> Result<Vec<ComposerNovelty>> {
        Ok(composer_novelty(self.corpus, &self.work_novelties()?))
    }

    /// Windowed mean influence of one composer over time.
    pub fn influence_curve(
        &self,
        composer_id: &str,
        eligibility: Eligibility,
        window_years: u32,
        step_years: u32,
    ) -> Result<InfluenceCurve> {
        if self.corpus.composer(composer_id).is_none() {
            return Err(Error::Config(format!("unknown composer id {composer_id}")));
        }
        let scores = self
            .sweep(eligibility, Sources::Only(composer_id))?
            .influences;
        influence_curve(self.corpus, &scores, composer_id, window_years, step_years)
    }
}

/// Per-composer means of work novelties. Composers without works are
/// skipped with a warning.
pub fn composer_novelty(corpus: &Corpus, novelties: &[WorkNovelty]) -> Vec<ComposerNovelty> {
    let mut sums: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
    for n in novelties {
        let e = sums.entry(n.composer_id.as_str()).or_insert((0.0, 0.0, 0));
        e.0 += n.nu_h.value();
        e.1 += n.nu_p.value();
        e.2 += 1;
    }
    let mut out = Vec::new();
    for c in corpus.composers() {
        match sums.get(c.id.as_str()) {
            Some(&(h, p, n)) => out.push(ComposerNovelty {
                composer_id: c.id.clone(),
                n_h: h / n as f64,
                n_p: p / n as f64,
                n_works: n,
            }),
            None => log::warn!(
                "composer {} has no works; excluded from composer novelty",
                c.id
            ),
        }
    }
    out
}

/// Mean influence of `composer_id` on the works dated within
/// `window_years` of each grid year. The grid steps through the corpus's
/// year range; years with no scored target are omitted.
pub fn influence_curve(
    corpus: &Corpus,
    scores: &[InfluenceScore],
    composer_id: &str,
    window_years: u32,
    step_years: u32,
) -> Result<InfluenceCurve> {
    if step_years == 0 {
        return Err(Error::Config("step_years must be positive".into()));
    }
    let mut points: Vec<(i32, f64)> = Vec::new();
    for s in scores
        .iter()
        .filter(|s| s.source_composer_id == composer_id)
    {
        let work = corpus
            .work(&s.target_work_id)
            .ok_or_else(|| Error::UnknownWork(s.target_work_id.clone()))?;
        points.push((work.year, s.eta));
    }
    let mut samples = Vec::new();
    if let Some((lo, hi)) = corpus.year_range() {
        let window = i64::from(window_years);
        let mut t = lo;
        while t <= hi {
            let (sum, n) = points
                .iter()
                .filter(|(y, _)| (i64::from(*y) - i64::from(t)).abs() <= window)
                .fold((0.0, 0usize), |(s, n), (_, eta)| (s + eta, n + 1));
            if n > 0 {
                samples.push(CurveSample {
                    year: t,
                    mean_eta: sum / n as f64,
                    n_targets: n,
                });
            }
            t += step_years as i32;
        }
    }
    Ok(InfluenceCurve {
        composer_id: composer_id.to_string(),
        samples,
    })
}
