//! End-to-end drivers: MIDI ingestion into the corpus layout, and the
//! analysis runs that write CSV tables.
//!
//! Every output is sorted and formatted deterministically, so identical
//! inputs and configuration give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::chordify::{chordify, ChordifyOptions};
use crate::codeword::CodewordSequence;
use crate::corpus::{format, save_corpus, Corpus, Period, Work, WorkRecord};
use crate::error::{Error, Result};
use crate::metrics::{self, Analysis, Analyzer, ComposerNovelty, Eligibility, InfluenceCurve};
use crate::smf::parse_smf;
use crate::stats::{self, Bootstrap, PowerLawFit, RankCorrelation};

pub const WORK_NOVELTY_FILE: &str = "work_novelty.csv";
pub const COMPOSER_NOVELTY_FILE: &str = "composer_novelty.csv";
pub const PERIOD_SUMMARY_FILE: &str = "period_summary.csv";
pub const INFLUENCE_PAIRS_FILE: &str = "influence_pairs.csv";
pub const INFLUENCE_CURVES_FILE: &str = "influence_curves.csv";
pub const DISTRIBUTION_FILE: &str = "distribution.csv";
pub const FIT_FILE: &str = "fit.txt";
pub const GROWTH_FILE: &str = "growth.csv";
pub const CORRELATIONS_FILE: &str = "correlations.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub chordify: ChordifyOptions,
    pub alpha0: f64,
    /// Overrides |Γ|; defaults to the observed vocabulary.
    pub vocab_size: Option<usize>,
    pub window_years: u32,
    pub step_years: u32,
    pub bootstrap: Bootstrap,
    pub eligibility: Eligibility,
    /// Restricts influence curves to one composer.
    pub composer: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            chordify: ChordifyOptions::default(),
            alpha0: 1.0,
            vocab_size: None,
            window_years: 10,
            step_years: 1,
            bootstrap: Bootstrap::default(),
            eligibility: Eligibility::EarlierWork,
            composer: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.chordify.quantization_divisor == 0 {
            return bad("quantization divisor must be positive");
        }
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return bad("alpha0 must be positive");
        }
        if self.vocab_size == Some(0) {
            return bad("vocabulary size must be positive");
        }
        if self.window_years == 0 {
            return bad("window must be positive");
        }
        if self.step_years == 0 {
            return bad("step must be positive");
        }
        if self.bootstrap.resamples == 0 {
            return bad("bootstrap resamples must be positive");
        }
        Ok(())
    }

    /// Applies the vocabulary override.
    pub fn prepare(&self, corpus: Corpus) -> Result<Corpus> {
        match self.vocab_size {
            Some(v) => corpus.with_vocab_size(v),
            None => Ok(corpus),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestedWork {
    pub work_id: String,
    pub codewords: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IngestReport {
    pub works: Vec<IngestedWork>,
    /// Files skipped under `skip_bad`, with the reason.
    pub skipped: Vec<(PathBuf, String)>,
}

fn ingest_one(
    midi_dir: &Path,
    record: &WorkRecord,
    opts: &ChordifyOptions,
) -> Result<(Work, Vec<String>)> {
    let path = midi_dir.join(&record.sequence_file);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let smf = parse_smf(&bytes).map_err(|source| Error::Midi {
        work_id: record.work_id.clone(),
        source,
    })?;
    let sequence: CodewordSequence = chordify(&smf.notes, smf.division.ticks_per_beat(), opts)
        .map_err(|source| Error::Chordify {
            work_id: record.work_id.clone(),
            source,
        })?;
    let year = record
        .year
        .ok_or_else(|| Error::Undated(record.work_id.clone()))?;
    let warnings = smf.warnings.iter().map(|w| w.to_string()).collect();
    Ok((
        Work {
            id: record.work_id.clone(),
            composer_id: record.composer_id.clone(),
            year,
            title: record.title.clone(),
            sequence,
        },
        warnings,
    ))
}

/// Parses and chordifies every MIDI file named in `works_csv` (its
/// `sequence_file` column is relative to `midi_dir`) and writes the
/// resulting corpus to `out_dir`.
pub fn ingest(
    midi_dir: &Path,
    works_csv: &Path,
    composers_csv: &Path,
    out_dir: &Path,
    opts: &ChordifyOptions,
    skip_bad: bool,
) -> Result<IngestReport> {
    let composers = format::read_composers(composers_csv)?;
    let records: Vec<WorkRecord> = format::read_csv(works_csv)?;
    let results: Vec<Result<(Work, Vec<String>)>> = records
        .par_iter()
        .map(|r| ingest_one(midi_dir, r, opts))
        .collect();

    let mut works = Vec::new();
    let mut report = IngestReport::default();
    let mut failures = Vec::new();
    for (record, result) in records.iter().zip(results) {
        match result {
            Ok((work, warnings)) => {
                for w in &warnings {
                    log::warn!("work {}: {w}", work.id);
                }
                report.works.push(IngestedWork {
                    work_id: work.id.clone(),
                    codewords: work.sequence.len(),
                    warnings,
                });
                works.push(work);
            }
            Err(e) => failures.push((midi_dir.join(&record.sequence_file), e.to_string())),
        }
    }
    if !failures.is_empty() {
        if !skip_bad {
            return Err(Error::IngestFailed(failures));
        }
        for (path, reason) in &failures {
            log::warn!("skipping {}: {reason}", path.display());
        }
        report.skipped = failures;
    }
    report.works.sort_by(|a, b| a.work_id.cmp(&b.work_id));
    let corpus = Corpus::new(composers, works)?;
    save_corpus(&corpus, out_dir)?;
    Ok(report)
}

/// Which groups of tables an analysis run writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub novelty: bool,
    pub influence: bool,
    pub stats: bool,
}

impl Outputs {
    pub const ALL: Outputs = Outputs {
        novelty: true,
        influence: true,
        stats: true,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeSummary {
    pub works: usize,
    pub influence_pairs: usize,
    pub fit: Option<PowerLawFit>,
    pub work_correlation: Option<RankCorrelation>,
    pub composer_correlation: Option<RankCorrelation>,
    pub files: Vec<PathBuf>,
}

fn write_file(path: &Path, body: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))?;
    files.push(path.to_path_buf());
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// Runs the requested analyses on `corpus` and writes their tables into
/// `out_dir`.
pub fn analyze(
    corpus: &Corpus,
    config: &PipelineConfig,
    out_dir: &Path,
    outputs: Outputs,
) -> Result<AnalyzeSummary> {
    config.validate()?;
    if let Some(c) = &config.composer {
        if corpus.composer(c).is_none() {
            return Err(Error::Config(format!("unknown composer id {c}")));
        }
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let analyzer = Analyzer::new(corpus, config.alpha0)?;
    let analysis = if outputs.influence {
        analyzer.run(config.eligibility)?
    } else {
        Analysis {
            novelties: analyzer.work_novelties()?,
            influences: Vec::new(),
        }
    };
    let composer_scores = metrics::composer_novelty(corpus, &analysis.novelties);

    let mut summary = AnalyzeSummary {
        works: corpus.works().len(),
        influence_pairs: analysis.influences.len(),
        fit: None,
        work_correlation: None,
        composer_correlation: None,
        files: Vec::new(),
    };
    let files = &mut summary.files;

    if outputs.novelty {
        write_file(
            &out_dir.join(WORK_NOVELTY_FILE),
            &work_novelty_csv(&analysis),
            files,
        )?;
        write_file(
            &out_dir.join(COMPOSER_NOVELTY_FILE),
            &composer_novelty_csv(corpus, &composer_scores),
            files,
        )?;
        write_file(
            &out_dir.join(PERIOD_SUMMARY_FILE),
            &period_summary_csv(corpus, &analysis),
            files,
        )?;
    }

    if outputs.influence {
        let mut body = String::from("source,target,eta\n");
        for s in &analysis.influences {
            writeln!(
                body,
                "{},{},{}",
                s.source_composer_id, s.target_work_id, s.eta
            )
            .unwrap();
        }
        write_file(&out_dir.join(INFLUENCE_PAIRS_FILE), &body, files)?;

        let mut curves: Vec<InfluenceCurve> = Vec::new();
        for c in corpus.composers() {
            if config.composer.as_ref().is_some_and(|f| f != &c.id) {
                continue;
            }
            curves.push(metrics::influence_curve(
                corpus,
                &analysis.influences,
                &c.id,
                config.window_years,
                config.step_years,
            )?);
        }
        let mut body = String::from("composer,t,mean_eta,n\n");
        for curve in &curves {
            for s in &curve.samples {
                writeln!(
                    body,
                    "{},{},{},{}",
                    curve.composer_id, s.year, s.mean_eta, s.n_targets
                )
                .unwrap();
            }
        }
        write_file(&out_dir.join(INFLUENCE_CURVES_FILE), &body, files)?;
    }

    if outputs.stats {
        let counts: Vec<u64> = stats::codeword_occurrence_counts(corpus)
            .into_values()
            .collect();
        let mut body = String::from("count,ccdf\n");
        for (c, p) in stats::ccdf(&counts) {
            writeln!(body, "{c},{p}").unwrap();
        }
        write_file(&out_dir.join(DISTRIBUTION_FILE), &body, files)?;

        let fit = stats::fit_power_law(&counts);
        write_file(&out_dir.join(FIT_FILE), &fit_txt(&fit, counts.len()), files)?;
        summary.fit = fit.ok();

        let mut body = String::from("year,cumulative_unique_transitions\n");
        for (year, n) in stats::unique_transition_growth(corpus) {
            writeln!(body, "{year},{n}").unwrap();
        }
        write_file(&out_dir.join(GROWTH_FILE), &body, files)?;

        let work_h: Vec<f64> = analysis.novelties.iter().map(|n| n.nu_h.value()).collect();
        let work_p: Vec<f64> = analysis.novelties.iter().map(|n| n.nu_p.value()).collect();
        let comp_h: Vec<f64> = composer_scores.iter().map(|c| c.n_h).collect();
        let comp_p: Vec<f64> = composer_scores.iter().map(|c| c.n_p).collect();
        let works_rc = stats::spearman(&work_h, &work_p, &config.bootstrap);
        let comps_rc = stats::spearman(&comp_h, &comp_p, &config.bootstrap);
        let mut body = String::from("level,n,rho_s,ci_halfwidth,resamples,method\n");
        for (level, n, rc) in [
            ("works", work_h.len(), &works_rc),
            ("composers", comp_h.len(), &comps_rc),
        ] {
            match rc {
                Ok(r) => writeln!(
                    body,
                    "{level},{},{},{},{},bootstrap_sd(seed={})",
                    r.n, r.rho_s, r.ci_halfwidth, r.valid_resamples, config.bootstrap.seed
                ),
                Err(e) => {
                    log::warn!("{level} correlation unavailable: {e}");
                    writeln!(body, "{level},{n},NA,NA,0,unavailable")
                }
            }
            .unwrap();
        }
        write_file(&out_dir.join(CORRELATIONS_FILE), &body, files)?;
        summary.work_correlation = works_rc.ok();
        summary.composer_correlation = comps_rc.ok();
    }
    Ok(summary)
}

fn work_novelty_csv(analysis: &Analysis) -> String {
    let mut body = String::from("work_id,year,composer_id,nu_H,nu_P\n");
    for n in &analysis.novelties {
        writeln!(
            body,
            "{},{},{},{},{}",
            n.work_id, n.year, n.composer_id, n.nu_h, n.nu_p
        )
        .unwrap();
    }
    body
}

fn composer_novelty_csv(corpus: &Corpus, scores: &[ComposerNovelty]) -> String {
    let mut body = String::from("composer_id,name,period,midpoint,n_works,N_H,N_P\n");
    for s in scores {
        let c = corpus
            .composer(&s.composer_id)
            .expect("composer from corpus");
        writeln!(
            body,
            "{},{},{},{},{},{},{}",
            s.composer_id,
            csv_field(&c.name),
            c.period,
            c.midpoint(),
            s.n_works,
            s.n_h,
            s.n_p
        )
        .unwrap();
    }
    body
}

fn period_summary_csv(corpus: &Corpus, analysis: &Analysis) -> String {
    let mut body = String::from("period,n_works,median_nu_H,median_nu_P\n");
    for period in Period::ALL {
        let (mut h, mut p): (Vec<f64>, Vec<f64>) = analysis
            .novelties
            .iter()
            .filter(|n| corpus.composer(&n.composer_id).map(|c| c.period) == Some(period))
            .map(|n| (n.nu_h.value(), n.nu_p.value()))
            .unzip();
        if h.is_empty() {
            continue;
        }
        writeln!(
            body,
            "{period},{},{},{}",
            h.len(),
            opt(median(&mut h)),
            opt(median(&mut p))
        )
        .unwrap();
    }
    body
}

fn fit_txt(fit: &Result<PowerLawFit>, n_codewords: usize) -> String {
    let mut body = String::new();
    writeln!(
        body,
        "# discrete power-law fit of codeword occurrence counts"
    )
    .unwrap();
    writeln!(
        body,
        "# density p(x) ~ x^-alpha for x >= xmin; cumulative P(X >= x) ~ x^-(alpha - 1)"
    )
    .unwrap();
    writeln!(body, "samples = {n_codewords}").unwrap();
    match fit {
        Ok(f) => {
            writeln!(body, "density_exponent = {}", f.density_exponent).unwrap();
            writeln!(body, "cumulative_exponent = {}", f.cumulative_exponent).unwrap();
            writeln!(body, "stderr = {}", f.stderr).unwrap();
            writeln!(body, "xmin = {}", f.xmin).unwrap();
            writeln!(body, "n_tail = {}", f.n_tail).unwrap();
            writeln!(body, "ks_distance = {}", f.ks_distance).unwrap();
            writeln!(body, "ks_flag = {}", f.ks_flag).unwrap();
        }
        Err(e) => writeln!(body, "error = {e}").unwrap(),
    }
    body
}
