// On-disk corpus layout:
//
//   works.csv      work_id,composer_id,year,title,sequence_file
//   composers.csv  composer_id,name,birth_year,death_year,period
//   sequences/     one text file per work, one codeword per line
//
// Sequence lines are ascending pitches joined by commas ("60,64,67").
// Blank lines and anything after '#' are ignored.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Composer, Corpus, Period, Work};
use crate::codeword::{Codeword, CodewordSequence};
use crate::error::{Error, Result};

pub const WORKS_FILE: &str = "works.csv";
pub const COMPOSERS_FILE: &str = "composers.csv";
pub const SEQUENCE_DIR: &str = "sequences";

const WORK_HEADER: [&str; 5] = ["work_id", "composer_id", "year", "title", "sequence_file"];
const COMPOSER_HEADER: [&str; 5] = ["composer_id", "name", "birth_year", "death_year", "period"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkRecord {
    pub work_id: String,
    pub composer_id: String,
    pub year: Option<i32>,
    pub title: String,
    pub sequence_file: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposerRecord {
    pub composer_id: String,
    pub name: String,
    pub birth_year: i32,
    pub death_year: i32,
    pub period: String,
}

pub(crate) fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::Fields)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::csv(path, e))
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    writer
        .write_record(header)
        .map_err(|e| Error::csv(path, e))?;
    for row in rows {
        writer.serialize(row).map_err(|e| Error::csv(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn read_composers(path: &Path) -> Result<Vec<Composer>> {
    read_csv::<ComposerRecord>(path)?
        .into_iter()
        .map(|r| {
            Ok(Composer {
                period: r.period.parse::<Period>()?,
                id: r.composer_id,
                name: r.name,
                birth_year: r.birth_year,
                death_year: r.death_year,
            })
        })
        .collect()
}

pub fn read_sequence_file(path: &Path) -> Result<Vec<Codeword>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let cw = content
            .parse::<Codeword>()
            .map_err(|e| Error::MalformedCodeword {
                path: path.to_path_buf(),
                line: n + 1,
                reason: e.to_string(),
            })?;
        out.push(cw);
    }
    Ok(out)
}

pub fn write_sequence(path: &Path, seq: &CodewordSequence) -> Result<()> {
    let mut buf = String::with_capacity(seq.len() * 8);
    for cw in seq {
        buf.push_str(&cw.to_string());
        buf.push('\n');
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Loads and validates a corpus. Sequence file names in the metadata are
/// relative to `sequence_dir`.
pub fn load_corpus(metadata: &Path, composers: &Path, sequence_dir: &Path) -> Result<Corpus> {
    let composers = read_composers(composers)?;
    let mut works = Vec::new();
    for r in read_csv::<WorkRecord>(metadata)? {
        let year = r.year.ok_or_else(|| Error::Undated(r.work_id.clone()))?;
        let path: PathBuf = sequence_dir.join(&r.sequence_file);
        if !path.is_file() {
            return Err(Error::MissingSequence {
                work_id: r.work_id,
                path,
            });
        }
        let sequence = CodewordSequence::new(read_sequence_file(&path)?)
            .ok_or_else(|| Error::EmptySequence(r.work_id.clone()))?;
        works.push(Work {
            id: r.work_id,
            composer_id: r.composer_id,
            year,
            title: r.title,
            sequence,
        });
    }
    Corpus::new(composers, works)
}

/// Loads the standard layout written by [`save_corpus`].
pub fn load_corpus_dir(dir: &Path) -> Result<Corpus> {
    load_corpus(
        &dir.join(WORKS_FILE),
        &dir.join(COMPOSERS_FILE),
        &dir.join(SEQUENCE_DIR),
    )
}

/// Writes the corpus in the standard layout. Output bytes depend only on
/// corpus content.
pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<()> {
    let seq_dir = dir.join(SEQUENCE_DIR);
    fs::create_dir_all(&seq_dir).map_err(|e| Error::io(&seq_dir, e))?;

    let composers: Vec<ComposerRecord> = corpus
        .composers()
        .map(|c| ComposerRecord {
            composer_id: c.id.clone(),
            name: c.name.clone(),
            birth_year: c.birth_year,
            death_year: c.death_year,
            period: c.period.to_string(),
        })
        .collect();
    write_csv(&dir.join(COMPOSERS_FILE), &COMPOSER_HEADER, &composers)?;

    let mut records = Vec::with_capacity(corpus.works().len());
    for w in corpus.works() {
        let file = format!("{}.txt", w.id);
        write_sequence(&seq_dir.join(&file), &w.sequence)?;
        records.push(WorkRecord {
            work_id: w.id.clone(),
            composer_id: w.composer_id.clone(),
            year: Some(w.year),
            title: w.title.clone(),
            sequence_file: file,
        });
    }
    write_csv(&dir.join(WORKS_FILE), &WORK_HEADER, &records)
}
