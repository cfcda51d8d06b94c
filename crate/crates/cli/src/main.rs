use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use musnov::pipeline::{self, Outputs, PipelineConfig};
use musnov::stats::Bootstrap;
use musnov::{load_corpus_dir, Analyzer, ChordifyOptions, Corpus, Eligibility, Result};

const FORMAT_HELP: &str = "\
CORPUS FORMAT
  A corpus directory holds:
    works.csv       UTF-8 CSV with header
                    work_id,composer_id,year,title,sequence_file
    composers.csv   UTF-8 CSV with header
                    composer_id,name,birth_year,death_year,period
    sequences/      one sequence file per work, named by sequence_file

  Sequence file: UTF-8 text, one codeword per line, pitches as base-10
  integers joined by commas, ascending (e.g. `60,64,67`). Blank lines and
  `#` comments ignored.

  Ids are [A-Za-z0-9_.-]+. period is one of Baroque, Classical,
  Transition, Romantic, Other (case-insensitive). For `ingest`, works.csv
  must carry a year for every work, and sequence_file names the MIDI file
  relative to --midi.

EXIT CODES
  0 success, 1 input error, 2 internal invariant violation";

#[derive(Parser)]
#[command(
    name = "musnov",
    version,
    about = "Novelty and influence analysis of symbolic music corpora",
    after_help = FORMAT_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert MIDI files into a corpus directory
    #[command(after_help = FORMAT_HELP)]
    Ingest(IngestArgs),
    /// Run every analysis and write all tables
    #[command(after_help = FORMAT_HELP)]
    Analyze(AnalyzeArgs),
    /// Per-work and per-composer novelty tables, or one work's scores
    #[command(after_help = FORMAT_HELP)]
    Novelty(NoveltyArgs),
    /// All-pairs influence and influence curves, or one pair's score
    #[command(after_help = FORMAT_HELP)]
    Influence(InfluenceArgs),
    /// Codeword distribution, power-law fit, transition growth and correlations
    #[command(after_help = FORMAT_HELP)]
    Stats(AnalyzeArgs),
}

#[derive(Args)]
struct ChordifyArgs {
    /// Onsets snap to 1/N of a beat
    #[arg(long, default_value_t = 16)]
    quantize: u32,
    /// Drop codewords sounding fewer than this many quanta (0 keeps all)
    #[arg(long, default_value_t = 0)]
    min_duration: u32,
}

impl ChordifyArgs {
    fn options(&self) -> ChordifyOptions {
        ChordifyOptions {
            quantization_divisor: self.quantize,
            min_duration: self.min_duration,
        }
    }
}

#[derive(Args)]
struct IngestArgs {
    /// Directory containing the MIDI files
    #[arg(long)]
    midi: PathBuf,
    /// Work metadata CSV
    #[arg(long)]
    works: PathBuf,
    /// Composer metadata CSV
    #[arg(long)]
    composers: PathBuf,
    /// Corpus directory to write
    #[arg(long)]
    out: PathBuf,
    /// Warn about and skip files that fail to parse
    #[arg(long)]
    skip_bad: bool,
    #[command(flatten)]
    chordify: ChordifyArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum EligibilityArg {
    /// Sources with at least one work before the target
    EarlierWork,
    /// Every composer other than the target's own
    AnyOther,
}

#[derive(Args)]
struct ModelArgs {
    /// Corpus directory
    #[arg(long)]
    corpus: PathBuf,
    /// Additive prior weight per codeword
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,
    /// Vocabulary size override; at least the observed vocabulary
    #[arg(long)]
    vocab_size: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Half-width of the influence curve window, in years
    #[arg(long, default_value_t = 10)]
    window: u32,
    /// Spacing of influence curve samples, in years
    #[arg(long, default_value_t = 1)]
    step: u32,
    /// Bootstrap seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Bootstrap resamples
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    /// Which composers count as sources for a target
    #[arg(long, value_enum, default_value_t = EligibilityArg::EarlierWork)]
    eligibility: EligibilityArg,
    /// Restrict influence curves to one composer
    #[arg(long)]
    composer: Option<String>,
    #[command(flatten)]
    chordify: ChordifyArgs,
}

#[derive(Args)]
struct NoveltyArgs {
    #[command(flatten)]
    analyze: AnalyzeArgs,
    /// Print the scores of this work instead of writing tables
    #[arg(long)]
    work: Option<String>,
}

#[derive(Args)]
struct InfluenceArgs {
    #[command(flatten)]
    analyze: AnalyzeArgs,
    /// Source composer for a single query
    #[arg(long, requires = "target")]
    source: Option<String>,
    /// Target work for a single query
    #[arg(long, requires = "source")]
    target: Option<String>,
}

impl AnalyzeArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            chordify: self.chordify.options(),
            alpha0: self.model.alpha0,
            vocab_size: self.model.vocab_size,
            window_years: self.window,
            step_years: self.step,
            bootstrap: Bootstrap {
                resamples: self.resamples,
                seed: self.seed,
            },
            eligibility: match self.eligibility {
                EligibilityArg::EarlierWork => Eligibility::EarlierWork,
                EligibilityArg::AnyOther => Eligibility::AnyOtherComposer,
            },
            composer: self.composer.clone(),
        }
    }
}

fn load(model: &ModelArgs, config: &PipelineConfig) -> Result<Corpus> {
    config.validate()?;
    config.prepare(load_corpus_dir(&model.corpus)?)
}

fn cmd_ingest(args: &IngestArgs) -> Result<()> {
    let report = pipeline::ingest(
        &args.midi,
        &args.works,
        &args.composers,
        &args.out,
        &args.chordify.options(),
        args.skip_bad,
    )?;
    for w in &report.works {
        println!("{}\t{} codewords", w.work_id, w.codewords);
    }
    for (path, reason) in &report.skipped {
        eprintln!("skipped {}: {reason}", path.display());
    }
    println!(
        "wrote {} works to {} ({} skipped)",
        report.works.len(),
        args.out.display(),
        report.skipped.len()
    );
    Ok(())
}

fn cmd_tables(args: &AnalyzeArgs, outputs: Outputs) -> Result<()> {
    let config = args.config();
    let corpus = load(&args.model, &config)?;
    let summary = pipeline::analyze(&corpus, &config, &args.out, outputs)?;
    println!(
        "{} works, |V| = {}, {} influence pairs",
        summary.works,
        corpus.vocab_size(),
        summary.influence_pairs
    );
    if let Some(fit) = &summary.fit {
        println!(
            "power law: density exponent {:.4}, cumulative exponent {:.4} (+/- {:.4}), xmin {}",
            fit.density_exponent, fit.cumulative_exponent, fit.stderr, fit.xmin
        );
    }
    for (level, rc) in [
        ("works", &summary.work_correlation),
        ("composers", &summary.composer_correlation),
    ] {
        if let Some(r) = rc {
            println!(
                "spearman H vs P ({level}): {:.4} +/- {:.4} (bootstrap sd)",
                r.rho_s, r.ci_halfwidth
            );
        }
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_novelty(args: &NoveltyArgs) -> Result<()> {
    let Some(work) = &args.work else {
        return cmd_tables(
            &args.analyze,
            Outputs {
                novelty: true,
                influence: false,
                stats: false,
            },
        );
    };
    let config = args.analyze.config();
    let corpus = load(&args.analyze.model, &config)?;
    let an = Analyzer::new(&corpus, config.alpha0)?;
    println!("work_id,nu_H,nu_P");
    println!("{work},{},{}", an.h_novelty(work)?, an.p_novelty(work)?);
    Ok(())
}

fn cmd_influence(args: &InfluenceArgs) -> Result<()> {
    let (Some(source), Some(target)) = (&args.source, &args.target) else {
        return cmd_tables(
            &args.analyze,
            Outputs {
                novelty: false,
                influence: true,
                stats: false,
            },
        );
    };
    let config = args.analyze.config();
    let corpus = load(&args.analyze.model, &config)?;
    let score = Analyzer::new(&corpus, config.alpha0)?.influence(source, target)?;
    println!("source,target,eta");
    println!("{source},{target},{}", score.eta);
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Analyze(a) => cmd_tables(a, Outputs::ALL),
        Command::Novelty(a) => cmd_novelty(a),
        Command::Influence(a) => cmd_influence(a),
        Command::Stats(a) => cmd_tables(
            a,
            Outputs {
                novelty: false,
                influence: false,
                stats: true,
            },
        ),
    }
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(u8::try_from(code).unwrap_or(2))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return exit(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code())
        }
    }
}
