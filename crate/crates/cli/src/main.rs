use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use langconf_cli::config::{build_chain, DetectorSpec, GraphSpec, InputSpec, PipelineConfig};
use langconf_cli::error::{CliError, Result};
use langconf_cli::ingest::InputFormat;
use langconf_cli::lideval::holdout_accuracy;
use langconf_cli::output::{csv_bytes, emit, num, write_atomic};
use langconf_cli::pipeline::{self, load_graph, load_inputs, score, Scored};
use langconf_cli::synth::{synthesize, to_jsonl, SynthOptions};
use langconf_core::divergence::{align_matrices, kl_matrix_divergence};
use langconf_core::lid::seed::{bundled_corpora, load_corpus_dir, train_profiles};
use langconf_core::lid::{profiles_to_json, read_profiles, ClassifyOptions};
use langconf_core::metrics::{
    build_confusion_matrix, spearman_with, AggregateField, AggregateKey, EntropyOptions, LogBase,
    PValueMethod, PassReference, WprMode, ZeroConvention,
};
use langconf_core::typology::{build_similarity_matrix, GraphKind, Kernel};
use langconf_core::{Execution, Granularity, LabeledMatrix, LanguageTag};

#[derive(Parser)]
#[command(
    name = "langconf",
    version,
    about = "Measure language confusion in generated text"
)]
struct Cli {
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Train or evaluate n-gram detector profiles.
    #[command(subcommand)]
    Profiles(ProfilesCommand),
    /// Line- and word-level language distributions per record, as JSONL.
    Detect {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Confusion entropy per record, or aggregated with `--group-by`.
    Entropy {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        entropy: EntropyArgs,
        /// Comma-separated fields: model, dataset, setting, target_lang, eval_step, granularity.
        #[arg(long, value_delimiter = ',')]
        group_by: Vec<AggregateField>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Line- and word-level pass rates per group.
    Passrate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = WprMode::PaperCompat)]
        wpr_mode: WprMode,
        #[arg(long, default_value_t = PassReference::Target)]
        pass_reference: PassReference,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "model,dataset,setting,target_lang"
        )]
        group_by: Vec<AggregateField>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Language confusion matrix of one granularity.
    Matrix {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        entropy: EntropyArgs,
        #[arg(long, default_value = "line")]
        granularity: Granularity,
        /// Restrict to one dataset.
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Pairwise similarity matrix of a language graph.
    Simgraph {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        kind: GraphKind,
        #[arg(long)]
        kernel: Option<Kernel>,
        /// Source id to ISO 639-3 mapping TSV.
        #[arg(long)]
        mapping: Option<PathBuf>,
        /// Comma-separated languages; all graph languages when absent.
        #[arg(long, value_delimiter = ',')]
        langs: Vec<LanguageTag>,
        /// Also write the unclipped kernel values here.
        #[arg(long)]
        raw_out: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Mean column-wise KL divergence between a confusion and a similarity matrix.
    Kl {
        #[arg(long)]
        confusion: PathBuf,
        #[arg(long)]
        similarity: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Spearman correlation of two numeric CSV columns.
    Corr {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_enum, default_value = "t-distribution")]
        method: MethodArg,
        #[arg(long, default_value_t = 10_000)]
        permutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic prompting corpus with controlled language mixing.
    Synth {
        #[arg(long, default_value_t = 60)]
        records: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        lines_per_record: usize,
        #[arg(long, default_value_t = 0.05)]
        monolingual_mix: f64,
        #[arg(long, default_value_t = 0.30)]
        crosslingual_mix: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ProfilesCommand {
    /// Train profiles from `<iso639_3>.txt` files, or the bundled corpora.
    Train {
        #[arg(long)]
        corpus_dir: Option<PathBuf>,
        /// Directory receiving `profiles.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Held-out sentence accuracy per language.
    Eval {
        #[arg(long)]
        corpus_dir: Option<PathBuf>,
        /// Evaluate these profiles instead of training on the split.
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    TDistribution,
    Exact,
    MonteCarlo,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::GenericJsonl)]
    format: InputFormat,
    /// Profile file or directory for an n-gram detector; the bundled one otherwise.
    #[arg(long, env = "LANGCONF_PROFILE_DIR")]
    profiles: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

impl InputArgs {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn score(&self, entropy: EntropyOptions) -> Result<Vec<Scored>> {
        let spec = InputSpec {
            path: self.input.clone(),
            format: self.format,
        };
        let (records, _) = load_inputs(std::slice::from_ref(&spec))?;
        let detector = DetectorSpec {
            name: if self.profiles.is_some() {
                "ngram"
            } else {
                "bundled"
            }
            .into(),
            profiles: self.profiles.clone(),
        };
        let chain = build_chain(&[detector], ClassifyOptions::default())?;
        Ok(score(records, &chain, entropy, self.execution())?.0)
    }
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long, default_value_t = LogBase::Natural)]
    log_base: LogBase,
    #[arg(long, default_value_t = ZeroConvention::Support)]
    zero_convention: ZeroConvention,
}

impl EntropyArgs {
    fn options(&self) -> EntropyOptions {
        EntropyOptions {
            log_base: self.log_base,
            zero_convention: self.zero_convention,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, output_dir } => {
            let mut config = PipelineConfig::load(&config)?;
            if let Some(dir) = output_dir {
                config.output_dir = dir;
            }
            let summary = pipeline::run_pipeline(&config)?;
            eprintln!(
                "{} records, {} artifacts written to {}",
                summary.records,
                summary.artifacts.len() + 1,
                summary.output_dir.display()
            );
            Ok(())
        }
        Command::Profiles(cmd) => profiles(cmd),
        Command::Detect { input, out } => {
            let scored = input.score(EntropyOptions::default())?;
            emit(out.as_deref(), &pipeline::distributions_jsonl(&scored))
        }
        Command::Entropy {
            input,
            entropy,
            group_by,
            out,
        } => {
            let scored = input.score(entropy.options())?;
            let bytes = if group_by.is_empty() {
                pipeline::entropy_records_csv(&scored)?
            } else {
                let key =
                    AggregateKey::new(group_by).map_err(|e| CliError::Validation(e.to_string()))?;
                pipeline::entropy_summary_csv(&scored, &key)?
            };
            emit(out.as_deref(), &bytes)
        }
        Command::Passrate {
            input,
            wpr_mode,
            pass_reference,
            group_by,
            out,
        } => {
            let scored = input.score(EntropyOptions::default())?;
            let key =
                AggregateKey::new(group_by).map_err(|e| CliError::Validation(e.to_string()))?;
            let fields = pipeline::group_fields(&key);
            let groups = pipeline::group_metrics(&scored, &fields, wpr_mode, pass_reference)?;
            emit(out.as_deref(), &pipeline::passrates_csv(&groups, &fields)?)
        }
        Command::Matrix {
            input,
            entropy,
            granularity,
            dataset,
            out,
        } => {
            let scored = input.score(entropy.options())?;
            let pairs: Vec<_> = scored
                .iter()
                .filter(|s| dataset.as_ref().is_none_or(|d| &s.record.dataset == d))
                .filter_map(|s| s.entropy(granularity).map(|e| (&s.record, e)))
                .collect();
            if pairs.is_empty() {
                return Err(CliError::Data(
                    "no scored records to build a matrix from".into(),
                ));
            }
            let m = build_confusion_matrix(&pairs).map_err(CliError::data)?;
            emit(out.as_deref(), m.to_csv().as_bytes())
        }
        Command::Simgraph {
            graph,
            kind,
            kernel,
            mapping,
            langs,
            raw_out,
            out,
            sequential,
        } => {
            let spec = GraphSpec {
                name: graph
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                path: graph,
                kind,
                kernel,
                mapping,
            };
            if let Some(k) = kernel {
                if !k.applies_to(kind) {
                    return Err(CliError::Validation(format!(
                        "kernel {k} does not apply to {kind} graphs"
                    )));
                }
            }
            let g = load_graph(&spec)?;
            let langs = if langs.is_empty() {
                g.languages().copied().collect()
            } else {
                langs
            };
            let execution = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let sim =
                build_similarity_matrix(&g, &langs, &langs, execution).map_err(CliError::data)?;
            if let Some(p) = raw_out {
                write_atomic(&p, sim.raw.to_csv().as_bytes())?;
            }
            emit(out.as_deref(), sim.matrix.to_csv().as_bytes())
        }
        Command::Kl {
            confusion,
            similarity,
            out,
        } => {
            let m1 = read_matrix(&confusion)?;
            let m2 = read_matrix(&similarity)?;
            let aligned = align_matrices(&m1, &m2).map_err(CliError::data)?;
            let report = kl_matrix_divergence(&aligned.m1, &aligned.m2, Execution::default())
                .map_err(CliError::data)?;
            emit(out.as_deref(), report.to_json().as_bytes())
        }
        Command::Corr {
            input,
            x,
            y,
            method,
            permutations,
            seed,
        } => {
            let method = match method {
                MethodArg::TDistribution => PValueMethod::TDistribution,
                MethodArg::Exact => PValueMethod::Exact,
                MethodArg::MonteCarlo => PValueMethod::MonteCarlo {
                    samples: permutations,
                    seed,
                },
            };
            let (xs, ys) = read_columns(&input, &x, &y)?;
            let c = spearman_with(&xs, &ys, method).map_err(CliError::data)?;
            let bytes = csv_bytes(
                &["x", "y", "n", "rho", "p_value", "stars", "method"],
                [vec![
                    x,
                    y,
                    c.n.to_string(),
                    num(c.rho),
                    num(c.p_value),
                    c.stars().to_string(),
                    method.to_string(),
                ]],
            )?;
            emit(None, &bytes)
        }
        Command::Synth {
            records,
            seed,
            lines_per_record,
            monolingual_mix,
            crosslingual_mix,
            out,
        } => {
            for (name, p) in [
                ("monolingual-mix", monolingual_mix),
                ("crosslingual-mix", crosslingual_mix),
            ] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(CliError::Validation(format!("--{name} must be in [0, 1]")));
                }
            }
            if lines_per_record == 0 {
                return Err(CliError::Validation(
                    "--lines-per-record must be positive".into(),
                ));
            }
            let opts = SynthOptions {
                records,
                seed,
                lines_per_record,
                monolingual_mix,
                crosslingual_mix,
                ..Default::default()
            };
            emit(out.as_deref(), to_jsonl(&synthesize(&opts)).as_bytes())
        }
    }
}

fn profiles(cmd: ProfilesCommand) -> Result<()> {
    let corpora = |dir: Option<&Path>| match dir {
        Some(d) => load_corpus_dir(d).map_err(CliError::data),
        None => Ok(bundled_corpora()),
    };
    match cmd {
        ProfilesCommand::Train { corpus_dir, out } => {
            let corpora = corpora(corpus_dir.as_deref())?;
            let profiles =
                train_profiles(&corpora, Execution::default()).map_err(CliError::data)?;
            write_atomic(
                &out.join(langconf_cli::config::PROFILE_FILE),
                profiles_to_json(&profiles).as_bytes(),
            )?;
            eprintln!("{} profiles written to {}", profiles.len(), out.display());
            Ok(())
        }
        ProfilesCommand::Eval {
            corpus_dir,
            profiles,
        } => {
            let corpora = corpora(corpus_dir.as_deref())?;
            let loaded = match profiles {
                Some(p) => {
                    let file = if p.is_dir() {
                        p.join(langconf_cli::config::PROFILE_FILE)
                    } else {
                        p
                    };
                    let f = std::fs::File::open(&file).map_err(|e| CliError::io(&file, e))?;
                    Some(read_profiles(std::io::BufReader::new(f)).map_err(CliError::data)?)
                }
                None => None,
            };
            let eval = holdout_accuracy(&corpora, loaded.as_deref(), ClassifyOptions::default())?;
            let rows = eval.per_language.iter().map(|(l, (c, t))| {
                vec![
                    l.to_string(),
                    c.to_string(),
                    t.to_string(),
                    num(*c as f64 / *t.max(&1) as f64),
                ]
            });
            emit(
                None,
                &csv_bytes(&["lang", "correct", "total", "accuracy"], rows)?,
            )?;
            eprintln!(
                "accuracy {} over {} sentences, {} languages, scripts: {}",
                num(eval.accuracy),
                eval.sentences,
                eval.per_language.len(),
                eval.scripts.iter().cloned().collect::<Vec<_>>().join(" ")
            );
            Ok(())
        }
    }
}

fn read_matrix(path: &Path) -> Result<LabeledMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    LabeledMatrix::from_csv(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Rows where both columns parse as numbers.
fn read_columns(path: &Path, x: &str, y: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(CliError::data)?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Validation(format!("{}: no column {name:?}", path.display())))
    };
    let (ix, iy) = (index(x)?, index(y)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in reader.records() {
        let row = row.map_err(CliError::data)?;
        if let (Some(Ok(a)), Some(Ok(b))) =
            (row.get(ix).map(str::parse), row.get(iy).map(str::parse))
        {
            xs.push(a);
            ys.push(b);
        }
    }
    Ok((xs, ys))
}
