//! `slavlink` — build lemmatization/linking resources from public dumps,
//! run the pipeline over recognized mentions, and score the output.

mod commands;
mod config;
mod resources;
mod xml;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit codes: 0 success, 1 usage or configuration error, 2 data error.
pub enum CliError {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Usage(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
            CliError::Data(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        }
    }
}

pub trait IntoCliError<T> {
    fn usage(self) -> Result<T, CliError>;
    fn data(self) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> IntoCliError<T> for Result<T, E> {
    fn usage(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Usage(e.into()))
    }

    fn data(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Data(e.into()))
    }
}

#[derive(Parser)]
#[command(
    name = "slavlink",
    version,
    about = "Lemmatize and cross-link named-entity mentions in Slavic text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build single-word lemmatization rules and a lexicon from CoNLL-U
    /// treebanks and form/lemma dictionaries.
    BuildMorph {
        /// CoNLL-U treebank files.
        #[arg(long = "conllu", value_name = "FILE")]
        conllu: Vec<PathBuf>,
        /// 2-column `form<TAB>lemma` dictionary files.
        #[arg(long = "dict", value_name = "FILE")]
        dict: Vec<PathBuf>,
        /// Directory for rules.tsv and lexicon.tsv.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Minimum number of distinct pairs witnessing a rule.
        #[arg(long, default_value_t = 2)]
        min_support: u32,
        /// Longest suffix recorded in a rule.
        #[arg(long, default_value_t = 6)]
        max_suffix_len: usize,
    },
    /// Mine link pairs, stopper words, lemma frequencies, a suffix
    /// inventory and phrase schemas from wikitext.
    MineWiki {
        /// Wikitext files (pages separated by `%%PAGE <title>` lines).
        #[arg(long = "input", value_name = "FILE")]
        input: Vec<PathBuf>,
        /// MediaWiki XML exports; text nodes are extracted first.
        #[arg(long = "xml", value_name = "FILE")]
        xml: Vec<PathBuf>,
        /// Single-word rules used to validate pairs.
        #[arg(long, value_name = "FILE")]
        rules: Option<PathBuf>,
        /// Extra pre-validated `anchor<TAB>title` pair files (e.g. from
        /// training annotations) included in schema induction.
        #[arg(long = "pairs-in", value_name = "FILE")]
        pairs_in: Vec<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Distinct pairs required before a word becomes a stopper.
        #[arg(long, default_value_t = 5)]
        min_stopper_support: u32,
        /// Number of most frequent suffixes kept in the inventory.
        #[arg(long, default_value_t = 2000)]
        inventory_size: usize,
        #[arg(long, default_value_t = 6)]
        max_suffix_len: usize,
    },
    /// Build the entity catalog from slim entity records.
    BuildCatalog {
        /// Entity-per-line JSON record files.
        #[arg(long = "entities", value_name = "FILE")]
        entities: Vec<PathBuf>,
        /// Output catalog snapshot (JSON).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Run configuration supplying languages and category roots.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Comma-separated language codes (overrides the config).
        #[arg(long, value_name = "LANGS")]
        languages: Option<String>,
    },
    /// Lemmatize and link recognized mentions document by document.
    Run {
        /// Directory of raw document files (5-line header + body).
        #[arg(long, value_name = "DIR")]
        docs: PathBuf,
        /// Directory of input annotation files with recognized mentions.
        #[arg(long, value_name = "DIR")]
        annotations: PathBuf,
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Output directory for annotation files and the cluster report.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Worker threads for document processing.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Score predicted annotations against gold annotations.
    Eval {
        #[arg(long, value_name = "DIR")]
        gold: PathBuf,
        #[arg(long, value_name = "DIR")]
        pred: PathBuf,
        /// Linking scope: document, language or cross-language.
        #[arg(long, default_value = "language")]
        level: String,
        /// Write the machine-readable report here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = e.print();
                return ExitCode::from(1);
            }
            // --help / --version go to stdout and succeed.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };

    let result = match cli.command {
        Command::BuildMorph {
            conllu,
            dict,
            out_dir,
            min_support,
            max_suffix_len,
        } => commands::build_morph::run(&conllu, &dict, &out_dir, min_support, max_suffix_len),
        Command::MineWiki {
            input,
            xml,
            rules,
            pairs_in,
            out_dir,
            min_stopper_support,
            inventory_size,
            max_suffix_len,
        } => commands::mine_wiki::run(
            &input,
            &xml,
            rules.as_deref(),
            &pairs_in,
            &out_dir,
            min_stopper_support,
            inventory_size,
            max_suffix_len,
        ),
        Command::BuildCatalog {
            entities,
            out,
            config,
            languages,
        } => commands::build_catalog::run(&entities, &out, config.as_deref(), languages.as_deref()),
        Command::Run {
            docs,
            annotations,
            config,
            out,
            workers,
        } => commands::run::run(&docs, &annotations, &config, &out, workers),
        Command::Eval {
            gold,
            pred,
            level,
            out,
        } => commands::eval::run(&gold, &pred, &level, out.as_deref()),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
