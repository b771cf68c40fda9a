use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "forge",
    version,
    about = "Build, filter and inspect Nepali-English adaptation corpora",
    after_help = "Configuration: --config FILE or the FORGE_CONFIG environment variable.\n\
                  Logs are JSON lines on stderr; set FORGE_LOG to change the level."
)]
pub struct Cli {
    /// Key-value configuration file; flags take precedence over it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Maximum worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Leniency {
    /// Stop at the first malformed record instead of skipping it.
    #[arg(long)]
    pub strict: bool,

    /// Largest tolerated share of skipped records before exiting with failure.
    #[arg(long, value_name = "RATIO")]
    pub max_failure_ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Selection {
    /// Index of the first pair to use.
    #[arg(long)]
    pub offset: Option<usize>,

    /// Maximum number of pairs to use after the offset.
    #[arg(long)]
    pub limit: Option<usize>,

    /// Keep a seeded random subset of this many pairs, in input order.
    #[arg(long, value_name = "K")]
    pub sample: Option<usize>,

    /// Seed for --sample.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize and sentence-segment documents.
    Segment {
        #[arg(long, value_parser = ["ne", "en"])]
        lang: String,
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// English abbreviation stop-list.
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        #[command(flatten)]
        leniency: Leniency,
    },
    /// Check a parallel-pair corpus and summarize it.
    Validate {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Abbreviation stop-list, one entry per line.
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        #[command(flatten)]
        leniency: Leniency,
    },
    /// Score hypothesis lines against reference lines with chrF++.
    Chrf {
        /// Hypotheses, one segment per line.
        #[arg(long, value_name = "FILE")]
        hyp: PathBuf,
        /// References, one segment per line.
        #[arg(long = "ref", value_name = "FILE")]
        reference: PathBuf,
        /// Character n-gram order.
        #[arg(long)]
        char_n: Option<usize>,
        /// Word n-gram order.
        #[arg(long)]
        word_n: Option<usize>,
        /// Recall weight.
        #[arg(long)]
        beta: Option<f64>,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Keep instruction triplets whose round-trip chrF++ reaches the cut-off.
    Filter {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Minimum round-trip chrF++ score to keep.
        #[arg(long)]
        cutoff: Option<f64>,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Write a JSON summary here.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        #[command(flatten)]
        leniency: Leniency,
    },
    /// Build English-to-Nepali translation records.
    MakeTranslate {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Prompt template with one {src} placeholder.
        #[arg(long, value_name = "FILE")]
        template: Option<PathBuf>,
        /// Abbreviation stop-list, one entry per line.
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        #[command(flatten)]
        selection: Selection,
        #[command(flatten)]
        leniency: Leniency,
    },
    /// Build alternating-language paragraphs.
    MakeBilingual {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Lead language policy: alternate, ne or en.
        #[arg(long)]
        lead: Option<String>,
        /// Drop report destination.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Abbreviation stop-list, one entry per line.
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        #[command(flatten)]
        selection: Selection,
        #[command(flatten)]
        leniency: Leniency,
    },
    /// Write the training manifest for a stage.
    Manifest {
        /// pretrain_translate, pretrain_bilingual or finetune.
        #[arg(long)]
        stage: String,
        /// Corpus file; repeat for several.
        #[arg(long = "corpus", value_name = "FILE", required = true)]
        corpora: Vec<PathBuf>,
        /// Lead policy used to build the corpus, recorded in the manifest.
        #[arg(long)]
        lead: Option<String>,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Tokens per whitespace word.
    Fertility {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Break the totals down by language tag.
        #[arg(long)]
        by_lang: bool,
        /// Per-document JSONL destination.
        #[arg(long, value_name = "FILE")]
        per_doc: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[command(flatten)]
        leniency: Leniency,
    },
    /// Attention dump analysis.
    #[command(subcommand)]
    Attn(AttnCommand),
    /// Benchmark and generation-score tables.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Max,
    Mean,
}

#[derive(Debug, Subcommand)]
pub enum AttnCommand {
    /// Pool token attention to word attention.
    Pool {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Average relation heatmaps over annotated word pairs.
    Concept {
        /// Relation annotations as JSON lines.
        #[arg(long, value_name = "FILE")]
        annotations: PathBuf,
        /// Directory holding <sentence_id>.atnt; defaults to the annotations' directory.
        #[arg(long, value_name = "DIR")]
        tensors: Option<PathBuf>,
        /// Relation to aggregate; required when annotations mix relations.
        #[arg(long)]
        relation: Option<String>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Write a concept heatmap as PPM image and CSV.
    Render {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output prefix; .ppm and .csv are appended.
        #[arg(long, value_name = "PREFIX")]
        out: PathBuf,
    },
    /// Compare two concept heatmaps.
    Compare {
        /// First concept heatmap.
        #[arg(long, value_name = "FILE")]
        a: PathBuf,
        /// Second concept heatmap.
        #[arg(long, value_name = "FILE")]
        b: PathBuf,
        /// Number of strongest heads listed per concept.
        #[arg(long)]
        top_k: Option<usize>,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Md,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Zero-shot vs k-shot percent-change table.
    Bench {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        out: Format,
        /// Shot count compared against zero-shot.
        #[arg(long)]
        k: Option<u32>,
        /// Comma-separated model column order.
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
    },
    /// Distribution statistics of 0-10 generation scores.
    Gen {
        /// Input file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        out: Format,
        #[command(flatten)]
        leniency: Leniency,
    },
}
