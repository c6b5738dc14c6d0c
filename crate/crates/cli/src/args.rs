use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use warpgate_core::{DatabaseNaming, SampleStrategy};

#[derive(Debug, Parser)]
#[command(name = "warpgate", version, about = "Find joinable columns across a table corpus")]
pub struct Cli {
    /// JSON file with `sample`, `embedder` and `lsh` sections.
    #[arg(long, global = true, env = "WARPGATE_CONFIG")]
    pub config: Option<PathBuf>,

    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest a corpus and write an index file.
    Index(IndexArgs),
    /// Rank the columns joinable with one column.
    Search(SearchArgs),
    /// Score a corpus against ground truth, across sample sizes.
    Eval(EvalArgs),
    /// Write a synthetic corpus with planted joinable pairs.
    GenTestbed(GenArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

/// Overrides applied on top of the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct PipelineFlags {
    #[arg(long)]
    pub sample_size: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(SampleStrategy))]
    pub sample_strategy: Option<SampleStrategy>,
    /// Sampling seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Embedding dimension (also the hyperplane dimension).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of LSH tables.
    #[arg(long)]
    pub tables: Option<usize>,
    /// Bits per LSH table.
    #[arg(long)]
    pub bits: Option<usize>,
    /// Minimum cosine reported by default.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "per_subdirectory", value_parser = clap::value_parser!(DatabaseNaming))]
    pub naming: DatabaseNaming,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// `database.table`, a bare table name, or a table id.
    #[arg(long)]
    pub table: String,
    #[arg(long)]
    pub column: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub min_score: Option<f64>,
    /// Also return columns from the query's own table.
    #[arg(long)]
    pub include_query_table: bool,
    /// Corpus to search instead of the one recorded in the index.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Print only the JSON result list on stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,10")]
    pub ks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub sample_sizes: Vec<usize>,
    /// JSON report path; a plot-ready CSV is written next to it.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub timing_repeats: usize,
    #[arg(long, default_value = "per_subdirectory", value_parser = clap::value_parser!(DatabaseNaming))]
    pub naming: DatabaseNaming,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub tables: usize,
    #[arg(long, default_value_t = 5)]
    pub cols: usize,
    #[arg(long, default_value_t = 1000)]
    pub rows: usize,
    #[arg(long, default_value_t = 20)]
    pub pairs: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub databases: usize,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Index to load at startup; without it the API starts empty.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Defaults to $WARPGATE_ADDR, then 127.0.0.1:8080.
    #[arg(long)]
    pub addr: Option<String>,
}
