use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qalam_corpus::{essay_logs, export_jsonl, export_m2, select_candidates, SelectionConfig};
use qalam_store::Store;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    M2,
    Jsonl,
}

/// Export revised essays from a service data directory.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(long)]
    data_dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    /// Keep essays whose last revision improved on the first.
    #[arg(long)]
    require_improvement: bool,
    /// Keep essays with at least two revisions.
    #[arg(long)]
    require_multi: bool,
    #[arg(long, default_value_t = 50)]
    min_words: usize,
    #[arg(long, default_value_t = 600)]
    max_words: usize,
}

fn run(args: Args) -> Result<String, Box<dyn std::error::Error>> {
    let cfg = SelectionConfig {
        require_multiple_revisions: args.require_multi,
        require_improvement: args.require_improvement,
        min_words: args.min_words,
        max_words: args.max_words,
    };
    cfg.validate()?;
    let store = Store::open_read_only(&args.data_dir)?;
    let records = select_candidates(&essay_logs(&store), &cfg);
    match args.format {
        Format::M2 => export_m2(&records, &args.out)?,
        Format::Jsonl => export_jsonl(&records, &args.out)?,
    }
    Ok(format!("selected {} of {} submissions", records.len(), store.submission_count()))
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("corpus-export: {e}");
            ExitCode::FAILURE
        }
    }
}
