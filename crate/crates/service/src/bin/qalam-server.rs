use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;
use qalam_core::{Lexicon, ScoringConfig};
use qalam_service::http::router;
use qalam_service::{Engines, SessionService};
use qalam_store::Store;

/// Arabic essay checking service.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(long, env = "QALAM_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "QALAM_BIND", default_value = "127.0.0.1")]
    bind: String,
    #[arg(long, env = "QALAM_DATA_DIR", default_value = "qalam-data")]
    data_dir: PathBuf,
    /// Word list, one form per line. Defaults to the built-in lexicon.
    #[arg(long, env = "QALAM_LEXICON")]
    lexicon: Option<PathBuf>,
    /// Scoring bands in TOML. Defaults to the built-in config.
    #[arg(long, env = "QALAM_SCORING_CONFIG")]
    scoring_config: Option<PathBuf>,
    /// URL of a remote error detector; the rule detector is the fallback.
    #[arg(long, env = "QALAM_DETECTOR_URL")]
    detector_url: Option<String>,
    /// URL of a remote CEFR scorer; the banded scorer is the fallback.
    #[arg(long, env = "QALAM_SCORER_URL")]
    scorer_url: Option<String>,
    #[arg(long, env = "QALAM_REMOTE_TIMEOUT_MS", default_value_t = 5000)]
    remote_timeout_ms: u64,
    /// Insert the built-in prompts when the catalogue is empty.
    #[arg(long, env = "QALAM_SEED_PROMPTS")]
    seed_prompts: bool,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let args = Args::parse();

    let lexicon = match &args.lexicon {
        Some(path) => Lexicon::load(path).map_err(|e| format!("reading {}: {e}", path.display()))?,
        None => Lexicon::seed(),
    };
    let config = match &args.scoring_config {
        Some(path) => ScoringConfig::load(path)?,
        None => ScoringConfig::default_config(),
    };
    let timeout = Duration::from_millis(args.remote_timeout_ms);
    let mut engines = Engines::local(lexicon, config);
    if let Some(url) = &args.detector_url {
        engines = engines.with_remote_detector(url, timeout);
    }
    if let Some(url) = &args.scorer_url {
        engines = engines.with_remote_scorer(url, timeout);
    }

    let store = Store::open(&args.data_dir)?;
    let service = SessionService::new(store, engines);
    if args.seed_prompts {
        let n = service.seed_prompts()?;
        tracing::info!("seeded {n} prompts");
    }

    let listener = tokio::net::TcpListener::bind((args.bind.as_str(), args.port)).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(service)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
