use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use feaso_core::feasibility::BUNDLED_KB;
use feaso_core::kb::load_kb;
use feaso_service::{serve, Config};

/// Serve feasibility consultations over HTTP.
#[derive(Debug, Parser)]
#[command(name = "feaso-service", version)]
struct Args {
    /// Knowledge base to serve; the bundled one when omitted.
    #[arg(long, env = "FEASO_KB")]
    kb: Option<PathBuf>,
    /// Directory holding one file per session.
    #[arg(long, env = "FEASO_STORE", default_value = "sessions")]
    store: PathBuf,
    /// Address to bind.
    #[arg(long, env = "FEASO_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let src = match &args.kb {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?,
        None => BUNDLED_KB.to_string(),
    };
    let (kb, _warnings) = load_kb(&src).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        anyhow::anyhow!("invalid knowledge base:\n{}", lines.join("\n"))
    })?;
    serve(Arc::new(kb), Config { store: args.store, listen: args.listen }).await
}
