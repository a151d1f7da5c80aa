mod table;

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compareviz_core::canonical::to_canonical_string;
use compareviz_core::catalog::catalog_document;
use compareviz_core::dataset::{load_dataset_with_metadata, Metadata};
use compareviz_core::emitter::{serialize_spec, Aggregate, EmitterConfig};
use compareviz_core::engine::{Engine, EngineConfig};
use compareviz_core::lexicon::Lexicon;
use compareviz_core::{Error, ErrorClass};
use compareviz_server::ServerConfig;
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "compareviz", version, about = "Turn comparison questions over a CSV into ranked Vega-Lite charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an utterance and print its cardinality and concreteness.
    Classify(QueryArgs),
    /// Print the interpretations chosen for every implicit reference.
    Resolve(QueryArgs),
    /// Print the ranked designs for an utterance.
    Recommend(QueryArgs),
    /// Write one Vega-Lite document per recommended design.
    Emit {
        #[command(flatten)]
        query: QueryArgs,
        /// Directory for `<rank>-<design>.vl.json` files; stdout when omitted.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Start the HTTP API.
    Serve(ServeArgs),
    /// Print the design catalog and preference tiers.
    Catalog {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// JSON sidecar overriding the entity column and column kinds or units.
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Lexicon JSON replacing the built-in vocabulary.
    #[arg(long, env = "COMPAREVIZ_LEXICON")]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    utterance: String,
    /// Interpretation override, e.g. `attribute=1` or `value:0=2`. Repeatable.
    #[arg(long = "choose", value_name = "REF=INDEX", value_parser = parse_choice)]
    choices: Vec<(String, usize)>,
    /// Entities kept per group in emitted charts.
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    /// Summary statistic for aggregated designs: mean, median or sum.
    #[arg(long, default_value = "mean")]
    aggregate: Aggregate,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, env = "COMPAREVIZ_LEXICON")]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 10 * 1024 * 1024)]
    max_upload_bytes: usize,
    /// Idle seconds before a session is dropped.
    #[arg(long, default_value_t = 3600)]
    session_ttl: u64,
    /// Keep uploads on disk so sessions survive restarts.
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
}

fn parse_choice(s: &str) -> Result<(String, usize), String> {
    let (reference, index) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("expected REF=INDEX, got '{s}'"))?;
    let index = index.parse().map_err(|_| format!("'{index}' is not an index"))?;
    Ok((reference.to_string(), index))
}

/// Process exit status for an engine error.
fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Input => 2,
        ErrorClass::Resolution => 3,
        ErrorClass::Internal => 4,
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn lexicon(path: Option<&Path>) -> Result<Lexicon, Failure> {
    match path {
        Some(p) => {
            let text = read(p)?;
            let text = String::from_utf8_lossy(&text);
            Lexicon::from_json(&text).map_err(|e| Failure {
                code: 2,
                message: format!("{}: {e}", p.display()),
            })
        }
        None => Ok(Lexicon::default()),
    }
}

fn engine(q: &QueryArgs) -> Result<Engine, Failure> {
    let csv = read(&q.data)?;
    let meta = match &q.metadata {
        Some(p) => Some(Metadata::from_json(&read(p)?)?),
        None => None,
    };
    let dataset = load_dataset_with_metadata(&csv, meta.as_ref())?;
    let config = EngineConfig {
        emitter: EmitterConfig {
            top_k: q.top_k,
            aggregate: q.aggregate,
        },
        ..EngineConfig::default()
    };
    Ok(Engine::new(dataset, lexicon(q.lexicon.as_deref())?, config))
}

fn canonical<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    Ok(to_canonical_string(v)?)
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Classify(q) => {
            let p = engine(&q)?.parse(&q.utterance)?;
            match q.format {
                Format::Json => canonical(&p),
                Format::Table => Ok(table::classify(&p)),
            }
        }
        Command::Resolve(q) => {
            let e = engine(&q)?;
            let p = e.parse(&q.utterance)?;
            let mut plan = e.plan(&p)?;
            for (reference, index) in &q.choices {
                plan.choose(reference, *index)?;
            }
            match q.format {
                Format::Json => canonical(&plan),
                Format::Table => Ok(table::resolve(&plan)),
            }
        }
        Command::Recommend(q) => {
            let r = engine(&q)?.query_with(&q.utterance, &q.choices)?;
            match q.format {
                Format::Json => {
                    let ranked: Vec<_> = r
                        .recommendations
                        .iter()
                        .map(|s| {
                            json!({
                                "rank": s.rank,
                                "tier": s.tier,
                                "design": s.design.id,
                                "name": s.design.name,
                                "rationale": s.rationale,
                            })
                        })
                        .collect();
                    canonical(&json!({ "query_id": r.query_id, "recommendations": ranked }))
                }
                Format::Table => Ok(table::recommend(&r)),
            }
        }
        Command::Emit { query: q, out_dir } => {
            let r = engine(&q)?.query_with(&q.utterance, &q.choices)?;
            match out_dir {
                None => canonical(&r.recommendations.iter().map(|s| &s.spec).collect::<Vec<_>>()),
                Some(dir) => {
                    let io = |e: std::io::Error| Failure {
                        code: 4,
                        message: format!("{}: {e}", dir.display()),
                    };
                    fs::create_dir_all(&dir).map_err(io)?;
                    let mut written = Vec::new();
                    for s in &r.recommendations {
                        let path = dir.join(format!("{}-{}.vl.json", s.rank, s.design.id));
                        fs::write(&path, serialize_spec(&s.spec)?).map_err(io)?;
                        written.push(path.display().to_string());
                    }
                    match q.format {
                        Format::Json => canonical(&written),
                        Format::Table => Ok(written.iter().map(|w| format!("{w}\n")).collect()),
                    }
                }
            }
        }
        Command::Catalog { format } => match format {
            Format::Json => canonical(&catalog_document()),
            Format::Table => Ok(table::catalog()),
        },
        Command::Serve(s) => {
            let config = ServerConfig {
                max_upload_bytes: s.max_upload_bytes,
                session_ttl: Duration::from_secs(s.session_ttl),
                snapshot_dir: s.snapshot_dir,
                engine: EngineConfig {
                    emitter: EmitterConfig {
                        top_k: s.top_k,
                        ..EmitterConfig::default()
                    },
                    ..EngineConfig::default()
                },
                lexicon: lexicon(s.lexicon.as_deref())?,
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure {
                code: 4,
                message: e.to_string(),
            })?;
            rt.block_on(compareviz_server::serve(s.addr, config)).map_err(|e| Failure {
                code: 4,
                message: format!("{}: {e}", s.addr),
            })?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
