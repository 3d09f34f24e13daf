//! The `ldq` command line. Exit codes: 0 success, 1 quality failure under
//! `--strict`, 2 usage or configuration error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use super::fixture::{gen_fixture, FixtureConfig, FixtureError};
use super::store::Store;
use super::{
    assess_dataset, assess_options, pipeline_dataset, records_to_ntriples, render_report, run_summary,
    to_json_bytes, ReportFormat, DEFAULT_SEED,
};
use crate::assess::resolve_now;
use crate::improve::improve;
use crate::ingest::{load_mapping, map_records, parse_timestamp, mapping_vocab, read_records_csv, read_records_json, IngestError};
use crate::pipeline::{content_id, PipelineError};
use crate::rdf::{parse_ntriples, serialize_ntriples, serialize_turtle, Graph, ParseError};
use crate::vocab::{builtin_vocab, load_policy, ns, PolicyError, QualityPolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_QUALITY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ldq", version, about = "Quality assessment and improvement for energy linked data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Assessment policy (metrics and shapes), JSON.
    #[arg(long)]
    pub assessment: PathBuf,
    /// Business rules (thresholds, weights, improvement parameters), JSON.
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map CSV or JSON records to N-Triples.
    Ingest {
        /// Records: CSV, or a JSON array when the file ends in `.json`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
        /// Rules file whose referenceTime stamps generatedAt.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assess a dataset and write the quality report.
    Assess {
        #[arg(long)]
        dataset: PathBuf,
        /// Mapping whose vocabulary counts as declared.
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
        /// Exit 1 when the dataset fails the policy.
        #[arg(long)]
        strict: bool,
    },
    /// Assess once and apply the routed improvements.
    Improve {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Improved dataset, N-Triples.
        #[arg(long)]
        out: PathBuf,
        /// Actions and precision records, JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the assess/improve loop.
    Pipeline {
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        dataset: Option<PathBuf>,
        #[arg(long, requires = "mapping")]
        input: Option<PathBuf>,
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Overrides the policy's maxRounds.
        #[arg(long)]
        rounds: Option<u32>,
        /// Directory for the final dataset, per-round reports, trace and summary.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Final report.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
        #[arg(long)]
        strict: bool,
    },
    /// Generate a synthetic fixture with injected defects.
    GenFixture {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Generator config, JSON (hours, buildings, counts, rates).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Overridden by LDQ_DATA_DIR.
        #[arg(long, default_value = "ldq-data")]
        data_dir: PathBuf,
    },
    /// Print the dqv/eldv vocabulary.
    Vocab {
        #[arg(long, value_enum, default_value = "turtle")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error("{0}")]
    Usage(String),
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_or_stdout(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, bytes),
        None => io::stdout().write_all(bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    parse_ntriples(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_policy_files(p: &PolicyArgs) -> Result<QualityPolicy, CliError> {
    Ok(load_policy(&read(&p.assessment)?, &read(&p.rules)?)?)
}

fn load_vocab(mapping: Option<&Path>) -> Result<Graph, CliError> {
    match mapping {
        Some(m) => Ok(mapping_vocab(&load_mapping(&read(m)?)?)),
        None => Ok(Graph::new()),
    }
}

fn load_records(path: &Path) -> Result<Vec<crate::ingest::EnergyRecord>, CliError> {
    let bytes = read(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        Ok(read_records_json(&bytes)?)
    } else {
        Ok(read_records_csv(&bytes)?)
    }
}

fn report_format(format: Option<ReportFormat>, report: Option<&Path>) -> ReportFormat {
    format.unwrap_or_else(|| report.map(ReportFormat::from_path).unwrap_or(ReportFormat::Json))
}

/// Runs a parsed command and returns its exit code.
pub fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Ingest {
            input,
            mapping,
            rules,
            out,
        } => {
            let rules_list = load_mapping(&read(&mapping)?)?;
            let records = load_records(&input)?;
            let at = match rules {
                Some(r) => {
                    let v: serde_json::Value = serde_json::from_slice(&read(&r)?)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", r.display())))?;
                    match v.get("referenceTime").and_then(|t| t.as_str()) {
                        Some(t) => parse_timestamp(t)
                            .ok_or_else(|| CliError::Usage(format!("referenceTime {t:?} is not ISO-8601")))?,
                        None => chrono::Utc::now(),
                    }
                }
                None => chrono::Utc::now(),
            };
            let bytes = records_to_ntriples(&records, &rules_list, at)?;
            write_or_stdout(out.as_deref(), &bytes)?;
            eprintln!("mapped {} record(s)", records.len());
            Ok(EXIT_OK)
        }
        Command::Assess {
            dataset,
            mapping,
            policy,
            report,
            format,
            strict,
        } => {
            let g = load_graph(&dataset)?;
            let p = load_policy_files(&policy)?;
            let vocab = load_vocab(mapping.as_deref())?;
            let r = assess_dataset(&g, &p, &content_id(&g), policy.seed, &vocab);
            let fmt = report_format(format, report.as_deref());
            write_or_stdout(report.as_deref(), &render_report(&r, fmt))?;
            eprintln!(
                "dataset {}: {} (overall {})",
                r.dataset_id,
                if r.passed { "passed" } else { "failed" },
                crate::numeric::format_decimal(&r.overall_score, 6)
            );
            Ok(if strict && !r.passed { EXIT_QUALITY } else { EXIT_OK })
        }
        Command::Improve {
            dataset,
            mapping,
            policy,
            out,
            report,
        } => {
            let g = load_graph(&dataset)?;
            let p = load_policy_files(&policy)?;
            let vocab = load_vocab(mapping.as_deref())?;
            let opts = assess_options(&p, &content_id(&g), policy.seed, &vocab);
            let before = crate::assess::assess(&g, &p, &opts);
            let outcome = improve(&g, &before, &p, &opts);
            write(&out, &serialize_ntriples(&outcome.graph))?;
            if let Some(r) = report {
                write(&r, &to_json_bytes(&outcome.to_json()))?;
            }
            eprintln!(
                "{} action(s), +{} -{} triples",
                outcome.actions.len(),
                outcome.additions().len(),
                outcome.deletions().len()
            );
            Ok(EXIT_OK)
        }
        Command::Pipeline {
            dataset,
            input,
            mapping,
            policy,
            rounds,
            out,
            report,
            format,
            strict,
        } => {
            let p = load_policy_files(&policy)?;
            let (g, vocab) = match (dataset, input) {
                (Some(d), _) => (load_graph(&d)?, load_vocab(mapping.as_deref())?),
                (None, Some(i)) => {
                    let m = mapping.ok_or_else(|| CliError::Usage("--input needs --mapping".into()))?;
                    let rules = load_mapping(&read(&m)?)?;
                    let records = load_records(&i)?;
                    let (g, _) = map_records(&records, &rules, resolve_now(&p), super::INGEST_AGENT)?;
                    (g, mapping_vocab(&rules))
                }
                (None, None) => return Err(CliError::Usage("one of --dataset or --input is required".into())),
            };
            let run = pipeline_dataset(&g, &p, &content_id(&g), policy.seed, rounds, &vocab)?;
            let fmt = report_format(format, report.as_deref());
            if let Some(dir) = &out {
                let mut ids = Vec::new();
                for (r, _) in &run.history {
                    let name = format!("report-{}.{}", r.round, fmt.extension());
                    write(&dir.join(&name), &render_report(r, fmt))?;
                    ids.push(name);
                }
                write(&dir.join("dataset.nt"), &serialize_ntriples(&run.graph))?;
                write(&dir.join("trace.jsonl"), run.trace_jsonl().as_bytes())?;
                write(&dir.join("run.json"), &to_json_bytes(&run_summary(&run, &ids)))?;
            }
            let last = run.final_report();
            if report.is_some() || out.is_none() {
                write_or_stdout(report.as_deref(), &render_report(last, fmt))?;
            }
            eprintln!("{:?} after {} assessment(s)", run.terminal, run.history.len());
            Ok(if strict && !last.passed { EXIT_QUALITY } else { EXIT_OK })
        }
        Command::GenFixture { seed, out, input } => {
            let mut cfg: FixtureConfig = match input {
                Some(path) => {
                    let bytes = read(&path)?;
                    serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
                }
                None => FixtureConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let fx = gen_fixture(&cfg)?;
            fx.write_to(&out)?;
            eprintln!("fixture with {} record(s) written to {}", fx.records.len(), out.display());
            Ok(EXIT_OK)
        }
        Command::Serve { port, data_dir } => {
            let dir = std::env::var_os("LDQ_DATA_DIR").map(PathBuf::from).unwrap_or(data_dir);
            let store = Store::open(&dir).map_err(|source| CliError::Io { path: dir, source })?;
            let addr = SocketAddr::from(([0, 0, 0, 0], port));
            let rt = tokio::runtime::Runtime::new().map_err(|source| CliError::Io {
                path: "<runtime>".into(),
                source,
            })?;
            rt.block_on(super::service::serve(addr, store))
                .map_err(|source| CliError::Io {
                    path: addr.to_string().into(),
                    source,
                })?;
            Ok(EXIT_OK)
        }
        Command::Vocab { format, out } => {
            let g = builtin_vocab();
            let bytes = match format {
                ReportFormat::Turtle => serialize_turtle(&g, ns::TURTLE_PREFIXES),
                ReportFormat::Ntriples => serialize_ntriples(&g),
                ReportFormat::Json => return Err(CliError::Usage("vocab is RDF only: use turtle or ntriples".into())),
            };
            write_or_stdout(out.as_deref(), &bytes)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
