use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ivalue_core::format::{parse, serialize, to_canonical_string, Document};
use ivalue_core::Error as CoreError;
use ivalue_service::compute::{self, CheckParams, RepairParams, Representation, ScaleParams};
use ivalue_service::{Config, Server, ServiceError, ADDR_ENV, DEFAULT_ADDR, DEFAULT_LOG, LOG_ENV};

#[derive(Parser)]
#[command(name = "ivalue", version, about = "Interval preference relations and interval value scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Print the result as a canonical document instead of a report.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a matrix for reciprocity and consistency (exit 1 if inconsistent).
    Check {
        file: PathBuf,
        /// Neutral half-width; inferred from the diagonal if omitted.
        #[arg(long)]
        neutral: Option<f64>,
        #[arg(long, default_value_t = ivalue_core::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Find the closest consistent matrix.
    Repair {
        file: PathBuf,
        /// Mean of the fitted values.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu: f64,
        /// Keep the neutral half-width fixed at this value.
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Build the value scale of a chain or consistent matrix.
    Scale {
        file: PathBuf,
        /// Divide by the normalization constant.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Convert between additive, fuzzy and multiplicative relations.
    Convert {
        #[arg(long)]
        from: Representation,
        #[arg(long)]
        to: Representation,
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Run the HTTP service until interrupted.
    Serve {
        #[arg(long, env = ADDR_ENV, default_value = DEFAULT_ADDR)]
        addr: String,
        #[arg(long, env = LOG_ENV, default_value = DEFAULT_LOG)]
        log: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid listen address {0:?}")]
    BadAddress(String),
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Service(e) => e.name(),
            CliError::Io(..) => "IoError",
            CliError::BadAddress(_) => "BadAddress",
        }
    }

    fn path(&self) -> Option<&str> {
        match self {
            CliError::Core(e) => e.path(),
            _ => None,
        }
    }
}

fn read(file: &Path) -> Result<Document, CliError> {
    let text = fs::read_to_string(file).map_err(|e| CliError::Io(file.to_path_buf(), e))?;
    Ok(parse(&text)?)
}

fn emit(doc: &Document, out: &Output, report: impl FnOnce() -> String) {
    if out.json {
        println!("{}", serialize(doc));
    } else {
        print!("{}", report());
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Check {
            file,
            neutral,
            tol,
            out,
        } => {
            let doc = read(&file)?;
            let r = compute::check(compute::expect_matrix(&doc)?, &CheckParams { neutral, tol })?;
            let consistent = r.is_consistent;
            let doc = Document::ConsistencyReport(r.clone());
            emit(&doc, &out, || {
                let mut s = format!("consistent: {}\nmax_residual: {}\n", r.is_consistent, r.max_residual);
                if let Some(u) = r.neutral {
                    s += &format!("neutral: {:.3}\n", ivalue_core::Interval::from(u));
                }
                if let Some((i, j, k)) = r.worst_triple {
                    s += &format!("worst_triple: ({i}, {j}, {k})\n");
                }
                s
            });
            Ok(if consistent { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Repair {
            file,
            mu,
            alpha,
            out,
        } => {
            let doc = read(&file)?;
            let s = compute::repair(compute::expect_matrix(&doc)?, &RepairParams { mu, alpha })?;
            emit(&Document::RepairSolution(s.clone()), &out, || {
                let nu: Vec<String> = s.nu.iter().map(|x| format!("{x:.3}")).collect();
                format!(
                    "nu: ({})\nalpha: {:.3}\nobjective: {:.6}\nrepaired:\n{}\n",
                    nu.join(", "),
                    s.alpha,
                    s.objective,
                    s.repaired
                )
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Scale {
            file,
            normalize,
            out,
        } => {
            let doc = read(&file)?;
            let scale = compute::scale(&doc, &ScaleParams { normalize })?;
            emit(&Document::ValueScale(scale.clone()), &out, || {
                let mut s = String::new();
                if let Document::Chain(chain) = &doc {
                    let d = ivalue_core::session::diagnose_chain(chain.clone());
                    if !d.equal_lengths {
                        let steps: Vec<String> =
                            d.proposal.adjusted_steps.iter().map(|z| format!("{z:.3}")).collect();
                        s += &format!(
                            "steps differ in length; using alpha = {:.3}: {}\n",
                            d.proposal.alpha,
                            steps.join(" ")
                        );
                    }
                }
                s + &format!("{scale}\n")
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Convert { from, to, file, out } => {
            let doc = read(&file)?;
            let converted = compute::convert(&doc, Some(from), to)?;
            emit(&converted, &out, || {
                let m = match &converted {
                    Document::IntervalMatrix(z) => z.clone(),
                    Document::FuzzyRelation(y) => y.entries().clone(),
                    Document::SaatyRelation(a) => a.entries().clone(),
                    _ => unreachable!("conversions yield relations"),
                };
                format!("{to}:\n{m}\n")
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { addr, log } => {
            let addr: SocketAddr = addr.parse().map_err(|_| CliError::BadAddress(addr))?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(PathBuf::from("runtime"), e))?;
            runtime.block_on(async {
                let server = Server::bind(&Config { addr, log }).await?;
                eprintln!("listening on {}", server.local_addr());
                server.run().await
            })?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let json = match &cli.command {
        Command::Check { out, .. }
        | Command::Repair { out, .. }
        | Command::Scale { out, .. }
        | Command::Convert { out, .. } => out.json,
        Command::Serve { .. } => false,
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if json {
                let mut body = serde_json::json!({ "detail": e.to_string(), "error_name": e.name() });
                if let Some(p) = e.path() {
                    body["path"] = serde_json::json!(p);
                }
                eprintln!("{}", to_canonical_string(&body));
            } else {
                match e.path() {
                    Some(p) => eprintln!("error: {} at {p}: {e}", e.name()),
                    None => eprintln!("error: {}: {e}", e.name()),
                }
            }
            ExitCode::from(2)
        }
    }
}
