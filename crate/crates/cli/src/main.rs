mod commands;
mod config;
mod lmfdb;
mod output;

use clap::{Args, Parser, Subcommand};
use output::{envelope, error_json, error_kind, Format};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

#[derive(Parser, Debug)]
#[command(name = "mahlercm", version, about = "CM points, Mahler measures, L-values and regulator checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Working precision in bits (at least 64).
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// Tolerance; each command has its own default.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// key = value file; defaults to $MAHLERCM_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for row and case fan-out.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Allow network access (LMFDB cross-checks).
    #[arg(long, global = true)]
    online: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the CM-point search and emit the table.
    CmSearch {
        /// Compare against the embedded printed table.
        #[arg(long)]
        check_table1: bool,
        /// table or literal
        #[arg(long, default_value = "table")]
        filter: String,
    },
    /// Negative discriminants with small class number.
    ClassNumbers {
        #[arg(long, default_value_t = 2)]
        max_h: u64,
    },
    /// λ(2τ), k, j and the Weber functions at τ.
    Lambda {
        /// τ as an expression, e.g. "i" or "(1+i*sqrt(7))/4".
        #[arg(long, conflicts_with = "form", required_unless_present = "form")]
        tau: Option<String>,
        /// τ as the root of a,b,c.
        #[arg(long, allow_hyphen_values = true)]
        form: Option<String>,
    },
    /// Minimal integer polynomial of a number.
    Algdep {
        /// The number as an expression.
        #[arg(long, conflicts_with = "cm_row", required_unless_present = "cm_row")]
        x: Option<String>,
        /// λ(2τ₀) of a CM-table row (1-based).
        #[arg(long)]
        cm_row: Option<usize>,
        #[arg(long, default_value_t = 8)]
        degree: usize,
        #[arg(long, default_value_t = 64)]
        bits: u32,
    },
    /// Mahler measure of x + 1/x + y + 1/y + k.
    Mahler {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, value_enum, default_value = "jensen")]
        method: commands::Method,
        /// direct or accelerated (lattice method).
        #[arg(long, default_value = "accelerated")]
        strategy: String,
        /// CM point for the lattice method; looked up from k when absent.
        #[arg(long, conflicts_with = "form")]
        tau: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        form: Option<String>,
    },
    /// L(f, 2) for a form given as JSON or by identity row.
    Lvalue {
        /// FormSpec JSON, or @path to a file holding it.
        #[arg(long, conflicts_with = "row", required_unless_present = "row")]
        spec: Option<String>,
        #[arg(long)]
        row: Option<usize>,
    },
    /// Check m(k) = c_k L(f_k, 2) for identity rows.
    VerifyIdentity {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        row: Option<usize>,
        #[arg(long)]
        all: bool,
    },
    /// Exact Sturm-bound checks of the two level-64 theta identities.
    SturmCheck,
    /// Regulator verification for one case.
    Regulator {
        /// 6, 7.1, 7.2, 7.3 or 7.4
        #[arg(long)]
        case: String,
        /// Include paths, pairings and the isogeny report.
        #[arg(long)]
        full: bool,
        /// Exchange E and its conjugate.
        #[arg(long)]
        swap: bool,
    },
    /// Run the checks; all sections when none is selected.
    CheckAll {
        #[arg(long)]
        tables: bool,
        #[arg(long)]
        identities: bool,
        #[arg(long)]
        cases: bool,
        #[arg(long)]
        isogenies: bool,
    },
    /// Cross-check newform coefficients against the LMFDB.
    Lmfdb {
        #[arg(long)]
        label: String,
    },
    /// Dump the embedded printed data with its checksum.
    Data,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CmSearch { .. } => "cm-search",
            Command::ClassNumbers { .. } => "class-numbers",
            Command::Lambda { .. } => "lambda",
            Command::Algdep { .. } => "algdep",
            Command::Mahler { .. } => "mahler",
            Command::Lvalue { .. } => "lvalue",
            Command::VerifyIdentity { .. } => "verify-identity",
            Command::SturmCheck => "sturm-check",
            Command::Regulator { .. } => "regulator",
            Command::CheckAll { .. } => "check-all",
            Command::Lmfdb { .. } => "lmfdb",
            Command::Data => "data",
        }
    }
}

fn dispatch(cmd: &Command, cfg: &config::Config) -> mahlercm::Result<output::Outcome> {
    use commands::*;
    match cmd {
        Command::CmSearch { check_table1, filter } => cm_search(cfg, *check_table1, filter),
        Command::ClassNumbers { max_h } => class_numbers(*max_h),
        Command::Lambda { tau, form } => lambda(cfg, tau.as_deref(), form.as_deref()),
        Command::Algdep { x, cm_row, degree, bits } => algdep(cfg, x.as_deref(), *cm_row, *degree, *bits),
        Command::Mahler { k, method, strategy, tau, form } => {
            mahler(cfg, k, *method, strategy, tau.as_deref(), form.as_deref())
        }
        Command::Lvalue { spec, row } => lvalue(cfg, spec.as_deref(), *row),
        Command::VerifyIdentity { row, all } => verify_identities(cfg, *row, *all),
        Command::SturmCheck => sturm_check(),
        Command::Regulator { case, full, swap } => regulator(cfg, case, *full, *swap),
        Command::CheckAll { tables, identities, cases, isogenies } => {
            let none = !(*tables || *identities || *cases || *isogenies);
            check_all(cfg, Sections {
                tables: *tables || none,
                identities: *identities || none,
                cases: *cases || none,
                isogenies: *isogenies || none,
            })
        }
        Command::Lmfdb { label } => lmfdb_command(cfg, label),
        Command::Data => data(),
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn fail(command: Option<&str>, kind: &str, message: &str) -> ExitCode {
    emit(&format!("{}\n", error_json(command, kind, message)));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                emit(&e.to_string());
                return ExitCode::SUCCESS;
            }
            return fail(None, "Usage", e.to_string().trim());
        }
    };
    let name = cli.command.name();
    let g = &cli.global;
    let flags = config::Overrides {
        prec: g.prec,
        eps: g.eps,
        cache_dir: g.cache_dir.clone(),
        online: g.online.then_some(true),
        jobs: g.jobs,
    };
    let cfg = match config::resolve(g.config.as_deref(), config::process_env, &flags) {
        Ok(c) => c,
        Err(e) => return fail(Some(name), &error_kind(&e), &e.to_string()),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
        Ok(p) => p,
        Err(e) => return fail(Some(name), "DomainError", &e.to_string()),
    };
    let started = SystemTime::now();
    let clock = Instant::now();
    let out = match pool.install(|| dispatch(&cli.command, &cfg)) {
        Ok(o) => o,
        Err(e) => return fail(Some(name), &error_kind(&e), &e.to_string()),
    };
    match g.format {
        Format::Json => {
            let v = envelope(name, &out, started, clock.elapsed());
            emit(&format!("{}\n", serde_json::to_string_pretty(&v).expect("JSON values serialize")));
        }
        Format::Csv => match &out.csv {
            Some(csv) => emit(csv),
            None => return fail(Some(name), "Unsupported", &format!("{name} has no CSV form; use --format json")),
        },
    }
    if out.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
