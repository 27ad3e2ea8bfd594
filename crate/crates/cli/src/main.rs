//! `hecke`: command-line driver for the padic-hecke library.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hecke", version, about = "Exact p-adic Hecke orbit experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the run configuration; flags win over the config file.
#[derive(Args, Debug, Default)]
struct Global {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(short = 'p', long = "prime", global = true)]
    p: Option<u64>,
    /// p-adic precision K
    #[arg(short = 'K', long, global = true)]
    precision: Option<u32>,
    /// Mass window, `inner:a:rho` or `outer:rho` (repeatable)
    #[arg(long = "window", global = true)]
    windows: Vec<String>,
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 runs sequentially, 0 uses every core
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// τ_m on the kite, or v̂ of a CM discriminant
    Kite {
        #[arg(short = 'm')]
        m: Option<u32>,
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(short = 'D', allow_hyphen_values = true)]
        disc: Option<i64>,
    },
    /// Canonical branch of T_p for p = 2, 3
    Canon {
        #[command(subcommand)]
        action: CanonAction,
    },
    /// Class numbers and reduction types over a range of discriminants
    Class {
        /// Discriminants, e.g. `-1000..-3` or `-3,-4,-7`
        #[arg(short = 'D', long = "discs", allow_hyphen_values = true)]
        discs: String,
    },
    /// Window masses of CM divisors along a sequence of discriminants
    Cm {
        #[arg(short = 'D', long = "discs", allow_hyphen_values = true)]
        discs: String,
    },
    /// Window masses of T_n(start) along a sequence of n
    Orbit {
        /// `sups:VHAT`, `bad:ORDJ`, `ordinary` or `j:VALUE`
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(short = 'n')]
        ns: String,
    },
    /// Tate-curve Hecke masses outside D(0, p^rho)
    Tate {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        ordz: String,
        #[arg(short = 'n')]
        ns: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        rho: String,
    },
    /// Degree identities for CM divisors of growing conductor
    Zhang {
        #[arg(short = 'd', allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        fmax: i64,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        ftilde: String,
        /// Also check p-power conductors p^m·f up to this m
        #[arg(long, default_value_t = 4)]
        mmax: u32,
    },
    /// q-expansion identities
    Qexp {
        #[command(subcommand)]
        action: QexpAction,
    },
}

#[derive(Subcommand, Debug)]
enum CanonAction {
    /// ǩ_p and the tail coefficients A_1..A_N
    Series {
        #[arg(short = 'N')]
        n: Option<usize>,
    },
    /// t(j) to certified precision
    Eval {
        #[arg(short = 'j', allow_hyphen_values = true)]
        j: String,
    },
    /// Periodic / preperiodic classification of the t-orbit of j
    Orbit {
        #[arg(short = 'j', allow_hyphen_values = true)]
        j: String,
        #[arg(long, default_value_t = 16)]
        max_iter: usize,
    },
    /// ord_p Φ_p(j, t(j)) for one j, or for seeded random ordinary j
    Phicheck {
        #[arg(short = 'j', allow_hyphen_values = true)]
        j: Option<String>,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
enum QexpAction {
    Verify {
        #[arg(short = 'M')]
        m: Option<usize>,
    },
}

fn run_config(g: &Global, order: Option<usize>, qprec: Option<usize>) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = g.p {
        cfg.p = p;
    }
    if let Some(k) = g.precision {
        cfg.precision = k;
    }
    if !g.windows.is_empty() {
        cfg.windows = g.windows.clone();
    }
    if g.csv.is_some() {
        cfg.csv = g.csv.clone();
    }
    if g.json.is_some() {
        cfg.json = g.json.clone();
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(j) = g.jobs {
        cfg.jobs = j;
    }
    if let Some(n) = order {
        cfg.order = n;
    }
    if let Some(m) = qprec {
        cfg.qprec = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<()> {
    let (order, qprec) = match &cli.command {
        Command::Canon { action: CanonAction::Series { n } } => (*n, None),
        Command::Qexp { action: QexpAction::Verify { m } } => (None, *m),
        _ => (None, None),
    };
    let cfg = run_config(&cli.global, order, qprec)?;
    padic_hecke::exec::init_pool(cfg.jobs);
    match cli.command {
        Command::Kite { m, x, disc } => commands::kite(&cfg, m, x.as_deref(), disc),
        Command::Canon { action } => match action {
            CanonAction::Series { .. } => commands::canon_series(&cfg),
            CanonAction::Eval { j } => commands::canon_eval(&cfg, &j),
            CanonAction::Orbit { j, max_iter } => commands::canon_orbit(&cfg, &j, max_iter),
            CanonAction::Phicheck { j, count } => commands::canon_phicheck(&cfg, j.as_deref(), count),
        },
        Command::Class { discs } => commands::class(&cfg, &discs),
        Command::Cm { discs } => commands::cm(&cfg, &discs),
        Command::Orbit { start, ns } => commands::orbit(&cfg, &start, &ns),
        Command::Tate { ordz, ns, rho } => commands::tate(&cfg, &ordz, &ns, &rho),
        Command::Zhang { d, fmax, ftilde, mmax } => commands::zhang(&cfg, d, fmax, &ftilde, mmax),
        Command::Qexp { action: QexpAction::Verify { .. } } => commands::qexp_verify(&cfg),
    }
}

/// 2 invariant violation or bad input, 3 unsupported parameter, 4 I/O.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<padic_hecke::Error>() {
            return match e {
                padic_hecke::Error::Unsupported(_) | padic_hecke::Error::TooSupersingular(_) => 3,
                _ => 2,
            };
        }
        if cause.is::<std::io::Error>() {
            return 4;
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            return if e.is_io_error() { 4 } else { 2 };
        }
        if cause.is::<ConfigError>() || cause.is::<commands::CheckFailed>() {
            return 2;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
