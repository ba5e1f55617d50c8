//! `hardcore`: command-line front end for the transfer-matrix engine.

mod cache;
mod commands;
mod reproduce;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardcore::partition::BoundaryCondition;
use hardcore::transfer::Model;

use crate::cache::Cache;

#[derive(Parser)]
#[command(
    name = "hardcore",
    version,
    about = "Exact and numeric transfer-matrix computations for hard squares and hard hexagons"
)]
struct Cli {
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cache directory for partition polynomials and zeros.
    #[arg(long, global = true, env = "HARDCORE_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Disable the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Report cache activity on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

/// A rectangular lattice.
#[derive(Args, Clone, Copy)]
pub struct Lattice {
    #[arg(long, default_value = "squares")]
    pub model: Model,
    /// Boundary condition: first letter along L_v, second along a row.
    #[arg(long)]
    pub bc: BoundaryCondition,
    #[arg(long)]
    pub lv: usize,
    #[arg(long)]
    pub lh: usize,
}

/// Transfer operator choice.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    /// Zero-momentum reflection-even block of the cyclic operator.
    C0p,
    /// Full cyclic operator.
    Cyclic,
    /// Full free operator.
    Free,
    /// Reflection-even block of the free operator.
    FreeParity,
}

#[derive(Args, Clone, Copy)]
pub struct Operator {
    #[arg(long, default_value = "squares")]
    pub model: Model,
    #[arg(long, value_enum)]
    pub op: Op,
    #[arg(long)]
    pub lh: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RowBoundary {
    Cyclic,
    Free,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrbitGroup {
    Translation,
    Dihedral,
    Reflection,
}

#[derive(Subcommand)]
enum Command {
    /// Valid rows of a given width (CSV).
    Rows {
        #[arg(long)]
        lh: usize,
        #[arg(long, value_enum, default_value = "cyclic")]
        boundary: RowBoundary,
        /// List symmetry orbits instead of rows.
        #[arg(long, value_enum)]
        orbits: Option<OrbitGroup>,
    },
    /// Exact partition polynomial (zpoly text).
    Partition(Lattice),
    /// Exact partition function at an integer fugacity.
    Value {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        z: i64,
    },
    /// Zeros of the partition polynomial (CSV, or JSON with --report).
    Zeros {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, default_value_t = 20)]
        digits: u32,
        /// Summarize endpoints and segment counts instead.
        #[arg(long)]
        report: bool,
    },
    /// Zero density on the negative axis and its lattice derivatives.
    Density {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, default_value_t = 20)]
        digits: u32,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Fit the edge exponent on the window LO,HI (JSON output).
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        fit: Option<(f64, f64)>,
        /// Zeros used for the near-edge slope of D/D'.
        #[arg(long, default_value_t = 10)]
        slope_count: usize,
    },
    /// Equimodular endpoints (JSON) or a scan of a rectangle (CSV).
    Equimod {
        #[command(flatten)]
        operator: Operator,
        /// Scan the rectangle RE0,IM0,RE1,IM1 instead.
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        scan: Option<[f64; 4]>,
        #[arg(long, default_value_t = 60)]
        grid: usize,
        /// Also locate the rightmost axis crossing near z = -1.
        #[arg(long)]
        crossing: bool,
    },
    /// Intervals of [-1, z_d] with a real dominant eigenvalue (CSV).
    Gaps {
        #[command(flatten)]
        operator: Operator,
        #[arg(long, allow_hyphen_values = true)]
        z_d: Option<f64>,
        #[arg(long, default_value_t = hardcore::spectra::DEFAULT_GAP_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Normalized phase of the dominant pair on the negative axis (CSV).
    Phase {
        #[command(flatten)]
        operator: Operator,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long, allow_hyphen_values = true)]
        z_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        z_max: Option<f64>,
    },
    /// Equimodular angles on a large circle (CSV).
    Rays {
        #[command(flatten)]
        operator: Operator,
        #[arg(long, default_value_t = 1000.0)]
        radius: f64,
        #[arg(long, default_value_t = hardcore::spectra::DEFAULT_RAY_SAMPLES)]
        samples: usize,
    },
    /// Characteristic polynomial at an integer fugacity (JSON).
    Charpoly {
        #[command(flatten)]
        operator: Operator,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        z: i64,
    },
    /// Characteristic polynomial as a product of (x^n - 1)^e.
    Factorize {
        #[command(flatten)]
        operator: Operator,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        z: i64,
        #[arg(long)]
        json: bool,
    },
    /// Values over L_v (CSV), or their recurrence with --fit (JSON).
    Sequence {
        #[arg(long, default_value = "squares")]
        model: Model,
        #[arg(long)]
        bc: BoundaryCondition,
        #[arg(long)]
        lh: usize,
        /// Number of terms; defaults to twice the operator order plus 4.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        z: i64,
        #[arg(long)]
        fit: bool,
    },
    /// Checks the empirical identities of the z = -1 sequences (JSON).
    Conjectures {
        #[arg(long, default_value_t = 8)]
        lh_max: usize,
        #[arg(long, default_value_t = 20)]
        lv_max: usize,
    },
    /// Regenerates a bundled reference table and diffs it.
    Reproduce {
        #[arg(value_enum)]
        target: reproduce::Target,
        #[arg(long)]
        lh_max: Option<usize>,
        #[arg(long)]
        lv_max: Option<usize>,
    },
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected {N} comma-separated numbers"))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let [a, b] = parse_floats::<2>(s)?;
    Ok((a, b))
}

fn parse_rect(s: &str) -> Result<[f64; 4], String> {
    parse_floats::<4>(s)
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
pub enum Failure {
    Engine(hardcore::Error),
    Validation(String),
    Io(std::io::Error),
    Usage(String),
}

impl From<hardcore::Error> for Failure {
    fn from(e: hardcore::Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        use hardcore::Error::*;
        match self {
            Failure::Validation(_) => 2,
            Failure::Engine(ResourceCap { .. }) => 3,
            Failure::Engine(NonConvergence { .. } | UnwrapAmbiguity { .. }) => 4,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        use hardcore::Error::*;
        match self {
            Failure::Validation(_) => "validation",
            Failure::Io(_) => "io",
            Failure::Usage(_) => "usage",
            Failure::Engine(e) => match e {
                InvalidArgument(_) => "invalid_argument",
                ResourceCap { .. } => "resource_cap",
                NotRootsOfUnity { .. } => "not_roots_of_unity",
                NonConvergence { .. } => "non_convergence",
                InsufficientTerms { .. } => "insufficient_terms",
                UnwrapAmbiguity { .. } => "unwrap_ambiguity",
                DisjointRanges(_) => "disjoint_ranges",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Engine(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
            Failure::Validation(m) | Failure::Usage(m) => m.clone(),
        }
    }
}

pub type CmdResult<T> = Result<T, Failure>;

/// Shared state of one invocation.
pub struct Context {
    pub cache: Option<Cache>,
    pub verbose: bool,
}

impl Context {
    pub fn note(&self, msg: &str) {
        if self.verbose {
            eprintln!("note: {msg}");
        }
    }
}

/// What a command produced.
pub struct Artifact {
    pub bytes: Vec<u8>,
    /// Set when the output is complete but a check failed.
    pub validation: Option<String>,
}

impl Artifact {
    pub fn new(bytes: Vec<u8>) -> Self {
        Artifact {
            bytes,
            validation: None,
        }
    }

    pub fn text(s: String) -> Self {
        Artifact::new(s.into_bytes())
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        return out.flush();
    };
    let mut name = path.as_os_str().to_owned();
    name.push(".partial");
    let partial = PathBuf::from(name);
    let result = fs::write(&partial, bytes).and_then(|_| fs::rename(&partial, path));
    if result.is_err() {
        let _ = fs::remove_file(&partial);
    }
    result
}

fn error_record(f: &Failure) {
    let record = serde_json::json!({
        "schema": commands::SCHEMA,
        "error": f.kind(),
        "message": f.message(),
        "exit_code": f.code(),
    });
    eprintln!("{record}");
}

fn run(cli: Cli) -> CmdResult<Artifact> {
    let cache = match (&cli.cache_dir, cli.no_cache) {
        (Some(dir), false) => Some(Cache::open(dir)?),
        _ => None,
    };
    let ctx = Context {
        cache,
        verbose: cli.verbose,
    };
    use commands as c;
    match cli.command {
        Command::Rows {
            lh,
            boundary,
            orbits,
        } => c::rows(lh, boundary, orbits),
        Command::Partition(l) => c::partition(&ctx, l),
        Command::Value { lattice, z } => c::value(lattice, z),
        Command::Zeros {
            lattice,
            digits,
            report,
        } => c::zeros(&ctx, lattice, digits, report),
        Command::Density {
            lattice,
            digits,
            order,
            fit,
            slope_count,
        } => c::density(&ctx, lattice, digits, order, fit, slope_count),
        Command::Equimod {
            operator,
            scan,
            grid,
            crossing,
        } => c::equimod(operator, scan, grid, crossing),
        Command::Gaps {
            operator,
            z_d,
            samples,
            tol,
        } => c::gaps(operator, z_d, samples, tol),
        Command::Phase {
            operator,
            samples,
            z_min,
            z_max,
        } => c::phase(operator, samples, z_min, z_max),
        Command::Rays {
            operator,
            radius,
            samples,
        } => c::rays(operator, radius, samples),
        Command::Charpoly { operator, z } => c::charpoly(operator, z),
        Command::Factorize { operator, z, json } => c::factorize(operator, z, json),
        Command::Sequence {
            model,
            bc,
            lh,
            n,
            z,
            fit,
        } => c::sequence(model, bc, lh, n, z, fit),
        Command::Conjectures { lh_max, lv_max } => c::conjectures(lh_max, lv_max),
        Command::Reproduce {
            target,
            lh_max,
            lv_max,
        } => reproduce::run(target, lh_max, lv_max),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let f = Failure::Usage(e.kind().to_string());
            error_record(&f);
            return ExitCode::from(f.code());
        }
    };
    let out = cli.out.clone();
    let result = run(cli).and_then(|artifact| {
        write_output(out.as_deref(), &artifact.bytes)?;
        match artifact.validation {
            Some(msg) => Err(Failure::Validation(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            error_record(&f);
            ExitCode::from(f.code())
        }
    }
}
