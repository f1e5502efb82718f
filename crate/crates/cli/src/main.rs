//! `galdef`: batch computations on tame Galois deformation data, one JSON
//! report per run.

mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "galdef", version, about = "Deformation-theoretic checks on the tame quotient, with JSON reports")]
struct Cli {
    /// Report path (default: <command>.json in the working directory)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Check exhaustively where the default is to sample
    #[arg(long, global = true)]
    exhaustive: bool,

    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Clone, Copy, Debug)]
pub struct Globals {
    pub seed: u64,
    pub exhaustive: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariant line of the twisted trace-zero adjoint at a level-raising prime
    Invariants(InvariantsArgs),
    /// Closed-form Brauer 2-cocycle: cocycle identity and class check
    Cocycle(CocycleArgs),
    /// Lattice construction of the Brauer cocycle compared with the closed form
    Recipe(RecipeArgs),
    /// Cohomology dimensions of a named module
    Cohomology(CohomologyArgs),
    /// Lifting checks for a diagonal residual representation over Z/l^2
    Lift(LiftArgs),
    /// Local vanishing criteria
    Criteria {
        #[command(subcommand)]
        kind: CriteriaKind,
    },
    /// Obstruction classification of a problem instance
    Classify(ClassifyArgs),
    /// Congruence scan over a newform data file
    Congruence(CongruenceArgs),
    /// Congruence-prime candidates from the modular degree
    Ars(ArsArgs),
    /// Relation-ideal search over the Steinberg candidate family
    Defring(DefringArgs),
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long)]
    pub q: i64,
    /// Defaults to q * beta
    #[arg(long)]
    pub alpha: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub beta: i64,
}

#[derive(Args, Debug)]
pub struct CocycleArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long)]
    pub q: i64,
    /// Sampled triples when the group has more than 300 elements
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct RecipeArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long)]
    pub q: i64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModuleKind {
    Trivial,
    Cyclotomic,
    Ad,
    Ad0,
    TwistedAd,
    TwistedAd0,
    /// Trivial F_l over Z/n
    Cyclic,
}

#[derive(Args, Debug)]
pub struct CohomologyArgs {
    #[arg(long, value_enum)]
    pub module: ModuleKind,
    #[arg(long)]
    pub ell: u64,
    #[arg(long, default_value_t = 2)]
    pub q: i64,
    #[arg(long, default_value_t = 1)]
    pub alpha: i64,
    #[arg(long, default_value_t = 1)]
    pub beta: i64,
    /// Order of the cyclic group (default l)
    #[arg(long)]
    pub n: Option<usize>,
    /// Single degree in 0..=2 (default: all)
    #[arg(long)]
    pub degree: Option<usize>,
    /// Random cochains per degree for the d(d) = 0 check
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    #[arg(long, default_value_t = 5)]
    pub ell: u64,
    #[arg(long, default_value_t = 2)]
    pub q: i64,
    #[arg(long, default_value_t = 2)]
    pub alpha: i64,
    #[arg(long, default_value_t = 1)]
    pub beta: i64,
    /// Random set-theoretic sections to test
    #[arg(long, default_value_t = 50)]
    pub sections: usize,
    /// 1-cochains for the dual-number criterion
    #[arg(long, default_value_t = 200)]
    pub cochains: usize,
}

#[derive(Subcommand, Debug)]
pub enum CriteriaKind {
    /// Nonvanishing at a principal-series prime
    PrincipalSeries {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
    },
    /// Vanishing at a supercuspidal prime
    Supercuspidal {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
    },
    /// Local invariants at a Steinberg prime
    Steinberg {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
    },
    /// Vanishing at l
    AtEll {
        #[arg(long, allow_hyphen_values = true)]
        a_ell: i64,
        #[arg(long)]
        modular_degree: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        congruence_prime: bool,
    },
    /// Standing hypotheses on (N, l)
    Standing {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        ell: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ShaArg {
    Yes,
    No,
    Unknown,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Problem instance as JSON; otherwise a level-raise instance is built from the flags
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub level: Option<u64>,
    #[arg(long)]
    pub ell: Option<u64>,
    /// Level-raising prime
    #[arg(long)]
    pub q: Option<u64>,
    /// Defaults to q * beta
    #[arg(long)]
    pub alpha: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub beta: i64,
    /// Assert vanishing of global H^2 before adding q
    #[arg(long)]
    pub assert_h2_vanishing: bool,
    /// Whether the Sha^1 term is nonzero
    #[arg(long, value_enum, default_value_t = ShaArg::Unknown)]
    pub sha: ShaArg,
}

#[derive(Args, Debug)]
pub struct CongruenceArgs {
    /// Label of the form to scan
    #[arg(long)]
    pub form: String,
    /// Newform file or directory containing newforms.json (default: $GALDEF_DATA_DIR)
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub ell_max: u64,
    /// Skip primes failing the standing hypotheses
    #[arg(long)]
    pub require_standing: bool,
}

#[derive(Args, Debug)]
pub struct ArsArgs {
    #[arg(long)]
    pub level: u64,
    #[arg(long)]
    pub modular_degree: u64,
}

#[derive(Args, Debug)]
pub struct DefringArgs {
    #[arg(long, default_value_t = 5)]
    pub ell: u64,
    /// Coefficients mod l^precision
    #[arg(long, default_value_t = 2)]
    pub precision: u32,
    /// Total-degree cap
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value_t = 3)]
    pub p: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let g = Globals {
        seed: cli.seed,
        exhaustive: cli.exhaustive,
    };
    let result = match &cli.command {
        Command::Invariants(a) => commands::invariants(a, g),
        Command::Cocycle(a) => commands::cocycle(a, g),
        Command::Recipe(a) => commands::recipe(a, g),
        Command::Cohomology(a) => commands::cohomology(a, g),
        Command::Lift(a) => commands::lift(a, g),
        Command::Criteria { kind } => commands::criteria(kind, g),
        Command::Classify(a) => commands::classify(a, g),
        Command::Congruence(a) => commands::congruence(a, g),
        Command::Ars(a) => commands::ars(a, g),
        Command::Defring(a) => commands::defring(a, g),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("galdef: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let out = cli.out.unwrap_or_else(|| PathBuf::from(format!("{}.json", report.command)));
    if let Err(e) = std::fs::write(&out, report.to_json()) {
        let e = CliError::Data(format!("cannot write {}: {e}", out.display()));
        eprintln!("galdef: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    println!("{}", report.summary());
    println!("report: {}", out.display());
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
