//! Command-line front end: stable, machine-readable JSON/CSV around the
//! library. Exit codes: 0 success, 2 input validation failure, 3 numerical
//! failure.

mod input;
mod reports;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hardy_tubes::config::Tolerances;
use hardy_tubes::CoreError;

#[derive(Parser)]
#[command(
    name = "hardy-tubes",
    version,
    about = "Octant Hardy-space decompositions of L^p functions, 0 < p < 1"
)]
struct Cli {
    /// Cap the rayon worker count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for every grid jitter and sampling choice.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// L^p quasi-norm slice of a rational (JSON in, JSON out).
    Norm {
        /// Rational JSON file, or '-' for stdin.
        #[arg(long)]
        input: String,
        #[arg(long)]
        p: f64,
        /// Imaginary offsets, comma separated; zeros when omitted.
        #[arg(long)]
        y: Option<String>,
        /// Relative tolerance; dimension default when omitted.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Hardy-space membership certificate for one octant.
    Certify {
        #[arg(long)]
        input: String,
        /// Octant label such as "++-".
        #[arg(long)]
        octant: String,
        #[arg(long)]
        p: f64,
    },
    /// Split a class-A atom into 2^n certified octant components.
    Split {
        #[arg(long)]
        input: String,
        #[arg(long)]
        p: f64,
        /// Per-variable split orders, comma separated; default l_k + n + 1.
        #[arg(long)]
        m: Option<String>,
        /// Fixed phase components, comma separated.
        #[arg(long)]
        phi: Option<String>,
        /// Search the phase grid instead of using --phi.
        #[arg(long, default_value_t = false)]
        auto_phi: bool,
        /// Phase grid points per dimension.
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
    /// Telescoping rational approximation of a sampled function.
    Approx {
        /// builtin:gaussian | builtin:bump | builtin:sinc-squared | csv:FILE
        #[arg(long)]
        f: String,
        /// Dimension for builtin functions.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 8)]
        max_atoms: usize,
        /// First-stage numerator degree (0 = auto).
        #[arg(long, default_value_t = 0)]
        initial_degree: u32,
    },
    /// Full octant decomposition with certified components and checks.
    Decompose {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 8)]
        max_atoms: usize,
        #[arg(long, default_value_t = 0)]
        initial_degree: u32,
        /// Directory for per-octant boundary-approach CSV tables.
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Intersection-class atom demo: certificates in every octant plus a
    /// second decomposition with identical values and different norms.
    XpDemo {
        #[arg(long)]
        p: f64,
        /// Pole matrix: rows per variable, e.g. "1,-1;2,-2".
        #[arg(long)]
        poles: String,
        /// Optional numerator as rational-JSON numerator terms.
        #[arg(long)]
        numerator: Option<PathBuf>,
    },
    /// Reciprocal-class fitting demo: CSV of (degree, sup_residual, lp_bound).
    DensityDemo {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long)]
        p: f64,
        /// Fit degrees, comma separated.
        #[arg(long, default_value = "2,4,8")]
        degrees: String,
        /// recip:K for boundary values of (x + i)^(-K).
        #[arg(long, default_value = "recip:5")]
        target: String,
        #[arg(long, default_value = "+")]
        octant: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore a second initialization (tests drive main repeatedly).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let profile = std::env::var("HARDY_TUBES_TOLERANCES").unwrap_or_else(|_| "default".into());
    let tols = Tolerances::profile(&profile);
    match dispatch(&cli, &tols, &profile) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = err
                .downcast_ref::<CoreError>()
                .map(|e| e.exit_class())
                .unwrap_or(2);
            ExitCode::from(code as u8)
        }
    }
}

fn dispatch(cli: &Cli, tols: &Tolerances, profile: &str) -> anyhow::Result<()> {
    let ctx = reports::Context {
        seed: cli.seed,
        threads: rayon::current_num_threads(),
        profile: profile.to_string(),
        out: cli.out.clone(),
        tols: tols.clone(),
    };
    match &cli.command {
        Command::Norm { input, p, y, tol } => reports::norm(&ctx, input, *p, y.as_deref(), *tol),
        Command::Certify { input, octant, p } => reports::certify(&ctx, input, octant, *p),
        Command::Split {
            input,
            p,
            m,
            phi,
            auto_phi,
            grid,
        } => reports::split(&ctx, input, *p, m.as_deref(), phi.as_deref(), *auto_phi, *grid),
        Command::Approx {
            f,
            n,
            p,
            epsilon,
            max_atoms,
            initial_degree,
        } => reports::approx(&ctx, f, *n, *p, *epsilon, *max_atoms, *initial_degree),
        Command::Decompose {
            f,
            n,
            p,
            epsilon,
            max_atoms,
            initial_degree,
            emit_trace,
        } => reports::decompose(
            &ctx,
            f,
            *n,
            *p,
            *epsilon,
            *max_atoms,
            *initial_degree,
            emit_trace.as_deref(),
        ),
        Command::XpDemo {
            p,
            poles,
            numerator,
        } => reports::xp_demo(&ctx, *p, poles, numerator.as_deref()),
        Command::DensityDemo {
            big_n,
            p,
            degrees,
            target,
            octant,
        } => reports::density_demo(&ctx, *big_n, *p, degrees, target, octant),
    }
}
