mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser)]
#[command(name = "setcalc", version, about = "Set-valued calculus experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON file whose keys supply defaults for any flag of the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: ./out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Points per sweep or per parameter axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Relative tolerance for clustering and convergence.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Step schedule, `n0:N` (t = 1/n) or `h:levels` (t = h·2^-k).
    #[arg(long, global = true)]
    pub schedule: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario, or `all`.
    Scenario {
        name: Option<String>,
        /// Seed for randomized scenarios.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Eulerian derivative of a shape functional.
    ShapeDeriv(commands::ShapeDerivArgs),
    /// Fomin derivative of a measure at a set.
    Fomin(commands::FominArgs),
    /// Selection of a set-valued map through an anchor.
    Select(commands::SelectArgs),
    /// Lower-semicontinuity check against open boxes.
    Lsc(commands::LscArgs),
    /// Adherence-set derivative over a path family.
    Svdiff(commands::SvdiffArgs),
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`setcalc ... | head`) instead of panicking in println!.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = config::Config::load(&cli.common).and_then(|cfg| match cli.command {
        Command::Scenario { name, seed } => commands::scenario(&cfg, name, seed),
        Command::ShapeDeriv(a) => commands::shape_deriv(&cfg, a),
        Command::Fomin(a) => commands::fomin(&cfg, a),
        Command::Select(a) => commands::select(&cfg, a),
        Command::Lsc(a) => commands::lsc(&cfg, a),
        Command::Svdiff(a) => commands::svdiff(&cfg, a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
