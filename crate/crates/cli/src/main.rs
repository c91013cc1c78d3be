use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixlap_cli::config::{Example, QuadConfig, OUTPUT_DIR_ENV};
use mixlap_cli::{run, validate, Command, LoadSpec, RawConfig};

/// Mixed local/nonlocal Dirichlet solves, barrier builds and verification.
///
/// Settings come from an optional TOML file; flags override its keys. The
/// output directory defaults to $MIXLAP_OUTPUT_DIR, then `mixlap-out`.
/// Exit status: 0 when every check passed, 1 when a check failed, 2 for
/// configuration errors, 3 when a computation failed.
#[derive(Parser)]
#[command(name = "mixlap", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve the Dirichlet problem and write the nodal solution.
    Solve(Opts),
    /// Build the boundary barrier and dump β, γ and ℒγ.
    Barrier(Opts),
    /// Run the verification suite.
    Verify(Opts),
    /// Reproduce one of the maximum principle counterexamples.
    Counterexample(Opts),
}

#[derive(Args)]
struct Opts {
    /// TOML configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Order of the fractional part, in (0, 1).
    #[arg(long, short)]
    s: Option<f64>,
    /// Interval as `a,b`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    domain: Option<[f64; 2]>,
    /// Interior nodes, or sample points for `barrier`.
    #[arg(long, short, allow_negative_numbers = true)]
    n: Option<i64>,
    /// Load: `constant:<v>`, `polynomial:<c0,c1,...>` or `sampled:<csv>`.
    #[arg(long, short)]
    f: Option<LoadSpec>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Counterexample to run.
    #[arg(long, value_enum)]
    example: Option<Example>,
    /// Dimension of the general counterexample.
    #[arg(long)]
    dim: Option<i64>,
    /// Outer radius of the boundary-only counterexample.
    #[arg(long)]
    radius: Option<f64>,
    /// Random loads per order in the verification suite.
    #[arg(long)]
    random_loads: Option<usize>,
    /// Orders swept by the verification suite, as `s1,s2,...`.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<f64>>,
}

fn parse_pair(text: &str) -> Result<[f64; 2], String> {
    let (a, b) = text.split_once(',').ok_or("expected `a,b`")?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad number `{t}`: {e}"))
    };
    Ok([num(a)?, num(b)?])
}

impl Opts {
    fn overrides(&self, command: Command) -> RawConfig {
        RawConfig {
            command: Some(command),
            s: self.s,
            domain: self.domain,
            n: self.n,
            f: self.f.clone(),
            quad: self.tolerance.map(|t| QuadConfig {
                tolerance: Some(t),
                ..QuadConfig::default()
            }),
            output_dir: self.output_dir.clone(),
            seed: self.seed,
            example: self.example,
            dim: self.dim,
            radius: self.radius,
            random_loads: self.random_loads,
            orders: self.orders.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Sub::Solve(o) => (Command::Solve, o),
        Sub::Barrier(o) => (Command::Barrier, o),
        Sub::Verify(o) => (Command::Verify, o),
        Sub::Counterexample(o) => (Command::Counterexample, o),
    };
    let base = match &opts.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match RawConfig::from_toml(&text) {
                Ok(raw) => raw,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            },
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => RawConfig::default(),
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    let config = match validate(base.merged(opts.overrides(command)), env_dir) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
