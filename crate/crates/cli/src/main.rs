use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dispersive_lab::exponents::{parse_rational, sigma, Exponent};

use dlab::kinds::exponents::evaluate;
use dlab::{replay, run_config, CliError, CliResult, Overrides, Verdict};

#[derive(Parser)]
#[command(name = "dlab", version, about = "Run and replay dispersive-estimate experiments")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "DLAB_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive a report's statistics from its data.csv.
    Replay { dir: PathBuf },
    /// Print one JSON record per (q, r) pair.
    Query {
        #[arg(long)]
        d: u32,
        /// Defaults to d/2.
        #[arg(long)]
        sigma: Option<String>,
        /// Pairs written `q,r`, e.g. `4,4` or `inf,2`.
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
        #[arg(long, value_enum)]
        equation: Option<Equation>,
        #[arg(long)]
        alpha: Option<String>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Equation {
    Fractional,
    Wave,
    KleinGordonWave,
    KleinGordonSchrodinger,
}

fn query(d: u32, sig: Option<String>, pairs: Vec<String>, equation: Option<Equation>, alpha: Option<String>) -> CliResult<()> {
    use dispersive_lab::exponents::{Equation as Eq, Rational64Ser};
    let sigma = match sig {
        Some(s) => parse_rational(&s)?,
        None => sigma::schrodinger(d),
    };
    let parsed = pairs
        .iter()
        .map(|p| {
            let (q, r) = p.split_once(',').ok_or_else(|| CliError::parse(format!("pair {p:?} is not q,r")))?;
            Ok((Exponent::parse(q)?, Exponent::parse(r)?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let eq = match (equation, alpha) {
        (None, None) => None,
        (Some(Equation::Fractional), Some(a)) => Some(Eq::Fractional { alpha: Rational64Ser(parse_rational(&a)?) }),
        (Some(Equation::Wave), None) => Some(Eq::Wave),
        (Some(Equation::KleinGordonWave), None) => Some(Eq::KleinGordonWave),
        (Some(Equation::KleinGordonSchrodinger), None) => Some(Eq::KleinGordonSchrodinger),
        _ => return Err(CliError::parse("alpha goes with --equation fractional and nothing else")),
    };
    for point in evaluate(d, sigma, &parsed, eq)? {
        println!("{}", serde_json::to_string(&point).map_err(|e| CliError::Runtime(e.to_string()))?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let status: CliResult<u8> = match cli.command {
        Command::Run { config, seed, out } => run_config(&config, &Overrides { seed, out }).map(|(dir, report)| {
            for c in &report.checks {
                println!("{:<4} {} = {} ({})", if c.pass { "ok" } else { "FAIL" }, c.name, c.value, c.condition);
            }
            println!("{:?}: wrote {}", report.verdict, dir.display());
            if report.verdict == Verdict::Pass {
                0
            } else {
                1
            }
        }),
        Command::Replay { dir } => replay(&dir).map(|mismatches| {
            for m in &mismatches {
                println!("mismatch {}: recorded {:?}, replayed {:?}", m.key, m.recorded, m.replayed);
            }
            if mismatches.is_empty() {
                println!("replay ok: {}", dir.display());
                0
            } else {
                1
            }
        }),
        Command::Query { d, sigma, pairs, equation, alpha } => query(d, sigma, pairs, equation, alpha).map(|_| 0),
    };
    match status {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
