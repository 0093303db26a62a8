//! `qregion`: batch front end for multiparty quantum information quantities,
//! squashed-entanglement bounds and distributed-compression rate regions.

mod commands;
mod report;
mod spec;

use clap::{Args, Parser, Subcommand};
use qregion_core::selftest::{self, Module};
use qregion_core::Error;
use report::Format;
use std::process::ExitCode;

/// Seed used when neither `--seed` nor `QREGION_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_080_401;

#[derive(Parser, Debug)]
#[command(name = "qregion", version, about = "Multiparty quantum information calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// RNG seed; overrides QREGION_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sampling and restarts.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Run the built-in checks of this command's module instead.
    #[arg(long, global = true)]
    pub selftest: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Von Neumann entropy of a subset, optionally conditioned.
    Entropy(commands::EntropyArgs),
    /// Multiparty information, optionally conditioned on a set.
    Mpinfo(commands::MpinfoArgs),
    /// Squashed entanglement: closed form for pure states or an upper bound.
    Esq(commands::EsqArgs),
    /// Inner (or outer) rate region of a pure sender/reference state.
    Region(commands::RegionArgs),
    /// Vertices by corner points and by brute force, side by side.
    Vertices(commands::RegionArgs),
    /// State-merging region H(A_K | A_K̄).
    MergeRegion(commands::MergeArgs),
    /// Classical Slepian–Wolf region of a joint distribution.
    SwRegion(commands::SwArgs),
    /// Exact typical-set statistics.
    Typical(commands::TypicalArgs),
    /// Monte Carlo check of one-shot decoupling.
    Decouple(commands::DecoupleArgs),
    /// Per-sender FQSW rate thresholds and optional chain simulation.
    FqswRates(commands::FqswArgs),
    /// Resource-inequality catalog and derivations.
    Rescalc(commands::RescalcArgs),
    /// Black-hole radiation thresholds.
    Blackhole(commands::BlackholeArgs),
}

impl Command {
    fn modules(&self) -> &'static [Module] {
        match self {
            Command::Entropy(_) | Command::Mpinfo(_) => &[Module::Qstate, Module::Entropy],
            Command::Esq(_) => &[Module::Squashed],
            Command::Region(_) | Command::Vertices(_) | Command::MergeRegion(_) => &[Module::Rateregion],
            Command::SwRegion(_) => &[Module::Rateregion, Module::Classical],
            Command::Typical(_) => &[Module::Classical],
            Command::Decouple(_) | Command::FqswRates(_) | Command::Blackhole(_) => &[Module::Decouple],
            Command::Rescalc(_) => &[Module::Rescalc],
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("QREGION_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("QREGION_SEED=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run_selftest(command: &Command) -> ExitCode {
    let mut failed = 0;
    for &module in command.modules() {
        for case in selftest::run(module) {
            if case.passed {
                println!("PASS {:?}: {}", module, case.name);
            } else {
                failed += 1;
                println!("FAIL {:?}: {} {}", module, case.name, case.detail);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn fail(e: &Error) -> ExitCode {
    let line = e.to_string().replace('\n', " ");
    eprintln!("error: {line}");
    ExitCode::from(if e.is_capacity() { 3 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&Error::InvalidInput(format!("cannot configure {n} threads: {e}")));
        }
    }
    if cli.global.selftest {
        return run_selftest(&cli.command);
    }
    let seed = match resolve_seed(cli.global.seed) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let result = commands::run(&cli.command, seed).and_then(|report| report.render(cli.global.format));
    let bytes = match result {
        Ok(b) => b,
        Err(e) => return fail(&e),
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| Error::InvalidInput(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))
        }
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
