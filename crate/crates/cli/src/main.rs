//! nlcalc: exact Noether-Lefschetz computations from the command line.
//!
//! Results are JSON on standard output with exact values as "p/q" strings.
//! Errors are a JSON object {code, message, module} with exit status 2 (bad
//! input), 3 (computation) or 4 (precondition or hypothesis). Results are
//! cached under $NLCALC_CACHE_DIR (default ~/.cache/nlcalc) unless
//! --no-cache is given.

mod cache;
mod commands;
mod error;
mod lattice_arg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cache::{sha256_hex, Cache};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "nlcalc", version, about = "Exact Noether-Lefschetz computations")]
struct Cli {
    /// bypass the on-disk cache
    #[arg(long, global = true)]
    no_cache: bool,
    /// write a run manifest (arguments, versions, output digest) here
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Theta,
    Eisenstein,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlavorArg {
    #[value(name = "H")]
    H,
    #[value(name = "P")]
    P,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeTarget {
    Cubic,
    K3deg2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice and discriminant form invariants
    Lattice {
        #[command(subcommand)]
        what: LatticeCmd,
    },
    /// Vector-valued theta series of a definite lattice
    Theta {
        lattice: String,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long = "max-m")]
        max_m: String,
    },
    /// Eisenstein series coefficients
    Eisenstein {
        lattice: String,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        weight: String,
        /// indices m:[mu] separated by ';', e.g. "1/3:[2];4/3:[2]"
        #[arg(long)]
        indices: Option<String>,
        /// all coefficients with m up to this bound
        #[arg(long = "max-m")]
        max_m: Option<String>,
    },
    /// The Hodge class of the degree 2d K3 moduli as a Heegner combination
    Hodge {
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Finite generating set of the Heegner part of the Picard group
    Generators {
        lattice: String,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, value_enum)]
        flavor: FlavorArg,
        /// construct and check a primitive representative for every symbol
        #[arg(long)]
        strict: bool,
    },
    /// Relation among Heegner divisors from Δ^{-N} times a source form
    Relation {
        lattice: String,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long = "N", default_value_t = 1)]
        n: u32,
        /// theta:<definite lattice> or eisenstein
        #[arg(long, default_value = "eisenstein")]
        source: String,
    },
    /// Vanishing constants C_{i,g}(k) and the index set S_{k,g,L}
    Bounds {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        k: String,
        /// enumerate the index set for this lattice
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long)]
        d: Option<u64>,
        /// JSON slope table replacing the default
        #[arg(long = "slope-table")]
        slope_table: Option<PathBuf>,
    },
    /// Slope bounds for cubic fourfolds or degree-2 K3 surfaces
    Slope {
        #[arg(value_enum)]
        target: SlopeTarget,
    },
    /// Pair a relation against holomorphic theta-type forms
    PairingCheck {
        lattice: String,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long = "N", default_value_t = 1)]
        n: u32,
        #[arg(long, default_value = "eisenstein")]
        source: String,
    },
}

#[derive(Subcommand, Debug)]
enum LatticeCmd {
    Info {
        lattice: String,
        #[arg(long)]
        d: Option<u64>,
    },
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    arguments: Vec<String>,
    lattice_hash: Option<String>,
    calibration_version: u32,
    slope_table_version: u32,
    started: u64,
    finished: u64,
    cache: &'a str,
    output_digest: String,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn emit_error(e: &CliError) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(e).expect("serializable"));
    ExitCode::from(e.exit as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return emit_error(&CliError::bad_input(e.to_string().trim_end())),
    };
    let started = now();
    let cache = Cache::from_env(cli.no_cache);
    let out = match commands::run(&cli.command, &cache) {
        Ok(o) => o,
        Err(e) => return emit_error(&e),
    };
    let text = format!("{}\n", out.json);
    print!("{text}");
    if let Some(path) = &cli.manifest {
        let m = Manifest {
            command: out.name,
            arguments: std::env::args().skip(1).collect(),
            lattice_hash: out.lattice_hash,
            calibration_version: nlcore::eisenstein::CALIBRATION_VERSION,
            slope_table_version: nlcore::bounds::SLOPE_TABLE_VERSION,
            started,
            finished: now(),
            cache: match out.status {
                cache::Status::Hit => "hit",
                cache::Status::Miss => "miss",
                cache::Status::Repaired => "repaired",
                cache::Status::Disabled => "disabled",
            },
            output_digest: sha256_hex(text.as_bytes()),
        };
        let body = serde_json::to_string_pretty(&m).expect("serializable");
        if let Err(e) = std::fs::write(path, body) {
            eprintln!("nlcalc: cannot write manifest {}: {e}", path.display());
        }
    }
    ExitCode::SUCCESS
}
