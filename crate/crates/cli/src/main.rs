use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "zhelo",
    version,
    about = "Exact BGG and Zhelobenko computations for the adjoint module"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
enum Command {
    /// Cartan matrix, positive roots and coroots.
    Roots(Args),
    /// Exponents, coroot height counts and invariant degrees.
    Exponents(Args),
    /// Basic invariants and the Zhelobenko generators built from them.
    Invariants(Args),
    /// The Zhelobenko monoid as a census or a graph.
    Monoid(Args),
    /// Runs every verification for the type; exits non-zero on any failure.
    Verify(Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq, clap::Args)]
struct Args {
    /// Type tags such as B3 or F4; several may be given, comma separated.
    #[arg(long = "type", value_delimiter = ',', required = true)]
    types: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only solve for generators whose invariant has at most this degree.
    #[arg(long)]
    max_degree: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Roots(a) => (commands::Kind::Roots, a),
        Command::Exponents(a) => (commands::Kind::Exponents, a),
        Command::Invariants(a) => (commands::Kind::Invariants, a),
        Command::Monoid(a) => (commands::Kind::Monoid, a),
        Command::Verify(a) => (commands::Kind::Verify, a),
    };
    if let Err(msg) = commands::check_format(kind, args.format) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let mut contexts = Vec::with_capacity(args.types.len());
    for tag in &args.types {
        match zhelo_core::context::Context::from_tag(tag.trim()) {
            Ok(ctx) => contexts.push(ctx.with_max_degree(args.max_degree)),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let outcomes: Vec<commands::Outcome> = contexts
        .par_iter()
        .map(|ctx| commands::run(kind, ctx, args.format))
        .collect();
    let mut ok = true;
    for o in &outcomes {
        if let Some(e) = &o.error {
            eprintln!("error ({}): {e}", o.tag);
            ok = false;
        }
        ok &= o.passed;
    }
    let text = commands::join(args.format, &outcomes);
    let written = match &args.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::FAILURE;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
