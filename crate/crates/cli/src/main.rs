//! `biharm`: command-line front end for the biharmonic verification library.
//!
//! Exit codes: 0 when every `--expect` holds, 1 on a verdict mismatch or
//! mathematically infeasible parameters, 2 on usage errors.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use biharmonic_core::tolerances::Tolerances;
use clap::Parser;

use cli::{Cli, Command, CurveCommand, HopfCommand, ModelsCommand, TolArgs};
use commands::curve::Mode;
use error::CliError;

fn tolerances(t: &TolArgs) -> Result<Tolerances, CliError> {
    let d = Tolerances::default();
    let tol = Tolerances {
        closed_form: t.tol_closed_form.unwrap_or(d.closed_form),
        deformed: t.tol_deformed.unwrap_or(d.deformed),
        tol_order: t.tol_order.unwrap_or(d.tol_order),
        legendre_gate: t.legendre_gate.unwrap_or(d.legendre_gate),
        constant_torsion: t.tol_constant_torsion.unwrap_or(d.constant_torsion),
    };
    if tol.is_valid() {
        Ok(tol)
    } else {
        Err(CliError::Usage(format!("tolerances must be positive and finite: {tol:?}")))
    }
}

fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    let tol = tolerances(&cli.tolerances)?;
    match &cli.command {
        Command::Models(ModelsCommand::Validate(a)) => commands::models::validate(a),
        Command::Curve(CurveCommand::Generate(a)) => commands::curve::run(Mode::Generate, a, tol),
        Command::Curve(CurveCommand::Verify(a)) => commands::curve::run(Mode::Verify, a, tol),
        Command::Curve(CurveCommand::Classify(a)) => commands::curve::run(Mode::Classify, a, tol),
        Command::Hopf(HopfCommand::Solve(a)) => commands::hopf::solve(a),
        Command::Hopf(HopfCommand::Scan(a)) => commands::hopf::scan(a),
        Command::Hopf(HopfCommand::Threshold(a)) => commands::hopf::threshold(a),
        Command::Hopf(HopfCommand::Hopf3(a)) => commands::hopf::hopf3(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not errors
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("usage: --workers must be positive");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(w);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(CliError::Io(e.to_string())),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
