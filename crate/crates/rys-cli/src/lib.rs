//! Command-line front end: argument surface, table rendering, and the
//! dispatcher that maps library errors to process exit codes.
//!
//! Exit codes: 0 = success, 1 = a verification failed (the mathematics did
//! not check out), 2 = usage or domain error (the request itself was
//! invalid).

pub mod args;
pub mod commands;
pub mod table;

use args::{Cli, Command, Format, OutputOpts};
use rys_core::error::{Result, RysError};
use table::TableDoc;

fn emit(doc: TableDoc, output: &OutputOpts) -> Result<i32> {
    let text = match output.format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    match &output.out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| RysError::Domain(format!("cannot write {}: {e}", path.display())))?;
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Moments {
            common,
            z,
            n,
            output,
        } => emit(
            commands::cmd_moments(z, common.lambda, common.digits, n)?,
            &output,
        ),
        Command::Recurrence {
            common,
            z,
            n,
            output,
        } => emit(
            commands::cmd_recurrence(z, common.lambda, common.digits, n)?,
            &output,
        ),
        Command::Quadrature {
            common,
            z,
            n,
            output,
        } => emit(
            commands::cmd_quadrature(z, common.lambda, common.digits, n)?,
            &output,
        ),
        Command::Zeros {
            common,
            z,
            n,
            output,
        } => emit(
            commands::cmd_zeros(z, common.lambda, common.digits, n)?,
            &output,
        ),
        Command::Flow {
            common,
            z0,
            z1,
            steps,
            n,
            with_zeros,
            output,
        } => emit(
            commands::cmd_flow(common.lambda, common.digits, n, z0, z1, steps, with_zeros)?,
            &output,
        ),
        Command::Verify {
            digits,
            z,
            lambda,
            n,
            perturb_gamma,
        } => commands::cmd_verify(digits, z, lambda, n, perturb_gamma),
    }
}

/// Maps a library error to the documented exit-code contract: invalid
/// requests exit 2, failed mathematics exits 1.
fn exit_code_for(err: &RysError) -> i32 {
    match err {
        RysError::Domain(_)
        | RysError::IndexRange(_)
        | RysError::PrecisionExhausted { .. }
        | RysError::StepSize(_) => 2,
        RysError::OracleDivergence(_) | RysError::NonConvergence(_) | RysError::Singular(_) => 1,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
