mod args;
mod commands;
mod output;
mod params;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::Outcome;
use params::{ConfigError, Overrides, Params};

const EXIT_PROPERTY: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn overrides<'a>(cmd: &'a Command) -> Overrides<'a> {
    let empty_u: &[usize] = &[];
    let mut o = Overrides {
        command: cmd.name(),
        default_format: cmd.default_format(),
        d: empty_u,
        m: empty_u,
        n: empty_u,
        t: &[],
        epsilon: None,
        samples: None,
    };
    match cmd {
        Command::BalanceKk { shape, .. }
        | Command::BalanceKq { shape, .. }
        | Command::Decompose { shape, .. }
        | Command::Oracle { shape, .. } => {
            o.d = &shape.d;
            o.m = &shape.m;
            o.n = &shape.n;
        }
        Command::Measure {
            shape, t, samples, ..
        } => {
            o.d = &shape.d;
            o.m = &shape.m;
            o.n = &shape.n;
            o.t = t;
            o.samples = *samples;
        }
        Command::Sparsify { epsilon, .. } => o.epsilon = *epsilon,
        Command::StripCheck | Command::Normalize { .. } | Command::Suite { .. } => {}
    }
    o
}

fn dispatch(cmd: &Command, p: &Params) -> Result<Outcome, ConfigError> {
    match cmd {
        Command::BalanceKk { shape, instance } => commands::balance_kk(shape, instance, p),
        Command::BalanceKq { shape, instance, q } => {
            commands::balance_kq(shape, instance, q.as_deref(), p)
        }
        Command::Measure { cube, .. } => commands::measure(*cube, p),
        Command::StripCheck => Ok(commands::strip_check()),
        Command::Normalize { input } => commands::normalize_cmd(input, p),
        Command::Sparsify { input, .. } => commands::sparsify_cmd(input, p),
        Command::Decompose { input, .. } => commands::decompose(input.as_deref(), p),
        Command::Oracle {
            shape,
            instance,
            gauge,
        } => commands::oracle(shape, instance, *gauge, p),
        // both modes run every criterion; the full set fits the quick budget
        Command::Suite { only, .. } => commands::suite_cmd(only, p),
    }
}

fn run(cli: &Cli) -> Result<Outcome, ConfigError> {
    let params = params::resolve(&cli.common, overrides(&cli.command))?;
    let outcome = match params.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ConfigError(format!("cannot start {jobs} workers: {e}")))?
            .install(|| dispatch(&cli.command, &params))?,
        None => dispatch(&cli.command, &params)?,
    };
    let bytes = output::render(
        cli.command.name(),
        &params.seeds,
        &params.cfg,
        params.format,
        &outcome,
    )
    .map_err(ConfigError)?;
    output::emit(&bytes, params.out.as_deref())
        .map_err(|e| ConfigError(format!("cannot write output: {e}")))?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) if outcome.failures.is_empty() => ExitCode::SUCCESS,
        Ok(outcome) => {
            output::report_failures(&outcome.failures);
            ExitCode::from(EXIT_PROPERTY)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
