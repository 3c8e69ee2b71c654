//! Command-line front end: parses arguments and config files, runs one
//! experiment and writes its table as CSV or JSON.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{load_config, parse_value, resolve, Experiment, Format, RunConfig, Value};
use error::CliError;
use table::ResultTable;

#[derive(Parser, Debug)]
#[command(
    name = "magnon-entangle",
    version,
    about = "Driven-qubit entanglement through chiral magnons"
)]
struct Cli {
    /// Flat `key: value` config file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// csv or json
    #[arg(long, global = true, value_name = "FORMAT")]
    format: Option<String>,

    /// Worker threads for sweeps
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Override a config key, e.g. `--set points=11`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug)]
struct Threshold {
    /// Fidelity threshold F_T
    #[arg(long)]
    f_threshold: Option<f64>,

    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Debug)]
struct NvYigArgs {
    /// Use the reference YIG film and NV parameters regardless of the config file
    #[arg(long = "table-1")]
    table_1: bool,

    #[command(flatten)]
    threshold: Threshold,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Qubit populations after an initial excitation of either qubit
    Dynamics(Overrides),
    /// Protocol time as a function of zeta
    ProtocolCurve(Threshold),
    /// Smallest T1 and T_phi that still reach each threshold
    Benchmark(Threshold),
    /// Protocol time with an added left-moving channel
    Directional(Threshold),
    /// Film dispersion, couplings and SI scalars of the NV/YIG setup
    NvYig(NvYigArgs),
    /// Overlap with the steady state over time
    Transient(Overrides),
    /// Protocol time under relative errors of zeta
    ZetaVar(Threshold),
    /// Protocol quality versus qubit separation phase
    DistanceVar(Threshold),
    /// Eigenvalues of the effective Hamiltonian versus R
    Spectrum(Overrides),
    /// Randomized invariant suites of every module
    Validate(Overrides),
}

const FILM_KEYS: [&str; 10] = [
    "d0", "gamma_s", "d", "l_y", "l_z", "d_ex", "m_s", "d_nv", "mu0_h0", "tau_m",
];

fn parse_set(items: &[String]) -> Result<Vec<(String, Value)>, CliError> {
    items
        .iter()
        .map(|s| match s.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), parse_value(v))),
            _ => Err(CliError::Usage(format!(
                "--set expects KEY=VALUE, got `{s}`"
            ))),
        })
        .collect()
}

fn threshold_overrides(t: &Threshold, key: &str) -> Result<Vec<(String, Value)>, CliError> {
    let mut o = parse_set(&t.overrides.set)?;
    if let Some(f) = t.f_threshold {
        o.push((key.to_string(), Value::Number(f)));
    }
    Ok(o)
}

fn plan(command: &Command) -> Result<(Experiment, Vec<(String, Value)>), CliError> {
    Ok(match command {
        Command::Dynamics(o) => (Experiment::Dynamics, parse_set(&o.set)?),
        Command::ProtocolCurve(t) => (
            Experiment::ProtocolCurve,
            threshold_overrides(t, "f_threshold")?,
        ),
        Command::Benchmark(t) => (
            Experiment::Benchmark,
            threshold_overrides(t, "f_thresholds")?,
        ),
        Command::Directional(t) => (
            Experiment::Directional,
            threshold_overrides(t, "f_threshold")?,
        ),
        Command::NvYig(a) => {
            let mut o = threshold_overrides(&a.threshold, "f_threshold")?;
            if a.table_1 {
                let defaults = Experiment::NvYig.keys();
                for spec in defaults.iter().filter(|s| FILM_KEYS.contains(&s.name)) {
                    o.push((
                        spec.name.to_string(),
                        spec.default.clone().expect("film keys have defaults"),
                    ));
                }
            }
            (Experiment::NvYig, o)
        }
        Command::Transient(o) => (Experiment::Transient, parse_set(&o.set)?),
        Command::ZetaVar(t) => (Experiment::ZetaVar, threshold_overrides(t, "f_thresholds")?),
        Command::DistanceVar(t) => (
            Experiment::DistanceVar,
            threshold_overrides(t, "f_threshold")?,
        ),
        Command::Spectrum(o) => (Experiment::Spectrum, parse_set(&o.set)?),
        Command::Validate(o) => (Experiment::Validate, parse_set(&o.set)?),
    })
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let (experiment, overrides) = plan(&cli.command)?;
    let format = match cli.format.as_deref() {
        None => None,
        Some(s) => Some(
            Format::parse(s)
                .ok_or_else(|| CliError::Usage(format!("unknown format `{s}` (csv or json)")))?,
        ),
    };
    let mut cfg = match &cli.config {
        Some(path) => load_config(path, experiment, &overrides)?,
        None => resolve(experiment, None, &overrides, None, None)?,
    };
    cfg.output_path = cli.out.clone();
    if let Some(f) = format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn render(cfg: &RunConfig, table: &ResultTable) -> String {
    match cfg.format {
        Format::Csv => table.to_csv(cfg.experiment.name()),
        Format::Json => table.to_json(cfg.experiment.name()),
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let cfg = build_config(cli)?;
    let table = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(|| experiments::run_experiment(&cfg))?,
        None => experiments::run_experiment(&cfg)?,
    };
    let text = render(&cfg, &table);
    match &cfg.output_path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        })?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Output {
                path: "stdout".into(),
                source,
            })?,
    }
    if cfg.experiment == Experiment::Validate {
        report_validation(&table, stderr)?;
    }
    Ok(())
}

fn report_validation(table: &ResultTable, stderr: &mut dyn Write) -> Result<(), CliError> {
    use table::Cell;
    let text = |c: &Cell| match c {
        Cell::Text(s) => s.clone(),
        Cell::Number(x) => format!("{x}"),
        _ => String::new(),
    };
    let mut failed = 0.0;
    for row in &table.rows {
        let (cases, passed) = match (&row[2], &row[3]) {
            (Cell::Number(c), Cell::Number(p)) => (*c, *p),
            _ => (0.0, 0.0),
        };
        failed += cases - passed;
        let _ = writeln!(
            stderr,
            "{:<18} {:<40} {passed}/{cases}",
            text(&row[0]),
            text(&row[1])
        );
    }
    if failed > 0.0 {
        return Err(CliError::Numerical(format!(
            "{failed} invariant case(s) violated"
        )));
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("magnon-entangle").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let (code, _, err) = run_capture(&["fig2"]);
        assert_eq!(code, 2);
        assert!(err.contains("Usage"), "{err}");
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(run_capture(&["spectrum", "--bogus"]).0, 2);
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("protocol-curve"));
    }

    #[test]
    fn set_requires_key_value() {
        let (code, _, err) = run_capture(&["spectrum", "--set", "points"]);
        assert_eq!(code, 2);
        assert!(err.contains("KEY=VALUE"));
    }

    #[test]
    fn threshold_flag_is_range_checked() {
        let (code, _, err) = run_capture(&["distance-var", "--f-threshold", "1.2"]);
        assert_eq!(code, 2);
        assert!(err.contains("f_threshold"), "{err}");
    }

    #[test]
    fn zero_threads_rejected() {
        assert_eq!(run_capture(&["spectrum", "--threads", "0"]).0, 2);
    }

    #[test]
    fn bad_format_rejected() {
        assert_eq!(run_capture(&["spectrum", "--format", "xml"]).0, 2);
    }

    #[test]
    fn table_flag_restores_film_defaults() {
        let cli = Cli::try_parse_from(["m", "nv-yig", "--table-1", "--set", "d=1e-6"]).unwrap();
        let cfg = build_config(&cli).unwrap();
        assert_eq!(cfg.f64("d"), 200e-9);
    }
}
