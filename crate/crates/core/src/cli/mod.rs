//! The `dephasing` command line.
//!
//! Every option may also come from a `--config` file of `key = value` lines or
//! a flat JSON object, keyed by the long flag name; flags override the file.
//! Exit status is 0 on success, 2 for configuration errors and 3 for
//! numerical failures.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use config::Settings;
use output::{write_atomic, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QuadratureBudget { .. } | Error::SingularPoint { .. } => EXIT_NUMERICAL,
        Error::InvalidParameter(_) | Error::TimeStep { .. } | Error::Parse(_) | Error::Io(_) => EXIT_CONFIG,
    }
}

#[derive(Debug, Parser)]
#[command(name = "dephasing", version, about = "Dephasing of trapped-atom qubits under dynamical decoupling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Config file (key = value lines or a JSON object); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script next to the output file (`<out>.gp`).
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Preset name, white:S0=.., powerlaw:A=..,alpha=.., lorentzian:A=..,fc=..,
    /// or a CSV path (f_hz,s_f). Join sources with `+`.
    #[arg(long)]
    pub spectrum: Option<String>,
    /// Rescale the spectrum so that the FID coherence time equals this value, s.
    #[arg(long)]
    pub calibrate_fid_t2: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// W(t) on a time grid.
    WCurve {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Pulse sequence, e.g. fid, se, cpmg:50, cdd:l=3, custom:0.1,0.5,0.9.
        #[arg(long)]
        seq: Option<String>,
        /// Time grid in s, start:stop:step or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        /// Relative quadrature tolerance, in (0, 1e-3].
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coherence time against pulse count for one sequence family.
    T2Scan {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// cpmg, pdd, udd, cdd (levels) or se.
        #[arg(long)]
        family: Option<String>,
        /// Pulse counts: a:b, a:b:step, or a comma list.
        #[arg(long)]
        n: Option<String>,
        /// Upper limit of the crossing search, s.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pulse times of a sequence as fractions of the evolution time.
    SequenceTable {
        #[arg(long)]
        seq: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The filter function F(x), x = ωt, on a grid.
    FilterDump {
        #[arg(long)]
        seq: Option<String>,
        /// Grid of x values, start:stop:step or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Add the closed-form filter: printed or repaired.
        #[arg(long)]
        closed_form: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Differential light shift, Zeeman differential and adiabaticity ratio.
    TrapShift {
        /// Named trap preset.
        #[arg(long)]
        preset: Option<String>,
        /// Trap configuration file, JSON or TOML.
        #[arg(long)]
        trap_config: Option<PathBuf>,
        /// Override the peak intensity, W/m².
        #[arg(long)]
        peak_intensity: Option<f64>,
        /// Bias field for the Zeeman differential, T.
        #[arg(long)]
        b_field: Option<f64>,
        /// Beam-pointing amplitude, m.
        #[arg(long)]
        pointing_amplitude: Option<f64>,
        /// Beam-pointing noise frequency, Hz.
        #[arg(long)]
        pointing_freq: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo against the spectral formula, as a z-score report.
    McCompare {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long)]
        seq: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        /// Sample step, s; defaults to 1/(8 f_uv).
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the first noise realization to this CSV file.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::WCurve { output, .. }
            | Command::T2Scan { output, .. }
            | Command::SequenceTable { output, .. }
            | Command::FilterDump { output, .. }
            | Command::TrapShift { output, .. }
            | Command::McCompare { output, .. } => output,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::McCompare { .. } => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn execute(cmd: Command) -> crate::Result<i32> {
    let out_args = cmd.output();
    let settings = match &out_args.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let format = match settings.pick(out_args.format.clone(), "format")? {
        Some(f) => f.parse::<Format>()?,
        None => cmd.default_format(),
    };
    let out = settings.pick(out_args.out.as_ref().map(|p| p.display().to_string()), "out")?.map(PathBuf::from);
    let gnuplot = out_args.gnuplot || settings.pick::<bool>(None, "gnuplot")?.unwrap_or(false);
    if gnuplot && (out.is_none() || format != Format::Csv) {
        return Err(crate::error::invalid("--gnuplot needs --out and csv format"));
    }

    let s = &settings;
    let outcome = match cmd {
        Command::WCurve { spectrum, seq, t, tol, .. } => {
            commands::w_curve(s, spectrum.spectrum, spectrum.calibrate_fid_t2, seq, t, tol)?
        }
        Command::T2Scan { spectrum, family, n, t_max, tol, .. } => {
            commands::t2_scan(s, spectrum.spectrum, spectrum.calibrate_fid_t2, family, n, t_max, tol)?
        }
        Command::SequenceTable { seq, .. } => commands::sequence_table(s, seq)?,
        Command::FilterDump { seq, x, closed_form, .. } => commands::filter_dump(s, seq, x, closed_form)?,
        Command::TrapShift {
            preset, trap_config, peak_intensity, b_field, pointing_amplitude, pointing_freq, ..
        } => commands::trap_shift(s, preset, trap_config, peak_intensity, b_field, pointing_amplitude, pointing_freq)?,
        Command::McCompare { spectrum, seq, t, dt, trials, seed, trace_out, .. } => {
            commands::mc_compare(s, spectrum.spectrum, spectrum.calibrate_fid_t2, seq, t, dt, trials, seed, trace_out)?
        }
    };

    let text = outcome.report.render(format);
    match &out {
        Some(path) => {
            write_atomic(path, &text)?;
            if gnuplot {
                if let Some(script) = outcome.report.gnuplot(path) {
                    write_atomic(&script_path(path), &script)?;
                }
            }
        }
        None => print!("{text}"),
    }
    Ok(outcome.status)
}

fn script_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".gp");
    data.with_file_name(name)
}

/// Parses `args` (program name first), runs the command, and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::QuadratureBudget { relative_error: 1.0, evaluations: 1 }), EXIT_NUMERICAL);
    }

    #[test]
    fn empty_grid_is_a_config_error() {
        let code = run(["dephasing", "w-curve", "--spectrum", "white:S0=4", "--t", "0:0:1"]);
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn gnuplot_requires_a_file() {
        let code = run(["dephasing", "sequence-table", "--seq", "se", "--gnuplot"]);
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn script_sits_beside_data() {
        assert_eq!(script_path(Path::new("a/b.csv")), PathBuf::from("a/b.csv.gp"));
    }
}
