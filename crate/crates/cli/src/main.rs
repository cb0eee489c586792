use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use timedelay_cli::{run, summary, write_outputs, Format, ModelConfig, RunConfig};

/// Time delay, resonance poles and resonance counting for model potentials
/// and tabulated phase shifts. Units: 2m = ħ = 1 for the models.
#[derive(Parser, Debug)]
#[command(name = "timedelay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Lower energy of the window.
    #[arg(long, global = true)]
    emin: Option<f64>,
    /// Upper energy of the window.
    #[arg(long, global = true)]
    emax: Option<f64>,
    /// Number of grid points on the energy window.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Absolute quadrature tolerance of the counting integral.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, env = "TIMEDELAY_OUT", default_value = ".")]
    out: PathBuf,
    /// csv writes one file per curve plus report.json; json writes only
    /// report.json (curves embedded).
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Square well V(r<a) = -V0.
    Sqwell {
        #[arg(long = "V0", default_value_t = 5.0, allow_negative_numbers = true)]
        v0: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 0)]
        l: u32,
        /// Resonance poles in the Lorentzian sum.
        #[arg(long)]
        poles: Option<usize>,
    },
    /// Delta shell V(r) = V0 δ(r - a), s-wave.
    Deltashell {
        #[arg(long = "V0", default_value_t = 10.0, allow_negative_numbers = true)]
        v0: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long)]
        poles: Option<usize>,
    },
    /// Exponential step V(x) = V1 + V2 (1 - exp(-x/a)), x >= 0.
    Step {
        #[arg(long = "V1", default_value_t = 1.0, allow_negative_numbers = true)]
        v1: f64,
        #[arg(long = "V2", default_value_t = 1.0, allow_negative_numbers = true)]
        v2: f64,
        #[arg(long, default_value_t = 1.31, allow_negative_numbers = true)]
        a: f64,
    },
    /// Phase-shift table (CSV: W_MeV,delta_deg[,err_deg]); the bundled
    /// P33 table when no file is given. --emin/--emax select the W range.
    Data {
        #[arg(long)]
        file: Option<PathBuf>,
        /// Odd moving-average width applied to the phase before differencing.
        #[arg(long, default_value_t = 1)]
        smooth: usize,
    },
}

fn config(cli: Cli) -> RunConfig {
    let (model, poles) = match cli.command {
        Command::Sqwell { v0, a, l, poles } => (ModelConfig::Sqwell { v0, a, l }, poles),
        Command::Deltashell { v0, a, poles } => (ModelConfig::Deltashell { v0, a }, poles),
        Command::Step { v1, v2, a } => (ModelConfig::Step { v1, v2, a }, None),
        Command::Data { file, smooth } => (ModelConfig::Data { file, smooth }, None),
    };
    let mut c = RunConfig::defaults(model);
    c.emin = cli.emin.unwrap_or(c.emin);
    c.emax = cli.emax.unwrap_or(c.emax);
    c.grid = cli.grid.unwrap_or(c.grid);
    c.tol = cli.tol.unwrap_or(c.tol);
    c.poles = poles.unwrap_or(c.poles);
    c.out = cli.out;
    c.format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    c
}

fn main() -> ExitCode {
    let config = config(Cli::parse());
    let result = run(&config).and_then(|report| {
        let written = write_outputs(&report, &config.out, config.format)?;
        Ok((report, written))
    });
    match result {
        Ok((report, written)) => {
            // a closed pipe on stdout is not a failure of the run
            let mut out = std::io::stdout().lock();
            let _ = write!(out, "{}", summary(&report));
            for path in written {
                let _ = writeln!(out, "wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
