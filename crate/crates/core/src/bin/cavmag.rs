use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cavmag::bogoliubov::matching_report;
use cavmag::config::{ConfigFile, Mode};
use cavmag::model::to_mhz;
use cavmag::sweep::{preset, run_point_indexed, run_sweep, write_csv, PointOptions, SweepGrid};
use cavmag::Error;

#[derive(Parser)]
#[command(name = "cavmag", version, about = "Steady-state entanglement of a Kerr cavity-magnon system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Effective,
    Microscopic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Effective => Mode::Effective,
            ModeArg::Microscopic => Mode::Microscopic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single parameter point and print the report.
    Point {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "effective")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mean-field branch index (sorted by occupation) instead of the default.
        #[arg(long)]
        branch: Option<usize>,
    },
    /// Run the grid described by the sweep axes of a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "effective")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a built-in grid: fig2, fig3 or fig4.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in invariant checks.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_config(path: &Path) -> Result<ConfigFile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    ConfigFile::parse(&text)
}

fn emit(grid: &SweepGrid, jobs: usize, seed: u64, out: Option<&Path>) -> Result<(), Error> {
    let records = run_sweep(grid, jobs, seed)?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    match out {
        Some(p) => write_csv(grid, &records, BufWriter::new(File::create(p)?))?,
        None => write_csv(grid, &records, io::stdout().lock())?,
    }
    let unstable = records.iter().filter(|r| r.report.as_ref().is_some_and(|x| !x.stable)).count();
    eprintln!("{} points, {unstable} unstable, {failed} failed", records.len());
    Ok(())
}

fn print_point(config: &Path, mode: Mode, seed: u64, branch: Option<usize>) -> Result<(), Error> {
    let cfg = read_config(config)?;
    let opts = PointOptions {
        mode,
        seed,
        branch,
        ..PointOptions::default()
    };
    let o = run_point_indexed(&cfg.params, &opts, 0)?;
    let mut w = io::stdout().lock();
    if let Some(mf) = &o.mean_field {
        writeln!(w, "|<a>|^2 = {}", mf.a_amp.norm_sqr())?;
        writeln!(w, "|<b>|^2 = {}", mf.nb2())?;
        writeln!(w, "|<c>|^2 = {}", mf.nc2())?;
        writeln!(w, "mean-field residual = {:e}", mf.residual_norm)?;
    }
    let e = &o.effective;
    writeln!(
        w,
        "Delta_b_tilde = {} MHz, Delta_c_tilde = {} MHz, K_b_tilde = {} MHz, K_c_tilde = {} MHz, G_tilde = {} MHz",
        to_mhz(e.delta_b),
        to_mhz(e.delta_c),
        to_mhz(e.kerr_b),
        to_mhz(e.kerr_c),
        to_mhz(e.cross_kerr)
    )?;
    writeln!(w, "stable = {}", o.report.stable)?;
    writeln!(w, "margin = {} MHz", to_mhz(o.report.margin))?;
    if let Some(m) = &o.report.measures {
        for (k, v) in [
            ("E_ab", m.e_ab),
            ("E_bc", m.e_bc),
            ("E_ac", m.e_ac),
            ("E_a|bc", m.e_a_bc),
            ("E_b|ac", m.e_b_ac),
            ("E_c|ab", m.e_c_ab),
            ("R_a|bc", m.contangle.a_bc),
            ("R_b|ac", m.contangle.b_ac),
            ("R_c|ab", m.contangle.c_ab),
            ("R_min", m.contangle.min),
            ("N_a", m.n_a),
            ("N_b", m.n_b),
            ("N_c", m.n_c),
            ("nu_min", m.nu_min),
        ] {
            writeln!(w, "{k} = {v}")?;
        }
    }
    let report = matching_report(e);
    for (k, v) in report.entries() {
        writeln!(w, "{k} = {} MHz", to_mhz(v))?;
    }
    if let Some(note) = report.note {
        writeln!(w, "note: {note}")?;
    }
    Ok(())
}

fn exit_code(e: &Error, point: bool) -> u8 {
    match e.root() {
        Error::Config(_) => 2,
        Error::InvalidArgument(_) if !point => 2,
        _ if point => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, point) = match cli.command {
        Command::Point {
            config,
            mode,
            seed,
            branch,
        } => (print_point(&config, mode.into(), seed, branch), true),
        Command::Sweep {
            config,
            out,
            jobs,
            mode,
            seed,
        } => (
            read_config(&config)
                .and_then(|c| SweepGrid::from_config(c, mode.into()))
                .and_then(|g| emit(&g, jobs, seed, out.as_deref())),
            false,
        ),
        Command::Preset {
            name,
            out,
            jobs,
            seed,
        } => (
            preset(&name).and_then(|g| emit(&g, jobs, seed, out.as_deref())),
            false,
        ),
        Command::Check { seed } => {
            let results = cavmag::checks::run_all(seed);
            let mut ok = true;
            for c in &results {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e, point))
        }
    }
}
