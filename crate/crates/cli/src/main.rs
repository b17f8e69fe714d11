//! `dacspec`: batch spectroscopy and pressure calibration for diamond anvil
//! cell runs.

mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "dacspec",
    version,
    about = "Photoluminescence line fitting and pressure calibration for diamond anvil cells"
)]
struct Cli {
    /// Run configuration file.
    #[arg(long, global = true, env = "DACSPEC_CONFIG")]
    config: Option<PathBuf>,

    /// Directory for written documents; overrides the configuration.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Worker threads for batch fitting; overrides the configuration.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    parallelism: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit Lorentzian lines to spectra and write one fit document per input.
    Fit(FitArgs),
    /// Convert a gauge reading to pressure.
    Pressure {
        #[command(subcommand)]
        gauge: PressureGauge,
    },
    /// Build a ZPL-vs-pressure calibration from a dataset.
    Calibrate(CalibrateArgs),
    /// Convert between pressure and diamond lattice ratio.
    Eos(EosArgs),
    /// Generate a synthetic Lorentzian spectrum.
    Synth(SynthArgs),
    /// Write plot-ready CSV and SVG for the pressure-series figures.
    ExportPlot(ExportArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Spectrum files.
    #[arg(required = true)]
    files: Vec<PathBuf>,

    /// Number of Lorentzian components, or `auto` for model selection.
    #[arg(long, default_value = "auto")]
    peaks: String,

    /// Convert fitted centres to pressure with this species' calibration.
    #[arg(long)]
    species: Option<String>,

    /// Calibration document to use with --species.
    #[arg(long, requires = "species")]
    calibration: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PressureGauge {
    /// Ruby R1 fluorescence wavelength in nm.
    Ruby { wavelength_nm: f64 },
    /// First-order Raman edge in cm^-1.
    Raman { wavenumber_cm1: f64 },
    /// Colour-centre ZPL energy in eV.
    Zpl {
        energy_ev: f64,
        #[arg(long)]
        species: String,
        /// Calibration document; defaults to the configuration, then to the
        /// bundled table.
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CalibrateArgs {
    /// Dataset CSV (`p_gpa, p_sigma_gpa, e_ev, e_sigma_ev`).
    #[arg(required_unless_present = "bundled", conflicts_with = "bundled")]
    dataset: Option<PathBuf>,

    /// Use a bundled dataset instead of a file.
    #[arg(long, value_enum)]
    bundled: Option<BundledSpecies>,

    /// Species; required when the dataset does not name one.
    #[arg(long)]
    species: Option<String>,

    /// Exclude points below this pressure (GPa).
    #[arg(long)]
    mask_below: Option<f64>,

    /// Output path; defaults to calibration_<species>.txt in the output
    /// directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BundledSpecies {
    Siv,
    Gev,
}

#[derive(Args)]
struct EosArgs {
    /// Pressure in GPa.
    #[arg(long, conflicts_with = "ratio", required_unless_present = "ratio")]
    pressure: Option<f64>,

    /// Lattice ratio a/a0.
    #[arg(long)]
    ratio: Option<f64>,

    /// EOS parameter document.
    #[arg(long, conflicts_with = "set")]
    params: Option<PathBuf>,

    /// Shipped parameter set: `theory` or `experiment`.
    #[arg(long)]
    set: Option<String>,
}

#[derive(Args)]
struct SynthArgs {
    /// Peak centre in eV; repeat for several peaks.
    #[arg(long, required = true)]
    center: Vec<f64>,

    /// Peak fwhm in eV, one per centre.
    #[arg(long, required = true)]
    fwhm: Vec<f64>,

    /// Peak amplitude, one per centre.
    #[arg(long, required = true)]
    amplitude: Vec<f64>,

    #[arg(long, default_value_t = 0.0)]
    baseline: f64,

    /// Standard deviation of added Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Energy grid as `lo,hi,n`.
    #[arg(long)]
    grid: String,

    /// Nominal pressure recorded in the file metadata (GPa).
    #[arg(long)]
    pressure: Option<f64>,

    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(value_enum)]
    what: Figure,

    /// Spectrum files for the waterfall, lowest pressure first.
    files: Vec<PathBuf>,

    /// Calibration documents (fig3).
    #[arg(long)]
    calibration: Vec<PathBuf>,

    /// Theory tables (fig3).
    #[arg(long)]
    theory: Vec<PathBuf>,

    /// Kohn-Sham level traces (fig4).
    #[arg(long)]
    levels: Vec<PathBuf>,

    /// Fill missing inputs from the bundled tables.
    #[arg(long)]
    bundled: bool,

    /// Skip the SVG rendering.
    #[arg(long)]
    no_svg: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig3,
    Fig4,
    Spectra,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
