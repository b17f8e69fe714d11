use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use dacspec_core::calib::{linear_slope, GaugeCalibration, Species};
use dacspec_core::datasets;
use dacspec_core::eos::{lattice_state_from_pressure, lattice_state_from_ratio, EosParams};
use dacspec_core::export::{
    fig3_table, fig4_table, render_svg, waterfall_csv, waterfall_series, PlotTable,
    WATERFALL_HEIGHT_GPA,
};
use dacspec_core::gauges::{raman_edge_pressure, ruby_pressure, zpl_pressure, PressureEstimate};
use dacspec_core::io::{self, RunConfig};
use dacspec_core::peakfit::LorentzianParams;
use dacspec_core::pipeline::{fit_spectrum, records_to_csv, run_batch, PeakMode};
use dacspec_core::spectra::{synth_spectrum, Grid, Spectrum};

use crate::failure::{exit_code, Failure, EXIT_FIT};
use crate::{
    BundledSpecies, CalibrateArgs, Cli, Command, EosArgs, ExportArgs, Figure, FitArgs,
    PressureGauge, SynthArgs,
};

struct Context {
    config: RunConfig,
    output_dir: PathBuf,
    parallelism: usize,
}

pub fn run(cli: Cli) -> Result<u8, Failure> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)
            .map_err(|e| Failure::input(format!("configuration {}: {e}", path.display())))?,
        None => RunConfig::default(),
    };
    let ctx = Context {
        output_dir: cli
            .output_dir
            .clone()
            .unwrap_or_else(|| config.output_dir.clone()),
        parallelism: cli.parallelism.map_or(config.parallelism, |p| p as usize),
        config,
    };
    match cli.command {
        Command::Fit(args) => fit(&ctx, args),
        Command::Pressure { gauge } => pressure(&ctx, gauge),
        Command::Calibrate(args) => calibrate(&ctx, args),
        Command::Eos(args) => eos(&ctx, args),
        Command::Synth(args) => synth(args),
        Command::ExportPlot(args) => export_plot(&ctx, args),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    io::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    io::write_string(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_spectrum(path: &Path) -> Result<Spectrum, Failure> {
    io::parse_spectrum(&read(path)?).map_err(|e| Failure::context(path.display(), e))
}

fn parse_species(s: &str) -> Result<Species, Failure> {
    s.parse().map_err(Failure::from)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "spectrum".into(), |s| s.to_string_lossy().into_owned())
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set so that runs can
/// be reproduced byte for byte.
fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}

/// Explicit document first, then the configuration, then the bundled table.
fn resolve_calibration(
    ctx: &Context,
    species: Species,
    explicit: Option<&Path>,
) -> Result<GaugeCalibration, Failure> {
    if let Some(path) = explicit {
        let cal =
            io::parse_calibration(&read(path)?).map_err(|e| Failure::context(path.display(), e))?;
        if cal.species() != species {
            return Err(Failure::input(format!(
                "{} is a {} calibration, not {}",
                path.display(),
                cal.species(),
                species
            )));
        }
        return Ok(cal);
    }
    let configured = ctx
        .config
        .calibrations()
        .map_err(|e| Failure::input(format!("configuration: {e}")))?;
    if let Some(cal) = configured.into_iter().find(|c| c.species() == species) {
        return Ok(cal);
    }
    datasets::calibration(species)
        .map_err(|e| Failure::input(format!("no calibration for {species}: {e}")))
}

fn fit(ctx: &Context, args: FitArgs) -> Result<u8, Failure> {
    let mode: PeakMode = args.peaks.parse()?;
    let calibration = match &args.species {
        Some(s) => Some(resolve_calibration(
            ctx,
            parse_species(s)?,
            args.calibration.as_deref(),
        )?),
        None => None,
    };
    let mut inputs = Vec::with_capacity(args.files.len());
    let mut parse_failed = false;
    for path in &args.files {
        match load_spectrum(path) {
            Ok(s) => inputs.push((path.display().to_string(), s)),
            Err(f) => {
                eprintln!("error: {}", f.message);
                parse_failed = true;
            }
        }
    }
    if parse_failed {
        return Err(Failure::input("no spectra were fitted"));
    }

    let results = run_batch(
        &inputs,
        mode,
        calibration.as_ref(),
        ctx.parallelism,
        timestamp(),
    )?;
    let mut code = 0;
    let mut records = Vec::new();
    for ((path, result), (id, _)) in args.files.iter().zip(results).zip(&inputs) {
        match result {
            Ok(rec) => {
                write(
                    &ctx.output_dir.join(format!("{}.fit.txt", stem(path))),
                    &io::fit_to_string(&rec.fit),
                )?;
                match (&rec.center, &rec.pressure) {
                    (Some(c), Some(p)) => println!(
                        "{id}: {} peak(s), centre {:.6} ± {:.6} eV, {} {:.3} ± {:.3} GPa",
                        rec.fit.n_peaks(),
                        c.mean,
                        c.half_width_95,
                        p.gauge,
                        p.value,
                        p.sigma
                    ),
                    (Some(c), None) => println!(
                        "{id}: {} peak(s), centre {:.6} ± {:.6} eV",
                        rec.fit.n_peaks(),
                        c.mean,
                        c.half_width_95
                    ),
                    (None, _) => {
                        eprintln!(
                            "{id}: fit did not converge after {} iterations",
                            rec.fit.n_iterations
                        );
                        code = code.max(EXIT_FIT);
                    }
                }
                records.push(rec);
            }
            Err(e) => {
                eprintln!("{id}: {e}");
                code = code.max(exit_code(&e));
            }
        }
    }
    write(
        &ctx.output_dir.join("fit_summary.csv"),
        &records_to_csv(&records),
    )?;
    Ok(code)
}

fn report_pressure(ctx: &Context, p: &PressureEstimate) -> Result<u8, Failure> {
    println!("{}: {:.4} ± {:.4} GPa", p.gauge, p.value, p.sigma);
    write(
        &ctx.output_dir.join(format!("pressure_{}.txt", p.gauge)),
        &io::pressure_to_string(p),
    )?;
    Ok(0)
}

fn pressure(ctx: &Context, gauge: PressureGauge) -> Result<u8, Failure> {
    let estimate = match gauge {
        PressureGauge::Ruby { wavelength_nm } => {
            let coeffs = ctx.config.scale_coefficients()?;
            ruby_pressure(wavelength_nm, &coeffs)?
        }
        PressureGauge::Raman { wavenumber_cm1 } => {
            let coeffs = ctx.config.scale_coefficients()?;
            raman_edge_pressure(wavenumber_cm1, &coeffs)?
        }
        PressureGauge::Zpl {
            energy_ev,
            species,
            calibration,
        } => {
            let cal = resolve_calibration(ctx, parse_species(&species)?, calibration.as_deref())?;
            zpl_pressure(energy_ev, &cal)?
        }
    };
    report_pressure(ctx, &estimate)
}

/// Slope windows reported by `calibrate`, GPa.
const SLOPE_WINDOWS: [(f64, f64); 2] = [(0.0, 20.0), (20.0, 40.0)];

fn calibrate(ctx: &Context, args: CalibrateArgs) -> Result<u8, Failure> {
    let (label, text) = match (&args.dataset, args.bundled) {
        (Some(path), _) => (path.display().to_string(), read(path)?),
        (None, Some(b)) => {
            let species = match b {
                BundledSpecies::Siv => Species::SiV,
                BundledSpecies::Gev => Species::GeV,
            };
            (
                format!("bundled {species}"),
                datasets::dataset_text(species)?.to_string(),
            )
        }
        (None, None) => return Err(Failure::input("a dataset file or --bundled is required")),
    };
    let dataset = io::parse_dataset(&text).map_err(|e| Failure::context(&label, e))?;
    let species = match (
        args.species.as_deref().map(parse_species).transpose()?,
        dataset.species,
    ) {
        (Some(a), Some(b)) if a != b => {
            return Err(Failure::input(format!(
                "--species {a} contradicts the dataset's species {b}"
            )))
        }
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => {
            return Err(Failure::input(format!(
                "{label}: no species; pass --species"
            )))
        }
    };
    let cal = GaugeCalibration::build_masked(species, &dataset.points, args.mask_below)
        .map_err(|e| Failure::calibration(&label, e))?;

    let (lo, hi) = cal.range();
    println!("species: {species}");
    println!(
        "range: {lo} to {hi} GPa ({} points, {} masked)",
        cal.points().len(),
        cal.excluded().len()
    );
    println!("zpl0: {:.4} eV", cal.zpl0());
    for window in SLOPE_WINDOWS {
        match linear_slope(cal.points(), window) {
            Ok(s) => println!(
                "slope [{}, {}] GPa: {:.3} ± {:.3} meV/GPa ({} points)",
                window.0, window.1, s.slope, s.stderr, s.n
            ),
            Err(e) => println!("slope [{}, {}] GPa: unavailable ({e})", window.0, window.1),
        }
    }
    let out = args
        .output
        .unwrap_or_else(|| ctx.output_dir.join(format!("calibration_{species}.txt")));
    write(&out, &io::calibration_to_string(&cal))?;
    Ok(0)
}

fn eos(ctx: &Context, args: EosArgs) -> Result<u8, Failure> {
    let params = match (&args.params, &args.set) {
        (Some(path), _) => {
            io::parse_eos_params(&read(path)?).map_err(|e| Failure::context(path.display(), e))?
        }
        (None, Some(name)) => EosParams::by_name(name)?,
        (None, None) => ctx.config.eos_params()?,
    };
    let state = match (args.pressure, args.ratio) {
        (Some(p), None) => lattice_state_from_pressure(p, &params)?,
        (None, Some(x)) => lattice_state_from_ratio(x, &params)?,
        _ => return Err(Failure::input("pass exactly one of --pressure and --ratio")),
    };
    println!("parameters: {}", params.label);
    println!("x = {:.6}", state.x);
    println!("P = {:.4} GPa", state.pressure);
    println!("a = {:.5} Å", state.a);
    Ok(0)
}

fn parse_grid(s: &str) -> Result<Grid, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Failure::input(format!("--grid expects lo,hi,n, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(Grid::new(lo, hi, n)?)
}

fn synth(args: SynthArgs) -> Result<u8, Failure> {
    let n = args.center.len();
    if args.fwhm.len() != n || args.amplitude.len() != n {
        return Err(Failure::input(
            "give one --fwhm and one --amplitude per --center",
        ));
    }
    let peaks = (0..n)
        .map(|i| LorentzianParams::new(args.center[i], args.fwhm[i], args.amplitude[i]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = synth_spectrum(
        &peaks,
        args.baseline,
        args.noise,
        args.seed,
        parse_grid(&args.grid)?,
    )?;
    if let Some(p) = args.pressure {
        s.set_meta("pressure_gpa", p.to_string());
    }
    let text = io::spectrum_to_string(&s);
    match &args.output {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn write_figure(ctx: &Context, name: &str, csv: &str, svg: Option<String>) -> Result<u8, Failure> {
    let csv_path = ctx.output_dir.join(format!("{name}.csv"));
    write(&csv_path, csv)?;
    println!("wrote {}", csv_path.display());
    if let Some(svg) = svg {
        let svg_path = ctx.output_dir.join(format!("{name}.svg"));
        write(&svg_path, &svg)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(0)
}

fn table_svg(t: &PlotTable) -> String {
    render_svg(
        &t.title,
        &format!("{} (GPa)", t.x_name),
        &t.y_label,
        &t.series(),
    )
}

fn export_plot(ctx: &Context, args: ExportArgs) -> Result<u8, Failure> {
    match args.what {
        Figure::Fig3 => {
            let mut cals = Vec::new();
            for path in &args.calibration {
                cals.push(
                    io::parse_calibration(&read(path)?)
                        .map_err(|e| Failure::context(path.display(), e))?,
                );
            }
            if cals.is_empty() {
                cals = ctx.config.calibrations()?;
            }
            let mut theory = Vec::new();
            for path in &args.theory {
                theory.push(
                    io::parse_theory(&read(path)?)
                        .map_err(|e| Failure::context(path.display(), e))?,
                );
            }
            if args.bundled {
                for s in [Species::SiV, Species::GeV] {
                    if !cals.iter().any(|c| c.species() == s) {
                        cals.push(datasets::calibration(s)?);
                    }
                }
                for s in Species::ALL {
                    if !theory.iter().any(|t| t.species == s) {
                        theory.push(datasets::theory(s));
                    }
                }
            }
            if cals.is_empty() || theory.is_empty() {
                return Err(Failure::input(
                    "fig3 needs calibrations and theory tables (--calibration, --theory or --bundled)",
                ));
            }
            let table = fig3_table(&cals, &theory, &ctx.config.eos_params()?)?;
            let svg = (!args.no_svg).then(|| table_svg(&table));
            write_figure(ctx, "fig3", &table.to_csv(), svg)
        }
        Figure::Fig4 => {
            let mut traces = Vec::new();
            for path in &args.levels {
                traces.push(
                    io::parse_level_trace(&read(path)?)
                        .map_err(|e| Failure::context(path.display(), e))?,
                );
            }
            if args.bundled {
                for s in Species::ALL {
                    if !traces.iter().any(|t| t.species == s) {
                        traces.push(datasets::level_trace(s));
                    }
                }
            }
            if traces.is_empty() {
                return Err(Failure::input(
                    "fig4 needs level traces (--levels or --bundled)",
                ));
            }
            let table = fig4_table(&traces)?;
            let svg = (!args.no_svg).then(|| table_svg(&table));
            write_figure(ctx, "fig4", &table.to_csv(), svg)
        }
        Figure::Spectra => {
            if args.files.is_empty() {
                return Err(Failure::input("spectra export needs spectrum files"));
            }
            let mut stack = Vec::new();
            for path in &args.files {
                let s = load_spectrum(path)?;
                let fit = match fit_spectrum(&s, PeakMode::Auto) {
                    Ok(f) if f.converged => Some(f),
                    Ok(_) => {
                        eprintln!(
                            "{}: fit did not converge; drawing data only",
                            path.display()
                        );
                        None
                    }
                    Err(e) => {
                        eprintln!("{}: {e}; drawing data only", path.display());
                        None
                    }
                };
                stack.push((s, fit));
            }
            let csv = waterfall_csv(&stack, WATERFALL_HEIGHT_GPA)?;
            let svg = if args.no_svg {
                None
            } else {
                let series = waterfall_series(&stack, WATERFALL_HEIGHT_GPA)?;
                Some(render_svg(
                    "Spectra vs pressure",
                    "axis",
                    "P (GPa) + scaled intensity",
                    &series,
                ))
            };
            write_figure(ctx, "spectra", &csv, svg)
        }
    }
}
