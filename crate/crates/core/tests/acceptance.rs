//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Reference values were computed independently of this crate (closed forms,
//! bisection, published constants); tolerances are pinned below.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dacspec_core::calib::{
    align_theory, eval_calibration, ks_zpl_shift, linear_slope, theory_offset,
    vbm_referenced_shift, Level, LevelTrace, Species,
};
use dacspec_core::datasets;
use dacspec_core::eos::{lattice_ratio_from_pressure, vinet_pressure, EosParams};
use dacspec_core::gauges::{raman_edge_pressure, ruby_pressure, zpl_pressure, ScaleCoefficients};
use dacspec_core::peakfit::{fit_peaks, select_model, LorentzianModel, LorentzianParams};
use dacspec_core::spectra::{convert_energy, synth_spectrum, EnergyQuantity, EnergyUnit, Grid};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn thz_to_mev(v: f64) -> f64 {
    let q = EnergyQuantity::new(v, EnergyUnit::Thz).unwrap();
    convert_energy(q, EnergyUnit::MeV).unwrap().value()
}

// 17 THz and 78 THz are 70.306 meV and 322.58 meV (h = 4.135667696 meV/THz).
fn criterion_1() -> Check {
    let (a, b) = (thz_to_mev(17.0), thz_to_mev(78.0));
    ensure(
        (a - 70.31).abs() <= 0.01
            && (b - 322.6).abs() <= 0.05
            && (a - 70.0).abs() <= 0.5
            && (b - 320.0).abs() <= 2.6,
        format!("17 THz = {a:.3} meV, 78 THz = {b:.3} meV"),
    )
}

fn criterion_2() -> Check {
    let siv = datasets::dataset(Species::SiV).unwrap();
    let gev = datasets::dataset(Species::GeV).unwrap();
    let s = linear_slope(&siv.points, (0.0, 20.0)).map_err(|e| e.to_string())?;
    let g = linear_slope(&gev.points, (20.0, 40.0)).map_err(|e| e.to_string())?;
    ensure(
        (s.slope - 1.0).abs() <= 0.2 && (g.slope - 2.7).abs() <= 0.3,
        format!(
            "SiV [0,20] = {:.3} meV/GPa, GeV [20,40] = {:.3} meV/GPa",
            s.slope, g.slope
        ),
    )
}

fn criterion_3() -> Check {
    let siv = datasets::calibration(Species::SiV).unwrap();
    let gev = datasets::calibration(Species::GeV).unwrap();
    let total = |c: &dacspec_core::calib::GaugeCalibration, p: f64| {
        1e3 * (c.eval(p).unwrap() - c.eval(c.range().0).unwrap())
    };
    let ts = total(&siv, 180.0);
    let tg = total(&gev, 168.0);
    let ratio = tg / ts;
    ensure(
        (ts - 70.0).abs() <= 10.0 && (tg - 320.0).abs() <= 30.0 && (4.0..=5.2).contains(&ratio),
        format!("SiV total {ts:.1} meV, GeV total {tg:.1} meV, ratio {ratio:.2}"),
    )
}

fn criterion_4() -> Check {
    let siv = datasets::calibration(Species::SiV).unwrap();
    let gev = datasets::calibration(Species::GeV).unwrap();
    let mut offsets = Vec::new();
    for (species, expected) in [
        (Species::SiV, 0.11),
        (Species::GeV, 0.06),
        (Species::SnV, 0.02),
    ] {
        let curve = datasets::theory(species);
        let off = theory_offset(&curve.points, species.experimental_zpl0()).unwrap();
        let aligned = align_theory(&curve.points, species.experimental_zpl0()).unwrap();
        if (off - expected).abs() > 1e-12 || aligned[0].1 != species.experimental_zpl0() {
            return Err(format!("{} offset {off}", species.as_str()));
        }
        offsets.push(off);
    }
    ensure(
        (siv.zpl0() - 1.68).abs() <= 0.01 && (gev.zpl0() - 2.06).abs() <= 0.01,
        format!(
            "zpl0 SiV {:.4} eV, GeV {:.4} eV; offsets {:+.2}/{:+.2}/{:+.2} eV",
            siv.zpl0(),
            gev.zpl0(),
            offsets[0],
            offsets[1],
            offsets[2]
        ),
    )
}

// Independent bisection on the Vinet closed form with B0 = 446 GPa, B0' = 3.
fn bisect_ratio(p: f64) -> f64 {
    let f = |x: f64| 3.0 * 446.0 * (1.0 - x) / (x * x) * (1.5 * (3.0 - 1.0) * (1.0 - x)).exp() - p;
    let (mut lo, mut hi) = (0.7, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_5() -> Check {
    let eos = EosParams::experiment();
    let p1 = vinet_pressure(1.0, &eos).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..=1000 {
        let x = 0.85 + 0.15 * i as f64 / 1000.0;
        let p = vinet_pressure(x, &eos).unwrap();
        let back = lattice_ratio_from_pressure(p, &eos).unwrap();
        worst = worst.max((back - x).abs());
    }
    let x180 = lattice_ratio_from_pressure(180.0, &eos).unwrap();
    let oracle = bisect_ratio(180.0);
    ensure(
        p1 == 0.0 && worst < 1e-9 && (x180 - 0.9135).abs() <= 0.001 && (x180 - oracle).abs() < 1e-9,
        format!(
            "P(1) = {p1}, worst round trip {worst:.1e}, x(180) = {x180:.6} (bisection {oracle:.6})"
        ),
    )
}

fn criterion_6() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let grid = Grid::new(1.5, 2.5, 401).unwrap();

    let mut worst_rel: f64 = 0.0;
    for _ in 0..1000 {
        let truth = LorentzianParams::new(
            rng.random_range(1.7..2.3),
            rng.random_range(0.01..0.1),
            rng.random_range(10.0..1e4),
        )
        .unwrap();
        let baseline = rng.random_range(0.0..100.0);
        let s = synth_spectrum(&[truth], baseline, 0.0, 0, grid).unwrap();
        let f = fit_peaks(&s, 1, None).map_err(|e| format!("noiseless fit failed: {e}"))?;
        let p = f.peaks[0];
        for (got, want) in [
            (p.center, truth.center),
            (p.fwhm, truth.fwhm),
            (p.amplitude, truth.amplitude),
        ] {
            worst_rel = worst_rel.max(((got - want) / want).abs());
        }
    }

    let mut worst_jac: f64 = 0.0;
    let xs = grid.nodes();
    for _ in 0..100 {
        let n = rng.random_range(1..=2usize);
        let model = LorentzianModel::new(n);
        let peaks: Vec<_> = (0..n)
            .map(|_| {
                LorentzianParams::new(
                    rng.random_range(1.7..2.3),
                    rng.random_range(0.01..0.1),
                    rng.random_range(10.0..1e4),
                )
                .unwrap()
            })
            .collect();
        let v = model.pack(&peaks, rng.random_range(0.0..100.0));
        let jac = model.jacobian(&v, &xs);
        let h = 1e-6;
        for j in 0..model.n_params() {
            let mut up = v.clone();
            let mut dn: DVector<f64> = v.clone();
            up[j] += h;
            dn[j] -= h;
            let scale = (0..xs.len())
                .map(|i| jac[(i, j)].abs())
                .fold(0.0, f64::max)
                .max(1.0);
            for (i, &x) in xs.iter().enumerate() {
                let fd = (model.eval(&up, x) - model.eval(&dn, x)) / (2.0 * h);
                worst_jac = worst_jac.max((fd - jac[(i, j)]).abs() / scale);
            }
        }
    }

    let truth = LorentzianParams::new(1.95, 0.03, 1000.0).unwrap();
    let mut covered = 0;
    for seed in 0..100 {
        let s = synth_spectrum(&[truth], 50.0, truth.amplitude / 100.0, seed, grid).unwrap();
        let f = fit_peaks(&s, 1, None).map_err(|e| format!("noisy fit failed: {e}"))?;
        if (f.peaks[0].center - truth.center).abs() <= 3.0 * f.center_sigma(0) {
            covered += 1;
        }
    }
    ensure(
        worst_rel <= 1e-6 && worst_jac <= 1e-5 && covered >= 90,
        format!("worst recovery {worst_rel:.1e}, worst Jacobian {worst_jac:.1e}, 3-sigma coverage {covered}/100"),
    )
}

fn criterion_7() -> Check {
    let grid = Grid::new(2.2, 2.5, 301).unwrap();
    let fwhm = 0.02;
    let doublet = [
        LorentzianParams::new(2.33, fwhm, 1000.0).unwrap(),
        LorentzianParams::new(2.33 + 1.5 * fwhm, fwhm, 800.0).unwrap(),
    ];
    let single = [LorentzianParams::new(2.34, fwhm, 1000.0).unwrap()];
    let (mut two, mut one) = (0, 0);
    for seed in 0..100 {
        let s = synth_spectrum(&doublet, 50.0, 10.0, seed, grid).unwrap();
        if select_model(&s).map_err(|e| e.to_string())?.n_peaks() == 2 {
            two += 1;
        }
        let s = synth_spectrum(&single, 50.0, 10.0, 1000 + seed, grid).unwrap();
        if select_model(&s).map_err(|e| e.to_string())?.n_peaks() == 1 {
            one += 1;
        }
    }
    ensure(
        two >= 98 && one >= 98,
        format!("doublets as 2 peaks {two}/100, singles as 1 peak {one}/100"),
    )
}

fn criterion_8() -> Check {
    let mut worst: f64 = 0.0;
    for species in [Species::SiV, Species::GeV] {
        let cal = datasets::calibration(species).unwrap();
        let (lo, hi) = cal.range();
        for i in 0..=500 {
            let p = lo + (hi - lo) * i as f64 / 500.0;
            let e = eval_calibration(&cal, p).unwrap();
            let back = zpl_pressure(e, &cal).map_err(|err| err.to_string())?.value;
            worst = worst.max((back - p).abs());
        }
    }
    let coeffs = ScaleCoefficients::default();
    let mut agreement = Vec::new();
    let mut all_agree = true;
    for r in datasets::gauge_crossover() {
        let ruby = ruby_pressure(r.ruby_nm, &coeffs).map_err(|e| e.to_string())?;
        let raman = raman_edge_pressure(r.raman_cm1, &coeffs).map_err(|e| e.to_string())?;
        let gap = (ruby.value - raman.value).abs();
        let sigma = ruby.sigma.hypot(raman.sigma);
        all_agree &= gap <= sigma;
        agreement.push(format!(
            "{:.0} GPa: {:.1} vs {:.1} (1 sigma {:.1})",
            r.step_gpa, ruby.value, raman.value, sigma
        ));
    }
    ensure(
        worst <= 1e-6 && all_agree,
        format!(
            "worst round trip {worst:.1e} GPa; ruby vs Raman {}",
            agreement.join(", ")
        ),
    )
}

fn criterion_9() -> Check {
    // Dyadic slopes keep every difference exact in binary floating point.
    let p: Vec<f64> = (0..=10).map(|i| 16.0 * i as f64).collect();
    let eu: Vec<f64> = p.iter().map(|p| -1.0 + p / 1024.0).collect();
    let eg: Vec<f64> = p.iter().map(|p| 0.5 + 3.0 * p / 1024.0).collect();
    let vbm: Vec<f64> = p.iter().map(|p| -2.0 + p / 2048.0).collect();
    let cbm: Vec<f64> = p.iter().map(|p| 3.0 + 5.0 * p / 2048.0).collect();
    let trace = LevelTrace::new(Species::GeV, p.clone(), eu, eg, vbm, Some(cbm)).unwrap();
    let exact = ks_zpl_shift(&trace)
        .iter()
        .all(|&(p, d)| d == 2.0 * p / 1024.0)
        && vbm_referenced_shift(&trace, Level::Eu)
            .unwrap()
            .iter()
            .all(|&(p, d)| d == p / 2048.0)
        && vbm_referenced_shift(&trace, Level::Eg)
            .unwrap()
            .iter()
            .all(|&(p, d)| d == 5.0 * p / 2048.0)
        && vbm_referenced_shift(&trace, Level::Cbm)
            .unwrap()
            .iter()
            .all(|&(p, d)| d == 4.0 * p / 2048.0);

    let mut zero = true;
    for species in Species::ALL {
        let t = datasets::level_trace(species);
        zero &= ks_zpl_shift(&t)[0] == (0.0, 0.0);
        for level in [Level::Eu, Level::Eg, Level::Cbm] {
            zero &= vbm_referenced_shift(&t, level).unwrap()[0] == (0.0, 0.0);
        }
    }
    ensure(
        exact && zero,
        format!("synthetic slopes exact: {exact}; zero at 0 GPa on bundled traces: {zero}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 9] = [
        ("unit conversion", criterion_1, Duration::from_secs(1)),
        ("measured slopes", criterion_2, Duration::from_secs(1)),
        ("total shifts", criterion_3, Duration::from_secs(1)),
        (
            "zero-pressure ZPL and theory offsets",
            criterion_4,
            Duration::from_secs(1),
        ),
        ("equation of state", criterion_5, Duration::from_secs(1)),
        ("fit recovery", criterion_6, Duration::from_secs(30)),
        ("split detection", criterion_7, Duration::from_secs(60)),
        (
            "gauge round trip and crossover",
            criterion_8,
            Duration::from_secs(1),
        ),
        ("Kohn-Sham transforms", criterion_9, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        let timing = if elapsed <= *budget {
            ""
        } else {
            " (over runtime budget)"
        };
        println!(
            "criterion {} [{tag}] {name}: {detail} [{:.2} s of {} s]{timing}",
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
