//! Python bindings: `import dacspec`.

use std::collections::BTreeMap;

use dacspec_core::calib::{self, CalibrationPoint, GaugeCalibration, Level, Species};
use dacspec_core::eos::{self, EosParams};
use dacspec_core::gauges::{self, PressureEstimate, ScaleCoefficients};
use dacspec_core::peakfit::{self, LorentzianParams};
use dacspec_core::spectra::{self, AxisUnit, EnergyQuantity, EnergyUnit, Grid};
use dacspec_core::{datasets, io, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(
    dacspec,
    DacspecError,
    PyValueError,
    "Raised for any dacspec failure."
);

fn err(e: Error) -> PyErr {
    DacspecError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

#[pyclass(name = "Spectrum", frozen)]
struct PySpectrum(spectra::Spectrum);

#[pymethods]
impl PySpectrum {
    #[new]
    #[pyo3(signature = (axis, intensity, axis_unit = "electronvolt", meta = None))]
    fn new(
        axis: Vec<f64>,
        intensity: Vec<f64>,
        axis_unit: &str,
        meta: Option<BTreeMap<String, String>>,
    ) -> PyResult<Self> {
        let unit: AxisUnit = parse(axis_unit)?;
        spectra::Spectrum::with_meta(unit, axis, intensity, meta.unwrap_or_default())
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        io::parse_spectrum(text).map(Self).map_err(err)
    }

    fn to_csv(&self) -> String {
        io::spectrum_to_string(&self.0)
    }

    #[getter]
    fn axis(&self) -> Vec<f64> {
        self.0.axis().to_vec()
    }

    #[getter]
    fn intensity(&self) -> Vec<f64> {
        self.0.intensity().to_vec()
    }

    #[getter]
    fn axis_unit(&self) -> &'static str {
        self.0.axis_unit().as_str()
    }

    #[getter]
    fn meta(&self) -> BTreeMap<String, String> {
        self.0.meta().clone()
    }

    #[getter]
    fn nominal_pressure(&self) -> Option<f64> {
        self.0.nominal_pressure()
    }

    fn to_energy(&self) -> PyResult<Self> {
        spectra::resample_to_energy(&self.0).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "FitResult", frozen)]
struct PyFitResult(peakfit::FitResult);

#[pymethods]
impl PyFitResult {
    /// `(center, fwhm, amplitude)` per peak, ascending in centre.
    #[getter]
    fn peaks(&self) -> Vec<(f64, f64, f64)> {
        self.0
            .peaks
            .iter()
            .map(|p| (p.center, p.fwhm, p.amplitude))
            .collect()
    }

    #[getter]
    fn baseline(&self) -> f64 {
        self.0.baseline
    }

    #[getter]
    fn n_peaks(&self) -> usize {
        self.0.n_peaks()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    #[getter]
    fn residual_rms(&self) -> f64 {
        self.0.residual_rms
    }

    #[getter]
    fn n_iterations(&self) -> usize {
        self.0.n_iterations
    }

    #[getter]
    fn covariance(&self) -> Vec<Vec<f64>> {
        let c = &self.0.covariance;
        (0..c.nrows())
            .map(|i| c.row(i).iter().copied().collect())
            .collect()
    }

    fn center_sigma(&self, k: usize) -> PyResult<f64> {
        if k >= self.0.n_peaks() {
            return Err(PyValueError::new_err(format!(
                "peak index {k} out of range"
            )));
        }
        Ok(self.0.center_sigma(k))
    }

    /// `(mean, half_width_95, n)` of the line position.
    fn center_energy(&self) -> PyResult<(f64, f64, usize)> {
        let s = peakfit::center_energy(&self.0).map_err(err)?;
        Ok((s.mean, s.half_width_95, s.n))
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    fn to_document(&self) -> String {
        io::fit_to_string(&self.0)
    }
}

#[pyclass(name = "EosParams", frozen)]
struct PyEosParams(EosParams);

#[pymethods]
impl PyEosParams {
    #[new]
    #[pyo3(signature = (a0, b0, b0_prime, label = "custom"))]
    fn new(a0: f64, b0: f64, b0_prime: f64, label: &str) -> PyResult<Self> {
        EosParams::new(a0, b0, b0_prime, label)
            .map(Self)
            .map_err(err)
    }

    /// `theory` or `experiment`.
    #[staticmethod]
    fn shipped(name: &str) -> PyResult<Self> {
        EosParams::by_name(name).map(Self).map_err(err)
    }

    #[getter]
    fn a0(&self) -> f64 {
        self.0.a0
    }

    #[getter]
    fn b0(&self) -> f64 {
        self.0.b0
    }

    #[getter]
    fn b0_prime(&self) -> f64 {
        self.0.b0_prime
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label.clone()
    }
}

fn eos_or_default(params: Option<&PyEosParams>) -> EosParams {
    params.map_or_else(EosParams::experiment, |p| p.0.clone())
}

#[pyclass(name = "PressureEstimate", frozen)]
struct PyPressure(PressureEstimate);

#[pymethods]
impl PyPressure {
    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma
    }

    #[getter]
    fn gauge(&self) -> &'static str {
        self.0.gauge.as_str()
    }

    fn to_document(&self) -> String {
        io::pressure_to_string(&self.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "PressureEstimate({} {:.4} ± {:.4} GPa)",
            self.0.gauge, self.0.value, self.0.sigma
        )
    }
}

#[pyclass(name = "Calibration", frozen)]
struct PyCalibration(GaugeCalibration);

fn points_from(rows: Vec<(f64, f64, f64, f64)>) -> PyResult<Vec<CalibrationPoint>> {
    rows.into_iter()
        .map(|(p, ps, e, es)| CalibrationPoint::new(p, ps, e, es).map_err(err))
        .collect()
}

#[pymethods]
impl PyCalibration {
    /// `points` are `(P, P_sigma, E, E_sigma)` rows in GPa and eV.
    #[staticmethod]
    #[pyo3(signature = (species, points, mask_below = None))]
    fn build(
        species: &str,
        points: Vec<(f64, f64, f64, f64)>,
        mask_below: Option<f64>,
    ) -> PyResult<Self> {
        GaugeCalibration::build_masked(parse(species)?, &points_from(points)?, mask_below)
            .map(Self)
            .map_err(err)
    }

    /// Calibration from the bundled table with the species' default mask.
    #[staticmethod]
    fn bundled(species: &str) -> PyResult<Self> {
        datasets::calibration(parse(species)?)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_document(text: &str) -> PyResult<Self> {
        io::parse_calibration(text).map(Self).map_err(err)
    }

    fn to_document(&self) -> String {
        io::calibration_to_string(&self.0)
    }

    #[getter]
    fn species(&self) -> &'static str {
        self.0.species().as_str()
    }

    #[getter]
    fn range(&self) -> (f64, f64) {
        self.0.range()
    }

    #[getter]
    fn zpl0(&self) -> f64 {
        self.0.zpl0()
    }

    #[getter]
    fn points(&self) -> Vec<(f64, f64, f64, f64)> {
        self.0
            .points()
            .iter()
            .map(|p| (p.pressure, p.pressure_sigma, p.energy, p.energy_sigma))
            .collect()
    }

    fn eval(&self, p: f64) -> PyResult<f64> {
        self.0.eval(p).map_err(err)
    }

    /// dE/dP in eV/GPa.
    fn slope(&self, p: f64) -> PyResult<f64> {
        self.0.slope(p).map_err(err)
    }

    fn invert(&self, energy: f64) -> PyResult<f64> {
        self.0.invert(energy).map_err(err)
    }

    fn zpl_pressure(&self, energy: f64) -> PyResult<PyPressure> {
        gauges::zpl_pressure(energy, &self.0)
            .map(PyPressure)
            .map_err(err)
    }
}

#[pyclass(name = "LevelTrace", frozen)]
struct PyLevelTrace(calib::LevelTrace);

#[pymethods]
impl PyLevelTrace {
    #[new]
    #[pyo3(signature = (species, pressure, eps_eu, eps_eg, eps_vbm, eps_cbm = None))]
    fn new(
        species: &str,
        pressure: Vec<f64>,
        eps_eu: Vec<f64>,
        eps_eg: Vec<f64>,
        eps_vbm: Vec<f64>,
        eps_cbm: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        calib::LevelTrace::new(parse(species)?, pressure, eps_eu, eps_eg, eps_vbm, eps_cbm)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn bundled(species: &str) -> PyResult<Self> {
        Ok(Self(datasets::level_trace(parse(species)?)))
    }

    fn ks_zpl_shift(&self) -> Vec<(f64, f64)> {
        calib::ks_zpl_shift(&self.0)
    }

    /// `level` is `eu`, `eg` or `cbm`.
    fn vbm_referenced_shift(&self, level: &str) -> PyResult<Vec<(f64, f64)>> {
        let level = match level {
            "eu" => Level::Eu,
            "eg" => Level::Eg,
            "cbm" => Level::Cbm,
            other => return Err(PyValueError::new_err(format!("unknown level '{other}'"))),
        };
        calib::vbm_referenced_shift(&self.0, level).map_err(err)
    }
}

/// Converts an energy between `eV`, `meV`, `THz` and `nm`.
#[pyfunction]
fn convert_energy(value: f64, unit: &str, target: &str) -> PyResult<f64> {
    let q = EnergyQuantity::new(value, parse::<EnergyUnit>(unit)?).map_err(err)?;
    spectra::convert_energy(q, parse(target)?)
        .map(|q| q.value())
        .map_err(err)
}

/// `(mean, half_width, n)` with a Student-t interval at `level`.
#[pyfunction]
#[pyo3(signature = (values, level = 0.95))]
fn mean_with_ci(values: Vec<f64>, level: f64) -> PyResult<(f64, f64, usize)> {
    let s = spectra::mean_with_ci(&values, level).map_err(err)?;
    Ok((s.mean, s.half_width_95, s.n))
}

/// Lorentzian peaks on a constant baseline over `grid = (lo, hi, n)` in eV.
#[pyfunction]
#[pyo3(signature = (centers, fwhms, amplitudes, grid, baseline = 0.0, noise = 0.0, seed = 0))]
fn synth_spectrum(
    centers: Vec<f64>,
    fwhms: Vec<f64>,
    amplitudes: Vec<f64>,
    grid: (f64, f64, usize),
    baseline: f64,
    noise: f64,
    seed: u64,
) -> PyResult<PySpectrum> {
    if fwhms.len() != centers.len() || amplitudes.len() != centers.len() {
        return Err(PyValueError::new_err(
            "centers, fwhms and amplitudes differ in length",
        ));
    }
    let peaks = centers
        .iter()
        .zip(&fwhms)
        .zip(&amplitudes)
        .map(|((&c, &w), &a)| LorentzianParams::new(c, w, a).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let grid = Grid::new(grid.0, grid.1, grid.2).map_err(err)?;
    spectra::synth_spectrum(&peaks, baseline, noise, seed, grid)
        .map(PySpectrum)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (spectrum, n_peaks = 1))]
fn fit_peaks(spectrum: &PySpectrum, n_peaks: usize) -> PyResult<PyFitResult> {
    peakfit::fit_peaks(&spectrum.0, n_peaks, None)
        .map(PyFitResult)
        .map_err(err)
}

#[pyfunction]
fn select_model(spectrum: &PySpectrum) -> PyResult<PyFitResult> {
    peakfit::select_model(&spectrum.0)
        .map(PyFitResult)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, params = None))]
fn vinet_pressure(x: f64, params: Option<&PyEosParams>) -> PyResult<f64> {
    eos::vinet_pressure(x, &eos_or_default(params)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p, params = None))]
fn lattice_ratio_from_pressure(p: f64, params: Option<&PyEosParams>) -> PyResult<f64> {
    eos::lattice_ratio_from_pressure(p, &eos_or_default(params)).map_err(err)
}

#[pyfunction]
fn ruby_pressure(wavelength_nm: f64) -> PyResult<PyPressure> {
    gauges::ruby_pressure(wavelength_nm, &ScaleCoefficients::default())
        .map(PyPressure)
        .map_err(err)
}

#[pyfunction]
fn raman_edge_pressure(wavenumber_cm1: f64) -> PyResult<PyPressure> {
    gauges::raman_edge_pressure(wavenumber_cm1, &ScaleCoefficients::default())
        .map(PyPressure)
        .map_err(err)
}

#[pyfunction]
fn combine_gauges(estimates: Vec<PyRef<'_, PyPressure>>) -> PyResult<PyPressure> {
    let list: Vec<PressureEstimate> = estimates.iter().map(|p| p.0.clone()).collect();
    gauges::combine_gauges(&list).map(PyPressure).map_err(err)
}

/// `(slope_meV_per_GPa, stderr, intercept_eV, n)` over `window = (lo, hi)`.
#[pyfunction]
fn linear_slope(
    points: Vec<(f64, f64, f64, f64)>,
    window: (f64, f64),
) -> PyResult<(f64, f64, f64, usize)> {
    let s = calib::linear_slope(&points_from(points)?, window).map_err(err)?;
    Ok((s.slope, s.stderr, s.intercept, s.n))
}

#[pyfunction]
fn align_theory(points: Vec<(f64, f64)>, zpl0: f64) -> PyResult<Vec<(f64, f64)>> {
    calib::align_theory(&points, zpl0).map_err(err)
}

/// Published zero-pressure ZPL energy of a species, eV.
#[pyfunction]
fn experimental_zpl0(species: &str) -> PyResult<f64> {
    Ok(parse::<Species>(species)?.experimental_zpl0())
}

#[pymodule]
fn dacspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DacspecError", m.py().get_type::<DacspecError>())?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyFitResult>()?;
    m.add_class::<PyEosParams>()?;
    m.add_class::<PyPressure>()?;
    m.add_class::<PyCalibration>()?;
    m.add_class::<PyLevelTrace>()?;
    m.add_function(wrap_pyfunction!(convert_energy, m)?)?;
    m.add_function(wrap_pyfunction!(mean_with_ci, m)?)?;
    m.add_function(wrap_pyfunction!(synth_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(fit_peaks, m)?)?;
    m.add_function(wrap_pyfunction!(select_model, m)?)?;
    m.add_function(wrap_pyfunction!(vinet_pressure, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_ratio_from_pressure, m)?)?;
    m.add_function(wrap_pyfunction!(ruby_pressure, m)?)?;
    m.add_function(wrap_pyfunction!(raman_edge_pressure, m)?)?;
    m.add_function(wrap_pyfunction!(combine_gauges, m)?)?;
    m.add_function(wrap_pyfunction!(linear_slope, m)?)?;
    m.add_function(wrap_pyfunction!(align_theory, m)?)?;
    m.add_function(wrap_pyfunction!(experimental_zpl0, m)?)?;
    Ok(())
}
