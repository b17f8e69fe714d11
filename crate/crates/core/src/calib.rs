//! ZPL-versus-pressure calibrations and the level-shift transforms used to
//! compare them with Kohn-Sham calculations.

use std::fmt;
use std::str::FromStr;

use crate::interp::MonotoneCubic;
use crate::roots::brent;
use crate::{Error, Result};

pub const MIN_CALIBRATION_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    SiV,
    GeV,
    SnV,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::SiV, Species::GeV, Species::SnV];

    pub fn as_str(self) -> &'static str {
        match self {
            Species::SiV => "SiV",
            Species::GeV => "GeV",
            Species::SnV => "SnV",
        }
    }

    /// Measured zero-pressure ZPL, eV.
    pub fn experimental_zpl0(self) -> f64 {
        match self {
            Species::SiV => 1.68,
            Species::GeV => 2.06,
            Species::SnV => 2.00,
        }
    }

    /// ΔSCF (SCAN) zero-pressure ZPL, eV.
    pub fn theory_zpl0(self) -> f64 {
        match self {
            Species::SiV => 1.57,
            Species::GeV => 2.00,
            Species::SnV => 1.98,
        }
    }

    /// Pressure below which measured points are excluded by default. The
    /// Raman-edge pressure reading of the GeV run is biased below 20 GPa.
    pub fn default_mask_below(self) -> Option<f64> {
        match self {
            Species::GeV => Some(20.0),
            _ => None,
        }
    }

    /// Pressure window of the reported linear coefficient, GPa.
    pub fn slope_window(self) -> (f64, f64) {
        match self {
            Species::GeV => (20.0, 40.0),
            _ => (0.0, 20.0),
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "siv" => Ok(Species::SiV),
            "gev" => Ok(Species::GeV),
            "snv" => Ok(Species::SnV),
            other => Err(Error::InvalidInput(format!("unknown species '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPoint {
    /// GPa
    pub pressure: f64,
    pub pressure_sigma: f64,
    /// eV
    pub energy: f64,
    pub energy_sigma: f64,
}

impl CalibrationPoint {
    pub fn new(pressure: f64, pressure_sigma: f64, energy: f64, energy_sigma: f64) -> Result<Self> {
        let p = Self {
            pressure,
            pressure_sigma,
            energy,
            energy_sigma,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let all = [
            self.pressure,
            self.pressure_sigma,
            self.energy,
            self.energy_sigma,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite calibration value".into()));
        }
        if self.pressure < 0.0 {
            return Err(Error::InvalidInput(format!(
                "negative pressure {}",
                self.pressure
            )));
        }
        if self.pressure_sigma < 0.0 || self.energy_sigma < 0.0 {
            return Err(Error::InvalidInput("negative uncertainty".into()));
        }
        Ok(())
    }
}

/// A monotone `E_ZPL(P)` curve through measured points.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeCalibration {
    species: Species,
    points: Vec<CalibrationPoint>,
    excluded: Vec<CalibrationPoint>,
    mask_below: Option<f64>,
    curve: MonotoneCubic,
    zpl0: f64,
    zpl0_at_lowest_node: bool,
}

impl GaugeCalibration {
    /// Builds a calibration from every point.
    pub fn build(species: Species, points: &[CalibrationPoint]) -> Result<Self> {
        Self::build_masked(species, points, None)
    }

    /// Builds a calibration, dropping points with pressure below `mask_below`.
    ///
    /// Fails unless at least three distinct pressures remain and the
    /// energies increase strictly with pressure.
    pub fn build_masked(
        species: Species,
        points: &[CalibrationPoint],
        mask_below: Option<f64>,
    ) -> Result<Self> {
        for p in points {
            p.validate()?;
        }
        if let Some(m) = mask_below {
            if !m.is_finite() {
                return Err(Error::InvalidInput("mask pressure is not finite".into()));
            }
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.pressure.total_cmp(&b.pressure));
        let (excluded, active): (Vec<_>, Vec<_>) = sorted
            .into_iter()
            .partition(|p| mask_below.is_some_and(|m| p.pressure < m));
        if active.len() < MIN_CALIBRATION_POINTS {
            return Err(Error::TooFewPoints {
                needed: MIN_CALIBRATION_POINTS,
                got: active.len(),
            });
        }
        for w in active.windows(2) {
            if w[1].pressure == w[0].pressure {
                return Err(Error::DuplicatePressure(w[0].pressure));
            }
            if w[1].energy <= w[0].energy {
                return Err(Error::NonMonotone {
                    pressure: w[1].pressure,
                });
            }
        }
        let curve = MonotoneCubic::new(
            active.iter().map(|p| p.pressure).collect(),
            active.iter().map(|p| p.energy).collect(),
        )?;
        let (zpl0, zpl0_at_lowest_node) = if active[0].pressure == 0.0 {
            (active[0].energy, false)
        } else {
            (active[0].energy, true)
        };
        Ok(Self {
            species,
            points: active,
            excluded,
            mask_below,
            curve,
            zpl0,
            zpl0_at_lowest_node,
        })
    }

    pub fn species(&self) -> Species {
        self.species
    }

    /// Points the curve passes through, ascending in pressure.
    pub fn points(&self) -> &[CalibrationPoint] {
        &self.points
    }

    /// Points dropped by the low-pressure mask.
    pub fn excluded(&self) -> &[CalibrationPoint] {
        &self.excluded
    }

    pub fn mask_below(&self) -> Option<f64> {
        self.mask_below
    }

    pub fn range(&self) -> (f64, f64) {
        self.curve.domain()
    }

    pub fn energy_range(&self) -> (f64, f64) {
        (
            self.points[0].energy,
            self.points[self.points.len() - 1].energy,
        )
    }

    /// Zero-pressure ZPL, eV. When 0 GPa is not a node this is the energy
    /// at the lowest calibrated pressure and [`Self::zpl0_at_lowest_node`]
    /// is set.
    pub fn zpl0(&self) -> f64 {
        self.zpl0
    }

    pub fn zpl0_at_lowest_node(&self) -> bool {
        self.zpl0_at_lowest_node
    }

    fn check_pressure(&self, p: f64) -> Result<()> {
        let (lo, hi) = self.range();
        if !(p >= lo && p <= hi) {
            return Err(Error::ExtrapolationRefused { value: p, lo, hi });
        }
        Ok(())
    }

    fn bracket(&self, p: f64) -> (usize, f64) {
        let k = self
            .points
            .partition_point(|q| q.pressure <= p)
            .clamp(1, self.points.len() - 1)
            - 1;
        let (a, b) = (self.points[k].pressure, self.points[k + 1].pressure);
        (k, (p - a) / (b - a))
    }

    pub fn eval(&self, p: f64) -> Result<f64> {
        self.check_pressure(p)?;
        Ok(self.curve.eval(p))
    }

    /// `dE/dP` in eV/GPa.
    pub fn slope(&self, p: f64) -> Result<f64> {
        self.check_pressure(p)?;
        Ok(self.curve.derivative(p))
    }

    /// Energy and its uncertainty, the latter interpolated linearly between
    /// the neighbouring node uncertainties.
    pub fn eval_with_sigma(&self, p: f64) -> Result<(f64, f64)> {
        let e = self.eval(p)?;
        let (k, t) = self.bracket(p);
        let s = self.points[k].energy_sigma * (1.0 - t) + self.points[k + 1].energy_sigma * t;
        Ok((e, s))
    }

    /// Node pressure uncertainty interpolated linearly at `p`.
    pub fn pressure_sigma_at(&self, p: f64) -> Result<f64> {
        self.check_pressure(p)?;
        let (k, t) = self.bracket(p);
        Ok(self.points[k].pressure_sigma * (1.0 - t) + self.points[k + 1].pressure_sigma * t)
    }

    /// Pressure at which the curve reaches `energy`, eV.
    pub fn invert(&self, energy: f64) -> Result<f64> {
        let (elo, ehi) = self.energy_range();
        if !(energy >= elo && energy <= ehi) {
            return Err(Error::ExtrapolationRefused {
                value: energy,
                lo: elo,
                hi: ehi,
            });
        }
        let (lo, hi) = self.range();
        brent(|p| self.curve.eval(p) - energy, lo, hi, 1e-13, 0.0, 200)
    }
}

pub fn build_calibration(
    species: Species,
    points: &[CalibrationPoint],
) -> Result<GaugeCalibration> {
    GaugeCalibration::build(species, points)
}

pub fn eval_calibration(cal: &GaugeCalibration, p: f64) -> Result<f64> {
    cal.eval(p)
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    /// meV/GPa
    pub slope: f64,
    /// meV/GPa; reported as 0 for two points, where it is undefined.
    pub stderr: f64,
    /// eV at 0 GPa
    pub intercept: f64,
    pub n: usize,
}

/// OLS slope of `E(P)` over points inside the closed window `[lo, hi]` GPa.
pub fn linear_slope(points: &[CalibrationPoint], window: (f64, f64)) -> Result<SlopeFit> {
    let (lo, hi) = window;
    let inside: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.pressure >= lo && p.pressure <= hi)
        .map(|p| (p.pressure, p.energy))
        .collect();
    let n = inside.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = inside.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = inside.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = inside.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "all window points share one pressure".into(),
        ));
    }
    let sxy: f64 = inside.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = inside
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit {
        slope: slope * 1e3,
        stderr: stderr * 1e3,
        intercept,
        n,
    })
}

/// Constant that moves a theory curve's 0 GPa energy onto `zpl0_exp`.
pub fn theory_offset(theory: &[(f64, f64)], zpl0_exp: f64) -> Result<f64> {
    theory
        .iter()
        .find(|(p, _)| *p == 0.0)
        .map(|(_, e)| zpl0_exp - e)
        .ok_or_else(|| Error::InvalidInput("theory curve has no 0 GPa entry".into()))
}

/// Shifts a tabulated `(P, E)` theory curve so that `E(0) = zpl0_exp`.
pub fn align_theory(theory: &[(f64, f64)], zpl0_exp: f64) -> Result<Vec<(f64, f64)>> {
    let offset = theory_offset(theory, zpl0_exp)?;
    Ok(theory.iter().map(|&(p, e)| (p, e + offset)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Eu,
    Eg,
    Cbm,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Eu => "eu",
            Level::Eg => "eg",
            Level::Cbm => "cbm",
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eu" | "e_u" => Ok(Level::Eu),
            "eg" | "e_g" => Ok(Level::Eg),
            "cbm" => Ok(Level::Cbm),
            other => Err(Error::InvalidInput(format!("unknown level '{other}'"))),
        }
    }
}

/// Kohn-Sham single-particle energies tabulated against pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrace {
    pub species: Species,
    pressure: Vec<f64>,
    eps_eu: Vec<f64>,
    eps_eg: Vec<f64>,
    eps_vbm: Vec<f64>,
    eps_cbm: Option<Vec<f64>>,
}

impl LevelTrace {
    pub fn new(
        species: Species,
        pressure: Vec<f64>,
        eps_eu: Vec<f64>,
        eps_eg: Vec<f64>,
        eps_vbm: Vec<f64>,
        eps_cbm: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = pressure.len();
        if n < 2 {
            return Err(Error::TooFewPoints { needed: 2, got: n });
        }
        let lens = [eps_eu.len(), eps_eg.len(), eps_vbm.len()];
        if lens.iter().any(|&l| l != n) || eps_cbm.as_ref().is_some_and(|c| c.len() != n) {
            return Err(Error::InvalidInput("level columns differ in length".into()));
        }
        if pressure.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "pressure grid must be strictly increasing".into(),
            ));
        }
        if !pressure.contains(&0.0) {
            return Err(Error::InvalidInput(
                "pressure grid must include 0 GPa".into(),
            ));
        }
        let finite = pressure
            .iter()
            .chain(&eps_eu)
            .chain(&eps_eg)
            .chain(&eps_vbm)
            .chain(eps_cbm.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("non-finite level energy".into()));
        }
        Ok(Self {
            species,
            pressure,
            eps_eu,
            eps_eg,
            eps_vbm,
            eps_cbm,
        })
    }

    pub fn pressure(&self) -> &[f64] {
        &self.pressure
    }

    pub fn eps_eu(&self) -> &[f64] {
        &self.eps_eu
    }

    pub fn eps_eg(&self) -> &[f64] {
        &self.eps_eg
    }

    pub fn eps_vbm(&self) -> &[f64] {
        &self.eps_vbm
    }

    pub fn eps_cbm(&self) -> Option<&[f64]> {
        self.eps_cbm.as_deref()
    }

    fn zero_index(&self) -> usize {
        self.pressure
            .iter()
            .position(|&p| p == 0.0)
            .expect("validated at construction")
    }

    fn level(&self, level: Level) -> Result<&[f64]> {
        match level {
            Level::Eu => Ok(&self.eps_eu),
            Level::Eg => Ok(&self.eps_eg),
            Level::Cbm => self.eps_cbm.as_deref().ok_or(Error::MissingLevel("cbm")),
        }
    }
}

/// `[ε_i(p) − ε_VBM(p)] − [ε_i(0) − ε_VBM(0)]` on the trace grid.
pub fn vbm_referenced_shift(trace: &LevelTrace, level: Level) -> Result<Vec<(f64, f64)>> {
    let eps = trace.level(level)?;
    let z = trace.zero_index();
    let ref0 = eps[z] - trace.eps_vbm[z];
    Ok(trace
        .pressure
        .iter()
        .zip(eps.iter().zip(&trace.eps_vbm))
        .map(|(&p, (&e, &v))| (p, (e - v) - ref0))
        .collect())
}

/// Kohn-Sham ZPL proxy relative to 0 GPa:
/// `[ε_eg(p) − ε_eu(p)] − [ε_eg(0) − ε_eu(0)]`.
pub fn ks_zpl_shift(trace: &LevelTrace) -> Vec<(f64, f64)> {
    let z = trace.zero_index();
    let gap0 = trace.eps_eg[z] - trace.eps_eu[z];
    trace
        .pressure
        .iter()
        .zip(trace.eps_eg.iter().zip(&trace.eps_eu))
        .map(|(&p, (&g, &u))| (p, (g - u) - gap0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(p: f64, e: f64) -> CalibrationPoint {
        CalibrationPoint::new(p, 1.0, e, 0.001).unwrap()
    }

    fn linear_points() -> Vec<CalibrationPoint> {
        (0..=10)
            .map(|i| pt(10.0 * i as f64, 1.68 + 0.001 * 10.0 * i as f64))
            .collect()
    }

    #[test]
    fn affine_data_reproduced() {
        let cal = build_calibration(Species::SiV, &linear_points()).unwrap();
        for i in 0..10 {
            let p = 10.0 * i as f64 + 5.0;
            assert!((cal.eval(p).unwrap() - (1.68 + 0.001 * p)).abs() < 1e-12);
        }
        assert_eq!(cal.zpl0(), 1.68);
        assert!(!cal.zpl0_at_lowest_node());
    }

    #[test]
    fn construction_errors() {
        let mut pts = linear_points();
        pts[5].energy = pts[4].energy - 0.001;
        assert!(matches!(
            build_calibration(Species::SiV, &pts),
            Err(Error::NonMonotone { .. })
        ));
        let mut pts = linear_points();
        pts[3].pressure = pts[2].pressure;
        assert!(matches!(
            build_calibration(Species::SiV, &pts),
            Err(Error::DuplicatePressure(_))
        ));
        assert!(matches!(
            build_calibration(Species::SiV, &linear_points()[..2]),
            Err(Error::TooFewPoints { .. })
        ));
        assert!(matches!(
            GaugeCalibration::build_masked(Species::GeV, &linear_points(), Some(85.0)),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn unsorted_input_is_sorted() {
        let mut pts = linear_points();
        pts.reverse();
        let cal = build_calibration(Species::SiV, &pts).unwrap();
        assert_eq!(cal.points()[0].pressure, 0.0);
        assert_eq!(cal.range(), (0.0, 100.0));
    }

    #[test]
    fn mask_drops_low_points() {
        let cal =
            GaugeCalibration::build_masked(Species::GeV, &linear_points(), Some(20.0)).unwrap();
        assert_eq!(cal.range(), (20.0, 100.0));
        assert_eq!(cal.excluded().len(), 2);
        assert!(cal.zpl0_at_lowest_node());
        assert!((cal.zpl0() - 1.70).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_refused() {
        let cal = build_calibration(Species::SiV, &linear_points()).unwrap();
        assert!(matches!(
            cal.eval(100.5),
            Err(Error::ExtrapolationRefused { .. })
        ));
        assert!(matches!(
            cal.invert(1.60),
            Err(Error::ExtrapolationRefused { .. })
        ));
    }

    #[test]
    fn sigma_interpolates_linearly() {
        let pts = vec![
            CalibrationPoint::new(0.0, 1.0, 1.0, 0.002).unwrap(),
            CalibrationPoint::new(10.0, 3.0, 1.1, 0.004).unwrap(),
            CalibrationPoint::new(20.0, 5.0, 1.2, 0.006).unwrap(),
        ];
        let cal = build_calibration(Species::SiV, &pts).unwrap();
        assert!((cal.eval_with_sigma(5.0).unwrap().1 - 0.003).abs() < 1e-15);
        assert!((cal.eval_with_sigma(20.0).unwrap().1 - 0.006).abs() < 1e-15);
        assert!((cal.pressure_sigma_at(15.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn exact_slope() {
        let pts: Vec<_> = (0..6)
            .map(|i| pt(4.0 * i as f64, 2.0 + 0.0027 * 4.0 * i as f64))
            .collect();
        let s = linear_slope(&pts, (0.0, 20.0)).unwrap();
        assert!((s.slope - 2.7).abs() < 1e-9);
        assert!(s.stderr < 1e-9);
        assert_eq!(s.n, 6);
        assert!(linear_slope(&pts, (0.5, 3.0)).is_err());
    }

    #[test]
    fn theory_alignment() {
        let theory = vec![(0.0, 1.57), (50.0, 1.62), (100.0, 1.65)];
        let aligned = align_theory(&theory, 1.68).unwrap();
        for (a, t) in aligned.iter().zip(&theory) {
            assert!((a.1 - t.1 - 0.11).abs() < 1e-12);
            assert_eq!(a.0, t.0);
        }
        assert_eq!(align_theory(&theory, 1.57).unwrap(), theory);
        assert!(align_theory(&theory[1..], 1.68).is_err());
    }

    fn trace(eg: impl Fn(f64, f64) -> f64) -> LevelTrace {
        let p: Vec<f64> = (0..10).map(|i| 20.0 * i as f64).collect();
        let vbm: Vec<f64> = p.iter().map(|p| 0.3 + 0.004 * p).collect();
        let eu: Vec<f64> = p
            .iter()
            .zip(&vbm)
            .map(|(p, v)| v + 0.2 - 0.001 * p)
            .collect();
        let egv: Vec<f64> = p.iter().zip(&vbm).map(|(p, v)| eg(*p, *v)).collect();
        LevelTrace::new(Species::SiV, p, eu, egv, vbm, None).unwrap()
    }

    #[test]
    fn vbm_shift_synthetic_slope() {
        let t = trace(|p, v| v + 0.5 + 0.002 * p);
        for (p, d) in vbm_referenced_shift(&t, Level::Eg).unwrap() {
            assert!((d - 0.002 * p).abs() < 1e-12);
        }
        let common = trace(|_, v| v + 0.5);
        assert!(vbm_referenced_shift(&common, Level::Eg)
            .unwrap()
            .iter()
            .all(|(_, d)| d.abs() < 1e-15));
        assert!(matches!(
            vbm_referenced_shift(&t, Level::Cbm),
            Err(Error::MissingLevel(_))
        ));
    }

    #[test]
    fn ks_gap_shift() {
        // gap = eg - eu grows by 3 meV/GPa: eu has -1 meV/GPa relative, so eg +2
        let t = trace(|p, v| v + 0.5 + 0.002 * p);
        let s = ks_zpl_shift(&t);
        assert_eq!(s[0], (0.0, 0.0));
        for (p, d) in &s {
            assert!((d - 0.003 * p).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_validation() {
        let bad = LevelTrace::new(
            Species::GeV,
            vec![1.0, 2.0],
            vec![0.0; 2],
            vec![0.0; 2],
            vec![0.0; 2],
            None,
        );
        assert!(bad.is_err());
        let ragged = LevelTrace::new(
            Species::GeV,
            vec![0.0, 2.0],
            vec![0.0; 2],
            vec![0.0; 3],
            vec![0.0; 2],
            None,
        );
        assert!(ragged.is_err());
    }
}
