use std::path::{Path, PathBuf};

use super::{fmt_f64, KvDocument};
use crate::eos::EosParams;
use crate::gauges::{
    GaugeId, PressureEstimate, RamanScale, RubyScale, ScaleCoefficients, SourceFeature,
};
use crate::{Error, Result};

pub fn parse_eos_params(text: &str) -> Result<EosParams> {
    let doc = KvDocument::parse(text)?;
    EosParams::new(
        doc.require_parsed("a0_angstrom")?,
        doc.require_parsed("b0_gpa")?,
        doc.require_parsed("b0_prime")?,
        doc.get("label").unwrap_or("custom"),
    )
}

pub fn eos_params_to_string(p: &EosParams) -> String {
    let mut doc = KvDocument::new();
    doc.insert("label", p.label.clone());
    doc.insert("a0_angstrom", fmt_f64(p.a0));
    doc.insert("b0_gpa", fmt_f64(p.b0));
    doc.insert("b0_prime", fmt_f64(p.b0_prime));
    doc.to_text()
}

pub fn parse_scale_coefficients(text: &str) -> Result<ScaleCoefficients> {
    let doc = KvDocument::parse(text)?;
    let c = ScaleCoefficients {
        ruby: RubyScale {
            lambda0: doc.require_parsed("ruby.lambda0_nm")?,
            a: doc.require_parsed("ruby.A_gpa")?,
            b: doc.require_parsed("ruby.B")?,
        },
        raman: RamanScale {
            nu0: doc.require_parsed("raman.nu0_cm1")?,
            k0: doc.require_parsed("raman.K0_gpa")?,
            k0_prime: doc.require_parsed("raman.K0_prime")?,
        },
    };
    c.validate()?;
    Ok(c)
}

pub fn scale_coefficients_to_string(c: &ScaleCoefficients) -> String {
    let mut doc = KvDocument::new();
    doc.insert("ruby.lambda0_nm", fmt_f64(c.ruby.lambda0));
    doc.insert("ruby.A_gpa", fmt_f64(c.ruby.a));
    doc.insert("ruby.B", fmt_f64(c.ruby.b));
    doc.insert("raman.nu0_cm1", fmt_f64(c.raman.nu0));
    doc.insert("raman.K0_gpa", fmt_f64(c.raman.k0));
    doc.insert("raman.K0_prime", fmt_f64(c.raman.k0_prime));
    doc.to_text()
}

pub fn pressure_to_string(p: &PressureEstimate) -> String {
    let mut doc = KvDocument::new();
    doc.insert("gauge", p.gauge.as_str());
    doc.insert("pressure_gpa", fmt_f64(p.value));
    doc.insert("sigma_gpa", fmt_f64(p.sigma));
    doc.insert("source_unit", p.source.unit());
    doc.insert("source_value", fmt_f64(p.source.value()));
    doc.to_text()
}

pub fn parse_pressure(text: &str) -> Result<PressureEstimate> {
    let doc = KvDocument::parse(text)?;
    let value: f64 = doc.require_parsed("source_value")?;
    let source = match doc.require("source_unit")? {
        "nm" => SourceFeature::WavelengthNm(value),
        "cm-1" => SourceFeature::WavenumberCm1(value),
        "eV" => SourceFeature::EnergyEv(value),
        "inputs" => SourceFeature::Combined {
            n_inputs: value as usize,
        },
        other => return Err(Error::parse(0, format!("unknown source_unit '{other}'"))),
    };
    Ok(PressureEstimate {
        value: doc.require_parsed("pressure_gpa")?,
        sigma: doc.require_parsed("sigma_gpa")?,
        gauge: doc.require_parsed::<GaugeId>("gauge")?,
        source,
    })
}

/// Batch run configuration. Relative paths resolve against the directory
/// of the configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scale_coefficients_path: Option<PathBuf>,
    pub eos_params_path: Option<PathBuf>,
    pub calibration_paths: Vec<PathBuf>,
    pub output_dir: PathBuf,
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scale_coefficients_path: None,
            eos_params_path: None,
            calibration_paths: Vec::new(),
            output_dir: PathBuf::from("."),
            parallelism: 1,
        }
    }
}

impl RunConfig {
    /// Reads a configuration file and checks that every referenced file
    /// exists and parses.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = super::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let cfg = parse_run_config(&text, base)?;
        cfg.scale_coefficients()?;
        cfg.eos_params()?;
        cfg.calibrations()?;
        Ok(cfg)
    }

    pub fn scale_coefficients(&self) -> Result<ScaleCoefficients> {
        match &self.scale_coefficients_path {
            Some(p) => parse_scale_coefficients(&super::read_to_string(p)?),
            None => Ok(ScaleCoefficients::default()),
        }
    }

    pub fn eos_params(&self) -> Result<EosParams> {
        match &self.eos_params_path {
            Some(p) => parse_eos_params(&super::read_to_string(p)?),
            None => Ok(EosParams::experiment()),
        }
    }

    pub fn calibrations(&self) -> Result<Vec<crate::calib::GaugeCalibration>> {
        self.calibration_paths
            .iter()
            .map(|p| super::parse_calibration(&super::read_to_string(p)?))
            .collect()
    }
}

pub fn parse_run_config(text: &str, base: &Path) -> Result<RunConfig> {
    let doc = KvDocument::parse(text)?;
    let resolve = |s: &str| {
        let p = PathBuf::from(s.trim());
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };
    let parallelism = doc.parsed::<usize>("parallelism")?.unwrap_or(1);
    if parallelism == 0 {
        return Err(Error::parse(0, "parallelism must be at least 1"));
    }
    Ok(RunConfig {
        scale_coefficients_path: doc.get("scale_coefficients_path").map(resolve),
        eos_params_path: doc.get("eos_params_path").map(resolve),
        calibration_paths: doc
            .get("calibration_paths")
            .map(|v| {
                v.split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(resolve)
                    .collect()
            })
            .unwrap_or_default(),
        output_dir: doc
            .get("output_dir")
            .map(resolve)
            .unwrap_or_else(|| base.to_path_buf()),
        parallelism,
    })
}

pub fn run_config_to_string(cfg: &RunConfig) -> String {
    let mut doc = KvDocument::new();
    if let Some(p) = &cfg.scale_coefficients_path {
        doc.insert("scale_coefficients_path", p.display().to_string());
    }
    if let Some(p) = &cfg.eos_params_path {
        doc.insert("eos_params_path", p.display().to_string());
    }
    if !cfg.calibration_paths.is_empty() {
        let joined: Vec<String> = cfg
            .calibration_paths
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        doc.insert("calibration_paths", joined.join(", "));
    }
    doc.insert("output_dir", cfg.output_dir.display().to_string());
    doc.insert("parallelism", cfg.parallelism.to_string());
    doc.to_text()
}
