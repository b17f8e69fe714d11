//! Plot-ready tables for the pressure-series figures, with a minimal SVG
//! rendering of the same series.

use crate::calib::{
    align_theory, ks_zpl_shift, vbm_referenced_shift, GaugeCalibration, Level, LevelTrace, Species,
};
use crate::eos::{lattice_ratio_from_pressure, EosParams};
use crate::interp::MonotoneCubic;
use crate::io::{fmt_f64, TheoryCurve};
use crate::peakfit::FitResult;
use crate::spectra::Spectrum;
use crate::{Error, Result};

/// A named (x, y) series; `None` marks a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, Option<f64>)>,
}

/// Columns sharing one x axis, plus labels for rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotTable {
    pub title: String,
    pub x_name: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub columns: Vec<(String, Vec<Option<f64>>)>,
}

impl PlotTable {
    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.x_name.clone();
        for (name, _) in &self.columns {
            out.push_str(", ");
            out.push_str(name);
        }
        out.push('\n');
        for (i, x) in self.x.iter().enumerate() {
            out.push_str(&fmt_f64(*x));
            for (_, col) in &self.columns {
                out.push_str(", ");
                if let Some(v) = col[i] {
                    out.push_str(&fmt_f64(v));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn series(&self) -> Vec<Series> {
        self.columns
            .iter()
            .map(|(name, col)| Series {
                name: name.clone(),
                points: self.x.iter().copied().zip(col.iter().copied()).collect(),
            })
            .collect()
    }
}

/// Step of the pressure grid used by the pressure-axis exports, GPa.
pub const PRESSURE_STEP: f64 = 1.0;

fn pressure_grid(hi: f64) -> Vec<f64> {
    let n = (hi / PRESSURE_STEP).floor() as usize;
    (0..=n).map(|i| i as f64 * PRESSURE_STEP).collect()
}

/// ZPL energy against pressure for measured calibrations and aligned theory
/// curves, with the lattice ratio column computed through the EOS.
///
/// Calibration columns are blank outside their pressure range. Each theory
/// curve is shifted onto its species' published zero-pressure energy
/// ([`Species::experimental_zpl0`]) and interpolated between its tabulated
/// nodes.
pub fn fig3_table(
    calibrations: &[GaugeCalibration],
    theory: &[TheoryCurve],
    eos: &EosParams,
) -> Result<PlotTable> {
    let hi = calibrations
        .iter()
        .map(|c| c.range().1)
        .chain(theory.iter().filter_map(|t| t.points.last().map(|p| p.0)))
        .fold(0.0, f64::max);
    if hi <= 0.0 {
        return Err(Error::InvalidInput(
            "fig3 export needs at least one calibration or theory curve".into(),
        ));
    }
    let x = pressure_grid(hi);
    let mut columns = vec![(
        "x".to_string(),
        x.iter()
            .map(|&p| lattice_ratio_from_pressure(p, eos).ok())
            .collect::<Vec<_>>(),
    )];
    for species in Species::ALL {
        let col = match calibrations.iter().find(|c| c.species() == species) {
            Some(cal) => x.iter().map(|&p| cal.eval(p).ok()).collect(),
            None if species == Species::SnV => continue,
            None => vec![None; x.len()],
        };
        columns.push((format!("E_{}", species.as_str()), col));
    }
    for species in Species::ALL {
        let col = match theory.iter().find(|t| t.species == species) {
            Some(curve) => {
                let aligned = align_theory(&curve.points, species.experimental_zpl0())?;
                let (px, py): (Vec<f64>, Vec<f64>) = aligned.into_iter().unzip();
                let spline = MonotoneCubic::new(px, py)?;
                let (lo, hi) = spline.domain();
                x.iter()
                    .map(|&p| (lo..=hi).contains(&p).then(|| spline.eval(p)))
                    .collect()
            }
            None => vec![None; x.len()],
        };
        columns.push((format!("E_theory_{}", species.as_str()), col));
    }
    Ok(PlotTable {
        title: "ZPL energy vs pressure".into(),
        x_name: "P".into(),
        y_label: "E (eV)".into(),
        x,
        columns,
    })
}

/// Relative Kohn-Sham shifts per species: the ZPL proxy and the e_u, e_g
/// (and CBM, when traced) levels referenced to the VBM.
///
/// Traces are merged on the union of their pressure nodes; a column is
/// blank where its trace has no node.
pub fn fig4_table(traces: &[LevelTrace]) -> Result<PlotTable> {
    if traces.is_empty() {
        return Err(Error::InvalidInput(
            "fig4 export needs at least one level trace".into(),
        ));
    }
    let mut x: Vec<f64> = traces
        .iter()
        .flat_map(|t| t.pressure().iter().copied())
        .collect();
    x.sort_by(f64::total_cmp);
    x.dedup();
    let place = |series: &[(f64, f64)]| -> Vec<Option<f64>> {
        x.iter()
            .map(|p| series.iter().find(|(q, _)| q == p).map(|(_, v)| *v))
            .collect()
    };
    let mut columns = Vec::new();
    for t in traces {
        let s = t.species.as_str();
        columns.push((format!("dE_ZPL_KS_{s}"), place(&ks_zpl_shift(t))));
        columns.push((
            format!("d_eu_{s}"),
            place(&vbm_referenced_shift(t, Level::Eu)?),
        ));
        columns.push((
            format!("d_eg_{s}"),
            place(&vbm_referenced_shift(t, Level::Eg)?),
        ));
        if t.eps_cbm().is_some() {
            columns.push((
                format!("d_cbm_{s}"),
                place(&vbm_referenced_shift(t, Level::Cbm)?),
            ));
        }
    }
    Ok(PlotTable {
        title: "Kohn-Sham level shifts vs pressure".into(),
        x_name: "P".into(),
        y_label: "shift (eV)".into(),
        x,
        columns,
    })
}

/// Default height of a normalised spectrum in the waterfall, in pressure
/// units.
pub const WATERFALL_HEIGHT_GPA: f64 = 8.0;

/// Long-format waterfall: every spectrum is normalised to unit peak height
/// above its minimum, scaled by `height`, and lifted by its pressure.
///
/// Columns: spectrum index, pressure offset, axis value, raw intensity,
/// plotted trace and (when a fit is given) plotted model.
pub fn waterfall_csv(stack: &[(Spectrum, Option<FitResult>)], height: f64) -> Result<String> {
    let mut out = String::from("spectrum, offset_gpa, axis, intensity, y_plot, fit_plot\n");
    for (i, rows) in waterfall_rows(stack, height)? {
        for row in rows {
            out.push_str(&format!(
                "{}, {}, {}, {}, {}, {}\n",
                i,
                fmt_f64(row.offset),
                fmt_f64(row.axis),
                fmt_f64(row.intensity),
                fmt_f64(row.y_plot),
                row.fit_plot.map(fmt_f64).unwrap_or_default()
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterfallRow {
    pub offset: f64,
    pub axis: f64,
    pub intensity: f64,
    pub y_plot: f64,
    pub fit_plot: Option<f64>,
}

/// Rows of the waterfall, grouped per spectrum in input order. Each spectrum
/// needs a `pressure_gpa` metadata entry.
pub fn waterfall_rows(
    stack: &[(Spectrum, Option<FitResult>)],
    height: f64,
) -> Result<Vec<(usize, Vec<WaterfallRow>)>> {
    if !(height.is_finite() && height > 0.0) {
        return Err(Error::InvalidInput(format!(
            "waterfall height must be positive, got {height}"
        )));
    }
    stack
        .iter()
        .enumerate()
        .map(|(i, (s, fit))| {
            let offset = s.nominal_pressure().ok_or_else(|| {
                Error::InvalidInput(format!("spectrum {i} has no pressure_gpa metadata"))
            })?;
            let lo = s.intensity().iter().copied().fold(f64::INFINITY, f64::min);
            let hi = s
                .intensity()
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let span = if hi > lo { hi - lo } else { 1.0 };
            let scale = |y: f64| offset + height * (y - lo) / span;
            let rows = s
                .points()
                .map(|(x, y)| WaterfallRow {
                    offset,
                    axis: x,
                    intensity: y,
                    y_plot: scale(y),
                    fit_plot: fit.as_ref().map(|f| scale(f.eval(x))),
                })
                .collect();
            Ok((i, rows))
        })
        .collect()
}

/// Waterfall traces as series, for rendering.
pub fn waterfall_series(
    stack: &[(Spectrum, Option<FitResult>)],
    height: f64,
) -> Result<Vec<Series>> {
    let mut out = Vec::new();
    for (i, rows) in waterfall_rows(stack, height)? {
        out.push(Series {
            name: format!("spectrum_{i}"),
            points: rows.iter().map(|r| (r.axis, Some(r.y_plot))).collect(),
        });
        if rows.iter().all(|r| r.fit_plot.is_some()) {
            out.push(Series {
                name: format!("fit_{i}"),
                points: rows.iter().map(|r| (r.axis, r.fit_plot)).collect(),
            });
        }
    }
    Ok(out)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Renders series as polylines on a 640x480 canvas with axis extents and a
/// legend. Gaps split a series into separate polylines.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h, m) = (640.0, 480.0, 60.0);
    let finite = series
        .iter()
        .flat_map(|s| s.points.iter().filter_map(|&(x, y)| y.map(|y| (x, y))))
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        (x0, x1) = (0.0, 1.0);
    }
    if !(y1 > y0) {
        (y0, y1) = (y0.min(0.0), y0.max(0.0) + 1.0);
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n\
         <rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w / 2.0,
        escape(title),
        w - 2.0 * m,
        h - 2.0 * m
    );
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        w / 2.0,
        h - 15.0,
        escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 {})\">{}</text>\n",
        h / 2.0,
        h / 2.0,
        escape(y_label)
    ));
    for (v, anchor, x, y) in [
        (x0, "start", m, h - m + 16.0),
        (x1, "end", w - m, h - m + 16.0),
        (y0, "end", m - 4.0, h - m),
        (y1, "end", m - 4.0, m + 10.0),
    ] {
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\" font-size=\"10\">{}</text>\n",
            format_tick(v)
        ));
    }
    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut run: Vec<String> = Vec::new();
        let flush = |run: &mut Vec<String>, out: &mut String| {
            if run.len() > 1 {
                out.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
                    run.join(" ")
                ));
            }
            run.clear();
        };
        for &(x, y) in &s.points {
            match y {
                Some(y) if x.is_finite() && y.is_finite() => {
                    run.push(format!("{:.2},{:.2}", sx(x), sy(y)))
                }
                _ => flush(&mut run, &mut out),
            }
        }
        flush(&mut run, &mut out);
        if series.len() <= 16 {
            let ly = m + 14.0 + 14.0 * k as f64;
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{ly}\" font-size=\"10\" fill=\"{colour}\">{}</text>\n",
                m + 8.0,
                escape(&s.name)
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

fn format_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
