use super::{fmt_f64, parse_f64, split_csv_header, split_fields, KvDocument};
use crate::calib::{CalibrationPoint, GaugeCalibration, LevelTrace, Species};
use crate::{Error, Result};

const POINT_HEADER: &str = "P_gpa, P_sigma, E_ev, E_sigma";

fn point_row(p: &CalibrationPoint) -> String {
    format!(
        "{}, {}, {}, {}\n",
        fmt_f64(p.pressure),
        fmt_f64(p.pressure_sigma),
        fmt_f64(p.energy),
        fmt_f64(p.energy_sigma)
    )
}

fn parse_point(fields: &[&str], lineno: usize) -> Result<CalibrationPoint> {
    if fields.len() != 4 {
        return Err(Error::parse(
            lineno,
            format!("expected 4 columns, got {}", fields.len()),
        ));
    }
    CalibrationPoint::new(
        parse_f64(fields[0], lineno)?,
        parse_f64(fields[1], lineno)?,
        parse_f64(fields[2], lineno)?,
        parse_f64(fields[3], lineno)?,
    )
    .map_err(|e| Error::parse(lineno, e.to_string()))
}

/// Calibration document: header keys, the column line, then one row per
/// point. Masked points are listed too so that re-reading rebuilds the
/// identical calibration.
pub fn calibration_to_string(cal: &GaugeCalibration) -> String {
    let mut doc = KvDocument::new();
    doc.insert("species", cal.species().as_str());
    doc.insert("zpl0_ev", fmt_f64(cal.zpl0()));
    doc.insert("zpl0_at_lowest_node", cal.zpl0_at_lowest_node().to_string());
    let (lo, hi) = cal.range();
    doc.insert("range_gpa", format!("{}, {}", fmt_f64(lo), fmt_f64(hi)));
    if let Some(m) = cal.mask_below() {
        doc.insert("mask_below_gpa", fmt_f64(m));
    }
    let mut out = String::from("# dacspec ZPL calibration\n");
    out.push_str(&doc.to_text());
    out.push_str(POINT_HEADER);
    out.push('\n');
    let mut all: Vec<_> = cal.excluded().iter().chain(cal.points()).copied().collect();
    all.sort_by(|a, b| a.pressure.total_cmp(&b.pressure));
    for p in &all {
        out.push_str(&point_row(p));
    }
    out
}

pub fn parse_calibration(text: &str) -> Result<GaugeCalibration> {
    let mut doc = KvDocument::new();
    let mut points = Vec::new();
    let mut in_table = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !in_table {
            if line.to_ascii_lowercase().starts_with("p_gpa") {
                in_table = true;
            } else {
                doc.push_line(line, i + 1)?;
            }
            continue;
        }
        points.push(parse_point(&split_fields(line), i + 1)?);
    }
    if !in_table {
        return Err(Error::parse(0, format!("missing '{POINT_HEADER}' table")));
    }
    let species: Species = doc.require_parsed("species")?;
    let mask: Option<f64> = doc.parsed("mask_below_gpa")?;
    let cal = GaugeCalibration::build_masked(species, &points, mask)?;
    if let Some(stated) = doc.parsed::<f64>("zpl0_ev")? {
        if stated.to_bits() != cal.zpl0().to_bits() {
            return Err(Error::parse(
                0,
                format!("zpl0_ev {stated} disagrees with the table ({})", cal.zpl0()),
            ));
        }
    }
    Ok(cal)
}

/// Raw calibration measurements, before any curve is built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub species: Option<Species>,
    pub points: Vec<CalibrationPoint>,
}

/// CSV with columns `p_gpa, p_sigma_gpa, e_ev, e_sigma_ev` and an optional
/// `# species=` line.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let (meta, rows) = split_csv_header(text);
    let species = meta
        .iter()
        .find(|(k, _)| k == "species")
        .map(|(_, v)| v.parse::<Species>())
        .transpose()?;
    let mut points = Vec::new();
    for (idx, (lineno, line)) in rows.iter().enumerate() {
        let fields = split_fields(line);
        if idx == 0 && fields[0].parse::<f64>().is_err() {
            continue;
        }
        points.push(parse_point(&fields, *lineno)?);
    }
    if points.is_empty() {
        return Err(Error::parse(1, "dataset has no rows"));
    }
    Ok(Dataset { species, points })
}

pub fn dataset_to_string(d: &Dataset) -> String {
    let mut out = String::new();
    if let Some(s) = d.species {
        out.push_str(&format!("# species={s}\n"));
    }
    out.push_str("p_gpa, p_sigma_gpa, e_ev, e_sigma_ev\n");
    for p in &d.points {
        out.push_str(&point_row(p));
    }
    out
}

/// Tabulated theoretical `E_ZPL(P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryCurve {
    pub species: Species,
    pub points: Vec<(f64, f64)>,
}

pub fn parse_theory(text: &str) -> Result<TheoryCurve> {
    let (meta, rows) = split_csv_header(text);
    let species: Species = meta
        .iter()
        .find(|(k, _)| k == "species")
        .ok_or_else(|| Error::parse(1, "missing '# species=' line"))?
        .1
        .parse()?;
    let mut points = Vec::new();
    for (idx, (lineno, line)) in rows.iter().enumerate() {
        let fields = split_fields(line);
        if idx == 0 && fields[0].parse::<f64>().is_err() {
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::parse(*lineno, "expected 'p_gpa, e_ev'"));
        }
        points.push((
            parse_f64(fields[0], *lineno)?,
            parse_f64(fields[1], *lineno)?,
        ));
    }
    if points.is_empty() {
        return Err(Error::parse(1, "theory table has no rows"));
    }
    Ok(TheoryCurve { species, points })
}

pub fn theory_to_string(t: &TheoryCurve) -> String {
    let mut out = format!("# species={}\np_gpa, e_ev\n", t.species);
    for (p, e) in &t.points {
        out.push_str(&format!("{}, {}\n", fmt_f64(*p), fmt_f64(*e)));
    }
    out
}

/// Level-trace CSV: `p_gpa, eps_eu_ev, eps_eg_ev, eps_vbm_ev[, eps_cbm_ev]`.
pub fn parse_level_trace(text: &str) -> Result<LevelTrace> {
    let (meta, rows) = split_csv_header(text);
    let species: Species = meta
        .iter()
        .find(|(k, _)| k == "species")
        .ok_or_else(|| Error::parse(1, "missing '# species=' line"))?
        .1
        .parse()?;
    let (header_line, header) = rows
        .first()
        .ok_or_else(|| Error::parse(1, "empty level trace"))?;
    let columns = split_fields(header);
    let expected = ["p_gpa", "eps_eu_ev", "eps_eg_ev", "eps_vbm_ev"];
    if columns.len() < 4
        || columns[..4] != expected
        || columns.len() > 5
        || (columns.len() == 5 && columns[4] != "eps_cbm_ev")
    {
        return Err(Error::parse(
            *header_line,
            format!("unexpected header '{header}'"),
        ));
    }
    let with_cbm = columns.len() == 5;
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    for (lineno, line) in &rows[1..] {
        let fields = split_fields(line);
        if fields.len() != columns.len() {
            return Err(Error::parse(
                *lineno,
                format!("expected {} columns", columns.len()),
            ));
        }
        for (c, f) in cols.iter_mut().zip(&fields) {
            c.push(parse_f64(f, *lineno)?);
        }
    }
    let cbm = if with_cbm { cols.pop() } else { None };
    let vbm = cols.pop().expect("four columns");
    let eg = cols.pop().expect("four columns");
    let eu = cols.pop().expect("four columns");
    let p = cols.pop().expect("four columns");
    LevelTrace::new(species, p, eu, eg, vbm, cbm)
}

pub fn level_trace_to_string(t: &LevelTrace) -> String {
    let mut out = format!(
        "# species={}\np_gpa, eps_eu_ev, eps_eg_ev, eps_vbm_ev",
        t.species
    );
    if t.eps_cbm().is_some() {
        out.push_str(", eps_cbm_ev");
    }
    out.push('\n');
    for i in 0..t.pressure().len() {
        let mut row = vec![
            fmt_f64(t.pressure()[i]),
            fmt_f64(t.eps_eu()[i]),
            fmt_f64(t.eps_eg()[i]),
            fmt_f64(t.eps_vbm()[i]),
        ];
        if let Some(c) = t.eps_cbm() {
            row.push(fmt_f64(c[i]));
        }
        out.push_str(&row.join(", "));
        out.push('\n');
    }
    out
}
