use std::collections::BTreeMap;

use super::{fmt_f64, parse_f64, split_csv_header, split_fields};
use crate::spectra::{AxisUnit, Spectrum};
use crate::{Error, Result};

/// Parses the spectrum CSV: `# key=value` metadata (mandatory `axis_unit`),
/// an optional `axis,intensity` header and two numeric columns.
pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let (meta, rows) = split_csv_header(text);
    let mut map = BTreeMap::new();
    for (k, v) in meta {
        map.insert(k, v);
    }
    let unit: AxisUnit = map
        .remove("axis_unit")
        .ok_or_else(|| Error::parse(1, "missing '# axis_unit=' header"))?
        .parse()
        .map_err(|e: Error| Error::parse(1, e.to_string()))?;
    let mut axis = Vec::with_capacity(rows.len());
    let mut intensity = Vec::with_capacity(rows.len());
    for (idx, (lineno, line)) in rows.iter().enumerate() {
        let fields = split_fields(line);
        if idx == 0
            && fields
                .first()
                .is_some_and(|f| f.eq_ignore_ascii_case("axis"))
        {
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::parse(
                *lineno,
                format!("expected 2 columns, got {}", fields.len()),
            ));
        }
        axis.push(parse_f64(fields[0], *lineno)?);
        intensity.push(parse_f64(fields[1], *lineno)?);
    }
    if axis.is_empty() {
        return Err(Error::parse(1, "no data rows"));
    }
    Spectrum::with_meta(unit, axis, intensity, map).map_err(|e| Error::parse(0, e.to_string()))
}

pub fn spectrum_to_string(s: &Spectrum) -> String {
    let mut out = format!("# axis_unit={}\n", s.axis_unit());
    for (k, v) in s.meta() {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str("axis,intensity\n");
    for (x, y) in s.points() {
        out.push_str(&fmt_f64(x));
        out.push(',');
        out.push_str(&fmt_f64(y));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_minimal_file() {
        let mut text = String::from(
            "# axis_unit=nanometer\n# sample=cluster-3\n# pressure_gpa=40\naxis,intensity\n",
        );
        for i in 0..10 {
            text.push_str(&format!("{}, {}\n", 700 + i, i * i));
        }
        let s = parse_spectrum(&text).unwrap();
        assert_eq!(s.axis_unit(), AxisUnit::Nanometer);
        assert_eq!(s.len(), 10);
        assert_eq!(s.meta().get("sample").unwrap(), "cluster-3");
        assert_eq!(s.nominal_pressure(), Some(40.0));
        assert!(!s.meta().contains_key("axis_unit"));
    }

    #[test]
    fn diagnostics() {
        assert!(matches!(parse_spectrum(""), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_spectrum("1,2\n3,4\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_spectrum("# axis_unit=electronvolt\n1,2,3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_spectrum("# axis_unit=electronvolt\n1,x\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            start in -1e3f64..1e3,
            steps in prop::collection::vec(1e-9f64..10.0, 8..40),
            seed in prop::collection::vec(-1e6f64..1e6, 40),
        ) {
            let mut axis = vec![start];
            for s in &steps[1..] {
                axis.push(axis.last().unwrap() + s);
            }
            let y: Vec<f64> = seed[..axis.len()].to_vec();
            let mut s = Spectrum::new(AxisUnit::Electronvolt, axis, y).unwrap();
            s.set_meta("seed", "7");
            let back = parse_spectrum(&spectrum_to_string(&s)).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
