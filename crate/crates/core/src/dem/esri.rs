use std::fmt::Write as _;

use super::{quantize_with, Dem, Quantization};
use crate::error::{Location, ParseError, Result};

/// Georeferencing header of an ESRI ASCII grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EsriHeader {
    pub ncols: usize,
    pub nrows: usize,
    pub xll: f64,
    pub yll: f64,
    /// True for `xllcenter`/`yllcenter`, false for the `*corner` keys.
    pub center: bool,
    pub cellsize: f64,
    pub nodata: Option<f64>,
}

impl Default for EsriHeader {
    fn default() -> Self {
        EsriHeader {
            ncols: 0,
            nrows: 0,
            xll: 0.0,
            yll: 0.0,
            center: false,
            cellsize: 1.0,
            nodata: Some(-9999.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsriGrid {
    pub header: EsriHeader,
    pub dem: Dem,
}

pub fn parse_esri_ascii(text: &str, quantization: &Quantization) -> Result<Dem> {
    read_esri_ascii(text, quantization).map(|g| g.dem)
}

pub fn read_esri_ascii(text: &str, quantization: &Quantization) -> Result<EsriGrid> {
    let mut ncols = None;
    let mut nrows = None;
    let mut xll = None;
    let mut yll = None;
    let mut center = None;
    let mut cellsize = None;
    let mut nodata = None;

    let lines: Vec<&str> = text.lines().collect();
    let mut data_start = lines.len();
    for (i, line) in lines.iter().enumerate() {
        let at = Location {
            line: i + 1,
            column: 0,
        };
        let mut tokens = line.split_whitespace();
        let Some(key) = tokens.next() else { continue };
        if key.parse::<f64>().is_ok() {
            data_start = i;
            break;
        }
        let value = tokens.next().ok_or_else(|| ParseError::MalformedHeader {
            at,
            reason: format!("key {key:?} has no value"),
        })?;
        if tokens.next().is_some() {
            return Err(ParseError::MalformedHeader {
                at,
                reason: format!("trailing tokens after {key:?}"),
            }
            .into());
        }
        let number = |v: &str| {
            v.parse::<f64>().map_err(|_| ParseError::MalformedHeader {
                at,
                reason: format!("value {v:?} of {key:?} is not a number"),
            })
        };
        let count = |v: &str| {
            v.parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| ParseError::MalformedHeader {
                    at,
                    reason: format!("value {v:?} of {key:?} is not a positive integer"),
                })
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => ncols = Some(count(value)?),
            "nrows" => nrows = Some(count(value)?),
            k @ ("xllcorner" | "xllcenter") => {
                xll = Some(number(value)?);
                center = Some(k.ends_with("center"));
            }
            "yllcorner" | "yllcenter" => yll = Some(number(value)?),
            "cellsize" => cellsize = Some(number(value)?),
            "nodata_value" => nodata = Some(number(value)?),
            other => {
                return Err(ParseError::MalformedHeader {
                    at,
                    reason: format!("unknown key {other:?}"),
                }
                .into())
            }
        }
    }

    let missing = |what: &str| ParseError::MalformedHeader {
        at: Location {
            line: data_start.min(lines.len()) + 1,
            column: 0,
        },
        reason: format!("missing {what}"),
    };
    let header = EsriHeader {
        ncols: ncols.ok_or_else(|| missing("ncols"))?,
        nrows: nrows.ok_or_else(|| missing("nrows"))?,
        xll: xll.ok_or_else(|| missing("xllcorner"))?,
        yll: yll.ok_or_else(|| missing("yllcorner"))?,
        center: center.unwrap_or(false),
        cellsize: cellsize.ok_or_else(|| missing("cellsize"))?,
        nodata,
    };

    let expected = header.ncols * header.nrows;
    let mut raw = Vec::with_capacity(expected);
    let mut last = Location {
        line: data_start + 1,
        column: 0,
    };
    for (i, line) in lines.iter().enumerate().skip(data_start) {
        for (col, token) in tokens_with_columns(line) {
            let at = Location {
                line: i + 1,
                column: col,
            };
            if raw.len() == expected {
                return Err(ParseError::WrongCellCount {
                    at,
                    expected,
                    found: expected + 1,
                }
                .into());
            }
            let z: f64 = token.parse().map_err(|_| ParseError::NonNumeric {
                at,
                token: token.to_string(),
            })?;
            let masked = !z.is_finite() || header.nodata == Some(z);
            raw.push((!masked).then_some(z));
        }
        last.line = i + 1;
    }
    if raw.len() != expected {
        return Err(ParseError::WrongCellCount {
            at: last,
            expected,
            found: raw.len(),
        }
        .into());
    }
    if raw.iter().all(Option::is_none) {
        return Err(ParseError::AllNodata.into());
    }
    let dem = quantize_with(header.ncols, header.nrows, &raw, quantization)?;
    Ok(EsriGrid { header, dem })
}

fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return None;
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let token = &trimmed[..end];
        let col = line[..offset].chars().count() + 1;
        offset += end;
        rest = &trimmed[end..];
        Some((col, token))
    })
}

/// Serializes a model as an ESRI ASCII grid with integer cells. Absent
/// cells are written as the header's NODATA value (default -9999).
pub fn write_esri_ascii(dem: &Dem, header: Option<&EsriHeader>) -> String {
    let default = EsriHeader::default();
    let h = header.unwrap_or(&default);
    let nodata = h.nodata.unwrap_or(-9999.0);
    let corner = if h.center { "center" } else { "corner" };
    let mut out = String::new();
    let _ = writeln!(out, "ncols {}", dem.width());
    let _ = writeln!(out, "nrows {}", dem.height());
    let _ = writeln!(out, "xll{corner} {}", h.xll);
    let _ = writeln!(out, "yll{corner} {}", h.yll);
    let _ = writeln!(out, "cellsize {}", h.cellsize);
    let _ = writeln!(out, "NODATA_value {nodata}");
    for row in dem.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Some(v) => v.to_string(),
                None => nodata.to_string(),
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    const HEADER: &str = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 30\n";

    fn parse(text: &str) -> Result<Dem> {
        parse_esri_ascii(text, &Quantization::default())
    }

    #[test]
    fn parses_small_grid() {
        let dem = parse(&format!("{HEADER}1 2\n3 4\n")).unwrap();
        assert_eq!(dem.cell_count(), 4);
        assert_eq!(dem.volume(), 10);
        assert_eq!(dem.get(0, 1), Some(3));
    }

    #[test]
    fn nodata_cells_leave_the_domain() {
        let text = format!("{HEADER}NODATA_value -9999\n1 -9999\n3 4\n");
        let dem = parse(&text).unwrap();
        assert_eq!(dem.cell_count(), 3);
        assert_eq!(dem.get(1, 0), None);
    }

    #[test]
    fn quantization_is_applied() {
        let text = format!("{HEADER}10.0 0.5\n-3 1e1\n");
        let dem = parse_esri_ascii(&text, &Quantization::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(dem.rows(), vec![vec![Some(11), Some(1)], vec![Some(1), Some(11)]]);
    }

    #[test]
    fn missing_nrows_is_a_header_error() {
        let text = "ncols 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n";
        match parse(text) {
            Err(Error::Parse(ParseError::MalformedHeader { reason, .. })) => {
                assert!(reason.contains("nrows"), "{reason}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_count_and_bad_tokens_are_located() {
        let short = parse(&format!("{HEADER}1 2\n3\n"));
        assert_eq!(
            short,
            Err(Error::Parse(ParseError::WrongCellCount {
                at: Location { line: 7, column: 0 },
                expected: 4,
                found: 3
            }))
        );
        let long = parse(&format!("{HEADER}1 2\n3 4 5\n"));
        assert!(matches!(
            long,
            Err(Error::Parse(ParseError::WrongCellCount {
                at: Location { line: 7, column: 5 },
                ..
            }))
        ));
        let bad = parse(&format!("{HEADER}1 2\n3  x4\n"));
        assert_eq!(
            bad,
            Err(Error::Parse(ParseError::NonNumeric {
                at: Location { line: 7, column: 4 },
                token: "x4".into()
            }))
        );
    }

    #[test]
    fn all_nodata_is_rejected() {
        let text = format!("{HEADER}NODATA_value 0\n0 0\n0 0\n");
        assert_eq!(parse(&text), Err(Error::Parse(ParseError::AllNodata)));
    }

    #[test]
    fn header_values_must_be_well_formed() {
        assert!(parse("ncols two\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n").is_err());
        assert!(parse("ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize\n1\n").is_err());
        assert!(parse("ncols 1\nnrows 1\nbogus 3\nxllcorner 0\nyllcorner 0\ncellsize 1\n1\n").is_err());
    }

    #[test]
    fn writer_round_trips() {
        let dem = Dem::from_rows(&[vec![Some(7), None], vec![Some(1), Some(300)]]).unwrap();
        let text = write_esri_ascii(&dem, None);
        assert_eq!(parse(&text).unwrap(), dem);
    }
}
