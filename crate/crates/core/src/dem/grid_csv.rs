//! Plain CSV grids: one line per row, empty fields outside the domain,
//! `#` comment lines ignored.

use super::{quantize_with, Dem, Quantization};
use crate::error::{Location, ParseError, Result};

pub fn parse_grid_csv(text: &str, quantization: &Quantization) -> Result<Dem> {
    let mut raw = Vec::new();
    let mut width = None;
    let mut height = 0;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut column = 1;
        let mut fields = 0;
        for field in line.split(',') {
            let at = Location {
                line: i + 1,
                column,
            };
            column += field.chars().count() + 1;
            fields += 1;
            let token = field.trim();
            if token.is_empty() {
                raw.push(None);
                continue;
            }
            let z: f64 = token.parse().map_err(|_| ParseError::NonNumeric {
                at,
                token: token.to_string(),
            })?;
            raw.push(z.is_finite().then_some(z));
        }
        match width {
            None => width = Some(fields),
            Some(w) if w != fields => {
                return Err(ParseError::WrongCellCount {
                    at: Location {
                        line: i + 1,
                        column: 0,
                    },
                    expected: w,
                    found: fields,
                }
                .into())
            }
            _ => {}
        }
        height += 1;
    }
    if raw.iter().all(Option::is_none) {
        return Err(ParseError::AllNodata.into());
    }
    quantize_with(width.unwrap_or(0), height, &raw, quantization)
}

/// Absent cells are empty fields, except in single-column grids where an
/// empty line would be skipped on reading; those are written as `nan`.
pub fn write_grid_csv(dem: &Dem) -> String {
    let absent = if dem.width() == 1 { "nan" } else { "" };
    let mut out = String::new();
    for row in dem.rows() {
        let fields: Vec<String> = row
            .iter()
            .map(|c| c.map_or_else(|| absent.to_string(), |v| v.to_string()))
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn empty_fields_are_masked() {
        let dem = parse_grid_csv("# fixture\n2,5,,2\n1,1,1,\n", &Quantization::default()).unwrap();
        assert_eq!(dem.width(), 4);
        assert_eq!(dem.height(), 2);
        assert_eq!(dem.cell_count(), 6);
        assert_eq!(dem.get(2, 0), None);
        assert_eq!(write_grid_csv(&dem), "2,5,,2\n1,1,1,\n");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = parse_grid_csv("1,2\n3\n", &Quantization::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse(ParseError::WrongCellCount { expected: 2, found: 1, .. })
        ));
    }

    #[test]
    fn bad_numbers_are_located() {
        let err = parse_grid_csv("1,2\n3,abc\n", &Quantization::default()).unwrap_err();
        assert_eq!(
            err,
            Error::Parse(ParseError::NonNumeric {
                at: Location { line: 2, column: 3 },
                token: "abc".into()
            })
        );
        assert_eq!(
            parse_grid_csv(",\n,\n", &Quantization::default()),
            Err(Error::Parse(ParseError::AllNodata))
        );
    }
}
