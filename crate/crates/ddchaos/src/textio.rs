//! Text formats: complex-number literals, trace CSV parsing, and the CSV
//! builders used by the report writers. Parsers reject rather than guess and
//! never panic on malformed input.

use num_complex::Complex64;

use crate::error::{Error, Result};

fn bad_literal(s: &str, why: &str) -> Error {
    Error::parameter("complex_literal", format!("cannot parse {s:?}: {why}"))
}

fn parse_part(s: &str, whole: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| bad_literal(whole, "not a number"))?;
    if !v.is_finite() {
        return Err(bad_literal(whole, "components must be finite"));
    }
    Ok(v)
}

/// Parses literals like `1`, `-1.5`, `2i`, `-0.3i`, `i`, `-i`, `1+2i`,
/// `1.0e-3-2e1i`. No interior whitespace; the imaginary unit is a trailing
/// `i`.
pub fn parse_complex(input: &str) -> Result<Complex64> {
    let s = input.trim();
    if s.is_empty() {
        return Err(bad_literal(input, "empty"));
    }
    if !s.ends_with('i') {
        return Ok(Complex64::new(parse_part(s, s)?, 0.0));
    }
    let body = &s[..s.len() - 1];
    // the split sign starts the imaginary part: the last +/- that is neither
    // leading nor an exponent sign
    let split = body
        .bytes()
        .enumerate()
        .skip(1)
        .filter(|(k, b)| {
            matches!(b, b'+' | b'-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E')
        })
        .map(|(k, _)| k)
        .next_back();
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() {
        0.0
    } else {
        parse_part(re_str, s)?
    };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => parse_part(im_str, s)?,
    };
    Ok(Complex64::new(re, im))
}

/// Shortest-roundtrip text for a complex value: `a`, `bi`, or `a+bi`/`a-bi`.
/// `parse_complex` recovers the value bit for bit.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses two-column CSV rows of numbers. A first line that does not parse
/// as data is taken as the header; every later line must parse. Empty lines
/// are skipped.
pub fn parse_trace_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    let mut first_content = true;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let parsed = (|| {
            let a: f64 = fields.next()?.trim().parse().ok()?;
            let b: f64 = fields.next()?.trim().parse().ok()?;
            if fields.next().is_some() {
                return None;
            }
            Some((a, b))
        })();
        let names_columns =
            line.split(',').next().is_some_and(|f| f.trim().parse::<f64>().is_err());
        match parsed {
            Some((a, b)) if a.is_finite() && b.is_finite() => rows.push((a, b)),
            _ if first_content && names_columns => {
                // header row
            }
            _ => {
                return Err(Error::parameter(
                    "csv",
                    format!("line {}: expected two finite comma-separated numbers", idx + 1),
                ));
            }
        }
        first_content = false;
    }
    Ok(rows)
}

/// Renders two-column rows as CSV with the given header names.
pub fn rows_to_csv(col_a: &str, col_b: &str, rows: &[(f64, f64)]) -> String {
    let mut out = String::with_capacity(16 + rows.len() * 24);
    out.push_str(col_a);
    out.push(',');
    out.push_str(col_b);
    out.push('\n');
    for (a, b) in rows {
        out.push_str(&format!("{a},{b}\n"));
    }
    out
}
