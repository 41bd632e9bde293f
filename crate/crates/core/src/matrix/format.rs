//! `.bfn` text format.
//!
//! ```text
//! <rows> <cols>
//! <cols f-values over {0,1}>   (rows lines)
//! # optional label
//! ```
//!
//! Line 1 is whitespace-strict (exactly one space, nothing else). LF and
//! CRLF line endings are both accepted.

use super::BoolFun;
use crate::error::{Error, Result};

pub fn parse_bfn(text: &str) -> Result<BoolFun> {
    let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));

    let header = lines.next().ok_or_else(|| Error::parse(1, 1, "empty input"))?;
    let (rows, cols) = parse_header(header)?;

    let mut bits = Vec::with_capacity(rows.saturating_mul(cols));
    for r in 0..rows {
        let line_no = r + 2;
        let line = lines
            .next()
            .ok_or_else(|| Error::parse(line_no, 1, format!("expected {rows} matrix rows, found {r}")))?;
        let bytes = line.as_bytes();
        for (c, &b) in bytes.iter().enumerate() {
            match b {
                b'0' => bits.push(0),
                b'1' => bits.push(1),
                _ => {
                    return Err(Error::parse(
                        line_no,
                        c + 1,
                        format!("unexpected character {:?}, expected 0 or 1", b as char),
                    ))
                }
            }
        }
        if bytes.len() != cols {
            return Err(Error::parse(
                line_no,
                bytes.len().min(cols) + 1,
                format!("row has {} values, expected {cols}", bytes.len()),
            ));
        }
    }

    let mut label = None;
    for (offset, line) in lines.enumerate() {
        let line_no = rows + 2 + offset;
        if line.is_empty() {
            continue;
        }
        match line.strip_prefix('#') {
            Some(rest) if label.is_none() => label = Some(rest.trim().to_string()),
            _ => return Err(Error::parse(line_no, 1, "unexpected content after the matrix")),
        }
    }

    let f = BoolFun::from_bits(rows, cols, bits).map_err(|e| Error::parse(1, 1, e.to_string()))?;
    Ok(match label {
        Some(l) if !l.is_empty() => f.with_label(l),
        _ => f,
    })
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let Some((a, b)) = line.split_once(' ') else {
        return Err(Error::parse(1, 1, "header must be '<rows> <cols>' separated by one space"));
    };
    let rows = parse_dim(a, 1)?;
    let cols = parse_dim(b, a.len() + 2)?;
    Ok((rows, cols))
}

fn parse_dim(s: &str, column: usize) -> Result<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(1, column, format!("'{s}' is not a positive integer")));
    }
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::parse(1, column, format!("'{s}' is not a positive integer"))),
    }
}

pub fn write_bfn(f: &BoolFun) -> String {
    let mut out = String::with_capacity(f.bits().len() + f.rows() + 32);
    out.push_str(&format!("{} {}\n", f.rows(), f.cols()));
    for x in 0..f.rows() {
        out.extend(f.row_bits(x).iter().map(|&b| if b == 1 { '1' } else { '0' }));
        out.push('\n');
    }
    if let Some(label) = f.label() {
        out.push_str(&format!("# {label}\n"));
    }
    out
}
