//! `.rect` and cover text formats.
//!
//! A rectangle is two lines of space-separated indices (rows, then columns)
//! and an optional third line `+1` or `-1`. A cover file is a count line
//! followed by that many rectangle blocks separated by blank lines.

use super::{Cover, Exactness, IndexSet, Rectangle};
use crate::error::{Error, Result};
use crate::matrix::Sign;

fn lines_of(text: &str) -> Vec<&str> {
    text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect()
}

fn parse_indices(line: &str, line_no: usize) -> Result<IndexSet> {
    let mut out = Vec::new();
    let mut col = 1;
    for tok in line.split(' ') {
        if tok.is_empty() {
            col += 1;
            continue;
        }
        let v: usize = tok
            .parse()
            .map_err(|_| Error::parse(line_no, col, format!("'{tok}' is not an index")))?;
        out.push(v);
        col += tok.len() + 1;
    }
    if out.is_empty() {
        return Err(Error::parse(line_no, 1, "expected at least one index"));
    }
    Ok(IndexSet::from_indices(out))
}

fn parse_color(line: &str, line_no: usize) -> Result<Sign> {
    match line.trim() {
        "+1" => Ok(Sign::Plus),
        "-1" => Ok(Sign::Minus),
        other => Err(Error::parse(line_no, 1, format!("color '{other}' is not +1 or -1"))),
    }
}

/// Parses one block starting at `first` (0-based line offset); returns the
/// rectangle and the number of lines consumed.
fn parse_block(lines: &[&str], first: usize) -> Result<(Rectangle, usize)> {
    let row_line = lines.get(first).ok_or_else(|| Error::parse(first + 1, 1, "missing row line"))?;
    let rows = parse_indices(row_line, first + 1)?;
    let col_line = lines.get(first + 1).ok_or_else(|| Error::parse(first + 2, 1, "missing column line"))?;
    let cols = parse_indices(col_line, first + 2)?;
    match lines.get(first + 2) {
        Some(l) if !l.trim().is_empty() => {
            let color = parse_color(l, first + 3)?;
            Ok((Rectangle::new(rows, cols, Some(color)), 3))
        }
        _ => Ok((Rectangle::new(rows, cols, None), 2)),
    }
}

pub fn parse_rect(text: &str) -> Result<Rectangle> {
    let lines = lines_of(text);
    let (r, used) = parse_block(&lines, 0)?;
    if let Some(off) = lines[used..].iter().position(|l| !l.trim().is_empty()) {
        return Err(Error::parse(used + off + 1, 1, "unexpected content after the rectangle"));
    }
    Ok(r)
}

pub fn write_rect(r: &Rectangle) -> String {
    let join = |s: &IndexSet| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = format!("{}\n{}\n", join(&r.rows), join(&r.cols));
    if let Some(c) = r.color {
        out.push_str(&format!("{c}\n"));
    }
    out
}

pub fn parse_cover(text: &str) -> Result<Cover> {
    let lines = lines_of(text);
    let count: usize = lines
        .first()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| Error::parse(1, 1, "expected the rectangle count"))?;
    let mut rects = Vec::with_capacity(count);
    let mut at = 1;
    for _ in 0..count {
        while lines.get(at).is_some_and(|l| l.trim().is_empty()) {
            at += 1;
        }
        let (r, used) = parse_block(&lines, at)?;
        if r.color.is_none() {
            return Err(Error::parse(at + 3, 1, "cover rectangles need a color line"));
        }
        rects.push(r);
        at += used;
    }
    if let Some(off) = lines[at.min(lines.len())..].iter().position(|l| !l.trim().is_empty()) {
        return Err(Error::parse(at + off + 1, 1, "more rectangles than the count line states"));
    }
    Ok(Cover {
        rects,
        exactness: Exactness::UpperBound,
    })
}

pub fn write_cover(c: &Cover) -> String {
    let blocks: Vec<String> = c.rects.iter().map(write_rect).collect();
    format!("{}\n{}", c.rects.len(), blocks.join("\n"))
}
