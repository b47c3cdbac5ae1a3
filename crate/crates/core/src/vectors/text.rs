//! Text vector format.
//!
//! ```text
//! <count> <dim>          optional header
//! <token> <v1> ... <vdim>
//! ```
//!
//! Files without the header line (as distributed for many pre-trained word
//! sets) are detected by the first line not being two integers. Values are
//! written in the shortest form that parses back to the same `f32`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::VectorSet;
use crate::{Error, Result};

pub fn write_text<W: Write>(set: &VectorSet, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", set.len(), set.dim())?;
    let mut line = String::new();
    for (token, vector) in set.iter() {
        line.clear();
        line.push_str(token);
        for x in vector {
            write!(line, " {x}").expect("writing to a String");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_text(set: &VectorSet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    write_text(set, BufWriter::new(file))
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut fields = line.split_ascii_whitespace();
    let count = fields.next()?.parse().ok()?;
    let dim = fields.next()?.parse().ok()?;
    fields.next().is_none().then_some((count, dim))
}

/// Reads a vector set in either layout. Row order is taken as the
/// frequency rank.
pub fn read_text<R: BufRead>(input: R) -> Result<VectorSet> {
    let mut lines = input.lines().enumerate().peekable();
    let mut expected_count = None;
    let mut dim = None;

    if let Some((_, Ok(first))) = lines.peek() {
        if let Some((count, d)) = parse_header(first) {
            expected_count = Some(count);
            dim = Some(d);
            lines.next();
        }
    }

    let mut set: Option<VectorSet> = None;
    let mut values = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_ascii_whitespace();
        let token = fields.next().expect("non-empty line");
        values.clear();
        for field in fields {
            let x: f32 = field
                .parse()
                .map_err(|_| Error::format(line_no, format!("bad value {field:?}")))?;
            if !x.is_finite() {
                return Err(Error::format(
                    line_no,
                    format!("non-finite value {field:?}"),
                ));
            }
            values.push(x);
        }
        let d = *dim.get_or_insert(values.len());
        if values.len() != d || d == 0 {
            return Err(Error::format(
                line_no,
                format!("expected {d} values, found {}", values.len()),
            ));
        }
        let set = set.get_or_insert_with(|| VectorSet::new(d).with_frequency_rank(true));
        if set.contains(token) {
            return Err(Error::DuplicateToken {
                line: line_no,
                token: token.to_string(),
            });
        }
        set.push(token, &values)
            .map_err(|e| Error::format(line_no, e.to_string()))?;
    }

    let set = set.unwrap_or_else(|| VectorSet::new(dim.unwrap_or(0)).with_frequency_rank(true));
    if let Some(count) = expected_count {
        if count != set.len() {
            return Err(Error::format(
                0,
                format!("header announces {count} rows, file has {}", set.len()),
            ));
        }
    }
    Ok(set)
}

pub fn load_text(path: &Path) -> Result<VectorSet> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    read_text(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trip() {
        let mut set = VectorSet::new(4);
        set.push("a", &[0.1, -0.25, 3.5e-7, 1234.5]).unwrap();
        set.push("wiki_42", &[0.0, 1.0, -1.0, 0.333_333_34])
            .unwrap();
        set.push("b", &[-0.0, 2.0, 1e-30, -7.125]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        save_text(&set, &path).unwrap();
        let back = load_text(&path).unwrap();
        assert_eq!(back.tokens(), set.tokens());
        for (i, (_, v)) in set.iter().enumerate() {
            for (x, y) in v.iter().zip(back.row(i)) {
                assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0));
            }
        }
        assert!(back.is_ranked());
    }

    #[test]
    fn headerless_layout() {
        let set = read_text("a 1.0 0.0\nb 0.0 1.0\n".as_bytes()).unwrap();
        assert_eq!(set.dim(), 2);
        assert_eq!(set.len(), 2);
        assert_eq!(set.get("b"), Some(&[0.0, 1.0][..]));
    }

    #[test]
    fn header_layout() {
        let set = read_text("2 3\nx 1 2 3\ny 4 5 6\n".as_bytes()).unwrap();
        assert_eq!((set.len(), set.dim()), (2, 3));
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let err = read_text("a 1 2 3\nb 1 2 3 4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }), "{err}");
        let err = read_text("2 3\na 1 2 3\nb 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }), "{err}");
    }

    #[test]
    fn duplicates_and_count_mismatch() {
        let err = read_text("a 1\nb 2\na 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateToken { line: 3, .. }));
        assert!(read_text("3 1\na 1\nb 2\n".as_bytes()).is_err());
        assert!(read_text("a 1\nb nan\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip_is_exact(rows in prop::collection::vec(prop::collection::vec(-1e3f32..1e3, 3), 1..10)) {
            let mut set = VectorSet::new(3);
            for (i, r) in rows.iter().enumerate() {
                set.push(format!("t{i}"), r).unwrap();
            }
            let mut buf = Vec::new();
            write_text(&set, &mut buf).unwrap();
            let back = read_text(buf.as_slice()).unwrap();
            prop_assert_eq!(back.with_frequency_rank(false), set);
        }
    }
}
