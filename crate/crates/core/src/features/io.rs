//! Feature interchange format and PGM image files.
//!
//! Feature files are plain text: a `#eam-features n=<n>` header line, then
//! one `label,v1,...,vn` record per line with decimal reals. Values are
//! printed with shortest round-trip formatting, so export/import is exact.
//! Images use binary PGM (P5, maxval 255).

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::GrayImage;
use crate::amr::Label;
use crate::error::{Error, Result};
use crate::quantizer::FeatureVector;
use crate::util::write_atomic;

const HEADER_PREFIX: &str = "#eam-features n=";

pub fn write_features(mut w: impl Write, rows: &[(Label, FeatureVector)]) -> Result<()> {
    let n = rows.first().map_or(0, |(_, v)| v.len());
    writeln!(w, "{HEADER_PREFIX}{n}")?;
    for (label, v) in rows {
        write!(w, "{label}")?;
        for x in v.values() {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Writes a feature file atomically.
pub fn export_features(path: &Path, rows: &[(Label, FeatureVector)]) -> Result<()> {
    let mut buf = Vec::new();
    write_features(&mut buf, rows)?;
    write_atomic(path, &buf)?;
    Ok(())
}

pub fn read_features(r: impl BufRead) -> Result<Vec<(Label, FeatureVector)>> {
    let parse_err = |line: usize, reason: String| Error::Parse { line, reason };
    let mut lines = r.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 0,
        reason: "empty file, missing #eam-features header".into(),
    })?;
    let header = header?;
    let n: usize = header
        .strip_prefix(HEADER_PREFIX)
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| parse_err(1, format!("malformed header {header:?}")))?;

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label: Label = fields
            .next()
            .unwrap()
            .trim()
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad label: {e}")))?;
        let mut values = Vec::with_capacity(n);
        for field in fields {
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad value {field:?}: {e}")))?;
            values.push(x);
        }
        if values.len() != n {
            return Err(parse_err(
                lineno,
                format!("{} values, header says n={n}", values.len()),
            ));
        }
        let v = FeatureVector::new(values)
            .map_err(|_| parse_err(lineno, "non-finite value".into()))?;
        rows.push((label, v));
    }
    Ok(rows)
}

pub fn import_features(path: &Path) -> Result<Vec<(Label, FeatureVector)>> {
    read_features(BufReader::new(File::open(path)?))
}

pub fn write_pgm(mut w: impl Write, img: &GrayImage) -> Result<()> {
    write!(w, "P5\n{} {}\n255\n", img.width(), img.height())?;
    w.write_all(img.pixels())?;
    Ok(())
}

/// Writes a PGM file atomically.
pub fn save_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    let mut buf = Vec::new();
    write_pgm(&mut buf, img)?;
    write_atomic(path, &buf)?;
    Ok(())
}

pub fn read_pgm(mut r: impl Read) -> Result<GrayImage> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let bad = |reason: &str| Error::Parse {
        line: 0,
        reason: format!("pgm: {reason}"),
    };

    // next whitespace-delimited token, skipping '#' comment lines
    fn token(bytes: &[u8], pos: &mut usize) -> Option<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            } else {
                break;
            }
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        (start != *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    }

    let mut pos = 0;
    if token(&bytes, &mut pos).ok_or_else(|| bad("truncated header"))? != "P5" {
        return Err(bad("not a P5 file"));
    }
    let next = |pos: &mut usize, what: &str| -> Result<usize> {
        token(&bytes, pos)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(&format!("bad {what}")))
    };
    let width = next(&mut pos, "width")?;
    let height = next(&mut pos, "height")?;
    let maxval = next(&mut pos, "maxval")?;
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    pos += 1; // single whitespace after maxval
    let need = width * height;
    let pixels = bytes
        .get(pos..pos + need)
        .ok_or_else(|| bad("truncated pixel data"))?;
    GrayImage::new(width, height, pixels.to_vec())
}

pub fn load_pgm(path: &Path) -> Result<GrayImage> {
    read_pgm(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn feature_round_trip_is_exact() {
        let rows = vec![
            (3u8, fv(&[0.1, 0.25, 1.0 / 3.0])),
            (7u8, fv(&[-1.5e-7, 0.0, 42.0])),
        ];
        let mut buf = Vec::new();
        write_features(&mut buf, &rows).unwrap();
        let back = read_features(&buf[..]).unwrap();
        assert_eq!(back.len(), rows.len());
        for ((la, va), (lb, vb)) in rows.iter().zip(&back) {
            assert_eq!(la, lb);
            for (a, b) in va.values().iter().zip(vb.values()) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn header_row_length_mismatch_reports_line() {
        let text = "#eam-features n=3\n1,0.5,0.5\n";
        let err = read_features(text.as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("n=3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert!(matches!(
            read_features(&b""[..]),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn non_finite_value_is_a_parse_error() {
        let text = "#eam-features n=2\n0,1.0,inf\n";
        match read_features(text.as_bytes()).unwrap_err() {
            Error::Parse { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("non-finite"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pgm_round_trip_and_header() {
        let img = GrayImage::new(3, 2, vec![0, 10, 255, 1, 2, 3]).unwrap();
        let mut buf = Vec::new();
        write_pgm(&mut buf, &img).unwrap();
        assert!(buf.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(read_pgm(&buf[..]).unwrap(), img);
    }

    #[test]
    fn pgm_with_comment_parses() {
        let mut buf = b"P5\n# a comment\n2 1\n255\n".to_vec();
        buf.extend_from_slice(&[9, 8]);
        let img = read_pgm(&buf[..]).unwrap();
        assert_eq!(img.pixels(), &[9, 8]);
    }

    #[test]
    fn truncated_pgm_is_rejected() {
        let buf = b"P5\n4 4\n255\nxy".to_vec();
        assert!(matches!(read_pgm(&buf[..]), Err(Error::Parse { .. })));
    }
}
