//! Coefficient CSV, grid CSV and 16-bit PGM dumps.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::freq::FrequencyIndex;
use super::grid::GridField;
use super::poly::TrigPolynomial;
use crate::error::{Error, Result};

/// Format like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    const P: i32 = 17;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= P {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn coeff_header(dim: usize) -> String {
    let mut h: Vec<String> = (1..=dim).map(|j| format!("xi_{j}")).collect();
    h.push("re".into());
    h.push("im".into());
    h.join(",")
}

/// Write `(xi, value)` rows sorted lexicographically by `xi`.
pub fn write_coefficient_rows<'a>(
    path: &Path,
    dim: usize,
    rows: impl IntoIterator<Item = (&'a FrequencyIndex, Complex64)>,
) -> Result<()> {
    let mut rows: Vec<_> = rows.into_iter().collect();
    rows.sort_by(|a, b| a.0.cmp(b.0));
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", coeff_header(dim))?;
    for (xi, v) in rows {
        for c in xi.components() {
            write!(out, "{c},")?;
        }
        writeln!(out, "{},{}", fmt_g17(v.re), fmt_g17(v.im))?;
    }
    out.flush()?;
    Ok(())
}

/// Dump every coefficient of the block.
pub fn write_coefficients(path: &Path, p: &TrigPolynomial) -> Result<()> {
    let rows: Vec<_> = p.iter().collect();
    write_coefficient_rows(path, p.dim(), rows.iter().map(|(xi, c)| (xi, *c)))
}

/// Read `(xi, value)` rows in file order; duplicates are rejected.
pub fn read_coefficient_rows(path: &Path) -> Result<(usize, Vec<(FrequencyIndex, Complex64)>)> {
    let file = BufReader::new(fs::File::open(path)?);
    let perr = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = file.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
    let header = header?;
    let cols = header.trim().split(',').count();
    if cols < 3 || header.trim() != coeff_header(cols - 2) {
        return Err(perr(1, format!("unexpected header `{}`", header.trim())));
    }
    let dim = cols - 2;
    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(perr(i + 1, format!("expected {cols} fields, found {}", fields.len())));
        }
        let xi = fields[..dim]
            .iter()
            .map(|s| s.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| perr(i + 1, e.to_string()))?;
        let re: f64 = fields[dim].trim().parse().map_err(|e: std::num::ParseFloatError| perr(i + 1, e.to_string()))?;
        let im: f64 = fields[dim + 1].trim().parse().map_err(|e: std::num::ParseFloatError| perr(i + 1, e.to_string()))?;
        let xi = FrequencyIndex::new(xi);
        if !seen.insert(xi.clone()) {
            return Err(Error::Duplicate(format!("{xi} at {}:{}", path.display(), i + 1)));
        }
        rows.push((xi, Complex64::new(re, im)));
    }
    Ok((dim, rows))
}

/// Read a coefficient dump into a polynomial whose degree is the largest
/// `|xi|_inf` present.
pub fn read_coefficients(path: &Path) -> Result<TrigPolynomial> {
    let (dim, rows) = read_coefficient_rows(path)?;
    let degree = rows.iter().map(|(xi, _)| xi.sup_norm()).max().unwrap_or(0) as usize;
    let mut coeffs = vec![Complex64::default(); (2 * degree + 1).pow(dim as u32)];
    let probe = TrigPolynomial::zeros(dim, degree);
    for (xi, v) in rows {
        coeffs[probe.offset(xi.components()).unwrap()] = v;
    }
    TrigPolynomial::from_coeffs(dim, degree, coeffs)
}

/// Value-range metadata written next to a PGM image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgmSidecar {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Value mapped to gray level 0.
    pub min: f64,
    /// Value mapped to gray level `maxval`.
    pub max: f64,
    /// Image rows run along the second grid axis, columns along the first.
    pub layout: String,
}

/// Write the real part of a 1-d or 2-d field as binary 16-bit PGM (P5,
/// big-endian) plus a JSON sidecar with the value range. `range` fixes the
/// gray-level mapping; by default the field's own min/max are used.
pub fn write_pgm(path: &Path, field: &GridField, range: Option<(f64, f64)>) -> Result<PgmSidecar> {
    let (width, height) = match field.dim() {
        1 => (field.points(), 1),
        2 => (field.points(), field.points()),
        d => return Err(Error::Parameter(format!("cannot render a {d}-d field as an image"))),
    };
    let vals = field.real_parts();
    let (lo, hi) = range.unwrap_or_else(|| {
        vals.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
    });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = BufWriter::new(fs::File::create(path)?);
    write!(out, "P5\n{width} {height}\n65535\n")?;
    for row in 0..height {
        for col in 0..width {
            // Storage is first-axis-major: value (x_col, y_row) sits at col * G + row.
            let v = if height == 1 { vals[col] } else { vals[col * field.points() + row] };
            let level = (((v - lo) / span).clamp(0.0, 1.0) * 65535.0).round() as u16;
            out.write_all(&level.to_be_bytes())?;
        }
    }
    out.flush()?;
    let meta = PgmSidecar {
        width,
        height,
        maxval: 65535,
        min: lo,
        max: hi,
        layout: "row=x_2,col=x_1".into(),
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(meta)
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

/// Grid dump as CSV: `x_1,...,x_d,re,im`.
pub fn write_grid_csv(path: &Path, field: &GridField) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    let mut h: Vec<String> = (1..=field.dim()).map(|j| format!("x_{j}")).collect();
    h.push("re".into());
    h.push("im".into());
    writeln!(out, "{}", h.join(","))?;
    for (k, v) in field.values().iter().enumerate() {
        for x in field.coordinates(k) {
            write!(out, "{},", fmt_g17(x))?;
        }
        writeln!(out, "{},{}", fmt_g17(v.re), fmt_g17(v.im))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_c() {
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(fmt_g17(0.0001), "0.0001");
    }

    #[test]
    fn g17_round_trips() {
        for x in [1.0 / 3.0, -7.25e-9, 6.02214076e23, f64::MIN_POSITIVE, 0.2026423672846756] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn coefficient_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let p = TrigPolynomial::from_fn(2, 2, |xi| {
            let [a, b] = [xi.components()[0] as f64, xi.components()[1] as f64];
            Complex64::new((a + 0.3 * b).cos() / 3.0, (a - b).sin() * 1e-7)
        });
        write_coefficients(&path, &p).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("xi_1,xi_2,re,im\n-2,-2,"));
        assert_eq!(read_coefficients(&path).unwrap(), p);
    }

    #[test]
    fn duplicate_and_malformed_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        fs::write(&path, "xi_1,re,im\n0,1,0\n0,2,0\n").unwrap();
        assert!(matches!(read_coefficient_rows(&path), Err(Error::Duplicate(_))));
        fs::write(&path, "xi_1,re,im\n0,1,0\n1,x,0\n").unwrap();
        assert!(matches!(read_coefficient_rows(&path), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn pgm_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.pgm");
        // value = index along first axis
        let g = GridField::from_real(2, 3, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0]).unwrap();
        let meta = write_pgm(&path, &g, None).unwrap();
        assert_eq!((meta.min, meta.max), (0.0, 2.0));
        let bytes = fs::read(&path).unwrap();
        let header = b"P5\n3 3\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        let px: Vec<u16> = bytes[header.len()..]
            .chunks(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        assert_eq!(&px[..3], &[0, 32768, 65535]);
        assert!(sidecar_path(&path).exists());
    }
}
