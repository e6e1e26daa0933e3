//! Matrix Market dense (`array`) files.

use std::fmt::Write as _;
use std::path::Path;

use crate::linalg::{CMat, C64};

use super::CliError;

/// `%%MatrixMarket matrix array complex general`, column-major, 17
/// significant digits.
pub fn to_string(m: &CMat) -> String {
    let mut out = String::with_capacity(48 * m.len() + 64);
    out.push_str("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for z in m.iter() {
        let _ = writeln!(out, "{:.16e} {:.16e}", z.re, z.im);
    }
    out
}

pub fn write(path: &Path, m: &CMat) -> Result<(), CliError> {
    std::fs::write(path, to_string(m)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read(path: &Path) -> Result<CMat, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Parses `array` files with `real` or `complex` fields and `general` symmetry.
pub fn parse(text: &str) -> Result<CMat, String> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or("empty file")?;
    let words: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(format!("line 1: bad header `{header}`"));
    }
    if words[2] != "array" {
        return Err(format!(
            "line 1: only the array format is supported, found `{}`",
            words[2]
        ));
    }
    let complex = match words[3].as_str() {
        "complex" => true,
        "real" | "integer" => false,
        other => return Err(format!("line 1: unsupported field `{other}`")),
    };
    if words[4] != "general" {
        return Err(format!("line 1: unsupported symmetry `{}`", words[4]));
    }
    let mut data = lines.filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let (ln, size) = data.next().ok_or("missing size line")?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| format!("line {}: bad size `{size}`", ln + 1))
        })
        .collect::<Result<_, _>>()?;
    let [nr, nc] = dims[..] else {
        return Err(format!("line {}: expected `rows cols`", ln + 1));
    };
    let mut vals = Vec::with_capacity(nr * nc);
    for (ln, line) in data {
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| format!("line {}: bad number `{t}`", ln + 1))
            })
            .collect::<Result<_, _>>()?;
        let want = if complex { 2 } else { 1 };
        if nums.len() != want {
            return Err(format!(
                "line {}: expected {want} value(s), found {}",
                ln + 1,
                nums.len()
            ));
        }
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(format!("line {}: non-finite value", ln + 1));
        }
        vals.push(C64::new(nums[0], if complex { nums[1] } else { 0.0 }));
    }
    if vals.len() != nr * nc {
        return Err(format!(
            "expected {} entries, found {}",
            nr * nc,
            vals.len()
        ));
    }
    Ok(CMat::from_column_slice(nr, nc, &vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn round_trip_is_exact() {
        let m = CMat::from_row_slice(
            2,
            3,
            &[
                c64(1.0, -0.1),
                c64(1.0 / 3.0, 2e-300),
                c64(-7.5e12, 0.0),
                c64(0.0, 1.0),
                c64(f64::MIN_POSITIVE, 0.0),
                c64(std::f64::consts::PI, -std::f64::consts::E),
            ],
        );
        let back = parse(&to_string(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn reads_real_arrays_with_comments() {
        let m =
            parse("%%MatrixMarket matrix array real general\n% note\n2 2\n1\n2\n3\n4\n").unwrap();
        assert_eq!(
            m,
            CMat::from_row_slice(
                2,
                2,
                &[c64(1.0, 0.0), c64(3.0, 0.0), c64(2.0, 0.0), c64(4.0, 0.0)]
            )
        );
    }

    #[test]
    fn reports_line_numbers() {
        let err =
            parse("%%MatrixMarket matrix array complex general\n1 2\n1 0\nx 0\n").unwrap_err();
        assert!(err.contains("line 4"), "{err}");
        assert!(parse("%%MatrixMarket matrix coordinate real general\n")
            .unwrap_err()
            .contains("array"));
        assert!(
            parse("%%MatrixMarket matrix array complex general\n2 1\n1 0\n")
                .unwrap_err()
                .contains("expected 2")
        );
    }
}
