//! Matrix Market reading and writing for symmetric operators.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::operator::{OperatorKind, SymmetricOperator, SYMMETRY_TOL};

/// Coordinate-format matrices up to this dimension are stored densely.
pub const DENSIFY_MAX: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    CoordinateSymmetric,
    ArrayGeneral,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_header(line: &str) -> Result<Layout> {
    let toks: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" {
        return Err(parse_err(1, format!("unsupported header `{}`", line.trim())));
    }
    if toks[1] != "matrix" {
        return Err(parse_err(1, format!("unsupported object `{}`", toks[1])));
    }
    match (toks[2].as_str(), toks[3].as_str(), toks[4].as_str()) {
        ("coordinate", "real", "symmetric") => Ok(Layout::CoordinateSymmetric),
        ("array", "real", "general") => Ok(Layout::ArrayGeneral),
        (fmt, field, sym) => Err(parse_err(1, format!("unsupported header `{fmt} {field} {sym}`"))),
    }
}

/// Parses Matrix Market text. Supported headers are
/// `coordinate real symmetric` and `array real general`; the latter must be
/// symmetric to within a relative `1e-12`.
pub fn parse_matrix_market(text: &str) -> Result<SymmetricOperator> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let layout = parse_header(header)?;
    let mut data_lines = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_no, size_line) = data_lines.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let sizes: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(size_no + 1, format!("bad size token `{t}`"))))
        .collect::<Result<_>>()?;
    match layout {
        Layout::CoordinateSymmetric => {
            if sizes.len() != 3 {
                return Err(parse_err(size_no + 1, "coordinate size line needs rows, columns and entries"));
            }
            let (rows, cols, nnz) = (sizes[0], sizes[1], sizes[2]);
            if rows != cols || rows == 0 {
                return Err(parse_err(size_no + 1, format!("symmetric matrix must be square and non-empty, got {rows}x{cols}")));
            }
            let n = rows;
            let mut trip = Vec::with_capacity(nnz);
            for _ in 0..nnz {
                let (no, l) = data_lines.next().ok_or_else(|| parse_err(size_no + 2, format!("expected {nnz} entries")))?;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(no + 1, "entry line needs row, column and value"));
                }
                let i: usize = toks[0].parse().map_err(|_| parse_err(no + 1, format!("bad row index `{}`", toks[0])))?;
                let j: usize = toks[1].parse().map_err(|_| parse_err(no + 1, format!("bad column index `{}`", toks[1])))?;
                let v: f64 = toks[2].parse().map_err(|_| parse_err(no + 1, format!("bad value `{}`", toks[2])))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(no + 1, format!("index ({i}, {j}) out of range for dimension {n}")));
                }
                trip.push((i - 1, j - 1, v));
            }
            if let Some((no, _)) = data_lines.next() {
                return Err(parse_err(no + 1, "more entries than declared"));
            }
            let sparse = SymmetricOperator::sparse(n, &trip)?;
            if n <= DENSIFY_MAX {
                SymmetricOperator::dense(n, sparse.to_dense())
            } else {
                Ok(sparse)
            }
        }
        Layout::ArrayGeneral => {
            if sizes.len() != 2 {
                return Err(parse_err(size_no + 1, "array size line needs rows and columns"));
            }
            let (rows, cols) = (sizes[0], sizes[1]);
            if rows != cols || rows == 0 {
                return Err(parse_err(size_no + 1, format!("matrix must be square and non-empty, got {rows}x{cols}")));
            }
            let n = rows;
            let mut data = vec![0.0; n * n];
            let mut count = 0usize;
            for (no, l) in data_lines {
                for t in l.split_whitespace() {
                    if count >= n * n {
                        return Err(parse_err(no + 1, "more entries than declared"));
                    }
                    let v: f64 = t.parse().map_err(|_| parse_err(no + 1, format!("bad value `{t}`")))?;
                    // column-major order
                    let (i, j) = (count % n, count / n);
                    data[i * n + j] = v;
                    count += 1;
                }
            }
            if count != n * n {
                return Err(parse_err(size_no + 2, format!("expected {} entries, found {count}", n * n)));
            }
            let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            for i in 0..n {
                for j in 0..i {
                    if (data[i * n + j] - data[j * n + i]).abs() > SYMMETRY_TOL * scale {
                        return Err(parse_err(0, format!("matrix is not symmetric at ({}, {})", i + 1, j + 1)));
                    }
                }
            }
            SymmetricOperator::dense(n, data)
        }
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SymmetricOperator> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_matrix_market(&text)
}

/// Serializes the lower triangle in `coordinate real symmetric` form.
pub fn format_matrix_market(a: &SymmetricOperator) -> String {
    let n = a.dim();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    match a.kind() {
        OperatorKind::Diagonal { eigenvalues } => {
            entries.extend(eigenvalues.iter().enumerate().map(|(i, &v)| (i, i, v)));
        }
        OperatorKind::Dense { data, .. } => {
            for j in 0..n {
                for i in j..n {
                    let v = data[i * n + j];
                    if v != 0.0 || i == j {
                        entries.push((i, j, v));
                    }
                }
            }
        }
        OperatorKind::Sparse { row_ptr, cols, vals, .. } => {
            for i in 0..n {
                for p in row_ptr[i]..row_ptr[i + 1] {
                    if cols[p] <= i {
                        entries.push((i, cols[p], vals[p]));
                    }
                }
            }
            entries.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        }
    }
    let mut s = String::new();
    s.push_str("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(s, "{n} {n} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(s, "{} {} {:e}", i + 1, j + 1, v);
    }
    s
}

pub fn write_matrix_market(a: &SymmetricOperator, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), format_matrix_market(a))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_coordinate_symmetric() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 4\n1 1 2.0\n2 1 -1\n2 2 2\n3 3 1.5\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.to_dense(), vec![2.0, -1.0, 0.0, -1.0, 2.0, 0.0, 0.0, 0.0, 1.5]);
    }

    #[test]
    fn reads_array_general() {
        let text = "%%MatrixMarket matrix array real general\n2 2\n1\n3\n3\n4\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.to_dense(), vec![1.0, 3.0, 3.0, 4.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad_header = "%%MatrixMarket matrix coordinate complex hermitian\n1 1 1\n1 1 1\n";
        assert!(matches!(parse_matrix_market(bad_header), Err(Error::Parse { line: 1, .. })));
        let asym = "%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n";
        assert!(parse_matrix_market(asym).is_err());
        let oob = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n";
        let err = parse_matrix_market(oob).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn round_trip() {
        let a = SymmetricOperator::dense(3, vec![2.0, -1.0, 0.0, -1.0, 2.0, 0.25, 0.0, 0.25, 1.5]).unwrap();
        let b = parse_matrix_market(&format_matrix_market(&a)).unwrap();
        assert_eq!(a.to_dense(), b.to_dense());
        let d = SymmetricOperator::diagonal(vec![0.1, 1e-3, 7.0]).unwrap();
        let e = parse_matrix_market(&format_matrix_market(&d)).unwrap();
        assert_eq!(d.to_dense(), e.to_dense());
    }
}
