//! CSV (dense) and LIBSVM (sparse, 1-based indices) readers and writers.
//! Both accept UTF-8 with LF or CRLF line endings.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::PointSet;

/// Loads a comma-separated file of numeric rows with equal length.
pub fn load_dense(path: impl AsRef<Path>, has_header: bool) -> Result<PointSet> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if lineno == 0 && has_header {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("non-numeric cell {:?}", cell.trim()),
            })?;
            row.push(v);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("ragged row: {} columns, expected {w}", row.len()),
                });
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid("file contains no data rows"));
    }
    PointSet::from_rows(rows)
}

/// Loads `label idx:val idx:val ...` lines with 1-based ascending indices.
/// The dimension is the maximum index seen; labels are returned for the
/// two-class SVM path.
pub fn load_sparse(path: impl AsRef<Path>) -> Result<(PointSet, Vec<i32>)> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut labels: Vec<i32> = Vec::new();
    let mut max_index: u32 = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let label_str = fields.next().ok_or(Error::Parse {
            line: lineno + 1,
            msg: "missing label".into(),
        })?;
        // Accept "+1", "1", "-1", or "1.0"-style labels.
        let label: i32 = label_str
            .parse::<i32>()
            .or_else(|_| label_str.parse::<f64>().map(|f| f as i32))
            .map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad label {label_str:?}"),
            })?;
        let mut row: Vec<(u32, f64)> = Vec::new();
        let mut prev: Option<u32> = None;
        for f in fields {
            let (idx_str, val_str) = f.split_once(':').ok_or(Error::Parse {
                line: lineno + 1,
                msg: format!("expected idx:val, got {f:?}"),
            })?;
            let idx: u32 = idx_str.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad index {idx_str:?}"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "indices are 1-based".into(),
                });
            }
            let val: f64 = val_str.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad value {val_str:?}"),
            })?;
            if let Some(p) = prev {
                if idx <= p {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("non-ascending index {idx}"),
                    });
                }
            }
            prev = Some(idx);
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::invalid("empty LIBSVM file"));
    }
    let d = (max_index as usize).max(1);
    Ok((PointSet::from_sparse(rows, d)?, labels))
}

pub fn write_csv(path: impl AsRef<Path>, points: &PointSet) -> Result<()> {
    let mut out = String::new();
    for i in 0..points.len() {
        let row = points.row_dense(i);
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_libsvm(path: impl AsRef<Path>, points: &PointSet, labels: &[i32]) -> Result<()> {
    assert_eq!(points.len(), labels.len());
    let mut out = String::new();
    for (i, label) in labels.iter().enumerate() {
        let row = points.row_dense(i);
        out.push_str(&format!("{label:+}"));
        for (j, v) in row.iter().enumerate() {
            if *v != 0.0 {
                out.push_str(&format!(" {}:{}", j + 1, v));
            }
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp(content: &str) -> std::path::PathBuf {
        let mut path = std::env::temp_dir();
        let id: u64 = rand::random();
        path.push(format!("geo-sublinear-io-{id}.txt"));
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn dense_two_point_file() {
        let p = tmp("0,0\n2,0\n");
        let ps = load_dense(&p, false).unwrap();
        assert_eq!((ps.len(), ps.dim()), (2, 2));
        fs::remove_file(p).ok();
    }

    #[test]
    fn dense_header_skipped() {
        let p = tmp("x,y\r\n0,0\r\n2,0\r\n");
        let ps = load_dense(&p, true).unwrap();
        assert_eq!((ps.len(), ps.dim()), (2, 2));
        fs::remove_file(p).ok();
    }

    #[test]
    fn dense_ragged_row_names_line() {
        let p = tmp("1,2\n3\n");
        let err = load_dense(&p, false).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        fs::remove_file(p).ok();
    }

    #[test]
    fn dense_non_numeric_cell() {
        let p = tmp("1,2\n3,abc\n");
        assert!(load_dense(&p, false).is_err());
        fs::remove_file(p).ok();
    }

    #[test]
    fn libsvm_basic() {
        let p = tmp("+1 1:3 3:4\n");
        let (ps, labels) = load_sparse(&p).unwrap();
        assert_eq!((ps.len(), ps.dim()), (1, 3));
        assert_eq!(labels, vec![1]);
        assert_eq!(ps.row_dense(0), vec![3.0, 0.0, 4.0]);
        fs::remove_file(p).ok();
    }

    #[test]
    fn libsvm_non_ascending_rejected() {
        let p = tmp("+1 2:1 1:1\n");
        assert!(load_sparse(&p).is_err());
        fs::remove_file(p).ok();
    }

    #[test]
    fn libsvm_dim_is_max_index() {
        let p = tmp("+1 5:1\n-1 2:1\n");
        let (ps, labels) = load_sparse(&p).unwrap();
        assert_eq!(ps.dim(), 5);
        assert_eq!(labels, vec![1, -1]);
        fs::remove_file(p).ok();
    }

    #[test]
    fn libsvm_empty_rejected() {
        let p = tmp("");
        assert!(load_sparse(&p).is_err());
        fs::remove_file(p).ok();
    }

    #[test]
    fn csv_round_trip() {
        let ps = PointSet::from_rows(vec![vec![1.5, -2.0], vec![0.0, 3.25]]).unwrap();
        let mut path = std::env::temp_dir();
        let id: u64 = rand::random();
        path.push(format!("geo-sublinear-rt-{id}.csv"));
        write_csv(&path, &ps).unwrap();
        let back = load_dense(&path, false).unwrap();
        assert_eq!(back.row(0), ps.row(0));
        assert_eq!(back.row(1), ps.row(1));
        fs::remove_file(path).ok();
    }
}
