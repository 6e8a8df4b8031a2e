//! Plain-text matrix format: a header line `m d`, then `m` lines of `d`
//! whitespace-separated decimals. Lines starting with `#` are comments, and
//! anything after `#` on a data line is ignored.

use super::Matrix;
use crate::error::{Error, Result};

/// A parsed matrix together with its comment lines (without the leading `#`).
#[derive(Debug, Clone)]
pub struct MatrixFile {
    pub matrix: Matrix,
    pub comments: Vec<String>,
}

pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let mut comments = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    let mut data = Vec::new();
    let mut rows_seen = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let (content, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(raw[pos + 1..].trim().to_string())),
            None => (raw, None),
        };
        if let Some(c) = comment {
            comments.push(c);
        }
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "header must be `rows cols`".into(),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|e| Error::Parse {
                        line: line_no,
                        msg: format!("bad dimension `{s}`: {e}"),
                    })
                };
                let (m, d) = (parse(fields[0])?, parse(fields[1])?);
                if m == 0 || d == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "dimensions must be positive".into(),
                    });
                }
                header = Some((m, d));
                data.reserve(m * d);
            }
            Some((m, d)) => {
                if rows_seen == m {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("more than {m} data rows"),
                    });
                }
                if fields.len() != d {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected {d} entries, found {}", fields.len()),
                    });
                }
                for f in fields {
                    let v: f64 = f.parse().map_err(|e| Error::Parse {
                        line: line_no,
                        msg: format!("bad number `{f}`: {e}"),
                    })?;
                    if !v.is_finite() {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "non-finite entry".into(),
                        });
                    }
                    data.push(v);
                }
                rows_seen += 1;
            }
        }
    }
    let (m, d) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    if rows_seen != m {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("expected {m} data rows, found {rows_seen}"),
        });
    }
    Ok(MatrixFile {
        matrix: Matrix::from_vec(m, d, data)?,
        comments,
    })
}

/// Serializes with shortest round-trip float formatting.
pub fn format_matrix(m: &Matrix, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for r in m.row_iter() {
        let line: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_rows() {
        let text = "# scale 0.5\n# generated\n2 2\n1 0 # first\n0.25 -3e-2\n";
        let f = parse_matrix(text).unwrap();
        assert_eq!(f.comments, vec!["scale 0.5", "generated", "first"]);
        assert_eq!(f.matrix.row(1), &[0.25, -0.03]);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_matrix("2 2\n1 2\n").is_err());
        assert!(parse_matrix("1 2\n1 2 3\n").is_err());
        assert!(parse_matrix("1 1\nx\n").is_err());
        assert!(parse_matrix("# only comments\n").is_err());
        assert!(parse_matrix("1 1\nNaN\n").is_err());
    }

    #[test]
    fn format_round_trips_exactly() {
        let m = Matrix::from_rows(&[[0.1, 1.0 / 3.0], [-2.5e-17, 7.0]]).unwrap();
        let text = format_matrix(&m, &["scale 1".to_string()]);
        let back = parse_matrix(&text).unwrap();
        assert_eq!(back.matrix, m);
    }
}
