//! Text formats for instances.
//!
//! Canonical (sparse) format, `#` comment lines and blank lines ignored:
//!
//! ```text
//! SUKP              # or BMCP
//! m n
//! C
//! v_0 ... v_{m-1}
//! w_0 ... w_{n-1}
//! c k_1 ... k_c     # one line per item: count, then 0-based element indices
//! ```
//!
//! The legacy dense format has no kind line: `m n`, capacity, values, weights,
//! then an `m x n` 0/1 matrix. It is read as a token stream so line wrapping
//! inside the matrix does not matter.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Instance, InstanceError, ProblemKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: invalid integer `{token}`")]
    InvalidNumber { line: usize, token: String },
    #[error("line {line}: negative {what} {value}")]
    Negative {
        line: usize,
        what: &'static str,
        value: i64,
    },
    #[error("line {line}: expected {expected} {what}, found {found}")]
    CountMismatch {
        line: usize,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: element index {index} out of range for n = {n}")]
    IndexOutOfRange { line: usize, index: u64, n: usize },
    #[error("line {line}: relation entry `{token}` is not 0 or 1")]
    NotBinary { line: usize, token: String },
    #[error("line {line}: unexpected end of input, missing {what}")]
    UnexpectedEof { line: usize, what: &'static str },
    #[error("line {line}: unexpected trailing content")]
    TrailingContent { line: usize },
    #[error("file declares {declared} but {requested} was requested")]
    KindMismatch {
        declared: ProblemKind,
        requested: ProblemKind,
    },
    #[error("invalid instance: {0}")]
    Invalid(#[from] InstanceError),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_u64(line: usize, token: &str, what: &'static str) -> Result<u64, ParseError> {
    let value: i64 = token.parse().map_err(|_| ParseError::InvalidNumber {
        line,
        token: token.to_string(),
    })?;
    u64::try_from(value).map_err(|_| ParseError::Negative { line, what, value })
}

fn parse_row(
    line: usize,
    text: &str,
    what: &'static str,
    expected: usize,
) -> Result<Vec<u64>, ParseError> {
    let row = text
        .split_whitespace()
        .map(|t| parse_u64(line, t, what))
        .collect::<Result<Vec<_>, _>>()?;
    if row.len() != expected {
        return Err(ParseError::CountMismatch {
            line,
            what,
            expected,
            found: row.len(),
        });
    }
    Ok(row)
}

/// Parses the canonical sparse format. When `expected` is given, the kind
/// declared in the file must match it.
pub fn parse_instance(text: &str, expected: Option<ProblemKind>) -> Result<Instance, ParseError> {
    let mut lines = content_lines(text);
    let last_line = text.lines().count() + 1;
    let mut next = |what: &'static str| {
        lines.next().ok_or(ParseError::UnexpectedEof {
            line: last_line,
            what,
        })
    };

    let (line, kind_text) = next("problem kind")?;
    let kind: ProblemKind = kind_text.parse().map_err(|_| ParseError::MalformedHeader {
        line,
        reason: format!("expected SUKP or BMCP, found `{kind_text}`"),
    })?;
    if let Some(requested) = expected {
        if requested != kind {
            return Err(ParseError::KindMismatch {
                declared: kind,
                requested,
            });
        }
    }

    let (line, dims) = next("dimensions")?;
    let dims = parse_row(line, dims, "dimensions", 2).map_err(|e| match e {
        ParseError::CountMismatch { .. } => ParseError::MalformedHeader {
            line,
            reason: "expected `m n`".into(),
        },
        other => other,
    })?;
    let (m, n) = (dims[0] as usize, dims[1] as usize);
    if m == 0 || n == 0 {
        return Err(ParseError::MalformedHeader {
            line,
            reason: "m and n must be at least 1".into(),
        });
    }

    let (line, cap) = next("capacity")?;
    let cap = parse_row(line, cap, "capacity", 1)?[0];

    let (line, vals) = next("values")?;
    let values = parse_row(line, vals, "values", m)?;
    let (line, wts) = next("weights")?;
    let weights = parse_row(line, wts, "weights", n)?;

    let mut coverage = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, row) = next("coverage row")?;
        let mut tokens = row.split_whitespace();
        let count = parse_u64(line, tokens.next().unwrap_or_default(), "count")? as usize;
        let indices = tokens
            .map(|t| {
                let k = parse_u64(line, t, "element index")?;
                if k >= n as u64 {
                    Err(ParseError::IndexOutOfRange { line, index: k, n })
                } else {
                    Ok(k as usize)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if indices.len() != count {
            return Err(ParseError::CountMismatch {
                line,
                what: "element indices",
                expected: count,
                found: indices.len(),
            });
        }
        coverage.push(indices);
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError::TrailingContent { line });
    }

    Ok(Instance::new(kind, cap, values, weights, coverage)?)
}

/// Parses the legacy dense 0/1-matrix format.
pub fn parse_dense(text: &str, kind: ProblemKind) -> Result<Instance, ParseError> {
    let mut tokens =
        content_lines(text).flat_map(|(line, l)| l.split_whitespace().map(move |t| (line, t)));
    let last_line = text.lines().count() + 1;
    let mut next = |what: &'static str| {
        tokens.next().ok_or(ParseError::UnexpectedEof {
            line: last_line,
            what,
        })
    };
    let mut number = |what: &'static str| -> Result<(usize, u64), ParseError> {
        let (line, t) = next(what)?;
        Ok((line, parse_u64(line, t, what)?))
    };

    let (line, m) = number("item count")?;
    let (_, n) = number("element count")?;
    if m == 0 || n == 0 {
        return Err(ParseError::MalformedHeader {
            line,
            reason: "m and n must be at least 1".into(),
        });
    }
    let (m, n) = (m as usize, n as usize);
    let (_, cap) = number("capacity")?;
    let values = (0..m)
        .map(|_| number("values").map(|(_, v)| v))
        .collect::<Result<Vec<_>, _>>()?;
    let weights = (0..n)
        .map(|_| number("weights").map(|(_, v)| v))
        .collect::<Result<Vec<_>, _>>()?;
    let mut coverage = vec![Vec::new(); m];
    for row in coverage.iter_mut() {
        for k in 0..n {
            let (line, t) = next("relation matrix entry")?;
            match t {
                "0" => {}
                "1" => row.push(k),
                _ => {
                    return Err(ParseError::NotBinary {
                        line,
                        token: t.to_string(),
                    })
                }
            }
        }
    }
    if let Some((line, _)) = tokens.next() {
        return Err(ParseError::TrailingContent { line });
    }
    Ok(Instance::new(kind, cap, values, weights, coverage)?)
}

/// Detects the format from the first token: a kind keyword selects the
/// canonical reader, a number selects the dense reader (which then needs
/// `kind`).
pub fn parse_any(text: &str, kind: Option<ProblemKind>) -> Result<Instance, ParseError> {
    let first = content_lines(text).next();
    match first {
        Some((_, l)) if l.starts_with(|c: char| c.is_ascii_alphabetic()) => {
            parse_instance(text, kind)
        }
        Some((line, _)) => match kind {
            Some(kind) => parse_dense(text, kind),
            None => Err(ParseError::MalformedHeader {
                line,
                reason: "dense matrix files carry no kind line; a problem kind is required".into(),
            }),
        },
        None => Err(ParseError::UnexpectedEof {
            line: 1,
            what: "problem kind",
        }),
    }
}

pub(super) fn to_canonical(inst: &Instance) -> String {
    fn join(out: &mut String, xs: impl Iterator<Item = u64>) {
        let mut first = true;
        for x in xs {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{x}").unwrap();
        }
        out.push('\n');
    }

    let mut out = String::new();
    writeln!(out, "{}", inst.kind()).unwrap();
    writeln!(out, "{} {}", inst.m(), inst.n()).unwrap();
    writeln!(out, "{}", inst.capacity()).unwrap();
    join(&mut out, inst.values().iter().copied());
    join(&mut out, inst.weights().iter().copied());
    for row in inst.coverage() {
        join(
            &mut out,
            std::iter::once(row.len() as u64).chain(row.iter().map(|&k| k as u64)),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::t1;

    const T1: &str = "\
# three items, three elements
SUKP
3 3
9
10 6 4
5 4 3
2 0 1
2 1 2
1 0
";

    #[test]
    fn parses_t1() {
        let inst = parse_instance(T1, None).unwrap();
        assert_eq!((inst.m(), inst.n(), inst.capacity()), (3, 3, 9));
        assert_eq!(inst, t1());
    }

    #[test]
    fn round_trip() {
        let inst = t1();
        assert_eq!(parse_instance(&inst.to_canonical(), None).unwrap(), inst);
    }

    #[test]
    fn index_out_of_range() {
        let text = T1.replace("1 0\n", "1 3\n");
        assert_eq!(
            parse_instance(&text, None),
            Err(ParseError::IndexOutOfRange {
                line: 9,
                index: 3,
                n: 3
            })
        );
    }

    #[test]
    fn count_mismatch_and_negative() {
        let text = T1.replace("10 6 4", "10 6");
        assert!(matches!(
            parse_instance(&text, None),
            Err(ParseError::CountMismatch {
                line: 5,
                expected: 3,
                found: 2,
                ..
            })
        ));
        let text = T1.replace("5 4 3", "5 -4 3");
        assert!(matches!(
            parse_instance(&text, None),
            Err(ParseError::Negative {
                line: 6,
                value: -4,
                ..
            })
        ));
        let text = T1.replace("2 1 2", "3 1 2");
        assert!(matches!(
            parse_instance(&text, None),
            Err(ParseError::CountMismatch { line: 8, .. })
        ));
    }

    #[test]
    fn malformed_header() {
        let text = T1.replace("SUKP", "KNAPSACK");
        assert!(matches!(
            parse_instance(&text, None),
            Err(ParseError::MalformedHeader { line: 2, .. })
        ));
        let text = T1.replace("3 3\n", "3\n");
        assert!(matches!(
            parse_instance(&text, None),
            Err(ParseError::MalformedHeader { line: 3, .. })
        ));
    }

    #[test]
    fn truncated_and_trailing() {
        let truncated: String = T1.lines().take(8).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            parse_instance(&truncated, None),
            Err(ParseError::UnexpectedEof { .. })
        ));
        let extra = format!("{T1}1 2\n");
        assert_eq!(
            parse_instance(&extra, None),
            Err(ParseError::TrailingContent { line: 10 })
        );
    }

    #[test]
    fn kind_mismatch() {
        assert_eq!(
            parse_instance(T1, Some(ProblemKind::Bmcp)),
            Err(ParseError::KindMismatch {
                declared: ProblemKind::Sukp,
                requested: ProblemKind::Bmcp
            })
        );
    }

    #[test]
    fn dedups_rows() {
        let text = T1.replace("1 0\n", "2 0 0\n");
        assert_eq!(parse_instance(&text, None).unwrap().covered(2), &[0]);
    }

    #[test]
    fn dense_reader() {
        let dense = "3 3\n9\n10 6 4\n5 4 3\n1 1 0\n0 1 1\n1 0 0\n";
        assert_eq!(parse_dense(dense, ProblemKind::Sukp).unwrap(), t1());
        assert_eq!(parse_any(dense, Some(ProblemKind::Sukp)).unwrap(), t1());
        assert_eq!(parse_any(T1, None).unwrap(), t1());
        assert!(parse_any(dense, None).is_err());
        let bad = dense.replace("1 0 0", "1 2 0");
        assert!(matches!(
            parse_dense(&bad, ProblemKind::Sukp),
            Err(ParseError::NotBinary { line: 7, .. })
        ));
    }
}
