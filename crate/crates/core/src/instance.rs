//! Instance model and the QAPLIB plain-text format.
//!
//! A QAPLIB file is a whitespace-separated token stream: the size `n`, then
//! two `n x n` matrices in row-major order. The first matrix is read as the
//! flow matrix and the second as the distance matrix. An optional third block
//! carries the linear allocation costs.

use std::fmt::Write as _;
use std::ops::Index;
use std::path::Path;

use crate::error::{QapError, Result};

/// Dense square matrix of integer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0; n * n],
        }
    }

    /// Builds a matrix from row-major data of length `n * n`.
    pub fn from_row_major(n: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(QapError::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(QapError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0; self.n * self.n];
        for r in 0..self.n {
            for c in 0..self.n {
                data[c * self.n + r] = self.get(r, c);
            }
        }
        Self { n: self.n, data }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = i64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        &self.data[r * self.n + c]
    }
}

/// Koopmans-Beckmann instance: flow `F`, distance `D` and optional linear
/// cost `B` where `B[location][facility]` is the cost of placing that
/// facility at that location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QapInstance {
    name: String,
    flow: Matrix,
    distance: Matrix,
    linear_cost: Option<Matrix>,
}

impl QapInstance {
    pub fn new(flow: Matrix, distance: Matrix) -> Result<Self> {
        Self::build(String::new(), flow, distance, None)
    }

    pub fn with_linear_cost(flow: Matrix, distance: Matrix, linear_cost: Matrix) -> Result<Self> {
        Self::build(String::new(), flow, distance, Some(linear_cost))
    }

    fn build(
        name: String,
        flow: Matrix,
        distance: Matrix,
        linear_cost: Option<Matrix>,
    ) -> Result<Self> {
        let n = flow.dim();
        if n < 2 {
            return Err(QapError::InvalidSize(n));
        }
        if distance.dim() != n {
            return Err(QapError::DimensionMismatch {
                expected: n,
                found: distance.dim(),
            });
        }
        if let Some(b) = &linear_cost {
            if b.dim() != n {
                return Err(QapError::DimensionMismatch {
                    expected: n,
                    found: b.dim(),
                });
            }
        }
        if !flow.has_zero_diagonal() || !distance.has_zero_diagonal() {
            log::warn!("instance {name:?}: non-zero diagonal entries in flow or distance matrix");
        }
        Ok(Self {
            name,
            flow,
            distance,
            linear_cost,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.flow.dim()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn flow(&self) -> &Matrix {
        &self.flow
    }

    #[inline]
    pub fn distance(&self) -> &Matrix {
        &self.distance
    }

    pub fn linear_cost(&self) -> Option<&Matrix> {
        self.linear_cost.as_ref()
    }

    /// Exchanges the roles of the flow and distance matrices. A linear block
    /// is transposed, so costs carry over under the inverse assignment.
    pub fn swapped(&self) -> Self {
        Self {
            name: self.name.clone(),
            flow: self.distance.clone(),
            distance: self.flow.clone(),
            linear_cost: self.linear_cost.as_ref().map(Matrix::transpose),
        }
    }

    /// Reads a QAPLIB file; the instance is named after the lower-cased file stem.
    pub fn from_path(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        Ok(parse_qaplib(&text).map(|inst| inst.named(name)))
    }

    /// Serializes in QAPLIB layout, including the linear block when present.
    pub fn to_qaplib(&self) -> String {
        let n = self.n();
        let mut out = String::new();
        let _ = writeln!(out, "{n}");
        let mut blocks = vec![&self.flow, &self.distance];
        if let Some(b) = &self.linear_cost {
            blocks.push(b);
        }
        for m in blocks {
            out.push('\n');
            for r in 0..n {
                let line: Vec<String> = m.row(r).iter().map(i64::to_string).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        let mut rest = line;
        let mut offset = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let tail = &rest[start..];
            let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
            tokens.push(Token {
                text: &tail[..len],
                line: line_idx + 1,
                column: offset + start + 1,
            });
            offset += start + len;
            rest = &tail[len..];
        }
    }
    tokens
}

fn parse_int(tokens: &[Token<'_>], idx: usize) -> Result<i64> {
    let tok = &tokens[idx];
    tok.text.parse::<i64>().map_err(|_| QapError::Parse {
        token: idx,
        line: tok.line,
        column: tok.column,
        message: format!("expected an integer, found {:?}", tok.text),
    })
}

/// Parses QAPLIB text into an instance (unnamed).
pub fn parse_qaplib(text: &str) -> Result<QapInstance> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(QapError::EmptyInput);
    }
    let n_raw = parse_int(&tokens, 0)?;
    if n_raw < 2 {
        return Err(QapError::InvalidSize(n_raw.max(0) as usize));
    }
    let n = n_raw as usize;
    let block = n.checked_mul(n).ok_or(QapError::InvalidSize(n))?;
    let two = 1 + 2 * block;
    let three = 1 + 3 * block;
    let found = tokens.len();
    if found != two && found != three {
        return Err(QapError::TokenCount {
            expected: two,
            found,
        });
    }
    let values = (1..found)
        .map(|i| parse_int(&tokens, i))
        .collect::<Result<Vec<_>>>()?;
    let mut chunks = values.chunks_exact(block);
    let mut next = || Matrix::from_row_major(n, chunks.next().unwrap_or_default().to_vec());
    let flow = next()?;
    let distance = next()?;
    let linear = if found == three { Some(next()?) } else { None };
    QapInstance::build(String::new(), flow, distance, linear)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_smallest_instance() {
        let inst = parse_qaplib("2\n0 1\n1 0\n0 3\n3 0").unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(
            inst.flow(),
            &Matrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap()
        );
        assert_eq!(
            inst.distance(),
            &Matrix::from_rows(&[vec![0, 3], vec![3, 0]]).unwrap()
        );
        assert!(inst.linear_cost().is_none());
    }

    #[test]
    fn truncated_input_reports_counts() {
        let err = parse_qaplib("3\n0 1").unwrap_err();
        assert_eq!(
            err,
            QapError::TokenCount {
                expected: 19,
                found: 3
            }
        );
        assert!(err.to_string().contains("expected 19"));
    }

    #[test]
    fn rejects_small_sizes() {
        assert_eq!(
            parse_qaplib("1\n0\n0").unwrap_err(),
            QapError::InvalidSize(1)
        );
        assert_eq!(parse_qaplib("0").unwrap_err(), QapError::InvalidSize(0));
        assert_eq!(parse_qaplib("-4").unwrap_err(), QapError::InvalidSize(0));
        assert_eq!(parse_qaplib("  \n ").unwrap_err(), QapError::EmptyInput);
    }

    #[test]
    fn non_numeric_token_has_position() {
        let err = parse_qaplib("2\n0 1\n1 x\n0 3\n3 0").unwrap_err();
        match err {
            QapError::Parse {
                token,
                line,
                column,
                ..
            } => {
                assert_eq!((token, line, column), (4, 3, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn third_block_is_linear_cost() {
        let inst = parse_qaplib("2\n0 1\n1 0\n\n0 3\n3 0\n\n5 0\n0 7\n").unwrap();
        let b = inst.linear_cost().unwrap();
        assert_eq!(b.get(0, 0), 5);
        assert_eq!(b.get(1, 1), 7);
    }

    #[test]
    fn trailing_whitespace_ignored() {
        assert!(parse_qaplib("2 0 1 1 0 0 3 3 0   \n\n\t").is_ok());
    }

    #[test]
    fn serialize_round_trip() {
        let inst = parse_qaplib("3\n0 1 2\n1 0 4\n2 4 0\n0 5 6\n5 0 7\n6 7 0\n1 2 3\n4 5 6\n7 8 9")
            .unwrap();
        let again = parse_qaplib(&inst.to_qaplib()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn swapped_exchanges_matrices() {
        let inst = parse_qaplib("2\n0 1\n1 0\n0 3\n3 0").unwrap();
        let s = inst.swapped();
        assert_eq!(s.flow(), inst.distance());
        assert_eq!(s.distance(), inst.flow());
    }

    #[test]
    fn swapped_cost_matches_under_inverse_assignment() {
        use crate::assignment::Assignment;
        use crate::cost::objective;
        let f = Matrix::from_rows(&[vec![0, 3, 1], vec![2, 0, 5], vec![4, 1, 0]]).unwrap();
        let d = Matrix::from_rows(&[vec![0, 7, 2], vec![1, 0, 3], vec![6, 2, 0]]).unwrap();
        let b = Matrix::from_rows(&[vec![1, 9, 4], vec![3, 0, 8], vec![5, 2, 7]]).unwrap();
        let inst = QapInstance::with_linear_cost(f, d, b).unwrap();
        let a = Assignment::new(vec![2, 0, 1]).unwrap();
        assert_eq!(
            objective(&inst.swapped(), &a.inverse()).unwrap(),
            objective(&inst, &a).unwrap()
        );
    }
}
