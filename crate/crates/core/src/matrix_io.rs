// Copyright 2026 The lugo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Plain-text matrix and vector files.
//!
//! The first line holds `rows cols`; it is followed by `rows * cols`
//! whitespace-separated entries in row-major order, each written `re,im`
//! (a bare real number is also accepted). Vectors use `cols = 1`.

use std::fmt::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

fn parse_entry(token: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("invalid complex entry `{token}`"));
    match token.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Complex64::new(token.parse().map_err(|_| bad())?, 0.0)),
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("invalid dimension `{t}`")))
        })
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse(format!(
            "header must be `rows cols`, got `{header}`"
        )));
    };
    let entries: Vec<Complex64> = lines
        .flat_map(str::split_whitespace)
        .map(parse_entry)
        .collect::<Result<_>>()?;
    if entries.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries for a {rows}x{cols} matrix, found {}",
            rows * cols,
            entries.len()
        )));
    }
    ComplexMatrix::new(rows, cols, entries)
}

pub fn parse_vector(text: &str) -> Result<Vec<Complex64>> {
    let m = parse_matrix(text)?;
    if m.cols() != 1 {
        return Err(Error::Parse(format!(
            "vector file must have one column, found {}",
            m.cols()
        )));
    }
    Ok(m.data().to_vec())
}

pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|z| format!("{},{}", z.re, z.im)).collect();
        writeln!(out, "{}", row.join(" ")).expect("writing to a String");
    }
    out
}

pub fn format_vector(v: &[Complex64]) -> String {
    let m = ComplexMatrix::new(v.len(), 1, v.to_vec()).expect("non-empty vector");
    format_matrix(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_entries() {
        let m = parse_matrix("2 2\n1,0 -1\n0,0.5 2,-1e-3\n").unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(-1.0, 0.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 0.5));
        assert_eq!(m[(1, 1)], Complex64::new(2.0, -1e-3));
    }

    #[test]
    fn round_trips_exactly() {
        let m = ComplexMatrix::from_fn(3, 2, |r, c| Complex64::new(0.1 * r as f64, 1.0 / (c as f64 + 3.0)));
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
        let v = vec![Complex64::new(std::f64::consts::PI, -0.0), Complex64::new(1e-300, 2.5)];
        assert_eq!(parse_vector(&format_vector(&v)).unwrap(), v);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2\n1 2").is_err());
        assert!(parse_matrix("2 2\n1 2 3").is_err());
        assert!(parse_matrix("1 1\nx,1").is_err());
        assert!(parse_vector("1 2\n1 2").is_err());
    }
}
