//! Text formats for matrices and polynomials.
//!
//! A matrix is written as "rows cols" followed by the entries in row-major
//! order, all separated by whitespace; a file may hold several matrices back
//! to back. Inline matrices may also be written as nested brackets,
//! "[[2,1],[1,2]]". A polynomial is a comma-separated list of integer
//! coefficients, highest degree first; files hold one per line.

use std::path::Path;

use crate::error::{Error, Result};
use crate::numcore::{IntMatrix, IntPolynomial};

fn int(tok: &str) -> Result<i64> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("'{tok}' is not an integer")))
}

/// All matrices in a "rows cols entries..." stream.
pub fn parse_matrices(text: &str) -> Result<Vec<IntMatrix>> {
    let toks: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if i + 2 > toks.len() {
            return Err(Error::Parse("truncated matrix header".into()));
        }
        let (r, c) = (int(toks[i])?, int(toks[i + 1])?);
        if r <= 0 || c <= 0 {
            return Err(Error::Parse(format!("matrix shape {r}x{c} must be positive")));
        }
        let (r, c) = (r as usize, c as usize);
        i += 2;
        if i + r * c > toks.len() {
            return Err(Error::Parse(format!(
                "matrix {r}x{c} needs {} entries, found {}",
                r * c,
                toks.len() - i
            )));
        }
        let e = toks[i..i + r * c].iter().map(|t| int(t)).collect::<Result<Vec<_>>>()?;
        i += r * c;
        out.push(IntMatrix::new(r, c, e)?);
    }
    Ok(out)
}

/// Exactly one matrix, in either the plain or the bracket format.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let t = text.trim();
    if t.starts_with('[') {
        let rows: Vec<Vec<i64>> =
            serde_json::from_str(t).map_err(|e| Error::Parse(format!("bad bracket matrix '{t}': {e}")))?;
        return IntMatrix::from_rows(&rows);
    }
    let mut all = parse_matrices(t)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(Error::Parse("no matrix found".into())),
        k => Err(Error::Parse(format!("expected one matrix, found {k}"))),
    }
}

/// A matrix given either as a path to a file or inline.
pub fn parse_matrix_arg(arg: &str) -> Result<IntMatrix> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(arg, e))?;
        parse_matrix(&text)
    } else {
        parse_matrix(arg)
    }
}

/// One polynomial per nonblank line.
pub fn parse_polynomials(text: &str) -> Result<Vec<IntPolynomial>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(IntPolynomial::parse_descending)
        .collect()
}
