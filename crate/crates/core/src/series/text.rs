//! Canonical text form: one line per term, `e1,e2,...<TAB>num/den`, terms
//! in graded-lex order. Denominators are always written.

use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::monomial::{Exp, Monomial};
use super::ring::Ring;
use super::series::ExactSeries;
use crate::error::{Error, Result};

pub fn to_canonical_text(s: &ExactSeries) -> String {
    let mut out = String::new();
    for (m, c) in s.terms() {
        let exps: Vec<String> = m.exps().iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "{}\t{}/{}", exps.join(","), c.numer(), c.denom());
    }
    out
}

pub fn from_canonical_text(ring: &Ring, text: &str) -> Result<ExactSeries> {
    let mut terms = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
        let (exps, coeff) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
        let exps: Vec<Exp> = exps
            .split(',')
            .map(|e| e.parse::<Exp>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("bad exponent"))?;
        if exps.len() != ring.nvars() {
            return Err(bad("exponent vector arity"));
        }
        let (n, d) = coeff.split_once('/').ok_or_else(|| bad("missing `/`"))?;
        let n: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
        if d <= BigInt::from(0) {
            return Err(bad("denominator must be positive"));
        }
        let m = Monomial::from_exps(&exps);
        if !ring.admits(&m) {
            return Err(bad("monomial outside truncation"));
        }
        terms.push((m, BigRational::new(n, d)));
    }
    Ok(ExactSeries::from_terms(ring, terms))
}

/// CSV with one column per variable plus numerator and denominator.
pub fn to_csv(s: &ExactSeries) -> String {
    let mut out = String::new();
    let header: Vec<&str> = s.ring().vars().iter().map(|v| v.name.as_str()).collect();
    let _ = writeln!(out, "{},numerator,denominator", header.join(","));
    for (m, c) in s.terms() {
        let exps: Vec<String> = m.exps().iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "{},{},{}", exps.join(","), c.numer(), c.denom());
    }
    out
}
