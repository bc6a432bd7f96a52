use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::{ExactSeries, Monomial, Rational};

/// Solves `sum_j c_j columns[j] = target` coefficient by coefficient.
/// The system must have full column rank and be consistent; the solution is
/// then re-checked against the full target as a series identity.
pub fn solve_columns(columns: &[ExactSeries], target: &ExactSeries) -> Result<Vec<Rational>> {
    let n = columns.len();
    if n == 0 {
        return Err(Error::LinearSystem("no unknowns".into()));
    }
    let mut rows: BTreeMap<&Monomial, Vec<Rational>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (m, c) in col.terms() {
            rows.entry(m).or_insert_with(|| vec![Rational::zero(); n + 1])[j] = c.clone();
        }
    }
    for (m, c) in target.terms() {
        rows.entry(m).or_insert_with(|| vec![Rational::zero(); n + 1])[n] = c.clone();
    }

    // incremental elimination: pivots[j] is a row whose first nonzero is j
    let mut pivots: Vec<Option<Vec<Rational>>> = vec![None; n];
    for (_, mut row) in rows {
        let mut lead = None;
        for j in 0..n {
            if row[j].is_zero() {
                continue;
            }
            let Some(p) = &pivots[j] else {
                lead = Some(j);
                break;
            };
            let f = row[j].clone();
            for k in j..=n {
                let d = &f * &p[k];
                row[k] -= d;
            }
        }
        match lead {
            Some(j) => {
                let inv = row[j].recip();
                for v in row.iter_mut().skip(j) {
                    *v *= &inv;
                }
                pivots[j] = Some(row);
            }
            None if !row[n].is_zero() => {
                return Err(Error::LinearSystem("inconsistent system".into()));
            }
            None => {}
        }
    }
    let missing = pivots.iter().filter(|p| p.is_none()).count();
    if missing > 0 {
        return Err(Error::LinearSystem(format!(
            "singular system: rank {} of {n}",
            n - missing
        )));
    }
    let mut sol = vec![Rational::zero(); n];
    for j in (0..n).rev() {
        let p = pivots[j].as_ref().expect("full rank");
        let mut v = p[n].clone();
        for k in j + 1..n {
            v -= &p[k] * &sol[k];
        }
        sol[j] = v;
    }

    let mut check = target.clone();
    for (c, col) in sol.iter().zip(columns) {
        check = check.try_sub(&col.scale(c))?;
    }
    if let Some((m, c)) = check.first_term() {
        return Err(Error::LinearSystem(format!(
            "nonzero residual at {}: {c}",
            check.format_monomial(m)
        )));
    }
    Ok(sol)
}
