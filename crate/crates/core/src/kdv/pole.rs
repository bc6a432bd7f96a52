//! Passing from the pole variable `s = 1/(1 - T1)` to plain powers of `T1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::{ExactSeries, Monomial, Ring};

/// Re-expresses a series in `s` over `target`, which has `t_var` in place of
/// `s` and otherwise matching variable names. Terms beyond the target's
/// truncation are dropped.
pub fn pole_to_power(
    series: &ExactSeries,
    pole_var: &str,
    t_var: &str,
    target: &Ring,
) -> Result<ExactSeries> {
    let src = series.ring();
    let si = src.index_of(pole_var)?;
    let map: Vec<Option<usize>> = src
        .vars()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i == si {
                Ok(None)
            } else {
                target
                    .try_index_of(&v.name)
                    .map(Some)
                    .ok_or_else(|| Error::UnknownVariable(v.name.clone()))
            }
        })
        .collect::<Result<_>>()?;
    let mut groups: BTreeMap<u16, ExactSeries> = BTreeMap::new();
    for (m, c) in series.terms() {
        let mut t = Monomial::one(target.nvars());
        for (i, &e) in m.exps().iter().enumerate() {
            if let Some(j) = map[i] {
                t.exps_mut()[j] = e;
            }
        }
        groups
            .entry(m.get(si))
            .or_insert_with(|| ExactSeries::zero(target))
            .add_term(t, c.clone());
    }
    let geometric = ExactSeries::one(target)
        .try_sub(&ExactSeries::var(target, t_var)?)?
        .invert_unit()?;
    let mut out = ExactSeries::zero(target);
    let mut power = ExactSeries::one(target);
    let mut at = 0;
    for (k, part) in groups {
        while at < k {
            power = power.try_mul(&geometric)?;
            at += 1;
        }
        out = out.try_add(&part.try_mul(&power)?)?;
    }
    Ok(out)
}
