use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::series::{ExactSeries, Rational};
use crate::error::{Error, Result};

/// Iterates `s <- builder(s)` from `seed` until it stops changing.
///
/// The builder must be contractive in the weighted-degree filtration: after
/// step `n` every level below `n` is final. A level that changes after it
/// was fixed aborts with [`Error::NonContraction`].
pub fn solve_fixed_point<F>(mut builder: F, seed: &ExactSeries) -> Result<ExactSeries>
where
    F: FnMut(&ExactSeries) -> Result<ExactSeries>,
{
    let ring = seed.ring().clone();
    let max_steps = ring.total_cap() as usize + 2;
    let mut current = seed.clone();
    for step in 0..=max_steps {
        let next = builder(&current)?;
        if next.ring() != &ring {
            return Err(Error::RingMismatch {
                left: ring.describe(),
                right: next.ring().describe(),
            });
        }
        if next == current {
            return Ok(next);
        }
        // levels strictly below `step` must already agree
        let diff = next.try_sub(&current)?;
        if let Some(level) = diff
            .terms()
            .map(|(m, _)| ring.weighted_degree(m))
            .filter(|&d| d < step as u64)
            .min()
        {
            return Err(Error::NonContraction { level: level as u32 });
        }
        current = next;
    }
    Err(Error::NoConvergence(max_steps))
}

/// `log s` where the constant term of `s` is `2^k` (k any integer); the
/// constant `k log 2` is carried by the weight-0 ring variable `log2_var`.
pub fn log_tracking_two(s: &ExactSeries, log2_var: &str) -> Result<ExactSeries> {
    let c = s.constant_term();
    let k = power_of_two(&c).ok_or_else(|| Error::LogConstant(c.to_string()))?;
    let unit = s.scale(&c.recip());
    let mut out = unit.log_unit()?;
    if k != 0 {
        let l2 = ExactSeries::var(s.ring(), log2_var)?;
        out = out.try_add(&l2.scale(&Rational::from_integer(BigInt::from(k))))?;
    }
    Ok(out)
}

fn power_of_two(c: &Rational) -> Option<i64> {
    if c <= &Rational::zero() {
        return None;
    }
    let two = BigInt::from(2);
    let (mut n, mut d) = (c.numer().clone(), c.denom().clone());
    let mut k = 0i64;
    while (&n % &two).is_zero() {
        n /= &two;
        k += 1;
    }
    while (&d % &two).is_zero() {
        d /= &two;
        k -= 1;
    }
    (n.is_one() && d.is_one()).then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat, Ring, TruncationSpec, VarSpec};

    fn ring_t(cap: u32) -> Ring {
        Ring::new(
            vec![VarSpec::new("t0", 1), VarSpec::new("t1", 1)],
            TruncationSpec::new(cap),
        )
        .unwrap()
    }

    #[test]
    fn constant_builder() {
        let r = ring_t(3);
        let c = ExactSeries::constant(&r, rat(7, 3));
        let s = solve_fixed_point(|_| Ok(c.clone()), &ExactSeries::zero(&r)).unwrap();
        assert_eq!(s, c);
    }

    #[test]
    fn linear_v_equation() {
        // v = t0 + t1 v  =>  v = t0 / (1 - t1)
        let r = ring_t(6);
        let t0 = ExactSeries::var(&r, "t0").unwrap();
        let t1 = ExactSeries::var(&r, "t1").unwrap();
        let v = solve_fixed_point(|v| Ok(&t0 + &(&t1 * v)), &ExactSeries::zero(&r)).unwrap();
        let expected = &t0 * &(ExactSeries::one(&r) - t1.clone()).invert_unit().unwrap();
        assert_eq!(v, expected);
        let residual = &v - &(&t0 + &(&t1 * &v));
        assert!(residual.is_zero());
    }

    #[test]
    fn non_contraction_is_detected() {
        let r = ring_t(4);
        let mut flip = false;
        let err = solve_fixed_point(
            |_| {
                flip = !flip;
                Ok(ExactSeries::constant(&r, if flip { int(1) } else { int(2) }))
            },
            &ExactSeries::zero(&r),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonContraction { level: 0 }));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(power_of_two(&rat(8, 1)), Some(3));
        assert_eq!(power_of_two(&rat(1, 4)), Some(-2));
        assert_eq!(power_of_two(&rat(3, 1)), None);
        assert_eq!(power_of_two(&rat(-2, 1)), None);
    }

    #[test]
    fn log_of_two_times_unit() {
        let r = Ring::new(
            vec![VarSpec::new("X", 0), VarSpec::new("log2", 0)],
            TruncationSpec::new(0).with_cap("X", 5).with_cap("log2", 1),
        )
        .unwrap();
        let x = ExactSeries::var(&r, "X").unwrap();
        let unit = ExactSeries::one(&r) + x.clone();
        let two_unit = unit.scale(&int(2));
        let lhs = log_tracking_two(&two_unit, "log2").unwrap();
        let rhs = ExactSeries::var(&r, "log2").unwrap() + unit.log_unit().unwrap();
        assert_eq!(lhs, rhs);
    }
}
