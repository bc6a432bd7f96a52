use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Result;
use crate::series::{int, rat, ExactSeries, Rational, Ring};

/// Bernoulli number `B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Rational {
    let mut b: Vec<Rational> = vec![int(1)];
    for m in 1..=n {
        // sum_{k<=m} C(m+1, k) B_k = 0
        let mut acc = Rational::zero();
        let mut binom = BigInt::from(1);
        for (k, bk) in b.iter().enumerate() {
            acc += bk * &binom;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / binom);
    }
    b.swap_remove(n)
}

/// `(-1)^g 2^{g-1} B_{2g} / (2g (2g-2))`, the coefficient of
/// `hbar^{2g-2} / x^{2g-2}` in the boundary value, for `g >= 2`.
pub fn boundary_coefficient(g: u32) -> Rational {
    let g = g as i64;
    let sign = if g % 2 == 0 { 1 } else { -1 };
    let num = bernoulli(2 * g as usize) * int(sign * (1i64 << (g - 1)));
    num / int(2 * g * (2 * g - 2))
}

/// `log(-x/2) = log(1 - X/2)` over a ring with `X = x + 2`.
pub fn log_minus_half_x(ring: &Ring) -> Result<ExactSeries> {
    let half_x = ExactSeries::var(ring, "X")?.scale(&rat(1, 2));
    ExactSeries::one(ring).try_sub(&half_x)?.log_unit()
}

/// Genus-`g` part `B_g(x)` of the boundary value of the free energy at
/// `T = 0`, over a ring with `X = x + 2`.
pub fn boundary_value(g: u32, ring: &Ring) -> Result<ExactSeries> {
    let x = ExactSeries::var(ring, "X")?.try_sub(&ExactSeries::constant(ring, int(2)))?;
    match g {
        0 => {
            let x2 = x.pow(2);
            x2.scale(&rat(1, 4))
                .try_mul(&log_minus_half_x(ring)?)?
                .try_sub(&x2.scale(&rat(3, 8)))
        }
        1 => Ok(log_minus_half_x(ring)?.scale(&rat(1, 12))),
        _ => Ok(x.powi(-(2 * g as i32 - 2))?.scale(&boundary_coefficient(g))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn boundary_coefficients() {
        assert_eq!(boundary_coefficient(2), rat(-1, 120));
        // (-1)^3 * 4 * (1/42) / (6 * 4)
        assert_eq!(boundary_coefficient(3), rat(-1, 252));
    }
}
