use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{Exp, Monomial};
use super::ring::Ring;
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Sparse truncated multivariate power series with exact rational
/// coefficients. No zero coefficient is stored and every stored monomial
/// is admitted by the ring's truncation rule.
#[derive(Clone, PartialEq)]
pub struct ExactSeries {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl ExactSeries {
    pub fn zero(ring: &Ring) -> Self {
        ExactSeries {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: Rational) -> Self {
        let mut s = Self::zero(ring);
        s.insert(Monomial::one(ring.nvars()), c);
        s
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn var(ring: &Ring, name: &str) -> Result<Self> {
        let i = ring.index_of(name)?;
        let m = Monomial::one(ring.nvars()).with(i, 1);
        let mut s = Self::zero(ring);
        s.insert(m, Rational::one());
        Ok(s)
    }

    /// `c * prod var^exp` for the given (name, exponent) pairs.
    pub fn term(ring: &Ring, powers: &[(&str, Exp)], c: Rational) -> Result<Self> {
        let mut m = Monomial::one(ring.nvars());
        for (name, e) in powers {
            let i = ring.index_of(name)?;
            m.exps_mut()[i] += *e;
        }
        let mut s = Self::zero(ring);
        s.insert(m, c);
        Ok(s)
    }

    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut s = Self::zero(ring);
        for (m, c) in terms {
            assert_eq!(m.exps().len(), ring.nvars(), "monomial arity");
            s.add_term(m, c);
        }
        s
    }

    fn insert(&mut self, m: Monomial, c: Rational) {
        if !c.is_zero() && self.ring.admits(&m) {
            self.terms.insert(m, c);
        }
    }

    /// Accumulates `c * m`, dropping it if truncated away.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || !self.ring.admits(&m) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the monomial given as (name, exponent) pairs.
    pub fn coeff_of(&self, powers: &[(&str, Exp)]) -> Result<Rational> {
        let mut m = Monomial::one(self.ring.nvars());
        for (name, e) in powers {
            m.exps_mut()[self.ring.index_of(name)?] = *e;
        }
        Ok(self.coeff(&m))
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.ring.nvars()))
    }

    fn check_ring(&self, other: &ExactSeries) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch {
                left: self.ring.describe(),
                right: other.ring.describe(),
            })
        }
    }

    pub fn try_add(&self, other: &ExactSeries) -> Result<ExactSeries> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &ExactSeries) -> Result<ExactSeries> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &ExactSeries) -> Result<ExactSeries> {
        self.check_ring(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &ExactSeries) -> ExactSeries {
        let ring = &self.ring;
        if self.is_zero() || other.is_zero() {
            return ExactSeries::zero(ring);
        }
        let total = ring.total_cap() as u64;
        let caps: Vec<Option<u32>> = (0..ring.nvars()).map(|i| ring.cap(i)).collect();
        let mut rhs: Vec<(u64, &Monomial, &Rational)> = other
            .terms
            .iter()
            .map(|(m, c)| (ring.weighted_degree(m), m, c))
            .collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (ma, ca) in &self.terms {
            let wa = ring.weighted_degree(ma);
            if wa > total {
                continue;
            }
            let end = rhs.partition_point(|t| t.0 <= total - wa);
            'inner: for (_, mb, cb) in &rhs[..end] {
                let mut m = ma.clone();
                for (i, e) in m.exps_mut().iter_mut().enumerate() {
                    *e += mb.get(i);
                    if let Some(c) = caps[i] {
                        if *e as u32 > c {
                            continue 'inner;
                        }
                    }
                }
                let p = ca * *cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += p,
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        ExactSeries {
            ring: ring.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> ExactSeries {
        if c.is_zero() {
            return ExactSeries::zero(&self.ring);
        }
        ExactSeries {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> ExactSeries {
        let mut result = ExactSeries::one(&self.ring);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Multiplies by `var^k`.
    pub fn shift(&self, var: &str, k: Exp) -> Result<ExactSeries> {
        let i = self.ring.index_of(var)?;
        Ok(ExactSeries::from_terms(
            &self.ring,
            self.terms.iter().map(|(m, c)| {
                let mut m = m.clone();
                m.exps_mut()[i] += k;
                (m, c.clone())
            }),
        ))
    }

    /// Exact division by `var^k`; every term must be divisible.
    pub fn unshift(&self, var: &str, k: Exp) -> Result<ExactSeries> {
        let i = self.ring.index_of(var)?;
        let mut out = ExactSeries::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.get(i) < k {
                return Err(Error::Invariant(format!(
                    "term not divisible by {var}^{k}"
                )));
            }
            let mut m = m.clone();
            m.exps_mut()[i] -= k;
            out.insert(m, c.clone());
        }
        Ok(out)
    }

    pub fn derive(&self, var: &str) -> Result<ExactSeries> {
        let i = self.ring.index_of(var)?;
        Ok(self.derive_index(i))
    }

    pub(crate) fn derive_index(&self, i: usize) -> ExactSeries {
        let mut out = ExactSeries::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e > 0 {
                out.insert(m.with(i, e - 1), c * BigInt::from(e));
            }
        }
        out
    }

    /// Antiderivative with zero constant term in `var`.
    pub fn integrate(&self, var: &str) -> Result<ExactSeries> {
        let i = self.ring.index_of(var)?;
        let mut out = ExactSeries::zero(&self.ring);
        for (m, c) in &self.terms {
            let up = m.with(i, m.get(i) + 1);
            if !self.ring.admits(&up) {
                return Err(Error::CapOverflow {
                    var: var.to_string(),
                    cap: self.ring.cap(i).unwrap_or(self.ring.total_cap()),
                });
            }
            out.insert(up, c / BigInt::from(m.get(i) + 1));
        }
        Ok(out)
    }

    /// Like `integrate`, but terms pushed past the truncation are dropped.
    pub fn integrate_truncating(&self, var: &str) -> Result<ExactSeries> {
        let i = self.ring.index_of(var)?;
        let mut out = ExactSeries::zero(&self.ring);
        for (m, c) in &self.terms {
            out.insert(m.with(i, m.get(i) + 1), c / BigInt::from(m.get(i) + 1));
        }
        Ok(out)
    }

    /// Coefficient of `var^k`, as a series with no `var` dependence.
    pub fn slice(&self, var: &str, k: Exp) -> Result<ExactSeries> {
        let i = self.ring.index_of(var)?;
        Ok(ExactSeries {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.get(i) == k)
                .map(|(m, c)| (m.with(i, 0), c.clone()))
                .collect(),
        })
    }

    /// Sets `var = 0`.
    pub fn restrict_zero(&self, var: &str) -> Result<ExactSeries> {
        self.slice(var, 0)
    }

    pub fn max_exponent(&self, var: &str) -> Result<Exp> {
        let i = self.ring.index_of(var)?;
        Ok(self.terms.keys().map(|m| m.get(i)).max().unwrap_or(0))
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> ExactSeries {
        ExactSeries {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops every term not admitted by the ring `target` (same variables).
    pub fn truncated_to(&self, target: &Ring) -> Result<ExactSeries> {
        if target.vars() != self.ring.vars() {
            return Err(Error::RingMismatch {
                left: self.ring.describe(),
                right: target.describe(),
            });
        }
        Ok(ExactSeries::from_terms(
            target,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        ))
    }

    /// Re-expresses the series over `target`, matching variables by name.
    /// Variables missing from `target` must not occur.
    pub fn embed(&self, target: &Ring) -> Result<ExactSeries> {
        let map: Vec<Option<usize>> = self
            .ring
            .vars()
            .iter()
            .map(|v| target.try_index_of(&v.name))
            .collect();
        let mut out = ExactSeries::zero(target);
        for (m, c) in &self.terms {
            let mut t = Monomial::one(target.nvars());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => t.exps_mut()[j] = e,
                    None => {
                        return Err(Error::UnknownVariable(self.ring.vars()[i].name.clone()))
                    }
                }
            }
            out.add_term(t, c.clone());
        }
        Ok(out)
    }

    /// Composition `s|_{var = value}`. A value with nonzero constant term is
    /// refused unless `allow_constant` is set.
    pub fn substitute_with(
        &self,
        var: &str,
        value: &ExactSeries,
        allow_constant: bool,
    ) -> Result<ExactSeries> {
        self.check_ring(value)?;
        let i = self.ring.index_of(var)?;
        if !allow_constant && !value.constant_term().is_zero() {
            return Err(Error::ConstantSubstitution(var.to_string()));
        }
        let mut groups: BTreeMap<Exp, ExactSeries> = BTreeMap::new();
        for (m, c) in &self.terms {
            groups
                .entry(m.get(i))
                .or_insert_with(|| ExactSeries::zero(&self.ring))
                .add_term(m.with(i, 0), c.clone());
        }
        let mut out = ExactSeries::zero(&self.ring);
        let mut power = ExactSeries::one(&self.ring);
        let mut at = 0;
        for (k, coeff) in groups {
            while at < k {
                power = power.mul_unchecked(value);
                at += 1;
            }
            out = out.try_add(&coeff.mul_unchecked(&power))?;
        }
        Ok(out)
    }

    pub fn substitute(&self, var: &str, value: &ExactSeries) -> Result<ExactSeries> {
        self.substitute_with(var, value, false)
    }

    /// Sum of `coeffs[k] * w^k` for a series `w` with zero constant term,
    /// stopping once powers of `w` vanish under truncation.
    pub(crate) fn nilpotent_sum(
        w: &ExactSeries,
        mut coeff: impl FnMut(usize) -> Rational,
    ) -> Result<ExactSeries> {
        if !w.constant_term().is_zero() {
            return Err(Error::Invariant("nilpotent_sum needs zero constant term".into()));
        }
        let ring = w.ring();
        let bound = nilpotency_bound(ring);
        let mut out = ExactSeries::constant(ring, coeff(0));
        let mut power = ExactSeries::one(ring);
        for k in 1..=bound + 1 {
            power = power.mul_unchecked(w);
            if power.is_zero() {
                return Ok(out);
            }
            let c = coeff(k);
            if !c.is_zero() {
                out = out.try_add(&power.scale(&c))?;
            }
        }
        Err(Error::NotNilpotent)
    }

    pub fn invert_unit(&self) -> Result<ExactSeries> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv_c = c.recip();
        // s = c (1 + w)
        let w = self
            .scale(&inv_c)
            .try_sub(&ExactSeries::one(&self.ring))?;
        let geo = Self::nilpotent_sum(&w, |k| if k % 2 == 0 { int(1) } else { int(-1) })?;
        Ok(geo.scale(&inv_c))
    }

    /// `log s` for a series with constant term 1.
    pub fn log_unit(&self) -> Result<ExactSeries> {
        let c = self.constant_term();
        if !c.is_one() {
            return Err(Error::LogConstant(c.to_string()));
        }
        let w = self.try_sub(&ExactSeries::one(&self.ring))?;
        Self::nilpotent_sum(&w, |k| {
            if k == 0 {
                int(0)
            } else if k % 2 == 1 {
                rat(1, k as i64)
            } else {
                rat(-1, k as i64)
            }
        })
    }

    pub fn exp_nilpotent(&self) -> Result<ExactSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::ExpConstant);
        }
        let mut fact = Rational::one();
        Self::nilpotent_sum(self, |k| {
            if k > 0 {
                fact /= BigInt::from(k);
            }
            fact.clone()
        })
    }

    /// Square root with constant term +1.
    pub fn sqrt_unit(&self) -> Result<ExactSeries> {
        self.log_unit()?.scale(&rat(1, 2)).exp_nilpotent()
    }

    /// Integer power, negative exponents via `invert_unit`.
    pub fn powi(&self, n: i32) -> Result<ExactSeries> {
        if n >= 0 {
            Ok(self.pow(n as u32))
        } else {
            Ok(self.invert_unit()?.pow((-n) as u32))
        }
    }

    pub fn first_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    /// Human-readable monomial, e.g. `X^2*T1`.
    pub fn format_monomial(&self, m: &Monomial) -> String {
        format_monomial(&self.ring, m)
    }
}

pub fn format_monomial(ring: &Ring, m: &Monomial) -> String {
    let parts: Vec<String> = m
        .exps()
        .iter()
        .zip(ring.vars())
        .filter(|(&e, _)| e > 0)
        .map(|(&e, v)| {
            if e == 1 {
                v.name.clone()
            } else {
                format!("{}^{}", v.name, e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Upper bound on the number of factors a zero-constant series can take
/// before its powers vanish, when that is guaranteed at all.
fn nilpotency_bound(ring: &Ring) -> usize {
    let mut b = ring.total_cap() as usize;
    for i in 0..ring.nvars() {
        if let Some(c) = ring.cap(i) {
            b += c as usize;
        }
    }
    b + 1
}

impl fmt::Debug for ExactSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let mono = self.format_monomial(m);
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if mono == "1" {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<'a> $tr<&'a ExactSeries> for &'a ExactSeries {
            type Output = ExactSeries;
            fn $m(self, rhs: &'a ExactSeries) -> ExactSeries {
                self.$f(rhs).expect("series operands from different rings")
            }
        }
        impl $tr<ExactSeries> for ExactSeries {
            type Output = ExactSeries;
            fn $m(self, rhs: ExactSeries) -> ExactSeries {
                self.$f(&rhs).expect("series operands from different rings")
            }
        }
        impl<'a> $tr<&'a ExactSeries> for ExactSeries {
            type Output = ExactSeries;
            fn $m(self, rhs: &'a ExactSeries) -> ExactSeries {
                self.$f(rhs).expect("series operands from different rings")
            }
        }
        impl<'a> $tr<ExactSeries> for &'a ExactSeries {
            type Output = ExactSeries;
            fn $m(self, rhs: ExactSeries) -> ExactSeries {
                self.$f(&rhs).expect("series operands from different rings")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &ExactSeries {
    type Output = ExactSeries;
    fn neg(self) -> ExactSeries {
        self.scale(&int(-1))
    }
}

impl Neg for ExactSeries {
    type Output = ExactSeries;
    fn neg(self) -> ExactSeries {
        self.scale(&int(-1))
    }
}
